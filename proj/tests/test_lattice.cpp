#include "doctest.h"
#include "loopmc/lattice.hpp"

using namespace loopmc;

TEST_SUITE("lattice") {

TEST_CASE("chains")
{
    const auto open2 = build_graph(ChainSpec{2, Boundary::open});
    CHECK(open2.num_sites() == 2);
    CHECK(open2.num_edges() == 1);

    const auto ring = build_graph(ChainSpec{4, Boundary::periodic});
    CHECK(ring.num_sites() == 4);
    CHECK(ring.num_edges() == 4);
    for (Site x = 0; x < 4; ++x)
        CHECK(ring.degree(x) == 2);
    CHECK(ring.describe() == "chain(4,periodic)");
}

TEST_CASE("torus(2,2) doubles every bond")
{
    const auto g = build_graph(TorusSpec{{2, 2}});
    CHECK(g.num_sites() == 4);
    CHECK(g.num_edges() == 8);
    auto count = [&](Site a, Site b) {
        int n = 0;
        for (const auto& e : g.edges())
            n += (e.x == a && e.y == b) || (e.x == b && e.y == a);
        return n;
    };
    // row-major: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1)
    CHECK(count(0, 1) == 2);
    CHECK(count(0, 2) == 2);
    CHECK(count(1, 3) == 2);
    CHECK(count(2, 3) == 2);
    CHECK(count(0, 3) == 0);
}

TEST_CASE("torus edge count and degree for extents >= 3")
{
    for (const auto& ext : std::vector<std::vector<std::size_t>>{{3}, {3, 4}, {4, 4, 4}, {3, 5, 3}}) {
        const auto g = build_graph(TorusSpec{ext});
        std::size_t n = 1;
        for (auto L : ext)
            n *= L;
        CHECK(g.num_sites() == n);
        CHECK(g.num_edges() == ext.size() * n);
        for (Site x = 0; x < n; ++x)
            CHECK(g.degree(x) == 2 * ext.size());
    }
}

TEST_CASE("build_graph is deterministic")
{
    const auto a = build_graph(TorusSpec{{3, 4}});
    const auto b = build_graph(TorusSpec{{3, 4}});
    REQUIRE(a.num_edges() == b.num_edges());
    for (std::size_t i = 0; i < a.num_edges(); ++i)
        CHECK(a.edge(i) == b.edge(i));
}

TEST_CASE("invalid specs")
{
    CHECK_THROWS_AS(build_graph(ChainSpec{0, Boundary::open}), GraphError);
    CHECK_THROWS_AS(build_graph(TorusSpec{{}}), GraphError);
    CHECK_THROWS_AS(build_graph(TorusSpec{{3, 1}}), GraphError);
    CHECK_THROWS_AS(build_graph(EdgeListSpec{3, {{0, 1}, {1, 3}}}), GraphError);
    CHECK_THROWS_AS(build_graph(EdgeListSpec{3, {{0, 1}, {2, 2}}}), GraphError);

    const auto g = build_graph(EdgeListSpec{3, {{0, 1}, {0, 1}, {1, 2}}});
    CHECK(g.num_edges() == 3);
    CHECK(build_graph(EdgeListSpec{1, {}}).num_edges() == 0);
}

}
