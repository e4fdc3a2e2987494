#include <cmath>
#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "loopmc/loops.hpp"

using namespace loopmc;

namespace {

/// Union-find over site segments with an orientation parity per node. A
/// cross joins the segment ending at t on one site with the segment starting
/// at t on the other with equal orientation; a bar joins the two ending
/// segments (and the two starting ones) with opposite orientation.
struct ParityUnionFind {
    std::vector<std::size_t> parent;
    std::vector<int> parity;  // relative to parent

    explicit ParityUnionFind(std::size_t n) : parent(n), parity(n, 0)
    {
        std::iota(parent.begin(), parent.end(), 0);
    }

    std::pair<std::size_t, int> find(std::size_t a)
    {
        int p = 0;
        while (parent[a] != a) {
            p ^= parity[a];
            a = parent[a];
        }
        return {a, p};
    }

    void join(std::size_t a, std::size_t b, int rel)
    {
        const auto [ra, pa] = find(a);
        const auto [rb, pb] = find(b);
        if (ra == rb)
            return;
        parent[ra] = rb;
        parity[ra] = pa ^ pb ^ rel;
    }
};

struct Reference {
    std::size_t loops = 0;
    std::vector<std::pair<std::size_t, int>> seam;  // component and parity of segment 0 per site
};

Reference reference_loops(const Graph& g, const EventList& ev)
{
    const auto n = g.num_sites();
    std::vector<std::vector<std::size_t>> at(n);  // event indices per site in time order
    for (std::size_t i = 0; i < ev.size(); ++i) {
        at[g.edge(ev[i].edge).x].push_back(i);
        at[g.edge(ev[i].edge).y].push_back(i);
    }
    // segment j of site s (j = 0..k-1) ends at its j-th event, segment 0 wraps
    std::vector<std::size_t> base(n + 1, 0);
    for (Site s = 0; s < n; ++s)
        base[s + 1] = base[s] + std::max<std::size_t>(at[s].size(), 1);
    ParityUnionFind uf(base[n]);
    auto pos = [&](Site s, std::size_t e) {
        return static_cast<std::size_t>(std::find(at[s].begin(), at[s].end(), e) - at[s].begin());
    };
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto [x, y] = g.edge(ev[i].edge);
        const auto px = pos(x, i), py = pos(y, i);
        const auto end_x = base[x] + px, start_x = base[x] + (px + 1) % at[x].size();
        const auto end_y = base[y] + py, start_y = base[y] + (py + 1) % at[y].size();
        if (ev[i].kind == EventKind::cross) {
            uf.join(end_x, start_y, 0);
            uf.join(end_y, start_x, 0);
        } else {
            uf.join(end_x, end_y, 1);
            uf.join(start_x, start_y, 1);
        }
    }
    Reference r;
    for (std::size_t k = 0; k < base[n]; ++k)
        r.loops += uf.find(k).first == k;
    for (Site s = 0; s < n; ++s)
        r.seam.push_back(uf.find(base[s]));
    return r;
}

PairEvent reference_pair(const Reference& r, Site x, Site y)
{
    if (r.seam[x].first != r.seam[y].first)
        return PairEvent::separate;
    return r.seam[x].second == r.seam[y].second ? PairEvent::same_direction
                                                : PairEvent::opposite_direction;
}

void check_against_reference(const Graph& g, const EventList& ev)
{
    const auto loops = build_loops(g, ev);
    const auto ref = reference_loops(g, ev);
    REQUIRE(loops.num_loops() == ref.loops);

    double total = 0.0;
    std::vector<double> per_site(g.num_sites(), 0.0);
    for (const auto& l : loops.loops()) {
        total += l.length();
        double sum_sites = 0.0;
        for (const auto& s : l.lengths) {
            CHECK(s.up + s.down == doctest::Approx(l.length_at(s.site)));
            CHECK(l.up_length_at(s.site) == s.up);
            CHECK(l.down_length_at(s.site) == s.down);
            per_site[s.site] += s.total();
            sum_sites += s.total();
        }
        CHECK(sum_sites == doctest::Approx(l.length()));
    }
    CHECK(total == doctest::Approx(ev.beta() * static_cast<double>(g.num_sites())));
    for (double v : per_site)
        CHECK(v == doctest::Approx(ev.beta()));

    const auto flipped = build_loops(g, ev, TraceOrientation::lowest_point_down);
    CHECK(flipped.num_loops() == loops.num_loops());
    for (Site x = 0; x < g.num_sites(); ++x)
        for (Site y = 0; y < g.num_sites(); ++y) {
            if (x == y)
                continue;
            const auto c = classify_pair(loops, x, y);
            CHECK(c == reference_pair(ref, x, y));
            CHECK(c == classify_pair(loops, y, x));
            CHECK(c == classify_pair(flipped, x, y));
        }
}

} // namespace

TEST_SUITE("loops") {

TEST_CASE("empty configuration: one vertical loop per site")
{
    const auto g = build_graph(TorusSpec{{3, 3}});
    const auto loops = build_loops(g, EventList(2.0, 0.5));
    CHECK(loops.num_loops() == 9);
    for (Site x = 0; x < 9; ++x) {
        CHECK(loops.loop(loops.seam(x).loop).length() == doctest::Approx(2.0));
        CHECK(loops.seam(x).direction == Direction::up);
    }
    CHECK(classify_pair(loops, 0, 1) == PairEvent::separate);
}

TEST_CASE("single cross and single bar on two sites")
{
    const auto g = build_graph(ChainSpec{2, Boundary::open});
    const double beta = 1.5;

    const auto cross = build_loops(g, EventList(beta, 1.0, {{0, 0.4, EventKind::cross}}));
    CHECK(cross.num_loops() == 1);
    CHECK(cross.loop(0).length() == doctest::Approx(2 * beta));
    CHECK(cross.loop(0).up_length_at(0) == doctest::Approx(beta));
    CHECK(cross.loop(0).down_length_at(1) == doctest::Approx(0.0));
    CHECK(classify_pair(cross, 0, 1) == PairEvent::same_direction);

    const auto bar = build_loops(g, EventList(beta, 0.0, {{0, 0.4, EventKind::bar}}));
    CHECK(bar.num_loops() == 1);
    CHECK(bar.loop(0).length() == doctest::Approx(2 * beta));
    CHECK(bar.loop(0).up_length_at(0) == doctest::Approx(beta));
    CHECK(bar.loop(0).down_length_at(1) == doctest::Approx(beta));
    CHECK(classify_pair(bar, 0, 1) == PairEvent::opposite_direction);
}

TEST_CASE("three bars cut the two lines into three loops")
{
    const auto g = build_graph(ChainSpec{2, Boundary::open});
    const EventList ev(1.0, 0.0,
                       {{0, 0.1, EventKind::bar}, {0, 0.5, EventKind::bar}, {0, 0.7, EventKind::bar}});
    const auto loops = build_loops(g, ev);
    REQUIRE(loops.num_loops() == 3);
    std::vector<double> lengths;
    for (const auto& l : loops.loops())
        lengths.push_back(l.length());
    std::sort(lengths.begin(), lengths.end());
    CHECK(lengths[0] == doctest::Approx(0.4));
    CHECK(lengths[1] == doctest::Approx(0.8));
    CHECK(lengths[2] == doctest::Approx(0.8));
}

TEST_CASE("two sites: crosses only and bars only")
{
    const auto g = build_graph(ChainSpec{2, Boundary::open});
    for (std::size_t n = 0; n <= 6; ++n) {
        std::vector<Event> crosses, bars;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n + 1);
            crosses.push_back({0, t, EventKind::cross});
            bars.push_back({0, t, EventKind::bar});
        }
        CHECK(build_loops(g, EventList(1.0, 1.0, crosses)).num_loops() == (n % 2 == 0 ? 2u : 1u));
        CHECK(build_loops(g, EventList(1.0, 0.0, bars)).num_loops() == (n == 0 ? 2u : n));
    }
}

TEST_CASE("all kind sequences on small graphs match the reference decomposition")
{
    const std::vector<Graph> graphs{build_graph(ChainSpec{2, Boundary::open}),
                                    build_graph(ChainSpec{3, Boundary::periodic}),
                                    build_graph(EdgeListSpec{4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}})};
    for (const auto& g : graphs)
        for (std::size_t n = 0; n <= 6; ++n)
            for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
                std::vector<Event> items;
                for (std::size_t i = 0; i < n; ++i)
                    items.push_back({(i * 7 + mask) % g.num_edges(),
                                     (static_cast<double>(i) + 0.3) / static_cast<double>(n + 1),
                                     (mask >> i) & 1 ? EventKind::bar : EventKind::cross});
                check_against_reference(g, EventList(1.0, 0.5, items));
            }
}

TEST_CASE("random configurations match the reference decomposition")
{
    const std::vector<Graph> graphs{build_graph(TorusSpec{{3, 3}}), build_graph(TorusSpec{{2, 2}}),
                                    build_graph(TorusSpec{{4, 3, 2}})};
    auto rng = make_stream(2024, 0);
    for (const auto& g : graphs)
        for (int rep = 0; rep < 60; ++rep)
            check_against_reference(g, sample_events(g, 1.2, 0.5, rng));
}

TEST_CASE("one insertion changes the loop count by at most one")
{
    auto rng = make_stream(77, 0);
    auto delta = [&](const Graph& g, double u, EventKind kind) {
        const auto ev = sample_events(g, 1.0, u, rng);
        const auto before = build_loops(g, ev).num_loops();
        const auto edge = std::uniform_int_distribution<std::size_t>(0, g.num_edges() - 1)(rng);
        const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto after = build_loops(g, insert_event(ev, edge, t, kind)).num_loops();
        return std::abs(static_cast<long>(after) - static_cast<long>(before));
    };
    const auto torus = build_graph(TorusSpec{{3, 3}});
    const auto ring = build_graph(ChainSpec{6, Boundary::periodic});
    for (int rep = 0; rep < 300; ++rep) {
        CHECK(delta(torus, 0.5, rep % 2 ? EventKind::cross : EventKind::bar) <= 1);
        // crosses only: a transposition of the line permutation
        CHECK(delta(torus, 1.0, EventKind::cross) == 1);
        // bars only on a bipartite graph
        CHECK(delta(ring, 0.0, EventKind::bar) == 1);
    }
}

TEST_CASE("a cross added to a bar loop can leave the count unchanged")
{
    const auto g = build_graph(ChainSpec{2, Boundary::open});
    const EventList bar(1.0, 0.5, {{0, 0.3, EventKind::bar}});
    const auto both = insert_event(bar, 0, 0.6, EventKind::cross);
    CHECK(build_loops(g, bar).num_loops() == 1);
    CHECK(build_loops(g, both).num_loops() == 1);
    CHECK(build_loops(g, both).loop(0).length() == doctest::Approx(2.0));
}

TEST_CASE("classify_pair rejects equal sites")
{
    const auto g = build_graph(ChainSpec{2, Boundary::open});
    const auto loops = build_loops(g, EventList(1.0, 1.0));
    CHECK_THROWS(classify_pair(loops, 1, 1));
    CHECK_THROWS(classify_pair(loops, 0, 2));
}

}
