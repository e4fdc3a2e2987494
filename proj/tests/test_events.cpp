#include <cmath>

#include "doctest.h"
#include "loopmc/events.hpp"

using namespace loopmc;

TEST_SUITE("events") {

TEST_CASE("u = 1 gives only crosses, u = 0 only bars")
{
    const auto g = build_graph(ChainSpec{4, Boundary::periodic});
    auto rng = make_stream(7, 0);
    for (int rep = 0; rep < 200; ++rep) {
        for (const auto& e : sample_events(g, 2.0, 1.0, rng).items())
            CHECK(e.kind == EventKind::cross);
        for (const auto& e : sample_events(g, 2.0, 0.0, rng).items())
            CHECK(e.kind == EventKind::bar);
    }
}

TEST_CASE("mean event count on a single edge")
{
    const auto g = build_graph(ChainSpec{2, Boundary::open});
    auto rng = make_stream(11, 0);
    const int n = 100000;
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        total += static_cast<double>(sample_events(g, 1.0, 0.5, rng).size());
    CHECK(std::abs(total / n - 1.0) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("per-edge counts are Poisson and kinds are Bernoulli")
{
    const auto g = build_graph(ChainSpec{3, Boundary::periodic});
    const double beta = 1.7;
    const double u = 0.3;
    auto rng = make_stream(12, 3);
    const int n = 40000;
    std::vector<double> sum(g.num_edges(), 0.0), sum2(g.num_edges(), 0.0);
    double crosses = 0.0, events = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> c(g.num_edges(), 0.0);
        const auto ev = sample_events(g, beta, u, rng);
        ev.check_edges(g);
        for (const auto& e : ev.items()) {
            c[e.edge] += 1.0;
            crosses += e.kind == EventKind::cross;
            CHECK(e.time >= 0.0);
            CHECK(e.time < beta);
        }
        events += static_cast<double>(ev.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            sum[k] += c[k];
            sum2[k] += c[k] * c[k];
        }
    }
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
        const double mean = sum[k] / n;
        const double var = sum2[k] / n - mean * mean;
        CHECK(std::abs(mean - beta) <= 5.0 * std::sqrt(beta / n));
        CHECK(std::abs(var - beta) <= 5.0 * std::sqrt((beta + 2.0 * beta * beta) / n));
    }
    CHECK(std::abs(crosses / events - u) <= 5.0 * std::sqrt(u * (1.0 - u) / events));
}

TEST_CASE("sampling is reproducible per stream")
{
    const auto g = build_graph(TorusSpec{{3, 3}});
    auto a = make_stream(99, 4);
    auto b = make_stream(99, 4);
    auto c = make_stream(99, 5);
    const auto ea = sample_events(g, 1.3, 0.4, a);
    CHECK(ea == sample_events(g, 1.3, 0.4, b));
    CHECK_FALSE(ea == sample_events(g, 1.3, 0.4, c));
}

TEST_CASE("insert and remove are inverse")
{
    const auto g = build_graph(ChainSpec{4, Boundary::open});
    auto rng = make_stream(3, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto ev = sample_events(g, 1.5, 0.5, rng);
        const double t = std::uniform_real_distribution<double>(0.0, 1.5)(rng);
        const auto added = insert_event(ev, rep % g.num_edges(), t, EventKind::bar);
        REQUIRE(added.size() == ev.size() + 1);
        std::size_t idx = 0;
        while (added[idx].time != t)
            ++idx;
        CHECK(remove_event(added, idx) == ev);
        CHECK(relabel_event(relabel_event(added, idx), idx) == added);
        CHECK(relabel_event(added, idx)[idx].kind == EventKind::cross);
    }
}

TEST_CASE("invalid lists and edits")
{
    CHECK_THROWS_AS(EventList(0.0, 0.5), EventError);
    CHECK_THROWS_AS(EventList(-1.0, 0.5), EventError);
    CHECK_THROWS_AS(EventList(1.0, 1.5), EventError);
    CHECK_THROWS_AS(EventList(1.0, 0.5, {{0, 1.0, EventKind::bar}}), EventError);
    CHECK_THROWS_AS(EventList(1.0, 0.5, {{0, 0.5, EventKind::bar}, {0, 0.2, EventKind::bar}}),
                    EventError);
    CHECK_THROWS_AS(EventList(1.0, 0.5, {{0, 0.5, EventKind::bar}, {1, 0.5, EventKind::bar}}),
                    EventError);

    const EventList ev(1.0, 0.5, {{0, 0.25, EventKind::cross}, {2, 0.5, EventKind::bar}});
    CHECK_THROWS_AS(insert_event(ev, 1, 0.25, EventKind::bar), EventError);
    CHECK_THROWS_AS(insert_event(ev, 1, 1.0, EventKind::bar), EventError);
    CHECK_THROWS_AS(remove_event(ev, 2), EventError);
    CHECK_THROWS_AS(relabel_event(ev, 5), EventError);
    CHECK_THROWS_AS(ev.check_edges(build_graph(ChainSpec{2, Boundary::open})), EventError);
    CHECK_NOTHROW(ev.check_edges(build_graph(ChainSpec{3, Boundary::periodic})));
}

TEST_CASE("JSON round trip")
{
    const auto g = build_graph(TorusSpec{{3, 3}});
    auto rng = make_stream(5, 1);
    const auto ev = sample_events(g, 2.5, 0.6, rng);
    const nlohmann::json j = ev;
    CHECK(event_list_from_json(j) == ev);
    CHECK(event_list_from_json(nlohmann::json::parse(j.dump())) == ev);
}

}
