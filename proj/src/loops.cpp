#include "loopmc/loops.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace loopmc {

namespace {

const SiteLength* find_site(const Loop& loop, Site x)
{
    auto it = std::lower_bound(loop.lengths.begin(), loop.lengths.end(), x,
                               [](const SiteLength& s, Site v) { return s.site < v; });
    return it != loop.lengths.end() && it->site == x ? &*it : nullptr;
}

/// Events grouped per site line in time order (CSR layout), with the
/// position of every event inside both of its endpoint lists.
struct SiteLines {
    std::vector<std::size_t> offset;  // per site, into `events`
    std::vector<std::size_t> events;  // event indices
    std::vector<std::size_t> pos_x;   // position of event in its edge.x list
    std::vector<std::size_t> pos_y;

    std::size_t count(Site s) const { return offset[s + 1] - offset[s]; }
    std::size_t at(Site s, std::size_t i) const { return events[offset[s] + i]; }
};

SiteLines group_by_site(const Graph& graph, const EventList& events)
{
    const auto n_sites = graph.num_sites();
    SiteLines lines;
    lines.offset.assign(n_sites + 1, 0);
    for (const auto& ev : events.items()) {
        const auto& e = graph.edge(ev.edge);
        ++lines.offset[e.x + 1];
        ++lines.offset[e.y + 1];
    }
    for (Site s = 0; s < n_sites; ++s)
        lines.offset[s + 1] += lines.offset[s];

    std::vector<std::size_t> fill(lines.offset.begin(), lines.offset.end() - 1);
    lines.events.resize(lines.offset.back());
    lines.pos_x.resize(events.size());
    lines.pos_y.resize(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = graph.edge(events[i].edge);
        lines.pos_x[i] = fill[e.x] - lines.offset[e.x];
        lines.events[fill[e.x]++] = i;
        lines.pos_y[i] = fill[e.y] - lines.offset[e.y];
        lines.events[fill[e.y]++] = i;
    }
    return lines;
}

} // namespace

double Loop::length() const
{
    double total = 0.0;
    for (const auto& s : lengths)
        total += s.total();
    return total;
}

double Loop::length_at(Site x) const
{
    const auto* s = find_site(*this, x);
    return s ? s->total() : 0.0;
}

double Loop::up_length_at(Site x) const
{
    const auto* s = find_site(*this, x);
    return s ? s->up : 0.0;
}

double Loop::down_length_at(Site x) const
{
    const auto* s = find_site(*this, x);
    return s ? s->down : 0.0;
}

LoopDecomposition::LoopDecomposition(double beta, std::vector<Loop> loops,
                                     std::vector<SeamPoint> seam)
    : beta_(beta), loops_(std::move(loops)), seam_(std::move(seam))
{
}

LoopDecomposition build_loops(const Graph& graph, const EventList& events,
                              TraceOrientation orientation)
{
    events.check_edges(graph);
    const auto n_sites = graph.num_sites();
    const double beta = events.beta();
    const auto lines = group_by_site(graph, events);

    // segment i of a site with k events ends at its i-th event; segment 0
    // wraps through the seam. A site without events has one full segment.
    std::vector<std::size_t> seg_offset(n_sites + 1, 0);
    for (Site s = 0; s < n_sites; ++s)
        seg_offset[s + 1] = seg_offset[s] + std::max<std::size_t>(lines.count(s), 1);
    std::vector<bool> visited(seg_offset.back(), false);

    auto make_segment = [&](Site s, std::size_t i, Direction dir) {
        const auto k = lines.count(s);
        if (k == 0)
            return Segment{s, 0.0, beta, dir};
        if (i == 0)
            return Segment{s, events[lines.at(s, k - 1)].time, events[lines.at(s, 0)].time + beta, dir};
        return Segment{s, events[lines.at(s, i - 1)].time, events[lines.at(s, i)].time, dir};
    };

    struct State {
        Site site;
        std::size_t seg;
        Direction dir;
    };

    auto step = [&](State st) -> State {
        const auto k = lines.count(st.site);
        if (k == 0)
            return st;
        const auto ev = st.dir == Direction::up ? lines.at(st.site, st.seg)
                                                : lines.at(st.site, (st.seg + k - 1) % k);
        const auto& edge = graph.edge(events[ev].edge);
        const bool from_x = edge.x == st.site;
        const Site other = from_x ? edge.y : edge.x;
        const auto p = from_x ? lines.pos_y[ev] : lines.pos_x[ev];
        const auto k_other = lines.count(other);

        Direction dir = st.dir;
        if (events[ev].kind == EventKind::bar)
            dir = reversed(dir);
        // leaving the event upward means the segment that starts there
        const auto seg = dir == Direction::up ? (p + 1) % k_other : p;
        return {other, seg, dir};
    };

    const Direction start_dir =
        orientation == TraceOrientation::lowest_point_up ? Direction::up : Direction::down;

    std::vector<Loop> loops;
    std::vector<SeamPoint> seam(n_sites, SeamPoint{0, Direction::up});
    std::vector<std::size_t> slot(n_sites, std::numeric_limits<std::size_t>::max());

    for (Site s = 0; s < n_sites; ++s) {
        for (std::size_t i = 0; i < seg_offset[s + 1] - seg_offset[s]; ++i) {
            if (visited[seg_offset[s] + i])
                continue;
            const auto id = loops.size();
            Loop loop;
            State st{s, i, start_dir};
            do {
                visited[seg_offset[st.site] + st.seg] = true;
                const auto segment = make_segment(st.site, st.seg, st.dir);
                if (st.seg == 0)
                    seam[st.site] = {id, st.dir};

                if (slot[st.site] == std::numeric_limits<std::size_t>::max()) {
                    slot[st.site] = loop.lengths.size();
                    loop.lengths.push_back({st.site});
                }
                auto& acc = loop.lengths[slot[st.site]];
                (st.dir == Direction::up ? acc.up : acc.down) += segment.length();
                loop.segments.push_back(segment);

                st = step(st);
            } while (!visited[seg_offset[st.site] + st.seg]);

            if (st.site != s || st.seg != i || st.dir != start_dir)
                throw std::logic_error("loop tracing did not close on its starting segment");

            for (const auto& l : loop.lengths)
                slot[l.site] = std::numeric_limits<std::size_t>::max();
            std::sort(loop.lengths.begin(), loop.lengths.end(),
                      [](const SiteLength& a, const SiteLength& b) { return a.site < b.site; });
            loops.push_back(std::move(loop));
        }
    }
    return LoopDecomposition(beta, std::move(loops), std::move(seam));
}

PairEvent classify_pair(const LoopDecomposition& loops, Site x, Site y)
{
    if (x == y)
        throw std::invalid_argument("classify_pair needs two distinct sites");
    if (x >= loops.num_sites() || y >= loops.num_sites())
        throw std::invalid_argument("classify_pair site out of range");
    const auto& a = loops.seam(x);
    const auto& b = loops.seam(y);
    if (a.loop != b.loop)
        return PairEvent::separate;
    return a.direction == b.direction ? PairEvent::same_direction : PairEvent::opposite_direction;
}

void to_json(nlohmann::json& j, const LoopDecomposition& loops)
{
    auto list = nlohmann::json::array();
    for (std::size_t id = 0; id < loops.num_loops(); ++id) {
        auto segments = nlohmann::json::array();
        for (const auto& s : loops.loop(id).segments)
            segments.push_back({{"site", s.site},
                                {"start", s.start},
                                {"end", s.end},
                                {"direction", s.direction == Direction::up ? "up" : "down"}});
        list.push_back({{"id", id}, {"length", loops.loop(id).length()}, {"segments", std::move(segments)}});
    }
    j = {{"beta", loops.beta()}, {"num_loops", loops.num_loops()}, {"loops", std::move(list)}};
}

} // namespace loopmc
