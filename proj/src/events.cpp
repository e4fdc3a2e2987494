#include "loopmc/events.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace loopmc {

namespace {

void check_parameters(double beta, double u)
{
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw EventError("beta must be positive and finite");
    if (!(u >= 0.0 && u <= 1.0))
        throw EventError("u must lie in [0, 1]");
}

} // namespace

EventList::EventList(double beta, double u) : beta_(beta), u_(u)
{
    check_parameters(beta, u);
}

EventList::EventList(double beta, double u, std::vector<Event> items)
    : beta_(beta), u_(u), items_(std::move(items))
{
    check_parameters(beta, u);
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const double t = items_[i].time;
        if (!(t >= 0.0 && t < beta_))
            throw EventError("event " + std::to_string(i) + " has time outside [0, beta)");
        if (i > 0 && !(items_[i - 1].time < t))
            throw EventError("event times must be strictly increasing (index " +
                             std::to_string(i) + ")");
    }
}

void EventList::check_edges(const Graph& graph) const
{
    for (std::size_t i = 0; i < items_.size(); ++i)
        if (items_[i].edge >= graph.num_edges())
            throw EventError("event " + std::to_string(i) + " references edge " +
                             std::to_string(items_[i].edge) + " outside the graph");
}

EventList insert_event(const EventList& events, std::size_t edge, double time, EventKind kind)
{
    if (!(time >= 0.0 && time < events.beta_))
        throw EventError("inserted time outside [0, beta)");
    auto pos = std::lower_bound(events.items_.begin(), events.items_.end(), time,
                                [](const Event& e, double t) { return e.time < t; });
    if (pos != events.items_.end() && pos->time == time)
        throw EventError("an event already occupies this time");

    EventList out(events);
    out.items_.insert(out.items_.begin() + (pos - events.items_.begin()), Event{edge, time, kind});
    return out;
}

EventList remove_event(const EventList& events, std::size_t index)
{
    if (index >= events.items_.size())
        throw EventError("event index " + std::to_string(index) + " out of range");
    EventList out(events);
    out.items_.erase(out.items_.begin() + static_cast<std::ptrdiff_t>(index));
    return out;
}

EventList relabel_event(const EventList& events, std::size_t index)
{
    if (index >= events.items_.size())
        throw EventError("event index " + std::to_string(index) + " out of range");
    EventList out(events);
    auto& kind = out.items_[index].kind;
    kind = kind == EventKind::cross ? EventKind::bar : EventKind::cross;
    return out;
}

EventList sample_events(const Graph& graph, double beta, double u, Rng& rng)
{
    check_parameters(beta, u);

    std::poisson_distribution<std::size_t> count(beta);
    std::uniform_real_distribution<double> uniform(0.0, beta);
    std::bernoulli_distribution is_cross(u);

    auto draw_time = [&] {
        double t;
        do {
            t = uniform(rng);
        } while (t >= beta);
        return t;
    };

    struct Draw {
        Event event;
        std::size_t order;
    };
    std::vector<Draw> draws;
    for (std::size_t e = 0; e < graph.num_edges(); ++e) {
        const auto n = count(rng);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = draw_time();
            const auto kind = is_cross(rng) ? EventKind::cross : EventKind::bar;
            draws.push_back({{e, t, kind}, draws.size()});
        }
    }

    auto by_time = [](const Draw& a, const Draw& b) { return a.event.time < b.event.time; };
    std::sort(draws.begin(), draws.end(), by_time);
    // exact ties have zero probability; redraw the later of the two
    for (bool clash = true; clash;) {
        clash = false;
        for (std::size_t i = 1; i < draws.size(); ++i) {
            if (draws[i - 1].event.time == draws[i].event.time) {
                auto& later = draws[i - 1].order > draws[i].order ? draws[i - 1] : draws[i];
                later.event.time = draw_time();
                clash = true;
            }
        }
        if (clash)
            std::sort(draws.begin(), draws.end(), by_time);
    }

    std::vector<Event> items;
    items.reserve(draws.size());
    for (const auto& d : draws)
        items.push_back(d.event);
    return EventList(beta, u, std::move(items));
}

void to_json(nlohmann::json& j, const EventList& events)
{
    auto items = nlohmann::json::array();
    for (const auto& e : events.items())
        items.push_back({{"edge", e.edge},
                         {"time", e.time},
                         {"kind", e.kind == EventKind::cross ? "cross" : "bar"}});
    j = {{"beta", events.beta()}, {"u", events.u()}, {"items", std::move(items)}};
}

EventList event_list_from_json(const nlohmann::json& j)
{
    std::vector<Event> items;
    for (const auto& item : j.at("items")) {
        const auto kind = item.at("kind").get<std::string>();
        if (kind != "cross" && kind != "bar")
            throw EventError("unknown event kind '" + kind + "'");
        items.push_back({item.at("edge").get<std::size_t>(), item.at("time").get<double>(),
                         kind == "cross" ? EventKind::cross : EventKind::bar});
    }
    return EventList(j.at("beta").get<double>(), j.at("u").get<double>(), std::move(items));
}

} // namespace loopmc
