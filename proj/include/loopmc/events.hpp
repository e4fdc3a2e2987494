#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "loopmc/lattice.hpp"
#include "loopmc/parallel.hpp"

namespace loopmc {

/// A cross swaps the two site lines and keeps the time direction; a double
/// bar joins them and reverses it.
enum class EventKind : std::uint8_t { cross, bar };

struct Event {
    std::size_t edge;
    double time;
    EventKind kind;

    friend bool operator==(const Event&, const Event&) = default;
};

class EventError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A realization of the marked Poisson process on edges x [0, beta).
/// Items are kept sorted by strictly increasing time. The time circle is
/// closed: beta is identified with 0.
class EventList {
public:
    EventList(double beta, double u);
    EventList(double beta, double u, std::vector<Event> items);

    double beta() const { return beta_; }
    double u() const { return u_; }
    std::span<const Event> items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const Event& operator[](std::size_t i) const { return items_[i]; }

    /// Throws if some event refers to an edge outside the graph.
    void check_edges(const Graph& graph) const;

    friend bool operator==(const EventList&, const EventList&) = default;

private:
    friend EventList insert_event(const EventList&, std::size_t, double, EventKind);
    friend EventList remove_event(const EventList&, std::size_t);
    friend EventList relabel_event(const EventList&, std::size_t);

    double beta_;
    double u_;
    std::vector<Event> items_;
};

EventList insert_event(const EventList& events, std::size_t edge, double time, EventKind kind);
EventList remove_event(const EventList& events, std::size_t index);
/// Flips the kind of one event, keeping its edge and time.
EventList relabel_event(const EventList& events, std::size_t index);

/// Each edge carries an independent Poisson process of unit intensity on
/// [0, beta); each point is a cross with probability u, a bar otherwise.
EventList sample_events(const Graph& graph, double beta, double u, Rng& rng);

void to_json(nlohmann::json& j, const EventList& events);
EventList event_list_from_json(const nlohmann::json& j);

} // namespace loopmc
