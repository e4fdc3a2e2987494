#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "loopmc/events.hpp"
#include "loopmc/lattice.hpp"

namespace loopmc {

enum class Direction : std::uint8_t { up, down };

inline Direction reversed(Direction d) { return d == Direction::up ? Direction::down : Direction::up; }

/// Piece of a site line between two consecutive events on that site.
/// `end` may exceed beta when the piece wraps through the time seam.
struct Segment {
    Site site;
    double start;
    double end;
    Direction direction;

    double length() const { return end - start; }
};

/// Vertical length of one loop at one site, split by traversal direction.
struct SiteLength {
    Site site;
    double up = 0.0;
    double down = 0.0;

    double total() const { return up + down; }
};

struct Loop {
    /// Segments in traversal order.
    std::vector<Segment> segments;
    /// Sorted by site; only sites the loop visits appear.
    std::vector<SiteLength> lengths;

    double length() const;
    double length_at(Site x) const;
    double up_length_at(Site x) const;
    double down_length_at(Site x) const;
};

/// Where the point (x, 0) sits: which loop, and which way the loop moves there.
struct SeamPoint {
    std::size_t loop;
    Direction direction;
};

/// Which way each loop is traced from its starting point. Exported
/// quantities do not depend on the choice.
enum class TraceOrientation { lowest_point_up, lowest_point_down };

class LoopDecomposition {
public:
    LoopDecomposition(double beta, std::vector<Loop> loops, std::vector<SeamPoint> seam);

    double beta() const { return beta_; }
    std::size_t num_loops() const { return loops_.size(); }
    std::size_t num_sites() const { return seam_.size(); }
    std::span<const Loop> loops() const { return loops_; }
    const Loop& loop(std::size_t i) const { return loops_.at(i); }
    const SeamPoint& seam(Site x) const { return seam_.at(x); }

private:
    double beta_;
    std::vector<Loop> loops_;
    std::vector<SeamPoint> seam_;
};

/// Traces the loops of a realization. A trajectory runs along a site line;
/// at a cross it moves to the other endpoint and keeps going the same way in
/// time, at a double bar it moves over and turns around, and at beta it
/// continues from 0. Loops are started from unvisited segments in site order,
/// the segment through the seam first, and numbered in discovery order.
///
/// The point (x, 0) is taken on the segment that wraps through the seam.
LoopDecomposition build_loops(const Graph& graph, const EventList& events,
                              TraceOrientation orientation = TraceOrientation::lowest_point_up);

/// E+ (same loop, same direction), E- (same loop, opposite directions) or
/// the complement, evaluated at the points (x, 0) and (y, 0).
enum class PairEvent { same_direction, opposite_direction, separate };

PairEvent classify_pair(const LoopDecomposition& loops, Site x, Site y);

void to_json(nlohmann::json& j, const LoopDecomposition& loops);

} // namespace loopmc
