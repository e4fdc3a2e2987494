#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace loopmc {

using Site = std::size_t;

/// Unordered pair of distinct sites. Parallel edges are allowed and kept.
struct Edge {
    Site x;
    Site y;

    friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Boundary { open, periodic };

struct ChainSpec {
    std::size_t n = 0;
    Boundary boundary = Boundary::open;
};

/// Hypercubic torus L_1 x ... x L_d with periodic wrap in every direction.
struct TorusSpec {
    std::vector<std::size_t> extents;
};

struct EdgeListSpec {
    std::size_t n_sites = 0;
    std::vector<Edge> edges;
};

using GraphSpec = std::variant<ChainSpec, TorusSpec, EdgeListSpec>;

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Finite multigraph. Vertices are the dense indices 0..num_sites()-1.
class Graph {
public:
    Graph(std::size_t n_sites, std::vector<Edge> edges,
          std::vector<std::size_t> extents = {}, bool periodic = false);

    std::size_t num_sites() const { return n_sites_; }
    std::size_t num_edges() const { return edges_.size(); }
    std::span<const Edge> edges() const { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_.at(i); }

    /// Lattice extents when built from a chain or torus; empty otherwise.
    std::span<const std::size_t> extents() const { return extents_; }
    bool periodic() const { return periodic_; }

    std::size_t degree(Site x) const;
    std::string describe() const;

private:
    std::size_t n_sites_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> extents_;
    bool periodic_;
};

/// Chains and tori keep every neighbour relation as its own edge, so a
/// periodic direction of length 2 yields two parallel edges per pair.
Graph build_graph(const GraphSpec& spec);

} // namespace loopmc
