#include "loopmc/lattice.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace loopmc {

Graph::Graph(std::size_t n_sites, std::vector<Edge> edges,
             std::vector<std::size_t> extents, bool periodic)
    : n_sites_(n_sites), edges_(std::move(edges)), extents_(std::move(extents)),
      periodic_(periodic)
{
    if (n_sites_ == 0)
        throw GraphError("graph must have at least one vertex");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        if (e.x >= n_sites_ || e.y >= n_sites_)
            throw GraphError("edge " + std::to_string(i) + " references unknown vertex");
        if (e.x == e.y)
            throw GraphError("edge " + std::to_string(i) + " is a self-loop on vertex " +
                             std::to_string(e.x));
    }
}

std::size_t Graph::degree(Site x) const
{
    return static_cast<std::size_t>(std::count_if(
        edges_.begin(), edges_.end(), [x](const Edge& e) { return e.x == x || e.y == x; }));
}

std::string Graph::describe() const
{
    std::ostringstream os;
    if (extents_.size() == 1) {
        os << "chain(" << extents_[0] << (periodic_ ? ",periodic)" : ",open)");
    } else if (!extents_.empty()) {
        os << "torus(";
        for (std::size_t k = 0; k < extents_.size(); ++k)
            os << (k ? "," : "") << extents_[k];
        os << ")";
    } else {
        os << "graph(" << n_sites_ << " sites," << edges_.size() << " edges)";
    }
    return os.str();
}

namespace {

Graph build(const ChainSpec& spec)
{
    if (spec.n == 0)
        throw GraphError("chain length must be positive");
    std::vector<Edge> edges;
    for (Site x = 0; x + 1 < spec.n; ++x)
        edges.push_back({x, x + 1});
    if (spec.boundary == Boundary::periodic) {
        if (spec.n < 2)
            throw GraphError("periodic chain needs at least two sites");
        edges.push_back({spec.n - 1, 0});
    }
    return Graph(spec.n, std::move(edges), {spec.n}, spec.boundary == Boundary::periodic);
}

Graph build(const TorusSpec& spec)
{
    if (spec.extents.empty())
        throw GraphError("torus needs at least one dimension");
    for (auto L : spec.extents)
        if (L < 2)
            throw GraphError("torus extents must be at least 2");

    const auto d = spec.extents.size();
    const auto n = std::accumulate(spec.extents.begin(), spec.extents.end(), std::size_t{1},
                                   std::multiplies<>());

    // row-major: the first coordinate varies slowest
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t k = d - 1; k-- > 0;)
        stride[k] = stride[k + 1] * spec.extents[k + 1];

    std::vector<Edge> edges;
    edges.reserve(n * d);
    for (Site x = 0; x < n; ++x) {
        for (std::size_t k = 0; k < d; ++k) {
            const auto coord = (x / stride[k]) % spec.extents[k];
            const auto next = (coord + 1) % spec.extents[k];
            const Site y = x - coord * stride[k] + next * stride[k];
            edges.push_back({x, y});
        }
    }
    return Graph(n, std::move(edges), spec.extents, true);
}

Graph build(const EdgeListSpec& spec)
{
    return Graph(spec.n_sites, spec.edges);
}

} // namespace

Graph build_graph(const GraphSpec& spec)
{
    return std::visit([](const auto& s) { return build(s); }, spec);
}

} // namespace loopmc
