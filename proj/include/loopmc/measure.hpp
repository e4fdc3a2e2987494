#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "loopmc/events.hpp"
#include "loopmc/lattice.hpp"
#include "loopmc/loops.hpp"
#include "loopmc/parallel.hpp"

namespace loopmc {

class SamplerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// w(loop) = theta.
struct UniformWeight {
    double theta;
};

/// w(loop) = sum_{a=-S..S} exp(a * sum_x h_x l_x(loop)). Spin stored as 2S.
struct FieldWeight {
    int two_s;
    std::vector<double> h;
};

/// Same as FieldWeight with l_x replaced by l_x^+ - l_x^-; integer S only.
struct DirectedFieldWeight {
    int two_s;
    std::vector<double> h;
};

class WeightSpec {
public:
    static WeightSpec uniform(double theta);
    static WeightSpec field(int two_s, std::vector<double> h);
    static WeightSpec field_directed(int two_s, std::vector<double> h);

    const auto& family() const { return family_; }
    bool is_uniform() const { return std::holds_alternative<UniformWeight>(family_); }

    /// Throws unless the field has one entry per site.
    void check_sites(std::size_t n_sites) const;

    double log_weight(const Loop& loop) const;

private:
    explicit WeightSpec(std::variant<UniformWeight, FieldWeight, DirectedFieldWeight> f)
        : family_(std::move(f)) {}

    std::variant<UniformWeight, FieldWeight, DirectedFieldWeight> family_;
};

/// log of prod over loops of w(loop).
double log_loop_weight(const WeightSpec& spec, const LoopDecomposition& loops);
double loop_weight(const WeightSpec& spec, const LoopDecomposition& loops);

struct EstimateWithError {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_batches = 0;
};

/// Mean and standard error of the mean from per-batch values.
EstimateWithError batch_estimate(std::span<const double> batch_values, std::size_t n_samples);

/// A real-valued functional of a realization and its loops.
struct Observable {
    std::string name;
    std::function<double(const EventList&, const LoopDecomposition&)> fn;
};

struct SamplerResult {
    std::vector<EstimateWithError> observables;
    /// Estimate of Y = E_rho[prod w].
    EstimateWithError partition;
    std::uint64_t seed = 0;
};

struct DirectConfig {
    std::size_t n_samples = 100000;
    std::size_t n_batches = 50;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

enum class RelabelMode { automatic, on, off };

struct MetropolisConfig {
    std::size_t n_sweeps = 100000;
    std::size_t burn_in = 1000;
    std::size_t n_batches = 50;
    /// Independent chains; n_batches must be a multiple of n_chains.
    std::size_t n_chains = 1;
    std::uint64_t seed = 1;
    RelabelMode relabel = RelabelMode::automatic;
    unsigned workers = 0;
};

/// Importance sampling from the Poisson measure: each observable is
/// estimated as sum f W / sum W and Y as the mean of W. Batches are
/// independent streams, so results do not depend on the worker count.
SamplerResult direct_estimate(const Graph& graph, double beta, double u, const WeightSpec& spec,
                              std::span<const Observable> observables, const DirectConfig& config);

/// Metropolis-Hastings acceptance probabilities of the three moves.
double insert_acceptance(double weight_ratio, std::size_t n_edges, double beta, std::size_t n_before);
double remove_acceptance(double weight_ratio, std::size_t n_edges, double beta, std::size_t n_before);
double relabel_acceptance(double weight_ratio, double u, EventKind from);

/// Markov chain on realizations whose stationary law is proportional to
/// prod w(loop) rho(d omega). Loops are retraced in full after each proposal.
class MetropolisChain {
public:
    enum class Move { insert, remove, relabel };

    struct Stats {
        std::size_t proposed[3] = {0, 0, 0};
        std::size_t accepted[3] = {0, 0, 0};
    };

    MetropolisChain(const Graph& graph, double beta, double u, WeightSpec spec, Rng rng,
                    bool relabel);

    /// Proposes one move of the given kind; returns whether it was accepted.
    bool propose(Move move);
    /// ceil(|E| beta) proposals (at least one), move kind chosen uniformly.
    void sweep();

    const EventList& state() const { return state_; }
    const LoopDecomposition& loops() const { return loops_; }
    double log_weight() const { return log_weight_; }
    const Stats& stats() const { return stats_; }

private:
    bool accept(double probability);
    void commit(EventList next, LoopDecomposition loops, double log_weight);

    const Graph* graph_;
    double beta_;
    double u_;
    WeightSpec spec_;
    Rng rng_;
    bool relabel_;
    EventList state_;
    LoopDecomposition loops_;
    double log_weight_;
    Stats stats_;
};

/// Observables averaged over sweeps after burn-in, errors by batch means.
/// Y is estimated through the harmonic mean 1 / E[1/W] under the chain's
/// stationary law.
SamplerResult metropolis_estimate(const Graph& graph, double beta, double u, const WeightSpec& spec,
                                  std::span<const Observable> observables,
                                  const MetropolisConfig& config);

using SamplerConfig = std::variant<DirectConfig, MetropolisConfig>;

SamplerResult estimate(const Graph& graph, double beta, double u, const WeightSpec& spec,
                       std::span<const Observable> observables, const SamplerConfig& config);

} // namespace loopmc
