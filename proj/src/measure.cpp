#include "loopmc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace loopmc {

namespace {

void check_two_s(int two_s)
{
    if (two_s < 1)
        throw std::invalid_argument("spin must be positive (2S >= 1)");
}

/// log sum_{a=-S..S} exp(a x)
double log_spin_sum(int two_s, double x)
{
    const double top = 0.5 * two_s * std::abs(x);
    double sum = 0.0;
    for (int two_a = -two_s; two_a <= two_s; two_a += 2)
        sum += std::exp(0.5 * two_a * x - top);
    return top + std::log(sum);
}

} // namespace

WeightSpec WeightSpec::uniform(double theta)
{
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("uniform loop weight must be positive");
    return WeightSpec(UniformWeight{theta});
}

WeightSpec WeightSpec::field(int two_s, std::vector<double> h)
{
    check_two_s(two_s);
    return WeightSpec(FieldWeight{two_s, std::move(h)});
}

WeightSpec WeightSpec::field_directed(int two_s, std::vector<double> h)
{
    check_two_s(two_s);
    if (two_s % 2 != 0)
        throw std::invalid_argument("directed field weights require integer spin");
    return WeightSpec(DirectedFieldWeight{two_s, std::move(h)});
}

void WeightSpec::check_sites(std::size_t n_sites) const
{
    auto check = [n_sites](const std::vector<double>& h) {
        if (h.size() != n_sites)
            throw std::invalid_argument("field has " + std::to_string(h.size()) +
                                        " entries but the graph has " + std::to_string(n_sites) +
                                        " sites");
    };
    if (const auto* f = std::get_if<FieldWeight>(&family_))
        check(f->h);
    else if (const auto* d = std::get_if<DirectedFieldWeight>(&family_))
        check(d->h);
}

double WeightSpec::log_weight(const Loop& loop) const
{
    struct Visitor {
        const Loop& loop;

        double operator()(const UniformWeight& w) const { return std::log(w.theta); }

        double operator()(const FieldWeight& w) const
        {
            double x = 0.0;
            for (const auto& s : loop.lengths)
                x += w.h[s.site] * s.total();
            return log_spin_sum(w.two_s, x);
        }

        double operator()(const DirectedFieldWeight& w) const
        {
            double x = 0.0;
            for (const auto& s : loop.lengths)
                x += w.h[s.site] * (s.up - s.down);
            return log_spin_sum(w.two_s, x);
        }
    };
    return std::visit(Visitor{loop}, family_);
}

double log_loop_weight(const WeightSpec& spec, const LoopDecomposition& loops)
{
    if (const auto* w = std::get_if<UniformWeight>(&spec.family()))
        return static_cast<double>(loops.num_loops()) * std::log(w->theta);
    spec.check_sites(loops.num_sites());
    double total = 0.0;
    for (const auto& loop : loops.loops())
        total += spec.log_weight(loop);
    return total;
}

double loop_weight(const WeightSpec& spec, const LoopDecomposition& loops)
{
    if (const auto* w = std::get_if<UniformWeight>(&spec.family()))
        return std::pow(w->theta, static_cast<double>(loops.num_loops()));
    return std::exp(log_loop_weight(spec, loops));
}

EstimateWithError batch_estimate(std::span<const double> batch_values, std::size_t n_samples)
{
    const auto nb = batch_values.size();
    if (nb < 2)
        throw SamplerError("batch means need at least two batches");
    const double mean = std::accumulate(batch_values.begin(), batch_values.end(), 0.0) / nb;
    double ss = 0.0;
    for (double v : batch_values)
        ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (static_cast<double>(nb) * (nb - 1))), n_samples, nb};
}

SamplerResult direct_estimate(const Graph& graph, double beta, double u, const WeightSpec& spec,
                              std::span<const Observable> observables, const DirectConfig& config)
{
    const auto nb = config.n_batches;
    if (nb < 2)
        throw SamplerError("direct sampler needs at least two batches");
    if (config.n_samples % nb != 0)
        throw SamplerError("n_samples must be divisible by n_batches");
    if (config.n_samples < 100 * nb)
        throw SamplerError("n_samples must be at least 100 per batch");
    spec.check_sites(graph.num_sites());

    const auto n_obs = observables.size();
    const auto per_batch = config.n_samples / nb;

    struct BatchSums {
        double weight = 0.0;
        std::vector<double> weighted;
    };
    std::vector<BatchSums> batches(nb);

    parallel_for(nb, config.workers, [&](std::size_t b) {
        auto rng = make_stream(config.seed, b);
        BatchSums sums;
        sums.weighted.assign(n_obs, 0.0);
        for (std::size_t i = 0; i < per_batch; ++i) {
            const auto omega = sample_events(graph, beta, u, rng);
            const auto loops = build_loops(graph, omega);
            const double w = std::exp(log_loop_weight(spec, loops));
            if (!std::isfinite(w))
                throw SamplerError("loop weight overflow; use the Metropolis sampler");
            sums.weight += w;
            for (std::size_t k = 0; k < n_obs; ++k)
                sums.weighted[k] += w * observables[k].fn(omega, loops);
        }
        batches[b] = std::move(sums);
    });

    double total_weight = 0.0;
    std::vector<double> total_weighted(n_obs, 0.0);
    for (const auto& b : batches) {
        total_weight += b.weight;
        for (std::size_t k = 0; k < n_obs; ++k)
            total_weighted[k] += b.weighted[k];
    }
    if (!(total_weight > 0.0))
        throw SamplerError("total weight is not positive");

    SamplerResult result;
    result.seed = config.seed;
    std::vector<double> values(nb);
    for (std::size_t k = 0; k < n_obs; ++k) {
        for (std::size_t b = 0; b < nb; ++b)
            values[b] = batches[b].weighted[k] / batches[b].weight;
        auto est = batch_estimate(values, config.n_samples);
        est.mean = total_weighted[k] / total_weight;
        result.observables.push_back(est);
    }
    for (std::size_t b = 0; b < nb; ++b)
        values[b] = batches[b].weight / static_cast<double>(per_batch);
    result.partition = batch_estimate(values, config.n_samples);
    result.partition.mean = total_weight / static_cast<double>(config.n_samples);
    return result;
}

double insert_acceptance(double weight_ratio, std::size_t n_edges, double beta, std::size_t n_before)
{
    return std::min(1.0, weight_ratio * static_cast<double>(n_edges) * beta /
                             static_cast<double>(n_before + 1));
}

double remove_acceptance(double weight_ratio, std::size_t n_edges, double beta, std::size_t n_before)
{
    return std::min(1.0, weight_ratio * static_cast<double>(n_before) /
                             (static_cast<double>(n_edges) * beta));
}

double relabel_acceptance(double weight_ratio, double u, EventKind from)
{
    const double r = from == EventKind::cross ? (1.0 - u) / u : u / (1.0 - u);
    return std::min(1.0, weight_ratio * r);
}

MetropolisChain::MetropolisChain(const Graph& graph, double beta, double u, WeightSpec spec,
                                 Rng rng, bool relabel)
    : graph_(&graph), beta_(beta), u_(u), spec_(std::move(spec)), rng_(std::move(rng)),
      relabel_(relabel), state_(beta, u), loops_(build_loops(graph, state_)),
      log_weight_(log_loop_weight(spec_, loops_))
{
    if (relabel_ && (u_ == 0.0 || u_ == 1.0))
        throw SamplerError("relabel move is undefined for u = 0 or u = 1");
}

bool MetropolisChain::accept(double probability)
{
    if (probability >= 1.0)
        return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < probability;
}

void MetropolisChain::commit(EventList next, LoopDecomposition loops, double log_weight)
{
    state_ = std::move(next);
    loops_ = std::move(loops);
    log_weight_ = log_weight;
}

bool MetropolisChain::propose(Move move)
{
    const auto m = static_cast<std::size_t>(move);
    ++stats_.proposed[m];
    const auto n = state_.size();
    const auto n_edges = graph_->num_edges();

    std::optional<EventList> next;
    std::function<double(double)> acceptance;
    switch (move) {
    case Move::insert: {
        if (n_edges == 0)
            return false;
        const auto edge = std::uniform_int_distribution<std::size_t>(0, n_edges - 1)(rng_);
        const double t = std::uniform_real_distribution<double>(0.0, beta_)(rng_);
        const auto kind = std::bernoulli_distribution(u_)(rng_) ? EventKind::cross : EventKind::bar;
        if (t >= beta_)
            return false;
        try {
            next = insert_event(state_, edge, t, kind);
        } catch (const EventError&) {
            return false;  // time already occupied
        }
        acceptance = [=, this](double r) { return insert_acceptance(r, n_edges, beta_, n); };
        break;
    }
    case Move::remove: {
        if (n == 0)
            return false;
        const auto idx = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
        next = remove_event(state_, idx);
        acceptance = [=, this](double r) { return remove_acceptance(r, n_edges, beta_, n); };
        break;
    }
    case Move::relabel: {
        if (!relabel_)
            throw SamplerError("relabel move is disabled for this chain");
        if (n == 0)
            return false;
        const auto idx = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
        const auto from = state_[idx].kind;
        acceptance = [=, this](double r) { return relabel_acceptance(r, u_, from); };
        next = relabel_event(state_, idx);
        break;
    }
    }

    auto loops = build_loops(*graph_, *next);
    const double log_w = log_loop_weight(spec_, loops);
    const double ratio = std::exp(log_w - log_weight_);
    if (!accept(acceptance(ratio)))
        return false;
    ++stats_.accepted[m];
    commit(std::move(*next), std::move(loops), log_w);
    return true;
}

void MetropolisChain::sweep()
{
    const double expected = static_cast<double>(graph_->num_edges()) * beta_;
    const auto n_props = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(expected)));
    std::uniform_int_distribution<int> pick(0, relabel_ ? 2 : 1);
    for (std::size_t i = 0; i < n_props; ++i)
        propose(static_cast<Move>(pick(rng_)));
}

SamplerResult metropolis_estimate(const Graph& graph, double beta, double u, const WeightSpec& spec,
                                  std::span<const Observable> observables,
                                  const MetropolisConfig& config)
{
    const auto nb = config.n_batches;
    if (nb < 2)
        throw SamplerError("Metropolis sampler needs at least two batches");
    if (config.n_chains == 0 || nb % config.n_chains != 0)
        throw SamplerError("n_batches must be a positive multiple of n_chains");
    if (config.n_sweeps % nb != 0 || config.n_sweeps == 0)
        throw SamplerError("n_sweeps must be a positive multiple of n_batches");

    bool relabel = u > 0.0 && u < 1.0;
    if (config.relabel == RelabelMode::on) {
        if (!relabel)
            throw SamplerError("relabel move requested with u = 0 or u = 1");
    } else if (config.relabel == RelabelMode::off) {
        relabel = false;
    }

    const auto n_obs = observables.size();
    const auto batches_per_chain = nb / config.n_chains;
    const auto sweeps_per_batch = config.n_sweeps / nb;

    // per batch: observable means followed by the mean of 1/W
    std::vector<std::vector<double>> batch_means(nb, std::vector<double>(n_obs + 1, 0.0));

    parallel_for(config.n_chains, config.workers, [&](std::size_t c) {
        MetropolisChain chain(graph, beta, u, spec, make_stream(config.seed, c), relabel);
        for (std::size_t i = 0; i < config.burn_in; ++i)
            chain.sweep();
        for (std::size_t b = 0; b < batches_per_chain; ++b) {
            auto& acc = batch_means[c * batches_per_chain + b];
            for (std::size_t i = 0; i < sweeps_per_batch; ++i) {
                chain.sweep();
                for (std::size_t k = 0; k < n_obs; ++k)
                    acc[k] += observables[k].fn(chain.state(), chain.loops());
                acc[n_obs] += std::exp(-chain.log_weight());
            }
            for (auto& v : acc)
                v /= static_cast<double>(sweeps_per_batch);
        }
    });

    SamplerResult result;
    result.seed = config.seed;
    std::vector<double> values(nb);
    for (std::size_t k = 0; k < n_obs; ++k) {
        for (std::size_t b = 0; b < nb; ++b)
            values[b] = batch_means[b][k];
        result.observables.push_back(batch_estimate(values, config.n_sweeps));
    }
    double inv_total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        inv_total += batch_means[b][n_obs];
        values[b] = 1.0 / batch_means[b][n_obs];
    }
    result.partition = batch_estimate(values, config.n_sweeps);
    result.partition.mean = static_cast<double>(nb) / inv_total;
    return result;
}

SamplerResult estimate(const Graph& graph, double beta, double u, const WeightSpec& spec,
                       std::span<const Observable> observables, const SamplerConfig& config)
{
    if (const auto* d = std::get_if<DirectConfig>(&config))
        return direct_estimate(graph, beta, u, spec, observables, *d);
    return metropolis_estimate(graph, beta, u, spec, observables, std::get<MetropolisConfig>(config));
}

} // namespace loopmc
