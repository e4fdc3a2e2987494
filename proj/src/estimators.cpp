#include "loopmc/estimators.hpp"

#include <stdexcept>
#include <string>

namespace loopmc {

namespace {

void check_dims(const LocalOperator& a, const LocalOperator& b, int two_s)
{
    const auto d = static_cast<std::size_t>(two_s) + 1;
    if (two_s < 1 || a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d)
        throw std::invalid_argument("operators must be (2S+1) x (2S+1)");
}

std::complex<double> trace_of_product(const LocalOperator& a, const LocalOperator& b)
{
    std::complex<double> t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            t += a(i, k) * b(k, i);
    return t;
}

void check_pair(Site x, Site y)
{
    if (x == y)
        throw std::invalid_argument("pair events need two distinct sites");
}

} // namespace

std::vector<Observable> pair_observables(Site x, Site y)
{
    check_pair(x, y);
    const auto tag = "(" + std::to_string(x) + "," + std::to_string(y) + ")";
    return {
        {"P(E+)" + tag,
         [x, y](const EventList&, const LoopDecomposition& l) {
             return classify_pair(l, x, y) == PairEvent::same_direction ? 1.0 : 0.0;
         }},
        {"P(E-)" + tag,
         [x, y](const EventList&, const LoopDecomposition& l) {
             return classify_pair(l, x, y) == PairEvent::opposite_direction ? 1.0 : 0.0;
         }},
        {"P(E)" + tag,
         [x, y](const EventList&, const LoopDecomposition& l) {
             return classify_pair(l, x, y) != PairEvent::separate ? 1.0 : 0.0;
         }},
    };
}

PairEventProbs make_pair_probs(const EstimateWithError& plus, const EstimateWithError& minus,
                               const EstimateWithError& same)
{
    PairEventProbs p{plus, minus, same, same};
    p.p_same.mean = plus.mean + minus.mean;
    p.p_diff.mean = 1.0 - p.p_same.mean;
    return p;
}

PairEventProbs pair_event_probs(const Graph& graph, double beta, double u, const WeightSpec& spec,
                                Site x, Site y, const SamplerConfig& sampler)
{
    const auto obs = pair_observables(x, y);
    const auto r = estimate(graph, beta, u, spec, obs, sampler);
    return make_pair_probs(r.observables[0], r.observables[1], r.observables[2]);
}

std::vector<std::pair<std::pair<Site, Site>, PairEventProbs>>
all_pair_event_probs(const Graph& graph, double beta, double u, const WeightSpec& spec,
                     const SamplerConfig& sampler)
{
    std::vector<Observable> obs;
    std::vector<std::pair<Site, Site>> pairs;
    for (Site x = 0; x < graph.num_sites(); ++x)
        for (Site y = x + 1; y < graph.num_sites(); ++y) {
            pairs.emplace_back(x, y);
            for (auto& o : pair_observables(x, y))
                obs.push_back(std::move(o));
        }
    const auto r = estimate(graph, beta, u, spec, obs, sampler);
    std::vector<std::pair<std::pair<Site, Site>, PairEventProbs>> out;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        out.emplace_back(pairs[k], make_pair_probs(r.observables[3 * k], r.observables[3 * k + 1],
                                                   r.observables[3 * k + 2]));
    return out;
}

double CorrelationCoefficients::combine(double p_plus, double p_minus, double p_separate) const
{
    return plus.real() * p_plus + minus.real() * p_minus + separate.real() * p_separate;
}

CorrelationCoefficients plain_coefficients(const LocalOperator& a, const LocalOperator& b, int two_s)
{
    check_dims(a, b, two_s);
    const double d = two_s + 1.0;
    return {trace_of_product(a, b) / d, trace_of_product(a, b.transpose()) / d,
            a.trace() * b.trace() / (d * d)};
}

CorrelationCoefficients tilde_coefficients(const LocalOperator& a, const LocalOperator& b, int two_s)
{
    check_dims(a, b, two_s);
    if (two_s % 2 != 0)
        throw std::invalid_argument("tilde correlations are defined for integer spin only");
    const auto n = static_cast<std::size_t>(two_s) + 1;
    const double d = two_s + 1.0;
    // index m has value S - m, so -a sits at index 2S - m; (-1)^{a+b} = (-1)^{m+m'} for integer S
    std::complex<double> twisted = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
            twisted += sign * a(i, j) * b(n - 1 - i, n - 1 - j);
        }
    return {trace_of_product(a, b) / d, twisted / d, a.trace() * b.trace() / (d * d)};
}

CorrelationCoefficients truncated(const CorrelationCoefficients& c)
{
    // P(E^c) = 1 - P(E+) - P(E-) and the product of one-point values equals c.separate
    return {c.plus - c.separate, c.minus - c.separate, 0.0};
}

std::complex<double> one_point_value(const LocalOperator& a, int two_s)
{
    check_dims(a, a, two_s);
    return a.trace() / (two_s + 1.0);
}

std::complex<double> correlation_plain(const LocalOperator& a, const LocalOperator& b,
                                       const PairEventProbs& probs, int two_s)
{
    const auto c = plain_coefficients(a, b, two_s);
    return c.plus * probs.p_plus.mean + c.minus * probs.p_minus.mean + c.separate * probs.p_diff.mean;
}

std::complex<double> correlation_tilde(const LocalOperator& a, const LocalOperator& b,
                                       const PairEventProbs& probs, int two_s)
{
    const auto c = tilde_coefficients(a, b, two_s);
    return c.plus * probs.p_plus.mean + c.minus * probs.p_minus.mean + c.separate * probs.p_diff.mean;
}

double tilde_spin_correlation(const PairEventProbs& probs, int two_s)
{
    if (two_s % 2 != 0)
        throw std::invalid_argument("tilde correlations are defined for integer spin only");
    const double s = 0.5 * two_s;
    return s * (s + 1) / 3.0 * (probs.p_plus.mean - probs.p_minus.mean);
}

double nematic_coefficient(int two_s)
{
    const double s = 0.5 * two_s;
    return s * (s + 1) * (2 * s - 1) * (2 * s + 3) / 45.0;
}

double tilde_nematic_correlation(const PairEventProbs& probs, int two_s)
{
    if (two_s % 2 != 0)
        throw std::invalid_argument("tilde correlations are defined for integer spin only");
    return nematic_coefficient(two_s) * probs.p_same.mean;
}

Observable correlation_observable(std::string name, const CorrelationCoefficients& coeffs, Site x,
                                  Site y)
{
    check_pair(x, y);
    const double cp = coeffs.plus.real();
    const double cm = coeffs.minus.real();
    const double cs = coeffs.separate.real();
    return {std::move(name), [=](const EventList&, const LoopDecomposition& l) {
                switch (classify_pair(l, x, y)) {
                case PairEvent::same_direction:
                    return cp;
                case PairEvent::opposite_direction:
                    return cm;
                case PairEvent::separate:
                    break;
                }
                return cs;
            }};
}

Observable macroscopic_observable()
{
    return {"l0/(beta*|Lambda|)", [](const EventList& ev, const LoopDecomposition& l) {
                const auto& loop = l.loop(l.seam(0).loop);
                return loop.length() / (ev.beta() * static_cast<double>(l.num_sites()));
            }};
}

EstimateWithError macroscopic_fraction(const Graph& graph, double beta, double u, double theta,
                                       const SamplerConfig& sampler)
{
    const std::vector<Observable> obs{macroscopic_observable()};
    return estimate(graph, beta, u, WeightSpec::uniform(theta), obs, sampler).observables.front();
}

} // namespace loopmc
