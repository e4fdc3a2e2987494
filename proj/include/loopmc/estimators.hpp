#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "loopmc/lattice.hpp"
#include "loopmc/loops.hpp"
#include "loopmc/matrix.hpp"
#include "loopmc/measure.hpp"

namespace loopmc {

/// Loop-event probabilities for one pair of sites at time 0.
struct PairEventProbs {
    EstimateWithError p_plus;   // same loop, same direction
    EstimateWithError p_minus;  // same loop, opposite directions
    EstimateWithError p_same;
    EstimateWithError p_diff;
};

/// Indicator observables of E+, E- and E for the pair (x, y).
std::vector<Observable> pair_observables(Site x, Site y);

/// Assembles PairEventProbs from the three estimates produced by
/// pair_observables. Means satisfy p_same = p_plus + p_minus and
/// p_same + p_diff = 1.
PairEventProbs make_pair_probs(const EstimateWithError& plus, const EstimateWithError& minus,
                               const EstimateWithError& same);

/// Pair probabilities under weights (2S+1)^|L| (h = 0).
PairEventProbs pair_event_probs(const Graph& graph, double beta, double u, const WeightSpec& spec,
                                Site x, Site y, const SamplerConfig& sampler);

/// All pairs x < y from a single sampling pass.
std::vector<std::pair<std::pair<Site, Site>, PairEventProbs>>
all_pair_event_probs(const Graph& graph, double beta, double u, const WeightSpec& spec,
                     const SamplerConfig& sampler);

/// Coefficients c+, c-, cc of <A_x B_y> = c+ P(E+) + c- P(E-) + cc P(E^c).
struct CorrelationCoefficients {
    std::complex<double> plus;
    std::complex<double> minus;
    std::complex<double> separate;

    double combine(double p_plus, double p_minus, double p_separate) const;
};

/// Q-family (T/Q loops): tr(AB), tr(AB^t) and tr A tr B terms.
CorrelationCoefficients plain_coefficients(const LocalOperator& a, const LocalOperator& b, int two_s);
/// P-family, integer spin: the E- term becomes sum (-1)^{a+b} <a|A|b><-a|B|-b>.
CorrelationCoefficients tilde_coefficients(const LocalOperator& a, const LocalOperator& b, int two_s);

/// Coefficients of <A_x B_y> - <A_x><B_y>, using <A_x> = tr A / (2S+1).
CorrelationCoefficients truncated(const CorrelationCoefficients& c);

/// tr A / (2S+1).
std::complex<double> one_point_value(const LocalOperator& a, int two_s);

std::complex<double> correlation_plain(const LocalOperator& a, const LocalOperator& b,
                                       const PairEventProbs& probs, int two_s);
std::complex<double> correlation_tilde(const LocalOperator& a, const LocalOperator& b,
                                       const PairEventProbs& probs, int two_s);

/// <S^i_x S^i_y> = S(S+1)/3 [P(E+) - P(E-)] for integer spin (any i).
double tilde_spin_correlation(const PairEventProbs& probs, int two_s);
/// <(S^i_x)^2 (S^i_y)^2> - <(S^i_x)^2><(S^i_y)^2> = S(S+1)(2S-1)(2S+3)/45 P(E).
double tilde_nematic_correlation(const PairEventProbs& probs, int two_s);
double nematic_coefficient(int two_s);

/// The correlation as a single observable, real part of
/// c+ 1{E+} + c- 1{E-} + cc 1{E^c}, so that its error bar comes straight
/// from the sampler.
Observable correlation_observable(std::string name, const CorrelationCoefficients& coeffs, Site x,
                                  Site y);

/// l_0 / (beta |Lambda|) where l_0 is the length of the loop through (0, 0).
Observable macroscopic_observable();

EstimateWithError macroscopic_fraction(const Graph& graph, double beta, double u, double theta,
                                       const SamplerConfig& sampler);

} // namespace loopmc
