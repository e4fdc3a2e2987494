#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "loopmc/events.hpp"
#include "loopmc/lattice.hpp"
#include "loopmc/matrix.hpp"

namespace loopmc {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_dimension_cap = 4096;

/// Product basis of (C^{2S+1})^{n_sites}. Local index m carries the spin
/// value a = S - m; site 0 is the most significant digit.
class HilbertSpace {
public:
    HilbertSpace(int two_s, std::size_t n_sites, std::size_t cap = default_dimension_cap);

    int two_s() const { return two_s_; }
    std::size_t local_dim() const { return local_; }
    std::size_t n_sites() const { return n_sites_; }
    std::size_t dim() const { return dim_; }

    std::size_t digit(std::size_t state, std::size_t site) const
    {
        return (state / stride_[site]) % local_;
    }
    std::size_t stride(std::size_t site) const { return stride_[site]; }
    /// Twice the S^3 eigenvalue of local index m.
    int two_value(std::size_t m) const { return two_s_ - 2 * static_cast<int>(m); }

private:
    int two_s_;
    std::size_t local_;
    std::size_t n_sites_;
    std::size_t dim_;
    std::vector<std::size_t> stride_;
};

/// Two-site operators: T swaps, Q pairs equal values, P pairs opposite
/// values with alternating sign (P / (2S+1) projects onto the singlet).
enum class PairKind { T, P, Q };

DenseOperator pair_operator(PairKind kind, int two_s);

/// S^1, S^2, S^3 on C^{2S+1}; S^2 is purely imaginary.
LocalOperator spin_operator(int component, int two_s);
LocalOperator local_identity(int two_s);

/// Q-family: H = -sum (u T + (1-u) Q - 1) - sum h S^3.
/// P-family: the same with P in place of Q.
enum class Family { q_family, p_family };

/// Embeds a two-site operator acting on (x, y), x the first tensor factor.
DenseOperator embed_pair(const HilbertSpace& space, const DenseOperator& op, Site x, Site y);
/// Embeds the real operator re(A) on site x; throws if A has an imaginary part.
DenseOperator embed_site(const HilbertSpace& space, const LocalOperator& op, Site x);

DenseOperator hamiltonian(const Graph& graph, int two_s, double u, std::span<const double> h,
                          Family family, std::size_t cap = default_dimension_cap);

/// The same Hamiltonian assembled from spin operators: the XY-type form for
/// S = 1/2 (Q-family) or the bilinear-biquadratic form for S = 1 (P-family).
DenseOperator hamiltonian_spin_form(const Graph& graph, int two_s, double u,
                                    std::span<const double> h, Family family,
                                    std::size_t cap = default_dimension_cap);

/// T and Q for S = 1/2, T and P for S = 1, written with spin operators.
DenseOperator pair_operator_spin_form(PairKind kind, int two_s);

/// True when the loop identities of this project cover the family and spin.
bool loop_identities_apply(Family family, int two_s);

struct Eigensystem {
    std::vector<double> values;
    /// Eigenvectors as columns.
    DenseOperator vectors;
    std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations on a real symmetric matrix until the off-diagonal
/// Frobenius norm is below `tolerance` times the norm of the input.
Eigensystem symmetric_eigen(const DenseOperator& m, double tolerance = 1e-13,
                            std::size_t max_sweeps = 100);

/// exp(-beta H) and its trace via the eigendecomposition of H.
class ThermalState {
public:
    ThermalState(const HilbertSpace& space, const DenseOperator& hamiltonian, double beta);

    double partition_function() const { return z_; }
    const DenseOperator& gibbs() const { return gibbs_; }
    const Eigensystem& eigensystem() const { return eigen_; }

    /// Tr(A_x B_y exp(-beta H)) / Z for x != y.
    std::complex<double> two_point(const LocalOperator& a, Site x, const LocalOperator& b, Site y) const;
    std::complex<double> one_point(const LocalOperator& a, Site x) const;

private:
    HilbertSpace space_;
    Eigensystem eigen_;
    DenseOperator gibbs_;
    double z_;
};

DenseOperator gibbs_operator(const DenseOperator& hamiltonian, double beta);
double partition_function(const DenseOperator& hamiltonian, double beta);
std::complex<double> thermal_two_point(const HilbertSpace& space, const DenseOperator& hamiltonian,
                                       const LocalOperator& a, Site x, const LocalOperator& b,
                                       Site y, double beta);

/// Time-ordered product exp((beta-t_n) Z) A_n ... A_1 exp(t_1 Z) with
/// Z = sum h_x S^3_x, A_j = T for a cross and Q (or P) for a bar. Its
/// average over the Poisson measure is exp(-beta H).
DenseOperator gibbs_from_events(const Graph& graph, const EventList& events, int two_s,
                                std::span<const double> h, Family family,
                                std::size_t cap = default_dimension_cap);

enum class ConfigMode { plain, tilde };

struct ConfigCount {
    std::uint64_t count = 0;
    /// Sum of the products of matrix-element signs over the counted configurations.
    std::int64_t signed_sum = 0;
};

/// Enumerates space-time spin configurations with nonzero matrix elements at
/// every event (T for crosses, Q in plain mode or P in tilde mode for bars)
/// and periodic in time. Each site-line segment is assigned a value; the
/// search branches on the initial values and on each bar.
ConfigCount count_compatible_configs(const Graph& graph, const EventList& events, int two_s,
                                     ConfigMode mode, std::uint64_t node_cap = 1'000'000);

} // namespace loopmc
