#include "loopmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace loopmc {

namespace {

constexpr double imaginary_tolerance = 1e-14;

void check_spin(int two_s)
{
    if (two_s < 1)
        throw OracleError("spin must be positive (2S >= 1)");
}

std::size_t dim_of_spin(int two_s) { return static_cast<std::size_t>(two_s) + 1; }

/// Embedding of A_x B_y (x != y) as a real operator.
DenseOperator embed_product(const HilbertSpace& space, const LocalOperator& a, Site x,
                            const LocalOperator& b, Site y)
{
    const auto d = space.local_dim();
    DenseOperator m(space.dim(), space.dim());
    for (std::size_t j = 0; j < space.dim(); ++j) {
        const auto mx = space.digit(j, x);
        const auto my = space.digit(j, y);
        const auto base = j - mx * space.stride(x) - my * space.stride(y);
        for (std::size_t px = 0; px < d; ++px)
            for (std::size_t py = 0; py < d; ++py) {
                const auto v = a(px, mx) * b(py, my);
                if (std::abs(v.imag()) > imaginary_tolerance)
                    throw OracleError("operator product is not real in the S^3 basis");
                if (v.real() != 0.0)
                    m(base + px * space.stride(x) + py * space.stride(y), j) += v.real();
            }
    }
    return m;
}

DenseOperator field_term(const HilbertSpace& space, std::span<const double> h)
{
    DenseOperator m(space.dim(), space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i) {
        double z = 0.0;
        for (Site x = 0; x < space.n_sites(); ++x)
            z += h[x] * 0.5 * space.two_value(space.digit(i, x));
        m(i, i) = z;
    }
    return m;
}

void check_field(const Graph& graph, std::span<const double> h)
{
    if (h.size() != graph.num_sites())
        throw OracleError("field has " + std::to_string(h.size()) + " entries for " +
                          std::to_string(graph.num_sites()) + " sites");
}

DenseOperator dot_product_pair(int two_s)
{
    const HilbertSpace pair(two_s, 2);
    DenseOperator ss(pair.dim(), pair.dim());
    for (int i = 1; i <= 3; ++i)
        ss += embed_product(pair, spin_operator(i, two_s), 0, spin_operator(i, two_s), 1);
    return ss;
}

} // namespace

HilbertSpace::HilbertSpace(int two_s, std::size_t n_sites, std::size_t cap)
    : two_s_(two_s), local_(dim_of_spin(two_s)), n_sites_(n_sites), dim_(1)
{
    check_spin(two_s);
    stride_.assign(n_sites, 1);
    for (std::size_t k = 0; k < n_sites; ++k) {
        if (dim_ > cap / local_)
            throw OracleError("Hilbert space dimension exceeds the cap of " + std::to_string(cap));
        dim_ *= local_;
    }
    for (std::size_t k = n_sites; k-- > 1;)
        stride_[k - 1] = stride_[k] * local_;
}

DenseOperator pair_operator(PairKind kind, int two_s)
{
    check_spin(two_s);
    const auto d = dim_of_spin(two_s);
    DenseOperator m(d * d, d * d);
    auto value = [two_s](std::size_t idx) { return two_s - 2 * static_cast<int>(idx); };
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
            for (std::size_t c = 0; c < d; ++c)
                for (std::size_t e = 0; e < d; ++e) {
                    double v = 0.0;
                    switch (kind) {
                    case PairKind::T:
                        v = (a == e && b == c) ? 1.0 : 0.0;
                        break;
                    case PairKind::Q:
                        v = (a == b && c == e) ? 1.0 : 0.0;
                        break;
                    case PairKind::P:
                        if (value(a) == -value(b) && value(c) == -value(e))
                            v = ((value(a) - value(c)) / 2) % 2 == 0 ? 1.0 : -1.0;
                        break;
                    }
                    m(a * d + b, c * d + e) = v;
                }
    return m;
}

LocalOperator spin_operator(int component, int two_s)
{
    check_spin(two_s);
    const auto d = dim_of_spin(two_s);
    const double s = 0.5 * two_s;
    LocalOperator op(d, d);
    // raising operator: <a+1|S^+|a> = sqrt(S(S+1) - a(a+1)); index m has a = S - m
    LocalOperator raise(d, d);
    for (std::size_t m = 1; m < d; ++m) {
        const double a = s - static_cast<double>(m);
        raise(m - 1, m) = std::sqrt(s * (s + 1) - a * (a + 1));
    }
    const auto lower = raise.transpose();
    switch (component) {
    case 1:
        return (raise + lower) * std::complex<double>(0.5, 0.0);
    case 2:
        return (raise - lower) * std::complex<double>(0.0, -0.5);
    case 3:
        for (std::size_t m = 0; m < d; ++m)
            op(m, m) = s - static_cast<double>(m);
        return op;
    default:
        throw OracleError("spin component must be 1, 2 or 3");
    }
}

LocalOperator local_identity(int two_s)
{
    check_spin(two_s);
    return LocalOperator::identity(dim_of_spin(two_s));
}

DenseOperator embed_pair(const HilbertSpace& space, const DenseOperator& op, Site x, Site y)
{
    const auto d = space.local_dim();
    if (op.rows() != d * d || op.cols() != d * d)
        throw OracleError("two-site operator has the wrong dimension");
    if (x == y || x >= space.n_sites() || y >= space.n_sites())
        throw OracleError("invalid site pair for embedding");
    DenseOperator m(space.dim(), space.dim());
    for (std::size_t j = 0; j < space.dim(); ++j) {
        const auto mx = space.digit(j, x);
        const auto my = space.digit(j, y);
        const auto base = j - mx * space.stride(x) - my * space.stride(y);
        for (std::size_t px = 0; px < d; ++px)
            for (std::size_t py = 0; py < d; ++py) {
                const double v = op(px * d + py, mx * d + my);
                if (v != 0.0)
                    m(base + px * space.stride(x) + py * space.stride(y), j) += v;
            }
    }
    return m;
}

DenseOperator embed_site(const HilbertSpace& space, const LocalOperator& op, Site x)
{
    const auto d = space.local_dim();
    if (op.rows() != d || op.cols() != d)
        throw OracleError("single-site operator has the wrong dimension");
    DenseOperator m(space.dim(), space.dim());
    for (std::size_t j = 0; j < space.dim(); ++j) {
        const auto mx = space.digit(j, x);
        const auto base = j - mx * space.stride(x);
        for (std::size_t px = 0; px < d; ++px) {
            const auto v = op(px, mx);
            if (std::abs(v.imag()) > imaginary_tolerance)
                throw OracleError("single-site operator is not real");
            if (v.real() != 0.0)
                m(base + px * space.stride(x), j) = v.real();
        }
    }
    return m;
}

DenseOperator hamiltonian(const Graph& graph, int two_s, double u, std::span<const double> h,
                          Family family, std::size_t cap)
{
    check_field(graph, h);
    const HilbertSpace space(two_s, graph.num_sites(), cap);
    const auto d2 = dim_of_spin(two_s) * dim_of_spin(two_s);
    const auto bar = pair_operator(family == Family::q_family ? PairKind::Q : PairKind::P, two_s);
    const auto bond = DenseOperator::identity(d2) - u * pair_operator(PairKind::T, two_s) - (1.0 - u) * bar;

    auto m = field_term(space, h) * -1.0;
    for (const auto& e : graph.edges())
        m += embed_pair(space, bond, e.x, e.y);
    return m;
}

DenseOperator pair_operator_spin_form(PairKind kind, int two_s)
{
    const HilbertSpace pair(two_s, 2);
    const auto id = DenseOperator::identity(pair.dim());
    if (two_s == 1) {
        const auto s1 = embed_product(pair, spin_operator(1, 1), 0, spin_operator(1, 1), 1);
        const auto s2 = embed_product(pair, spin_operator(2, 1), 0, spin_operator(2, 1), 1);
        const auto s3 = embed_product(pair, spin_operator(3, 1), 0, spin_operator(3, 1), 1);
        if (kind == PairKind::T)
            return 2.0 * (s1 + s2 + s3) + 0.5 * id;
        if (kind == PairKind::Q)
            return 2.0 * (s1 - s2 + s3) + 0.5 * id;
    } else if (two_s == 2) {
        const auto ss = dot_product_pair(2);
        const auto ss2 = ss * ss;
        if (kind == PairKind::T)
            return ss + ss2 - id;
        if (kind == PairKind::P)
            return ss2 - id;
    }
    throw OracleError("no spin-operator form for this operator and spin");
}

DenseOperator hamiltonian_spin_form(const Graph& graph, int two_s, double u,
                                    std::span<const double> h, Family family, std::size_t cap)
{
    check_field(graph, h);
    const HilbertSpace space(two_s, graph.num_sites(), cap);
    const HilbertSpace pair(two_s, 2);
    DenseOperator bond;
    if (two_s == 1 && family == Family::q_family) {
        const auto s1 = embed_product(pair, spin_operator(1, 1), 0, spin_operator(1, 1), 1);
        const auto s2 = embed_product(pair, spin_operator(2, 1), 0, spin_operator(2, 1), 1);
        const auto s3 = embed_product(pair, spin_operator(3, 1), 0, spin_operator(3, 1), 1);
        bond = -2.0 * (s1 + (2.0 * u - 1.0) * s2 + s3 - 0.25 * DenseOperator::identity(pair.dim()));
    } else if (two_s == 2 && family == Family::p_family) {
        const auto ss = dot_product_pair(2);
        bond = -1.0 * (u * ss + ss * ss - 2.0 * DenseOperator::identity(pair.dim()));
    } else {
        throw OracleError("spin-operator form available for S=1/2 Q-family and S=1 P-family only");
    }
    auto m = field_term(space, h) * -1.0;
    for (const auto& e : graph.edges())
        m += embed_pair(space, bond, e.x, e.y);
    return m;
}

bool loop_identities_apply(Family family, int two_s)
{
    return family == Family::q_family || two_s % 2 == 0;
}

Eigensystem symmetric_eigen(const DenseOperator& input, double tolerance, std::size_t max_sweeps)
{
    if (!input.square())
        throw OracleError("eigensolver needs a square matrix");
    const auto n = input.rows();
    const double norm = input.frobenius_norm();
    if ((input - input.transpose()).max_abs() > 1e-12 * std::max(1.0, norm))
        throw OracleError("eigensolver needs a symmetric matrix");

    auto a = input;
    auto v = DenseOperator::identity(n);
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    std::size_t sweep = 0;
    for (; off_norm() > tolerance * norm; ++sweep) {
        if (sweep == max_sweeps)
            throw OracleError("Jacobi eigensolver did not converge");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    Eigensystem es{std::vector<double>(n), DenseOperator(n, n), sweep};
    for (std::size_t k = 0; k < n; ++k) {
        es.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i)
            es.vectors(i, k) = v(i, order[k]);
    }
    return es;
}

namespace {

DenseOperator gibbs_from_eigen(const Eigensystem& es, double beta)
{
    const auto n = es.values.size();
    DenseOperator g(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = std::exp(-beta * es.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = es.vectors(i, k) * f;
            for (std::size_t j = 0; j < n; ++j)
                g(i, j) += vik * es.vectors(j, k);
        }
    }
    return g;
}

} // namespace

ThermalState::ThermalState(const HilbertSpace& space, const DenseOperator& h, double beta)
    : space_(space), eigen_(symmetric_eigen(h)), gibbs_(gibbs_from_eigen(eigen_, beta)), z_(0.0)
{
    if (h.rows() != space.dim())
        throw OracleError("Hamiltonian does not match the Hilbert space");
    for (double l : eigen_.values)
        z_ += std::exp(-beta * l);
}

std::complex<double> ThermalState::two_point(const LocalOperator& a, Site x, const LocalOperator& b,
                                             Site y) const
{
    if (x == y)
        throw OracleError("two-point function needs distinct sites");
    const auto d = space_.local_dim();
    if (a.rows() != d || b.rows() != d)
        throw OracleError("single-site operator has the wrong dimension");
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < space_.dim(); ++i) {
        const auto mx = space_.digit(i, x);
        const auto my = space_.digit(i, y);
        const auto base = i - mx * space_.stride(x) - my * space_.stride(y);
        for (std::size_t px = 0; px < d; ++px)
            for (std::size_t py = 0; py < d; ++py) {
                const auto j = base + px * space_.stride(x) + py * space_.stride(y);
                sum += a(mx, px) * b(my, py) * gibbs_(j, i);
            }
    }
    return sum / z_;
}

std::complex<double> ThermalState::one_point(const LocalOperator& a, Site x) const
{
    const auto d = space_.local_dim();
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < space_.dim(); ++i) {
        const auto mx = space_.digit(i, x);
        const auto base = i - mx * space_.stride(x);
        for (std::size_t px = 0; px < d; ++px)
            sum += a(mx, px) * gibbs_(base + px * space_.stride(x), i);
    }
    return sum / z_;
}

DenseOperator gibbs_operator(const DenseOperator& h, double beta)
{
    return gibbs_from_eigen(symmetric_eigen(h), beta);
}

double partition_function(const DenseOperator& h, double beta)
{
    double z = 0.0;
    for (double l : symmetric_eigen(h).values)
        z += std::exp(-beta * l);
    return z;
}

std::complex<double> thermal_two_point(const HilbertSpace& space, const DenseOperator& h,
                                       const LocalOperator& a, Site x, const LocalOperator& b,
                                       Site y, double beta)
{
    return ThermalState(space, h, beta).two_point(a, x, b, y);
}

DenseOperator gibbs_from_events(const Graph& graph, const EventList& events, int two_s,
                                std::span<const double> h, Family family, std::size_t cap)
{
    check_field(graph, h);
    events.check_edges(graph);
    const HilbertSpace space(two_s, graph.num_sites(), cap);
    const auto n = space.dim();

    std::vector<double> zeeman(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (Site x = 0; x < space.n_sites(); ++x)
            zeeman[i] += h[x] * 0.5 * space.two_value(space.digit(i, x));

    const auto cross = pair_operator(PairKind::T, two_s);
    const auto bar = pair_operator(family == Family::q_family ? PairKind::Q : PairKind::P, two_s);
    std::vector<std::optional<DenseOperator>> cross_cache(graph.num_edges());
    std::vector<std::optional<DenseOperator>> bar_cache(graph.num_edges());

    auto evolve = [&](DenseOperator& g, double tau) {
        if (tau == 0.0)
            return;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = std::exp(tau * zeeman[i]);
            for (std::size_t j = 0; j < n; ++j)
                g(i, j) *= f;
        }
    };

    auto g = DenseOperator::identity(n);
    double last = 0.0;
    for (const auto& ev : events.items()) {
        evolve(g, ev.time - last);
        last = ev.time;
        const auto& edge = graph.edge(ev.edge);
        auto& cache = ev.kind == EventKind::cross ? cross_cache : bar_cache;
        if (!cache[ev.edge])
            cache[ev.edge] = embed_pair(space, ev.kind == EventKind::cross ? cross : bar, edge.x, edge.y);
        g = *cache[ev.edge] * g;
    }
    evolve(g, events.beta() - last);
    return g;
}

ConfigCount count_compatible_configs(const Graph& graph, const EventList& events, int two_s,
                                     ConfigMode mode, std::uint64_t node_cap)
{
    check_spin(two_s);
    events.check_edges(graph);
    const auto n_sites = graph.num_sites();
    const int d = two_s + 1;

    std::vector<std::optional<std::size_t>> last_event(n_sites);
    for (std::size_t j = 0; j < events.size(); ++j) {
        const auto& e = graph.edge(events[j].edge);
        last_event[e.x] = j;
        last_event[e.y] = j;
    }

    // spin values are tracked as local indices m, a = S - m
    std::vector<int> initial(n_sites, 0);
    std::vector<int> current(n_sites, 0);
    ConfigCount result;
    std::uint64_t nodes = 0;

    // the segment above a site's last event is the one that wraps through the seam
    auto closes = [&](std::size_t j, Site s) {
        return last_event[s] && *last_event[s] == j && current[s] != initial[s];
    };

    auto search = [&](auto&& self, std::size_t j, int sign) -> void {
        if (++nodes > node_cap)
            throw OracleError("configuration enumeration exceeded the node cap");
        if (j == events.size()) {
            ++result.count;
            result.signed_sum += sign;
            return;
        }
        const auto& e = graph.edge(events[j].edge);
        const int before_x = current[e.x];
        const int before_y = current[e.y];
        auto descend = [&](int after_x, int after_y, int s) {
            current[e.x] = after_x;
            current[e.y] = after_y;
            if (!closes(j, e.x) && !closes(j, e.y))
                self(self, j + 1, s);
            current[e.x] = before_x;
            current[e.y] = before_y;
        };

        if (events[j].kind == EventKind::cross) {
            descend(before_y, before_x, sign);
        } else if (mode == ConfigMode::plain) {
            if (before_x != before_y)
                return;
            for (int v = 0; v < d; ++v)
                descend(v, v, sign);
        } else {
            if (before_x + before_y != two_s)
                return;
            for (int v = 0; v < d; ++v) {
                // (-1)^(a_after - a_before) on the first factor
                const int flip = (before_x - v) % 2 == 0 ? 1 : -1;
                descend(v, two_s - v, sign * flip);
            }
        }
    };

    // odometer over the initial values of all site lines
    while (true) {
        current = initial;
        search(search, 0, 1);
        Site k = 0;
        while (k < n_sites && ++initial[k] == d)
            initial[k++] = 0;
        if (k == n_sites)
            break;
    }
    return result;
}

} // namespace loopmc
