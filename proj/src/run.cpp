#include "loopmc/run.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "loopmc/estimators.hpp"
#include "loopmc/oracle.hpp"

namespace loopmc {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, Task>> task_names{
    {"sample", Task::sample},           {"verify-z", Task::verify_z},
    {"correlate", Task::correlate},     {"gibbs-check", Task::gibbs_check},
    {"configs-check", Task::configs_check}, {"ed", Task::ed},
    {"macro-loop", Task::macro_loop},
};

template <class T>
T field(const json& obj, const std::string& key, const std::string& path, T fallback)
{
    if (!obj.contains(key))
        return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + key, "has the wrong type");
    }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path)
{
    for (const auto& [key, value] : obj.items())
        if (!known.count(key))
            throw ConfigError(path + key, "unknown field");
}

GraphSpec parse_graph(const json& g)
{
    if (!g.is_object())
        throw ConfigError("graph", "must be an object");
    const auto type = field<std::string>(g, "type", "graph.", "");
    if (type == "chain") {
        reject_unknown(g, {"type", "n", "boundary"}, "graph.");
        const auto boundary = field<std::string>(g, "boundary", "graph.", "open");
        if (boundary != "open" && boundary != "periodic")
            throw ConfigError("graph.boundary", "must be \"open\" or \"periodic\"");
        const auto n = field<std::size_t>(g, "n", "graph.", 0);
        if (n == 0)
            throw ConfigError("graph.n", "must be a positive integer");
        return ChainSpec{n, boundary == "open" ? Boundary::open : Boundary::periodic};
    }
    if (type == "torus") {
        reject_unknown(g, {"type", "extents"}, "graph.");
        auto extents = field<std::vector<std::size_t>>(g, "extents", "graph.", {});
        if (extents.empty())
            throw ConfigError("graph.extents", "needs at least one dimension");
        for (std::size_t k = 0; k < extents.size(); ++k)
            if (extents[k] < 2)
                throw ConfigError("graph.extents[" + std::to_string(k) + "]", "must be at least 2");
        return TorusSpec{std::move(extents)};
    }
    if (type == "edges") {
        reject_unknown(g, {"type", "n_sites", "edges"}, "graph.");
        EdgeListSpec spec;
        spec.n_sites = field<std::size_t>(g, "n_sites", "graph.", 0);
        if (spec.n_sites == 0)
            throw ConfigError("graph.n_sites", "must be a positive integer");
        const auto edges = field<std::vector<std::vector<std::size_t>>>(g, "edges", "graph.", {});
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const auto path = "graph.edges[" + std::to_string(i) + "]";
            if (edges[i].size() != 2)
                throw ConfigError(path, "must be a pair of sites");
            if (edges[i][0] >= spec.n_sites || edges[i][1] >= spec.n_sites)
                throw ConfigError(path, "references an unknown vertex");
            if (edges[i][0] == edges[i][1])
                throw ConfigError(path, "is a self-loop");
            spec.edges.push_back({edges[i][0], edges[i][1]});
        }
        return spec;
    }
    throw ConfigError("graph.type", "must be \"chain\", \"torus\" or \"edges\"");
}

Family family_of(const RunConfig& c)
{
    return c.weight == WeightFamily::field_directed ? Family::p_family : Family::q_family;
}

std::string family_name(Family f) { return f == Family::q_family ? "Q" : "P"; }

std::vector<double> field_values(const RunConfig& c, std::size_t n_sites)
{
    return c.h.empty() ? std::vector<double>(n_sites, 0.0) : c.h;
}

WeightSpec weight_spec(const RunConfig& c, std::size_t n_sites)
{
    switch (c.weight) {
    case WeightFamily::uniform:
        return WeightSpec::uniform(c.theta);
    case WeightFamily::field:
        return WeightSpec::field(c.two_s, field_values(c, n_sites));
    case WeightFamily::field_directed:
        break;
    }
    return WeightSpec::field_directed(c.two_s, field_values(c, n_sites));
}

SamplerConfig sampler_config(const RunConfig& c)
{
    if (c.sampler.kind == SamplerKind::direct)
        return DirectConfig{c.sampler.n_samples, c.sampler.n_batches, c.seed, c.workers};
    MetropolisConfig m;
    m.n_sweeps = c.sampler.n_sweeps;
    m.burn_in = c.sampler.burn_in;
    m.n_batches = c.sampler.n_batches;
    m.n_chains = c.sampler.n_chains;
    m.seed = c.seed;
    m.workers = c.workers;
    return m;
}

std::size_t sample_count(const SamplerSettings& s)
{
    return s.kind == SamplerKind::direct ? s.n_samples : s.n_sweeps;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"") == std::string::npos)
        return text;
    std::string quoted = "\"";
    for (char ch : text)
        quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return quoted + "\"";
}

json estimate_record(const std::string& name, const EstimateWithError& e, std::uint64_t seed)
{
    return {{"observable", name}, {"mean", e.mean}, {"stderr", e.std_error},
            {"n_samples", e.n_samples}, {"seed", seed}};
}

/// Collects comparisons, estimates and CSV rows for one run.
class Report {
public:
    explicit Report(std::uint64_t seed) : seed_(seed) { csv_ << "x,y,observable,mean,stderr\n"; }

    void estimate(const std::string& name, const EstimateWithError& e, std::string x = "",
                  std::string y = "")
    {
        estimates_.push_back(estimate_record(name, e, seed_));
        row(x, y, name, e.mean, e.std_error);
    }

    void compare(const std::string& name, double mean, double std_error, double exact)
    {
        const bool pass = within_three_sigma(mean, std_error, exact);
        all_pass_ = all_pass_ && pass;
        comparisons_.push_back({{"name", name},
                                {"estimate", mean},
                                {"stderr", std_error},
                                {"exact", exact},
                                {"deviation_sigma", std_error > 0 ? (mean - exact) / std_error : 0.0},
                                {"pass", pass}});
    }

    /// Comparison of exact quantities (integer counts, algebraic identities).
    void compare_exact(const std::string& name, double value, double expected, double tolerance = 0.0)
    {
        const bool pass = std::abs(value - expected) <= tolerance;
        all_pass_ = all_pass_ && pass;
        comparisons_.push_back(
            {{"name", name}, {"value", value}, {"expected", expected}, {"pass", pass}});
    }

    void row(const std::string& x, const std::string& y, const std::string& name, double mean,
             double std_error)
    {
        csv_ << x << ',' << y << ',' << csv_field(name) << ',' << fmt(mean) << ',' << fmt(std_error)
             << '\n';
    }

    void finish(RunOutcome& out, json summary)
    {
        if (!estimates_.empty())
            summary["estimates"] = estimates_;
        if (!comparisons_.empty()) {
            summary["comparisons"] = comparisons_;
            summary["all_pass"] = all_pass_;
        }
        out.summary = std::move(summary);
        out.csv = csv_.str();
        out.exit_code = all_pass_ ? 0 : 1;
    }

private:
    std::uint64_t seed_;
    json estimates_ = json::array();
    json comparisons_ = json::array();
    std::ostringstream csv_;
    bool all_pass_ = true;
};

const char* axis_name(int i) { return i == 1 ? "S1S1" : i == 2 ? "S2S2" : "S3S3"; }

LocalOperator squared_s3(int two_s)
{
    const auto s3 = spin_operator(3, two_s);
    return s3 * s3;
}

void run_sample(const RunConfig& c, const Graph& g, Report& report, json& summary)
{
    std::vector<Observable> obs{{"num_loops", [](const EventList&, const LoopDecomposition& l) {
                                     return static_cast<double>(l.num_loops());
                                 }}};
    std::vector<std::pair<Site, Site>> pairs;
    for (Site x = 0; x < g.num_sites(); ++x)
        for (Site y = x + 1; y < g.num_sites(); ++y) {
            pairs.emplace_back(x, y);
            for (auto& o : pair_observables(x, y))
                obs.push_back(std::move(o));
        }
    const auto r = estimate(g, c.beta, c.u, weight_spec(c, g.num_sites()), obs, sampler_config(c));
    report.estimate("Y", r.partition);
    report.estimate(obs[0].name, r.observables[0]);
    for (std::size_t k = 0; k < pairs.size(); ++k)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto idx = 1 + 3 * k + j;
            report.estimate(obs[idx].name, r.observables[idx], std::to_string(pairs[k].first),
                            std::to_string(pairs[k].second));
        }
    summary["Y"] = r.partition.mean;
}

void run_verify_z(const RunConfig& c, const Graph& g, Report& report, json& summary)
{
    const auto h = field_values(c, g.num_sites());
    const auto r = estimate(g, c.beta, c.u, weight_spec(c, g.num_sites()), {}, sampler_config(c));
    const double z = partition_function(hamiltonian(g, c.two_s, c.u, h, family_of(c)), c.beta);
    report.estimate("Y", r.partition);
    report.row("", "", "Z_exact", z, 0.0);
    report.compare("Y vs Z", r.partition.mean, r.partition.std_error, z);
    summary["Y"] = r.partition.mean;
    summary["Y_stderr"] = r.partition.std_error;
    summary["Z"] = z;
    summary["relative_stderr"] = r.partition.std_error / r.partition.mean;
}

void run_correlate(const RunConfig& c, const Graph& g, Report& report, json& summary)
{
    const auto family = family_of(c);
    const auto h = field_values(c, g.num_sites());
    const HilbertSpace space(c.two_s, g.num_sites());
    const ThermalState thermal(space, hamiltonian(g, c.two_s, c.u, h, family), c.beta);

    struct Target {
        std::string label;
        LocalOperator a;
        CorrelationCoefficients coeffs;
        bool truncate;
    };
    std::vector<Target> targets;
    for (int i = 1; i <= 3; ++i) {
        const auto s = spin_operator(i, c.two_s);
        targets.push_back({axis_name(i), s,
                           family == Family::q_family ? plain_coefficients(s, s, c.two_s)
                                                      : tilde_coefficients(s, s, c.two_s),
                           false});
    }
    if (family == Family::p_family) {
        const auto q = squared_s3(c.two_s);
        targets.push_back({"nematic", q, truncated(tilde_coefficients(q, q, c.two_s)), true});
    }

    std::vector<Observable> obs;
    std::vector<std::pair<Site, Site>> pairs;
    for (Site x = 0; x < g.num_sites(); ++x)
        for (Site y = x + 1; y < g.num_sites(); ++y) {
            pairs.emplace_back(x, y);
            for (auto& o : pair_observables(x, y))
                obs.push_back(std::move(o));
            for (const auto& t : targets)
                obs.push_back(correlation_observable(t.label, t.coeffs, x, y));
        }
    const auto per_pair = 3 + targets.size();
    const auto r = estimate(g, c.beta, c.u, weight_spec(c, g.num_sites()), obs, sampler_config(c));

    // one-point values enter the truncated correlations; check them exactly
    for (Site x = 0; x < g.num_sites(); ++x)
        for (const auto& t : targets) {
            if (t.label != "S3S3" && t.label != "nematic")
                continue;
            report.compare_exact("<" + t.label + "> one-point at " + std::to_string(x),
                                 thermal.one_point(t.a, x).real(),
                                 one_point_value(t.a, c.two_s).real(), 1e-9);
        }

    json corr = json::array();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [x, y] = pairs[k];
        const auto xs = std::to_string(x), ys = std::to_string(y);
        for (std::size_t j = 0; j < 3; ++j)
            report.estimate(obs[k * per_pair + j].name, r.observables[k * per_pair + j], xs, ys);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const auto& target = targets[t];
            const auto& est = r.observables[k * per_pair + 3 + t];
            double exact = thermal.two_point(target.a, x, target.a, y).real();
            if (target.truncate)
                exact -= (thermal.one_point(target.a, x) * thermal.one_point(target.a, y)).real();
            report.estimate(target.label, est, xs, ys);
            report.row(xs, ys, target.label + "_exact", exact, 0.0);
            report.compare(target.label + "(" + xs + "," + ys + ")", est.mean, est.std_error, exact);
            corr.push_back({{"x", x}, {"y", y}, {"observable", target.label}, {"loop", est.mean},
                            {"stderr", est.std_error}, {"exact", exact}});
        }
    }
    summary["correlations"] = corr;
}

void run_gibbs_check(const RunConfig& c, const Graph& g, Report& report, json& summary)
{
    const auto family = family_of(c);
    const auto h = field_values(c, g.num_sites());
    const auto exact = gibbs_operator(hamiltonian(g, c.two_s, c.u, h, family), c.beta);
    const auto n = exact.rows();
    const auto nb = c.sampler.n_batches;
    const auto per_batch = c.sampler.n_samples / nb;

    std::vector<DenseOperator> batch_mean(nb);
    parallel_for(nb, c.workers, [&](std::size_t b) {
        auto rng = make_stream(c.seed, b);
        DenseOperator acc(n, n);
        for (std::size_t i = 0; i < per_batch; ++i)
            acc += gibbs_from_events(g, sample_events(g, c.beta, c.u, rng), c.two_s, h, family);
        batch_mean[b] = acc * (1.0 / static_cast<double>(per_batch));
    });

    std::vector<double> values(nb);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t b = 0; b < nb; ++b)
                values[b] = batch_mean[b](i, j);
            const auto est = batch_estimate(values, c.sampler.n_samples);
            const auto is = std::to_string(i), js = std::to_string(j);
            report.row(is, js, "gibbs_mc", est.mean, est.std_error);
            report.row(is, js, "gibbs_exact", exact(i, j), 0.0);
            report.compare("G[" + is + "," + js + "]", est.mean, est.std_error, exact(i, j));
        }
    summary["dimension"] = n;
}

void run_configs_check(const RunConfig& c, const Graph& g, Report& report, json& summary)
{
    auto rng = make_stream(c.seed, 0);
    std::size_t failures = 0;
    for (std::size_t k = 0; k < c.n_configs; ++k) {
        const auto omega = sample_events(g, c.beta, c.u, rng);
        const auto loops = build_loops(g, omega);
        const double expected = std::pow(c.two_s + 1.0, static_cast<double>(loops.num_loops()));
        const auto plain = count_compatible_configs(g, omega, c.two_s, ConfigMode::plain);
        const auto tilde = count_compatible_configs(g, omega, c.two_s, ConfigMode::tilde);
        const auto ks = std::to_string(k);
        report.row(ks, "", "loops", static_cast<double>(loops.num_loops()), 0.0);
        report.row(ks, "", "plain_count", static_cast<double>(plain.count), 0.0);
        report.row(ks, "", "tilde_count", static_cast<double>(tilde.count), 0.0);
        report.row(ks, "", "tilde_signed", static_cast<double>(tilde.signed_sum), 0.0);
        const bool ok = static_cast<double>(plain.count) == expected &&
                        static_cast<double>(tilde.count) == expected &&
                        (c.two_s % 2 != 0 || static_cast<double>(tilde.signed_sum) == expected);
        if (!ok) {
            ++failures;
            report.compare_exact("sample " + ks + " plain", static_cast<double>(plain.count), expected);
            report.compare_exact("sample " + ks + " tilde", static_cast<double>(tilde.count), expected);
        }
    }
    report.compare_exact("realizations violating the count law", static_cast<double>(failures), 0.0);
    summary["n_configs"] = c.n_configs;
}

void run_ed(const RunConfig& c, const Graph& g, Report& report, json& summary)
{
    const auto family = family_of(c);
    const auto h = field_values(c, g.num_sites());
    const HilbertSpace space(c.two_s, g.num_sites());
    const ThermalState thermal(space, hamiltonian(g, c.two_s, c.u, h, family), c.beta);
    json corr = json::array();
    for (Site x = 0; x < g.num_sites(); ++x)
        for (Site y = x + 1; y < g.num_sites(); ++y)
            for (int i = 1; i <= 3; ++i) {
                const auto s = spin_operator(i, c.two_s);
                const double v = thermal.two_point(s, x, s, y).real();
                corr.push_back({{"x", x}, {"y", y}, {"observable", axis_name(i)}, {"value", v}});
                report.row(std::to_string(x), std::to_string(y), axis_name(i), v, 0.0);
            }
    summary["Z"] = thermal.partition_function();
    summary["correlations"] = corr;
    summary["loop_identities_apply"] = loop_identities_apply(family, c.two_s);
    report.row("", "", "Z", thermal.partition_function(), 0.0);
}

void run_macro_loop(const RunConfig& c, const Graph& g, Report& report, json& summary)
{
    const auto est = macroscopic_fraction(g, c.beta, c.u, c.theta, sampler_config(c));
    report.estimate("l0/(beta*L^d)", est);
    summary["fraction"] = est.mean;
    summary["fraction_stderr"] = est.std_error;
}

} // namespace

Task parse_task(const std::string& name)
{
    for (const auto& [n, t] : task_names)
        if (n == name)
            return t;
    throw ConfigError("task", "unknown task '" + name + "'");
}

std::string task_name(Task task)
{
    for (const auto& [n, t] : task_names)
        if (t == task)
            return n;
    return "unknown";
}

std::size_t minimum_samples(Task task)
{
    switch (task) {
    case Task::verify_z:
    case Task::correlate:
    case Task::gibbs_check:
        return 10000;
    default:
        return 0;
    }
}

RunConfig parse_run_config(const json& doc, std::optional<Task> task)
{
    if (!doc.is_object())
        throw ConfigError("$", "configuration must be a JSON object");
    reject_unknown(doc, {"graph", "two_s", "u", "beta", "h", "weight", "sampler", "seed", "task",
                         "output", "n_configs", "workers"},
                   "");

    RunConfig c;
    if (!doc.contains("graph"))
        throw ConfigError("graph", "is required");
    c.graph = parse_graph(doc.at("graph"));
    c.two_s = field<int>(doc, "two_s", "", 1);
    c.u = field<double>(doc, "u", "", 1.0);
    c.beta = field<double>(doc, "beta", "", 1.0);
    c.h = field<std::vector<double>>(doc, "h", "", {});
    c.seed = field<std::uint64_t>(doc, "seed", "", 1);
    c.output = field<std::string>(doc, "output", "", "out");
    c.n_configs = field<std::size_t>(doc, "n_configs", "", 200);
    c.workers = field<unsigned>(doc, "workers", "", 0);

    if (task)
        c.task = *task;
    else if (doc.contains("task"))
        c.task = parse_task(field<std::string>(doc, "task", "", ""));
    else
        throw ConfigError("task", "is required");

    if (doc.contains("weight")) {
        const auto& w = doc.at("weight");
        std::string fam;
        if (w.is_string()) {
            fam = w.get<std::string>();
        } else if (w.is_object()) {
            reject_unknown(w, {"family", "theta"}, "weight.");
            fam = field<std::string>(w, "family", "weight.", "");
            c.theta = field<double>(w, "theta", "weight.", c.theta);
        } else {
            throw ConfigError("weight", "must be a string or an object");
        }
        if (fam == "uniform")
            c.weight = WeightFamily::uniform;
        else if (fam == "field")
            c.weight = WeightFamily::field;
        else if (fam == "field_directed")
            c.weight = WeightFamily::field_directed;
        else
            throw ConfigError("weight.family", "must be uniform, field or field_directed");
    } else if (c.task == Task::macro_loop) {
        c.weight = WeightFamily::uniform;
    }

    if (doc.contains("sampler")) {
        const auto& s = doc.at("sampler");
        if (!s.is_object())
            throw ConfigError("sampler", "must be an object");
        reject_unknown(s, {"kind", "n_samples", "n_sweeps", "burn_in", "n_batches", "n_chains"},
                       "sampler.");
        const auto kind = field<std::string>(s, "kind", "sampler.", "direct");
        if (kind == "direct")
            c.sampler.kind = SamplerKind::direct;
        else if (kind == "metropolis")
            c.sampler.kind = SamplerKind::metropolis;
        else
            throw ConfigError("sampler.kind", "must be direct or metropolis");
        c.sampler.n_samples = field<std::size_t>(s, "n_samples", "sampler.", c.sampler.n_samples);
        c.sampler.n_sweeps = field<std::size_t>(s, "n_sweeps", "sampler.", c.sampler.n_sweeps);
        c.sampler.burn_in = field<std::size_t>(s, "burn_in", "sampler.", c.sampler.burn_in);
        c.sampler.n_batches = field<std::size_t>(s, "n_batches", "sampler.", c.sampler.n_batches);
        c.sampler.n_chains = field<std::size_t>(s, "n_chains", "sampler.", c.sampler.n_chains);
    }

    c.source = doc;
    validate(c);
    return c;
}

void validate(const RunConfig& c)
{
    Graph graph = [&] {
        try {
            return build_graph(c.graph);
        } catch (const GraphError& e) {
            throw ConfigError("graph", e.what());
        }
    }();

    if (c.two_s < 1)
        throw ConfigError("two_s", "must be a positive integer (twice the spin)");
    if (!(c.beta > 0.0) || !std::isfinite(c.beta))
        throw ConfigError("beta", "must be positive");
    if (!(c.u >= 0.0 && c.u <= 1.0))
        throw ConfigError("u", "must lie in [0, 1]");
    if (!c.h.empty() && c.h.size() != graph.num_sites())
        throw ConfigError("h", "needs one entry per site (" + std::to_string(graph.num_sites()) + ")");
    for (double v : c.h)
        if (!std::isfinite(v))
            throw ConfigError("h", "entries must be finite");
    const bool zero_field =
        std::all_of(c.h.begin(), c.h.end(), [](double v) { return v == 0.0; });

    if (c.weight == WeightFamily::field_directed && c.two_s % 2 != 0)
        throw ConfigError("weight.family", "field_directed requires integer spin (even two_s)");
    if (c.weight == WeightFamily::uniform && !(c.theta > 0.0))
        throw ConfigError("weight.theta", "must be positive");

    const bool quantum = c.task == Task::verify_z || c.task == Task::correlate;
    if (quantum && c.weight == WeightFamily::uniform &&
        (c.theta != c.two_s + 1.0 || !zero_field))
        throw ConfigError("weight.theta", "must equal 2S+1 at zero field to match a quantum model");
    if (c.task == Task::correlate && !zero_field)
        throw ConfigError("h", "correlations are available at zero field only");
    if (c.task == Task::macro_loop) {
        if (!std::holds_alternative<TorusSpec>(c.graph))
            throw ConfigError("graph.type", "macro-loop needs a torus");
        if (c.weight != WeightFamily::uniform)
            throw ConfigError("weight.family", "macro-loop uses uniform weights");
    }

    const auto& s = c.sampler;
    if (s.n_batches < 2)
        throw ConfigError("sampler.n_batches", "must be at least 2");
    if (s.kind == SamplerKind::direct) {
        if (s.n_samples % s.n_batches != 0)
            throw ConfigError("sampler.n_samples", "must be divisible by n_batches");
        if (s.n_samples < 100 * s.n_batches)
            throw ConfigError("sampler.n_samples", "must be at least 100 per batch");
    } else {
        if (s.n_sweeps == 0 || s.n_sweeps % s.n_batches != 0)
            throw ConfigError("sampler.n_sweeps", "must be a positive multiple of n_batches");
        if (s.n_chains == 0 || s.n_batches % s.n_chains != 0)
            throw ConfigError("sampler.n_chains", "must divide n_batches");
        if (c.task == Task::gibbs_check)
            throw ConfigError("sampler.kind", "gibbs-check averages over the Poisson measure directly");
    }
    if (sample_count(s) < minimum_samples(c.task))
        throw ConfigError(s.kind == SamplerKind::direct ? "sampler.n_samples" : "sampler.n_sweeps",
                          "below the minimum of " + std::to_string(minimum_samples(c.task)) +
                              " for task " + task_name(c.task));
    if (c.task == Task::configs_check && c.n_configs == 0)
        throw ConfigError("n_configs", "must be positive");
}

std::uint64_t config_hash(const RunConfig& config)
{
    auto doc = config.source;
    doc["seed"] = config.seed;
    doc["task"] = task_name(config.task);
    doc.erase("workers");
    doc.erase("output");
    const auto text = doc.dump();
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

bool within_three_sigma(double estimate, double std_error, double exact)
{
    const double slack = 1e-12 * std::max(1.0, std::abs(exact));
    return std::abs(estimate - exact) <= 3.0 * std_error + slack;
}

RunOutcome run(const RunConfig& c)
{
    validate(c);
    const auto graph = build_graph(c.graph);

    char hash[17];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, config_hash(c));
    json summary{{"task", task_name(c.task)},
                 {"config_hash", hash},
                 {"seed", c.seed},
                 {"graph", graph.describe()},
                 {"two_s", c.two_s},
                 {"u", c.u},
                 {"beta", c.beta},
                 {"family", family_name(family_of(c))}};

    Report report(c.seed);
    switch (c.task) {
    case Task::sample:
        run_sample(c, graph, report, summary);
        break;
    case Task::verify_z:
        run_verify_z(c, graph, report, summary);
        break;
    case Task::correlate:
        run_correlate(c, graph, report, summary);
        break;
    case Task::gibbs_check:
        run_gibbs_check(c, graph, report, summary);
        break;
    case Task::configs_check:
        run_configs_check(c, graph, report, summary);
        break;
    case Task::ed:
        run_ed(c, graph, report, summary);
        break;
    case Task::macro_loop:
        run_macro_loop(c, graph, report, summary);
        break;
    }
    RunOutcome out;
    report.finish(out, std::move(summary));
    return out;
}

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::ofstream summary(dir / "summary.json", std::ios::binary);
    summary << outcome.summary.dump(2) << '\n';
    std::ofstream csv(dir / "detail.csv", std::ios::binary);
    csv << outcome.csv;
    if (!summary || !csv)
        throw std::runtime_error("failed to write outputs to " + dir.string());
}

} // namespace loopmc
