#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "loopmc/lattice.hpp"
#include "loopmc/measure.hpp"

namespace loopmc {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(path) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class Task { sample, verify_z, correlate, gibbs_check, configs_check, ed, macro_loop };
enum class WeightFamily { uniform, field, field_directed };
enum class SamplerKind { direct, metropolis };

Task parse_task(const std::string& name);
std::string task_name(Task task);

struct SamplerSettings {
    SamplerKind kind = SamplerKind::direct;
    std::size_t n_samples = 100000;
    std::size_t n_sweeps = 100000;
    std::size_t burn_in = 1000;
    std::size_t n_batches = 50;
    std::size_t n_chains = 1;
};

struct RunConfig {
    GraphSpec graph;
    int two_s = 1;
    double u = 1.0;
    double beta = 1.0;
    /// Empty means zero field on every site.
    std::vector<double> h;
    WeightFamily weight = WeightFamily::field;
    double theta = 2.0;
    SamplerSettings sampler;
    std::uint64_t seed = 1;
    Task task = Task::sample;
    std::string output = "out";
    /// Realizations checked by configs-check.
    std::size_t n_configs = 200;
    unsigned workers = 0;
    /// The parsed document, used for the provenance hash.
    nlohmann::json source;
};

/// Parses and validates a run configuration. `task` overrides the "task"
/// field of the document when given.
RunConfig parse_run_config(const nlohmann::json& doc, std::optional<Task> task = std::nullopt);

/// Checks the cross-field invariants; called by parse_run_config.
void validate(const RunConfig& config);

/// Minimum sample count for the statistical comparisons of a task.
std::size_t minimum_samples(Task task);

/// 64-bit FNV-1a hash of the canonical JSON dump of the configuration.
std::uint64_t config_hash(const RunConfig& config);

struct RunOutcome {
    /// 0 when every comparison passes, 1 on a statistical failure.
    int exit_code = 0;
    nlohmann::json summary;
    std::string csv;
};

RunOutcome run(const RunConfig& config);

/// Writes summary.json and detail.csv into `dir`.
void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir);

/// |estimate - exact| <= 3 sigma; when sigma vanishes the two must agree to
/// rounding.
bool within_three_sigma(double estimate, double std_error, double exact);

} // namespace loopmc
