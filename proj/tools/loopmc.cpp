// Command-line driver: loopmc <task> --config <file> [--seed N] [--out DIR]
//
// Exit status: 0 all comparisons pass, 1 statistical failure, 2 usage or
// configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "loopmc/run.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Random-loop Monte Carlo for quantum spin systems"};
    std::string task;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;

    app.add_option("task", task,
                   "sample | verify-z | correlate | gibbs-check | configs-check | ed | macro-loop")
        ->required();
    app.add_option("--config,-c", config_path, "JSON run configuration")->required();
    app.add_option("--seed", seed, "master seed (overrides LOOPMC_SEED and the config)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file " << config_path << '\n';
            return 2;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << "error: " << config_path << ": " << e.what() << '\n';
            return 2;
        }

        auto config = loopmc::parse_run_config(doc, loopmc::parse_task(task));
        if (const char* env = std::getenv("LOOPMC_SEED"))
            config.seed = std::stoull(env);
        if (seed)
            config.seed = *seed;
        if (out_dir)
            config.output = *out_dir;
        loopmc::validate(config);

        const auto outcome = loopmc::run(config);
        loopmc::write_outputs(outcome, config.output);
        std::cout << outcome.summary.dump(2) << '\n';
        return outcome.exit_code;
    } catch (const loopmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
