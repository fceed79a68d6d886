#include "aequiv/app.hpp"
#include "aequiv/error.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App cli{"Equivalence transforms, Le Cam bounds and proposition checks"};
    cli.require_subcommand(1);

    std::string config_path;
    aeq::app::CliOverrides overrides;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    unsigned threads = 1;
    std::string out_dir;
    std::vector<std::string> sets;
    bool quiet = false;

    for (const char* name : {"bound", "transform", "verify", "rates"}) {
        CLI::App* sub = cli.add_subcommand(name);
        sub->add_option("--config", config_path, "flat key = value file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--reps", reps, "replicates for every Monte Carlo check");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--set", sets, "key=value override, repeatable");
        sub->add_flag("--quiet", quiet, "do not print the summary table");
    }

    CLI11_PARSE(cli, argc, argv);
    CLI::App* sub = cli.get_subcommands().front();

    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            std::ostringstream ss;
            ss << f.rdbuf();
            text = ss.str();
        }
        if (sub->count("--seed")) overrides.seed = seed;
        if (sub->count("--reps")) overrides.reps = reps;
        if (sub->count("--threads")) overrides.threads = threads;
        if (sub->count("--out")) overrides.out_dir = out_dir;
        for (const auto& s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw aeq::Error(aeq::ErrorKind::Validation, "--set expects key=value, got '" + s + "'");
            overrides.set.emplace_back(s.substr(0, eq), s.substr(eq + 1));
        }

        aeq::app::ExperimentConfig config = aeq::app::resolve_config(sub->get_name(), text, overrides);
        aeq::app::RunOutput output = aeq::app::run(config);
        aeq::app::write_outputs(config, output);
        if (!quiet) std::cout << output.table;
        return output.exit_code;
    } catch (const aeq::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
