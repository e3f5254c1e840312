#include "spdiv/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Dividend barriers with capital injection for spectrally positive Levy and regime-switching models"};
    app.require_subcommand(1);

    spdiv::CommandOptions opt;
    std::string barriers;
    bool antithetic = false;
    bool no_antithetic = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "model config file")->required();
        sub->add_option("--out", opt.out_dir, "directory for CSV and summary output");
        sub->add_option("--paths", opt.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
        sub->add_option("--dt", opt.dt, "time step")->check(CLI::PositiveNumber);
        sub->add_option("--tmax", opt.tmax, "path horizon (0 picks one from the discount rates)");
        sub->add_option("--seed", opt.seed, "RNG seed");
        sub->add_flag("--antithetic", antithetic, "use antithetic Gaussian pairs");
        sub->add_flag("--no-antithetic", no_antithetic, "disable antithetic pairs");
        sub->add_option("--state", opt.state, "chain state name");
        sub->add_option("--x0", opt.x0, "initial surplus");
        sub->add_option("--barriers", barriers, "comma separated barriers, one per chain state");
        sub->add_option("--from-summary", opt.from_summary, "summary.txt from a previous solve");
        sub->add_option("--points", opt.points, "points in CSV curves");
    };

    const char* names[][2] = {
        {"solve-aux", "optimal barrier of the single-regime problem"},
        {"solve-regime", "fixed-point iteration for the regime-switching problem"},
        {"simulate", "Monte Carlo NPV of a barrier strategy"},
        {"verify", "identity and residual checks"},
        {"curve", "scale functions and value curves as CSV"},
    };
    for (auto& n : names) add_common(app.add_subcommand(n[0], n[1]));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : spdiv::kExitConfig;
    }

    if (antithetic && no_antithetic) {
        std::cerr << "config error: --antithetic and --no-antithetic are exclusive\n";
        return spdiv::kExitConfig;
    }
    if (antithetic) opt.antithetic = true;
    if (no_antithetic) opt.antithetic = false;
    if (!barriers.empty()) {
        try {
            opt.barriers = spdiv::parse_number_list(barriers);
        } catch (const std::invalid_argument& e) {
            std::cerr << "config error: --barriers: " << e.what() << "\n";
            return spdiv::kExitConfig;
        }
    }

    return spdiv::run_command(app.get_subcommands().front()->get_name(), opt, std::cout, std::cerr);
}
