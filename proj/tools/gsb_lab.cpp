// gsb-lab — batch runner for spin-boson lab experiments. Each subcommand
// reads a sectioned config file, applies flag overrides, writes a JSON
// verdict plus CSV data under the output directory, and exits nonzero iff a
// configured assertion failed.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gsb/config.hpp"
#include "gsb/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> z_values;
    double lambda = 0.0;
    double tolerance = 0.0;
    int grid = 0;
    int nmax = 0;
    long long seed = -1;
    bool has_lambda = false, has_tolerance = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Experiment config file (INI sections)");
    cmd->add_option("--out", flags.out_dir, "Output directory");
    cmd->add_option("--seed", flags.seed, "Deterministic RNG seed");
    cmd->add_option("--grid", flags.grid, "Grid mode count G");
    cmd->add_option("--nmax", flags.nmax, "Maximal total particle number");
    cmd->add_option("--lambda", flags.lambda, "Coupling constant")
        ->each([&flags](const std::string&) { flags.has_lambda = true; });
    cmd->add_option("--tolerance", flags.tolerance, "Assertion tolerance")
        ->each([&flags](const std::string&) { flags.has_tolerance = true; });
    cmd->add_option("--z", flags.z_values, "Spectral point a+bi (repeatable)");
}

gsb::ExperimentConfig assemble(const CommonFlags& flags) {
    gsb::ConfigFile file = flags.config_path.empty()
                               ? gsb::ConfigFile::parse_string("", "<defaults>")
                               : gsb::ConfigFile::parse_file(flags.config_path);
    // flags win over the config file
    if (!flags.out_dir.empty()) file.set("output.dir", flags.out_dir);
    if (flags.seed >= 0) file.set("experiment.seed", std::to_string(flags.seed));
    if (flags.grid > 0) file.set("field.modes", std::to_string(flags.grid));
    if (flags.nmax > 0) file.set("truncation.n_max", std::to_string(flags.nmax));
    if (flags.has_lambda) file.set("model.lambda", std::to_string(flags.lambda));
    if (flags.has_tolerance) file.set("experiment.tolerance", std::to_string(flags.tolerance));
    if (!flags.z_values.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < flags.z_values.size(); ++i) {
            if (i) joined += ", ";
            joined += flags.z_values[i];
        }
        file.set("experiment.z", joined);
    }
    return gsb::ExperimentConfig::from_file(file);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gsb-lab: numerical laboratory for generalized spin-boson models "
                 "with singular form factors"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subcommands = {
        {"verify-bounds", "Run the operator inequality suite"},
        {"resolvent-check", "Closed-form resolvent vs direct solve residuals"},
        {"self-energy", "Self-energy values on a z list"},
        {"bound-state", "Single-excitation bound-state search"},
        {"growth-cert", "Growth certificate for the renormalization hypothesis"},
        {"converge", "Regularized-to-singular resolvent convergence run"},
        {"spectrum-scan", "z-grid scan of the self-energy and propagator norm"},
    };

    std::vector<CommonFlags> flags(subcommands.size());
    for (std::size_t i = 0; i < subcommands.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(subcommands[i].first, subcommands[i].second);
        add_common(cmd, flags[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subcommands.size(); ++i) {
        if (!app.get_subcommand(subcommands[i].first)->parsed()) continue;
        try {
            const gsb::ExperimentConfig cfg = assemble(flags[i]);
            const gsb::ExperimentResult result =
                gsb::run_experiment(subcommands[i].first, cfg);
            gsb::write_result(subcommands[i].first, cfg, result);
            std::printf("%s: %s (outputs in %s)\n", subcommands[i].first.c_str(),
                        result.exit_code == 0 ? "pass" : "FAIL",
                        cfg.out_dir.string().c_str());
            return result.exit_code;
        } catch (const gsb::Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return e.code() == "config-error" ? 2 : 1;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }
    return 2;
}
