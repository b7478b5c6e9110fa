// experiments.hpp — the batch experiment runners behind the CLI subcommands.
// Each runner consumes an ExperimentConfig and returns a JSON verdict plus
// CSV curves; exit status is nonzero iff a configured assertion failed.

#pragma once

#include <string>
#include <vector>

#include "gsb/config.hpp"
#include "gsb/io.hpp"

namespace gsb {

struct ExperimentResult {
    int exit_code = 0;
    Json summary;
    std::vector<std::pair<std::string, CsvTable>> tables;            // name -> data
    std::vector<std::pair<std::string, SparseMatrix>> operator_dumps; // name -> matrix
};

ExperimentResult run_verify_bounds(const ExperimentConfig& cfg);
ExperimentResult run_resolvent_check(const ExperimentConfig& cfg);
ExperimentResult run_self_energy(const ExperimentConfig& cfg);
ExperimentResult run_bound_state(const ExperimentConfig& cfg);
ExperimentResult run_growth_cert(const ExperimentConfig& cfg);
ExperimentResult run_converge(const ExperimentConfig& cfg);
ExperimentResult run_spectrum_scan(const ExperimentConfig& cfg);

/// Dispatch by subcommand name; throws "config-error" for unknown names.
ExperimentResult run_experiment(const std::string& subcommand, const ExperimentConfig& cfg);

/// Writes summary and tables under cfg.out_dir as <subcommand>_summary.json /
/// <subcommand>_<table>.csv.
void write_result(const std::string& subcommand, const ExperimentConfig& cfg,
                  const ExperimentResult& result);

} // namespace gsb
