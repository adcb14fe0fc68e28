#pragma once

// Named reproduction experiments and the acceptance checks built on them.
// Shared by the `reproduce` subcommand and the acceptance test binary.

#include "fogpss/config.hpp"
#include "fogpss/simkit.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fogpss {

struct CriterionResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
};

/// One line: "[PASS] 4  description :: detail".
std::string format_result(const CriterionResult& r);

/// Loads a bundled config by file name, e.g. "paper_fig5.cfg".
ExperimentConfig load_bundled(const std::string& name);

CriterionResult criterion_bound(const SimTrace& fig5, double runtime_seconds);
CriterionResult criterion_entry_time(const SimTrace& fig5, std::optional<double> reported);
CriterionResult criterion_estimate_ball(const SimTrace& fig5, double epsilon0);
CriterionResult criterion_control_consistency(const SimTrace& fig5, const FogpssConfig& cfg);
CriterionResult criterion_abm_order();
CriterionResult criterion_abm_accuracy();
CriterionResult criterion_operator_suite();
CriterionResult criterion_lemma1_audit();
CriterionResult criterion_stability_checker();
CriterionResult criterion_pss_robot(const RobotExperimentConfig& noisy, const RobotExperimentConfig& noise_free);
CriterionResult criterion_lambda_tracker(const SimConfig& config);
CriterionResult criterion_config_contract();

/// Runs criteria 1-11 with the bundled configs.
std::vector<CriterionResult> run_acceptance();

/// Runs one named experiment (fig5, fig6, fig7, pss, order, all). Artifacts
/// go to out_dir when it is non-empty.
std::vector<CriterionResult> reproduce(const std::string& figure, const std::filesystem::path& out_dir);

/// Human-readable run report for `simulate`.
std::string simulation_summary(const ExperimentConfig& config, const SimTrace& trace);
std::string robot_summary(const ExperimentConfig& config, const RobotExperimentResult& result);

/// CSV, SVG plots and summary for a single run.
void write_run_artifacts(const std::filesystem::path& out_dir, const ExperimentConfig& config,
                         const SimTrace& trace);
void write_robot_artifacts(const std::filesystem::path& out_dir, const ExperimentConfig& config,
                           const RobotExperimentResult& result);

}  // namespace fogpss
