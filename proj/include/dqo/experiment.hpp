#pragma once

// Experiment orchestration behind the command line tool: configuration,
// certificate runs and file output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqo/analysis.hpp"
#include "dqo/error.hpp"
#include "dqo/observer_builder.hpp"
#include "dqo/sim_engine.hpp"

namespace dqo {

struct ExperimentConfig {
  std::size_t n_elements = 0;
  ParameterScheme scheme;
  std::optional<std::uint64_t> seed;
  Eigen::RowVector2d c_p = Eigen::RowVector2d::Zero();
  double horizon = 500.0;
  std::optional<double> step;  // nullopt = auto
  std::filesystem::path output_dir = ".";
};

/// Parses a JSON document:
///
///   {"n_elements": 5, "scheme": "odd-harmonics", "omega0": 1.0,
///    "c_p": [1, 0], "horizon": 500, "step": "auto", "seed": 7,
///    "output_dir": "out"}
///
/// n_elements, scheme, omega0 and c_p are required. seed must be present for
/// the random scheme and absent otherwise. Schema problems raise ParseError
/// naming the field path; semantic ones raise ValidationError (or
/// DegenerateOutput for a zero c_p).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Observer {
  PlantSpec plant;
  ChainObserverParams chain;
  AugmentedSystem aug;
};

Observer build_observer(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
  ErrorCode failure = ErrorCode::CertificateFailed;
};

struct RunReport {
  std::string command;
  std::optional<SpectralCertificate> certificate;          // R_o
  std::optional<SpectralCertificate> reduced_certificate;  // reduced comparison matrix
  double fixed_point_residual = 0.0;
  double realizability_residual = 0.0;
  std::vector<ConsensusPoint> consensus_error_curve;
  std::vector<CheckResult> checks;
  std::vector<std::filesystem::path> files;

  bool passed() const;
  /// First failing check, if any.
  const CheckResult* first_failure() const;
  std::string to_json() const;
};

/// Writes R_a.csv, A_a.csv, C_a.csv, R_o_reduced.csv and build_report.json.
RunReport run_build(const ExperimentConfig& config);

/// Writes trajectory.csv (rows 1..N+1 plus the spatial average row "s" at every
/// sample), spatial_average.csv and simulate_report.json.
RunReport run_simulate(const ExperimentConfig& config);

/// Writes time_average.csv at T_end/16, T_end/8, ..., T_end, timeavg_summary.csv
/// and timeavg_report.json, and cross-checks the exact average at T_end
/// against Simpson quadrature.
RunReport run_timeavg(const ExperimentConfig& config);

/// Runs every certificate without writing trajectories; writes check_report.json.
RunReport run_check(const ExperimentConfig& config);

}  // namespace dqo
