#include "dqo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "dqo/csv.hpp"
#include "dqo/log.hpp"

namespace dqo {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::ParseError, "$." + path + ": " + message);
}

double read_number(const json& value, const std::string& path) {
  if (!value.is_number()) schema_error(path, "expected a number");
  return value.get<double>();
}

// Relative tolerance with the additive floor used throughout.
double limit_for(double relative, double scale) { return relative * scale + kToleranceFloor; }

CheckResult make_check(std::string name, double value, double limit, ErrorCode failure = ErrorCode::CertificateFailed) {
  return CheckResult{std::move(name), value, limit, value <= limit, failure};
}

void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void write_report(RunReport& report, const ExperimentConfig& config) {
  const auto path = config.output_dir / (report.command + "_report.json");
  report.files.push_back(path);
  auto out = open_output(path);
  out << report.to_json() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::string coefficient_header(const char* first, const char* prefix, Eigen::Index cols) {
  std::string header = std::string(first) + ",row";
  for (Eigen::Index j = 1; j <= cols; ++j) header += "," + std::string(prefix) + std::to_string(j);
  return header + '\n';
}

// Certificates shared by build and check: positive definiteness of R_o and of
// the reduced comparison matrix, the fixed point, realizability and z_p invariance.
void add_construction_checks(RunReport& report, const Observer& obs) {
  const auto certify = [&](const char* name, const Matrix& m) -> std::optional<SpectralCertificate> {
    try {
      const auto cert = certify_positive_definite(m);
      report.checks.push_back(CheckResult{name, cert.lambda_min, kDefiniteThreshold * cert.lambda_max, true,
                                          ErrorCode::NotPositiveDefinite});
      return cert;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      report.checks.push_back(CheckResult{name, e.value(), 0.0, false, ErrorCode::NotPositiveDefinite});
      return std::nullopt;
    }
  };
  report.certificate = certify("positive_definite_R_o", obs.aug.r_o);
  report.reduced_certificate = certify("positive_definite_reduced", build_reduced(obs.chain).matrix);

  report.fixed_point_residual = check_fixed_point(obs.aug, obs.chain);
  report.checks.push_back(
      make_check("fixed_point", report.fixed_point_residual, limit_for(1e-12, obs.aug.a_o.norm())));
  report.realizability_residual = realizability_residual(obs.aug.a_a, obs.aug.theta);
  report.checks.push_back(
      make_check("realizability", report.realizability_residual, limit_for(1e-12, obs.aug.a_a.norm())));
  report.checks.push_back(
      make_check("plant_output_invariance", plant_output_drift_rate(obs.aug), limit_for(1e-12, obs.aug.a_a.norm())));
}

double resolve_step(const ExperimentConfig& config, const AugmentedSystem& aug) {
  return config.step ? *config.step : default_step(spectral_radius(aug.a_a), config.horizon);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "$: expected an object");

  static const char* const kKnown[] = {"n_elements", "scheme", "omega0", "seed", "c_p", "horizon", "step", "output_dir"};
  for (const auto& item : doc.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), item.key()) == std::end(kKnown)) {
      schema_error(item.key(), "unknown field");
    }
  }
  for (const char* required : {"n_elements", "scheme", "omega0", "c_p"}) {
    if (!doc.contains(required)) schema_error(required, "missing required field");
  }

  ExperimentConfig config;

  const json& n = doc["n_elements"];
  if (!n.is_number_integer()) schema_error("n_elements", "expected an integer");
  const auto n_value = n.get<std::int64_t>();
  if (n_value < 1) throw Error(ErrorCode::ValidationError, "$.n_elements: must be at least 1");
  config.n_elements = static_cast<std::size_t>(n_value);

  if (!doc["scheme"].is_string()) schema_error("scheme", "expected a string");
  try {
    config.scheme.variant = parse_scheme_variant(doc["scheme"].get<std::string>());
  } catch (const Error& e) {
    schema_error("scheme", e.what());
  }

  config.scheme.omega0 = read_number(doc["omega0"], "omega0");
  if (!(config.scheme.omega0 > 0.0) || !std::isfinite(config.scheme.omega0)) {
    throw Error(ErrorCode::ValidationError, "$.omega0: must be positive");
  }

  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) schema_error("seed", "expected a nonnegative integer");
    config.seed = s.get<std::uint64_t>();
    config.scheme.seed = *config.seed;
  }
  const bool is_random = config.scheme.variant == SchemeVariant::Random;
  if (is_random && !config.seed) throw Error(ErrorCode::ValidationError, "$.seed: required for the random scheme");
  if (!is_random && config.seed) {
    throw Error(ErrorCode::ValidationError, "$.seed: only meaningful for the random scheme");
  }
  if (config.scheme.variant == SchemeVariant::AllHarmonics && config.n_elements % 2 != 0) {
    throw Error(ErrorCode::ValidationError, "$.n_elements: all-harmonics scheme requires an even element count");
  }

  const json& cp = doc["c_p"];
  if (!cp.is_array() || cp.size() != 2) schema_error("c_p", "expected an array of two numbers");
  config.c_p << read_number(cp[0], "c_p[0]"), read_number(cp[1], "c_p[1]");
  if (!config.c_p.allFinite()) throw Error(ErrorCode::ValidationError, "$.c_p: entries must be finite");
  if (config.c_p.isZero(0.0)) throw Error(ErrorCode::DegenerateOutput, "$.c_p: output functional is zero");

  if (doc.contains("horizon")) {
    config.horizon = read_number(doc["horizon"], "horizon");
    if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
      throw Error(ErrorCode::ValidationError, "$.horizon: must be positive");
    }
  }

  if (doc.contains("step")) {
    const json& s = doc["step"];
    if (s.is_string()) {
      if (s.get<std::string>() != "auto") schema_error("step", "expected a number or \"auto\"");
    } else {
      const double step = read_number(s, "step");
      if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::ValidationError, "$.step: must be positive");
      config.step = step;
    }
  }

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) schema_error("output_dir", "expected a string");
    config.output_dir = doc["output_dir"].get<std::string>();
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

Observer build_observer(const ExperimentConfig& config) {
  PlantSpec plant = make_static_plant(config.c_p);
  ChainObserverParams chain = build_chain(plant, make_mu_schedule(config.scheme, config.n_elements));
  AugmentedSystem aug = assemble_augmented(plant, chain);
  return Observer{std::move(plant), std::move(chain), std::move(aug)};
}

bool RunReport::passed() const { return first_failure() == nullptr; }

const CheckResult* RunReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

std::string RunReport::to_json() const {
  json doc;
  doc["command"] = command;
  doc["passed"] = passed();
  const auto cert_json = [](const std::optional<SpectralCertificate>& c) -> json {
    if (!c) return nullptr;
    return {{"lambda_min", c->lambda_min}, {"lambda_max", c->lambda_max}, {"exp_norm_bound", c->exp_norm_bound}};
  };
  doc["certificate"] = cert_json(certificate);
  doc["reduced_certificate"] = cert_json(reduced_certificate);
  doc["fixed_point_residual"] = fixed_point_residual;
  doc["realizability_residual"] = realizability_residual;
  doc["consensus_error_curve"] = json::array();
  for (const auto& p : consensus_error_curve) doc["consensus_error_curve"].push_back({{"T", p.horizon}, {"error", p.error}});
  doc["checks"] = json::array();
  for (const auto& c : checks) {
    doc["checks"].push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}});
  }
  doc["files"] = json::array();
  for (const auto& f : files) doc["files"].push_back(f.generic_string());
  return doc.dump(2);
}

RunReport run_build(const ExperimentConfig& config) {
  const Observer obs = build_observer(config);
  ensure_output_dir(config.output_dir);
  RunReport report;
  report.command = "build";

  const auto write = [&](const char* name, const Matrix& m) {
    const auto path = config.output_dir / name;
    csv::write_matrix(path, m);
    report.files.push_back(path);
  };
  write("R_a.csv", obs.aug.r_a);
  write("A_a.csv", obs.aug.a_a);
  write("C_a.csv", obs.aug.c_a);
  write("R_o_reduced.csv", build_reduced(obs.chain).matrix);

  add_construction_checks(report, obs);
  log::info("build: lambda_min(R_o) = " +
            (report.certificate ? csv::format_double(report.certificate->lambda_min) : std::string("n/a")));
  write_report(report, config);
  return report;
}

RunReport run_simulate(const ExperimentConfig& config) {
  const Observer obs = build_observer(config);
  ensure_output_dir(config.output_dir);
  RunReport report;
  report.command = "simulate";

  const TimeGrid grid(0.0, config.horizon, resolve_step(config, obs.aug));
  log::info("simulate: " + std::to_string(grid.samples()) + " samples, step " + csv::format_double(grid.step()));
  const Trajectory traj = coefficient_trajectory(obs.aug, grid);
  const SpatialAverage spatial = spatial_average(traj);

  double plant_row_deviation = 0.0;
  const RowVector plant_row = obs.aug.c_a.row(0);
  const auto traj_path = config.output_dir / "trajectory.csv";
  const auto spatial_path = config.output_dir / "spatial_average.csv";
  {
    auto out = open_output(traj_path);
    auto out_s = open_output(spatial_path);
    const std::string header = coefficient_header("t", "c_", traj.cols());
    out << header;
    out_s << header;
    std::string line;
    for (std::size_t k = 0; k < traj.samples(); ++k) {
      const auto sample = traj.at(k);
      const std::string t = csv::format_double(grid.time(k));
      plant_row_deviation = std::max(plant_row_deviation, (sample.row(0) - plant_row).norm());
      for (Eigen::Index r = 0; r < sample.rows(); ++r) {
        line = t + "," + std::to_string(r + 1);
        csv::append_row(line, sample.row(r));
        line += '\n';
        out << line;
      }
      line = t + ",s";
      csv::append_row(line, spatial.rows.row(static_cast<Eigen::Index>(k)));
      line += '\n';
      out << line;
      out_s << line;
    }
    if (!out || !out_s) throw Error(ErrorCode::IoError, "failed writing trajectory output");
  }
  report.files.push_back(traj_path);
  report.files.push_back(spatial_path);

  report.checks.push_back(make_check("symplectic_drift", traj.max_symplectic_drift,
                                     1e-9 * obs.aug.theta.matrix().norm(), ErrorCode::ToleranceExceeded));
  report.checks.push_back(make_check("hamiltonian_drift", traj.max_hamiltonian_drift.value_or(0.0),
                                     1e-9 * (1.0 + obs.aug.r_a.norm()), ErrorCode::ToleranceExceeded));
  report.checks.push_back(make_check("plant_row_constancy", plant_row_deviation, 1e-9, ErrorCode::ToleranceExceeded));
  write_report(report, config);
  return report;
}

RunReport run_timeavg(const ExperimentConfig& config) {
  const Observer obs = build_observer(config);
  ensure_output_dir(config.output_dir);
  RunReport report;
  report.command = "timeavg";

  const double t_end = config.horizon;
  const std::vector<double> horizons = {t_end / 16.0, t_end / 8.0, t_end / 4.0, t_end / 2.0, t_end};
  std::vector<TimeAverage> averages;
  for (double t : horizons) averages.push_back(time_average_exact(obs.aug, t));

  const auto avg_path = config.output_dir / "time_average.csv";
  {
    auto out = open_output(avg_path);
    out << coefficient_header("T", "avg_c_", obs.aug.c_a.cols());
    std::string line;
    for (const auto& avg : averages) {
      const std::string t = csv::format_double(avg.horizon);
      for (Eigen::Index r = 0; r < avg.averaged_rows.rows(); ++r) {
        line = t + "," + std::to_string(r + 1);
        csv::append_row(line, avg.averaged_rows.row(r));
        line += '\n';
        out << line;
      }
    }
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + avg_path.string());
  }
  report.files.push_back(avg_path);

  for (const auto& avg : averages) report.consensus_error_curve.push_back({avg.horizon, consensus_error(avg)});

  const auto summary_path = config.output_dir / "timeavg_summary.csv";
  {
    auto out = open_output(summary_path);
    out << "row,T,consensus_error\n";
    const auto errors = consensus_errors_by_row(averages.back());
    for (std::size_t i = 0; i < errors.size(); ++i) {
      out << (i + 2) << ',' << csv::format_double(t_end) << ',' << csv::format_double(errors[i]) << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + summary_path.string());
  }
  report.files.push_back(summary_path);

  const TimeGrid grid(0.0, t_end, resolve_step(config, obs.aug));
  log::info("timeavg: quadrature cross-check on " + std::to_string(grid.samples()) + " samples");
  const TimeAverage quad = time_average_quadrature(obs.aug.a_a, obs.aug.c_a, grid);
  report.checks.push_back(make_check("oracle_agreement", relative_difference(averages.back().averaged_rows,
                                                                             quad.averaged_rows),
                                     1e-8, ErrorCode::OracleDisagreement));
  write_report(report, config);
  return report;
}

RunReport run_check(const ExperimentConfig& config) {
  const Observer obs = build_observer(config);
  ensure_output_dir(config.output_dir);
  RunReport report;
  report.command = "check";
  add_construction_checks(report, obs);

  const LaplacianSplit split = laplacian_split(build_reduced(obs.chain));
  const LaplacianKernel kernel = inspect_laplacian(split.laplacian_part);
  report.checks.push_back(
      make_check("laplacian_row_sums", kernel.max_row_sum, 1e-14 * split.laplacian_part.norm() + kToleranceFloor));
  if (obs.chain.n_elements > 1) {
    // Kernel is exactly span{1}: the second eigenvalue must be strictly positive.
    report.checks.push_back(CheckResult{"laplacian_kernel", kernel.lambda_second, 0.0, kernel.lambda_second > 0.0,
                                        ErrorCode::CertificateFailed});
  }
  report.checks.push_back(make_check("imaginary_spectrum", augmented_spectrum(obs.aug).residual(), 1e-10));

  constexpr std::size_t kSamples = 500;
  std::vector<double> times(kSamples);
  for (std::size_t k = 0; k < kSamples; ++k) {
    times[k] = config.horizon * static_cast<double>(k) / static_cast<double>(kSamples - 1);
  }
  if (report.certificate) {
    const SymplecticForm observer_theta(obs.chain.n_elements);
    try {
      const auto bound = verify_exp_bound(obs.aug.r_o, observer_theta, times);
      report.checks.push_back(make_check("exp_bound", bound.max_norm, bound.bound * (1.0 + 1e-9)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundViolated) throw;
      report.checks.push_back(CheckResult{"exp_bound", e.value(), report.certificate->exp_norm_bound * (1.0 + 1e-9),
                                          false, ErrorCode::BoundViolated});
    }
  }

  double worst_symplectic = 0.0;
  double worst_hamiltonian = 0.0;
  const HamiltonianMatrix r_a(obs.aug.r_a);
  for (double t : times) {
    const Matrix phi = propagator(obs.aug.a_a, t);
    worst_symplectic = std::max(worst_symplectic, symplectic_drift(phi, obs.aug.theta));
    worst_hamiltonian = std::max(worst_hamiltonian, hamiltonian_drift(r_a, phi));
  }
  report.checks.push_back(make_check("symplectic_drift", worst_symplectic, 1e-9 * obs.aug.theta.matrix().norm(),
                                     ErrorCode::ToleranceExceeded));
  report.checks.push_back(make_check("hamiltonian_drift", worst_hamiltonian, 1e-9 * (1.0 + obs.aug.r_a.norm()),
                                     ErrorCode::ToleranceExceeded));
  write_report(report, config);
  return report;
}

}  // namespace dqo
