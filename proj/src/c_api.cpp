#include "dqo/dqo.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "dqo/analysis.hpp"
#include "dqo/error.hpp"
#include "dqo/experiment.hpp"
#include "dqo/log.hpp"
#include "dqo/lqs_core.hpp"
#include "dqo/sim_engine.hpp"

struct dqo_config {
  dqo::ExperimentConfig value;
};

struct dqo_observer {
  dqo::Observer value;
};

namespace {

std::string& last_error() {
  thread_local std::string message;
  return message;
}

dqo_status status_for(dqo::ErrorCode code) {
  using dqo::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidDimension: return DQO_ERR_INVALID_DIMENSION;
    case ErrorCode::InvalidParameter: return DQO_ERR_INVALID_PARAMETER;
    case ErrorCode::UnsupportedScheme: return DQO_ERR_UNSUPPORTED_SCHEME;
    case ErrorCode::DegenerateOutput: return DQO_ERR_DEGENERATE_OUTPUT;
    case ErrorCode::UnsupportedPlant: return DQO_ERR_UNSUPPORTED_PLANT;
    case ErrorCode::NotPositiveDefinite: return DQO_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::BoundViolated: return DQO_ERR_BOUND_VIOLATED;
    case ErrorCode::InvalidInput: return DQO_ERR_INVALID_INPUT;
    case ErrorCode::NumericalFailure: return DQO_ERR_NUMERICAL_FAILURE;
    case ErrorCode::ToleranceExceeded: return DQO_ERR_TOLERANCE_EXCEEDED;
    case ErrorCode::StepTooCoarse: return DQO_ERR_STEP_TOO_COARSE;
    case ErrorCode::ParseError: return DQO_ERR_PARSE;
    case ErrorCode::ValidationError: return DQO_ERR_VALIDATION;
    case ErrorCode::IoError: return DQO_ERR_IO;
    case ErrorCode::CertificateFailed: return DQO_ERR_CERTIFICATE_FAILED;
    case ErrorCode::OracleDisagreement: return DQO_ERR_ORACLE_DISAGREEMENT;
  }
  return DQO_ERR_INTERNAL;
}

dqo_status fail(dqo_status status, std::string message) {
  last_error() = std::move(message);
  return status;
}

// Runs body, translating every exception into a status and thread-local message.
template <typename Body>
dqo_status guarded(Body&& body) noexcept {
  try {
    return body();
  } catch (const dqo::Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DQO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DQO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DQO_ERR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& text) {
  char* copy = static_cast<char*>(std::malloc(text.size() + 1));
  if (!copy) throw std::bad_alloc();
  std::memcpy(copy, text.c_str(), text.size() + 1);
  return copy;
}

dqo_status copy_out(const dqo::Matrix& m, double* out, std::size_t capacity) {
  if (!out) return fail(DQO_ERR_NULL_ARGUMENT, "output buffer is NULL");
  const auto needed = static_cast<std::size_t>(m.size());
  if (capacity < needed) {
    return fail(DQO_ERR_BUFFER_TOO_SMALL,
                "buffer holds " + std::to_string(capacity) + " doubles, need " + std::to_string(needed));
  }
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, m.rows(), m.cols()) = m;
  return DQO_OK;
}

dqo::Matrix matrix_for(const dqo::Observer& obs, dqo_matrix_kind kind) {
  switch (kind) {
    case DQO_MATRIX_R_A: return obs.aug.r_a;
    case DQO_MATRIX_A_A: return obs.aug.a_a;
    case DQO_MATRIX_C_A: return obs.aug.c_a;
    case DQO_MATRIX_R_O: return obs.aug.r_o;
    case DQO_MATRIX_A_O: return obs.aug.a_o;
    case DQO_MATRIX_B_O: return obs.aug.b_o;
    case DQO_MATRIX_REDUCED: return dqo::build_reduced(obs.chain).matrix;
    case DQO_MATRIX_THETA: return obs.aug.theta.matrix();
  }
  throw dqo::Error(dqo::ErrorCode::InvalidParameter, "unknown matrix kind " + std::to_string(static_cast<int>(kind)));
}

template <typename Run>
dqo_status run_experiment(const dqo_config* config, char** report_json, Run&& run) {
  return guarded([&] {
    if (!config) return fail(DQO_ERR_NULL_ARGUMENT, "config is NULL");
    const dqo::RunReport report = run(config->value);
    if (report_json) *report_json = duplicate(report.to_json());
    if (const auto* failed = report.first_failure()) {
      return fail(status_for(failed->failure), "check '" + failed->name + "' failed: value " +
                                                   std::to_string(failed->value) + " vs limit " +
                                                   std::to_string(failed->limit));
    }
    return DQO_OK;
  });
}

}  // namespace

extern "C" {

const char* dqo_version(void) { return "0.1.0"; }

const char* dqo_status_name(dqo_status status) {
  switch (status) {
    case DQO_OK: return "ok";
    case DQO_ERR_NULL_ARGUMENT: return "null argument";
    case DQO_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case DQO_ERR_INTERNAL: return "internal error";
    default: break;
  }
  for (int c = 0; c <= static_cast<int>(dqo::ErrorCode::OracleDisagreement); ++c) {
    const auto code = static_cast<dqo::ErrorCode>(c);
    if (status_for(code) == status) return dqo::to_string(code).data();
  }
  return "unknown status";
}

const char* dqo_last_error(void) { return last_error().c_str(); }

void dqo_set_log_level(int level) {
  if (level < 0) level = 0;
  if (level > 3) level = 3;
  dqo::log::set_level(static_cast<dqo::log::Level>(level));
}

void dqo_string_free(char* text) { std::free(text); }

dqo_status dqo_config_parse(const char* json_text, dqo_config** out) {
  return guarded([&] {
    if (!json_text || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_config_parse");
    *out = new dqo_config{dqo::parse_config(json_text)};
    return DQO_OK;
  });
}

dqo_status dqo_config_load(const char* path, dqo_config** out) {
  return guarded([&] {
    if (!path || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_config_load");
    *out = new dqo_config{dqo::load_config(path)};
    return DQO_OK;
  });
}

void dqo_config_free(dqo_config* config) { delete config; }

dqo_status dqo_config_set_output_dir(dqo_config* config, const char* dir) {
  return guarded([&] {
    if (!config || !dir) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_config_set_output_dir");
    config->value.output_dir = dir;
    return DQO_OK;
  });
}

dqo_status dqo_config_set_horizon(dqo_config* config, double horizon) {
  return guarded([&] {
    if (!config) return fail(DQO_ERR_NULL_ARGUMENT, "config is NULL");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) return fail(DQO_ERR_VALIDATION, "horizon must be positive");
    config->value.horizon = horizon;
    return DQO_OK;
  });
}

dqo_status dqo_config_set_step(dqo_config* config, double step) {
  return guarded([&] {
    if (!config) return fail(DQO_ERR_NULL_ARGUMENT, "config is NULL");
    if (!std::isfinite(step)) return fail(DQO_ERR_VALIDATION, "step must be finite");
    if (step <= 0.0) {
      config->value.step.reset();
    } else {
      config->value.step = step;
    }
    return DQO_OK;
  });
}

dqo_status dqo_config_n_elements(const dqo_config* config, size_t* out) {
  if (!config || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_config_n_elements");
  *out = config->value.n_elements;
  return DQO_OK;
}

dqo_status dqo_run_build(const dqo_config* config, char** report_json) {
  return run_experiment(config, report_json, dqo::run_build);
}

dqo_status dqo_run_simulate(const dqo_config* config, char** report_json) {
  return run_experiment(config, report_json, dqo::run_simulate);
}

dqo_status dqo_run_timeavg(const dqo_config* config, char** report_json) {
  return run_experiment(config, report_json, dqo::run_timeavg);
}

dqo_status dqo_run_check(const dqo_config* config, char** report_json) {
  return run_experiment(config, report_json, dqo::run_check);
}

dqo_status dqo_observer_create(const double c_p[2], const double* mu_tilde, size_t n, dqo_observer** out) {
  return guarded([&] {
    if (!c_p || !out || (n > 0 && !mu_tilde)) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_observer_create");
    const dqo::PlantSpec plant = dqo::make_static_plant(Eigen::RowVector2d(c_p[0], c_p[1]));
    dqo::ChainObserverParams chain = dqo::build_chain(plant, std::vector<double>(mu_tilde, mu_tilde + n));
    dqo::AugmentedSystem aug = dqo::assemble_augmented(plant, chain);
    *out = new dqo_observer{dqo::Observer{plant, std::move(chain), std::move(aug)}};
    return DQO_OK;
  });
}

dqo_status dqo_observer_from_config(const dqo_config* config, dqo_observer** out) {
  return guarded([&] {
    if (!config || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_observer_from_config");
    *out = new dqo_observer{dqo::build_observer(config->value)};
    return DQO_OK;
  });
}

void dqo_observer_free(dqo_observer* observer) { delete observer; }

dqo_status dqo_observer_n_elements(const dqo_observer* observer, size_t* out) {
  if (!observer || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_observer_n_elements");
  *out = observer->value.chain.n_elements;
  return DQO_OK;
}

dqo_status dqo_observer_matrix_shape(const dqo_observer* observer, dqo_matrix_kind kind, size_t* rows, size_t* cols) {
  return guarded([&] {
    if (!observer || !rows || !cols) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_observer_matrix_shape");
    const dqo::Matrix m = matrix_for(observer->value, kind);
    *rows = static_cast<size_t>(m.rows());
    *cols = static_cast<size_t>(m.cols());
    return DQO_OK;
  });
}

dqo_status dqo_observer_copy_matrix(const dqo_observer* observer, dqo_matrix_kind kind, double* out,
                                    size_t capacity) {
  return guarded([&] {
    if (!observer) return fail(DQO_ERR_NULL_ARGUMENT, "observer is NULL");
    return copy_out(matrix_for(observer->value, kind), out, capacity);
  });
}

dqo_status dqo_observer_frequencies(const dqo_observer* observer, double* out, size_t capacity) {
  if (!observer || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_observer_frequencies");
  const auto& omega = observer->value.chain.omega;
  if (capacity < omega.size()) return fail(DQO_ERR_BUFFER_TOO_SMALL, "frequency buffer too small");
  std::copy(omega.begin(), omega.end(), out);
  return DQO_OK;
}

dqo_status dqo_observer_certificate(const dqo_observer* observer, dqo_certificate* out) {
  return guarded([&] {
    if (!observer || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_observer_certificate");
    const auto cert = dqo::certify_positive_definite(observer->value.aug.r_o);
    *out = dqo_certificate{cert.lambda_min, cert.lambda_max, cert.exp_norm_bound};
    return DQO_OK;
  });
}

dqo_status dqo_observer_residuals(const dqo_observer* observer, double* realizability, double* fixed_point) {
  return guarded([&] {
    if (!observer) return fail(DQO_ERR_NULL_ARGUMENT, "observer is NULL");
    const auto& obs = observer->value;
    if (realizability) *realizability = dqo::realizability_residual(obs.aug.a_a, obs.aug.theta);
    if (fixed_point) *fixed_point = dqo::check_fixed_point(obs.aug, obs.chain);
    return DQO_OK;
  });
}

dqo_status dqo_observer_propagator(const dqo_observer* observer, double t, double* out, size_t capacity) {
  return guarded([&] {
    if (!observer) return fail(DQO_ERR_NULL_ARGUMENT, "observer is NULL");
    return copy_out(dqo::propagator(observer->value.aug.a_a, t), out, capacity);
  });
}

dqo_status dqo_observer_time_average(const dqo_observer* observer, double horizon, double* out, size_t capacity) {
  return guarded([&] {
    if (!observer) return fail(DQO_ERR_NULL_ARGUMENT, "observer is NULL");
    return copy_out(dqo::time_average_exact(observer->value.aug, horizon).averaged_rows, out, capacity);
  });
}

dqo_status dqo_observer_consensus_error(const dqo_observer* observer, double horizon, double* out) {
  return guarded([&] {
    if (!observer || !out) return fail(DQO_ERR_NULL_ARGUMENT, "NULL argument to dqo_observer_consensus_error");
    *out = dqo::consensus_error(dqo::time_average_exact(observer->value.aug, horizon));
    return DQO_OK;
  });
}

}  // extern "C"
