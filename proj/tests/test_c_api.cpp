#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "dqo/dqo.h"

namespace {

const char* const kChain = R"({"n_elements": 5, "scheme": "odd-harmonics", "omega0": 1.0, "c_p": [1, 0]})";

struct ConfigHandle {
  dqo_config* p = nullptr;
  ~ConfigHandle() { dqo_config_free(p); }
};

struct ObserverHandle {
  dqo_observer* p = nullptr;
  ~ObserverHandle() { dqo_observer_free(p); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(dqo_version()) == "0.1.0");
  CHECK(std::string(dqo_status_name(DQO_OK)) == "ok");
  CHECK(std::string(dqo_status_name(DQO_ERR_NOT_POSITIVE_DEFINITE)) == "not positive definite");
  CHECK(std::string(dqo_status_name(static_cast<dqo_status>(999))) == "unknown status");
}

TEST_CASE("config errors come back as status codes") {
  dqo_config* cfg = nullptr;
  CHECK(dqo_config_parse("{", &cfg) == DQO_ERR_PARSE);
  CHECK(cfg == nullptr);
  CHECK(std::strlen(dqo_last_error()) > 0);
  CHECK(dqo_config_parse(R"({"n_elements": 5, "scheme": "uniform", "omega0": 1, "c_p": [0, 0]})", &cfg) ==
        DQO_ERR_DEGENERATE_OUTPUT);
  CHECK(dqo_config_parse(R"({"n_elements": 3, "scheme": "all-harmonics", "omega0": 1, "c_p": [1, 0]})", &cfg) ==
        DQO_ERR_VALIDATION);
  CHECK(dqo_config_parse(nullptr, &cfg) == DQO_ERR_NULL_ARGUMENT);
  CHECK(dqo_config_load("/nonexistent.json", &cfg) == DQO_ERR_IO);
}

TEST_CASE("observer handle exposes matrices") {
  const double c_p[2] = {1.0, 0.0};
  const double mu[5] = {1, 2, 3, 4, 5};
  ObserverHandle obs;
  REQUIRE(dqo_observer_create(c_p, mu, 5, &obs.p) == DQO_OK);

  size_t n = 0;
  CHECK(dqo_observer_n_elements(obs.p, &n) == DQO_OK);
  CHECK(n == 5);

  size_t rows = 0, cols = 0;
  REQUIRE(dqo_observer_matrix_shape(obs.p, DQO_MATRIX_R_A, &rows, &cols) == DQO_OK);
  CHECK(rows == 12);
  CHECK(cols == 12);
  std::vector<double> r(rows * cols);
  CHECK(dqo_observer_copy_matrix(obs.p, DQO_MATRIX_R_A, r.data(), r.size() - 1) == DQO_ERR_BUFFER_TOO_SMALL);
  REQUIRE(dqo_observer_copy_matrix(obs.p, DQO_MATRIX_R_A, r.data(), r.size()) == DQO_OK);
  CHECK(r[2 * 12 + 2] == 3.0);   // omega_1
  CHECK(r[0 * 12 + 2] == -1.0);  // -mu_1 alpha alpha^T
  CHECK(r[2 * 12 + 0] == -1.0);

  REQUIRE(dqo_observer_matrix_shape(obs.p, DQO_MATRIX_B_O, &rows, &cols) == DQO_OK);
  CHECK(rows == 10);
  CHECK(cols == 1);
  REQUIRE(dqo_observer_matrix_shape(obs.p, DQO_MATRIX_REDUCED, &rows, &cols) == DQO_OK);
  CHECK(rows == 5);
  CHECK(dqo_observer_matrix_shape(obs.p, static_cast<dqo_matrix_kind>(42), &rows, &cols) == DQO_ERR_INVALID_PARAMETER);

  double omega[5];
  REQUIRE(dqo_observer_frequencies(obs.p, omega, 5) == DQO_OK);
  CHECK(omega[0] == 3.0);
  CHECK(omega[4] == 5.0);

  dqo_certificate cert{};
  REQUIRE(dqo_observer_certificate(obs.p, &cert) == DQO_OK);
  CHECK(cert.lambda_min > 0.129);
  CHECK(cert.lambda_min < 0.130);
  CHECK(cert.exp_norm_bound == doctest::Approx(std::sqrt(cert.lambda_max / cert.lambda_min)));

  double realizability = -1, fixed_point = -1;
  REQUIRE(dqo_observer_residuals(obs.p, &realizability, &fixed_point) == DQO_OK);
  CHECK(realizability <= 1e-12);
  CHECK(fixed_point <= 1e-12);
}

TEST_CASE("observer propagator and averages") {
  const double c_p[2] = {1.0, 0.0};
  const double mu[3] = {1, 1, 1};
  ObserverHandle obs;
  REQUIRE(dqo_observer_create(c_p, mu, 3, &obs.p) == DQO_OK);

  std::vector<double> phi(64);
  REQUIRE(dqo_observer_propagator(obs.p, 0.0, phi.data(), phi.size()) == DQO_OK);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(phi[i * 8 + j] == (i == j ? 1.0 : 0.0));

  std::vector<double> avg(4 * 8);
  REQUIRE(dqo_observer_time_average(obs.p, 10.0, avg.data(), avg.size()) == DQO_OK);
  CHECK(avg[0] == doctest::Approx(1.0));

  double e10 = 0, e1000 = 0;
  REQUIRE(dqo_observer_consensus_error(obs.p, 10.0, &e10) == DQO_OK);
  REQUIRE(dqo_observer_consensus_error(obs.p, 1000.0, &e1000) == DQO_OK);
  CHECK(e1000 < e10);
  CHECK(dqo_observer_consensus_error(obs.p, -1.0, &e10) == DQO_ERR_INVALID_PARAMETER);
}

TEST_CASE("observer construction errors") {
  const double zero[2] = {0.0, 0.0};
  const double mu[2] = {1.0, 2.0};
  dqo_observer* obs = nullptr;
  CHECK(dqo_observer_create(zero, mu, 2, &obs) == DQO_ERR_DEGENERATE_OUTPUT);
  const double c_p[2] = {1.0, 0.0};
  const double bad[2] = {1.0, -2.0};
  CHECK(dqo_observer_create(c_p, bad, 2, &obs) == DQO_ERR_INVALID_PARAMETER);
  CHECK(dqo_observer_create(c_p, mu, 0, &obs) == DQO_ERR_INVALID_DIMENSION);
  CHECK(obs == nullptr);
}

TEST_CASE("runs through the C interface") {
  ConfigHandle cfg;
  REQUIRE(dqo_config_parse(kChain, &cfg.p) == DQO_OK);
  size_t n = 0;
  CHECK(dqo_config_n_elements(cfg.p, &n) == DQO_OK);
  CHECK(n == 5);

  const auto dir = std::filesystem::temp_directory_path() / "dqo_capi_run";
  std::filesystem::remove_all(dir);
  REQUIRE(dqo_config_set_output_dir(cfg.p, dir.c_str()) == DQO_OK);
  REQUIRE(dqo_config_set_horizon(cfg.p, 20.0) == DQO_OK);
  CHECK(dqo_config_set_horizon(cfg.p, -1.0) == DQO_ERR_VALIDATION);

  char* report = nullptr;
  REQUIRE(dqo_run_check(cfg.p, &report) == DQO_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("\"passed\": true") != std::string::npos);
  dqo_string_free(report);
  CHECK(std::filesystem::exists(dir / "check_report.json"));

  REQUIRE(dqo_config_set_step(cfg.p, 0.05) == DQO_OK);
  CHECK(dqo_run_timeavg(cfg.p, nullptr) == DQO_ERR_STEP_TOO_COARSE);
  REQUIRE(dqo_config_set_step(cfg.p, 0.0) == DQO_OK);
  CHECK(dqo_run_build(cfg.p, nullptr) == DQO_OK);
  CHECK(dqo_run_build(nullptr, nullptr) == DQO_ERR_NULL_ARGUMENT);
}
