#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dqo/analysis.hpp"
#include "dqo/error.hpp"
#include "dqo/sim_engine.hpp"
#include "oracles.hpp"

using namespace dqo;

namespace {

struct Built {
  ChainObserverParams chain;
  AugmentedSystem aug;
};

Built build(const std::vector<double>& mu_tilde, double c1 = 1.0, double c2 = 0.0) {
  const auto plant = make_static_plant(Eigen::RowVector2d(c1, c2));
  auto chain = build_chain(plant, mu_tilde);
  auto aug = assemble_augmented(plant, chain);
  return {std::move(chain), std::move(aug)};
}

std::vector<std::vector<double>> all_schedules() {
  std::vector<std::vector<double>> out;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (auto v : {SchemeVariant::Uniform, SchemeVariant::OddHarmonics, SchemeVariant::AllHarmonics}) {
      if (v == SchemeVariant::AllHarmonics && n % 2 == 1) continue;
      out.push_back(make_mu_schedule({v, 1.0, 0}, n));
    }
    for (std::uint64_t seed = 1; seed <= 50; ++seed) out.push_back(make_mu_schedule({SchemeVariant::Random, 1.0, seed}, n));
  }
  return out;
}

}  // namespace

TEST_CASE("reduced matrix for the five element odd chain") {
  const auto b = build({1, 2, 3, 4, 5});
  const auto rm = build_reduced(b.chain);
  CHECK(rm.diagonal == std::vector<double>{3, 5, 7, 9, 5});
  CHECK(rm.off_diagonal == std::vector<double>{-2, -3, -4, -5});

  // R_o is R_tilde (x) I_2 when alpha is a coordinate direction.
  Matrix kron = Matrix::Zero(10, 10);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) kron.block<2, 2>(2 * i, 2 * j) = rm.matrix(i, j) * Matrix2::Identity();
  kron(1, 3) = kron(3, 1) = kron(3, 5) = kron(5, 3) = kron(5, 7) = kron(7, 5) = kron(7, 9) = kron(9, 7) = 0.0;
  CHECK((b.aug.r_o - kron).norm() == 0.0);
}

TEST_CASE("certificate agrees with a Sturm bisection oracle") {
  for (const auto& mu : all_schedules()) {
    const auto b = build(mu);
    const auto rm = build_reduced(b.chain);
    const double lo = oracle::tridiagonal_eigenvalue(rm.diagonal, rm.off_diagonal, 0);
    const double hi = oracle::tridiagonal_eigenvalue(rm.diagonal, rm.off_diagonal, static_cast<int>(mu.size()) - 1);
    const auto cert = certify_positive_definite(rm.matrix);
    CHECK(cert.lambda_min == doctest::Approx(lo).epsilon(1e-9));
    CHECK(cert.lambda_max == doctest::Approx(hi).epsilon(1e-12));
    CHECK(lo > 0.0);
  }
}

TEST_CASE("five element certificate values") {
  const auto b = build({1, 2, 3, 4, 5});
  const auto cert = certify_positive_definite(b.aug.r_o);
  const auto rm = build_reduced(b.chain);
  const double lo = oracle::tridiagonal_eigenvalue(rm.diagonal, rm.off_diagonal, 0);
  const double hi = oracle::tridiagonal_eigenvalue(rm.diagonal, rm.off_diagonal, 4);
  CHECK(cert.lambda_min == doctest::Approx(lo).epsilon(1e-12));
  CHECK(cert.lambda_max == doctest::Approx(hi).epsilon(1e-12));
  CHECK(cert.exp_norm_bound == doctest::Approx(std::sqrt(hi / lo)).epsilon(1e-12));
}

TEST_CASE("Laplacian split") {
  for (const auto& mu : all_schedules()) {
    const auto b = build(mu);
    const auto rm = build_reduced(b.chain);
    const auto split = laplacian_split(rm);
    CHECK((split.rank_one_part + split.laplacian_part - rm.matrix).norm() == 0.0);
    CHECK(split.rank_one_part(0, 0) == doctest::Approx(mu[0]).epsilon(1e-15));
    const auto k = inspect_laplacian(split.laplacian_part);
    const double scale = split.laplacian_part.cwiseAbs().maxCoeff();
    CHECK(k.max_row_sum <= 1e-14 * scale);
    CHECK(std::abs(k.lambda_min) <= 1e-12 * std::max(1.0, k.lambda_max));
    CHECK(k.lambda_second > 0.0);
    CHECK(k.ones_alignment_error < 1e-8);
  }
}

TEST_CASE("a disconnected chain loses the simple kernel") {
  Matrix l = Matrix::Zero(4, 4);
  l << 1, -1, 0, 0, -1, 1, 0, 0, 0, 0, 1, -1, 0, 0, -1, 1;
  const auto k = inspect_laplacian(l);
  CHECK(std::abs(k.lambda_second) < 1e-14);
}

TEST_CASE("indefinite and singular matrices are rejected") {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -0.5;
  try {
    certify_positive_definite(m);
    FAIL("indefinite matrix certified");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    CHECK(e.value() == doctest::Approx(-0.5));
  }
  m(3, 3) = 1e-12;
  CHECK_THROWS_AS(certify_positive_definite(m), Error);
}

TEST_CASE("exponential bound holds and is nearly attained") {
  const auto b = build({1, 2, 3, 4, 5});
  std::vector<double> times;
  for (int k = 0; k < 500; ++k) times.push_back(50.0 * k / 499.0);
  const auto check = verify_exp_bound(b.aug.r_o, SymplecticForm(5), times);
  CHECK(check.max_norm <= check.bound * (1 + 1e-9));
  CHECK(check.max_norm >= 1.0);

  // A non-normal skew example where the bound is tight: R = diag(4, 1/4).
  Matrix r(2, 2);
  r << 4, 0, 0, 0.25;
  const double quarter[] = {std::acos(-1.0) / 4.0};
  const auto tight = verify_exp_bound(r, SymplecticForm(1), quarter);
  CHECK(tight.bound == doctest::Approx(4.0));
  CHECK(tight.max_norm == doctest::Approx(4.0).epsilon(1e-12));
  const double negative[] = {-1.0};
  CHECK_THROWS_AS(verify_exp_bound(r, SymplecticForm(1), negative), Error);
}

TEST_CASE("comparison gap is nonnegative") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  int tested = 0;
  for (const auto& mu : all_schedules()) {
    if (tested++ % 7 != 0) continue;
    const auto b = build(mu, 0.3, -1.1);
    const auto rm = build_reduced(b.chain);
    for (int k = 0; k < 100; ++k) {
      Vector x(b.aug.r_o.rows());
      for (auto& v : x) v = normal(gen);
      x.normalize();
      CHECK(comparison_gap(b.aug.r_o, rm.matrix, x) >= -1e-12);
    }
  }
}

TEST_CASE("comparison gap is zero on aligned blocks") {
  // x_i = s_i alpha-hat: every Cauchy-Schwarz step is an equality.
  const auto b = build({1, 2, 3}, 1.0, 0.0);
  const auto rm = build_reduced(b.chain);
  Vector x(6);
  x << 0.5, 0, 0.7, 0, 0.1, 0;
  CHECK(std::abs(comparison_gap(b.aug.r_o, rm.matrix, x)) < 1e-14);
}

TEST_CASE("analytic consensus bound dominates the measured error") {
  const auto b = build({1, 2, 3, 4, 5});
  for (double t : {10.0, 50.0, 100.0, 400.0, 800.0}) {
    const double err = consensus_error(time_average_exact(b.aug, t));
    CHECK(err <= consensus_error_bound(b.aug, b.chain, t));
  }
}

TEST_CASE("augmented spectrum deflates the plant Jordan block") {
  for (auto [c1, c2] : {std::pair{1.0, 0.0}, std::pair{0.3, -1.1}}) {
    const auto b = build({1, 2, 3, 4, 5}, c1, c2);
    const auto s = augmented_spectrum(b.aug);
    CHECK(s.left_null_residual < 1e-15);
    CHECK(s.right_null_residual < 1e-15);
    CHECK(s.residual() < 1e-14);

    // The unstructured eigenvalues agree with {0, 0} u spec(A_o) up to the
    // sqrt(eps) smearing of the double zero.
    Eigen::EigenSolver<Matrix> full(b.aug.a_a, false);
    Eigen::EigenSolver<Matrix> obs(b.aug.a_o, false);
    std::vector<double> expected{0.0, 0.0}, got;
    for (auto v : obs.eigenvalues()) expected.push_back(v.imag());
    for (auto v : full.eigenvalues()) got.push_back(v.imag());
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-7));
  }
}

TEST_CASE("augmented spectrum flags a damped observer") {
  auto b = build({1, 2, 3});
  b.aug.a_o(0, 0) -= 0.05;
  CHECK(augmented_spectrum(b.aug).observer_residual > 1e-4);
}
