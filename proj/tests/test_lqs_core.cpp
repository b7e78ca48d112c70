#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dqo/error.hpp"
#include "dqo/lqs_core.hpp"
#include "dqo/sim_engine.hpp"
#include "oracles.hpp"

using namespace dqo;

TEST_CASE("symplectic form is block diagonal J") {
  const SymplecticForm theta(3);
  CHECK(theta.dimension() == 6);
  CHECK((theta.matrix() - oracle::theta(3)).norm() == 0.0);
  CHECK((theta.matrix() * theta.matrix().transpose() - Matrix::Identity(6, 6)).norm() == 0.0);
  CHECK_THROWS_AS(SymplecticForm(0), Error);
}

TEST_CASE("Hamiltonian validation") {
  CHECK_THROWS_AS(HamiltonianMatrix(Matrix::Identity(3, 3)), Error);
  CHECK_THROWS_AS(HamiltonianMatrix(Matrix(0, 0)), Error);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1e-15;
  try {
    HamiltonianMatrix h(asym);
    FAIL("asymmetric matrix accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameter);
  }
  Matrix nan = Matrix::Identity(2, 2);
  nan(1, 1) = std::nan("");
  CHECK_THROWS_AS(HamiltonianMatrix{nan}, Error);
}

TEST_CASE("single oscillator rotates and conserves everything") {
  // R = I gives A = 2J, so Phi(t) is a rotation by 2t.
  const SymplecticForm theta(1);
  const HamiltonianMatrix r(Matrix::Identity(2, 2));
  const Matrix a = dynamics_from_hamiltonian(r, theta);
  CHECK(realizability_residual(a, theta) == 0.0);

  const double t = 0.7;
  const Matrix phi = propagator(a, t);
  Matrix expected(2, 2);
  expected << std::cos(2 * t), std::sin(2 * t), -std::sin(2 * t), std::cos(2 * t);
  CHECK((phi - expected).norm() < 1e-15);
  CHECK(symplectic_drift(phi, theta) < 1e-15);
  CHECK(hamiltonian_drift(r, phi) < 1e-15);
  CHECK(imaginary_spectrum_residual(a) < 1e-15);

  // Over a quarter period of 2J the propagator is J itself.
  CHECK((propagator(a, std::numbers::pi / 4) - oracle::theta(1)).norm() < 1e-15);
}

TEST_CASE("realizability detects a non-Hamiltonian drift") {
  const SymplecticForm theta(2);
  Matrix a = Matrix::Identity(4, 4);
  CHECK(realizability_residual(a, theta) > 1.0);

  Matrix r = Matrix::Random(4, 4);
  r = (r + r.transpose()).eval();
  CHECK(realizability_residual(dynamics_from_hamiltonian(HamiltonianMatrix(r), theta), theta) < 1e-14);
}

TEST_CASE("make_system checks the output map") {
  CHECK_THROWS_AS(make_system(HamiltonianMatrix(Matrix::Identity(4, 4)), Matrix::Zero(1, 3)), Error);
  const auto sys = make_system(HamiltonianMatrix(Matrix::Identity(4, 4)), Matrix::Ones(2, 4));
  CHECK(sys.theta.n_modes() == 2);
  CHECK(sys.dynamics.rows() == 4);
}

TEST_CASE("spectral norm matches the symmetric eigen oracle") {
  Matrix m(3, 3);
  m << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  CHECK(spectral_norm(m) == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("imaginary spectrum residual flags damping") {
  Matrix a(2, 2);
  a << -0.1, 1, -1, -0.1;
  CHECK(imaginary_spectrum_residual(a) == doctest::Approx(0.1 / std::hypot(0.1, 1.0)).epsilon(1e-12));
  CHECK(imaginary_spectrum_residual(Matrix::Zero(4, 4)) == 0.0);
}
