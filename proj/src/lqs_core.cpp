#include "dqo/lqs_core.hpp"

#include <string>

#include <Eigen/Eigenvalues>

#include "dqo/error.hpp"

namespace dqo {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidDimension,
                std::string(what) + " must be square, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

void require_matching(const Matrix& m, std::size_t dimension, const char* what) {
  require_square(m, what);
  if (static_cast<std::size_t>(m.rows()) != dimension) {
    throw Error(ErrorCode::InvalidDimension, std::string(what) + " has dimension " + std::to_string(m.rows()) +
                                                 ", expected " + std::to_string(dimension));
  }
}

}  // namespace

Matrix2 symplectic_unit() {
  Matrix2 j;
  j << 0.0, 1.0, -1.0, 0.0;
  return j;
}

SymplecticForm::SymplecticForm(std::size_t n_modes) : n_modes_(n_modes) {
  if (n_modes == 0) throw Error(ErrorCode::InvalidDimension, "symplectic form needs at least one mode");
  const auto n = static_cast<Eigen::Index>(2 * n_modes);
  matrix_ = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; k += 2) matrix_.block<2, 2>(k, k) = symplectic_unit();
}

SymplecticForm make_symplectic(std::size_t n_modes) { return SymplecticForm(n_modes); }

HamiltonianMatrix::HamiltonianMatrix(Matrix matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "Hamiltonian matrix");
  if (matrix_.rows() == 0 || matrix_.rows() % 2 != 0) {
    throw Error(ErrorCode::InvalidDimension,
                "Hamiltonian matrix needs positive even dimension, got " + std::to_string(matrix_.rows()));
  }
  if (!matrix_.allFinite()) throw Error(ErrorCode::InvalidInput, "Hamiltonian matrix has non-finite entries");
  if (matrix_ != matrix_.transpose()) throw Error(ErrorCode::InvalidParameter, "Hamiltonian matrix is not symmetric");
}

Matrix dynamics_from_hamiltonian(const HamiltonianMatrix& r, const SymplecticForm& theta) {
  require_matching(r.matrix(), theta.dimension(), "Hamiltonian matrix");
  return 2.0 * theta.matrix() * r.matrix();
}

LinearQuantumSystem make_system(HamiltonianMatrix r, Matrix output) {
  SymplecticForm theta(r.n_modes());
  if (static_cast<std::size_t>(output.cols()) != r.dimension()) {
    throw Error(ErrorCode::InvalidDimension, "output map has " + std::to_string(output.cols()) +
                                                 " columns, state dimension is " + std::to_string(r.dimension()));
  }
  Matrix a = dynamics_from_hamiltonian(r, theta);
  return LinearQuantumSystem{std::move(r), std::move(theta), std::move(a), std::move(output)};
}

double realizability_residual(const Matrix& a, const SymplecticForm& theta) {
  require_matching(a, theta.dimension(), "dynamics matrix");
  const Matrix& t = theta.matrix();
  return (a * t + t * a.transpose()).norm();
}

double hamiltonian_drift(const HamiltonianMatrix& r, const Matrix& phi) {
  require_matching(phi, r.dimension(), "propagator");
  return (phi.transpose() * r.matrix() * phi - r.matrix()).norm();
}

double symplectic_drift(const Matrix& phi, const SymplecticForm& theta) {
  require_matching(phi, theta.dimension(), "propagator");
  const Matrix& t = theta.matrix();
  return (phi * t * phi.transpose() - t).norm();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double imaginary_spectrum_residual(const Matrix& a) {
  require_square(a, "dynamics matrix");
  const double scale = spectral_norm(a);
  if (scale == 0.0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigenvalue iteration did not converge");
  return solver.eigenvalues().real().cwiseAbs().maxCoeff() / scale;
}

}  // namespace dqo
