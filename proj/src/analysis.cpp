#include "dqo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "dqo/error.hpp"
#include "dqo/sim_engine.hpp"

namespace dqo {

ReducedMatrix build_reduced(const ChainObserverParams& chain) {
  const std::size_t n = chain.n_elements;
  if (n == 0 || chain.omega.size() != n || chain.mu_tilde.size() != n) {
    throw Error(ErrorCode::InvalidDimension, "inconsistent chain parameters");
  }
  ReducedMatrix rm;
  rm.diagonal = chain.omega;
  rm.off_diagonal.assign(chain.mu_tilde.begin() + 1, chain.mu_tilde.end());
  for (auto& v : rm.off_diagonal) v = -v;

  const auto size = static_cast<Eigen::Index>(n);
  rm.matrix = Matrix::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) rm.matrix(i, i) = rm.diagonal[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < size; ++i) {
    rm.matrix(i, i + 1) = rm.off_diagonal[static_cast<std::size_t>(i)];
    rm.matrix(i + 1, i) = rm.off_diagonal[static_cast<std::size_t>(i)];
  }
  return rm;
}

LaplacianSplit laplacian_split(const ReducedMatrix& rm) {
  const Eigen::Index n = rm.matrix.rows();
  if (n == 0) throw Error(ErrorCode::InvalidDimension, "empty reduced matrix");
  // mu_tilde_1 is whatever the first row carries beyond the Laplacian part:
  // omega_1 - mu_tilde_2, or omega_1 itself for a single element.
  const double mu_1 = n == 1 ? rm.matrix(0, 0) : rm.matrix(0, 0) + rm.matrix(0, 1);

  LaplacianSplit split{Matrix::Zero(n, n), rm.matrix};
  split.rank_one_part(0, 0) = mu_1;
  split.laplacian_part(0, 0) -= mu_1;
  return split;
}

LaplacianKernel inspect_laplacian(const Matrix& laplacian) {
  const Eigen::Index n = laplacian.rows();
  if (n == 0 || laplacian.cols() != n) throw Error(ErrorCode::InvalidDimension, "Laplacian must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "symmetric eigensolver failed");

  LaplacianKernel k;
  const Vector& values = solver.eigenvalues();
  k.lambda_min = values(0);
  k.lambda_second = n > 1 ? values(1) : std::numeric_limits<double>::infinity();
  k.lambda_max = values(n - 1);
  k.max_row_sum = laplacian.rowwise().sum().cwiseAbs().maxCoeff();
  // Norm of the part of the lowest eigenvector orthogonal to (1, ..., 1).
  const Vector v = solver.eigenvectors().col(0);
  k.ones_alignment_error = (v.array() - v.mean()).matrix().norm();
  return k;
}

SpectralCertificate certify_positive_definite(const Matrix& r) {
  if (r.rows() == 0 || r.rows() != r.cols()) throw Error(ErrorCode::InvalidDimension, "matrix must be square");
  if (!r.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
  if (!r.isApprox(r.transpose(), 1e-14)) throw Error(ErrorCode::InvalidParameter, "matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(r, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "symmetric eigensolver failed");
  const Vector& values = solver.eigenvalues();
  SpectralCertificate cert;
  cert.lambda_min = values(0);
  cert.lambda_max = values(values.size() - 1);
  if (!(cert.lambda_min > kDefiniteThreshold * cert.lambda_max) || !(cert.lambda_max > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "lambda_min = " + std::to_string(cert.lambda_min) + ", lambda_max = " + std::to_string(cert.lambda_max),
                cert.lambda_min);
  }
  cert.exp_norm_bound = std::sqrt(cert.lambda_max / cert.lambda_min);
  return cert;
}

ExpBoundCheck verify_exp_bound(const Matrix& r, const SymplecticForm& theta, std::span<const double> sample_times) {
  const SpectralCertificate cert = certify_positive_definite(r);
  const Matrix a = dynamics_from_hamiltonian(HamiltonianMatrix(r), theta);
  ExpBoundCheck check{0.0, cert.exp_norm_bound};
  const double limit = cert.exp_norm_bound * (1.0 + 1e-9);
  for (double t : sample_times) {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidParameter, "sample times must be nonnegative", t);
    const double norm = spectral_norm(propagator(a, t));
    check.max_norm = std::max(check.max_norm, norm);
    if (norm > limit) {
      throw Error(ErrorCode::BoundViolated,
                  "||exp(2 Theta R t)||_2 = " + std::to_string(norm) + " exceeds " + std::to_string(limit) +
                      " at t = " + std::to_string(t),
                  norm);
    }
  }
  return check;
}

double comparison_gap(const Matrix& r_o, const Matrix& reduced, const Vector& x_o) {
  const Eigen::Index n = reduced.rows();
  if (r_o.rows() != 2 * n || x_o.size() != 2 * n) {
    throw Error(ErrorCode::InvalidDimension, "comparison needs R_o of size 2N and a 2N-vector");
  }
  Vector block_norms(n);
  for (Eigen::Index i = 0; i < n; ++i) block_norms(i) = x_o.segment<2>(2 * i).norm();
  return x_o.dot(r_o * x_o) - block_norms.dot(reduced * block_norms);
}

double consensus_error_bound(const AugmentedSystem& aug, const ChainObserverParams& chain, double horizon) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidParameter, "horizon must be positive", horizon);
  const SpectralCertificate cert = certify_positive_definite(aug.r_o);
  const auto n = static_cast<Eigen::Index>(chain.n_elements);

  // M = [-(alpha; ...; alpha) alpha^T / ||alpha||^2, I_{2N}]
  const ConsensusTarget target = consensus_target(chain);
  Matrix shift(2 * n, 2 * n + 2);
  shift.leftCols<2>() = -target.alpha_stack * chain.alpha.transpose();
  shift.rightCols(2 * n) = Matrix::Identity(2 * n, 2 * n);

  // Theta is orthogonal, so ||R_o^{-1} Theta^{-1}||_2 = ||R_o^{-1}||_2 = 1 / lambda_min.
  const double inverse_norm = 1.0 / cert.lambda_min;
  return chain.alpha.norm() * spectral_norm(shift) * (cert.exp_norm_bound + 1.0) * inverse_norm / (2.0 * horizon);
}

double AugmentedSpectrum::residual() const noexcept {
  return std::max({left_null_residual, right_null_residual, observer_residual});
}

AugmentedSpectrum augmented_spectrum(const AugmentedSystem& aug) {
  const Eigen::Index dim = aug.a_a.rows();
  if (dim < 4 || aug.a_o.rows() != dim - 2 || aug.c_a.cols() != dim) {
    throw Error(ErrorCode::InvalidDimension, "augmented system blocks do not match");
  }
  AugmentedSpectrum s;
  const double scale = spectral_norm(aug.a_a);
  if (scale == 0.0) return s;

  const Vector2 alpha = aug.c_a.row(0).head<2>().transpose();
  Vector left = Vector::Zero(dim);
  left.head<2>() = alpha;
  Vector right = Vector::Zero(dim);
  right.head<2>() = symplectic_unit() * alpha;

  s.left_null_residual = (aug.a_a.transpose() * left).norm() / (left.norm() * scale);
  s.right_null_residual = (aug.a_a * right).norm() / (right.norm() * scale);
  s.observer_residual = imaginary_spectrum_residual(aug.a_o) * spectral_norm(aug.a_o) / scale;
  s.unstructured_residual = imaginary_spectrum_residual(aug.a_a);
  return s;
}

}  // namespace dqo
