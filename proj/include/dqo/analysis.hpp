#pragma once

// Positive-definiteness certificates for the observer Hamiltonian and the
// spectral bounds that make its time averages converge.

#include <span>
#include <vector>

#include "dqo/lqs_core.hpp"
#include "dqo/observer_builder.hpp"
#include "dqo/types.hpp"

namespace dqo {

/// N x N symmetric tridiagonal comparison matrix: diagonal omega_1..omega_N,
/// off-diagonal -mu_tilde_2..-mu_tilde_N. Its positive definiteness implies
/// that of the 2N x 2N observer block R_o.
struct ReducedMatrix {
  Matrix matrix;
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;
};

ReducedMatrix build_reduced(const ChainObserverParams& chain);

/// reduced = rank_one_part + laplacian_part, where rank_one_part =
/// diag(mu_tilde_1, 0, ..., 0) and laplacian_part is the weighted chain
/// Laplacian (zero row sums).
struct LaplacianSplit {
  Matrix rank_one_part;
  Matrix laplacian_part;
};

LaplacianSplit laplacian_split(const ReducedMatrix& rm);

/// Kernel diagnostics for a graph Laplacian: smallest two eigenvalues, the
/// largest row-sum magnitude, and how far the lowest eigenvector is from
/// (1, ..., 1)/sqrt(N) (sign-insensitive, 0 for N = 1).
struct LaplacianKernel {
  double lambda_min = 0.0;
  double lambda_second = 0.0;  // +inf for N = 1
  double lambda_max = 0.0;
  double max_row_sum = 0.0;
  double ones_alignment_error = 0.0;
};

LaplacianKernel inspect_laplacian(const Matrix& laplacian);

struct SpectralCertificate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double exp_norm_bound = 1.0;  // sqrt(lambda_max / lambda_min)
};

/// Relative threshold below which lambda_min is not accepted as positive.
inline constexpr double kDefiniteThreshold = 1e-10;

/// Full symmetric eigendecomposition. Throws NotPositiveDefinite (value =
/// lambda_min) unless lambda_min > kDefiniteThreshold * lambda_max.
SpectralCertificate certify_positive_definite(const Matrix& r);

struct ExpBoundCheck {
  double max_norm = 0.0;  // max over samples of ||e^{2 Theta R t}||_2
  double bound = 0.0;
};

/// Evaluates ||e^{2 Theta R t}||_2 at each sample time. Throws BoundViolated if
/// any exceeds sqrt(lambda_max/lambda_min) (1 + 1e-9), InvalidParameter for
/// negative times.
ExpBoundCheck verify_exp_bound(const Matrix& r, const SymplecticForm& theta, std::span<const double> sample_times);

/// x_o^T R_o x_o - xc^T Rtilde xc where xc stacks the 2-norms of consecutive
/// 2-blocks of x_o. Nonnegative by Cauchy-Schwarz.
double comparison_gap(const Matrix& r_o, const Matrix& reduced, const Vector& x_o);

/// Upper bound on consensus_error(T) implied by the energy argument:
///   ||alpha|| ||M||_2 (kappa + 1) ||R_o^{-1} Theta^{-1}||_2 / (2T)
/// with kappa = sqrt(lambda_max/lambda_min) and M the map from x_a(0) to the
/// shifted observer state x_o(0) - (alpha; ...; alpha) z_p / ||alpha||^2.
double consensus_error_bound(const AugmentedSystem& aug, const ChainObserverParams& chain, double horizon);

/// Spectrum of A_a measured through its known block structure. With
/// l = (alpha^T, 0) and k = (J alpha, 0), l A_a = 0 and A_a k = 0 while l k = 0,
/// so the zero eigenvalue is a 2x2 Jordan block and spec(A_a) = {0, 0} u spec(A_o).
/// A general eigensolver resolves a defective eigenvalue only to about
/// sqrt(eps) ||A_a||; here the block is deflated exactly instead.
struct AugmentedSpectrum {
  double left_null_residual = 0.0;   // ||l A_a|| / (||l|| ||A_a||_2)
  double right_null_residual = 0.0;  // ||A_a k|| / (||k|| ||A_a||_2)
  double observer_residual = 0.0;    // max |Re lambda(A_o)| / ||A_a||_2
  double unstructured_residual = 0.0; // imaginary_spectrum_residual(A_a), for reference

  /// Largest of the three structured residuals.
  double residual() const noexcept;
};

AugmentedSpectrum augmented_spectrum(const AugmentedSystem& aug);

}  // namespace dqo
