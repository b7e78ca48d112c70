#pragma once

// Closed linear quantum systems at the coefficient level.
//
// A system with n/2 modes evolves as dx/dt = A x with A = 2 Theta R, where R is
// the symmetric Hamiltonian coefficient matrix and Theta = diag(J, ..., J) fixes
// the canonical commutation structure. Only the real coefficient matrices are
// represented; the operator-valued state never is.

#include <cstddef>

#include "dqo/types.hpp"

namespace dqo {

/// The 2x2 block J = [[0, 1], [-1, 0]].
Matrix2 symplectic_unit();

class SymplecticForm {
 public:
  /// Throws InvalidDimension for n_modes == 0.
  explicit SymplecticForm(std::size_t n_modes);

  std::size_t n_modes() const noexcept { return n_modes_; }
  std::size_t dimension() const noexcept { return 2 * n_modes_; }
  const Matrix& matrix() const noexcept { return matrix_; }

 private:
  std::size_t n_modes_;
  Matrix matrix_;
};

SymplecticForm make_symplectic(std::size_t n_modes);

/// Real symmetric matrix of even dimension. Symmetry is checked exactly:
/// Hamiltonians are assembled entry by entry, never computed.
class HamiltonianMatrix {
 public:
  explicit HamiltonianMatrix(Matrix matrix);

  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t n_modes() const noexcept { return dimension() / 2; }

 private:
  Matrix matrix_;
};

struct LinearQuantumSystem {
  HamiltonianMatrix hamiltonian;
  SymplecticForm theta;
  Matrix dynamics;
  Matrix output;
};

/// A = 2 Theta R.
Matrix dynamics_from_hamiltonian(const HamiltonianMatrix& r, const SymplecticForm& theta);

/// Assembles a system from its Hamiltonian and output map; the output must have
/// as many columns as the state dimension.
LinearQuantumSystem make_system(HamiltonianMatrix r, Matrix output);

/// ||A Theta + Theta A^T||_F. Zero exactly when A = 2 Theta R for a symmetric R.
double realizability_residual(const Matrix& a, const SymplecticForm& theta);

/// ||Phi^T R Phi - R||_F: how far a propagator sample is from conserving the
/// quadratic Hamiltonian.
double hamiltonian_drift(const HamiltonianMatrix& r, const Matrix& phi);

/// ||Phi Theta Phi^T - Theta||_F.
double symplectic_drift(const Matrix& phi, const SymplecticForm& theta);

/// max |Re(lambda)| over the eigenvalues of A, divided by ||A||_2 (0 for A = 0).
/// For A = 2 Theta R with R positive definite, or any realizable A whose
/// spectrum is on the imaginary axis, this is at rounding level.
double imaginary_spectrum_residual(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& m);

}  // namespace dqo
