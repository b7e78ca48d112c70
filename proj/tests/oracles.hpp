#pragma once

// Reference computations used only by the tests. None of these call into the
// library's numerical routines; they rebuild the quantities from scratch by a
// different route so that agreement means something.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below x.
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
  int count = 0;
  double q = d[0] - x;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (q == 0.0) q = 1e-300;
    q = d[i] - x - e[i - 1] * e[i - 1] / q;
    if (q < 0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (0-based) of a symmetric tridiagonal by bisection.
inline double tridiagonal_eigenvalue(const std::vector<double>& d, const std::vector<double>& e, int k) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(e[i - 1]);
    if (i + 1 < d.size()) r += std::abs(e[i]);
    if (i == 0 || d[i] - r < lo) lo = d[i] - r;
    if (i == 0 || d[i] + r > hi) hi = d[i] + r;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(d, e, mid) > k) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline Matrix theta(std::size_t modes) {
  Matrix t = Matrix::Zero(2 * modes, 2 * modes);
  for (std::size_t i = 0; i < modes; ++i) {
    t(2 * i, 2 * i + 1) = 1.0;
    t(2 * i + 1, 2 * i) = -1.0;
  }
  return t;
}

// The augmented Hamiltonian written out entry by entry from mu_tilde and c_p.
inline Matrix chain_hamiltonian(const std::vector<double>& mu_tilde, double c1, double c2) {
  const std::size_t n = mu_tilde.size();
  const double a2 = c1 * c1 + c2 * c2;
  Matrix r = Matrix::Zero(2 * n + 2, 2 * n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double omega = mu_tilde[i] + (i + 1 < n ? mu_tilde[i + 1] : 0.0);
    const std::size_t b = 2 * (i + 1);
    r(b, b) = omega;
    r(b + 1, b + 1) = omega;
    const double mu = mu_tilde[i] / a2;
    const std::size_t p = b - 2;
    const double c[2] = {c1, c2};
    for (int u = 0; u < 2; ++u) {
      for (int v = 0; v < 2; ++v) {
        r(p + u, b + v) = -mu * c[u] * c[v];
        r(b + v, p + u) = -mu * c[u] * c[v];
      }
    }
  }
  return r;
}

struct SkewForm {
  Matrix root;         // R^{1/2}
  Matrix inverse_root; // R^{-1/2}
  Vector frequencies;  // eigenvalues of i R^{1/2} (2 Theta) R^{1/2}
  CMatrix vectors;
};

// For symmetric positive definite R, 2 Theta R = R^{-1/2} S R^{1/2} with S
// skew-symmetric; iS is Hermitian and gives e^{St} through a unitary
// eigendecomposition.
inline SkewForm skew_form(const Matrix& r) {
  Eigen::SelfAdjointEigenSolver<Matrix> sym(r);
  const Vector lam = sym.eigenvalues();
  const Matrix& q = sym.eigenvectors();
  SkewForm f;
  f.root = q * lam.cwiseSqrt().asDiagonal() * q.transpose();
  f.inverse_root = q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
  const Matrix s = f.root * (2.0 * theta(static_cast<std::size_t>(r.rows() / 2))) * f.root;
  const CMatrix hermitian = std::complex<double>(0.0, 1.0) * s.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<CMatrix> herm(hermitian);
  f.frequencies = herm.eigenvalues();
  f.vectors = herm.eigenvectors();
  return f;
}

// e^{2 Theta R t}.
inline Matrix propagator(const SkewForm& f, double t) {
  const Eigen::Index n = f.frequencies.size();
  Eigen::VectorXcd phase(n);
  // S = -i H, so e^{St} = V e^{-i lambda t} V^*.
  for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::exp(std::complex<double>(0.0, -f.frequencies(k) * t));
  const CMatrix e = f.vectors * phase.asDiagonal() * f.vectors.adjoint();
  return f.inverse_root * e.real() * f.root;
}

// (1/T) int_0^T e^{2 Theta R t} dt.
inline Matrix average(const SkewForm& f, double horizon) {
  const Eigen::Index n = f.frequencies.size();
  Eigen::VectorXcd weight(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<double> z(0.0, -f.frequencies(k) * horizon);
    weight(k) = std::abs(z) < 1e-8 ? std::complex<double>(1.0) + z / 2.0 : (std::exp(z) - 1.0) / z;
  }
  const CMatrix e = f.vectors * weight.asDiagonal() * f.vectors.adjoint();
  return f.inverse_root * e.real() * f.root;
}

// e^A by Taylor series on a scaled copy; slow and only for small test matrices.
inline Matrix taylor_expm(const Matrix& a) {
  int s = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm /= 2.0;
    ++s;
  }
  const Matrix scaled = a / std::ldexp(1.0, s);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

}  // namespace oracle
