#include "dqo/matrix_exponential.hpp"

#include <cmath>

#include <Eigen/LU>

#include "dqo/error.hpp"

namespace dqo {

namespace {

// Largest 1-norm for which the [13/13] approximant is accurate to unit roundoff.
constexpr double kTheta13 = 5.371920351148152;

constexpr double kPade13[] = {64764752532480000.0,
                              32382376266240000.0,
                              7771770303897600.0,
                              1187353796428800.0,
                              129060195264000.0,
                              10559470521600.0,
                              670442572800.0,
                              33522128640.0,
                              1323241920.0,
                              40840800.0,
                              960960.0,
                              16380.0,
                              182.0,
                              1.0};

double one_norm(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

int expm_squarings(const Matrix& a) {
  if (a.size() == 0) return 0;
  const double norm = one_norm(a);
  if (norm <= kTheta13) return 0;
  return static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
}

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidInput, "matrix exponential of a non-square matrix");
  if (!a.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix exponential input has non-finite entries");
  const Eigen::Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  if (a.isZero(0.0)) return Matrix::Identity(n, n);

  const int s = expm_squarings(a);
  const Matrix x = a * std::ldexp(1.0, -s);
  const Matrix ident = Matrix::Identity(n, n);
  const double* b = kPade13;

  const Matrix x2 = x * x;
  const Matrix x4 = x2 * x2;
  const Matrix x6 = x4 * x2;

  Matrix inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  Matrix u = x * (x6 * inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident);
  inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  Matrix v = x6 * inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident;

  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) result = result * result;

  if (!result.allFinite()) throw Error(ErrorCode::NumericalFailure, "matrix exponential overflowed");
  return result;
}

}  // namespace dqo
