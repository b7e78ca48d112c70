#pragma once

#include "dqo/types.hpp"

namespace dqo {

/// e^A by scaling and squaring with the diagonal [13/13] Pade approximant
/// (Higham 2005): A is scaled by 2^-s so that ||A 2^-s||_1 <= 5.37, the
/// approximant r13 is evaluated with one LU solve and squared s times.
///
/// Throws InvalidInput for non-square or non-finite input and NumericalFailure
/// if the result is not finite.
Matrix expm(const Matrix& a);

/// Number of squarings expm would use for `a`.
int expm_squarings(const Matrix& a);

}  // namespace dqo
