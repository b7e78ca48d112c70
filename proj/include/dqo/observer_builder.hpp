#pragma once

// Distributed chain observer for a single-oscillator plant.
//
// Element i of the observer is an oscillator with Hamiltonian block omega_i I,
// coupled to its predecessor (element i-1, or the plant for i = 1) through
// R_ci = -mu_i alpha alpha^T with alpha = C_p^T. The couplings are parameterised
// by mu_tilde_i = mu_i ||alpha||^2 and the frequencies follow from them so that
// the stacked vector (alpha; ...; alpha) is a fixed point of the observer
// dynamics driven by the plant output.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "dqo/lqs_core.hpp"
#include "dqo/types.hpp"

namespace dqo {

struct PlantSpec {
  Matrix2 a_p = Matrix2::Zero();
  Eigen::RowVector2d c_p = Eigen::RowVector2d::Zero();
  Matrix2 r_p = Matrix2::Zero();
};

/// Plant with A_p = 0 and R_p = 0, the only kind the chain construction supports.
PlantSpec make_static_plant(const Eigen::RowVector2d& c_p);

enum class SchemeVariant { Uniform, OddHarmonics, AllHarmonics, Random };

std::string_view to_string(SchemeVariant variant) noexcept;
/// Accepts "uniform", "odd-harmonics", "all-harmonics", "random"; throws ParseError otherwise.
SchemeVariant parse_scheme_variant(std::string_view name);

struct ParameterScheme {
  SchemeVariant variant = SchemeVariant::OddHarmonics;
  double omega0 = 1.0;
  std::uint64_t seed = 0;  // random variant only
};

struct ChainObserverParams {
  std::size_t n_elements = 0;
  Vector2 alpha = Vector2::Zero();
  std::vector<double> mu_tilde;
  std::vector<double> mu;
  std::vector<double> omega;
  std::vector<Matrix2> r_c;
  std::vector<Matrix2> r_o_blocks;
  std::vector<Eigen::RowVector2d> c_o_rows;
};

struct AugmentedSystem {
  std::size_t n_elements = 0;
  Matrix r_a;  // (2N+2)x(2N+2), block tridiagonal
  Matrix a_a;  // 2 Theta R_a
  Matrix c_a;  // (N+1)x(2N+2), diag(C_p, C_o1, ..., C_oN)
  Matrix r_o;  // observer-only Hamiltonian block, 2N x 2N
  Matrix a_o;  // 2 Theta R_o
  Vector b_o;  // [2 J beta_1; 0; ...; 0], the gain on the scalar plant output
  SymplecticForm theta;

  std::size_t dimension() const noexcept { return 2 * n_elements + 2; }
};

struct ConsensusTarget {
  Vector ones_vector;   // N entries
  Vector alpha_stack;   // (alpha; ...; alpha) / ||alpha||^2
};

/// mu_tilde for N elements under the given scheme.
///
///   uniform        mu_tilde_i = omega0
///   odd-harmonics  mu_tilde_i = i omega0
///   all-harmonics  mu_tilde_{2i} = mu_tilde_{2i-1} = omega0 (N/2 + 1 - i), N even
///   random         mu_tilde_i = omega0 N (1 - u_i), u_i = (x_i >> 11) 2^-53 where
///                  x_i is the i-th output of std::mt19937_64 seeded with `seed`;
///                  draws that underflow to zero are discarded and redrawn.
std::vector<double> make_mu_schedule(const ParameterScheme& scheme, std::size_t n_elements);

/// omega_i = mu_tilde_i + mu_tilde_{i+1} for i < N, omega_N = mu_tilde_N.
std::vector<double> omegas_from_mu(const std::vector<double>& mu_tilde);

ChainObserverParams build_chain(const PlantSpec& plant, const std::vector<double>& mu_tilde);

/// Returns a copy with omega_i (0-based index) shifted by delta and R_oi updated
/// to match. Used for sensitivity studies of the fixed-point condition.
ChainObserverParams perturb_frequency(ChainObserverParams chain, std::size_t index, double delta);

AugmentedSystem assemble_augmented(const PlantSpec& plant, const ChainObserverParams& chain);

/// ||A_o (alpha; ...; alpha) + B_o ||alpha||^2||_2.
double check_fixed_point(const AugmentedSystem& aug, const ChainObserverParams& chain);

ConsensusTarget consensus_target(const ChainObserverParams& chain);

/// ||e_1^T C_a A_a||_2: the rate of change of the plant output coefficients.
/// Zero means z_p is conserved by the coupled dynamics.
double plant_output_drift_rate(const AugmentedSystem& aug);

}  // namespace dqo
