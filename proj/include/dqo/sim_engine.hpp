#pragma once

// Coefficient-level simulation of the augmented plant + observer network.
//
// Everything here works on the real matrices C_a Phi(t), Phi(t) = e^{A_a t}.
// Row r of C_a Phi(t) holds the coefficients that express output r at time t
// as a combination of the initial variables x_a(0); no initial state is ever
// sampled.

#include <cstddef>
#include <optional>
#include <vector>

#include "dqo/lqs_core.hpp"
#include "dqo/observer_builder.hpp"
#include "dqo/types.hpp"

namespace dqo {

/// Phi(t) = e^{a t}.
Matrix propagator(const Matrix& a, double t);

/// Largest |lambda| over the eigenvalues of a.
double spectral_radius(const Matrix& a);

/// Uniform grid t0, t0 + step, ..., t_end. The last sample is exactly t_end.
class TimeGrid {
 public:
  /// Uses the smallest number of intervals whose spacing does not exceed
  /// max_step. Throws InvalidParameter unless 0 <= t0 < t_end and max_step > 0.
  TimeGrid(double t0, double t_end, double max_step);

  double t0() const noexcept { return t0_; }
  double t_end() const noexcept { return t_end_; }
  double step() const noexcept { return step_; }
  std::size_t samples() const noexcept { return samples_; }
  double time(std::size_t k) const noexcept;

 private:
  double t0_;
  double t_end_;
  double step_;
  std::size_t samples_;
};

/// 0.005 * 2 pi / omega_max; horizon / 1000 when omega_max is zero.
double default_step(double omega_max, double horizon);

struct TrajectoryOptions {
  std::size_t threads = 1;
  /// Samples per chunk. Each chunk starts from an exactly computed Phi(t) and
  /// advances by Phi(t + h) = Phi(h) Phi(t). Output depends on the chunk size
  /// but never on the thread count.
  std::size_t chunk_size = 512;
  /// Relative symplectic tolerance checked at every sample.
  double drift_tolerance = 1e-9;
};

class Trajectory {
 public:
  Trajectory(TimeGrid grid, Eigen::Index rows, Eigen::Index cols);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t samples() const noexcept { return grid_.samples(); }
  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }

  /// C_a Phi(t_k).
  Eigen::Map<const Matrix> at(std::size_t k) const;
  Eigen::Map<Matrix> at(std::size_t k);

  double omega_max = 0.0;
  double max_symplectic_drift = 0.0;
  /// Absent when the trajectory was generated without a Hamiltonian.
  std::optional<double> max_hamiltonian_drift;

 private:
  TimeGrid grid_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  std::vector<double> data_;
};

/// Samples c Phi(t) for a realizable a (dimension even). Throws
/// ToleranceExceeded if ||Phi Theta Phi^T - Theta||_F exceeds
/// options.drift_tolerance * ||Theta||_F at any sample.
Trajectory coefficient_trajectory(const Matrix& a, const Matrix& c, const TimeGrid& grid,
                                  const TrajectoryOptions& options = {});

/// As above, and additionally holds ||Phi^T R_a Phi - R_a||_F to
/// drift_tolerance * (1 + ||R_a||_F).
Trajectory coefficient_trajectory(const AugmentedSystem& aug, const TimeGrid& grid,
                                  const TrajectoryOptions& options = {});

/// int_0^T e^{a s} ds, read off the upper-right block of exp([[a, I], [0, 0]] T).
/// Valid for singular a.
Matrix integral_of_exponential(const Matrix& a, double horizon);

enum class AverageMethod { ExactBlockExponential, Quadrature };

struct TimeAverage {
  double horizon = 0.0;
  Matrix averaged_rows;  // (1/T) int_0^T C Phi(t) dt
  AverageMethod method = AverageMethod::ExactBlockExponential;
};

TimeAverage time_average_exact(const Matrix& a, const Matrix& c, double horizon);
TimeAverage time_average_exact(const AugmentedSystem& aug, double horizon);

/// Composite Simpson average over a trajectory starting at t = 0 (the final
/// three intervals use the 3/8 rule when the interval count is odd). Throws
/// StepTooCoarse when step > 0.01 * 2 pi / omega_max.
TimeAverage time_average_quadrature(const Trajectory& trajectory);

/// The same quadrature evaluated chunk by chunk without materialising the
/// trajectory. Sums are combined in chunk order, so the result is independent
/// of options.threads.
TimeAverage time_average_quadrature(const Matrix& a, const Matrix& c, const TimeGrid& grid,
                                    const TrajectoryOptions& options = {});

struct SpatialAverage {
  std::vector<double> times;
  Matrix rows;  // one row per sample: mean of output rows 2..N+1
};

SpatialAverage spatial_average(const Trajectory& trajectory);

/// ||row_{i+1} - row_1||_2 for each observer row i = 1..N.
std::vector<double> consensus_errors_by_row(const TimeAverage& avg);

/// max over observer rows of ||avg row_{i+1} - avg row_1||_2.
double consensus_error(const TimeAverage& avg);

struct ConsensusPoint {
  double horizon;
  double error;
};

std::vector<ConsensusPoint> consensus_curve(const AugmentedSystem& aug, const std::vector<double>& horizons);

/// K = max_T T error(T). `spread` = min_T T error(T) / K; the 1/T law holds
/// within a factor of two when spread >= 0.5.
struct InverseLawFit {
  double k = 0.0;
  double spread = 0.0;
  bool within_factor_two() const noexcept { return spread >= 0.5; }
};

InverseLawFit fit_inverse_law(const std::vector<ConsensusPoint>& curve);

/// ||x - y||_F / max(||x||_F, kToleranceFloor).
double relative_difference(const Matrix& x, const Matrix& y);

}  // namespace dqo
