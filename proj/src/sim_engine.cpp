#include "dqo/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>

#include "dqo/error.hpp"
#include "dqo/matrix_exponential.hpp"

namespace dqo {

Matrix propagator(const Matrix& a, double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidInput, "propagator time is not finite", t);
  return expm(a * t);
}

double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidDimension, "spectral radius of a non-square matrix");
  if (a.size() == 0 || a.isZero(0.0)) return 0.0;
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigenvalue iteration did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

TimeGrid::TimeGrid(double t0, double t_end, double max_step) : t0_(t0), t_end_(t_end) {
  if (!std::isfinite(t0) || !std::isfinite(t_end) || t0 < 0.0 || !(t_end > t0)) {
    throw Error(ErrorCode::InvalidParameter,
                "time grid needs 0 <= t0 < t_end, got [" + std::to_string(t0) + ", " + std::to_string(t_end) + "]");
  }
  if (!(max_step > 0.0) || !std::isfinite(max_step)) {
    throw Error(ErrorCode::InvalidParameter, "time step must be positive and finite", max_step);
  }
  // The 1e-9 slack keeps a step that divides the span exactly from gaining an interval.
  const double ratio = (t_end - t0) / max_step;
  const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio * (1.0 - 1e-9))));
  samples_ = intervals + 1;
  step_ = (t_end - t0) / static_cast<double>(intervals);
}

double TimeGrid::time(std::size_t k) const noexcept {
  if (k + 1 == samples_) return t_end_;
  return t0_ + static_cast<double>(k) * step_;
}

double default_step(double omega_max, double horizon) {
  if (!(omega_max > 0.0)) return horizon / 1000.0;
  return 0.005 * 2.0 * std::numbers::pi / omega_max;
}

Trajectory::Trajectory(TimeGrid grid, Eigen::Index rows, Eigen::Index cols)
    : grid_(grid), rows_(rows), cols_(cols), data_(grid.samples() * static_cast<std::size_t>(rows * cols)) {}

Eigen::Map<const Matrix> Trajectory::at(std::size_t k) const {
  return Eigen::Map<const Matrix>(data_.data() + k * static_cast<std::size_t>(rows_ * cols_), rows_, cols_);
}

Eigen::Map<Matrix> Trajectory::at(std::size_t k) {
  return Eigen::Map<Matrix>(data_.data() + k * static_cast<std::size_t>(rows_ * cols_), rows_, cols_);
}

namespace {

struct ChunkDrift {
  double symplectic = 0.0;
  double hamiltonian = 0.0;
};

// Walks the grid in fixed chunks. For every sample k of a chunk, `visit(chunk,
// k, phi)` is called in increasing k. Chunks are distributed over threads;
// each chunk's arithmetic is independent of which thread runs it.
template <typename Visit>
std::vector<ChunkDrift> propagate_chunks(const Matrix& a, const TimeGrid& grid, const TrajectoryOptions& options,
                                         const Matrix* hamiltonian, Visit&& visit) {
  if (a.rows() != a.cols() || a.rows() == 0 || a.rows() % 2 != 0) {
    throw Error(ErrorCode::InvalidDimension, "trajectory needs a square dynamics matrix of even dimension");
  }
  if (!a.allFinite()) throw Error(ErrorCode::InvalidInput, "dynamics matrix has non-finite entries");
  if (options.chunk_size == 0) throw Error(ErrorCode::InvalidParameter, "chunk size must be positive");

  const SymplecticForm theta(static_cast<std::size_t>(a.rows() / 2));
  const double symplectic_limit = options.drift_tolerance * theta.matrix().norm();
  const double hamiltonian_limit = hamiltonian ? options.drift_tolerance * (1.0 + hamiltonian->norm()) : 0.0;
  const Matrix step_phi = propagator(a, grid.step());

  const std::size_t samples = grid.samples();
  const std::size_t chunks = (samples + options.chunk_size - 1) / options.chunk_size;
  std::vector<ChunkDrift> drift(chunks);
  std::vector<std::exception_ptr> failures(chunks);

  auto run_chunk = [&](std::size_t chunk) {
    const std::size_t begin = chunk * options.chunk_size;
    const std::size_t end = std::min(samples, begin + options.chunk_size);
    Matrix phi = propagator(a, grid.time(begin));
    for (std::size_t k = begin; k < end; ++k) {
      if (k + 1 == samples && k != begin) {
        // The final sample sits exactly at t_end, which may differ from t0 + k h by rounding.
        phi = propagator(a, grid.time(k));
      } else if (k != begin) {
        phi = step_phi * phi;
      }
      const double sd = symplectic_drift(phi, theta);
      drift[chunk].symplectic = std::max(drift[chunk].symplectic, sd);
      if (!(sd <= symplectic_limit)) {
        throw Error(ErrorCode::ToleranceExceeded,
                    "symplectic drift " + std::to_string(sd) + " at t = " + std::to_string(grid.time(k)), sd);
      }
      if (hamiltonian) {
        const double hd = (phi.transpose() * (*hamiltonian) * phi - *hamiltonian).norm();
        drift[chunk].hamiltonian = std::max(drift[chunk].hamiltonian, hd);
        if (!(hd <= hamiltonian_limit)) {
          throw Error(ErrorCode::ToleranceExceeded,
                      "Hamiltonian drift " + std::to_string(hd) + " at t = " + std::to_string(grid.time(k)), hd);
        }
      }
      visit(chunk, k, phi);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, chunks));
  if (workers == 1) {
    for (std::size_t chunk = 0; chunk < chunks; ++chunk) run_chunk(chunk);
    return drift;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t chunk = next++; chunk < chunks; chunk = next++) {
        try {
          run_chunk(chunk);
        } catch (...) {
          failures[chunk] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return drift;
}

Trajectory sample_trajectory(const Matrix& a, const Matrix& c, const TimeGrid& grid, const TrajectoryOptions& options,
                             const Matrix* hamiltonian) {
  if (c.cols() != a.cols()) {
    throw Error(ErrorCode::InvalidDimension, "output map has " + std::to_string(c.cols()) +
                                                 " columns, state dimension is " + std::to_string(a.cols()));
  }
  Trajectory trajectory(grid, c.rows(), c.cols());
  const auto drift = propagate_chunks(a, grid, options, hamiltonian,
                                      [&](std::size_t, std::size_t k, const Matrix& phi) { trajectory.at(k) = c * phi; });
  for (const auto& d : drift) {
    trajectory.max_symplectic_drift = std::max(trajectory.max_symplectic_drift, d.symplectic);
  }
  if (hamiltonian) {
    double worst = 0.0;
    for (const auto& d : drift) worst = std::max(worst, d.hamiltonian);
    trajectory.max_hamiltonian_drift = worst;
  }
  trajectory.omega_max = spectral_radius(a);
  return trajectory;
}

void require_fine_enough(double step, double omega_max) {
  if (omega_max > 0.0) {
    const double limit = 0.01 * 2.0 * std::numbers::pi / omega_max;
    if (step > limit) {
      throw Error(ErrorCode::StepTooCoarse,
                  "quadrature step " + std::to_string(step) + " exceeds " + std::to_string(limit), step);
    }
  }
}

// Composite Simpson weights (in units of h / 3) on n + 1 samples; an odd
// interval count closes with the 3/8 rule on the last three intervals and a
// single interval falls back to the trapezoid rule.
double quadrature_weight(std::size_t k, std::size_t intervals) {
  if (intervals == 1) return 1.5;  // h/2 expressed in units of h/3
  const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  double w = 0.0;
  if (k <= simpson_end && simpson_end > 0) {
    if (k == 0 || k == simpson_end) {
      w += 1.0;
    } else {
      w += (k % 2 == 1) ? 4.0 : 2.0;
    }
  }
  if (simpson_end < intervals && k >= simpson_end) {
    // 3h/8 (1, 3, 3, 1) = h/3 (9/8, 27/8, 27/8, 9/8)
    const std::size_t local = k - simpson_end;
    w += (local == 0 || local == 3) ? 9.0 / 8.0 : 27.0 / 8.0;
  }
  return w;
}

void check_average(const TimeAverage& avg) {
  if (!avg.averaged_rows.allFinite()) throw Error(ErrorCode::NumericalFailure, "time average is not finite");
}

}  // namespace

Trajectory coefficient_trajectory(const Matrix& a, const Matrix& c, const TimeGrid& grid,
                                  const TrajectoryOptions& options) {
  return sample_trajectory(a, c, grid, options, nullptr);
}

Trajectory coefficient_trajectory(const AugmentedSystem& aug, const TimeGrid& grid, const TrajectoryOptions& options) {
  return sample_trajectory(aug.a_a, aug.c_a, grid, options, &aug.r_a);
}

Matrix integral_of_exponential(const Matrix& a, double horizon) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidDimension, "integral of exponential of a non-square matrix");
  if (!std::isfinite(horizon)) throw Error(ErrorCode::InvalidInput, "horizon is not finite", horizon);
  const Eigen::Index n = a.rows();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a * horizon;
  block.topRightCorner(n, n) = Matrix::Identity(n, n) * horizon;
  return expm(block).topRightCorner(n, n);
}

TimeAverage time_average_exact(const Matrix& a, const Matrix& c, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidParameter, "averaging horizon must be positive", horizon);
  }
  if (c.cols() != a.rows()) throw Error(ErrorCode::InvalidDimension, "output map does not match dynamics");
  TimeAverage avg{horizon, c * integral_of_exponential(a, horizon) / horizon, AverageMethod::ExactBlockExponential};
  check_average(avg);
  return avg;
}

TimeAverage time_average_exact(const AugmentedSystem& aug, double horizon) {
  return time_average_exact(aug.a_a, aug.c_a, horizon);
}

TimeAverage time_average_quadrature(const Trajectory& trajectory) {
  const TimeGrid& grid = trajectory.grid();
  if (grid.t0() != 0.0) throw Error(ErrorCode::InvalidParameter, "quadrature average needs a grid starting at 0");
  require_fine_enough(grid.step(), trajectory.omega_max);

  const std::size_t intervals = grid.samples() - 1;
  Matrix sum = Matrix::Zero(trajectory.rows(), trajectory.cols());
  for (std::size_t k = 0; k < grid.samples(); ++k) sum += quadrature_weight(k, intervals) * trajectory.at(k);

  TimeAverage avg{grid.t_end(), sum * (grid.step() / 3.0) / grid.t_end(), AverageMethod::Quadrature};
  check_average(avg);
  return avg;
}

TimeAverage time_average_quadrature(const Matrix& a, const Matrix& c, const TimeGrid& grid,
                                    const TrajectoryOptions& options) {
  if (grid.t0() != 0.0) throw Error(ErrorCode::InvalidParameter, "quadrature average needs a grid starting at 0");
  if (c.cols() != a.rows()) throw Error(ErrorCode::InvalidDimension, "output map does not match dynamics");
  require_fine_enough(grid.step(), spectral_radius(a));

  const std::size_t intervals = grid.samples() - 1;
  const std::size_t chunks = (grid.samples() + options.chunk_size - 1) / std::max<std::size_t>(1, options.chunk_size);
  std::vector<Matrix> partial(chunks, Matrix::Zero(c.rows(), c.cols()));
  propagate_chunks(a, grid, options, nullptr, [&](std::size_t chunk, std::size_t k, const Matrix& phi) {
    partial[chunk] += quadrature_weight(k, intervals) * (c * phi);
  });
  Matrix sum = Matrix::Zero(c.rows(), c.cols());
  for (const auto& p : partial) sum += p;

  TimeAverage avg{grid.t_end(), sum * (grid.step() / 3.0) / grid.t_end(), AverageMethod::Quadrature};
  check_average(avg);
  return avg;
}

SpatialAverage spatial_average(const Trajectory& trajectory) {
  if (trajectory.rows() < 2) throw Error(ErrorCode::InvalidDimension, "spatial average needs at least one observer row");
  const Eigen::Index observers = trajectory.rows() - 1;
  SpatialAverage out;
  out.times.reserve(trajectory.samples());
  out.rows.resize(static_cast<Eigen::Index>(trajectory.samples()), trajectory.cols());
  for (std::size_t k = 0; k < trajectory.samples(); ++k) {
    out.times.push_back(trajectory.grid().time(k));
    out.rows.row(static_cast<Eigen::Index>(k)) =
        trajectory.at(k).bottomRows(observers).colwise().sum() / static_cast<double>(observers);
  }
  return out;
}

std::vector<double> consensus_errors_by_row(const TimeAverage& avg) {
  const Matrix& m = avg.averaged_rows;
  std::vector<double> errors;
  for (Eigen::Index i = 1; i < m.rows(); ++i) errors.push_back((m.row(i) - m.row(0)).norm());
  return errors;
}

double consensus_error(const TimeAverage& avg) {
  const auto errors = consensus_errors_by_row(avg);
  return errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
}

std::vector<ConsensusPoint> consensus_curve(const AugmentedSystem& aug, const std::vector<double>& horizons) {
  std::vector<ConsensusPoint> curve;
  curve.reserve(horizons.size());
  for (double t : horizons) curve.push_back({t, consensus_error(time_average_exact(aug, t))});
  return curve;
}

InverseLawFit fit_inverse_law(const std::vector<ConsensusPoint>& curve) {
  if (curve.empty()) throw Error(ErrorCode::InvalidParameter, "cannot fit an empty consensus curve");
  InverseLawFit fit;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& p : curve) {
    const double scaled = p.horizon * p.error;
    fit.k = std::max(fit.k, scaled);
    smallest = std::min(smallest, scaled);
  }
  fit.spread = fit.k > 0.0 ? smallest / fit.k : 1.0;
  return fit;
}

double relative_difference(const Matrix& x, const Matrix& y) {
  return (x - y).norm() / std::max(x.norm(), kToleranceFloor);
}

}  // namespace dqo
