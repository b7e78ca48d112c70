#include "dqo/observer_builder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dqo/error.hpp"

namespace dqo {

PlantSpec make_static_plant(const Eigen::RowVector2d& c_p) {
  PlantSpec plant;
  plant.c_p = c_p;
  return plant;
}

std::string_view to_string(SchemeVariant variant) noexcept {
  switch (variant) {
    case SchemeVariant::Uniform: return "uniform";
    case SchemeVariant::OddHarmonics: return "odd-harmonics";
    case SchemeVariant::AllHarmonics: return "all-harmonics";
    case SchemeVariant::Random: return "random";
  }
  return "unknown";
}

SchemeVariant parse_scheme_variant(std::string_view name) {
  for (auto v : {SchemeVariant::Uniform, SchemeVariant::OddHarmonics, SchemeVariant::AllHarmonics,
                 SchemeVariant::Random}) {
    if (name == to_string(v)) return v;
  }
  throw Error(ErrorCode::ParseError, "unknown scheme '" + std::string(name) +
                                         "' (expected uniform, odd-harmonics, all-harmonics or random)");
}

std::vector<double> make_mu_schedule(const ParameterScheme& scheme, std::size_t n_elements) {
  if (n_elements == 0) throw Error(ErrorCode::InvalidDimension, "observer needs at least one element");
  if (!(scheme.omega0 > 0.0) || !std::isfinite(scheme.omega0)) {
    throw Error(ErrorCode::InvalidParameter, "omega0 must be positive and finite", scheme.omega0);
  }
  const double w0 = scheme.omega0;
  const std::size_t n = n_elements;
  std::vector<double> mu(n);

  switch (scheme.variant) {
    case SchemeVariant::Uniform:
      std::fill(mu.begin(), mu.end(), w0);
      break;
    case SchemeVariant::OddHarmonics:
      for (std::size_t i = 0; i < n; ++i) mu[i] = static_cast<double>(i + 1) * w0;
      break;
    case SchemeVariant::AllHarmonics:
      if (n % 2 != 0) {
        throw Error(ErrorCode::UnsupportedScheme, "all-harmonics scheme requires an even number of elements, got " +
                                                      std::to_string(n));
      }
      for (std::size_t i = 1; i <= n / 2; ++i) {
        const double value = w0 * static_cast<double>(n / 2 + 1 - i);
        mu[2 * i - 1] = value;
        mu[2 * i - 2] = value;
      }
      break;
    case SchemeVariant::Random: {
      std::mt19937_64 engine(scheme.seed);
      const double upper = w0 * static_cast<double>(n);
      for (auto& m : mu) {
        do {
          const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
          m = upper * (1.0 - u);
        } while (!(m > 0.0));
      }
      break;
    }
  }
  return mu;
}

std::vector<double> omegas_from_mu(const std::vector<double>& mu_tilde) {
  if (mu_tilde.empty()) throw Error(ErrorCode::InvalidDimension, "empty coupling schedule");
  for (std::size_t i = 0; i < mu_tilde.size(); ++i) {
    if (!(mu_tilde[i] > 0.0) || !std::isfinite(mu_tilde[i])) {
      throw Error(ErrorCode::InvalidParameter, "mu_tilde[" + std::to_string(i) + "] must be positive and finite",
                  mu_tilde[i]);
    }
  }
  std::vector<double> omega(mu_tilde.size());
  for (std::size_t i = 0; i + 1 < mu_tilde.size(); ++i) omega[i] = mu_tilde[i] + mu_tilde[i + 1];
  omega.back() = mu_tilde.back();
  return omega;
}

ChainObserverParams build_chain(const PlantSpec& plant, const std::vector<double>& mu_tilde) {
  const Vector2 alpha = plant.c_p.transpose();
  const double alpha_sq = alpha.squaredNorm();
  if (!(alpha_sq > 0.0)) throw Error(ErrorCode::DegenerateOutput, "plant output C_p is zero");
  if (!alpha.allFinite()) throw Error(ErrorCode::InvalidInput, "plant output C_p has non-finite entries");

  ChainObserverParams chain;
  chain.n_elements = mu_tilde.size();
  chain.alpha = alpha;
  chain.mu_tilde = mu_tilde;
  chain.omega = omegas_from_mu(mu_tilde);

  const Matrix2 outer = alpha * alpha.transpose();
  for (std::size_t i = 0; i < chain.n_elements; ++i) {
    const double mu = mu_tilde[i] / alpha_sq;
    chain.mu.push_back(mu);
    chain.r_c.push_back(-mu * outer);
    chain.r_o_blocks.push_back(chain.omega[i] * Matrix2::Identity());
    chain.c_o_rows.push_back(plant.c_p);
  }
  return chain;
}

ChainObserverParams perturb_frequency(ChainObserverParams chain, std::size_t index, double delta) {
  if (index >= chain.n_elements) {
    throw Error(ErrorCode::InvalidDimension, "element index " + std::to_string(index) + " out of range");
  }
  chain.omega[index] += delta;
  chain.r_o_blocks[index] = chain.omega[index] * Matrix2::Identity();
  return chain;
}

AugmentedSystem assemble_augmented(const PlantSpec& plant, const ChainObserverParams& chain) {
  if (!plant.r_p.isZero(0.0) || !plant.a_p.isZero(0.0)) {
    throw Error(ErrorCode::UnsupportedPlant, "chain observer requires a static plant (A_p = 0, R_p = 0)");
  }
  const std::size_t n = chain.n_elements;
  if (n == 0 || chain.r_c.size() != n || chain.r_o_blocks.size() != n || chain.c_o_rows.size() != n ||
      chain.mu.size() != n) {
    throw Error(ErrorCode::InvalidDimension, "inconsistent chain parameters");
  }

  const auto dim = static_cast<Eigen::Index>(2 * n + 2);
  Matrix r_a = Matrix::Zero(dim, dim);
  r_a.block<2, 2>(0, 0) = plant.r_p;
  for (std::size_t i = 0; i < n; ++i) {
    const auto prev = static_cast<Eigen::Index>(2 * i);  // plant for i = 0
    const auto self = static_cast<Eigen::Index>(2 * i + 2);
    r_a.block<2, 2>(self, self) = chain.r_o_blocks[i];
    r_a.block<2, 2>(prev, self) = chain.r_c[i];
    r_a.block<2, 2>(self, prev) = chain.r_c[i].transpose();
  }

  Matrix c_a = Matrix::Zero(static_cast<Eigen::Index>(n + 1), dim);
  c_a.block<1, 2>(0, 0) = plant.c_p;
  for (std::size_t i = 0; i < n; ++i) {
    c_a.block<1, 2>(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(2 * i + 2)) = chain.c_o_rows[i];
  }

  SymplecticForm theta(n + 1);
  HamiltonianMatrix hamiltonian(r_a);
  Matrix a_a = dynamics_from_hamiltonian(hamiltonian, theta);

  const auto obs = static_cast<Eigen::Index>(2 * n);
  Matrix r_o = r_a.bottomRightCorner(obs, obs);
  Matrix a_o = 2.0 * SymplecticForm(n).matrix() * r_o;

  Vector b_o = Vector::Zero(obs);
  const Vector2 beta_1 = -chain.mu[0] * chain.alpha;
  b_o.head<2>() = 2.0 * symplectic_unit() * beta_1;

  return AugmentedSystem{n, std::move(r_a), std::move(a_a), std::move(c_a), std::move(r_o), std::move(a_o),
                         std::move(b_o), std::move(theta)};
}

double check_fixed_point(const AugmentedSystem& aug, const ChainObserverParams& chain) {
  const auto n = static_cast<Eigen::Index>(chain.n_elements);
  if (aug.a_o.rows() != 2 * n) throw Error(ErrorCode::InvalidDimension, "augmented system does not match chain");
  const double alpha_sq = chain.alpha.squaredNorm();
  Vector stacked(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) stacked.segment<2>(2 * i) = chain.alpha;
  return (aug.a_o * stacked + aug.b_o * alpha_sq).norm();
}

ConsensusTarget consensus_target(const ChainObserverParams& chain) {
  const auto n = static_cast<Eigen::Index>(chain.n_elements);
  ConsensusTarget target{Vector::Ones(n), Vector(2 * n)};
  const Vector2 scaled = chain.alpha / chain.alpha.squaredNorm();
  for (Eigen::Index i = 0; i < n; ++i) target.alpha_stack.segment<2>(2 * i) = scaled;
  return target;
}

double plant_output_drift_rate(const AugmentedSystem& aug) { return (aug.c_a.row(0) * aug.a_a).norm(); }

}  // namespace dqo
