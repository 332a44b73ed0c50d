#include "cltb/be_uniform.hpp"

#include <cmath>
#include <stdexcept>

#include "cltb/quadrature.hpp"

namespace cltb {

void BoundValue::check_breakdown() const {
  double s0 = 0.0, s1 = 0.0;
  for (const auto& comp : breakdown) {
    s0 += comp.c0;
    s1 += comp.c1;
  }
  if (std::abs(s0 - c0) > 1e-12 * std::max(1.0, std::abs(c0)) ||
      std::abs(s1 - c1) > 1e-12 * std::max(1.0, std::abs(c1))) {
    throw std::logic_error("bound breakdown does not sum to its totals");
  }
}

double isoperimetric_constant(const FavorableClass& cls) {
  if (cls.d < 1) throw std::invalid_argument("class dimension must be >= 1");
  switch (cls.tag) {
    case FavorableClass::Tag::half_spaces:
      return 1.0 / std::sqrt(2.0 * 3.14159265358979323846);
    case FavorableClass::Tag::convex:
      // d^{1/4} via nested square roots keeps perfect fourth powers exact.
      return 4.0 * std::sqrt(std::sqrt(static_cast<double>(cls.d)));
    case FavorableClass::Tag::balls:
      if (!(cls.ball_constant > 0.0)) {
        throw std::invalid_argument("ball constant must be > 0");
      }
      return cls.ball_constant;
  }
  throw std::logic_error("unreachable");
}

double b_constant(const FavorableClass& cls) {
  return std::max(1.0, isoperimetric_constant(cls));
}

BoundValue bentkus_bound(const FavorableClass& cls, double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  BoundValue bound;
  bound.symbol = BoundValue::ConstantSymbol::M;
  bound.c1 = b_constant(cls) * beta;
  bound.breakdown.push_back({"b_d * beta", 0.0, bound.c1, std::nullopt});
  return bound;
}

double raic_bound(double gamma_star, double kappa, double sum_third_moments,
                  bool symmetric_closure) {
  if (gamma_star < 0.0 || kappa < 0.0 || sum_third_moments < 0.0) {
    throw std::invalid_argument("raic inputs must be >= 0");
  }
  double factor = symmetric_closure ? 50.0 : 53.0;
  double scaled = 1.0 + factor * gamma_star * std::sqrt(1.0 + kappa);
  return std::max(27.0, scaled) * sum_third_moments;
}

BoundValue sup_prob_gap_bound(const FavorableClass& cls, double beta_norm,
                              long n) {
  if (beta_norm < 0.0) throw std::invalid_argument("beta_norm must be >= 0");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  BoundValue bound;
  bound.symbol = BoundValue::ConstantSymbol::M;
  bound.c1 = b_constant(cls) / std::sqrt(static_cast<double>(n)) * beta_norm;
  bound.breakdown.push_back(
      {"b_d / sqrt(n) * beta_norm", 0.0, bound.c1, std::nullopt});
  return bound;
}

double halfspace_perimeter_probe(const Eigen::VectorXd& a, double b,
                                 std::span<const double> epsilons) {
  double norm = a.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("direction must be nonzero");
  if (epsilons.empty()) throw std::invalid_argument("need at least one epsilon");
  // For A = {x : a.x <= b}, A^eps \ A is the slab b < a.x <= b + eps|a|,
  // whose standard normal mass is Phi(u + eps) - Phi(u) at u = b / |a|.
  double u = b / norm;
  double worst = 0.0;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilons must be > 0");
    double mass = normal_cdf(u + eps) - normal_cdf(u);
    worst = std::max(worst, mass / eps);
  }
  return worst;
}

}  // namespace cltb
