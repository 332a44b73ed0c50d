#pragma once

#include <optional>
#include <span>

#include "cltb/be_uniform.hpp"
#include "cltb/exact_law.hpp"
#include "cltb/function_spec.hpp"
#include "cltb/rng.hpp"

namespace cltb {

// Upper level set {x : f(x) >= t}, symbolically.
struct LevelSetDescriptor {
  enum class Kind { empty, full_space, set };
  Kind kind = Kind::empty;
  std::optional<FavorableSetInstance> set;

  static LevelSetDescriptor empty() { return {Kind::empty, std::nullopt}; }
  static LevelSetDescriptor full() { return {Kind::full_space, std::nullopt}; }
  static LevelSetDescriptor of(FavorableSetInstance s) {
    return {Kind::set, std::move(s)};
  }

  bool contains(const Eigen::VectorXd& x) const {
    if (kind == Kind::empty) return false;
    if (kind == Kind::full_space) return true;
    return set->contains(x);
  }
};

// Symbolic upper level set of an indicator / ridge / composed spec at
// level t (t may be +-inf). Throws std::invalid_argument for variants
// with no symbolic family (blackbox, linear combos, fourier).
LevelSetDescriptor upper_level_set(const FunctionSpec& f, double t);

struct QuasiconcavityWitness {
  Eigen::VectorXd x, y;
  double alpha = 0.0;
  double violation = 0.0;  // min{f(x), f(y)} - f(alpha x + (1-alpha) y)
};

struct QuasiconcavityResult {
  bool pass = true;
  std::optional<QuasiconcavityWitness> witness;
};

// Sampling-based falsification of f(ax + (1-a)y) >= min{f(x), f(y)} on a
// box. A pass is evidence, not a proof; a failure carries a witness whose
// violation exceeds the tolerance.
QuasiconcavityResult quasiconcavity_check(const FunctionSpec& f,
                                          const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi,
                                          long trials, RngStream& stream,
                                          double tol = 1e-9);

// g o f for a non-decreasing table g; level sets satisfy
// A'_t = A_{g^{-1}(t)} with the generalized inverse.
FunctionSpec monotone_compose(const FunctionSpec& f, MonotoneTable g);

// f / ||f||_inf. The norm is taken from the spec (indicator, table ridge,
// blackbox bound, ...) or passed explicitly; zero or infinite norms are
// rejected.
FunctionSpec normalize(const FunctionSpec& f,
                       std::optional<double> sup_norm = std::nullopt);

// Kolmogorov distance between two pushforward laws: exact over the merged
// jump points for discrete laws, the classical two-sample statistic over
// merged order statistics for samples.
double pushforward_kolmogorov(const ExactLaw& fs, const ExactLaw& fz);
double pushforward_kolmogorov(std::span<const double> sorted_a,
                              std::span<const double> sorted_b);

// 2 ||f||_inf * sup-level-set probability gap.
double level_set_bound(double sup_norm, double prob_gap);

// Linear combination f = sum lambda_j f_j with sum |lambda_j| <= c and all
// level sets in one favorable class:
//   (2 b_d c / sqrt n) * beta_norm * sup_j ||f_j||_inf.
double combo1_bound(double c, double sup_f_norm, const FavorableClass& cls,
                    double beta_norm, long n);

// Level sets that split into disjoint members of several classes:
//   (2 ||f||_inf / sqrt n) * (sum_j b_d(class_j)) * beta_norm.
double combo2_bound(std::span<const FavorableClass> classes, double sup_norm,
                    double beta_norm, long n);

}  // namespace cltb
