#pragma once

#include <Eigen/Dense>

#include <span>

#include "cltb/bound_value.hpp"

namespace cltb {

// A favorable class of sets together with the data its isoperimetric
// constant needs: half-spaces, convex subsets of R^d, or Euclidean balls.
// The literature gives no explicit value for the ball-class constant, so
// it is configuration (default 1) rather than a claimed truth.
struct FavorableClass {
  enum class Tag { half_spaces, convex, balls };
  Tag tag = Tag::half_spaces;
  int d = 1;
  double ball_constant = 1.0;

  static FavorableClass half_spaces() { return {Tag::half_spaces, 1, 1.0}; }
  static FavorableClass convex(int d) { return {Tag::convex, d, 1.0}; }
  static FavorableClass balls(int d, double constant = 1.0) {
    return {Tag::balls, d, constant};
  }
};

// a_d of the class: (2 pi)^{-1/2} for half-spaces, 4 d^{1/4} for convex
// sets, the configured constant for balls.
double isoperimetric_constant(const FavorableClass& cls);

// b_d = max{1, a_d}.
double b_constant(const FavorableClass& cls);

// Uniform set-class bound: coefficient of M is b_d * beta, where beta is
// the sum of whitened third absolute moments of the (unnormalized) sum.
BoundValue bentkus_bound(const FavorableClass& cls, double beta);

// max{27, 1 + (53 or 50) * gamma_star * sqrt(1 + kappa)} * sum_third.
// Fully explicit: no free constant.
double raic_bound(double gamma_star, double kappa, double sum_third_moments,
                  bool symmetric_closure);

// sup_{A in class} |P(S in A) - P(Z in A)| <= M * (b_d / sqrt n) * beta_norm
// with beta_norm = (1/n) sum E |Sigma^{-1/2} X_i|^3.
BoundValue sup_prob_gap_bound(const FavorableClass& cls, double beta_norm,
                              long n);

// max over the given epsilons of phi{A^eps \ A} / eps for the half-space
// {x : a.x <= b} under the standard normal. Never exceeds (2 pi)^{-1/2}.
double halfspace_perimeter_probe(const Eigen::VectorXd& a, double b,
                                 std::span<const double> epsilons);

}  // namespace cltb
