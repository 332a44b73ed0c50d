#pragma once

#include <span>
#include <vector>

#include "cltb/bound_value.hpp"
#include "cltb/univariate.hpp"

namespace cltb {

// Summands W_1..W_n and the offset t >= 0 of a ridge bound; B_n is the
// root of the summed variances.
struct RidgeBoundInput {
  std::vector<UnivariateSpec> summands;
  double t = 0.0;
  double bn = 0.0;

  static RidgeBoundInput make(std::vector<UnivariateSpec> summands, double t);
};

// Per-term truncated-moment bound on |P(S_n < x B_n) - Phi(x)|, as the
// coefficient of the absolute constant A:
//   sum_k [ E X_k^2 1{|X_k| > (1+|x|) B_n} / ((1+|x|)^2 B_n^2)
//         + E |X_k|^3 1{|X_k| <= (1+|x|) B_n} / ((1+|x|)^3 B_n^3) ].
BoundValue shevtsova_delta_bound(double x,
                                 std::span<const UnivariateSpec> summands);

// |E relu(S - t) - E relu(B Z - t)| <= A * c1 with
//   c1 = (1/B) sum E W^2 1{|W| >= t+B}
//      + (1/2) sum E |W|^3 1{|W| < t+B} / (t+B)^2.
BoundValue relu_bound(const RidgeBoundInput& input);

// Squared-relu version; the log-weighted component may be negative and is
// reported as-is in the breakdown.
BoundValue relu_sq_bound(const RidgeBoundInput& input);

}  // namespace cltb
