#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cltb/rng.hpp"

namespace cltb {

enum class TruncationSide { at_or_above, below };

// Exact description of one mean-zero univariate summand. Discrete specs
// carry their full atom list; gaussians carry the variance. Values are
// immutable after construction and safe to share across threads.
class UnivariateSpec {
 public:
  enum class Kind { discrete, gaussian, rademacher };

  static UnivariateSpec discrete(std::vector<std::pair<double, double>> atoms);
  static UnivariateSpec gaussian(double variance);
  static UnivariateSpec rademacher(double scale);

  // Construction path for projections, which may legitimately collapse a
  // summand to a point mass at zero. User-facing constructors reject
  // degenerate specs; every bound only needs the aggregate B_n > 0.
  static UnivariateSpec discrete_allow_degenerate(
      std::vector<std::pair<double, double>> atoms);

  Kind kind() const { return kind_; }
  bool is_discrete_like() const { return kind_ != Kind::gaussian; }
  // Atom list; for rademacher the two-point expansion.
  std::vector<std::pair<double, double>> atoms() const;
  double gaussian_variance() const { return variance_; }
  double rademacher_scale() const { return scale_; }

  UnivariateSpec scaled_by(double c) const;

 private:
  UnivariateSpec() = default;

  Kind kind_ = Kind::gaussian;
  std::vector<std::pair<double, double>> atoms_;  // discrete only
  double variance_ = 0.0;                         // gaussian only
  double scale_ = 0.0;                            // rademacher only
};

double second_moment(const UnivariateSpec& spec);

// E W^2 1{|W| >= c} (at_or_above) or E W^2 1{|W| < c} (below). Exact for
// discrete specs, closed form via erfc for gaussians. Atoms exactly at
// the threshold count as at_or_above.
double truncated_second_moment(const UnivariateSpec& spec, double c,
                               TruncationSide side);

// Same split for E |W|^3.
double truncated_third_moment(const UnivariateSpec& spec, double c,
                              TruncationSide side);

// E W^2 ln|W| 1{|W| >= c}; requires c > 0 (the event must exclude 0).
// May be negative when mass lies in (c, 1).
double log_weighted_truncated_second_moment(const UnivariateSpec& spec,
                                            double c);

// Internal truncation with explicit boundary handling; used where a bound
// statement is written with a strict or closed inequality. power is 2 or 3
// (absolute moments); with_log multiplies by ln|W|.
enum class Ineq { ge, gt, le, lt };
double truncated_abs_moment(const UnivariateSpec& spec, int power, double c,
                            Ineq ineq, bool with_log = false);

// i.i.d. draws; identical (seed, stream) gives bit-identical output.
std::vector<double> sample(const UnivariateSpec& spec, RngStream& stream,
                           std::int64_t count);

// Per-summand variances and B_n^2 = sum sigma_k^2 for a summand list;
// with_beta also fills the whitened third moments E |W_k / B_n|^3.
struct MomentSummary {
  std::vector<double> sigma2;
  double bn2 = 0.0;
  double bn = 0.0;
  std::vector<double> beta;  // empty unless requested
};
MomentSummary make_moment_summary(std::span<const UnivariateSpec> summands,
                                  bool with_beta = false);

}  // namespace cltb
