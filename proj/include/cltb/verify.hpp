#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cltb/bound_value.hpp"
#include "cltb/exact_law.hpp"
#include "cltb/function_spec.hpp"
#include "cltb/quadrature.hpp"
#include "cltb/univariate.hpp"
#include "cltb/vector_sequence.hpp"

namespace cltb {

// Exact law of sum W_k by iterated convolution with atom merging at 1e-12
// value tolerance. All summands must be discrete; the running product of
// support sizes is capped at 1e7.
ExactLaw exact_sum_law(std::span<const UnivariateSpec> summands);

// sum f(v) p over the support.
double exact_expectation(const ExactLaw& law,
                         const std::function<double(double)>& f);

// Scalar test function with the kink locations its quadrature needs.
struct ScalarFunction {
  std::function<double(double)> fn;
  std::vector<double> breakpoints;
};

// |E f(sum W_k) - E f(B_n Z)| for discrete summands: exact enumeration on
// one side, split Gaussian quadrature on the other.
double exact_delta(const ScalarFunction& f,
                   std::span<const UnivariateSpec> summands);

// Same through a FunctionSpec: d=1 sequences evaluate directly; ridge and
// half-space functions over d>1 sequences reduce along their direction.
double exact_delta(const FunctionSpec& f, const VectorSequenceSpec& seq);

// Delta for atomic-Fourier functions in any dimension via characteristic
// functions (both expectations in closed form).
double exact_delta_fourier(const FourierAtomicSpec& f,
                           const VectorSequenceSpec& seq);

// Law of f(B Z) for a symbolic univariate f: survivor function plus the
// atom list (flat pieces of the activation carry point mass).
struct PushforwardCdf {
  std::function<double(double)> survivor;  // t -> P(f(BZ) >= t)
  std::vector<std::pair<double, double>> atoms;

  double atom_mass_at(double t) const;
};
PushforwardCdf gaussian_pushforward(const FunctionSpec& f, double b);

// sup_t |P(f(S) >= t) - P(f(B_n Z) >= t)| computed exactly: the supremum
// of a piecewise-monotone difference sits at the jump points of either
// pushforward, evaluated from both sides. This is the level-set gap of
// the bound with no free constant.
double pushforward_gap_exact(const FunctionSpec& f,
                             std::span<const UnivariateSpec> summands);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of |E f(S) - E f(Z)| with independent substreams
// for the two expectations. Sampling is sharded by substream index and
// reduced in shard order with compensated summation, so the result does
// not depend on how shards are scheduled.
MCEstimate mc_delta(const FunctionSpec& f, const VectorSequenceSpec& seq,
                    std::int64_t samples, std::uint64_t seed);

enum class Verdict { holds_at_unit, holds_within_constant, violated_even_scaled };

struct VerdictPolicy {
  double mc_z = 4.0;         // error-bar width in standard errors
  double constant = 1.0;     // value of the absolute constant to check at
  double abs_slack = 1e-12;  // slack for exact comparisons
};

struct LhsValue {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  bool exact = true;

  static LhsValue from_exact(double v) { return {v, 0.0, 0, 0, true}; }
  static LhsValue from_mc(const MCEstimate& e) {
    return {e.mean, e.std_error, e.n_samples, e.seed, false};
  }
};

struct VerdictReport {
  LhsValue lhs;
  BoundValue rhs;
  double ratio_at_unit = 0.0;  // lhs / (c0 + c1)
  Verdict verdict = Verdict::holds_at_unit;
  double scale_constant = 1.0;  // smallest K with lhs <= c0 + c1 K
  std::string notes;
};

VerdictReport verify_inequality(const LhsValue& lhs, const BoundValue& rhs,
                                const VerdictPolicy& policy = {});

const char* verdict_name(Verdict v);

}  // namespace cltb
