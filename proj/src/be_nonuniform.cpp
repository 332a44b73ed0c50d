#include "cltb/be_nonuniform.hpp"

#include <cmath>
#include <stdexcept>

namespace cltb {

RidgeBoundInput RidgeBoundInput::make(std::vector<UnivariateSpec> summands,
                                      double t) {
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  RidgeBoundInput input;
  input.t = t;
  input.bn = make_moment_summary(summands).bn;
  input.summands = std::move(summands);
  return input;
}

BoundValue shevtsova_delta_bound(double x,
                                 std::span<const UnivariateSpec> summands) {
  MomentSummary ms = make_moment_summary(summands);
  const double c = (1.0 + std::abs(x)) * ms.bn;
  const double denom2 = c * c;
  const double denom3 = c * c * c;
  double tail2 = 0.0, body3 = 0.0;
  for (const auto& s : summands) {
    // The statement splits strictly at the threshold: > for the tail,
    // <= for the body.
    tail2 += truncated_abs_moment(s, 2, c, Ineq::gt) / denom2;
    body3 += truncated_abs_moment(s, 3, c, Ineq::le) / denom3;
  }
  BoundValue bound;
  bound.symbol = BoundValue::ConstantSymbol::A;
  bound.c1 = tail2 + body3;
  bound.breakdown.push_back({"tail_second_moment", 0.0, tail2, std::nullopt});
  bound.breakdown.push_back({"body_third_moment", 0.0, body3, std::nullopt});
  return bound;
}

BoundValue relu_bound(const RidgeBoundInput& input) {
  const double cut = input.t + input.bn;
  double tail2 = 0.0, body3 = 0.0;
  for (const auto& s : input.summands) {
    tail2 += truncated_second_moment(s, cut, TruncationSide::at_or_above);
    body3 += truncated_third_moment(s, cut, TruncationSide::below);
  }
  BoundValue bound;
  bound.symbol = BoundValue::ConstantSymbol::A;
  double comp1 = tail2 / input.bn;
  double comp2 = 0.5 * body3 / (cut * cut);
  bound.c1 = comp1 + comp2;
  bound.breakdown.push_back({"tail_second_moment", 0.0, comp1, std::nullopt});
  bound.breakdown.push_back({"body_third_moment", 0.0, comp2, std::nullopt});
  return bound;
}

BoundValue relu_sq_bound(const RidgeBoundInput& input) {
  const double cut = input.t + input.bn;
  const double t_over_b = input.t / input.bn;
  double log_tail2 = 0.0, tail2 = 0.0, body3 = 0.0;
  for (const auto& s : input.summands) {
    log_tail2 += truncated_abs_moment(s, 2, cut, Ineq::ge, /*with_log=*/true);
    tail2 += truncated_second_moment(s, cut, TruncationSide::at_or_above);
    body3 += truncated_third_moment(s, cut, TruncationSide::below);
  }
  BoundValue bound;
  bound.symbol = BoundValue::ConstantSymbol::A;
  double comp1 = 2.0 * log_tail2;
  double comp2 = 2.0 * (1.0 + std::log1p(t_over_b)) * tail2;
  double comp3 = 2.0 / (input.bn * (1.0 + t_over_b)) * body3;
  bound.c1 = comp1 + comp2 + comp3;
  bound.breakdown.push_back({"log_tail_second_moment", 0.0, comp1, std::nullopt});
  bound.breakdown.push_back({"tail_second_moment", 0.0, comp2, std::nullopt});
  bound.breakdown.push_back({"body_third_moment", 0.0, comp3, std::nullopt});
  return bound;
}

}  // namespace cltb
