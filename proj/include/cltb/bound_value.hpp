#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cltb {

// Affine form c0 + c1 * K in an unspecified absolute constant K (the "M"
// of the uniform set-class bound or the "A" of the non-uniform ones).
// The breakdown lists named components summing to (c0, c1).
struct BoundValue {
  enum class ConstantSymbol { none, M, A };

  struct Component {
    std::string name;
    double c0 = 0.0;
    double c1 = 0.0;
    std::optional<Eigen::VectorXd> argmax;  // maximizer, when from a search
  };

  double c0 = 0.0;
  double c1 = 0.0;
  ConstantSymbol symbol = ConstantSymbol::none;
  std::vector<Component> breakdown;

  double total_at(double constant) const { return c0 + c1 * constant; }

  // Components must sum to the totals within 1e-12.
  void check_breakdown() const;
};

}  // namespace cltb
