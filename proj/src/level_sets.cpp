#include "cltb/level_sets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cltb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LevelSetDescriptor upper_level_set(const FunctionSpec& f, double t) {
  if (const auto* ind = std::get_if<FunctionSpec::Indicator>(&f.node())) {
    if (t <= 0.0) return LevelSetDescriptor::full();
    if (t > 1.0) return LevelSetDescriptor::empty();
    return LevelSetDescriptor::of(ind->set);
  }
  if (const auto* ridge = std::get_if<FunctionSpec::Ridge>(&f.node())) {
    double u = (t == -kInf) ? -kInf
                            : (t == kInf)
                                  ? kInf
                                  : ridge->activation.generalized_inverse(t);
    if (u == -kInf) return LevelSetDescriptor::full();
    if (u == kInf) return LevelSetDescriptor::empty();
    // {x : a.x >= threshold + u}
    return LevelSetDescriptor::of(FavorableSetInstance::half_space(
        ridge->direction, ridge->threshold + u));
  }
  if (const auto* comp = std::get_if<FunctionSpec::Composed>(&f.node())) {
    double u = (t == -kInf)
                   ? -kInf
                   : (t == kInf) ? kInf : comp->g.generalized_inverse(t);
    if (u == -kInf) return LevelSetDescriptor::full();
    if (u == kInf) return LevelSetDescriptor::empty();
    return upper_level_set(*comp->inner, u);
  }
  throw std::invalid_argument(
      "upper_level_set: function variant has no symbolic level-set family");
}

QuasiconcavityResult quasiconcavity_check(const FunctionSpec& f,
                                          const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi,
                                          long trials, RngStream& stream,
                                          double tol) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw std::invalid_argument("box bounds must have matching dimensions");
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int d = static_cast<int>(lo.size());
  Eigen::VectorXd x(d), y(d), mid(d);
  for (long trial = 0; trial < trials; ++trial) {
    for (int i = 0; i < d; ++i) x[i] = stream.uniform(lo[i], hi[i]);
    for (int i = 0; i < d; ++i) y[i] = stream.uniform(lo[i], hi[i]);
    double alpha = stream.uniform01();
    mid = alpha * x + (1.0 - alpha) * y;
    double fmin = std::min(f.evaluate(x), f.evaluate(y));
    double violation = fmin - f.evaluate(mid);
    if (violation > tol) {
      return {false, QuasiconcavityWitness{x, y, alpha, violation}};
    }
  }
  return {true, std::nullopt};
}

FunctionSpec monotone_compose(const FunctionSpec& f, MonotoneTable g) {
  // Table validity (non-decreasing) is established at construction.
  return FunctionSpec::composed(f, std::move(g));
}

FunctionSpec normalize(const FunctionSpec& f, std::optional<double> sup_norm) {
  double m = sup_norm.value_or(f.sup_norm_bound());
  if (!(m > 0.0)) throw std::invalid_argument("normalize: ||f||_inf must be > 0");
  if (std::isinf(m)) {
    throw std::invalid_argument("normalize: ||f||_inf is not finite");
  }
  if (const auto* ridge = std::get_if<FunctionSpec::Ridge>(&f.node());
      ridge && ridge->activation.kind == Activation::Kind::table) {
    auto ys = ridge->activation.table->outputs();
    for (double& y : ys) y /= m;
    return FunctionSpec::ridge(
        Activation::from_table(MonotoneTable(ridge->activation.table->inputs(),
                                             std::move(ys))),
        ridge->direction, ridge->threshold);
  }
  if (const auto* combo = std::get_if<FunctionSpec::LinearCombo>(&f.node())) {
    std::vector<std::pair<double, FunctionSpec>> terms;
    terms.reserve(combo->terms.size());
    for (const auto& [w, sub] : combo->terms) terms.emplace_back(w / m, *sub);
    if (terms.size() == 1 && terms[0].first == 1.0) return terms[0].second;
    return FunctionSpec::linear_combo(std::move(terms));
  }
  if (const auto* bb = std::get_if<FunctionSpec::Blackbox>(&f.node())) {
    auto fn = bb->fn;
    return FunctionSpec::blackbox(
        [fn, m](const Eigen::VectorXd& x) { return fn(x) / m; },
        bb->sup_bound / m);
  }
  if (const auto* comp = std::get_if<FunctionSpec::Composed>(&f.node())) {
    // Rescaling the outer table keeps the symbolic family.
    auto ys = comp->g.outputs();
    for (double& y : ys) y /= m;
    return FunctionSpec::composed(*comp->inner,
                                  MonotoneTable(comp->g.inputs(), std::move(ys)));
  }
  if (m == 1.0) return f;
  return FunctionSpec::linear_combo({{1.0 / m, f}});
}

double pushforward_kolmogorov(const ExactLaw& fs, const ExactLaw& fz) {
  if (fs.size() == 0 || fz.size() == 0) {
    throw std::invalid_argument("empty law");
  }
  // Both CDFs are steps, so the sup sits on the merged jump points. The
  // survivor-side gap is checked too; atoms make P(X >= t) and
  // 1 - P(X <= t) differ pointwise even though the sups agree.
  std::vector<double> points;
  points.reserve(fs.size() + fz.size());
  points.insert(points.end(), fs.values.begin(), fs.values.end());
  points.insert(points.end(), fz.values.begin(), fz.values.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double sup = 0.0;
  for (double v : points) {
    sup = std::max(sup, std::abs(fs.cdf(v) - fz.cdf(v)));
    sup = std::max(sup, std::abs(fs.survivor(v) - fz.survivor(v)));
  }
  return sup;
}

double pushforward_kolmogorov(std::span<const double> sorted_a,
                              std::span<const double> sorted_b) {
  if (sorted_a.empty() || sorted_b.empty()) {
    throw std::invalid_argument("empty sample array");
  }
  const double na = static_cast<double>(sorted_a.size());
  const double nb = static_cast<double>(sorted_b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < sorted_a.size() && j < sorted_b.size()) {
    double v = std::min(sorted_a[i], sorted_b[j]);
    while (i < sorted_a.size() && sorted_a[i] <= v) ++i;
    while (j < sorted_b.size() && sorted_b[j] <= v) ++j;
    sup = std::max(sup, std::abs(i / na - j / nb));
  }
  return sup;
}

double level_set_bound(double sup_norm, double prob_gap) {
  if (!(sup_norm > 0.0) || !std::isfinite(sup_norm)) {
    throw std::invalid_argument("sup norm must be finite and > 0");
  }
  if (prob_gap < 0.0 || prob_gap > 1.0 + 1e-12) {
    throw std::invalid_argument("probability gap must lie in [0, 1]");
  }
  return 2.0 * sup_norm * prob_gap;
}

double combo1_bound(double c, double sup_f_norm, const FavorableClass& cls,
                    double beta_norm, long n) {
  if (c < 0.0 || sup_f_norm < 0.0 || beta_norm < 0.0) {
    throw std::invalid_argument("combo1 inputs must be >= 0");
  }
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return 2.0 * b_constant(cls) * c / std::sqrt(static_cast<double>(n)) *
         beta_norm * sup_f_norm;
}

double combo2_bound(std::span<const FavorableClass> classes, double sup_norm,
                    double beta_norm, long n) {
  if (classes.empty()) throw std::invalid_argument("need at least one class");
  if (sup_norm < 0.0 || beta_norm < 0.0) {
    throw std::invalid_argument("combo2 inputs must be >= 0");
  }
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  double sum_b = 0.0;
  for (const auto& cls : classes) sum_b += b_constant(cls);
  return 2.0 * sup_norm / std::sqrt(static_cast<double>(n)) * sum_b * beta_norm;
}

}  // namespace cltb
