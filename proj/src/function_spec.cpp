#include "cltb/function_spec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cltb/errors.hpp"

namespace cltb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MonotoneTable::MonotoneTable(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.empty() || xs_.size() != ys_.size()) {
    throw std::invalid_argument("table needs matching nonempty knot lists");
  }
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
    if (!(xs_[i] < xs_[i + 1])) {
      throw std::invalid_argument("table inputs must be strictly increasing");
    }
    if (ys_[i] > ys_[i + 1]) {
      throw std::invalid_argument("table outputs must be non-decreasing");
    }
  }
}

double MonotoneTable::operator()(double u) const {
  if (u <= xs_.front()) return ys_.front();
  if (u >= xs_.back()) return ys_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), u);
  std::size_t j = it - xs_.begin();  // xs_[j-1] <= u < xs_[j]
  double w = (u - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
  return ys_[j - 1] + w * (ys_[j] - ys_[j - 1]);
}

double MonotoneTable::generalized_inverse(double t) const {
  if (t <= ys_.front()) return -kInf;
  if (t > ys_.back()) return kInf;
  auto it = std::lower_bound(ys_.begin(), ys_.end(), t);
  std::size_t j = it - ys_.begin();  // smallest j with ys_[j] >= t; j >= 1
  // ys_[j-1] < t <= ys_[j], so the segment is strictly increasing there.
  return xs_[j - 1] +
         (t - ys_[j - 1]) / (ys_[j] - ys_[j - 1]) * (xs_[j] - xs_[j - 1]);
}

std::vector<MonotoneTable::FlatRun> MonotoneTable::flat_runs() const {
  std::vector<FlatRun> runs;
  if (ys_.front() == ys_.back()) {
    runs.push_back({-kInf, kInf, ys_.front()});
    return runs;
  }
  const std::size_t n = xs_.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t k = i;
    while (k + 1 < n && ys_[k + 1] == ys_[i]) ++k;
    const bool left_tail = (i == 0);
    const bool right_tail = (k == n - 1);
    if (left_tail || right_tail || k > i) {
      runs.push_back({left_tail ? -kInf : xs_[i], right_tail ? kInf : xs_[k],
                      ys_[i]});
    }
    i = k + 1;
  }
  return runs;
}

double Activation::operator()(double u) const {
  switch (kind) {
    case Kind::relu: return std::max(0.0, u);
    case Kind::relu_sq: {
      double r = std::max(0.0, u);
      return r * r;
    }
    case Kind::table: return (*table)(u);
  }
  return 0.0;
}

double Activation::generalized_inverse(double t) const {
  switch (kind) {
    case Kind::relu: return t <= 0.0 ? -kInf : t;
    case Kind::relu_sq: return t <= 0.0 ? -kInf : std::sqrt(t);
    case Kind::table: return table->generalized_inverse(t);
  }
  return 0.0;
}

double Activation::sup_abs() const {
  if (kind == Kind::table) {
    return std::max(std::abs(table->min_output()),
                    std::abs(table->max_output()));
  }
  return kInf;
}

FavorableSetInstance FavorableSetInstance::half_space(Eigen::VectorXd a,
                                                      double b) {
  if (a.size() == 0 || a.norm() == 0.0) {
    throw std::invalid_argument("half-space direction must be nonzero");
  }
  FavorableSetInstance s;
  s.v_ = HalfSpace{std::move(a), b};
  return s;
}

FavorableSetInstance FavorableSetInstance::ball(Eigen::VectorXd center,
                                                double radius) {
  if (radius < 0.0) throw std::invalid_argument("radius must be >= 0");
  FavorableSetInstance s;
  s.v_ = Ball{std::move(center), radius};
  return s;
}

FavorableSetInstance FavorableSetInstance::polytope(Polytope faces) {
  if (faces.empty()) throw std::invalid_argument("polytope needs faces");
  for (const auto& f : faces) {
    if (f.a.size() == 0 || f.a.norm() == 0.0) {
      throw std::invalid_argument("half-space direction must be nonzero");
    }
  }
  FavorableSetInstance s;
  s.v_ = std::move(faces);
  return s;
}

bool FavorableSetInstance::contains(const Eigen::VectorXd& x) const {
  return std::visit(
      [&](const auto& set) -> bool {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          for (const auto& f : set) {
            if (!f.contains(x)) return false;
          }
          return true;
        } else {
          return set.contains(x);
        }
      },
      v_);
}

int FavorableSetInstance::dimension() const {
  return std::visit(
      [](const auto& set) -> int {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
          return static_cast<int>(set.a.size());
        } else if constexpr (std::is_same_v<T, Ball>) {
          return static_cast<int>(set.center.size());
        } else {
          return static_cast<int>(set.front().a.size());
        }
      },
      v_);
}

FunctionSpec FunctionSpec::indicator(FavorableSetInstance set) {
  return FunctionSpec(Indicator{std::move(set)});
}

FunctionSpec FunctionSpec::ridge(Activation act, Eigen::VectorXd direction,
                                 double threshold) {
  if (direction.size() == 0 || direction.norm() == 0.0) {
    throw std::invalid_argument("ridge direction must be nonzero");
  }
  return FunctionSpec(Ridge{std::move(act), std::move(direction), threshold});
}

FunctionSpec FunctionSpec::blackbox(
    std::function<double(const Eigen::VectorXd&)> fn, double sup_bound) {
  if (!(sup_bound > 0.0)) {
    throw std::invalid_argument("blackbox sup bound must be > 0");
  }
  return FunctionSpec(Blackbox{std::move(fn), sup_bound});
}

FunctionSpec FunctionSpec::linear_combo(
    std::vector<std::pair<double, FunctionSpec>> terms) {
  if (terms.empty()) throw std::invalid_argument("empty combination");
  LinearCombo combo;
  for (auto& [w, f] : terms) {
    if (!std::isfinite(w)) throw std::invalid_argument("non-finite coefficient");
    combo.abs_coeff_sum += std::abs(w);
    combo.terms.emplace_back(w, std::make_shared<const FunctionSpec>(std::move(f)));
  }
  return FunctionSpec(std::move(combo));
}

FunctionSpec FunctionSpec::fourier(FourierAtomicSpec spec) {
  if (spec.atoms.empty()) throw std::invalid_argument("fourier spec needs atoms");
  for (const auto& atom : spec.atoms) {
    if (atom.omega.size() != spec.atoms.front().omega.size()) {
      throw std::invalid_argument("inconsistent frequency dimensions");
    }
  }
  return FunctionSpec(Fourier{std::move(spec)});
}

FunctionSpec FunctionSpec::composed(FunctionSpec inner, MonotoneTable g) {
  return FunctionSpec(
      Composed{std::make_shared<const FunctionSpec>(std::move(inner)),
               std::move(g)});
}

double FunctionSpec::evaluate(const Eigen::VectorXd& x) const {
  return std::visit(
      [&](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Indicator>) {
          return node.set.contains(x) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Ridge>) {
          return node.activation(node.direction.dot(x) - node.threshold);
        } else if constexpr (std::is_same_v<T, Blackbox>) {
          double v = node.fn(x);
          if (std::abs(v) > node.sup_bound * (1.0 + 1e-12)) {
            throw numeric_error("blackbox value exceeds its declared bound");
          }
          return v;
        } else if constexpr (std::is_same_v<T, LinearCombo>) {
          double acc = 0.0;
          for (const auto& [w, f] : node.terms) acc += w * f->evaluate(x);
          return acc;
        } else if constexpr (std::is_same_v<T, Fourier>) {
          return node.spec.evaluate(x);
        } else {
          return node.g(node.inner->evaluate(x));
        }
      },
      node_);
}

double FunctionSpec::evaluate1d(double x) const {
  Eigen::VectorXd v(1);
  v[0] = x;
  return evaluate(v);
}

std::optional<int> FunctionSpec::dimension() const {
  return std::visit(
      [](const auto& node) -> std::optional<int> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Indicator>) {
          return node.set.dimension();
        } else if constexpr (std::is_same_v<T, Ridge>) {
          return static_cast<int>(node.direction.size());
        } else if constexpr (std::is_same_v<T, Blackbox>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, LinearCombo>) {
          for (const auto& [w, f] : node.terms) {
            if (auto d = f->dimension()) return d;
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Fourier>) {
          return node.spec.dimension();
        } else {
          return node.inner->dimension();
        }
      },
      node_);
}

double FunctionSpec::sup_norm_bound() const {
  return std::visit(
      [](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Indicator>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Ridge>) {
          return node.activation.sup_abs();
        } else if constexpr (std::is_same_v<T, Blackbox>) {
          return node.sup_bound;
        } else if constexpr (std::is_same_v<T, LinearCombo>) {
          double acc = 0.0;
          for (const auto& [w, f] : node.terms) {
            acc += std::abs(w) * f->sup_norm_bound();
          }
          return acc;
        } else if constexpr (std::is_same_v<T, Fourier>) {
          return node.spec.amplitude_mass();
        } else {
          return std::max(std::abs(node.g.min_output()),
                          std::abs(node.g.max_output()));
        }
      },
      node_);
}

bool FunctionSpec::is_symbolic() const {
  return std::visit(
      [](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Indicator> || std::is_same_v<T, Ridge>) {
          return true;
        } else if constexpr (std::is_same_v<T, Composed>) {
          return node.inner->is_symbolic();
        } else {
          return false;
        }
      },
      node_);
}

std::vector<double> FunctionSpec::scalar_breakpoints() const {
  return std::visit(
      [this](const auto& node) -> std::vector<double> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Indicator>) {
          const auto& set = node.set.value();
          if (const auto* hs = std::get_if<HalfSpace>(&set)) {
            if (hs->a.size() != 1) return {};
            return {hs->b / hs->a[0]};
          }
          if (const auto* ball = std::get_if<Ball>(&set)) {
            if (ball->center.size() != 1) return {};
            return {ball->center[0] - ball->radius,
                    ball->center[0] + ball->radius};
          }
          const auto& faces = std::get<FavorableSetInstance::Polytope>(set);
          std::vector<double> cuts;
          for (const auto& f : faces) {
            if (f.a.size() == 1) cuts.push_back(f.b / f.a[0]);
          }
          return cuts;
        } else if constexpr (std::is_same_v<T, Ridge>) {
          if (node.direction.size() != 1) return {};
          double a = node.direction[0];
          std::vector<double> cuts;
          if (node.activation.kind == Activation::Kind::table) {
            for (double x : node.activation.table->inputs()) {
              cuts.push_back((node.threshold + x) / a);
            }
          } else {
            cuts.push_back(node.threshold / a);
          }
          return cuts;
        } else if constexpr (std::is_same_v<T, LinearCombo>) {
          std::vector<double> cuts;
          for (const auto& [w, f] : node.terms) {
            auto sub = f->scalar_breakpoints();
            cuts.insert(cuts.end(), sub.begin(), sub.end());
          }
          return cuts;
        } else if constexpr (std::is_same_v<T, Composed>) {
          std::vector<double> cuts = node.inner->scalar_breakpoints();
          // Pull g's knot preimages back through a symbolic inner.
          if (const auto* ridge = std::get_if<Ridge>(&node.inner->node());
              ridge && ridge->direction.size() == 1) {
            for (double y : node.g.inputs()) {
              double u = ridge->activation.generalized_inverse(y);
              if (std::isfinite(u)) {
                cuts.push_back((ridge->threshold + u) / ridge->direction[0]);
              }
            }
          }
          return cuts;
        } else {
          return {};
        }
      },
      node_);
}

}  // namespace cltb
