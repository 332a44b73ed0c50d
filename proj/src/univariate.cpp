#include "cltb/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cltb/quadrature.hpp"

namespace cltb {

namespace {

constexpr double kMeanTol = 1e-12;
constexpr double kProbTol = 1e-12;

void validate_atoms(const std::vector<std::pair<double, double>>& atoms,
                    bool allow_degenerate) {
  if (atoms.empty()) throw std::invalid_argument("discrete spec needs atoms");
  double total = 0.0, mean = 0.0, m2 = 0.0;
  for (auto [v, p] : atoms) {
    if (!std::isfinite(v) || !std::isfinite(p)) {
      throw std::invalid_argument("non-finite atom");
    }
    if (p <= 0.0) throw std::invalid_argument("atom probabilities must be > 0");
    total += p;
    mean += v * p;
    m2 += v * v * p;
  }
  if (std::abs(total - 1.0) > kProbTol) {
    throw std::invalid_argument("atom probabilities must sum to 1");
  }
  if (std::abs(mean) > kMeanTol) {
    throw std::invalid_argument("discrete spec must have mean 0");
  }
  if (!allow_degenerate && m2 <= 0.0) {
    throw std::invalid_argument("degenerate (zero variance) spec rejected");
  }
}

double phi(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
}

bool in_side(double av, double c, Ineq ineq) {
  switch (ineq) {
    case Ineq::ge: return av >= c;
    case Ineq::gt: return av > c;
    case Ineq::le: return av <= c;
    case Ineq::lt: return av < c;
  }
  return false;
}

// Upper tail pieces for W ~ N(0, sigma^2), u = c / sigma:
//   E W^2 1{|W| >= c} = sigma^2 (2 u phi(u) + erfc(u / sqrt 2))
//   E |W|^3 1{|W| >= c} = sigma^3 * 2 phi(u) (u^2 + 2)
double gaussian_trunc(double sigma2, int power, double c, bool upper) {
  double sigma = std::sqrt(sigma2);
  double u = std::max(0.0, c) / sigma;
  double tail;
  if (power == 2) {
    tail = sigma2 * (2.0 * u * phi(u) + std::erfc(u / std::sqrt(2.0)));
  } else {
    tail = sigma2 * sigma * 2.0 * phi(u) * (u * u + 2.0);
  }
  if (upper) return tail;
  double total = (power == 2) ? sigma2
                              : sigma2 * sigma * 2.0 * std::sqrt(2.0 / 3.14159265358979323846);
  return std::max(0.0, total - tail);
}

}  // namespace

UnivariateSpec UnivariateSpec::discrete(
    std::vector<std::pair<double, double>> atoms) {
  validate_atoms(atoms, /*allow_degenerate=*/false);
  UnivariateSpec s;
  s.kind_ = Kind::discrete;
  std::sort(atoms.begin(), atoms.end());
  s.atoms_ = std::move(atoms);
  return s;
}

UnivariateSpec UnivariateSpec::discrete_allow_degenerate(
    std::vector<std::pair<double, double>> atoms) {
  validate_atoms(atoms, /*allow_degenerate=*/true);
  UnivariateSpec s;
  s.kind_ = Kind::discrete;
  std::sort(atoms.begin(), atoms.end());
  s.atoms_ = std::move(atoms);
  return s;
}

UnivariateSpec UnivariateSpec::gaussian(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("gaussian variance must be finite and > 0");
  }
  UnivariateSpec s;
  s.kind_ = Kind::gaussian;
  s.variance_ = variance;
  return s;
}

UnivariateSpec UnivariateSpec::rademacher(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("rademacher scale must be finite and > 0");
  }
  UnivariateSpec s;
  s.kind_ = Kind::rademacher;
  s.scale_ = scale;
  return s;
}

std::vector<std::pair<double, double>> UnivariateSpec::atoms() const {
  if (kind_ == Kind::discrete) return atoms_;
  if (kind_ == Kind::rademacher) return {{-scale_, 0.5}, {scale_, 0.5}};
  throw std::logic_error("gaussian spec has no atom list");
}

UnivariateSpec UnivariateSpec::scaled_by(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  switch (kind_) {
    case Kind::gaussian: return gaussian(variance_ * c * c);
    case Kind::rademacher: return rademacher(scale_ * c);
    case Kind::discrete: {
      auto scaled = atoms_;
      for (auto& [v, p] : scaled) v *= c;
      return discrete_allow_degenerate(std::move(scaled));
    }
  }
  throw std::logic_error("unreachable");
}

double second_moment(const UnivariateSpec& spec) {
  switch (spec.kind()) {
    case UnivariateSpec::Kind::gaussian: return spec.gaussian_variance();
    case UnivariateSpec::Kind::rademacher:
      return spec.rademacher_scale() * spec.rademacher_scale();
    case UnivariateSpec::Kind::discrete: {
      double m2 = 0.0;
      for (auto [v, p] : spec.atoms()) m2 += v * v * p;
      return m2;
    }
  }
  return 0.0;
}

double truncated_abs_moment(const UnivariateSpec& spec, int power, double c,
                            Ineq ineq, bool with_log) {
  if (power != 2 && power != 3) {
    throw std::invalid_argument("power must be 2 or 3");
  }
  if (spec.kind() != UnivariateSpec::Kind::gaussian) {
    double acc = 0.0;
    for (auto [v, p] : spec.atoms()) {
      double av = std::abs(v);
      if (!in_side(av, c, ineq)) continue;
      double term = (power == 2) ? v * v : av * av * av;
      if (with_log) term *= std::log(av);
      acc += term * p;
    }
    return acc;
  }
  // Gaussian: the boundary carries no mass, so ge==gt and le==lt.
  bool upper = (ineq == Ineq::ge || ineq == Ineq::gt);
  double sigma2 = spec.gaussian_variance();
  if (!with_log) return gaussian_trunc(sigma2, power, std::max(0.0, c), upper);
  // E W^p ln|W| over the requested side, by symmetric half-line quadrature.
  double sigma = std::sqrt(sigma2);
  double lo = upper ? std::max(0.0, c) : 0.0;
  double hi = upper ? std::numeric_limits<double>::infinity() : std::max(0.0, c);
  auto f = [power](double w) {
    if (w <= 0.0) return 0.0;
    double base = (power == 2) ? w * w : w * w * w;
    return base * std::log(w);
  };
  return 2.0 * gaussian_interval_integral(f, sigma, lo, hi);
}

double truncated_second_moment(const UnivariateSpec& spec, double c,
                               TruncationSide side) {
  if (c < 0.0) throw std::invalid_argument("threshold must be >= 0");
  return truncated_abs_moment(
      spec, 2, c, side == TruncationSide::at_or_above ? Ineq::ge : Ineq::lt);
}

double truncated_third_moment(const UnivariateSpec& spec, double c,
                              TruncationSide side) {
  if (c < 0.0) throw std::invalid_argument("threshold must be >= 0");
  return truncated_abs_moment(
      spec, 3, c, side == TruncationSide::at_or_above ? Ineq::ge : Ineq::lt);
}

double log_weighted_truncated_second_moment(const UnivariateSpec& spec,
                                            double c) {
  if (!(c > 0.0)) {
    throw std::invalid_argument(
        "log-weighted truncation requires c > 0 (ln 0 undefined at the atom)");
  }
  return truncated_abs_moment(spec, 2, c, Ineq::ge, /*with_log=*/true);
}

std::vector<double> sample(const UnivariateSpec& spec, RngStream& stream,
                           std::int64_t count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  switch (spec.kind()) {
    case UnivariateSpec::Kind::gaussian: {
      double sigma = std::sqrt(spec.gaussian_variance());
      for (std::int64_t i = 0; i < count; ++i) out.push_back(sigma * stream.normal());
      break;
    }
    case UnivariateSpec::Kind::rademacher: {
      double s = spec.rademacher_scale();
      for (std::int64_t i = 0; i < count; ++i) {
        out.push_back((stream.next_u64() & 1ull) ? s : -s);
      }
      break;
    }
    case UnivariateSpec::Kind::discrete: {
      auto atoms = spec.atoms();
      std::vector<double> cum(atoms.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        acc += atoms[i].second;
        cum[i] = acc;
      }
      cum.back() = 1.0;
      for (std::int64_t i = 0; i < count; ++i) {
        double u = stream.uniform01();
        std::size_t idx =
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (idx >= atoms.size()) idx = atoms.size() - 1;
        out.push_back(atoms[idx].first);
      }
      break;
    }
  }
  return out;
}

MomentSummary make_moment_summary(std::span<const UnivariateSpec> summands,
                                  bool with_beta) {
  if (summands.empty()) throw std::invalid_argument("empty summand list");
  MomentSummary ms;
  ms.sigma2.reserve(summands.size());
  for (const auto& s : summands) {
    double v = second_moment(s);
    ms.sigma2.push_back(v);
    ms.bn2 += v;
  }
  if (!(ms.bn2 > 0.0)) throw std::invalid_argument("B_n^2 must be > 0");
  ms.bn = std::sqrt(ms.bn2);
  if (with_beta) {
    ms.beta.reserve(summands.size());
    double bn3 = ms.bn2 * ms.bn;
    for (const auto& s : summands) {
      ms.beta.push_back(
          truncated_third_moment(s, 0.0, TruncationSide::at_or_above) / bn3);
    }
  }
  return ms;
}

}  // namespace cltb
