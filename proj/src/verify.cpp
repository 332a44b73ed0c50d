#include "cltb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cltb/errors.hpp"
#include "cltb/level_sets.hpp"

namespace cltb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kSupportCap = 10'000'000;

struct KahanSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// P(B Z in descriptor) for one-dimensional symbolic level sets.
double gaussian_measure_1d(const LevelSetDescriptor& desc, double b) {
  if (desc.kind == LevelSetDescriptor::Kind::empty) return 0.0;
  if (desc.kind == LevelSetDescriptor::Kind::full_space) return 1.0;
  const auto& v = desc.set->value();
  if (const auto* hs = std::get_if<HalfSpace>(&v)) {
    if (hs->a.size() != 1) throw std::invalid_argument("set is not univariate");
    double a = hs->a[0];
    double cut = hs->b / a;
    return a > 0 ? normal_tail(cut / b) : normal_cdf(cut / b);
  }
  if (const auto* ball = std::get_if<Ball>(&v)) {
    if (ball->center.size() != 1) {
      throw std::invalid_argument("set is not univariate");
    }
    double lo = ball->center[0] - ball->radius;
    double hi = ball->center[0] + ball->radius;
    return std::max(0.0, normal_cdf(hi / b) - normal_cdf(lo / b));
  }
  const auto& faces = std::get<FavorableSetInstance::Polytope>(v);
  double lo = -kInf, hi = kInf;
  for (const auto& f : faces) {
    if (f.a.size() != 1) throw std::invalid_argument("set is not univariate");
    double cut = f.b / f.a[0];
    if (f.a[0] > 0) {
      lo = std::max(lo, cut);
    } else {
      hi = std::min(hi, cut);
    }
  }
  if (lo >= hi) return 0.0;
  double chi = std::isinf(hi) ? 1.0 : normal_cdf(hi / b);
  double clo = std::isinf(lo) ? 0.0 : normal_cdf(lo / b);
  return std::max(0.0, chi - clo);
}

void append_merged(std::vector<std::pair<double, double>>& atoms, double v,
                   double p) {
  if (p <= 0.0) return;
  for (auto& [av, ap] : atoms) {
    if (av == v) {
      ap += p;
      return;
    }
  }
  atoms.emplace_back(v, p);
}

}  // namespace

ExactLaw exact_sum_law(std::span<const UnivariateSpec> summands) {
  if (summands.empty()) throw std::invalid_argument("empty summand list");
  for (const auto& s : summands) {
    if (!s.is_discrete_like()) {
      throw std::invalid_argument("exact_sum_law needs discrete summands");
    }
  }
  ExactLaw acc = ExactLaw::from_atoms(summands.front().atoms());
  for (std::size_t k = 1; k < summands.size(); ++k) {
    auto next = summands[k].atoms();
    if (static_cast<std::int64_t>(acc.size()) *
            static_cast<std::int64_t>(next.size()) >
        kSupportCap) {
      throw numeric_error("exact_sum_law: support size exceeds 1e7");
    }
    std::vector<std::pair<double, double>> conv;
    conv.reserve(acc.size() * next.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
      for (auto [v, p] : next) {
        conv.emplace_back(acc.values[i] + v, acc.probs[i] * p);
      }
    }
    acc = ExactLaw::from_atoms(std::move(conv));
  }
  return acc;
}

double exact_expectation(const ExactLaw& law,
                         const std::function<double(double)>& f) {
  KahanSum sum;
  for (std::size_t i = 0; i < law.size(); ++i) {
    double term = f(law.values[i]);
    if (!std::isfinite(term)) {
      throw std::invalid_argument("f is not finite on the support");
    }
    sum.add(term * law.probs[i]);
  }
  return sum.sum;
}

double exact_delta(const ScalarFunction& f,
                   std::span<const UnivariateSpec> summands) {
  ExactLaw law = exact_sum_law(summands);
  double bn = make_moment_summary(summands).bn;
  double lhs = exact_expectation(law, f.fn);
  double rhs =
      gaussian_expectation(f.fn, bn, std::span<const double>(f.breakpoints));
  return std::abs(lhs - rhs);
}

double exact_delta(const FunctionSpec& f, const VectorSequenceSpec& seq) {
  Eigen::VectorXd direction;
  std::function<double(double)> profile;
  if (seq.dimension() == 1) {
    direction = Eigen::VectorXd::Ones(1);
    profile = [&f](double u) { return f.evaluate1d(u); };
  } else if (const auto* ridge = std::get_if<FunctionSpec::Ridge>(&f.node())) {
    direction = ridge->direction;
    const Activation act = ridge->activation;
    const double threshold = ridge->threshold;
    profile = [act, threshold](double u) { return act(u - threshold); };
  } else {
    throw std::invalid_argument(
        "exact_delta needs a univariate sequence or a ridge function");
  }
  auto summands = projected_spec(seq, direction);
  ScalarFunction sf;
  sf.fn = std::move(profile);
  if (seq.dimension() == 1) {
    sf.breakpoints = f.scalar_breakpoints();
  } else if (const auto* ridge = std::get_if<FunctionSpec::Ridge>(&f.node())) {
    if (ridge->activation.kind == Activation::Kind::table) {
      for (double x : ridge->activation.table->inputs()) {
        sf.breakpoints.push_back(ridge->threshold + x);
      }
    } else {
      sf.breakpoints.push_back(ridge->threshold);
    }
  }
  return exact_delta(sf, summands);
}

double exact_delta_fourier(const FourierAtomicSpec& f,
                           const VectorSequenceSpec& seq) {
  if (f.dimension() != seq.dimension()) {
    throw std::invalid_argument("dimension mismatch");
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(seq.size()));
  double e_s_total = 0.0, e_z_total = 0.0;
  for (const auto& atom : f.atoms) {
    // E e^{i w.S} is a product of per-summand characteristic functions.
    std::complex<double> char_s = 1.0;
    for (const auto& summand : seq.summands()) {
      if (const auto* g = std::get_if<VectorSummand::Gaussian>(&summand.value)) {
        double q = atom.omega.dot(g->covariance * atom.omega);
        char_s *= std::exp(-0.5 * q * inv_sqrt_n * inv_sqrt_n);
      } else {
        const auto& d = std::get<VectorSummand::Discrete>(summand.value);
        std::complex<double> phi = 0.0;
        for (std::size_t i = 0; i < d.points.size(); ++i) {
          double phase = atom.omega.dot(d.points[i]) * inv_sqrt_n;
          phi += d.probs[i] * std::polar(1.0, phase);
        }
        char_s *= phi;
      }
    }
    double q = atom.omega.dot(seq.sigma() * atom.omega);
    double char_z = std::exp(-0.5 * q);
    e_s_total += (atom.amplitude * char_s).real();
    e_z_total += atom.amplitude.real() * char_z;
  }
  return std::abs(e_s_total - e_z_total);
}

double PushforwardCdf::atom_mass_at(double t) const {
  for (auto [v, p] : atoms) {
    if (v == t) return p;
  }
  return 0.0;
}

PushforwardCdf gaussian_pushforward(const FunctionSpec& f, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("scale must be > 0");
  PushforwardCdf out;
  out.survivor = [f, b](double t) {
    return gaussian_measure_1d(upper_level_set(f, t), b);
  };

  if (const auto* ind = std::get_if<FunctionSpec::Indicator>(&f.node())) {
    double p = gaussian_measure_1d(LevelSetDescriptor::of(ind->set), b);
    append_merged(out.atoms, 1.0, p);
    append_merged(out.atoms, 0.0, 1.0 - p);
    return out;
  }
  if (const auto* ridge = std::get_if<FunctionSpec::Ridge>(&f.node())) {
    if (ridge->direction.size() != 1) {
      throw std::invalid_argument("pushforward needs a univariate function");
    }
    double a = std::abs(ridge->direction[0]);
    auto interval_mass = [&](double lo, double hi) {
      // P(lo <= a.x - s <= hi), x ~ N(0, b^2)
      double chi = std::isinf(hi) ? 1.0
                                  : normal_cdf((hi + ridge->threshold) / (a * b));
      double clo = std::isinf(lo) ? 0.0
                                  : normal_cdf((lo + ridge->threshold) / (a * b));
      return std::max(0.0, chi - clo);
    };
    if (ridge->activation.kind == Activation::Kind::table) {
      for (const auto& run : ridge->activation.table->flat_runs()) {
        append_merged(out.atoms, run.value, interval_mass(run.lo, run.hi));
      }
    } else {
      append_merged(out.atoms, 0.0, interval_mass(-kInf, 0.0));
    }
    return out;
  }
  if (const auto* comp = std::get_if<FunctionSpec::Composed>(&f.node())) {
    PushforwardCdf inner = gaussian_pushforward(*comp->inner, b);
    auto runs = comp->g.flat_runs();
    for (const auto& run : runs) {
      double hi_surv = std::isinf(run.hi) ? 0.0 : inner.survivor(run.hi);
      double hi_atom = std::isinf(run.hi) ? 0.0 : inner.atom_mass_at(run.hi);
      double lo_surv = std::isinf(run.lo) ? 1.0 : inner.survivor(run.lo);
      append_merged(out.atoms, run.value,
                    std::max(0.0, lo_surv - hi_surv + hi_atom));
    }
    for (auto [v, p] : inner.atoms) {
      bool covered = false;
      for (const auto& run : runs) {
        if (v >= run.lo && v <= run.hi) {
          covered = true;
          break;
        }
      }
      if (!covered) append_merged(out.atoms, comp->g(v), p);
    }
    return out;
  }
  throw std::invalid_argument(
      "gaussian_pushforward: function variant has no symbolic pushforward");
}

double pushforward_gap_exact(const FunctionSpec& f,
                             std::span<const UnivariateSpec> summands) {
  ExactLaw law = exact_sum_law(summands);
  double bn = make_moment_summary(summands).bn;
  ExactLaw f_s = pushforward_law(law, [&f](double u) { return f.evaluate1d(u); });
  PushforwardCdf f_z = gaussian_pushforward(f, bn);

  std::vector<double> candidates = f_s.values;
  for (auto [v, p] : f_z.atoms) candidates.push_back(v);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  double sup = 0.0;
  for (double t : candidates) {
    double s1 = f_s.survivor(t);
    double s2 = f_z.survivor(t);
    sup = std::max(sup, std::abs(s1 - s2));
    double s1r = s1 - f_s.prob_at(t);
    double s2r = s2 - f_z.atom_mass_at(t);
    sup = std::max(sup, std::abs(s1r - s2r));
  }
  return sup;
}

namespace {

// Cached per-summand sampler for the Monte Carlo path.
struct SummandSampler {
  bool is_gaussian = false;
  Eigen::MatrixXd factor;             // gaussian
  std::vector<double> cumulative;     // discrete
  std::vector<Eigen::VectorXd> points;

  Eigen::VectorXd draw(RngStream& stream, int d) const {
    if (is_gaussian) {
      Eigen::VectorXd z(d);
      for (int i = 0; i < d; ++i) z[i] = stream.normal();
      return factor * z;
    }
    double u = stream.uniform01();
    std::size_t idx =
        std::lower_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin();
    if (idx >= points.size()) idx = points.size() - 1;
    return points[idx];
  }
};

Eigen::MatrixXd psd_factor_of(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev[i] = std::sqrt(std::max(0.0, ev[i]));
  return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace

MCEstimate mc_delta(const FunctionSpec& f, const VectorSequenceSpec& seq,
                    std::int64_t samples, std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("samples must be >= 100");
  const int d = seq.dimension();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(seq.size()));

  std::vector<SummandSampler> samplers;
  samplers.reserve(seq.summands().size());
  for (const auto& s : seq.summands()) {
    SummandSampler sampler;
    if (const auto* g = std::get_if<VectorSummand::Gaussian>(&s.value)) {
      sampler.is_gaussian = true;
      sampler.factor = psd_factor_of(g->covariance);
    } else {
      const auto& disc = std::get<VectorSummand::Discrete>(s.value);
      sampler.points = disc.points;
      double acc = 0.0;
      for (double p : disc.probs) {
        acc += p;
        sampler.cumulative.push_back(acc);
      }
      sampler.cumulative.back() = 1.0;
    }
    samplers.push_back(std::move(sampler));
  }
  Eigen::MatrixXd z_factor = psd_factor_of(seq.sigma());

  const int shards = 64;
  RngStream base(seed);
  KahanSum sum_s, sum_s2, sum_z, sum_z2;
  for (int shard = 0; shard < shards; ++shard) {
    std::int64_t count = samples / shards + (shard < samples % shards ? 1 : 0);
    RngStream stream_s = base.child(2 * shard);
    RngStream stream_z = base.child(2 * shard + 1);
    KahanSum ls, ls2, lz, lz2;
    Eigen::VectorXd x(d), z(d);
    for (std::int64_t i = 0; i < count; ++i) {
      x.setZero();
      for (const auto& sampler : samplers) x += sampler.draw(stream_s, d);
      x *= inv_sqrt_n;
      double vs = f.evaluate(x);
      ls.add(vs);
      ls2.add(vs * vs);
      for (int k = 0; k < d; ++k) z[k] = stream_z.normal();
      double vz = f.evaluate(z_factor * z);
      lz.add(vz);
      lz2.add(vz * vz);
    }
    sum_s.add(ls.sum);
    sum_s2.add(ls2.sum);
    sum_z.add(lz.sum);
    sum_z2.add(lz2.sum);
  }
  const double n = static_cast<double>(samples);
  double mean_s = sum_s.sum / n;
  double mean_z = sum_z.sum / n;
  double var_s = std::max(0.0, (sum_s2.sum - n * mean_s * mean_s) / (n - 1.0));
  double var_z = std::max(0.0, (sum_z2.sum - n * mean_z * mean_z) / (n - 1.0));
  MCEstimate est;
  est.mean = std::abs(mean_s - mean_z);
  est.std_error = std::sqrt(var_s / n + var_z / n);
  est.n_samples = samples;
  est.seed = seed;
  return est;
}

VerdictReport verify_inequality(const LhsValue& lhs, const BoundValue& rhs,
                                const VerdictPolicy& policy) {
  double total_unit = rhs.total_at(1.0);
  if (!(total_unit > 0.0) && lhs.value > 0.0) {
    if (!(rhs.total_at(policy.constant) > 0.0)) {
      throw std::invalid_argument("bound is zero but lhs is positive");
    }
  }
  VerdictReport report;
  report.lhs = lhs;
  report.rhs = rhs;
  report.ratio_at_unit =
      (total_unit > 0.0) ? lhs.value / total_unit : (lhs.value == 0.0 ? 0.0 : kInf);

  double check_total = rhs.total_at(policy.constant);
  double slack = policy.mc_z * lhs.std_error +
                 policy.abs_slack * std::max(1.0, check_total);
  if (lhs.value <= check_total + slack) {
    report.verdict = Verdict::holds_at_unit;
    report.scale_constant = policy.constant;
  } else if (rhs.c1 > 0.0) {
    report.verdict = Verdict::holds_within_constant;
    report.scale_constant = (lhs.value - rhs.c0) / rhs.c1;
  } else {
    report.verdict = Verdict::violated_even_scaled;
    report.scale_constant = kInf;
  }
  return report;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds_at_unit: return "holds_at_unit";
    case Verdict::holds_within_constant: return "holds_within_constant";
    case Verdict::violated_even_scaled: return "violated_even_scaled";
  }
  return "unknown";
}

}  // namespace cltb
