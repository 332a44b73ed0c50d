#include "cltb/barron.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <stdexcept>

#include "cltb/errors.hpp"

namespace cltb {

namespace {

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Deterministic reduction: larger value wins, ties break to the
// lexicographically smaller maximizer.
void reduce_candidate(SphereSearchResult& best, const Eigen::VectorXd& a,
                      double value) {
  if (!std::isfinite(value)) {
    throw numeric_error("sphere search objective returned a non-finite value");
  }
  if (best.maximizer.size() == 0 || value > best.value ||
      (value == best.value && lexicographic_less(a, best.maximizer))) {
    best.maximizer = a;
    best.value = value;
  }
}

Eigen::VectorXd renormalized(Eigen::VectorXd a) {
  double l1 = a.lpNorm<1>();
  if (l1 == 0.0) return a;
  return a / l1;
}

// Random point on the l1 sphere: exponential magnitudes normalized to the
// simplex (symmetric Dirichlet), independent random signs.
Eigen::VectorXd random_sphere_point(int d, RngStream& stream) {
  Eigen::VectorXd a(d);
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    double e = -std::log(1.0 - stream.uniform01());
    a[i] = e;
    total += e;
  }
  if (total == 0.0) {
    a.setZero();
    a[0] = 1.0;
    total = 1.0;
  }
  a /= total;
  for (int i = 0; i < d; ++i) {
    if (stream.next_u64() & 1ull) a[i] = -a[i];
  }
  return a;
}

SphereSearchResult local_refine(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    Eigen::VectorXd a, double value, const L1SphereSearchConfig& cfg) {
  const int d = static_cast<int>(a.size());
  double step = 0.25;
  for (int sweep = 0; sweep < cfg.local_steps && step > 1e-12; ++sweep) {
    SphereSearchResult sweep_best{a, value};
    for (int i = 0; i < d; ++i) {
      double mass = std::abs(a[i]);
      if (mass == 0.0) continue;
      double delta = std::min(step, mass);
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd cand = a;
          cand[i] -= (a[i] > 0 ? delta : -delta);
          cand[j] += sgn * delta;
          cand = renormalized(cand);
          if (cand.lpNorm<1>() == 0.0) continue;
          reduce_candidate(sweep_best, cand, objective(cand));
        }
      }
    }
    if (sweep_best.value > value) {
      a = sweep_best.maximizer;
      value = sweep_best.value;
    } else {
      step *= cfg.step_decay;
    }
  }
  return {a, value};
}

}  // namespace

double v_norm(const FourierAtomicSpec& f, int s) {
  if (s != 2 && s != 3) throw std::invalid_argument("s must be 2 or 3");
  double acc = 0.0;
  for (const auto& atom : f.atoms) {
    double l1 = atom.omega.lpNorm<1>();
    double amp = std::abs(atom.amplitude);
    acc += (s == 2 ? l1 * l1 : l1 * l1 * l1) * amp;
  }
  return acc;
}

double sigma_norm(const Eigen::VectorXd& a, const Eigen::MatrixXd& sigma) {
  if (a.size() != sigma.rows() || sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("dimension mismatch");
  }
  if (a.norm() == 0.0) throw std::invalid_argument("a must be nonzero");
  return std::sqrt(a.dot(sigma * a));
}

SphereSearchResult sup_over_l1_sphere(
    const std::function<double(const Eigen::VectorXd&)>& objective, int d,
    const L1SphereSearchConfig& cfg) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (cfg.restarts < 1 || cfg.local_steps < 0 || !(cfg.step_decay > 0.0) ||
      !(cfg.step_decay < 1.0)) {
    throw std::invalid_argument("invalid search configuration");
  }
  SphereSearchResult best;
  if (cfg.include_vertices) {
    for (int i = 0; i < d; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v[i] = sgn;
        reduce_candidate(best, v, objective(v));
      }
    }
  }
  for (int r = 0; r < cfg.restarts; ++r) {
    RngStream sub = cfg.stream.child(static_cast<std::uint64_t>(r));
    Eigen::VectorXd start = random_sphere_point(d, sub);
    double v0 = objective(start);
    if (!std::isfinite(v0)) {
      throw numeric_error("sphere search objective returned a non-finite value");
    }
    SphereSearchResult refined = local_refine(objective, start, v0, cfg);
    reduce_candidate(best, refined.maximizer, refined.value);
  }
  return best;
}

namespace {

// Moment pieces of the integral-representation bound at a fixed sphere
// point, written in terms of W_k = a^T X_k / sqrt(n) and B = ||a||_Sigma
// (which equals B_{n,W}).
struct ProjectedMoments {
  double tail_second = 0.0;      // sum_k E W^2 1{|W| >= B}
  double tail_log_second = 0.0;  // sum_k E W^2 ln|W| 1{|W| >= B}
  double body_third = 0.0;       // sum_k E |W|^3 1{|W| < B}
  double b = 0.0;
};

ProjectedMoments projected_moments(const VectorSequenceSpec& seq,
                                   const Eigen::VectorXd& a, bool need_log) {
  ProjectedMoments pm;
  pm.b = sigma_norm(a, seq.sigma());
  for (const auto& w : projected_spec(seq, a)) {
    pm.tail_second += truncated_second_moment(w, pm.b, TruncationSide::at_or_above);
    pm.body_third += truncated_third_moment(w, pm.b, TruncationSide::below);
    if (need_log) {
      pm.tail_log_second +=
          truncated_abs_moment(w, 2, pm.b, Ineq::ge, /*with_log=*/true);
    }
  }
  return pm;
}

}  // namespace

namespace {

struct RepObjectives {
  std::function<double(const Eigen::VectorXd&)> tail, body;
};

RepObjectives make_rep_objectives(const VectorSequenceSpec& seq, int s) {
  const double n = static_cast<double>(seq.size());
  const double sqrt_n = std::sqrt(n);
  RepObjectives obj;
  if (s == 2) {
    // sup_a (1/B) sum_k E (a.X_k)^2 1{|a.X_k| >= sqrt(n) B}   [in W terms]
    obj.tail = [&seq, n](const Eigen::VectorXd& a) {
      ProjectedMoments pm = projected_moments(seq, a, false);
      return n * pm.tail_second / pm.b;
    };
    // sup_a (1/(2B^2)) sum_k E |a.X_k|^3 / sqrt(n) 1{|a.X_k| < sqrt(n) B}
    obj.body = [&seq, n](const Eigen::VectorXd& a) {
      ProjectedMoments pm = projected_moments(seq, a, false);
      return n * pm.body_third / (2.0 * pm.b * pm.b);
    };
  } else {
    // sup_a sum_k E (a.X_k)^2 ln(e |a.X_k| / B) 1{|a.X_k| >= sqrt(n) B}
    obj.tail = [&seq, n, sqrt_n](const Eigen::VectorXd& a) {
      ProjectedMoments pm = projected_moments(seq, a, true);
      return n * (pm.tail_log_second +
                  (1.0 + std::log(sqrt_n / pm.b)) * pm.tail_second);
    };
    // sup_a (1/B) sum_k E |a.X_k|^3 / sqrt(n) 1{|a.X_k| < sqrt(n) B}
    obj.body = [&seq, n](const Eigen::VectorXd& a) {
      ProjectedMoments pm = projected_moments(seq, a, false);
      return n * pm.body_third / pm.b;
    };
  }
  return obj;
}

}  // namespace

BoundValue integral_rep_bound(const VectorSequenceSpec& seq, double v_abs,
                              int s, const L1SphereSearchConfig& cfg) {
  if (s != 2 && s != 3) throw std::invalid_argument("s must be 2 or 3");
  if (v_abs < 0.0) throw std::invalid_argument("|v| must be >= 0");
  RepObjectives obj = make_rep_objectives(seq, s);
  SphereSearchResult tail = sup_over_l1_sphere(obj.tail, seq.dimension(), cfg);
  SphereSearchResult body = sup_over_l1_sphere(obj.body, seq.dimension(), cfg);

  const double outer = (s == 2 ? 1.0 : 2.0) * v_abs / seq.size();
  BoundValue bound;
  bound.symbol = BoundValue::ConstantSymbol::A;
  double c1_tail = outer * tail.value;
  double c1_body = outer * body.value;
  bound.c1 = c1_tail + c1_body;
  bound.breakdown.push_back({"tail_supremum", 0.0, c1_tail, tail.maximizer});
  bound.breakdown.push_back({"body_supremum", 0.0, c1_body, body.maximizer});
  return bound;
}

BoundValue barron_bound(const FourierAtomicSpec& f,
                        const VectorSequenceSpec& seq, int s,
                        const L1SphereSearchConfig& cfg) {
  if (f.atoms.empty()) throw std::invalid_argument("fourier spec needs atoms");
  if (f.dimension() != seq.dimension()) {
    throw std::invalid_argument(
        "fourier atom dimension does not match the sequence dimension");
  }
  double v_abs = 2.0 * v_norm(f, s);
  BoundValue bound = integral_rep_bound(seq, v_abs, s, cfg);
  // The theorems take the sup over the whole sphere; whether it could be
  // restricted to the atoms' normalized frequencies is open, so their
  // objective values are reported next to the searched suprema.
  RepObjectives obj = make_rep_objectives(seq, s);
  for (const auto& atom : f.atoms) {
    double l1 = atom.omega.lpNorm<1>();
    if (l1 == 0.0) continue;
    Eigen::VectorXd dir = atom.omega / l1;
    BoundValue::Component note;
    char text[96];
    std::snprintf(text, sizeof(text), "atom_direction tail=%.12g body=%.12g",
                  obj.tail(dir), obj.body(dir));
    note.name = text;
    note.argmax = dir;
    bound.breakdown.push_back(std::move(note));
  }
  return bound;
}

}  // namespace cltb
