#include "cltb/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "cltb/errors.hpp"

namespace cltb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

QuadratureRule make_gauss_hermite(int n) {
  // Jacobi matrix for the (physicists') Hermite weight exp(-x^2):
  // zero diagonal, off-diagonal sqrt(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  QuadratureRule rule;
  rule.nodes.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + n);
  std::sort(rule.nodes.begin(), rule.nodes.end());
  rule.weights.resize(n);
  // Christoffel weights: w_i = 1 / sum_k p_k(x_i)^2 with orthonormal p_k.
  const double p0 = std::pow(kPi, -0.25);
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    double pm = 0.0, pc = p0, sum = p0 * p0;
    for (int k = 1; k < n; ++k) {
      double bk = std::sqrt(0.5 * k);
      double bk1 = std::sqrt(0.5 * (k - 1));
      double pn = (x * pc - bk1 * pm) / bk;
      sum += pn * pn;
      pm = pc;
      pc = pn;
    }
    rule.weights[i] = 1.0 / sum;
  }
  return rule;
}

QuadratureRule make_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

template <typename Maker>
const QuadratureRule& cached_rule(int order, Maker make,
                                  std::map<int, std::unique_ptr<QuadratureRule>>& cache,
                                  std::mutex& mutex) {
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, std::make_unique<QuadratureRule>(make(order))).first;
  }
  return *it->second;
}

double gaussian_density(double x, double sigma) {
  double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

// Single Gauss-Legendre pass of integral f * phi_sigma over [a, b] split
// into `panels` equal panels.
double panel_pass(const std::function<double(double)>& f, double sigma,
                  double a, double b, int panels, const QuadratureRule& gl) {
  double total = 0.0;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + 0.5 * h;
    double half = 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      double x = mid + half * gl.nodes[i];
      acc += gl.weights[i] * f(x) * gaussian_density(x, sigma);
    }
    total += acc * half;
  }
  return total;
}

}  // namespace

const QuadratureRule& gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order < 1");
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex mutex;
  return cached_rule(order, make_gauss_hermite, cache, mutex);
}

const QuadratureRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order < 1");
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex mutex;
  return cached_rule(order, make_gauss_legendre, cache, mutex);
}

double gaussian_interval_integral(const std::function<double(double)>& f,
                                  double sigma, double a, double b) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be > 0");
  // Clip infinite endpoints where the density underflows.
  double reach = 40.0 * sigma;
  if (std::isinf(a)) a = std::min(-reach, std::isinf(b) ? 0.0 : b - reach);
  if (std::isinf(b)) b = std::max(reach, a + reach);
  a = std::clamp(a, -1e300, 1e300);
  b = std::clamp(b, -1e300, 1e300);
  if (b <= a) return 0.0;

  const QuadratureRule& gl = gauss_legendre(32);
  double prev = panel_pass(f, sigma, a, b, 1, gl);
  for (int panels = 2; panels <= 256; panels *= 2) {
    double cur = panel_pass(f, sigma, a, b, panels, gl);
    if (std::abs(cur - prev) <= 1e-12 * std::max(1e-300, std::abs(cur)) + 1e-15) {
      return cur;
    }
    prev = cur;
  }
  return prev;
}

double gaussian_expectation(const std::function<double(double)>& f,
                            double sigma, int order) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be > 0");
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  // E f(sigma Z) = (1/sqrt(pi)) * int f(sigma*sqrt(2)*x) exp(-x^2) dx.
  auto pass = [&](int n) {
    const QuadratureRule& gh = gauss_hermite(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      acc += gh.weights[i] * f(sigma * kSqrt2 * gh.nodes[i]);
    }
    return acc / std::sqrt(kPi);
  };
  double prev = pass(order);
  for (int n = 2 * order; n <= 1024; n *= 2) {
    double cur = pass(n);
    if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

double gaussian_expectation(const std::function<double(double)>& f,
                            double sigma, std::span<const double> breakpoints,
                            int order) {
  if (breakpoints.empty()) return gaussian_expectation(f, sigma, order);
  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  for (double c : cuts) {
    total += gaussian_interval_integral(f, sigma, lo, c);
    lo = c;
  }
  total += gaussian_interval_integral(f, sigma, lo,
                                      std::numeric_limits<double>::infinity());
  return total;
}

double gaussian_abs_third_moment(std::span<const double> eigenvalues) {
  double lmax = 0.0;
  for (double l : eigenvalues) {
    if (l < -1e-12) throw std::invalid_argument("negative eigenvalue");
    lmax = std::max(lmax, l);
  }
  if (lmax <= 0.0) return 0.0;
  std::vector<double> lam;
  for (double l : eigenvalues) {
    if (l > 0) lam.push_back(l / lmax);
  }

  // x^{3/2} = (3 / (2 sqrt(pi))) * int_0^inf t^{-5/2} (1 - e^{-tx}(1+tx)) dt,
  // so with L(t) = E e^{-tq} = prod (1+2t lam_j)^{-1/2} and
  // E q e^{-tq} = L(t) * sum lam_j / (1+2t lam_j):
  //   E q^{3/2} = c * int t^{-5/2} [1 - L(t)(1 + t m(t))] dt.
  // Substituting t = s^2 makes the integrand smooth at the origin. The
  // exponent cancels to O(t^2) at small t, so it is accumulated in long
  // double to keep the quotient by s^4 accurate.
  auto integrand = [&](double s) {
    long double t = static_cast<long double>(s) * s;
    long double log_l = 0.0L, m = 0.0L;
    for (double l : lam) {
      log_l -= 0.5L * std::log1p(2.0L * t * l);
      m += l / (1.0L + 2.0L * t * l);
    }
    long double bracket = -std::expm1(log_l + std::log1p(t * m));
    long double s4 = t * t;
    return static_cast<double>(2.0L * bracket / s4);
  };

  // Geometric panels out to S, then the analytic tail of the "1" part.
  const double S = 1e4;
  const QuadratureRule& gl = gauss_legendre(64);
  double total = 0.0;
  double lo = 0.0, hi = 0.5;
  while (lo < S) {
    hi = std::min(hi, S);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      acc += gl.weights[i] * integrand(mid + half * gl.nodes[i]);
    }
    total += acc * half;
    lo = hi;
    hi = 2.0 * hi;
  }
  total += 2.0 / (3.0 * S * S * S);
  const double c = 3.0 / (2.0 * std::sqrt(kPi));
  return c * total * std::pow(lmax, 1.5);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

}  // namespace cltb
