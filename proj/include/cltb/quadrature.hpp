#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cltb {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for weight exp(-x^2) on the whole line (nodes cached
// per order, Golub-Welsch nodes + Christoffel weights).
const QuadratureRule& gauss_hermite(int order);

// Gauss-Legendre rule on [-1, 1] (cached per order).
const QuadratureRule& gauss_legendre(int order);

// Integral of f(x) * gaussian_density(x; 0, sigma) over [a, b], by
// Gauss-Legendre panels doubled until the relative change is < 1e-12.
// b may be +inf and a may be -inf; tails are clipped where the density
// underflows any polynomially growing integrand.
double gaussian_interval_integral(const std::function<double(double)>& f,
                                  double sigma, double a, double b);

// E f(sigma * Z), Z standard normal. Smooth path: Gauss-Hermite with
// order doubling from `order` until the relative change is < 1e-10 (cap
// 1024). If breakpoints are given, the line is split there instead and
// each smooth piece is integrated with Gauss-Legendre panels (this is
// the path for kinked integrands such as relu / relu^2 / |x|^3).
double gaussian_expectation(const std::function<double(double)>& f,
                            double sigma, int order = 128);
double gaussian_expectation(const std::function<double(double)>& f,
                            double sigma, std::span<const double> breakpoints,
                            int order = 128);

// E (sum_j lambda_j U_j^2)^(3/2) for independent standard normals U_j and
// nonnegative weights lambda_j, i.e. E |N(0, M)|^3 with M's eigenvalues.
// Computed by a one-dimensional Laplace-transform identity; relative
// accuracy ~1e-12.
double gaussian_abs_third_moment(std::span<const double> eigenvalues);

// Standard normal CDF and upper tail.
double normal_cdf(double x);
double normal_tail(double x);

}  // namespace cltb
