#pragma once

#include <Eigen/Dense>

#include <utility>
#include <variant>
#include <vector>

#include "cltb/rng.hpp"
#include "cltb/univariate.hpp"

namespace cltb {

// One d-dimensional mean-zero summand: finite support or gaussian.
struct VectorSummand {
  struct Discrete {
    std::vector<Eigen::VectorXd> points;
    std::vector<double> probs;
  };
  struct Gaussian {
    Eigen::MatrixXd covariance;
  };
  std::variant<Discrete, Gaussian> value;

  static VectorSummand discrete(std::vector<Eigen::VectorXd> points,
                                std::vector<double> probs);
  static VectorSummand gaussian(Eigen::MatrixXd covariance);
};

// Independent mean-zero summands X_1..X_n in R^d. The normalized sum is
// S = n^{-1/2} sum X_i with covariance Sigma = (1/n) sum Cov(X_i), which
// is required to be symmetric positive definite (min eigenvalue > 1e-10).
class VectorSequenceSpec {
 public:
  VectorSequenceSpec(int dimension, std::vector<VectorSummand> summands);

  int dimension() const { return d_; }
  int size() const { return static_cast<int>(summands_.size()); }
  const std::vector<VectorSummand>& summands() const { return summands_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }

  VectorSequenceSpec scaled_by(double c) const;

 private:
  int d_;
  std::vector<VectorSummand> summands_;
  Eigen::MatrixXd sigma_;
};

// Inverse symmetric positive square root: whitening(S) * S * whitening(S)
// equals the identity. Throws for non-PSD input.
Eigen::MatrixXd whitening(const Eigen::MatrixXd& sigma);

// Normalized Lyapunov ratio (1/n) sum_i E |Sigma^{-1/2} X_i|^3 with
// Sigma = Var(n^{-1/2} sum X_i). Exact for discrete summands, quadrature
// for gaussians. Invariant under X_i -> c X_i.
double lyapunov_beta(const VectorSequenceSpec& seq);

// Univariate specs of W_i = a^T X_i / sqrt(n). Equal projected values are
// merged (1e-12 value tolerance). Summands may project to a point mass at
// zero; such degenerate specs are permitted here.
std::vector<UnivariateSpec> projected_spec(const VectorSequenceSpec& seq,
                                           const Eigen::VectorXd& a);

// Atom-level projection + merge helper used by projected_spec.
std::vector<std::pair<double, double>> merge_projected_atoms(
    std::vector<std::pair<double, double>> atoms);

// One draw of S = n^{-1/2} sum X_i.
Eigen::VectorXd sample_normalized_sum(const VectorSequenceSpec& seq,
                                      RngStream& stream);

// One draw of N(0, sigma()).
Eigen::VectorXd sample_gaussian_limit(const VectorSequenceSpec& seq,
                                      RngStream& stream);

// Embeds a univariate summand list W_1..W_n as a d=1 sequence with
// X_i = sqrt(n) W_i, so that the normalized sum is exactly sum W_i.
VectorSequenceSpec sequence_from_univariate_sum(
    std::span<const UnivariateSpec> summands);

}  // namespace cltb
