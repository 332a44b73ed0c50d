#pragma once

#include <functional>

#include "cltb/bound_value.hpp"
#include "cltb/fourier_atomic.hpp"
#include "cltb/rng.hpp"
#include "cltb/vector_sequence.hpp"

namespace cltb {

// v_{f,s} = sum_j ||w_j||_1^s |c_j| for s in {2, 3}; the atomic measure
// turns the weighted Fourier integral into an exact sum.
double v_norm(const FourierAtomicSpec& f, int s);

// ||a||_Sigma = sqrt(a^T Sigma a).
double sigma_norm(const Eigen::VectorXd& a, const Eigen::MatrixXd& sigma);

struct L1SphereSearchConfig {
  int restarts = 32;
  int local_steps = 60;
  double step_decay = 0.5;
  bool include_vertices = true;
  RngStream stream{0x51a7e, 0};
};

struct SphereSearchResult {
  Eigen::VectorXd maximizer;
  double value = 0.0;
};

// Maximum of `objective` over {a : ||a||_1 = 1}: all 2d signed vertices
// (when include_vertices), random Dirichlet starts, each refined by
// coordinate-pair mass transfer with decaying step. Deterministic for a
// fixed config; restarts reduce by (value, lexicographic maximizer), so
// evaluation order never changes the result. Non-finite objective values
// abort with a diagnostic.
SphereSearchResult sup_over_l1_sphere(
    const std::function<double(const Eigen::VectorXd&)>& objective, int d,
    const L1SphereSearchConfig& cfg);

// Gaussian-approximation bound for functions with an integral ridge
// representation of total mass |v|:
//   s=2: (|v|/n)   * [sup_a tail-second-moment term + sup_a body term],
//   s=3: (2|v|/n) * [sup_a log-weighted tail term   + sup_a body term],
// each supremum over the l1 sphere, with moments from projected_spec.
// The breakdown keeps both suprema and their maximizers.
BoundValue integral_rep_bound(const VectorSequenceSpec& seq, double v_abs,
                              int s, const L1SphereSearchConfig& cfg);

// Bound through the Fourier representation: |v| <= 2 v_{f,s}. Extra seed
// directions w_j / ||w_j||_1 from the atoms are always evaluated and
// reported alongside the search result.
BoundValue barron_bound(const FourierAtomicSpec& f,
                        const VectorSequenceSpec& seq, int s,
                        const L1SphereSearchConfig& cfg);

}  // namespace cltb
