#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace cltb {

// Exact finite law: strictly increasing values, positive probabilities
// summing to 1 within 1e-10.
struct ExactLaw {
  std::vector<double> values;
  std::vector<double> probs;

  static ExactLaw from_atoms(std::vector<std::pair<double, double>> atoms,
                             double merge_tol = 1e-12);

  std::size_t size() const { return values.size(); }
  double mean() const;
  double variance() const;
  // P(X <= v), P(X >= v), P(X < v), P(X = v).
  double cdf(double v) const;
  double survivor(double v) const;
  double cdf_strict(double v) const;
  double prob_at(double v) const;
};

// Law of f(X) for X ~ law; equal mapped values merge.
ExactLaw pushforward_law(const ExactLaw& law,
                         const std::function<double(double)>& f);

}  // namespace cltb
