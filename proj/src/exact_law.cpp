#include "cltb/exact_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cltb {

ExactLaw ExactLaw::from_atoms(std::vector<std::pair<double, double>> atoms,
                              double merge_tol) {
  if (atoms.empty()) throw std::invalid_argument("empty law");
  std::sort(atoms.begin(), atoms.end());
  ExactLaw law;
  double total = 0.0;
  for (auto [v, p] : atoms) {
    if (p < 0.0) throw std::invalid_argument("negative probability");
    if (p == 0.0) continue;
    total += p;
    if (!law.values.empty() && v - law.values.back() <= merge_tol) {
      law.probs.back() += p;
    } else {
      law.values.push_back(v);
      law.probs.push_back(p);
    }
  }
  if (law.values.empty()) throw std::invalid_argument("law has no mass");
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("probabilities must sum to 1");
  }
  return law;
}

double ExactLaw::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
  return m;
}

double ExactLaw::variance() const {
  double m = mean(), acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += (values[i] - m) * (values[i] - m) * probs[i];
  }
  return acc;
}

double ExactLaw::cdf(double v) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size() && values[i] <= v; ++i) {
    acc += probs[i];
  }
  return acc;
}

double ExactLaw::cdf_strict(double v) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size() && values[i] < v; ++i) {
    acc += probs[i];
  }
  return acc;
}

double ExactLaw::survivor(double v) const { return 1.0 - cdf_strict(v); }

double ExactLaw::prob_at(double v) const {
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it != values.end() && *it == v) return probs[it - values.begin()];
  return 0.0;
}

ExactLaw pushforward_law(const ExactLaw& law,
                         const std::function<double(double)>& f) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(law.size());
  for (std::size_t i = 0; i < law.size(); ++i) {
    atoms.emplace_back(f(law.values[i]), law.probs[i]);
  }
  return ExactLaw::from_atoms(std::move(atoms));
}

}  // namespace cltb
