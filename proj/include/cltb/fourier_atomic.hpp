#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace cltb {

// Finite atomic Fourier representation f(x) = sum_j Re(c_j e^{i w_j.x}).
// Everything about f (values, weighted frequency norms) is exact.
struct FourierAtomicSpec {
  struct Atom {
    Eigen::VectorXd omega;
    std::complex<double> amplitude;
  };
  std::vector<Atom> atoms;

  int dimension() const {
    return atoms.empty() ? 0 : static_cast<int>(atoms.front().omega.size());
  }

  double evaluate(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (const auto& atom : atoms) {
      double phase = atom.omega.dot(x);
      acc += atom.amplitude.real() * std::cos(phase) -
             atom.amplitude.imag() * std::sin(phase);
    }
    return acc;
  }

  // sum_j |c_j| — an upper bound on |f|.
  double amplitude_mass() const {
    double acc = 0.0;
    for (const auto& atom : atoms) acc += std::abs(atom.amplitude);
    return acc;
  }

  // Two-atom expansion of cos(w.x).
  static FourierAtomicSpec cosine(const Eigen::VectorXd& omega) {
    FourierAtomicSpec f;
    f.atoms.push_back({omega, {0.5, 0.0}});
    f.atoms.push_back({-omega, {0.5, 0.0}});
    return f;
  }
};

}  // namespace cltb
