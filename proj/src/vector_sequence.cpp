#include "cltb/vector_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cltb/errors.hpp"
#include "cltb/quadrature.hpp"

namespace cltb {

namespace {

constexpr double kMeanTol = 1e-12;
constexpr double kProbTol = 1e-12;
constexpr double kMinEigen = 1e-10;
constexpr double kMergeTol = 1e-12;

Eigen::MatrixXd summand_covariance(const VectorSummand& s) {
  if (const auto* g = std::get_if<VectorSummand::Gaussian>(&s.value)) {
    return g->covariance;
  }
  const auto& d = std::get<VectorSummand::Discrete>(s.value);
  Eigen::MatrixXd cov =
      Eigen::MatrixXd::Zero(d.points[0].size(), d.points[0].size());
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    cov.noalias() += d.probs[i] * d.points[i] * d.points[i].transpose();
  }
  return cov;
}

// Eigen factor F with F F^T = cov; tolerates semi-definite summands.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd ev = es.eigenvalues();
  double top = std::max(0.0, ev.maxCoeff());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10 * std::max(1.0, top)) {
      throw std::invalid_argument("covariance is not positive semidefinite");
    }
    ev[i] = std::sqrt(std::max(0.0, ev[i]));
  }
  return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace

VectorSummand VectorSummand::discrete(std::vector<Eigen::VectorXd> points,
                                      std::vector<double> probs) {
  if (points.empty() || points.size() != probs.size()) {
    throw std::invalid_argument("discrete summand needs matching points/probs");
  }
  const auto dim = points[0].size();
  double total = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw std::invalid_argument("inconsistent point dimensions");
    }
    if (probs[i] <= 0.0) throw std::invalid_argument("probs must be > 0");
    total += probs[i];
    mean += probs[i] * points[i];
  }
  if (std::abs(total - 1.0) > kProbTol) {
    throw std::invalid_argument("probs must sum to 1");
  }
  if (mean.lpNorm<Eigen::Infinity>() > kMeanTol) {
    throw std::invalid_argument("summand must have zero mean");
  }
  return VectorSummand{Discrete{std::move(points), std::move(probs)}};
}

VectorSummand VectorSummand::gaussian(Eigen::MatrixXd covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw std::invalid_argument("covariance must be square");
  }
  if ((covariance - covariance.transpose()).lpNorm<Eigen::Infinity>() > 1e-10) {
    throw std::invalid_argument("covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("covariance is not positive semidefinite");
  }
  return VectorSummand{Gaussian{std::move(covariance)}};
}

VectorSequenceSpec::VectorSequenceSpec(int dimension,
                                       std::vector<VectorSummand> summands)
    : d_(dimension), summands_(std::move(summands)) {
  if (d_ < 1) throw std::invalid_argument("dimension must be >= 1");
  if (summands_.empty()) throw std::invalid_argument("no summands");
  sigma_ = Eigen::MatrixXd::Zero(d_, d_);
  for (const auto& s : summands_) {
    Eigen::MatrixXd cov = summand_covariance(s);
    if (cov.rows() != d_) {
      throw std::invalid_argument("summand dimension mismatch");
    }
    sigma_ += cov;
  }
  sigma_ /= static_cast<double>(summands_.size());
  sigma_ = 0.5 * (sigma_ + sigma_.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_);
  if (es.eigenvalues().minCoeff() <= kMinEigen) {
    throw std::invalid_argument(
        "aggregate covariance must be positive definite");
  }
}

VectorSequenceSpec VectorSequenceSpec::scaled_by(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale factor must be > 0");
  std::vector<VectorSummand> scaled;
  scaled.reserve(summands_.size());
  for (const auto& s : summands_) {
    if (const auto* g = std::get_if<VectorSummand::Gaussian>(&s.value)) {
      scaled.push_back(VectorSummand{VectorSummand::Gaussian{c * c * g->covariance}});
    } else {
      auto d = std::get<VectorSummand::Discrete>(s.value);
      for (auto& p : d.points) p *= c;
      scaled.push_back(VectorSummand{std::move(d)});
    }
  }
  return VectorSequenceSpec(d_, std::move(scaled));
}

Eigen::MatrixXd whitening(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("sigma must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (sigma + sigma.transpose().eval()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    throw std::invalid_argument("whitening requires a positive definite matrix");
  }
  Eigen::VectorXd inv_sqrt = ev.array().sqrt().inverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() *
         es.eigenvectors().transpose();
}

double lyapunov_beta(const VectorSequenceSpec& seq) {
  Eigen::MatrixXd w = whitening(seq.sigma());
  double acc = 0.0;
  for (const auto& s : seq.summands()) {
    if (const auto* g = std::get_if<VectorSummand::Gaussian>(&s.value)) {
      Eigen::MatrixXd m = w * g->covariance * w;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          0.5 * (m + m.transpose().eval()));
      std::vector<double> eigs(es.eigenvalues().data(),
                               es.eigenvalues().data() + es.eigenvalues().size());
      for (double& e : eigs) e = std::max(0.0, e);
      acc += gaussian_abs_third_moment(eigs);
    } else {
      const auto& d = std::get<VectorSummand::Discrete>(s.value);
      for (std::size_t i = 0; i < d.points.size(); ++i) {
        double norm = (w * d.points[i]).norm();
        acc += d.probs[i] * norm * norm * norm;
      }
    }
  }
  return acc / static_cast<double>(seq.size());
}

std::vector<std::pair<double, double>> merge_projected_atoms(
    std::vector<std::pair<double, double>> atoms) {
  std::sort(atoms.begin(), atoms.end());
  std::vector<std::pair<double, double>> merged;
  for (auto [v, p] : atoms) {
    if (!merged.empty() && std::abs(v - merged.back().first) <= kMergeTol) {
      merged.back().second += p;
    } else {
      merged.emplace_back(v, p);
    }
  }
  return merged;
}

std::vector<UnivariateSpec> projected_spec(const VectorSequenceSpec& seq,
                                           const Eigen::VectorXd& a) {
  if (a.size() != seq.dimension()) {
    throw std::invalid_argument("direction dimension mismatch");
  }
  if (a.norm() == 0.0) throw std::invalid_argument("direction must be nonzero");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(seq.size()));
  std::vector<UnivariateSpec> out;
  out.reserve(seq.summands().size());
  for (const auto& s : seq.summands()) {
    if (const auto* g = std::get_if<VectorSummand::Gaussian>(&s.value)) {
      double var = a.dot(g->covariance * a) * inv_sqrt_n * inv_sqrt_n;
      if (var > 0.0) {
        out.push_back(UnivariateSpec::gaussian(var));
      } else {
        out.push_back(UnivariateSpec::discrete_allow_degenerate({{0.0, 1.0}}));
      }
    } else {
      const auto& d = std::get<VectorSummand::Discrete>(s.value);
      std::vector<std::pair<double, double>> atoms;
      atoms.reserve(d.points.size());
      for (std::size_t i = 0; i < d.points.size(); ++i) {
        atoms.emplace_back(a.dot(d.points[i]) * inv_sqrt_n, d.probs[i]);
      }
      out.push_back(
          UnivariateSpec::discrete_allow_degenerate(merge_projected_atoms(atoms)));
    }
  }
  return out;
}

Eigen::VectorXd sample_normalized_sum(const VectorSequenceSpec& seq,
                                      RngStream& stream) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(seq.dimension());
  for (const auto& s : seq.summands()) {
    if (const auto* g = std::get_if<VectorSummand::Gaussian>(&s.value)) {
      // Factor computed per call; callers needing throughput should use
      // the cached samplers in the Monte Carlo driver.
      Eigen::MatrixXd f = psd_factor(g->covariance);
      Eigen::VectorXd z(seq.dimension());
      for (int i = 0; i < z.size(); ++i) z[i] = stream.normal();
      sum += f * z;
    } else {
      const auto& d = std::get<VectorSummand::Discrete>(s.value);
      double u = stream.uniform01();
      double acc = 0.0;
      std::size_t pick = d.points.size() - 1;
      for (std::size_t i = 0; i < d.points.size(); ++i) {
        acc += d.probs[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      sum += d.points[pick];
    }
  }
  return sum / std::sqrt(static_cast<double>(seq.size()));
}

Eigen::VectorXd sample_gaussian_limit(const VectorSequenceSpec& seq,
                                      RngStream& stream) {
  Eigen::MatrixXd f = psd_factor(seq.sigma());
  Eigen::VectorXd z(seq.dimension());
  for (int i = 0; i < z.size(); ++i) z[i] = stream.normal();
  return f * z;
}

VectorSequenceSpec sequence_from_univariate_sum(
    std::span<const UnivariateSpec> summands) {
  double sqrt_n = std::sqrt(static_cast<double>(summands.size()));
  std::vector<VectorSummand> out;
  out.reserve(summands.size());
  for (const auto& s : summands) {
    if (s.kind() == UnivariateSpec::Kind::gaussian) {
      Eigen::MatrixXd cov(1, 1);
      cov(0, 0) = s.gaussian_variance() * sqrt_n * sqrt_n;
      out.push_back(VectorSummand::gaussian(std::move(cov)));
    } else {
      std::vector<Eigen::VectorXd> points;
      std::vector<double> probs;
      for (auto [v, p] : s.atoms()) {
        Eigen::VectorXd x(1);
        x[0] = v * sqrt_n;
        points.push_back(std::move(x));
        probs.push_back(p);
      }
      out.push_back(VectorSummand::discrete(std::move(points), std::move(probs)));
    }
  }
  return VectorSequenceSpec(1, std::move(out));
}

}  // namespace cltb
