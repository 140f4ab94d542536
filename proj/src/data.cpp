#include "countshrink/data.hpp"

#include <cmath>

#include "countshrink/distributions.hpp"
#include "countshrink/errors.hpp"

namespace countshrink {

void CountDataset::validate() const {
  const std::size_t m = y.size();
  if (offset.size() != m) throw ValidationError("offset length does not match the counts");
  if (!ids.empty() && ids.size() != m) throw ValidationError("id length does not match the counts");
  if (covariates.cols() > 0 && static_cast<std::size_t>(covariates.rows()) != m) {
    throw ValidationError("covariate rows do not match the counts");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (y[i] < 0) throw ValidationError("negative count at unit " + std::to_string(i + 1));
    if (!(offset[i] > 0.0) || !std::isfinite(offset[i])) {
      throw ValidationError("offset must be positive at unit " + std::to_string(i + 1));
    }
  }
  if (covariates.size() > 0 && !covariates.allFinite()) {
    throw ValidationError("covariates must be finite");
  }
}

CountDataset CountDataset::from_counts(std::vector<std::int64_t> counts,
                                       std::vector<double> offsets) {
  CountDataset d;
  d.y = std::move(counts);
  d.offset = offsets.empty() ? std::vector<double>(d.y.size(), 1.0) : std::move(offsets);
  d.ids.reserve(d.y.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) d.ids.push_back(std::to_string(i + 1));
  d.validate();
  return d;
}

SyntheticAreal synthetic_areal(std::size_t m, std::size_t p, RngStream& rng) {
  if (m < 2) throw DomainError("m", "need at least two areas");
  constexpr double kEffects[] = {0.4, -0.3, 0.2, 0.0, 0.15, -0.1};
  constexpr double kRho = 0.3;

  SyntheticAreal out;
  out.delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < p && k < 6; ++k) out.delta(static_cast<Eigen::Index>(k)) = kEffects[k];

  Eigen::MatrixXd x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double shared = sample_normal(0.0, 1.0, rng);
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      x(i, k) = std::sqrt(kRho) * shared + std::sqrt(1.0 - kRho) * sample_normal(0.0, 1.0, rng);
    }
  }
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double mean = x.col(k).mean();
    x.col(k).array() -= mean;
    const double sd = std::sqrt(x.col(k).squaredNorm() / double(m - 1));
    x.col(k) /= sd;
  }

  std::vector<std::int64_t> y(m);
  std::vector<double> offset(m);
  out.lambda.resize(m);
  out.hotspot.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    offset[i] = 5.0 * std::exp(0.5 * sample_normal(0.0, 1.0, rng));
    out.hotspot[i] = sample_bernoulli(0.05, rng);
    out.lambda[i] = out.hotspot[i] ? sample_gamma(10.0, 2.0, rng) : sample_gamma(4.0, 4.0, rng);
    const double xb = p > 0 ? x.row(static_cast<Eigen::Index>(i)).dot(out.delta) : 0.0;
    y[i] = sample_poisson(offset[i] * std::exp(xb) * out.lambda[i], rng);
  }
  out.data = CountDataset::from_counts(std::move(y), std::move(offset));
  out.data.covariates = std::move(x);
  return out;
}

}  // namespace countshrink
