#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "countshrink/rng.hpp"

namespace countshrink {

// Observed counts with known offsets and an optional covariate matrix.
struct CountDataset {
  std::vector<std::string> ids;
  std::vector<std::int64_t> y;
  std::vector<double> offset;  // a_i > 0; the Poisson rate is offset * lambda (* exp(x'delta))
  Eigen::MatrixXd covariates;  // m x p, p = 0 when absent

  std::size_t size() const { return y.size(); }
  bool has_covariates() const { return covariates.cols() > 0; }

  // Checks lengths, y >= 0 and offsets > 0. Throws ValidationError.
  void validate() const;

  static CountDataset from_counts(std::vector<std::int64_t> counts,
                                  std::vector<double> offsets = {});
};

// Synthetic stand-in for areal crime counts.
//   offsets     a_i = 5 exp(0.5 z_i), z_i ~ N(0, 1)
//   covariates  p columns of N(0, 1) with pairwise correlation 0.3, then
//               standardized to sample mean 0 and sd 1
//   effects     delta = (0.4, -0.3, 0.2, 0, 0.15, -0.1), first p entries,
//               zero beyond the sixth
//   risks       lambda_i ~ Ga(4, 4), except hotspots (probability 0.05)
//               drawn from Ga(10, 2)
//   counts      y_i ~ Po(a_i exp(x_i' delta) lambda_i)
struct SyntheticAreal {
  CountDataset data;
  std::vector<double> lambda;
  std::vector<bool> hotspot;
  Eigen::VectorXd delta;
};

SyntheticAreal synthetic_areal(std::size_t m, std::size_t p, RngStream& rng);

}  // namespace countshrink
