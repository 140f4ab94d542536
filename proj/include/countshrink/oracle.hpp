#pragma once

#include <cstdint>
#include <vector>

#include "countshrink/distributions.hpp"
#include "countshrink/mcmc.hpp"
#include "countshrink/priors.hpp"
#include "countshrink/quadrature.hpp"

namespace countshrink {

// Posterior mean of lambda given one count, computed without MCMC:
//   E[(alpha + y) u / (eta u + beta) | y]
// with the posterior weight of u proportional to pi(u) u^y / (eta u + beta)^(y + alpha).
// PG uses u = 1 and reduces to (alpha + y) / (eta + beta).
double posterior_mean_quadrature(const PriorFamily& family, const GlobalParams& globals,
                                 std::int64_t y, double eta = 1.0, const QuadOptions& opts = {});

struct BiasCurve {
  std::vector<std::int64_t> y_values;
  std::vector<double> estimate;  // posterior mean at each y
  std::vector<double> bias;      // estimate - y
  std::vector<double> relative;  // |estimate - y| / y (NaN at y = 0)
};

BiasCurve bias_curve(const PriorFamily& family, const GlobalParams& globals,
                     const std::vector<std::int64_t>& y_values, const QuadOptions& opts = {});

// Closed-form estimator (alpha + y) / (1 + beta / u) for a fixed local scale.
double fixed_u_estimate(const GlobalParams& globals, double u, std::int64_t y);

struct StabilizedBias {
  std::int64_t y = 0;  // first y with |bias(2y) - bias(y)| < threshold
  double bias = 0.0;   // bias at 2y
  bool stabilized = false;
  BiasCurve trace;
};

// Doubles y from y_start until successive biases agree to within threshold or
// y exceeds y_max.
StabilizedBias stabilized_bias(const PriorFamily& family, const GlobalParams& globals,
                               std::int64_t y_start = 10, std::int64_t y_max = 10'000,
                               double threshold = 1e-3, const QuadOptions& opts = {});

// E[X^k] for the GIG law by quadrature of the normalized kernel.
double gig_moment_quadrature(const GigParams& params, int k, const QuadOptions& opts = {});

struct ChainConfig {
  std::size_t n_draws = 20'000;
  std::size_t burn_in = 1'000;
  std::uint64_t seed = 1;
};

struct OracleComparison {
  double oracle = 0.0;
  double mcmc_mean = 0.0;
  double mcmc_se = 0.0;  // sd * sqrt(IF / n)
  double abs_diff = 0.0;
  double z = 0.0;  // abs_diff / mcmc_se
};

// Runs the Gibbs sampler on a single unit with alpha, beta and gamma held at
// the oracle's values and compares the posterior mean of lambda.
OracleComparison mcmc_vs_oracle(const PriorFamily& family, const GlobalParams& globals,
                                std::int64_t y, double eta, const ChainConfig& chain);

}  // namespace countshrink
