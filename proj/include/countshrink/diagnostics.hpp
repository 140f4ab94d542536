#pragma once

#include <span>
#include <string>
#include <vector>

namespace countshrink {

struct InefficiencyFactor {
  double value = 1.0;
  // Set when the chain is constant, in which case value is 1 by convention.
  bool degenerate = false;
  // Number of autocorrelation lags summed.
  std::size_t lags = 0;
};

// 1 + 2 sum_k rho(k), summing lags until the first non-positive
// autocorrelation. Requires at least 100 draws.
InefficiencyFactor inefficiency_factor(std::span<const double> draws);

// Linear interpolation between order statistics at position (n - 1) p.
double quantile(std::span<const double> draws, double p);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  double inefficiency_factor = 1.0;
  bool degenerate = false;
  std::size_t n_draws = 0;

  // Monte Carlo standard error of the mean, inflated by the inefficiency factor.
  double mcse() const;
};

ParameterSummary summarize(std::string name, std::span<const double> draws);

}  // namespace countshrink
