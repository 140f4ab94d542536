#include "countshrink/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "countshrink/errors.hpp"

namespace countshrink {

InefficiencyFactor inefficiency_factor(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 100) throw DomainError("draws", "need at least 100 draws for an inefficiency factor");
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / double(n);
  double c0 = 0.0;
  for (double x : draws) c0 += (x - mean) * (x - mean);
  c0 /= double(n);
  InefficiencyFactor out;
  if (!(c0 > 0.0)) {
    out.degenerate = true;
    return out;
  }
  double sum = 0.0;
  for (std::size_t lag = 1; lag < n; ++lag) {
    double ck = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) ck += (draws[t] - mean) * (draws[t + lag] - mean);
    const double rho = ck / double(n) / c0;
    if (!(rho > 0.0)) break;
    sum += rho;
    out.lags = lag;
  }
  out.value = 1.0 + 2.0 * sum;
  return out;
}

double quantile(std::span<const double> draws, double p) {
  if (draws.empty()) throw DomainError("draws", "empty");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p", "must lie in [0, 1]");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = double(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
}

double ParameterSummary::mcse() const {
  if (n_draws == 0) return 0.0;
  return sd * std::sqrt(inefficiency_factor / double(n_draws));
}

ParameterSummary summarize(std::string name, std::span<const double> draws) {
  if (draws.empty()) throw DomainError("draws", "empty");
  ParameterSummary s;
  s.name = std::move(name);
  s.n_draws = draws.size();
  s.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / double(draws.size());
  double ss = 0.0;
  for (double x : draws) ss += (x - s.mean) * (x - s.mean);
  s.sd = draws.size() > 1 ? std::sqrt(ss / double(draws.size() - 1)) : 0.0;

  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  auto interp = [&](double p) {
    const double h = double(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.q025 = interp(0.025);
  s.q975 = interp(0.975);

  if (draws.size() >= 100) {
    const auto f = inefficiency_factor(draws);
    s.inefficiency_factor = f.value;
    s.degenerate = f.degenerate;
  } else {
    s.degenerate = s.sd == 0.0;
  }
  return s;
}

}  // namespace countshrink
