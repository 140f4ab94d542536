#include "countshrink/oracle.hpp"

#include <cmath>
#include <limits>

#include "countshrink/diagnostics.hpp"
#include "countshrink/errors.hpp"

namespace countshrink {

double posterior_mean_quadrature(const PriorFamily& family, const GlobalParams& globals,
                                 std::int64_t y, double eta, const QuadOptions& opts) {
  globals.validate();
  family.validate();
  if (y < 0) throw DomainError("y", "must be non-negative");
  if (!(eta > 0.0)) throw DomainError("eta", "must be positive");
  const double shape = globals.alpha + static_cast<double>(y);
  if (family.kind == Family::PG) return shape / (eta + globals.beta);

  auto log_weight = [&](double s) {
    // Jacobian du = u ds.
    return log_posterior_weight_u_at_log(family, globals, y, eta, s) + s;
  };
  const auto norm = integrate_log_real_line(log_weight, opts);

  // Shrinkage factor u / (eta u + beta) = 1 / (eta + beta e^{-s}).
  auto log_numerator = [&](double s) {
    return log_weight(s) - std::log(eta + globals.beta * std::exp(-s));
  };
  const auto num = integrate_log_real_line(log_numerator, opts);
  return shape * std::exp(num.log_value - norm.log_value);
}

double fixed_u_estimate(const GlobalParams& globals, double u, std::int64_t y) {
  return (globals.alpha + static_cast<double>(y)) / (1.0 + globals.beta / u);
}

BiasCurve bias_curve(const PriorFamily& family, const GlobalParams& globals,
                     const std::vector<std::int64_t>& y_values, const QuadOptions& opts) {
  if (y_values.empty()) throw DomainError("y_values", "must be nonempty");
  for (std::size_t k = 1; k < y_values.size(); ++k) {
    if (y_values[k] <= y_values[k - 1]) throw DomainError("y_values", "must be strictly increasing");
  }
  BiasCurve c;
  c.y_values = y_values;
  for (auto y : y_values) {
    const double est = posterior_mean_quadrature(family, globals, y, 1.0, opts);
    const double yd = static_cast<double>(y);
    c.estimate.push_back(est);
    c.bias.push_back(est - yd);
    c.relative.push_back(y > 0 ? std::abs(est - yd) / yd
                               : std::numeric_limits<double>::quiet_NaN());
  }
  return c;
}

StabilizedBias stabilized_bias(const PriorFamily& family, const GlobalParams& globals,
                               std::int64_t y_start, std::int64_t y_max, double threshold,
                               const QuadOptions& opts) {
  if (y_start < 1) throw DomainError("y_start", "must be positive");
  StabilizedBias out;
  std::vector<std::int64_t> ys;
  for (std::int64_t y = y_start; y <= y_max; y *= 2) ys.push_back(y);
  if (ys.size() < 2) throw DomainError("y_max", "must allow at least one doubling");
  out.trace = bias_curve(family, globals, ys, opts);
  for (std::size_t k = 1; k < ys.size(); ++k) {
    out.y = ys[k - 1];
    out.bias = out.trace.bias[k];
    if (std::abs(out.trace.bias[k] - out.trace.bias[k - 1]) < threshold) {
      out.stabilized = true;
      break;
    }
  }
  return out;
}

double gig_moment_quadrature(const GigParams& params, int k, const QuadOptions& opts) {
  params.validate();
  auto log_kernel = [&](double s) { return log_gig_kernel(std::exp(s), params) + s; };
  auto log_moment = [&](double s) { return log_kernel(s) + k * s; };
  const auto z = integrate_log_real_line(log_kernel, opts);
  const auto num = integrate_log_real_line(log_moment, opts);
  return std::exp(num.log_value - z.log_value);
}

OracleComparison mcmc_vs_oracle(const PriorFamily& family, const GlobalParams& globals,
                                std::int64_t y, double eta, const ChainConfig& chain) {
  OracleComparison out;
  out.oracle = posterior_mean_quadrature(family, globals, y, eta);

  ModelSpec spec;
  spec.family = family;
  spec.n_draws = chain.n_draws;
  spec.burn_in = chain.burn_in;
  spec.seed = chain.seed;
  spec.fixed_alpha = globals.alpha;
  spec.fixed_beta = globals.beta;
  if (family.kind != Family::PG) spec.fixed_gamma = family.gamma;

  const auto data = CountDataset::from_counts({y}, {eta});
  const auto draws = run_chain(data, spec);
  const auto s = summarize("lambda_1", draws.column("lambda_1"));
  out.mcmc_mean = s.mean;
  out.mcmc_se = s.mcse();
  out.abs_diff = std::abs(s.mean - out.oracle);
  out.z = out.mcmc_se > 0.0 ? out.abs_diff / out.mcmc_se : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace countshrink
