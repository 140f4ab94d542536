#include "countshrink/priors.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "countshrink/distributions.hpp"
#include "countshrink/errors.hpp"

namespace countshrink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^s) without overflow.
double log1p_exp(double s) { return s > 35.0 ? s + std::exp(-s) : std::log1p(std::exp(s)); }

void require_local_scale(const PriorFamily& family) {
  if (family.kind == Family::PG) {
    throw UnsupportedFamilyError("the PG family has no local scale u");
  }
}

QuadOptions lambda_scan(QuadOptions opts, double lambda) {
  // Centre the mode scan on log(lambda); the u-mode of every integrand used
  // here sits within a few units of it.
  const double c = std::log(lambda);
  opts.scan_lo = std::min(opts.scan_lo, c - 40.0);
  opts.scan_hi = std::max(opts.scan_hi, c + 40.0);
  return opts;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::IG: return "IG";
    case Family::EH: return "EH";
    case Family::PG: return "PG";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  if (name == "IG" || name == "ig") return Family::IG;
  if (name == "EH" || name == "eh") return Family::EH;
  if (name == "PG" || name == "pg") return Family::PG;
  throw ValidationError("unknown prior family '" + std::string(name) + "' (expected IG, EH or PG)");
}

void PriorFamily::validate() const {
  if (kind != Family::PG && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw DomainError("gamma", "must be positive and finite");
  }
}

void GlobalParams::validate() const {
  if (!(alpha > 0.0 && std::isfinite(alpha))) throw DomainError("alpha", "must be positive");
  if (!(beta > 0.0 && std::isfinite(beta))) throw DomainError("beta", "must be positive");
}

double log_density_u(const PriorFamily& family, double u) {
  require_local_scale(family);
  family.validate();
  if (!(u > 0.0)) {
    if (u == 0.0 && family.kind == Family::EH) return std::log(family.gamma);
    return -kInf;
  }
  if (family.kind == Family::IG) {
    return log_inverse_gamma_density(u, family.ig_shape(), family.ig_scale());
  }
  const double g = family.gamma;
  const double l1 = std::log1p(u);
  return std::log(g) - l1 - (1.0 + g) * std::log1p(l1);
}

double log_density_u_at_log(const PriorFamily& family, double s) {
  require_local_scale(family);
  if (family.kind == Family::IG) {
    const double a = family.ig_shape();
    const double b = family.ig_scale();
    return a * std::log(b) - boost::math::lgamma(a) - (a + 1.0) * s - b * std::exp(-s);
  }
  const double g = family.gamma;
  const double l1 = log1p_exp(s);
  return std::log(g) - l1 - (1.0 + g) * std::log1p(l1);
}

double log_density_log_u(const PriorFamily& family, double s) {
  require_local_scale(family);
  if (family.kind == Family::IG) {
    const double a = family.ig_shape();
    const double b = family.ig_scale();
    return a * std::log(b) - boost::math::lgamma(a) - a * s - b * std::exp(-s);
  }
  const double g = family.gamma;
  // s - log(1 + e^s) = -log(1 + e^-s).
  return std::log(g) - log1p_exp(-s) - (1.0 + g) * std::log1p(log1p_exp(s));
}

double cdf_u_eh(double gamma, double u) {
  if (!(gamma > 0.0)) throw DomainError("gamma", "must be positive");
  if (!(u > 0.0)) return 0.0;
  return -std::expm1(-gamma * std::log1p(std::log1p(u)));
}

double tail_index(const PriorFamily& family) {
  require_local_scale(family);
  family.validate();
  if (family.kind == Family::IG) return -(1.0 + family.ig_shape());
  return -1.0;
}

double marginal_prior_lambda(const PriorFamily& family, const GlobalParams& globals, double lambda,
                             const QuadOptions& opts) {
  globals.validate();
  family.validate();
  if (!(lambda > 0.0)) throw DomainError("lambda", "must be positive");
  const double a = globals.alpha;
  const double b = globals.beta;
  switch (family.kind) {
    case Family::PG:
      return std::exp(log_gamma_density(lambda, a, b));
    case Family::IG: {
      // 1/u ~ Ga(shape, scale) gives a scaled beta-prime law for lambda.
      const double shape = family.ig_shape();
      const double r = b / family.ig_scale();
      const double log_p = a * std::log(r) - std::log(boost::math::beta(a, shape)) +
                           (a - 1.0) * std::log(lambda) - (a + shape) * std::log1p(r * lambda);
      return std::exp(log_p);
    }
    case Family::EH: {
      auto log_integrand = [&](double s) {
        return log_gamma_density(lambda, a, b * std::exp(-s)) + log_density_log_u(family, s);
      };
      return std::exp(integrate_log_real_line(log_integrand, lambda_scan(opts, lambda)).log_value);
    }
  }
  return 0.0;
}

double log_posterior_weight_u_at_log(const PriorFamily& family, const GlobalParams& globals,
                                     std::int64_t y, double eta, double s) {
  const double yd = static_cast<double>(y);
  const double log_b = std::log(globals.beta);
  return log_density_u_at_log(family, s) + yd * s -
         (yd + globals.alpha) * (log_b + log1p_exp(s + std::log(eta) - log_b));
}

std::vector<double> marginal_posterior_lambda(const PriorFamily& family,
                                              const GlobalParams& globals, std::int64_t y,
                                              double eta, std::span<const double> grid,
                                              const QuadOptions& opts) {
  globals.validate();
  family.validate();
  if (y < 0) throw DomainError("y", "must be non-negative");
  if (!(eta > 0.0)) throw DomainError("eta", "must be positive");
  const double shape = static_cast<double>(y) + globals.alpha;
  std::vector<double> out(grid.size(), 0.0);

  if (family.kind == Family::PG) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out[k] = grid[k] > 0.0 ? std::exp(log_gamma_density(grid[k], shape, eta + globals.beta))
                             : (shape > 1.0 ? 0.0 : kInf);
    }
    return out;
  }

  // Posterior weight of u on the log scale, including the Jacobian du = u ds.
  auto log_weight = [&](double s) {
    return log_posterior_weight_u_at_log(family, globals, y, eta, s) + s;
  };
  const double log_norm = integrate_log_real_line(log_weight, opts).log_value;

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double lambda = grid[k];
    if (!(lambda > 0.0)) {
      out[k] = shape > 1.0 ? 0.0 : kInf;
      continue;
    }
    auto log_integrand = [&](double s) {
      return log_gamma_density(lambda, shape, eta + globals.beta * std::exp(-s)) + log_weight(s);
    };
    const auto r = integrate_log_real_line(log_integrand, lambda_scan(opts, lambda));
    out[k] = std::exp(r.log_value - log_norm);
  }
  return out;
}

std::vector<double> make_grid(double lo, double hi, std::size_t n, bool log_spaced) {
  if (n < 2) throw DomainError("n", "grid needs at least two points");
  if (!(lo < hi)) throw DomainError("lo", "must be below hi");
  if (log_spaced && !(lo > 0.0)) throw DomainError("lo", "log-spaced grid needs lo > 0");
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    g[k] = log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                      : lo + t * (hi - lo);
  }
  g.back() = hi;
  return g;
}

}  // namespace countshrink
