#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "countshrink/quadrature.hpp"

namespace countshrink {

// IG: u ~ IG(gamma, gamma). EH: extremely heavy-tailed prior on u.
// PG: plain Poisson-gamma model, u fixed at 1.
enum class Family { IG, EH, PG };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

struct PriorFamily {
  Family kind = Family::EH;
  double gamma = 1.0;
  // IG only: use IG(gamma + 1, gamma), which has a finite prior mean for lambda.
  bool ig_finite_mean = false;

  void validate() const;
  // Shape and scale of the inverse gamma law for u (IG family only).
  double ig_shape() const { return ig_finite_mean ? gamma + 1.0 : gamma; }
  double ig_scale() const { return gamma; }
};

struct GlobalParams {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;
};

// log pi(u) for IG and EH. PG throws UnsupportedFamilyError.
double log_density_u(const PriorFamily& family, double u);
// log pi(e^s), i.e. the same density evaluated at u = exp(s), stable for |s| large.
double log_density_u_at_log(const PriorFamily& family, double s);
// Density of s = log u, i.e. log pi(e^s) + s, without cancellation for large s.
double log_density_log_u(const PriorFamily& family, double s);

double cdf_u_eh(double gamma, double u);

// lim_{u->inf} u pi'(u) / pi(u). IG: -(1 + shape), EH: -1.
double tail_index(const PriorFamily& family);

// Marginal prior density of lambda after integrating out u.
double marginal_prior_lambda(const PriorFamily& family, const GlobalParams& globals, double lambda,
                             const QuadOptions& opts = {});

// Marginal posterior density of lambda given one count y with offset eta,
// evaluated on the supplied grid.
std::vector<double> marginal_posterior_lambda(const PriorFamily& family,
                                              const GlobalParams& globals, std::int64_t y,
                                              double eta, std::span<const double> grid,
                                              const QuadOptions& opts = {});

// log of the unnormalized posterior weight of u given y:
//   log pi(u) + y log u - (y + alpha) log(eta u + beta),  u = exp(s).
double log_posterior_weight_u_at_log(const PriorFamily& family, const GlobalParams& globals,
                                     std::int64_t y, double eta, double s);

// Evenly (or log-evenly) spaced grid; 512 points by default.
std::vector<double> make_grid(double lo, double hi, std::size_t n = 512, bool log_spaced = false);

}  // namespace countshrink
