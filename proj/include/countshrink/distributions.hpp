#pragma once

#include <cstdint>
#include <vector>

#include "countshrink/rng.hpp"

namespace countshrink {

// Generalized inverse Gaussian with density proportional to
//   x^(order - 1) * exp(-(linear_rate * x + inverse_rate / x) / 2),  x > 0.
struct GigParams {
  double order = 1.0;
  double linear_rate = 1.0;
  double inverse_rate = 0.0;

  // Throws DomainError naming the offending field.
  void validate() const;
};

// Result of a Chinese-restaurant-table draw.
struct CrtDraw {
  std::int64_t count = 0;
  double shape = 1.0;
  std::int64_t tables = 0;
};

inline constexpr std::int64_t kDefaultCrtPmfCap = 10'000;

// --- primitive samplers (Boost.Random distributions over RngStream) -------

double sample_uniform(RngStream& rng);
double sample_normal(double mean, double sd, RngStream& rng);
// Shape/rate parametrization: density proportional to x^(shape-1) e^(-rate x).
double sample_gamma(double shape, double rate, RngStream& rng);
// Inverse gamma with density proportional to x^(-shape-1) e^(-scale/x).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);
double sample_exponential(double rate, RngStream& rng);
std::int64_t sample_poisson(double mean, RngStream& rng);
double sample_student_t(double dof, RngStream& rng);
bool sample_bernoulli(double p, RngStream& rng);

// --- samplers needed by the Gibbs sweeps -----------------------------------

double sample_gig(const GigParams& params, RngStream& rng);

// tables = sum_{j=1}^{count} Bernoulli(shape / (j - 1 + shape)).
CrtDraw sample_crt(std::int64_t count, double shape, RngStream& rng);

// P(tables = k) for k = 1..count, returned at index k - 1. Computed in log
// space from unsigned Stirling numbers of the first kind.
std::vector<double> crt_exact_pmf(std::int64_t count, double shape,
                                  std::int64_t cap = kDefaultCrtPmfCap);

// log|s(n, k)| for k = 0..n (index k). -inf where the number is zero.
std::vector<double> log_unsigned_stirling_first(std::int64_t n,
                                                std::int64_t cap = kDefaultCrtPmfCap);

// min(upper, max(lower, Z)) with Z ~ N(current, step_sd^2).
double sample_truncated_rw_proposal(double current, double step_sd, double lower,
                                    double upper, RngStream& rng);

// --- log densities ------------------------------------------------------------

double log_gamma_density(double x, double shape, double rate);
double log_inverse_gamma_density(double x, double shape, double scale);
double log_poisson_pmf(std::int64_t y, double mean);
// log of x^(order-1) exp(-(a x + b / x) / 2), without the normalizing constant.
double log_gig_kernel(double x, const GigParams& params);

}  // namespace countshrink
