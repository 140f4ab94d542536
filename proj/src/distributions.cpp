#include "countshrink/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

#include "countshrink/errors.hpp"

namespace countshrink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// The GIG generator below follows Hoermann & Leydold (2014), working on the
// standardized law with density proportional to x^(lambda-1) exp(-omega/2 (x + 1/x)),
// lambda >= 0. The original variate is scale * X (or scale / X when the
// requested order is negative).

double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0) {
    return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) /
           omega;
  }
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

// Ratio-of-uniforms without mode shift.
double gig_rou_noshift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym =
      ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Ratio-of-uniforms with mode shift (Cardano's rule for the bounding box).
double gig_rou_shift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);

  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = (2.0 * (lambda - 1.0) * xm / omega - 1.0);
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;

  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);
  for (;;) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Rejection from a three-piece hat; covers 0 <= lambda < 1, small omega where
// the density is not T-concave.
double gig_non_concave(double lambda, double omega, RngStream& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  double area[3];
  double k1, k2;
  area[0] = k0 * x0;
  if (x0 >= 2.0 / omega) {
    k1 = 0.0;
    area[1] = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    area[1] = (lambda == 0.0)
                  ? k1 * std::log(2.0 / (omega * omega))
                  : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    area[2] = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = area[0] + area[1] + area[2];

  for (;;) {
    double v = total * rng.uniform();
    double x, hx;
    if (v <= area[0]) {
      x = x0 * v / area[0];
      hx = k0;
    } else if ((v -= area[0]) <= area[1]) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + (lambda / k1 * v), 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= area[1];
      const double left = std::max(x0, 2.0 / omega);
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * left) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

// Below this omega the standardized law is numerically a gamma or an
// inverse gamma in the original parametrization.
constexpr double kOmegaFloor = 1e-140;

}  // namespace

void GigParams::validate() const {
  if (!std::isfinite(order)) throw DomainError("order", "must be finite");
  if (!(linear_rate > 0.0) || !std::isfinite(linear_rate)) {
    throw DomainError("linear_rate", "must be positive and finite, got " + std::to_string(linear_rate));
  }
  if (!(inverse_rate >= 0.0) || !std::isfinite(inverse_rate)) {
    throw DomainError("inverse_rate",
                      "must be non-negative and finite, got " + std::to_string(inverse_rate));
  }
  if (inverse_rate == 0.0 && !(order > 0.0)) {
    throw DomainError("order", "must be positive when inverse_rate is zero");
  }
}

double sample_uniform(RngStream& rng) { return rng.uniform(); }

double sample_normal(double mean, double sd, RngStream& rng) {
  return boost::random::normal_distribution<double>(mean, sd)(rng);
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0)) throw DomainError("shape", "must be positive");
  if (!(rate > 0.0)) throw DomainError("rate", "must be positive");
  return boost::random::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  return 1.0 / sample_gamma(shape, scale, rng);
}

double sample_exponential(double rate, RngStream& rng) {
  return boost::random::exponential_distribution<double>(rate)(rng);
}

std::int64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("mean", "must be finite and >= 0");
  if (mean == 0.0) return 0;
  return boost::random::poisson_distribution<std::int64_t, double>(mean)(rng);
}

double sample_student_t(double dof, RngStream& rng) {
  return boost::random::student_t_distribution<double>(dof)(rng);
}

bool sample_bernoulli(double p, RngStream& rng) { return rng.uniform() < p; }

double sample_gig(const GigParams& params, RngStream& rng) {
  params.validate();
  const double a = params.linear_rate;
  const double b = params.inverse_rate;
  const double p = params.order;
  if (b == 0.0) return sample_gamma(p, a / 2.0, rng);

  double omega = std::sqrt(a * b);
  const double scale = std::sqrt(b / a);
  const double lambda = std::abs(p);
  if (omega < kOmegaFloor) {
    if (p > 0.0) return sample_gamma(p, a / 2.0, rng);
    if (p < 0.0) return sample_inverse_gamma(-p, b / 2.0, rng);
    omega = kOmegaFloor;
  }

  double x;
  if (lambda > 2.0 || omega > 3.0) {
    x = gig_rou_shift(lambda, omega, rng);
  } else if (lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    x = gig_rou_noshift(lambda, omega, rng);
  } else {
    x = gig_non_concave(lambda, omega, rng);
  }
  return p < 0.0 ? scale / x : scale * x;
}

CrtDraw sample_crt(std::int64_t count, double shape, RngStream& rng) {
  if (count < 0) throw DomainError("count", "must be non-negative");
  if (!(shape > 0.0)) throw DomainError("shape", "must be positive");
  CrtDraw draw{count, shape, 0};
  for (std::int64_t j = 1; j <= count; ++j) {
    if (rng.uniform() * (static_cast<double>(j - 1) + shape) < shape) ++draw.tables;
  }
  return draw;
}

std::vector<double> log_unsigned_stirling_first(std::int64_t n, std::int64_t cap) {
  if (n < 0) throw DomainError("count", "must be non-negative");
  if (n > cap) {
    throw ResourceError("Stirling table for n=" + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  }
  // |s(j+1, k)| = j |s(j, k)| + |s(j, k-1)|, |s(0, 0)| = 1.
  std::vector<double> row(static_cast<std::size_t>(n) + 1, -kInf);
  row[0] = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const double log_j = j > 0 ? std::log(static_cast<double>(j)) : -kInf;
    for (std::int64_t k = j + 1; k >= 1; --k) {
      const double stay = row[k] == -kInf ? -kInf : log_j + row[k];
      row[k] = log_add_exp(stay, row[k - 1]);
    }
    row[0] = -kInf;
  }
  if (n == 0) row[0] = 0.0;
  return row;
}

std::vector<double> crt_exact_pmf(std::int64_t count, double shape, std::int64_t cap) {
  if (count < 1) throw DomainError("count", "must be at least 1");
  if (!(shape > 0.0)) throw DomainError("shape", "must be positive");
  const auto stirling = log_unsigned_stirling_first(count, cap);
  const double log_shape = std::log(shape);
  std::vector<double> pmf(static_cast<std::size_t>(count));
  double hi = -kInf;
  for (std::int64_t k = 1; k <= count; ++k) {
    pmf[k - 1] = stirling[k] + static_cast<double>(k) * log_shape;
    hi = std::max(hi, pmf[k - 1]);
  }
  double total = 0.0;
  for (double& v : pmf) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : pmf) v /= total;
  return pmf;
}

double sample_truncated_rw_proposal(double current, double step_sd, double lower, double upper,
                                    RngStream& rng) {
  if (!(lower < upper)) throw DomainError("lower", "must be below upper");
  if (!(step_sd > 0.0)) throw DomainError("step_sd", "must be positive");
  const double z = sample_normal(current, step_sd, rng);
  return std::min(upper, std::max(lower, z));
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return -kInf;
  return shape * std::log(rate) - boost::math::lgamma(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

double log_inverse_gamma_density(double x, double shape, double scale) {
  if (!(x > 0.0)) return -kInf;
  return shape * std::log(scale) - boost::math::lgamma(shape) - (shape + 1.0) * std::log(x) -
         scale / x;
}

double log_poisson_pmf(std::int64_t y, double mean) {
  if (y < 0) return -kInf;
  if (mean == 0.0) return y == 0 ? 0.0 : -kInf;
  const double yd = static_cast<double>(y);
  return yd * std::log(mean) - mean - std::lgamma(yd + 1.0);
}

double log_gig_kernel(double x, const GigParams& params) {
  if (!(x > 0.0)) return -kInf;
  return (params.order - 1.0) * std::log(x) -
         0.5 * (params.linear_rate * x + params.inverse_rate / x);
}

}  // namespace countshrink
