#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "countshrink/distributions.hpp"
#include "countshrink/errors.hpp"
#include "countshrink/oracle.hpp"
#include "countshrink/priors.hpp"
#include "countshrink/quadrature.hpp"

using namespace countshrink;

namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0;
  for (std::size_t k = 1; k < x.size(); ++k) s += 0.5 * (f[k] + f[k - 1]) * (x[k] - x[k - 1]);
  return s;
}

}  // namespace

TEST_CASE("family names round-trip") {
  for (auto f : {Family::IG, Family::EH, Family::PG}) CHECK(family_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(family_from_string("GH"), ValidationError);
}

TEST_CASE("EH density at the boundary and normalization") {
  CHECK(std::exp(log_density_u({Family::EH, 1.0}, 0.0)) == doctest::Approx(1.0));
  for (double g : {0.25, 0.5, 1.0, 2.0}) {
    const PriorFamily f{Family::EH, g};
    auto lf = [&](double s) { return log_density_log_u(f, s); };
    QuadOptions opts;
    opts.max_pieces = 2000;
    CHECK(std::exp(integrate_log_real_line(lf, opts).log_value) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("IG density plug-in value") {
  CHECK(log_density_u({Family::IG, 2.0}, 1.0) == doctest::Approx(2 * std::log(2.0) - 2.0));
  const PriorFamily f{Family::IG, 2.0};
  auto lf = [&](double s) { return log_density_u_at_log(f, s) + s; };
  CHECK(integrate_log_real_line(lf).log_value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(log_density_u_at_log(f, 0.0) == doctest::Approx(log_density_u(f, 1.0)));
  for (double s : {-3.0, 0.5, 4.0}) {
    CHECK(log_density_log_u(f, s) == doctest::Approx(log_density_u_at_log(f, s) + s));
    const PriorFamily eh{Family::EH, 0.7};
    CHECK(log_density_log_u(eh, s) == doctest::Approx(log_density_u_at_log(eh, s) + s));
  }
}

TEST_CASE("PG has no local density") {
  CHECK_THROWS_AS(log_density_u({Family::PG}, 1.0), UnsupportedFamilyError);
  CHECK_THROWS_AS(tail_index({Family::PG}), UnsupportedFamilyError);
}

TEST_CASE("EH cdf") {
  CHECK(cdf_u_eh(1.0, 0.0) == 0.0);
  CHECK(cdf_u_eh(1.0, std::numbers::e - 1.0) == doctest::Approx(0.5));
  CHECK(cdf_u_eh(2.0, std::numbers::e - 1.0) == doctest::Approx(0.75));
}

TEST_CASE("EH generative augmentation reproduces the cdf") {
  RngStream rng(5);
  const int n = 100000;
  for (double g : {0.5, 1.0, 2.0}) {
    std::vector<double> u(n);
    for (auto& x : u) {
      const double w = sample_gamma(g, 1.0, rng);
      const double v = sample_gamma(w, 1.0, rng);
      x = sample_exponential(v, rng);
    }
    std::sort(u.begin(), u.end());
    double ks = 0;
    // Draws beyond the double range are +inf; the empirical cdf is compared at
    // finite points only.
    for (int i = 0; i < n && std::isfinite(u[i]); ++i) {
      const double c = cdf_u_eh(g, u[i]);
      ks = std::max({ks, std::abs(c - double(i) / n), std::abs(c - double(i + 1) / n)});
    }
    INFO("gamma=" << g);
    CHECK(ks < 0.01);
  }
}

TEST_CASE("tail index matches finite differences far in the tail") {
  for (double g : {0.25, 0.5, 1.0, 2.0}) {
    for (auto kind : {Family::IG, Family::EH}) {
      const PriorFamily f{kind, g};
      const double u = 1e8, h = 1e3;
      const double deriv = (std::exp(log_density_u(f, u + h)) - std::exp(log_density_u(f, u - h))) /
                           (2 * h);
      const double fd = u * deriv / std::exp(log_density_u(f, u));
      const double xi = tail_index(f);
      // EH approaches -1 like -1 - (1 + g) / log(u), so compare against that rate.
      const double tol = kind == Family::EH ? 1e-3 + (1 + g) / std::log(u) : 1e-3;
      CHECK(std::abs(fd - xi) < tol);
    }
  }
  CHECK(tail_index({Family::EH, 3.0}) == -1.0);
  CHECK(tail_index({Family::IG, 0.5}) == -1.5);
}

TEST_CASE("IG marginal prior closed form") {
  const GlobalParams one{1, 1};
  CHECK(marginal_prior_lambda({Family::IG, 1.0}, one, 1e-12) == doctest::Approx(1.0));
  CHECK(marginal_prior_lambda({Family::IG, 1.0}, one, 3.0) == doctest::Approx(1.0 / 16.0));
  // Agrees with direct quadrature of the mixture.
  const PriorFamily f{Family::IG, 1.5};
  const GlobalParams g{2.0, 1.3};
  for (double lambda : {0.1, 1.0, 10.0}) {
    auto lf = [&](double s) {
      return log_gamma_density(lambda, g.alpha, g.beta * std::exp(-s)) + log_density_u_at_log(f, s) + s;
    };
    CHECK(marginal_prior_lambda(f, g, lambda) ==
          doctest::Approx(std::exp(integrate_log_real_line(lf).log_value)).epsilon(1e-8));
  }
}

TEST_CASE("IG marginal implies a beta law") {
  RngStream rng(6);
  const double a = 2.0, b = 2.0, g = 1.0;
  const int n = 100000;
  std::vector<double> t(n);
  for (auto& x : t) {
    const double u = sample_inverse_gamma(g, g, rng);
    const double lambda = sample_gamma(a, b / u, rng);
    x = (b / g) * lambda / (1 + (b / g) * lambda);
  }
  std::sort(t.begin(), t.end());
  boost::math::beta_distribution<double> law(a, g);
  double ks = 0;
  for (int i = 0; i < n; ++i) {
    const double c = boost::math::cdf(law, t[i]);
    ks = std::max({ks, std::abs(c - double(i) / n), std::abs(c - double(i + 1) / n)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("EH marginal prior limits") {
  CHECK(marginal_prior_lambda({Family::EH, 1.0}, {2.0, 1.0}, 1e-8) ==
        doctest::Approx(1.0).epsilon(1e-3));
  // Right tail tracks the local prior itself.
  const double lambda = 1e6;
  const double ratio = marginal_prior_lambda({Family::EH, 1.0}, {1.0, 1.0}, lambda) /
                       std::exp(log_density_u({Family::EH, 1.0}, lambda));
  CHECK(ratio > 0.8);
  CHECK(ratio < 1.2);
}

TEST_CASE("marginal prior tail slopes") {
  const GlobalParams one{1, 1};
  for (double g : {0.5, 1.0, 2.0}) {
    const PriorFamily f{Family::IG, g};
    const double slope = (std::log(marginal_prior_lambda(f, one, 1e4)) -
                          std::log(marginal_prior_lambda(f, one, 1e3))) /
                         std::log(10.0);
    CHECK(std::abs(slope + 1 + g) < 0.05);
  }
}

TEST_CASE("prior densities integrate to one") {
  const GlobalParams g{2, 2};
  const auto grid = make_grid(1e-6, 200.0, 20001);
  for (const PriorFamily f : {PriorFamily{Family::IG, 1.0}, PriorFamily{Family::PG}}) {
    std::vector<double> d;
    for (double x : grid) d.push_back(marginal_prior_lambda(f, g, x));
    CHECK(trapezoid(grid, d) == doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("PG posterior is Ga(y + alpha, eta + beta)") {
  const auto grid = make_grid(0.01, 5.0, 50);
  const auto d = marginal_posterior_lambda({Family::PG}, {2, 2}, 1, 1.0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double exact = 27.0 / 2.0 * grid[k] * grid[k] * std::exp(-3.0 * grid[k]);
    CHECK(std::abs(d[k] - exact) < 1e-8);
  }
}

TEST_CASE("IG and EH posteriors at y = 1 are normalized and match their means") {
  const GlobalParams g{2, 2};
  const auto grid = make_grid(0.0, 60.0, 3001);
  for (const PriorFamily f : {PriorFamily{Family::IG, 1.0}, PriorFamily{Family::EH, 1.0}}) {
    const auto d = marginal_posterior_lambda(f, g, 1, 1.0, grid);
    const double mass = trapezoid(grid, d);
    CHECK(mass > 0.99);
    CHECK(mass < 1.01);
    std::vector<double> first(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) first[k] = grid[k] * d[k];
    CHECK(trapezoid(grid, first) == doctest::Approx(posterior_mean_quadrature(f, g, 1)).epsilon(2e-3));
  }
  for (std::int64_t y : {5, 15}) {
    const auto d = marginal_posterior_lambda({Family::EH, 1.0}, g, y, 1.0, grid);
    CHECK(trapezoid(grid, d) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("EH posterior at y = 1 matches importance sampling from the prior") {
  // Weighted prior draws: lambda ~ marginal prior, weight Po(1 | lambda).
  RngStream rng(8);
  const int n = 400000;
  const double lo = 0.5, hi = 1.0;
  double total = 0, inside = 0;
  for (int i = 0; i < n; ++i) {
    const double w = sample_gamma(1.0, 1.0, rng);
    const double v = sample_gamma(w, 1.0, rng);
    const double u = sample_exponential(v, rng);
    if (!(u < 1e300)) continue;
    const double lambda = sample_gamma(2.0, 2.0 / u, rng);
    const double weight = lambda * std::exp(-lambda);
    total += weight;
    if (lambda > lo && lambda <= hi) inside += weight;
  }
  const auto grid = make_grid(lo, hi, 201);
  const auto d = marginal_posterior_lambda({Family::EH, 1.0}, {2, 2}, 1, 1.0, grid);
  CHECK(trapezoid(grid, d) == doctest::Approx(inside / total).epsilon(0.02));
}

TEST_CASE("grid construction") {
  const auto g = make_grid(1.0, 100.0, 3, true);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(make_grid(0, 1).size() == 512);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 10, true), DomainError);
}
