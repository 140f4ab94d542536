#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "countshrink/diagnostics.hpp"
#include "countshrink/distributions.hpp"
#include "countshrink/errors.hpp"

using namespace countshrink;

namespace {

std::vector<double> ar1(double rho, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> x(n);
  double prev = sample_normal(0.0, 1.0 / std::sqrt(1.0 - rho * rho), rng);
  for (auto& v : x) {
    prev = rho * prev + sample_normal(0.0, 1.0, rng);
    v = prev;
  }
  return x;
}

}  // namespace

TEST_CASE("inefficiency factor of white noise and AR(1)") {
  CHECK(std::abs(inefficiency_factor(ar1(0.0, 100000, 1)).value - 1.0) < 0.1);
  CHECK(inefficiency_factor(ar1(0.5, 100000, 2)).value == doctest::Approx(3.0).epsilon(0.1));
  CHECK(inefficiency_factor(ar1(0.9, 200000, 3)).value == doctest::Approx(19.0).epsilon(0.1));
}

TEST_CASE("inefficiency factor is affine invariant") {
  const auto x = ar1(0.7, 20000, 4);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = -3.5 * x[i] + 12.0;
  CHECK(inefficiency_factor(y).value == doctest::Approx(inefficiency_factor(x).value).epsilon(1e-9));
}

TEST_CASE("inefficiency factor edge cases") {
  const std::vector<double> c(500, 2.0);
  const auto f = inefficiency_factor(c);
  CHECK(f.degenerate);
  CHECK(f.value == 1.0);
  CHECK_THROWS_AS(inefficiency_factor(std::vector<double>(99, 1.0)), DomainError);
}

TEST_CASE("quantile rule") {
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 1.0);
  CHECK(quantile(x, 0.025) == doctest::Approx(25.975));
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 1000.0);
  const auto s = summarize("x", x);
  CHECK(s.q025 == doctest::Approx(25.975));
  CHECK(s.q975 == doctest::Approx(975.025));
  CHECK_THROWS_AS(quantile(x, 1.5), DomainError);
}

TEST_CASE("quantiles shift with the draws") {
  const auto x = ar1(0.2, 1001, 5);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + 7.25;
  CHECK(quantile(y, 0.025) == doctest::Approx(quantile(x, 0.025) + 7.25).epsilon(1e-12));
  CHECK(quantile(y, 0.975) == doctest::Approx(quantile(x, 0.975) + 7.25).epsilon(1e-12));
}

TEST_CASE("constant chain summary") {
  const std::vector<double> c(300, 4.5);
  const auto s = summarize("c", c);
  CHECK(s.mean == 4.5);
  CHECK(s.sd == 0.0);
  CHECK(s.q025 == 4.5);
  CHECK(s.q975 == 4.5);
  CHECK(s.degenerate);
  CHECK_THROWS_AS(summarize("e", std::vector<double>{}), DomainError);
}

TEST_CASE("conjugate gamma chain mean") {
  RngStream rng(6);
  std::vector<double> x(50000);
  for (auto& v : x) v = sample_gamma(2.0, 2.0, rng);
  const auto s = summarize("g", x);
  CHECK(std::abs(s.mean - 1.0) < 3 * s.mcse());
  CHECK(s.q025 <= s.q975);
}
