#include <doctest.h>

#include <cmath>

#include "countshrink/errors.hpp"
#include "countshrink/oracle.hpp"

using namespace countshrink;

namespace {
const GlobalParams kOne{1.0, 1.0};
}

TEST_CASE("PG posterior mean is closed form") {
  CHECK(posterior_mean_quadrature({Family::PG}, kOne, 0) == 0.5);
  CHECK(posterior_mean_quadrature({Family::PG}, {2.0, 3.0}, 4, 2.0) == doctest::Approx(6.0 / 5.0));
}

TEST_CASE("IG bias tends to minus gamma") {
  const auto c = bias_curve({Family::IG, 0.5}, kOne, {1000});
  CHECK(std::abs(c.bias[0] + 0.5) < 0.02);
  const auto s = stabilized_bias({Family::IG, 1.0}, kOne);
  CHECK(s.stabilized);
  CHECK(std::abs(s.bias + 1.0) < 0.02);
}

TEST_CASE("EH bias shrinks toward zero") {
  const auto c = bias_curve({Family::EH, 1.0}, kOne, {100, 1000, 10000});
  CHECK(std::abs(c.bias[1]) < std::abs(c.bias[0]));
  CHECK(std::abs(c.bias[2]) < std::abs(c.bias[1]));
  CHECK(std::abs(c.bias[2]) < 0.5);
  CHECK(c.relative[2] < 1e-4);
}

TEST_CASE("fixed local scale is not weakly tail-robust") {
  const double y = 1e4;
  const double est = fixed_u_estimate(kOne, 1.0, static_cast<std::int64_t>(y));
  CHECK(std::abs(est - y) / y == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("posterior mean bounds and monotonicity") {
  for (const PriorFamily f :
       {PriorFamily{Family::IG, 1.0}, PriorFamily{Family::EH, 1.0}, PriorFamily{Family::PG}}) {
    double prev = 0.0;
    for (std::int64_t y = 0; y <= 100; ++y) {
      const double m = posterior_mean_quadrature(f, kOne, y);
      CHECK(m > 0.0);
      CHECK(m < 1.0 + y);
      CHECK(m >= prev);
      prev = m;
    }
  }
}

TEST_CASE("quadrature is stable when the subdivision limit doubles") {
  QuadOptions base;
  QuadOptions doubled = base;
  doubled.max_depth *= 2;
  doubled.max_pieces *= 2;
  for (const PriorFamily f : {PriorFamily{Family::IG, 0.5}, PriorFamily{Family::EH, 1.0}}) {
    for (std::int64_t y : {0, 3, 50, 10000}) {
      const double a = posterior_mean_quadrature(f, kOne, y, 1.0, base);
      const double b = posterior_mean_quadrature(f, kOne, y, 1.0, doubled);
      CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
    }
  }
}

TEST_CASE("bias curve validation") {
  CHECK_THROWS_AS(bias_curve({Family::EH}, kOne, {}), DomainError);
  CHECK_THROWS_AS(bias_curve({Family::EH}, kOne, {3, 2}), DomainError);
  const auto c = bias_curve({Family::EH}, kOne, {0, 1});
  CHECK(std::isnan(c.relative[0]));
}

TEST_CASE("MCMC agrees with the oracle at fixed hyperparameters") {
  ChainConfig cfg;
  cfg.n_draws = 20000;
  cfg.seed = 3;
  const auto pg = mcmc_vs_oracle({Family::PG}, kOne, 3, 1.0, cfg);
  CHECK(pg.oracle == 2.0);
  CHECK(pg.z < 3.0);
  const auto ig = mcmc_vs_oracle({Family::IG, 1.0}, kOne, 10, 1.0, cfg);
  CHECK(ig.z < 3.0);
  const auto eh = mcmc_vs_oracle({Family::EH, 1.0}, kOne, 50, 1.0, cfg);
  CHECK(eh.z < 3.0);
}
