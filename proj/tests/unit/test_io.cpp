#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "countshrink/errors.hpp"
#include "countshrink/io.hpp"

using namespace countshrink;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_count_csv(in);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("reals round trip through text") {
  RngStream rng(3);
  for (int k = 0; k < 2000; ++k) {
    const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng() % 200) - 100);
    CHECK(std::stod(format_real(x)) == x);
  }
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "NA");
}

TEST_CASE("count CSV with offsets and covariates") {
  std::istringstream in("id,y,offset,x1,x2\n\na, 3 ,2.5,0.1,-1\nb,0,1,1e-3,2\n");
  const auto csv = read_count_csv(in);
  REQUIRE(csv.data.size() == 2);
  CHECK(csv.data.ids[0] == "a");
  CHECK(csv.data.y[0] == 3);
  CHECK(csv.data.offset[0] == 2.5);
  CHECK(csv.data.covariates.cols() == 2);
  CHECK(csv.data.covariates(1, 0) == 1e-3);
  CHECK(csv.covariate_names == std::vector<std::string>{"x1", "x2"});
}

TEST_CASE("offset column is optional") {
  std::istringstream plain("id,y\n1,4\n2,7\n");
  const auto a = read_count_csv(plain);
  CHECK(a.data.offset == std::vector<double>{1.0, 1.0});
  CHECK_FALSE(a.data.has_covariates());

  std::istringstream cov("id,y,z\n1,4,0.5\n");
  const auto b = read_count_csv(cov);
  CHECK(b.data.offset[0] == 1.0);
  CHECK(b.covariate_names == std::vector<std::string>{"z"});
}

TEST_CASE("malformed input reports the line") {
  CHECK(error_of("id,y\n1,3\n2,-1\n").find("line 3") != std::string::npos);
  CHECK(error_of("id,y\n1,3\n2,-1\n").find("negative count") != std::string::npos);
  CHECK(error_of("id,y\n1,2.5\n").find("line 2") != std::string::npos);
  CHECK(error_of("id,y,offset\n1,2,0\n").find("offset must be positive") != std::string::npos);
  CHECK(error_of("id,y,offset\n1,2\n").find("expected 3 fields") != std::string::npos);
  CHECK(error_of("id,y,x1\n1,2,abc\n").find("'x1'") != std::string::npos);
  CHECK(error_of("count,y\n1,2\n").find("header") != std::string::npos);
  CHECK(error_of("id,y\n").find("no data rows") != std::string::npos);
  CHECK(error_of("").find("no header") != std::string::npos);
}

TEST_CASE("count CSV writer round trips") {
  RngStream rng(5);
  auto syn = synthetic_areal(40, 3, rng);
  std::ostringstream out;
  write_count_csv(out, syn.data, {"a", "b", "c"});
  std::istringstream in(out.str());
  const auto back = read_count_csv(in);
  CHECK(back.data.y == syn.data.y);
  CHECK(back.data.offset == syn.data.offset);
  CHECK(back.data.covariates == syn.data.covariates);
  CHECK(back.covariate_names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("synthetic areal covariates are standardized") {
  RngStream rng(6);
  const auto syn = synthetic_areal(500, 6, rng);
  CHECK(syn.data.size() == 500);
  CHECK(syn.delta.size() == 6);
  CHECK(syn.delta(0) == 0.4);
  for (Eigen::Index k = 0; k < 6; ++k) {
    const auto col = syn.data.covariates.col(k);
    CHECK(std::abs(col.mean()) < 1e-12);
    CHECK(std::sqrt(col.squaredNorm() / 499.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(synthetic_areal(1, 2, rng), DomainError);
}

TEST_CASE("draws CSV round trips exactly") {
  PosteriorDraws draws({"lambda_1", "alpha"}, 3);
  draws.append_row({0.1, 1.0 / 3.0});
  draws.append_row({1e-300, 7.25});
  std::ostringstream out;
  write_draws_csv(out, draws);
  std::istringstream in(out.str());
  const auto back = read_draws_csv(in);
  CHECK(back.names() == draws.names());
  CHECK(back.column(0) == draws.column(0));
  CHECK(back.column(1) == draws.column(1));
}

TEST_CASE("summary CSV maps lambda rows to ids") {
  ParameterSummary a, b;
  a.name = "lambda_2";
  a.mean = 1.5;
  b.name = "beta";
  std::vector<ParameterSummary> rows{a, b};
  std::ostringstream out;
  write_summary_csv(out, rows, {"x", "y"});
  const std::string s = out.str();
  CHECK(s.find("lambda_2,y,1.5,") != std::string::npos);
  CHECK(s.find("beta,,0,") != std::string::npos);
}

TEST_CASE("metric table layout") {
  StudyConfig cfg;
  cfg.m = 60;
  cfg.replicates = 5;
  cfg.n_draws = 200;
  cfg.burn_in = 50;
  cfg.threads = 2;
  const auto table = run_study(cfg);
  std::ostringstream out;
  write_metric_table(out, table);
  const std::string s = out.str();
  CHECK(s.rfind("scenario,omega,metric,IG,EH,PG,ML\n", 0) == 0);
  CHECK(count_lines(s) == 1 + 8);
  CHECK(s.find("I,0.10000000000000001,CP-o,") != std::string::npos);
  // ML has no intervals.
  CHECK(s.find(",NA\n") != std::string::npos);

  std::ostringstream details;
  write_study_details(details, table);
  CHECK(count_lines(details.str()) == 1 + 4);
}

TEST_CASE("grid and bias writers") {
  std::vector<double> x{0.5, 1.0}, v{0.25, 0.75};
  std::ostringstream out;
  write_grid_csv(out, "lambda", x, v);
  CHECK(out.str() == "lambda,value\n0.5,0.25\n1,0.75\n");
  std::vector<double> short_v{1.0};
  CHECK_THROWS_AS(write_grid_csv(out, "lambda", x, short_v), DomainError);

  BiasCurve c{{0, 2}, {0.5, 1.5}, {0.5, -0.5}, {std::nan(""), 0.25}};
  std::ostringstream b;
  write_bias_csv(b, c);
  CHECK(b.str() == "y,estimate,bias,relative\n0,0.5,0.5,NA\n2,1.5,-0.5,0.25\n");
}
