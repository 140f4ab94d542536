// countshrink: fit tail-robust count models, run the simulation study and
// emit density and bias grids.
//
//   countshrink [--config FILE] [--output-dir DIR] [--seed N] <subcommand> ...
//
// Exit status: 0 success, 1 invalid input or usage, 2 numerical failure.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "countshrink/data.hpp"
#include "countshrink/diagnostics.hpp"
#include "countshrink/errors.hpp"
#include "countshrink/io.hpp"
#include "countshrink/mcmc.hpp"
#include "countshrink/oracle.hpp"
#include "countshrink/priors.hpp"
#include "countshrink/simstudy.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace countshrink;

namespace {

struct Options {
  fs::path output_dir = "out";
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  // model
  std::string family = "EH";
  double gamma = 1.0;
  bool ig_finite_mean = false;
  std::size_t draws = 3000;
  std::size_t burn_in = 500;
  std::size_t thin = 1;
  HyperPriors hyper;

  // fit
  std::string input;
  std::size_t synthetic = 0;
  std::size_t synthetic_covariates = 6;
  std::string regression = "auto";
  bool write_draws = false;
  bool store_latent = false;
  std::size_t hotspots = 10;

  // simulate
  std::vector<std::string> scenarios{"I"};
  std::vector<double> omegas{0.1};
  std::size_t m = 200;
  std::size_t replicates = 100;
  bool full = false;
  std::vector<std::string> methods{"IG", "EH", "PG", "ML"};

  // density and bias
  std::string kind = "prior";
  double alpha = 2.0;
  double beta = 2.0;
  std::vector<std::int64_t> y_values;
  double eta = 1.0;
  double lambda_min = 0.01;
  double lambda_max = 10.0;
  std::size_t points = 512;
  bool log_grid = false;
  std::string tag;
  double bias_alpha = 1.0;
  double bias_beta = 1.0;
  std::int64_t y_max = 10000;
  std::size_t bias_points = 60;

  // summarize
  std::string draws_path;
};

PriorFamily make_family(const Options& o) {
  PriorFamily f;
  f.kind = family_from_string(o.family);
  f.gamma = o.gamma;
  f.ig_finite_mean = o.ig_finite_mean;
  f.validate();
  return f;
}

std::string curve_tag(const Options& o) { return o.tag.empty() ? o.family : o.tag; }

// Every option with its effective value, for the manifest.
json option_values(const CLI::App& app) {
  json out = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "version") continue;
    const auto& res = opt->results();
    if (opt->get_expected_max() == 0) {
      out[name] = opt->count() > 0;
    } else if (res.size() > 1) {
      out[name] = res;
    } else if (!res.empty()) {
      out[name] = res.front();
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

class Manifest {
 public:
  Manifest(const CLI::App& app, const CLI::App& sub, const Options& o) {
    doc_["version"] = std::string(library_version());
    doc_["subcommand"] = sub.get_name();
    doc_["seed"] = o.seed;
    json cfg = option_values(app);
    cfg[sub.get_name()] = option_values(sub);
    doc_["config"] = std::move(cfg);
    doc_["outputs"] = json::array();
    doc_["timings_seconds"] = json::object();
  }

  void output(const fs::path& p) { doc_["outputs"].push_back(p.filename().string()); }
  void timing(const std::string& key, double seconds) { doc_["timings_seconds"][key] = seconds; }
  json& operator[](const std::string& key) { return doc_[key]; }

  void write(const fs::path& dir) const {
    auto out = open_output(dir / "manifest.json");
    out << doc_.dump(2) << '\n';
  }

 private:
  json doc_;
};

ModelSpec model_spec(const Options& o, const CountDataset& data) {
  ModelSpec spec;
  spec.family = make_family(o);
  spec.hyper = o.hyper;
  spec.n_draws = o.draws;
  spec.burn_in = o.burn_in;
  spec.thin = o.thin;
  spec.seed = o.seed;
  spec.store_latent = o.store_latent;
  if (o.regression == "auto") {
    spec.regression = data.has_covariates();
  } else {
    spec.regression = o.regression == "on";
  }
  spec.validate(data);
  return spec;
}

int run_fit(const CLI::App& app, const CLI::App& sub, const Options& o) {
  if (o.input.empty() == (o.synthetic == 0)) {
    throw ValidationError("fit needs exactly one of --input or --synthetic");
  }
  Manifest manifest(app, sub, o);
  CountCsv input;
  if (o.synthetic > 0) {
    // The data stream is kept apart from the chain seed.
    RngStream rng(o.seed, 0x5e7);
    auto syn = synthetic_areal(o.synthetic, o.synthetic_covariates, rng);
    input.data = std::move(syn.data);
    for (std::size_t k = 0; k < o.synthetic_covariates; ++k) {
      input.covariate_names.push_back("x" + std::to_string(k + 1));
    }
    const fs::path p = o.output_dir / "synthetic_input.csv";
    auto out = open_output(p);
    write_count_csv(out, input.data, input.covariate_names);
    manifest.output(p);
    json truth = json::object();
    truth["delta"] = std::vector<double>(syn.delta.data(), syn.delta.data() + syn.delta.size());
    truth["hotspots"] = std::count(syn.hotspot.begin(), syn.hotspot.end(), true);
    manifest["synthetic_truth"] = std::move(truth);
  } else {
    input = read_count_csv(fs::path(o.input));
  }

  const CountDataset& data = input.data;
  const ModelSpec spec = model_spec(o, data);
  const PosteriorDraws draws = run_chain(data, spec);
  manifest.timing("chain", draws.elapsed_seconds);

  std::vector<ParameterSummary> rows;
  rows.reserve(draws.n_params());
  for (std::size_t j = 0; j < draws.n_params(); ++j) {
    std::string name = draws.names()[j];
    const auto& col = draws.column(j);
    if (name.rfind("delta_", 0) == 0 && spec.regression) {
      const std::size_t k = std::stoul(name.substr(6)) - 1;
      if (k < input.covariate_names.size()) name += ":" + input.covariate_names[k];
    }
    rows.push_back(summarize(name, col));
  }

  const fs::path summary_path = o.output_dir / "summary.csv";
  {
    auto out = open_output(summary_path);
    write_summary_csv(out, rows, data.ids);
  }
  manifest.output(summary_path);

  const std::size_t m = data.size();
  const fs::path int_path = o.output_dir / "intervals.csv";
  {
    auto out = open_output(int_path);
    out << "id,y,offset,mean,q025,q975\n";
    for (std::size_t i = 0; i < m; ++i) {
      out << data.ids[i] << ',' << data.y[i] << ',' << format_real(data.offset[i]) << ','
          << format_real(rows[i].mean) << ',' << format_real(rows[i].q025) << ',' << format_real(rows[i].q975)
          << '\n';
    }
  }
  manifest.output(int_path);

  // Units with the largest posterior means of lambda.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].mean > rows[b].mean; });
  const fs::path hot_path = o.output_dir / "hotspots.csv";
  {
    auto out = open_output(hot_path);
    out << "rank,id,y,offset,mean,q025,q975\n";
    for (std::size_t r = 0; r < std::min(o.hotspots, m); ++r) {
      const std::size_t i = order[r];
      out << r + 1 << ',' << data.ids[i] << ',' << data.y[i] << ',' << format_real(data.offset[i])
          << ',' << format_real(rows[i].mean) << ',' << format_real(rows[i].q025) << ','
          << format_real(rows[i].q975) << '\n';
    }
  }
  manifest.output(hot_path);

  if (o.write_draws) {
    const fs::path p = o.output_dir / "draws.csv";
    auto out = open_output(p);
    write_draws_csv(out, draws);
    manifest.output(p);
  }

  const auto& d = draws.diagnostics;
  json diag = json::object();
  if (d.gamma_proposals) diag["gamma_acceptance_rate"] = d.gamma_acceptance_rate();
  if (d.delta_proposals) {
    diag["delta_acceptance_rate"] = d.delta_acceptance_rate();
    diag["delta_fallbacks"] = d.delta_fallbacks;
    diag["newton_nonconverged"] = d.newton_nonconverged;
  }
  double if_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) if_sum += rows[i].inefficiency_factor;
  diag["mean_inefficiency_lambda"] = if_sum / double(m);
  manifest["diagnostics"] = std::move(diag);
  manifest["units"] = m;
  manifest.write(o.output_dir);

  std::cout << "fit " << to_string(spec.family.kind) << ": " << m << " units, " << draws.n_draws()
            << " draws in " << draws.elapsed_seconds << " s; wrote " << summary_path.string() << '\n';
  return 0;
}

int run_simulate(const CLI::App& app, const CLI::App& sub, const Options& o) {
  StudyConfig cfg;
  cfg.scenarios.clear();
  for (const auto& s : o.scenarios) cfg.scenarios.push_back(scenario_from_string(s));
  cfg.omegas = o.omegas;
  cfg.m = o.m;
  cfg.methods.clear();
  for (const auto& s : o.methods) cfg.methods.push_back(method_from_string(s));
  cfg.replicates = o.full ? 1000 : o.replicates;
  cfg.n_draws = o.draws;
  cfg.burn_in = o.burn_in;
  cfg.hyper = o.hyper;
  cfg.seed = o.seed;
  cfg.threads = o.threads;

  Manifest manifest(app, sub, o);
  const MetricTable table = run_study(cfg, [](const std::string& msg) { std::cerr << msg << '\n'; });

  const fs::path metrics_path = o.output_dir / "metrics.csv";
  {
    auto out = open_output(metrics_path);
    write_metric_table(out, table);
  }
  manifest.output(metrics_path);
  const fs::path details_path = o.output_dir / "study_details.csv";
  {
    auto out = open_output(details_path);
    write_study_details(out, table);
  }
  manifest.output(details_path);

  std::size_t failures = 0;
  for (const auto& e : table.entries) failures += e.failures;
  manifest["replicates"] = cfg.replicates;
  manifest["failed_fits"] = failures;
  manifest.timing("study", table.elapsed_seconds);
  manifest.write(o.output_dir);

  std::cout << "simulate: " << cfg.replicates << " replicates in " << table.elapsed_seconds
            << " s, " << failures << " failed fits; wrote " << metrics_path.string() << '\n';
  return 0;
}

int run_density(const CLI::App& app, const CLI::App& sub, const Options& o) {
  const PriorFamily family = make_family(o);
  GlobalParams g{o.alpha, o.beta};
  g.validate();
  const auto grid = make_grid(o.lambda_min, o.lambda_max, o.points, o.log_grid);
  Manifest manifest(app, sub, o);
  const auto start = std::chrono::steady_clock::now();

  if (o.kind == "prior") {
    std::vector<double> value(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) value[k] = marginal_prior_lambda(family, g, grid[k]);
    const fs::path p = o.output_dir / ("density_prior_" + curve_tag(o) + ".csv");
    auto out = open_output(p);
    write_grid_csv(out, "lambda", grid, value);
    manifest.output(p);
  } else if (o.kind == "posterior") {
    if (o.y_values.empty()) throw ValidationError("posterior densities need at least one --y");
    for (std::int64_t y : o.y_values) {
      const auto value = marginal_posterior_lambda(family, g, y, o.eta, grid);
      const fs::path p =
          o.output_dir / ("density_posterior_" + curve_tag(o) + "_y" + std::to_string(y) + ".csv");
      auto out = open_output(p);
      write_grid_csv(out, "lambda", grid, value);
      manifest.output(p);
    }
  } else {
    throw ValidationError("--kind must be prior or posterior");
  }
  manifest.timing("density", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  manifest.write(o.output_dir);
  return 0;
}

int run_bias(const CLI::App& app, const CLI::App& sub, const Options& o) {
  const PriorFamily family = make_family(o);
  GlobalParams g{o.bias_alpha, o.bias_beta};
  g.validate();
  std::vector<std::int64_t> ys = o.y_values;
  if (ys.empty()) {
    // Log-spaced integers from 1 to y_max, duplicates removed.
    for (double y : make_grid(1.0, static_cast<double>(o.y_max), o.bias_points, true)) {
      const auto v = static_cast<std::int64_t>(std::llround(y));
      if (ys.empty() || v > ys.back()) ys.push_back(v);
    }
  }
  Manifest manifest(app, sub, o);
  const auto start = std::chrono::steady_clock::now();
  const BiasCurve curve = bias_curve(family, g, ys);
  const fs::path p = o.output_dir / ("bias_" + curve_tag(o) + ".csv");
  {
    auto out = open_output(p);
    write_bias_csv(out, curve);
  }
  manifest.output(p);
  manifest.timing("bias", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  manifest.write(o.output_dir);
  return 0;
}

int run_summarize(const CLI::App& app, const CLI::App& sub, const Options& o) {
  std::ifstream in(o.draws_path);
  if (!in) throw ValidationError("cannot open " + o.draws_path);
  const PosteriorDraws draws = read_draws_csv(in);
  std::vector<ParameterSummary> rows;
  for (std::size_t j = 0; j < draws.n_params(); ++j) rows.push_back(summarize(draws.names()[j], draws.column(j)));
  Manifest manifest(app, sub, o);
  const fs::path p = o.output_dir / "draws_summary.csv";
  {
    auto out = open_output(p);
    write_summary_csv(out, rows);
  }
  manifest.output(p);
  manifest.write(o.output_dir);
  return 0;
}

void add_model_options(CLI::App& app, Options& o) {
  app.add_option("--family", o.family, "IG, EH or PG")->check(CLI::IsMember({"IG", "EH", "PG"}))->capture_default_str();
  app.add_option("--gamma", o.gamma, "Initial (fit) or fixed (density, bias) gamma")->capture_default_str();
  app.add_flag("--ig-finite-mean", o.ig_finite_mean, "IG(gamma + 1, gamma) local prior");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Tail-robust Bayesian shrinkage for Poisson counts"};
  app.set_version_flag("--version", std::string(library_version()));
  app.set_config("--config", "", "Flat key = value configuration; flags override it");
  app.require_subcommand(1);
  app.add_option("--output-dir,-o", o.output_dir, "Directory for all outputs")->capture_default_str();
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  add_model_options(app, o);
  app.add_option("--draws", o.draws, "Stored draws per chain")->capture_default_str();
  app.add_option("--burn-in", o.burn_in, "Discarded sweeps")->capture_default_str();
  app.add_option("--thin", o.thin, "Keep every k-th sweep")->capture_default_str();
  app.add_option("--a-alpha", o.hyper.a_alpha)->capture_default_str();
  app.add_option("--b-alpha", o.hyper.b_alpha)->capture_default_str();
  app.add_option("--a-beta", o.hyper.a_beta)->capture_default_str();
  app.add_option("--b-beta", o.hyper.b_beta)->capture_default_str();
  app.add_option("--a-gamma", o.hyper.a_gamma, "EH: gamma ~ Ga(a, b)")->capture_default_str();
  app.add_option("--b-gamma", o.hyper.b_gamma)->capture_default_str();
  app.add_option("--eps1", o.hyper.eps1, "IG: lower bound of gamma")->capture_default_str();
  app.add_option("--eps2", o.hyper.eps2, "IG: upper bound of gamma")->capture_default_str();
  app.add_option("--step-sd", o.hyper.step_sd, "IG: random-walk sd for gamma")->capture_default_str();
  app.add_option("--delta-prior-var", o.hyper.delta_prior_var)->capture_default_str();

  auto* fit = app.add_subcommand("fit", "Fit a model to a count CSV (id,y[,offset][,x1..xp])");
  fit->fallthrough();
  fit->add_option("--input,-i", o.input, "Input CSV")->capture_default_str();
  fit->add_option("--synthetic", o.synthetic, "Generate synthetic areal data with this many areas")
      ->capture_default_str();
  fit->add_option("--synthetic-covariates", o.synthetic_covariates)->capture_default_str();
  fit->add_option("--regression", o.regression, "on, off or auto (on when covariates exist)")
      ->check(CLI::IsMember({"on", "off", "auto"}))
      ->capture_default_str();
  fit->add_flag("--write-draws", o.write_draws, "Also write every stored draw");
  fit->add_flag("--store-latent", o.store_latent, "Store u, v, w and nu draws");
  fit->add_option("--hotspots", o.hotspots, "Length of the hotspot list")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Run the simulation study");
  sim->fallthrough();
  sim->add_option("--scenario", o.scenarios, "I, II, III, IV")->capture_default_str();
  sim->add_option("--omega", o.omegas, "Outlier fractions")->capture_default_str();
  sim->add_option("--m", o.m, "Units per dataset")->capture_default_str();
  sim->add_option("--replicates", o.replicates)->capture_default_str();
  sim->add_flag("--full", o.full, "1000 replicates");
  sim->add_option("--methods", o.methods, "IG, EH, PG, ML")->capture_default_str();

  auto* den = app.add_subcommand("density", "Marginal prior or posterior density grid of lambda");
  den->fallthrough();
  den->add_option("--kind", o.kind, "prior or posterior")->capture_default_str();
  den->add_option("--alpha", o.alpha)->capture_default_str();
  den->add_option("--beta", o.beta)->capture_default_str();
  den->add_option("--y", o.y_values, "Observed counts (posterior)");
  den->add_option("--eta", o.eta, "Offset (posterior)")->capture_default_str();
  den->add_option("--lambda-min", o.lambda_min)->capture_default_str();
  den->add_option("--lambda-max", o.lambda_max)->capture_default_str();
  den->add_option("--points", o.points)->capture_default_str();
  den->add_flag("--log-grid", o.log_grid);
  den->add_option("--tag", o.tag, "Curve label used in file names (default: family)");

  auto* bias = app.add_subcommand("bias", "Posterior mean minus y over a grid of counts");
  bias->fallthrough();
  bias->add_option("--alpha", o.bias_alpha)->capture_default_str();
  bias->add_option("--beta", o.bias_beta)->capture_default_str();
  bias->add_option("--y", o.y_values, "Counts (default: log grid up to --y-max)");
  bias->add_option("--y-max", o.y_max)->capture_default_str();
  bias->add_option("--points", o.bias_points)->capture_default_str();
  bias->add_option("--tag", o.tag, "Curve label used in file names (default: family)");

  auto* summ = app.add_subcommand("summarize", "Summaries and inefficiency factors of a draws CSV");
  summ->fallthrough();
  summ->add_option("--draws", o.draws_path, "Draws CSV written by fit --write-draws")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) return run_fit(app, *fit, o);
    if (sim->parsed()) return run_simulate(app, *sim, o);
    if (den->parsed()) return run_density(app, *den, o);
    if (bias->parsed()) return run_bias(app, *bias, o);
    if (summ->parsed()) return run_summarize(app, *summ, o);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const ChainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
