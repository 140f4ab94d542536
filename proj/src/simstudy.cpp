#include "countshrink/simstudy.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "countshrink/diagnostics.hpp"
#include "countshrink/distributions.hpp"
#include "countshrink/errors.hpp"

namespace countshrink {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double draw_f0(ScenarioId id, RngStream& rng) {
  switch (id) {
    case ScenarioId::I:
      return sample_gamma(2.0, 2.0, rng);
    case ScenarioId::II:
      return rng.uniform() < 0.25 ? 1.0 : sample_gamma(2.0, 2.0, rng);
    case ScenarioId::III:
      return rng.uniform() < 0.5 ? 1.0 : sample_gamma(2.0, 2.0, rng);
    case ScenarioId::IV:
      return 2.0 * rng.uniform();
  }
  return 0.0;
}

double draw_f1(ScenarioId id, RngStream& rng) {
  if (id == ScenarioId::IV) return 4.0 + std::abs(sample_student_t(3.0, rng));
  return sample_gamma(10.0, 2.0, rng);
}

struct Accum {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return n ? sum / double(n) : kNaN; }
};

// Index of a (scenario, omega) cell in the flattened study grid.
std::size_t cell_count(const StudyConfig& cfg) { return cfg.scenarios.size() * cfg.omegas.size(); }

}  // namespace

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::I: return "I";
    case ScenarioId::II: return "II";
    case ScenarioId::III: return "III";
    case ScenarioId::IV: return "IV";
  }
  return "?";
}

ScenarioId scenario_from_string(std::string_view name) {
  if (name == "I" || name == "1") return ScenarioId::I;
  if (name == "II" || name == "2") return ScenarioId::II;
  if (name == "III" || name == "3") return ScenarioId::III;
  if (name == "IV" || name == "4") return ScenarioId::IV;
  throw ValidationError("unknown scenario '" + std::string(name) + "' (expected I, II, III or IV)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::IG: return "IG";
    case Method::EH: return "EH";
    case Method::PG: return "PG";
    case Method::ML: return "ML";
  }
  return "?";
}

Method method_from_string(std::string_view name) {
  if (name == "IG") return Method::IG;
  if (name == "EH") return Method::EH;
  if (name == "PG") return Method::PG;
  if (name == "ML") return Method::ML;
  throw ValidationError("unknown method '" + std::string(name) + "' (expected IG, EH, PG or ML)");
}

void SimScenario::validate() const {
  if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("omega", "must lie in [0, 1]");
  if (m == 0) throw DomainError("m", "must be positive");
  if (!(eta_lo > 0.0 && eta_lo <= eta_hi)) throw DomainError("eta_lo", "need 0 < eta_lo <= eta_hi");
}

ScenarioDraw generate_scenario(const SimScenario& sc, RngStream& rng) {
  sc.validate();
  ScenarioDraw d;
  std::vector<std::int64_t> y(sc.m);
  std::vector<double> eta(sc.m);
  d.lambda.resize(sc.m);
  d.outlier.resize(sc.m);
  for (std::size_t i = 0; i < sc.m; ++i) {
    d.outlier[i] = rng.uniform() < sc.omega;
    d.lambda[i] = d.outlier[i] ? draw_f1(sc.id, rng) : draw_f0(sc.id, rng);
    eta[i] = sc.eta_lo + (sc.eta_hi - sc.eta_lo) * rng.uniform();
    y[i] = sample_poisson(d.lambda[i] * eta[i], rng);
  }
  d.data = CountDataset::from_counts(std::move(y), std::move(eta));
  return d;
}

MetricRow compute_metrics(const std::vector<double>& estimate, const std::vector<double>& lower,
                          const std::vector<double>& upper, const std::vector<double>& truth,
                          const std::vector<bool>& outlier) {
  const std::size_t m = truth.size();
  if (estimate.size() != m || outlier.size() != m) {
    throw DomainError("estimate", "length does not match the true values");
  }
  const bool intervals = !lower.empty() || !upper.empty();
  if (intervals && (lower.size() != m || upper.size() != m)) {
    throw DomainError("lower", "interval lengths do not match the true values");
  }
  Accum mse[2], mape[2], cp[2], al[2], all;
  MetricRow r;
  for (std::size_t i = 0; i < m; ++i) {
    const int g = outlier[i] ? 1 : 0;
    const double err = estimate[i] - truth[i];
    mse[g].add(err * err);
    all.add(err * err);
    if (truth[i] != 0.0) {
      mape[g].add(std::abs(err) / truth[i]);
    } else {
      ++r.mape_excluded;
    }
    if (intervals) {
      cp[g].add(truth[i] >= lower[i] && truth[i] <= upper[i] ? 100.0 : 0.0);
      al[g].add(upper[i] - lower[i]);
    }
  }
  r.n_normal = mse[0].n;
  r.n_outlier = mse[1].n;
  r.mse_n = mse[0].mean();
  r.mse_o = mse[1].mean();
  r.mape_n = mape[0].mean();
  r.mape_o = mape[1].mean();
  r.cp_n = intervals ? cp[0].mean() : kNaN;
  r.cp_o = intervals ? cp[1].mean() : kNaN;
  r.al_n = intervals ? al[0].mean() : kNaN;
  r.al_o = intervals ? al[1].mean() : kNaN;
  r.mse_all = all.mean();
  return r;
}

void StudyConfig::validate() const {
  if (scenarios.empty()) throw ValidationError("no scenarios requested");
  if (omegas.empty()) throw ValidationError("no omega values requested");
  if (methods.empty()) throw ValidationError("no methods requested");
  for (double w : omegas) {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("omega", "must lie in [0, 1]");
  }
  if (m == 0) throw DomainError("m", "must be positive");
  if (replicates == 0) throw DomainError("replicates", "must be positive");
  if (n_draws == 0) throw DomainError("n_draws", "must be positive");
  if (threads == 0) throw DomainError("threads", "must be at least 1");
  hyper.validate(0);
}

const MetricTableEntry& MetricTable::at(ScenarioId s, double omega, Method m) const {
  for (const auto& e : entries) {
    if (e.scenario == s && e.omega == omega && e.method == m) return e;
  }
  throw std::out_of_range("no table entry for the requested cell");
}

ReplicateResult fit_replicate(const ScenarioDraw& draw, Method method, const StudyConfig& cfg,
                              std::uint64_t chain_seed) {
  ReplicateResult out;
  const std::size_t m = draw.lambda.size();
  if (method == Method::ML) {
    std::vector<double> est(m);
    for (std::size_t i = 0; i < m; ++i) {
      est[i] = static_cast<double>(draw.data.y[i]) / draw.data.offset[i];
    }
    out.row = compute_metrics(est, {}, {}, draw.lambda, draw.outlier);
    return out;
  }

  ModelSpec spec;
  spec.family.kind = method == Method::IG ? Family::IG : method == Method::EH ? Family::EH : Family::PG;
  spec.hyper = cfg.hyper;
  spec.n_draws = cfg.n_draws;
  spec.burn_in = cfg.burn_in;
  spec.seed = chain_seed;
  try {
    const auto draws = run_chain(draw.data, spec);
    std::vector<double> est(m), lo(m), hi(m);
    double if_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto s = summarize("", draws.column(i));
      est[i] = s.mean;
      lo[i] = s.q025;
      hi[i] = s.q975;
      if_sum += s.inefficiency_factor;
    }
    out.row = compute_metrics(est, lo, hi, draw.lambda, draw.outlier);
    out.mean_inefficiency = if_sum / double(m);
    out.fit_seconds = draws.elapsed_seconds;
  } catch (const ChainError& e) {
    out.failed = true;
    out.failure = e.what();
  } catch (const NumericalError& e) {
    out.failed = true;
    out.failure = e.what();
  }
  return out;
}

MetricTable run_study(const StudyConfig& cfg,
                      const std::function<void(const std::string&)>& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t cells = cell_count(cfg);
  const std::size_t n_methods = cfg.methods.size();
  // results[(cell * replicates + r) * n_methods + k]
  std::vector<ReplicateResult> results(cells * cfg.replicates * n_methods);

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  const std::size_t tasks = cells * cfg.replicates;
  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      const std::size_t cell = task / cfg.replicates;
      const std::size_t rep = task % cfg.replicates;
      SimScenario sc;
      sc.id = cfg.scenarios[cell / cfg.omegas.size()];
      sc.omega = cfg.omegas[cell % cfg.omegas.size()];
      sc.m = cfg.m;
      // Streams depend only on (seed, cell, replicate, method).
      const RngStream root = RngStream(cfg.seed, rep).split(cell);
      RngStream data_rng = root.split(0);
      const auto draw = generate_scenario(sc, data_rng);
      for (std::size_t k = 0; k < n_methods; ++k) {
        const std::uint64_t chain_seed = root.split(1 + static_cast<std::uint64_t>(cfg.methods[k])).key();
        results[task * n_methods + k] = fit_replicate(draw, cfg.methods[k], cfg, chain_seed);
      }
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress("scenario " + std::string(to_string(sc.id)) + " omega " + std::to_string(sc.omega) +
                 " replicate " + std::to_string(rep + 1) + "/" + std::to_string(cfg.replicates));
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(cfg.threads, tasks);
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  MetricTable table;
  table.replicates_requested = cfg.replicates;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t k = 0; k < n_methods; ++k) {
      MetricTableEntry e;
      e.scenario = cfg.scenarios[cell / cfg.omegas.size()];
      e.omega = cfg.omegas[cell % cfg.omegas.size()];
      e.method = cfg.methods[k];
      Accum f[9], ineff, secs;
      for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
        const auto& r = results[(cell * cfg.replicates + rep) * n_methods + k];
        if (r.failed) {
          ++e.failures;
          continue;
        }
        ++e.replicates;
        const double v[9] = {r.row.mse_n, r.row.mse_o, r.row.mape_n, r.row.mape_o, r.row.cp_n,
                             r.row.cp_o,  r.row.al_n,  r.row.al_o,   r.row.mse_all};
        for (int j = 0; j < 9; ++j) {
          if (!std::isnan(v[j])) f[j].add(v[j]);
        }
        e.mean.n_normal += r.row.n_normal;
        e.mean.n_outlier += r.row.n_outlier;
        e.mean.mape_excluded += r.row.mape_excluded;
        ineff.add(r.mean_inefficiency);
        secs.add(r.fit_seconds);
      }
      e.mean.mse_n = f[0].mean();
      e.mean.mse_o = f[1].mean();
      e.mean.mape_n = f[2].mean();
      e.mean.mape_o = f[3].mean();
      e.mean.cp_n = f[4].mean();
      e.mean.cp_o = f[5].mean();
      e.mean.al_n = f[6].mean();
      e.mean.al_o = f[7].mean();
      e.mean.mse_all = f[8].mean();
      e.mean_inefficiency = ineff.mean();
      e.mean_fit_seconds = secs.mean();
      table.entries.push_back(e);
    }
  }
  table.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

}  // namespace countshrink
