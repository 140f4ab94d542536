#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "countshrink/data.hpp"
#include "countshrink/mcmc.hpp"
#include "countshrink/rng.hpp"

namespace countshrink {

enum class ScenarioId { I, II, III, IV };

std::string_view to_string(ScenarioId id);
ScenarioId scenario_from_string(std::string_view name);

// lambda_i ~ (1 - omega) f0 + omega f1, eta_i ~ U(eta_lo, eta_hi), y_i ~ Po(eta_i lambda_i).
//   I:   f0 = Ga(2, 2),                    f1 = Ga(10, 2)
//   II:  f0 = 0.75 Ga(2, 2) + 0.25 delta_1, f1 = Ga(10, 2)
//   III: f0 = 0.5 Ga(2, 2) + 0.5 delta_1,   f1 = Ga(10, 2)
//   IV:  f0 = U(0, 2),                     f1 = 4 + |t_3|
struct SimScenario {
  ScenarioId id = ScenarioId::I;
  double omega = 0.1;
  std::size_t m = 200;
  double eta_lo = 1.0;
  double eta_hi = 5.0;

  void validate() const;
};

struct ScenarioDraw {
  CountDataset data;
  std::vector<double> lambda;
  std::vector<bool> outlier;
};

ScenarioDraw generate_scenario(const SimScenario& scenario, RngStream& rng);

enum class Method { IG, EH, PG, ML };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

// Per-group error metrics. "n" is the non-outlying group, "o" the outlying one.
// CP is a percentage. Groups with no units, and CP/AL when no intervals were
// supplied, are NaN.
struct MetricRow {
  double mse_n = 0, mse_o = 0, mape_n = 0, mape_o = 0;
  double cp_n = 0, cp_o = 0, al_n = 0, al_o = 0;
  double mse_all = 0;
  std::size_t n_normal = 0, n_outlier = 0;
  // Units left out of MAPE because their true lambda is zero.
  std::size_t mape_excluded = 0;
};

// lower/upper may be empty (point estimator only).
MetricRow compute_metrics(const std::vector<double>& estimate, const std::vector<double>& lower,
                          const std::vector<double>& upper, const std::vector<double>& truth,
                          const std::vector<bool>& outlier);

struct StudyConfig {
  std::vector<ScenarioId> scenarios{ScenarioId::I};
  std::vector<double> omegas{0.1};
  std::size_t m = 200;
  std::vector<Method> methods{Method::IG, Method::EH, Method::PG, Method::ML};
  std::size_t replicates = 100;
  std::size_t n_draws = 3000;
  std::size_t burn_in = 500;
  HyperPriors hyper;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void validate() const;
};

struct MetricTableEntry {
  ScenarioId scenario = ScenarioId::I;
  double omega = 0.0;
  Method method = Method::ML;
  MetricRow mean;  // averaged over successful replicates
  std::size_t replicates = 0;
  std::size_t failures = 0;
  // Averaged over units and replicates; 1 for ML.
  double mean_inefficiency = 1.0;
  double mean_fit_seconds = 0.0;
};

struct MetricTable {
  std::vector<MetricTableEntry> entries;
  std::size_t replicates_requested = 0;
  double elapsed_seconds = 0.0;

  const MetricTableEntry& at(ScenarioId s, double omega, Method m) const;
};

// Per-replicate, per-method outcome; exposed for reproducibility checks.
struct ReplicateResult {
  MetricRow row;
  bool failed = false;
  std::string failure;
  double mean_inefficiency = 1.0;
  double fit_seconds = 0.0;
};

// Fits one method to one generated dataset.
ReplicateResult fit_replicate(const ScenarioDraw& draw, Method method, const StudyConfig& cfg,
                              std::uint64_t chain_seed);

// Replicates run on cfg.threads workers; results are reduced in replicate order,
// so the table does not depend on the thread count. The optional callback is
// called from worker threads with a short progress message.
MetricTable run_study(const StudyConfig& cfg,
                      const std::function<void(const std::string&)>& progress = {});

}  // namespace countshrink
