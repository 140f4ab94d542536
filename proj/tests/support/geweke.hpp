#pragma once

// Successive-conditional (Geweke) test: alternate a full Gibbs sweep with a
// fresh draw of the data given the parameters, and compare moments of the
// resulting parameter chain with independent draws from the prior.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "countshrink/diagnostics.hpp"
#include "countshrink/distributions.hpp"
#include "countshrink/mcmc.hpp"

namespace countshrink::testing {

struct GewekeConfig {
  ModelSpec spec;
  std::size_t m = 5;
  std::size_t cycles = 100'000;
  std::size_t prior_draws = 200'000;
  std::uint64_t seed = 1;
  // Replaces gibbs_sweep when set.
  std::function<void(ChainState&, const CountDataset&, const ModelSpec&, RngStream&)> sweep;
};

struct GewekeCheck {
  std::string name;
  double chain_mean = 0.0;
  double prior_mean = 0.0;
  double se = 0.0;
  double z = 0.0;
};

// Hyperpriors that keep every generative draw comfortably inside double range.
inline ModelSpec geweke_spec(Family kind) {
  ModelSpec spec;
  spec.family.kind = kind;
  spec.hyper.a_alpha = 4.0;
  spec.hyper.b_alpha = 4.0;
  spec.hyper.a_beta = 4.0;
  spec.hyper.b_beta = 4.0;
  spec.hyper.a_gamma = 25.0;
  spec.hyper.b_gamma = 5.0;
  spec.hyper.eps1 = 2.0;
  spec.hyper.eps2 = 10.0;
  spec.hyper.step_sd = 1.0;
  return spec;
}

// IG sweep identical to gibbs_sweep except that the gamma proposal is folded
// back into [eps1, eps2] by reflection, which keeps it symmetric.
inline void ig_sweep_reflected_gamma(ChainState& s, const CountDataset& data, const ModelSpec& spec,
                                     RngStream& rng) {
  const HyperPriors& h = spec.hyper;
  if (!spec.fixed_alpha) update_alpha(s, data, h, rng);
  update_lambda(s, data, rng);
  if (!spec.fixed_beta) update_beta(s, data, h, rng);
  update_local_ig(s, data, spec.family, rng);
  if (spec.fixed_gamma) return;
  const double width = h.eps2 - h.eps1;
  double z = std::fmod(sample_normal(s.gamma, h.step_sd, rng) - h.eps1, 2.0 * width);
  if (z < 0.0) z += 2.0 * width;
  const double proposal = h.eps1 + (z <= width ? z : 2.0 * width - z);
  const bool fm = spec.family.ig_finite_mean;
  const double log_ratio = log_target_gamma_ig(proposal, s.u, h, fm) - log_target_gamma_ig(s.gamma, s.u, h, fm);
  if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) s.gamma = proposal;
}

inline ChainState draw_from_prior(const ModelSpec& spec, const CountDataset& data, RngStream& rng) {
  ChainState s = ChainState::initial(data, spec);
  const auto& h = spec.hyper;
  s.alpha = spec.fixed_alpha.value_or(sample_gamma(h.a_alpha, h.b_alpha, rng));
  s.beta = spec.fixed_beta.value_or(sample_gamma(h.a_beta, h.b_beta, rng));
  if (spec.family.kind == Family::IG) {
    s.gamma = spec.fixed_gamma.value_or(h.eps1 + (h.eps2 - h.eps1) * rng.uniform());
  } else if (spec.family.kind == Family::EH) {
    s.gamma = spec.fixed_gamma.value_or(sample_gamma(h.a_gamma, h.b_gamma, rng));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (spec.family.kind == Family::IG) {
      s.u[i] = sample_inverse_gamma(spec.family.ig_finite_mean ? s.gamma + 1 : s.gamma, s.gamma, rng);
    } else if (spec.family.kind == Family::EH) {
      s.w[i] = sample_gamma(s.gamma, 1.0, rng);
      s.v[i] = sample_gamma(s.w[i], 1.0, rng);
      s.u[i] = sample_exponential(s.v[i], rng);
    }
    s.lambda[i] = sample_gamma(s.alpha, s.beta / s.u[i], rng);
  }
  return s;
}

inline void redraw_counts(const ChainState& s, CountDataset& data, RngStream& rng) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    data.y[i] = sample_poisson(s.eta[i] * s.lambda[i], rng);
  }
}

// Scalar summaries compared by the test, mapped into bounded ranges where the
// raw quantity is heavy tailed.
inline std::vector<std::pair<std::string, double>> geweke_features(const ChainState& s,
                                                                   const ModelSpec& spec) {
  std::vector<std::pair<std::string, double>> f;
  if (!spec.fixed_alpha) f.emplace_back("alpha", s.alpha);
  if (!spec.fixed_beta) f.emplace_back("beta", s.beta);
  if (spec.family.kind != Family::PG && !spec.fixed_gamma) f.emplace_back("gamma", s.gamma);
  for (std::size_t i = 0; i < s.lambda.size(); ++i) {
    const auto id = std::to_string(i + 1);
    f.emplace_back("lambda/(1+lambda)_" + id, s.lambda[i] / (1.0 + s.lambda[i]));
    if (spec.family.kind != Family::PG) f.emplace_back("u/(1+u)_" + id, s.u[i] / (1.0 + s.u[i]));
  }
  return f;
}

inline std::vector<GewekeCheck> run_geweke(const GewekeConfig& cfg) {
  RngStream rng(cfg.seed);
  std::vector<std::int64_t> zeros(cfg.m, 0);
  std::vector<double> eta(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) eta[i] = 1.0 + static_cast<double>(i);
  CountDataset data = CountDataset::from_counts(zeros, eta);

  // Independent prior draws.
  std::vector<std::vector<double>> prior;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < cfg.prior_draws; ++k) {
    const auto f = geweke_features(draw_from_prior(cfg.spec, data, rng), cfg.spec);
    if (prior.empty()) {
      prior.resize(2 * f.size());
      for (const auto& [n, v] : f) names.push_back(n);
    }
    for (std::size_t j = 0; j < f.size(); ++j) {
      prior[2 * j].push_back(f[j].second);
      prior[2 * j + 1].push_back(f[j].second * f[j].second);
    }
  }

  // Successive-conditional chain.
  std::vector<std::vector<double>> chain(prior.size());
  ChainState s = draw_from_prior(cfg.spec, data, rng);
  redraw_counts(s, data, rng);
  for (std::size_t k = 0; k < cfg.cycles; ++k) {
    if (cfg.sweep) {
      cfg.sweep(s, data, cfg.spec, rng);
    } else {
      gibbs_sweep(s, data, cfg.spec, rng);
    }
    redraw_counts(s, data, rng);
    const auto f = geweke_features(s, cfg.spec);
    for (std::size_t j = 0; j < f.size(); ++j) {
      chain[2 * j].push_back(f[j].second);
      chain[2 * j + 1].push_back(f[j].second * f[j].second);
    }
  }

  std::vector<GewekeCheck> out;
  for (std::size_t j = 0; j < prior.size(); ++j) {
    const auto a = summarize("", chain[j]);
    const auto b = summarize("", prior[j]);
    GewekeCheck c;
    c.name = (j % 2 ? "E[x^2] " : "E[x] ") + names[j / 2];
    c.chain_mean = a.mean;
    c.prior_mean = b.mean;
    const double se_b = b.sd / std::sqrt(static_cast<double>(b.n_draws));
    c.se = std::sqrt(a.mcse() * a.mcse() + se_b * se_b);
    c.z = c.se > 0 ? (a.mean - b.mean) / c.se : 0.0;
    out.push_back(c);
  }
  return out;
}

}  // namespace countshrink::testing
