#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "countshrink/data.hpp"
#include "countshrink/priors.hpp"
#include "countshrink/rng.hpp"

namespace countshrink {

// Hyperpriors and tuning constants. Defaults are the ones used throughout the
// simulation study and the areal-data analysis.
struct HyperPriors {
  double a_alpha = 1.0, b_alpha = 1.0;  // alpha ~ Ga(a_alpha, b_alpha)
  double a_beta = 1.0, b_beta = 1.0;    // beta ~ Ga(a_beta, b_beta)
  double a_gamma = 1.0, b_gamma = 1.0;  // EH: gamma ~ Ga(a_gamma, b_gamma)
  double eps1 = 0.001, eps2 = 150.0;    // IG: gamma ~ U(eps1, eps2)
  double step_sd = 1.0;                 // IG: random-walk sd for gamma
  double delta_prior_var = 100.0;       // used when delta_prior_cov is empty
  Eigen::VectorXd delta_prior_mean;     // empty -> zeros
  Eigen::MatrixXd delta_prior_cov;      // empty -> delta_prior_var * I

  void validate(std::size_t n_covariates) const;
  Eigen::VectorXd prior_mean(std::size_t p) const;
  Eigen::MatrixXd prior_cov(std::size_t p) const;
};

struct ModelSpec {
  PriorFamily family;  // family.gamma is the initial value of gamma
  HyperPriors hyper;
  std::size_t n_draws = 3000;
  std::size_t burn_in = 500;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  bool regression = false;
  // Store u, v, w and nu draws as well as lambda and the scalars.
  bool store_latent = false;
  // Hold these at the given values instead of sampling them.
  std::optional<double> fixed_alpha, fixed_beta, fixed_gamma;

  void validate(const CountDataset& data) const;
};

// Every latent quantity touched by one Gibbs sweep.
struct ChainState {
  std::vector<double> lambda;
  std::vector<double> u;  // identically 1 for PG
  std::vector<std::int64_t> nu;
  std::vector<double> v, w;  // EH only
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  Eigen::VectorXd delta;
  // Effective offsets eta_i = a_i exp(x_i' delta) implied by delta.
  std::vector<double> eta;

  // Deterministic start: lambda = (y + 0.5) / eta, u = v = w = 1,
  // alpha = beta = 1, gamma = family.gamma (or the fixed value), nu = min(y, 1),
  // delta = 0.
  static ChainState initial(const CountDataset& data, const ModelSpec& spec);
  void refresh_eta(const CountDataset& data);
};

struct SamplerDiagnostics {
  std::size_t gamma_proposals = 0;
  std::size_t gamma_accepts = 0;
  std::size_t delta_proposals = 0;
  std::size_t delta_accepts = 0;
  std::size_t delta_fallbacks = 0;  // singular Hessian -> prior-only proposal
  std::size_t newton_nonconverged = 0;

  double gamma_acceptance_rate() const {
    return gamma_proposals ? double(gamma_accepts) / double(gamma_proposals) : 0.0;
  }
  double delta_acceptance_rate() const {
    return delta_proposals ? double(delta_accepts) / double(delta_proposals) : 0.0;
  }
};

// Post-burn-in draws, one column per stored parameter.
class PosteriorDraws {
 public:
  PosteriorDraws() = default;
  PosteriorDraws(std::vector<std::string> names, std::size_t reserve);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t n_draws() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t n_params() const { return names_.size(); }
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  const std::vector<double>& column(const std::string& name) const;
  const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }

  void append_row(const std::vector<double>& row);

  SamplerDiagnostics diagnostics;
  double elapsed_seconds = 0.0;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> columns_;
};

// --- full-conditional updates -------------------------------------------------

// lambda_i ~ Ga(y_i + alpha, eta_i + beta / u_i).
void update_lambda(ChainState& s, const CountDataset& data, RngStream& rng);
// beta ~ Ga(m alpha + a_beta, sum lambda_i / u_i + b_beta).
void update_beta(ChainState& s, const CountDataset& data, const HyperPriors& h, RngStream& rng);
// nu_i ~ CRT(y_i, alpha), then alpha ~ Ga(sum nu + a_alpha, sum log(1 + eta_i u_i / beta) + b_alpha).
// lambda is integrated out, so lambda must be redrawn before anything conditions on it.
void update_alpha(ChainState& s, const CountDataset& data, const HyperPriors& h, RngStream& rng);
// u_i ~ IG(shape + alpha, scale + lambda_i beta) for the IG(shape, scale) prior.
void update_local_ig(ChainState& s, const CountDataset& data, const PriorFamily& family,
                     RngStream& rng);
// One clamped random-walk MH step for gamma; returns true if accepted.
bool update_gamma_ig(ChainState& s, const CountDataset& data, const HyperPriors& h,
                     RngStream& rng, bool ig_finite_mean = false);
// log f_gamma(g) for the IG gamma step (-inf outside [eps1, eps2]).
double log_target_gamma_ig(double g, const std::vector<double>& u, const HyperPriors& h,
                           bool ig_finite_mean = false);
// u_i ~ GIG(1 - alpha, 2 v_i, 2 beta lambda_i).
void update_local_eh_u(ChainState& s, const CountDataset& data, RngStream& rng);
// w_i ~ Ga(1 + gamma, 1 + log(1 + u_i)) with v_i integrated out, then
// v_i ~ Ga(1 + w_i, 1 + u_i).
void update_local_eh_wv(ChainState& s, const CountDataset& data, RngStream& rng);
// The full EH local block: u, then w, then v.
void update_local_eh(ChainState& s, const CountDataset& data, RngStream& rng);
// gamma ~ Ga(a_gamma + m, b_gamma + sum log(1 + log(1 + u_i))), v and w integrated out.
void update_gamma_eh(ChainState& s, const CountDataset& data, const HyperPriors& h,
                     RngStream& rng);

struct DeltaProposal {
  Eigen::VectorXd mode;       // approximate likelihood mode
  Eigen::MatrixXd precision;  // observed information at the mode
  Eigen::VectorXd mean;       // proposal mean (mode combined with prior)
  Eigen::MatrixXd cov;        // proposal covariance
  bool newton_converged = false;
  bool fallback = false;  // singular information -> prior proposal
};

// Newton solve of sum y_i x_i = sum lambda_i a_i exp(x_i' delta) x_i, started at zero.
DeltaProposal build_delta_proposal(const ChainState& s, const CountDataset& data,
                                   const HyperPriors& h);
// log acceptance ratio of the independence MH move from s.delta to candidate.
double log_delta_acceptance(const ChainState& s, const CountDataset& data,
                            const DeltaProposal& prop, const Eigen::VectorXd& candidate);
// Independence MH step for the regression coefficients; returns true if accepted.
bool update_delta(ChainState& s, const CountDataset& data, const HyperPriors& h, RngStream& rng,
                  SamplerDiagnostics* diag = nullptr);

// One full sweep: (nu, alpha) -> lambda -> beta -> local block -> delta.
// The local block is u -> gamma for IG, and u -> gamma -> (w, v) for EH.
void gibbs_sweep(ChainState& s, const CountDataset& data, const ModelSpec& spec, RngStream& rng,
                 SamplerDiagnostics* diag = nullptr);

// Throws ChainError naming the first non-finite or out-of-domain parameter.
void check_state(const ChainState& s, std::size_t sweep);

PosteriorDraws run_chain(const CountDataset& data, const ModelSpec& spec);

}  // namespace countshrink
