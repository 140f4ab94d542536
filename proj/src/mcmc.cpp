#include "countshrink/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "countshrink/distributions.hpp"
#include "countshrink/errors.hpp"

namespace countshrink {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonGradTol = 1e-8;

double poisson_regression_loglik(const Eigen::VectorXd& delta, const ChainState& s,
                                 const CountDataset& data) {
  const Eigen::VectorXd lin = data.covariates * delta;
  double ll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ll += static_cast<double>(data.y[i]) * lin(i) -
          s.lambda[i] * data.offset[i] * std::exp(lin(i));
  }
  return ll;
}

}  // namespace

// --- configuration -------------------------------------------------------------

void HyperPriors::validate(std::size_t n_covariates) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(name, "must be positive and finite");
  };
  positive(a_alpha, "a_alpha");
  positive(b_alpha, "b_alpha");
  positive(a_beta, "a_beta");
  positive(b_beta, "b_beta");
  positive(a_gamma, "a_gamma");
  positive(b_gamma, "b_gamma");
  positive(eps1, "eps1");
  positive(step_sd, "step_sd");
  positive(delta_prior_var, "delta_prior_var");
  if (!(eps1 < eps2)) throw DomainError("eps1", "must be below eps2");
  const auto p = static_cast<Eigen::Index>(n_covariates);
  if (delta_prior_mean.size() != 0 && delta_prior_mean.size() != p) {
    throw DomainError("delta_prior_mean", "length does not match the number of covariates");
  }
  if (delta_prior_cov.size() != 0) {
    if (delta_prior_cov.rows() != p || delta_prior_cov.cols() != p) {
      throw DomainError("delta_prior_cov", "must be p x p");
    }
    if (!delta_prior_cov.isApprox(delta_prior_cov.transpose())) {
      throw DomainError("delta_prior_cov", "must be symmetric");
    }
    if (delta_prior_cov.llt().info() != Eigen::Success) {
      throw DomainError("delta_prior_cov", "must be positive definite");
    }
  }
}

Eigen::VectorXd HyperPriors::prior_mean(std::size_t p) const {
  return delta_prior_mean.size() ? delta_prior_mean
                                 : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
}

Eigen::MatrixXd HyperPriors::prior_cov(std::size_t p) const {
  const auto n = static_cast<Eigen::Index>(p);
  return delta_prior_cov.size() ? delta_prior_cov
                                : Eigen::MatrixXd(delta_prior_var * Eigen::MatrixXd::Identity(n, n));
}

void ModelSpec::validate(const CountDataset& data) const {
  data.validate();
  family.validate();
  hyper.validate(static_cast<std::size_t>(data.covariates.cols()));
  if (n_draws == 0) throw DomainError("n_draws", "must be positive");
  if (thin == 0) throw DomainError("thin", "must be positive");
  if (regression && !data.has_covariates()) {
    throw ValidationError("regression requested but the data has no covariates");
  }
  if (!regression && data.has_covariates()) {
    throw ValidationError("data has covariates but regression is disabled");
  }
  if (fixed_alpha && !(*fixed_alpha > 0.0)) throw DomainError("fixed_alpha", "must be positive");
  if (fixed_beta && !(*fixed_beta > 0.0)) throw DomainError("fixed_beta", "must be positive");
  if (fixed_gamma && !(*fixed_gamma > 0.0)) throw DomainError("fixed_gamma", "must be positive");
}

// --- state -----------------------------------------------------------------------

ChainState ChainState::initial(const CountDataset& data, const ModelSpec& spec) {
  const std::size_t m = data.size();
  ChainState s;
  s.delta = Eigen::VectorXd::Zero(data.covariates.cols());
  s.refresh_eta(data);
  s.lambda.resize(m);
  s.nu.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.lambda[i] = (static_cast<double>(data.y[i]) + 0.5) / s.eta[i];
    s.nu[i] = std::min<std::int64_t>(data.y[i], 1);
  }
  s.u.assign(m, 1.0);
  if (spec.family.kind == Family::EH) {
    s.v.assign(m, 1.0);
    s.w.assign(m, 1.0);
  }
  s.alpha = spec.fixed_alpha.value_or(1.0);
  s.beta = spec.fixed_beta.value_or(1.0);
  s.gamma = spec.fixed_gamma.value_or(spec.family.gamma);
  return s;
}

void ChainState::refresh_eta(const CountDataset& data) {
  eta = data.offset;
  if (data.has_covariates()) {
    const Eigen::VectorXd lin = data.covariates * delta;
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] *= std::exp(lin(i));
  }
}

// --- draws -----------------------------------------------------------------------

PosteriorDraws::PosteriorDraws(std::vector<std::string> names, std::size_t reserve)
    : names_(std::move(names)), columns_(names_.size()) {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    index_[names_[j]] = j;
    columns_[j].reserve(reserve);
  }
}

const std::vector<double>& PosteriorDraws::column(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no stored parameter named " + name);
  return columns_[it->second];
}

void PosteriorDraws::append_row(const std::vector<double>& row) {
  if (row.size() != columns_.size()) throw std::logic_error("row width mismatch");
  for (std::size_t j = 0; j < row.size(); ++j) columns_[j].push_back(row[j]);
}

// --- updates ---------------------------------------------------------------------

void update_lambda(ChainState& s, const CountDataset& data, RngStream& rng) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    s.lambda[i] = sample_gamma(static_cast<double>(data.y[i]) + s.alpha,
                               s.eta[i] + s.beta / s.u[i], rng);
  }
}

void update_beta(ChainState& s, const CountDataset& data, const HyperPriors& h, RngStream& rng) {
  double rate = h.b_beta;
  for (std::size_t i = 0; i < data.size(); ++i) rate += s.lambda[i] / s.u[i];
  s.beta = sample_gamma(static_cast<double>(data.size()) * s.alpha + h.a_beta, rate, rng);
}

void update_alpha(ChainState& s, const CountDataset& data, const HyperPriors& h, RngStream& rng) {
  double shape = h.a_alpha;
  double rate = h.b_alpha;
  for (std::size_t i = 0; i < data.size(); ++i) {
    s.nu[i] = sample_crt(data.y[i], s.alpha, rng).tables;
    shape += static_cast<double>(s.nu[i]);
    rate += std::log1p(s.eta[i] * s.u[i] / s.beta);
  }
  s.alpha = sample_gamma(shape, rate, rng);
}

void update_local_ig(ChainState& s, const CountDataset& data, const PriorFamily& family,
                     RngStream& rng) {
  const double shape_offset = family.ig_finite_mean ? 1.0 : 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    s.u[i] = sample_inverse_gamma(s.gamma + shape_offset + s.alpha, s.gamma + s.lambda[i] * s.beta,
                                  rng);
  }
}

double log_target_gamma_ig(double g, const std::vector<double>& u, const HyperPriors& h,
                           bool ig_finite_mean) {
  if (!(g >= h.eps1 && g <= h.eps2)) return kNegInf;
  const double m = static_cast<double>(u.size());
  const double shape = ig_finite_mean ? g + 1.0 : g;
  double sum_log_u = 0.0;
  double sum_inv_u = 0.0;
  for (double ui : u) {
    sum_log_u += std::log(ui);
    sum_inv_u += 1.0 / ui;
  }
  return m * shape * std::log(g) - m * boost::math::lgamma(shape) - g * sum_log_u - g * sum_inv_u;
}

namespace {

bool gamma_ig_step(ChainState& s, const HyperPriors& h, bool finite_mean, RngStream& rng) {
  const double proposal = sample_truncated_rw_proposal(s.gamma, h.step_sd, h.eps1, h.eps2, rng);
  // The clamped proposal is treated as symmetric; no Hastings correction.
  const double log_ratio = log_target_gamma_ig(proposal, s.u, h, finite_mean) -
                           log_target_gamma_ig(s.gamma, s.u, h, finite_mean);
  if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
    s.gamma = proposal;
    return true;
  }
  return false;
}

}  // namespace

bool update_gamma_ig(ChainState& s, const CountDataset& /*data*/, const HyperPriors& h,
                     RngStream& rng, bool ig_finite_mean) {
  return gamma_ig_step(s, h, ig_finite_mean, rng);
}

void update_local_eh_u(ChainState& s, const CountDataset& data, RngStream& rng) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const GigParams p{1.0 - s.alpha, 2.0 * s.v[i], 2.0 * s.beta * s.lambda[i]};
    s.u[i] = sample_gig(p, rng);
  }
}

void update_local_eh_wv(ChainState& s, const CountDataset& data, RngStream& rng) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    s.w[i] = sample_gamma(1.0 + s.gamma, 1.0 + std::log1p(s.u[i]), rng);
    s.v[i] = sample_gamma(1.0 + s.w[i], 1.0 + s.u[i], rng);
  }
}

void update_local_eh(ChainState& s, const CountDataset& data, RngStream& rng) {
  update_local_eh_u(s, data, rng);
  update_local_eh_wv(s, data, rng);
}

void update_gamma_eh(ChainState& s, const CountDataset& data, const HyperPriors& h,
                     RngStream& rng) {
  double rate = h.b_gamma;
  for (std::size_t i = 0; i < data.size(); ++i) rate += std::log1p(std::log1p(s.u[i]));
  s.gamma = sample_gamma(h.a_gamma + static_cast<double>(data.size()), rate, rng);
}

DeltaProposal build_delta_proposal(const ChainState& s, const CountDataset& data,
                                   const HyperPriors& h) {
  const auto& x = data.covariates;
  const Eigen::Index p = x.cols();
  const auto m = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd yv(m), base(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    yv(i) = static_cast<double>(data.y[i]);
    base(i) = s.lambda[i] * data.offset[i];
  }

  // Gradient entries are sums over units, so the tolerance scales with the counts.
  const double grad_tol = kNewtonGradTol * std::max(1.0, yv.sum());
  DeltaProposal prop;
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu(m);
  auto fitted = [&](const Eigen::VectorXd& d) {
    return Eigen::VectorXd(base.array() * (x * d).array().exp());
  };
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    mu = fitted(delta);
    const Eigen::VectorXd grad = x.transpose() * (yv - mu);
    if (grad.lpNorm<Eigen::Infinity>() < grad_tol) {
      prop.newton_converged = true;
      break;
    }
    const Eigen::MatrixXd info = x.transpose() * mu.asDiagonal() * x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    const Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) break;
    // Step halving keeps the concave log-likelihood increasing.
    const double ll0 = poisson_regression_loglik(delta, s, data);
    double t = 1.0;
    Eigen::VectorXd next = delta + step;
    for (int k = 0; k < 30 && !(poisson_regression_loglik(next, s, data) >= ll0); ++k) {
      t *= 0.5;
      next = delta + t * step;
    }
    delta = next;
  }
  if (!prop.newton_converged) {
    mu = fitted(delta);
    const Eigen::VectorXd grad = x.transpose() * (yv - mu);
    prop.newton_converged = grad.lpNorm<Eigen::Infinity>() < grad_tol;
  }
  prop.mode = delta;
  prop.precision = x.transpose() * mu.asDiagonal() * x;

  const Eigen::MatrixXd prior_cov = h.prior_cov(static_cast<std::size_t>(p));
  const Eigen::VectorXd prior_mean = h.prior_mean(static_cast<std::size_t>(p));
  const Eigen::MatrixXd prior_prec = prior_cov.inverse();

  Eigen::LLT<Eigen::MatrixXd> info_llt(prop.precision);
  if (!prop.precision.allFinite() || info_llt.info() != Eigen::Success || !delta.allFinite()) {
    prop.fallback = true;
    prop.mean = prior_mean;
    prop.cov = prior_cov;
    return prop;
  }
  const Eigen::MatrixXd post_prec = prop.precision + prior_prec;
  prop.cov = post_prec.inverse();
  prop.cov = 0.5 * (prop.cov + prop.cov.transpose());
  prop.mean = prop.cov * (prop.precision * prop.mode + prior_prec * prior_mean);
  return prop;
}

double log_delta_acceptance(const ChainState& s, const CountDataset& data,
                            const DeltaProposal& prop, const Eigen::VectorXd& candidate) {
  const Eigen::VectorXd lin_new = data.covariates * candidate;
  const Eigen::VectorXd lin_old = data.covariates * s.delta;
  double log_ratio = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double scale = s.lambda[i] * data.offset[i];
    log_ratio += static_cast<double>(data.y[i]) * (lin_new(k) - lin_old(k)) -
                 scale * (std::exp(lin_new(k)) - std::exp(lin_old(k)));
  }
  if (!prop.fallback) {
    // N(mode | delta_old, Sigma_hat) / N(mode | delta_new, Sigma_hat).
    const Eigen::VectorXd d_old = prop.mode - s.delta;
    const Eigen::VectorXd d_new = prop.mode - candidate;
    log_ratio += -0.5 * d_old.dot(prop.precision * d_old) + 0.5 * d_new.dot(prop.precision * d_new);
  }
  return log_ratio;
}

bool update_delta(ChainState& s, const CountDataset& data, const HyperPriors& h, RngStream& rng,
                  SamplerDiagnostics* diag) {
  const DeltaProposal prop = build_delta_proposal(s, data, h);
  Eigen::LLT<Eigen::MatrixXd> chol(prop.cov);
  Eigen::VectorXd z(prop.mean.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = sample_normal(0.0, 1.0, rng);
  const Eigen::VectorXd candidate = prop.mean + chol.matrixL() * z;
  const double log_ratio = log_delta_acceptance(s, data, prop, candidate);
  const bool accept = std::isfinite(log_ratio) &&
                      (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio);
  if (diag) {
    ++diag->delta_proposals;
    if (accept) ++diag->delta_accepts;
    if (prop.fallback) ++diag->delta_fallbacks;
    if (!prop.newton_converged) ++diag->newton_nonconverged;
  }
  if (accept) {
    s.delta = candidate;
    s.refresh_eta(data);
  }
  return accept;
}

void gibbs_sweep(ChainState& s, const CountDataset& data, const ModelSpec& spec, RngStream& rng,
                 SamplerDiagnostics* diag) {
  const HyperPriors& h = spec.hyper;
  // alpha is drawn with lambda integrated out, so lambda is refreshed next.
  if (!spec.fixed_alpha) update_alpha(s, data, h, rng);
  update_lambda(s, data, rng);
  if (!spec.fixed_beta) update_beta(s, data, h, rng);

  switch (spec.family.kind) {
    case Family::IG:
      update_local_ig(s, data, spec.family, rng);
      if (!spec.fixed_gamma) {
        const bool accepted = gamma_ig_step(s, h, spec.family.ig_finite_mean, rng);
        if (diag) {
          ++diag->gamma_proposals;
          if (accepted) ++diag->gamma_accepts;
        }
      }
      break;
    case Family::EH:
      update_local_eh_u(s, data, rng);
      // gamma integrates out (v, w); both are redrawn right after it.
      if (!spec.fixed_gamma) update_gamma_eh(s, data, h, rng);
      update_local_eh_wv(s, data, rng);
      break;
    case Family::PG:
      break;
  }

  if (spec.regression) update_delta(s, data, h, rng, diag);
}

void check_state(const ChainState& s, std::size_t sweep) {
  auto positive = [&](double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ChainError(sweep, name);
  };
  for (std::size_t i = 0; i < s.lambda.size(); ++i) {
    positive(s.lambda[i], "lambda_" + std::to_string(i + 1));
    positive(s.u[i], "u_" + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    positive(s.v[i], "v_" + std::to_string(i + 1));
    positive(s.w[i], "w_" + std::to_string(i + 1));
  }
  positive(s.alpha, "alpha");
  positive(s.beta, "beta");
  positive(s.gamma, "gamma");
  for (Eigen::Index k = 0; k < s.delta.size(); ++k) {
    if (!std::isfinite(s.delta(k))) throw ChainError(sweep, "delta_" + std::to_string(k + 1));
  }
}

PosteriorDraws run_chain(const CountDataset& data, const ModelSpec& spec) {
  spec.validate(data);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = data.size();
  const auto p = static_cast<std::size_t>(data.covariates.cols());
  const bool has_local = spec.family.kind != Family::PG;
  const bool is_eh = spec.family.kind == Family::EH;

  std::vector<std::string> names;
  for (std::size_t i = 0; i < m; ++i) names.push_back("lambda_" + std::to_string(i + 1));
  names.emplace_back("alpha");
  names.emplace_back("beta");
  if (has_local) names.emplace_back("gamma");
  for (std::size_t k = 0; k < p; ++k) names.push_back("delta_" + std::to_string(k + 1));
  if (spec.store_latent) {
    if (has_local) {
      for (std::size_t i = 0; i < m; ++i) names.push_back("u_" + std::to_string(i + 1));
    }
    if (is_eh) {
      for (std::size_t i = 0; i < m; ++i) names.push_back("v_" + std::to_string(i + 1));
      for (std::size_t i = 0; i < m; ++i) names.push_back("w_" + std::to_string(i + 1));
    }
    for (std::size_t i = 0; i < m; ++i) names.push_back("nu_" + std::to_string(i + 1));
  }

  PosteriorDraws draws(names, spec.n_draws);
  ChainState s = ChainState::initial(data, spec);
  RngStream rng(spec.seed);
  std::vector<double> row;
  row.reserve(names.size());

  const std::size_t total = spec.burn_in + spec.n_draws * spec.thin;
  for (std::size_t sweep = 1; sweep <= total; ++sweep) {
    gibbs_sweep(s, data, spec, rng, &draws.diagnostics);
    check_state(s, sweep);
    if (sweep <= spec.burn_in || (sweep - spec.burn_in) % spec.thin != 0) continue;
    row.clear();
    row.insert(row.end(), s.lambda.begin(), s.lambda.end());
    row.push_back(s.alpha);
    row.push_back(s.beta);
    if (has_local) row.push_back(s.gamma);
    for (std::size_t k = 0; k < p; ++k) row.push_back(s.delta(static_cast<Eigen::Index>(k)));
    if (spec.store_latent) {
      if (has_local) row.insert(row.end(), s.u.begin(), s.u.end());
      if (is_eh) {
        row.insert(row.end(), s.v.begin(), s.v.end());
        row.insert(row.end(), s.w.begin(), s.w.end());
      }
      for (auto n : s.nu) row.push_back(static_cast<double>(n));
    }
    draws.append_row(row);
  }
  draws.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return draws;
}

}  // namespace countshrink
