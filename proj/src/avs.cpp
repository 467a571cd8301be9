#include "ddnm/avs.hpp"

#include <algorithm>
#include <cmath>

#include "ddnm/data_io.hpp"
#include "ddnm/errors.hpp"
#include "ddnm/rng.hpp"

namespace ddnm {

void AvsConfig::check() const {
  score.check();
  sss.check();
  if (avs_every < 1) throw ConfigError("avs_every must be >= 1");
  if (forecast_k < 1) throw ConfigError("forecast horizon must be >= 1");
  if (mc_samples < 1) throw ConfigError("mc_samples must be >= 1");
  for (double q : quantiles)
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantiles must lie in [0, 1]");
}

std::vector<ModelIndicator> select_representative(
    const std::vector<std::map<std::string, double>>& per_series_probs) {
  std::vector<ModelIndicator> out;
  out.reserve(per_series_probs.size());
  for (const auto& probs : per_series_probs)
    out.push_back(ModelIndicator::from_key(argmax_key(probs)));
  return out;
}

AvsEngine::AvsEngine(const SeriesPanel& panel, std::vector<CandidatePool> pools,
                     std::vector<dlm::Discounts> discounts, std::vector<PriorSpec> priors,
                     AvsConfig cfg, int fit_start)
    : panel_(panel), cfg_(std::move(cfg)), fit_start_(fit_start) {
  cfg_.check();
  const std::size_t m = pools.size();
  if (discounts.size() != m || priors.size() != m)
    throw ConfigError("engine: pools, discounts and priors must align per series");
  if (m == 0 || static_cast<int>(m) != panel.series_count())
    throw ConfigError("engine: one pool per panel series required");

  for (std::size_t j = 0; j < m; ++j) {
    pools[j].check();
    if (!availability(pools[j], panel, fit_start_))
      throw DataError("engine: series " + std::to_string(j) + " pool not available at fit start " +
                      std::to_string(fit_start_));
    state_.ledgers.emplace_back(cfg_.score, pools[j], discounts[j], priors[j], fit_start_);
  }

  state_.clock = fit_start_;
  state_.pending.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    ModelIndicator seed = ModelIndicator::forced_only(state_.ledgers[j].pool());
    state_.ledgers[j].track_initial(seed);
    state_.representative.push_back(seed);
    state_.probabilities.push_back({{seed.key(), 1.0}});
  }
}

AvsEngine AvsEngine::make(const SeriesPanel& panel, std::vector<CandidatePool> pools,
                          std::vector<dlm::Discounts> discounts, const AvsConfig& cfg,
                          int fit_start, double prior_g, double prior_n0, double prior_s0,
                          int calib_length) {
  std::vector<PriorSpec> priors;
  priors.reserve(pools.size());
  for (const auto& pool : pools)
    priors.push_back(make_prior_spec(pool, panel, fit_start, prior_g, prior_n0, prior_s0,
                                     calib_length));
  return AvsEngine(panel, std::move(pools), std::move(discounts), std::move(priors), cfg,
                   fit_start);
}

bool AvsEngine::active_at(int t) const { return (t - fit_start_) % cfg_.avs_every == 0; }

bool AvsEngine::searchable() const {
  for (const auto& ledger : state_.ledgers)
    if (!ledger.has_increments()) return false;
  return true;
}

std::vector<std::map<std::string, double>> AvsEngine::current_weights(bool reweight) const {
  std::vector<std::map<std::string, double>> probs;
  probs.reserve(state_.ledgers.size());
  for (std::size_t j = 0; j < state_.ledgers.size(); ++j) {
    if (reweight)
      probs.push_back(gibbs_probabilities(state_.ledgers[j], cfg_.model_prior, cfg_.score.tau));
    else
      probs.push_back({{state_.representative[j].key(), 1.0}});
  }
  return probs;
}

DdnmState AvsEngine::forecast_state(
    const std::vector<std::map<std::string, double>>& probs) const {
  DdnmState fs;
  fs.origin_time = state_.clock - 1;
  fs.series.resize(state_.ledgers.size());
  for (std::size_t j = 0; j < state_.ledgers.size(); ++j) {
    const ScoreLedger& ledger = state_.ledgers[j];
    SeriesState& ss = fs.series[j];
    ss.pool = ledger.pool();
    ss.discounts = ledger.discounts();
    for (const auto& [key, p] : probs[j]) {
      if (p <= 0.0) continue;
      const LedgerEntry& e = ledger.at(key);
      ss.models.push_back({e.model, p, e.state});
    }
  }
  return fs;
}

void AvsEngine::push_pending(int origin, int horizon,
                             const std::vector<std::map<std::string, double>>& probs) {
  for (std::size_t j = 0; j < state_.ledgers.size(); ++j) {
    const ScoreLedger& ledger = state_.ledgers[j];
    PendingDensity pd;
    pd.target = origin + horizon;
    pd.horizon = horizon;
    for (const auto& [key, p] : probs[j]) {
      if (p <= 0.0) continue;
      const LedgerEntry& e = ledger.at(key);
      pd.components.push_back(
          {p, e.model, dlm::evolve_k(e.state, ledger.discounts(), horizon)});
    }
    state_.pending[j].push_back(std::move(pd));
  }
}

// Completes every pending density of the given horizon whose target is t.
// Returns the summed (composed) joint log density across series.
std::optional<double> AvsEngine::settle_pending(int t, int horizon) {
  std::optional<double> total;
  for (std::size_t j = 0; j < state_.ledgers.size(); ++j) {
    auto& queue = state_.pending[j];
    for (auto it = queue.begin(); it != queue.end();) {
      if (it->target != t || it->horizon != horizon) {
        ++it;
        continue;
      }
      const ScoreLedger& ledger = state_.ledgers[j];
      const double y = panel_.y(ledger.pool().series, t);
      double mx = -std::numeric_limits<double>::infinity();
      std::vector<double> terms;
      terms.reserve(it->components.size());
      for (const auto& c : it->components) {
        const Eigen::VectorXd F = design_vector(ledger.pool(), c.model, panel_, t);
        const double ld = dlm::log_predictive(dlm::one_step_forecast(c.prior, F), y);
        const double term = std::log(c.weight) + ld;
        terms.push_back(term);
        mx = std::max(mx, term);
      }
      double sum = 0.0;
      for (double v : terms) sum += std::exp(v - mx);
      total = total.value_or(0.0) + (mx + std::log(sum));
      it = queue.erase(it);
    }
  }
  return total;
}

StepResult AvsEngine::step(int t, bool emit_forecasts, bool search_allowed) {
  if (t != state_.clock)
    throw std::invalid_argument("avs_step: expected time " + std::to_string(state_.clock) +
                                ", got " + std::to_string(t));
  if (t >= panel_.rows()) throw DataError("avs_step: time beyond panel end");

  // A failed step must leave the run state untouched.
  AvsRunState snapshot = state_;
  try {
    StepResult res;
    res.time = t;
    res.origin = t - 1;

    const bool active = search_allowed && active_at(t) && searchable();

    // (a) model search seeded by the current representative
    if (active) {
      for (std::size_t j = 0; j < state_.ledgers.size(); ++j) {
        SssConfig scfg = cfg_.sss;
        scfg.rng_stream = rng::derive(cfg_.seed, {rng::kSssSeed, static_cast<std::uint64_t>(j),
                                                  static_cast<std::uint64_t>(t)});
        run_sss(state_.representative[j], state_.ledgers[j], panel_, scfg);
      }
      res.searched = true;
    }

    // (b) forecast weights from D_{t-1}
    std::vector<std::map<std::string, double>> weights = current_weights(active);

    // (c) forecast emission at origin t-1
    push_pending(res.origin, 1, weights);
    if (emit_forecasts) {
      if (cfg_.forecast_k > 1) push_pending(res.origin, cfg_.forecast_k, weights);
      res.origin_probabilities = weights;
      res.emitted = true;
      if (cfg_.emit_paths) {
        const std::uint64_t stream = rng::derive(
            cfg_.seed, {rng::kPathSample, static_cast<std::uint64_t>(res.origin)});
        PathSamples paths = model_averaged_paths(forecast_state(weights), panel_, cfg_.forecast_k,
                                                 cfg_.mc_samples, stream);
        res.path_summary = summarize(paths, cfg_.quantiles);
      }
    }

    // (d) observe y_t and advance every ledger
    for (auto& ledger : state_.ledgers) ledger.advance(panel_, t);
    res.one_step_logdensity = settle_pending(t, 1);
    if (cfg_.forecast_k > 1) {
      if (auto v = settle_pending(t, cfg_.forecast_k))
        res.kstep_trace = std::make_pair(t - cfg_.forecast_k, *v);
    } else if (res.one_step_logdensity) {
      res.kstep_trace = std::make_pair(res.origin, *res.one_step_logdensity);
    }

    // (e) reweight with D_t and choose the new representative
    if (active) {
      state_.probabilities = current_weights(true);
      state_.representative = select_representative(state_.probabilities);
    }
    state_.representative_history.emplace_back(t, state_.representative);

    state_.clock = t + 1;
    return res;
  } catch (...) {
    state_ = std::move(snapshot);
    throw;
  }
}

}  // namespace ddnm
