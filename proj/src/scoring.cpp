#include "ddnm/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ddnm/errors.hpp"

namespace ddnm {

ScoreKind score_kind_from_string(const std::string& s) {
  if (s == "one_step") return ScoreKind::OneStep;
  if (s == "kstep_marginal") return ScoreKind::KStepMarginal;
  if (s == "path_lpfd") return ScoreKind::PathLpfd;
  throw ConfigError("unknown score kind '" + s + "'");
}

std::string to_string(ScoreKind k) {
  switch (k) {
    case ScoreKind::OneStep: return "one_step";
    case ScoreKind::KStepMarginal: return "kstep_marginal";
    case ScoreKind::PathLpfd: return "path_lpfd";
  }
  return "?";
}

void ScoreConfig::check() const {
  if (k < 1) throw ConfigError("score: k must be >= 1");
  if (kind == ScoreKind::OneStep && k != 1)
    throw ConfigError("score: kind one_step requires k = 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("score: alpha must lie in (0, 1]");
  if (!(tau > 0.0)) throw ConfigError("score: tau must be > 0");
  if (window_start < 0) throw ConfigError("score: window_start must be >= 0");
}

double ModelPrior::log_prior(const ModelIndicator& m, const CandidatePool& pool) const {
  if (!bernoulli) return 0.0;
  double lp = 0.0;
  for (int i = 0; i < pool.size(); ++i) {
    if (pool.forced[i]) continue;
    lp += m.has(i) ? std::log(pi) : std::log1p(-pi);
  }
  return lp;
}

dlm::Posterior PriorSpec::initial_state(const ModelIndicator& m) const {
  const int q = m.count();
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(q);
  Eigen::MatrixXd C0 = Eigen::MatrixXd::Zero(q, q);
  int k = 0;
  for (int i = 0; i < m.size(); ++i)
    if (m.has(i)) C0(k, k) = scale_diag[i], ++k;
  return dlm::Posterior(std::move(m0), std::move(C0), n0, s0);
}

PriorSpec make_prior_spec(const CandidatePool& pool, const SeriesPanel& panel, int fit_start,
                          double g, double n0, double s0_override, int calib_length) {
  constexpr double kVarFloor = 1e-8;
  const int end = std::min(panel.rows(), fit_start + std::max(calib_length, 2));
  if (end - fit_start < 2)
    throw DataError("prior calibration window too short for series " +
                    std::to_string(pool.series));

  auto variance = [&](auto&& value_at) {
    double mean = 0.0;
    const int n = end - fit_start;
    for (int t = fit_start; t < end; ++t) mean += value_at(t);
    mean /= n;
    double ss = 0.0;
    for (int t = fit_start; t < end; ++t) {
      const double d = value_at(t) - mean;
      ss += d * d;
    }
    return ss / (n - 1);
  };

  PriorSpec spec;
  spec.n0 = n0;
  spec.s0 = s0_override > 0.0
                ? s0_override
                : std::max(variance([&](int t) { return panel.y(pool.series, t); }), kVarFloor);

  spec.scale_diag.resize(pool.size());
  for (int i = 0; i < pool.size(); ++i) {
    const PoolEntry& e = pool.entries[i];
    if (e.kind == EntryKind::Intercept) {
      spec.scale_diag[i] = g * spec.s0;
      continue;
    }
    auto value_at = [&](int t) -> double {
      switch (e.kind) {
        case EntryKind::Lag: return panel.y(e.source, t - e.lag);
        case EntryKind::Parent: return panel.y(e.source, t);
        case EntryKind::Exogenous: return panel.exo(e.name, t);
        default: return 1.0;
      }
    };
    spec.scale_diag[i] = g * spec.s0 / std::max(variance(value_at), kVarFloor);
  }
  return spec;
}

ScoreLedger::ScoreLedger(ScoreConfig cfg, CandidatePool pool, dlm::Discounts disc, PriorSpec prior,
                         int fit_start)
    : cfg_(cfg), pool_(std::move(pool)), disc_(disc), prior_(std::move(prior)),
      fit_start_(fit_start), clock_(fit_start - 1) {
  cfg_.check();
  pool_.check();
  if (prior_.scale_diag.size() != pool_.size())
    throw std::invalid_argument("ledger: prior spec does not match pool");
}

// One filtering-plus-scoring step shared verbatim by advance and backfill,
// so a backfilled model reproduces a tracked model's arithmetic exactly.
void ScoreLedger::step_entry(LedgerEntry& e, const SeriesPanel& panel, int t) const {
  const double y = panel.y(pool_.series, t);
  if (!std::isfinite(y))
    throw DataError("series " + std::to_string(pool_.series) + ": missing observation at time " +
                    std::to_string(t));
  const Eigen::VectorXd F = design_vector(pool_, e.model, panel, t);

  const dlm::Prior pr = dlm::evolve(e.state, disc_);
  const double l_one = dlm::log_predictive(dlm::one_step_forecast(pr, F), y);

  std::optional<double> inc;
  switch (cfg_.kind) {
    case ScoreKind::OneStep:
      if (t >= fit_start_) inc = l_one;
      break;
    case ScoreKind::KStepMarginal: {
      // the ring holds the last k posteriors, so the origin sits at the front
      if (!e.state_history.empty() && e.state_history.front().first == t - cfg_.k) {
        const dlm::Prior pk = dlm::evolve_k(e.state_history.front().second, disc_, cfg_.k);
        inc = dlm::log_predictive(dlm::one_step_forecast(pk, F), y);
      }
      break;
    }
    case ScoreKind::PathLpfd: {
      e.onestep_window.push_back(l_one);
      if (static_cast<int>(e.onestep_window.size()) > cfg_.k) e.onestep_window.pop_front();
      if (static_cast<int>(e.onestep_window.size()) == cfg_.k) {
        double sum = 0.0;
        for (double l : e.onestep_window) sum += l;
        inc = sum;
      }
      break;
    }
  }
  if (inc) {
    e.score = cfg_.alpha * e.score + *inc;
    e.increments += 1;
    e.raw.emplace_back(t, *inc);
    while (static_cast<int>(e.raw.size()) > cfg_.raw_history) e.raw.pop_front();
  }

  e.state = dlm::update(pr, F, y);
  e.last_updated = t;
  if (cfg_.kind == ScoreKind::KStepMarginal) {
    e.state_history.emplace_back(t, e.state);
    while (static_cast<int>(e.state_history.size()) > cfg_.k) e.state_history.pop_front();
  }
}

void ScoreLedger::advance(const SeriesPanel& panel, int t) {
  if (t != clock_ + 1)
    throw std::invalid_argument("ledger: advance out of order (clock " + std::to_string(clock_) +
                                ", got " + std::to_string(t) + ")");
  if (t >= panel.rows()) throw DataError("ledger: time " + std::to_string(t) + " beyond panel end");
  for (auto& [key, entry] : entries_) step_entry(entry, panel, t);
  clock_ = t;
}

const LedgerEntry& ScoreLedger::track_initial(const ModelIndicator& model) {
  const std::string key = model.key();
  if (entries_.count(key)) throw std::invalid_argument("track_initial: model already tracked");
  LedgerEntry e;
  e.model = model;
  e.state = prior_.initial_state(model);
  e.last_updated = clock_;
  e.state_history.emplace_back(fit_start_ - 1, e.state);
  if (clock_ != fit_start_ - 1) {
    // late insertion without data replay would desynchronize the ledger
    throw std::invalid_argument("track_initial: ledger already advanced; use backfill");
  }
  return entries_.emplace(key, std::move(e)).first->second;
}

LedgerEntry ScoreLedger::fit_detached(const ModelIndicator& model, const SeriesPanel& panel) const {
  if (clock_ - fit_start_ + 1 < cfg_.k)
    throw DataError("backfill: fit window shorter than the score horizon");
  LedgerEntry e;
  e.model = model;
  e.state = prior_.initial_state(model);
  e.state_history.emplace_back(fit_start_ - 1, e.state);
  for (int t = fit_start_; t <= clock_; ++t) step_entry(e, panel, t);
  return e;
}

const LedgerEntry& ScoreLedger::insert(LedgerEntry entry) {
  const std::string key = entry.model.key();
  auto [it, fresh] = entries_.emplace(key, std::move(entry));
  if (!fresh) throw std::invalid_argument("insert: model already tracked");
  return it->second;
}

const LedgerEntry& ScoreLedger::backfill(const ModelIndicator& model, const SeriesPanel& panel) {
  if (entries_.count(model.key())) throw std::invalid_argument("backfill: model already tracked");
  return insert(fit_detached(model, panel));
}

const LedgerEntry& ScoreLedger::ensure(const ModelIndicator& model, const SeriesPanel& panel) {
  auto it = entries_.find(model.key());
  if (it != entries_.end()) return it->second;
  if (clock_ == fit_start_ - 1) return track_initial(model);
  return backfill(model, panel);
}

void ScoreLedger::prune(const std::vector<std::string>& keep) {
  std::map<std::string, LedgerEntry> kept;
  for (const auto& key : keep) {
    auto it = entries_.find(key);
    if (it != entries_.end()) kept.emplace(key, std::move(it->second));
  }
  entries_ = std::move(kept);
}

bool ScoreLedger::has_increments() const {
  for (const auto& [k, e] : entries_)
    if (e.increments > 0) return true;
  return false;
}

double ScoreLedger::rescore(const std::string& key, double alpha) const {
  const LedgerEntry& e = entries_.at(key);
  double s = 0.0;
  for (const auto& [t, inc] : e.raw) s = alpha * s + inc;
  return s;
}

namespace {

std::map<std::string, double> normalize_logweights(std::map<std::string, double> logw) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& [k, w] : logw) mx = std::max(mx, w);
  double total = 0.0;
  for (auto& [k, w] : logw) {
    w = std::exp(w - mx);
    total += w;
  }
  for (auto& [k, w] : logw) w /= total;
  return logw;
}

}  // namespace

std::map<std::string, double> gibbs_from_scores(
    const std::map<std::string, double>& scores,
    const std::function<double(const std::string&)>& log_prior, double tau) {
  if (scores.empty()) throw std::invalid_argument("gibbs_from_scores: empty model set");
  if (!(tau > 0.0)) throw std::invalid_argument("gibbs_from_scores: tau must be > 0");
  double smax = -std::numeric_limits<double>::infinity();
  for (const auto& [k, s] : scores) smax = std::max(smax, s);
  std::map<std::string, double> logw;
  for (const auto& [k, s] : scores) logw[k] = log_prior(k) + tau * (s - smax);
  return normalize_logweights(std::move(logw));
}

std::map<std::string, double> gibbs_probabilities(const ScoreLedger& ledger,
                                                  const ModelPrior& prior, double tau) {
  if (ledger.entries().empty()) throw std::invalid_argument("gibbs_probabilities: empty model set");
  if (!(tau > 0.0)) throw std::invalid_argument("gibbs_probabilities: tau must be > 0");

  std::map<std::string, double> scores;
  for (const auto& [key, e] : ledger.entries())
    if (e.increments >= 1) scores[key] = e.score;

  auto log_prior = [&](const std::string& key) {
    return prior.log_prior(ledger.at(key).model, ledger.pool());
  };
  if (scores.empty()) {
    std::map<std::string, double> logw;
    for (const auto& [key, e] : ledger.entries()) logw[key] = log_prior(key);
    return normalize_logweights(std::move(logw));
  }
  return gibbs_from_scores(scores, log_prior, tau);
}

std::map<std::string, double> bma_probabilities(const ScoreLedger& ledger,
                                                const ModelPrior& prior, double alpha) {
  if (ledger.config().kind != ScoreKind::OneStep)
    throw std::invalid_argument("bma_probabilities: ledger must hold one-step scores");
  std::map<std::string, double> logw;
  for (const auto& [key, e] : ledger.entries()) {
    if (e.increments < 1) continue;
    // the baseline prior decays as alpha^t alongside the discounted evidence
    const double prior_weight = std::pow(alpha, e.increments);
    logw[key] = prior_weight * prior.log_prior(e.model, ledger.pool()) + e.score;
  }
  if (logw.empty()) {
    for (const auto& [key, e] : ledger.entries())
      logw[key] = prior.log_prior(e.model, ledger.pool());
  }
  return normalize_logweights(std::move(logw));
}

std::string argmax_key(const std::map<std::string, double>& probs) {
  if (probs.empty()) throw std::invalid_argument("argmax_key: empty probability map");
  const std::string* best = nullptr;
  double best_p = 0.0;
  int best_count = 0;
  for (const auto& [key, p] : probs) {
    const int cnt = ModelIndicator::from_key(key).count();
    // map iteration is key-ascending, so on full ties the first key wins
    if (!best || p > best_p || (p == best_p && cnt < best_count)) {
      best = &key;
      best_p = p;
      best_count = cnt;
    }
  }
  return *best;
}

double RecoupledProbabilities::joint_probability(const std::vector<std::string>& keys) const {
  if (keys.size() != per_series_.size())
    throw std::invalid_argument("joint_probability: one key per series required");
  double p = 1.0;
  for (std::size_t j = 0; j < keys.size(); ++j) p *= per_series_[j].at(keys[j]);
  return p;
}

std::vector<std::string> RecoupledProbabilities::argmax() const {
  std::vector<std::string> out;
  out.reserve(per_series_.size());
  for (const auto& probs : per_series_) out.push_back(argmax_key(probs));
  return out;
}

RecoupledProbabilities recouple(std::vector<std::map<std::string, double>> per_series) {
  if (per_series.empty()) throw std::invalid_argument("recouple: no series maps");
  return RecoupledProbabilities(std::move(per_series));
}

}  // namespace ddnm
