#include "ddnm/sss.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ddnm/errors.hpp"
#include "ddnm/parallel.hpp"
#include "ddnm/rng.hpp"

namespace ddnm {

void SssConfig::check() const {
  if (iterations < 1) throw ConfigError("sss: iterations must be >= 1");
  if (max_tracked < 1) throw ConfigError("sss: max_tracked must be >= 1");
}

namespace {

bool ranks_before(const ScoredModel& a, const ScoredModel& b) {
  if (a.score != b.score) return a.score > b.score;
  const int ca = a.model.count(), cb = b.model.count();
  if (ca != cb) return ca < cb;
  return a.model.key() < b.model.key();
}

// Evaluates every neighbor, reusing tracked entries and backfilling the rest
// (concurrently when allowed, with insertion in fixed canonical order).
std::vector<ScoredModel> evaluate_all(const std::vector<ModelIndicator>& models,
                                      ScoreLedger& ledger, const SeriesPanel& panel,
                                      bool parallel) {
  std::vector<ScoredModel> scored(models.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < models.size(); ++i) {
    scored[i].model = models[i];
    if (ledger.tracked(models[i].key()))
      scored[i].score = ledger.at(models[i].key()).score;
    else
      missing.push_back(i);
  }
  if (!missing.empty()) {
    std::vector<LedgerEntry> fitted(missing.size());
    auto fit_one = [&](std::size_t j) {
      fitted[j] = ledger.fit_detached(models[missing[j]], panel);
    };
    if (parallel)
      parallel_for(missing.size(), fit_one);
    else
      for (std::size_t j = 0; j < missing.size(); ++j) fit_one(j);
    for (std::size_t j = 0; j < missing.size(); ++j) {
      scored[missing[j]].score = fitted[j].score;
      ledger.insert(std::move(fitted[j]));
    }
  }
  return scored;
}

}  // namespace

SearchResult run_sss(const ModelIndicator& seed_model, ScoreLedger& ledger,
                     const SeriesPanel& panel, const SssConfig& cfg) {
  cfg.check();
  const CandidatePool& pool = ledger.pool();
  if (seed_model.size() != pool.size())
    throw std::invalid_argument("run_sss: seed does not match pool");
  const double tau = ledger.config().tau;

  auto gen = std::mt19937_64(cfg.rng_stream);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SearchResult res;
  std::map<std::string, ScoredModel> running;

  const LedgerEntry& seed_entry = ledger.ensure(seed_model, panel);
  running[seed_model.key()] = {seed_model, seed_entry.score};
  res.seed_trajectory.push_back(seed_model);

  ModelIndicator current = seed_model;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    Neighborhood nb = neighborhood(current, pool);
    std::vector<ModelIndicator> neighbors;
    neighbors.reserve(nb.total());
    for (auto& m : nb.added) neighbors.push_back(std::move(m));
    for (auto& m : nb.swapped) neighbors.push_back(std::move(m));
    for (auto& m : nb.dropped) neighbors.push_back(std::move(m));
    if (neighbors.empty()) break;  // single-entry pool: nothing to move to
    std::sort(neighbors.begin(), neighbors.end());

    std::vector<ScoredModel> scored = evaluate_all(neighbors, ledger, panel, cfg.parallel_eval);
    for (const auto& sm : scored) running[sm.model.key()] = sm;

    // next seed ~ exp(tau * (score - max)) over the evaluated neighborhood
    double mx = scored.front().score;
    for (const auto& sm : scored) mx = std::max(mx, sm.score);
    double total = 0.0;
    std::vector<double> w(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      w[i] = std::exp(tau * (scored[i].score - mx));
      total += w[i];
    }
    double u = unif(gen) * total;
    std::size_t pick = scored.size() - 1;
    for (std::size_t i = 0; i < scored.size(); ++i) {
      u -= w[i];
      if (u <= 0.0) {
        pick = i;
        break;
      }
    }
    current = scored[pick].model;
    res.seed_trajectory.push_back(current);
  }

  res.visited_count = running.size();
  res.tracked.reserve(running.size());
  for (auto& [key, sm] : running) res.tracked.push_back(std::move(sm));
  std::sort(res.tracked.begin(), res.tracked.end(), ranks_before);
  if (static_cast<int>(res.tracked.size()) > cfg.max_tracked)
    res.tracked.resize(static_cast<std::size_t>(cfg.max_tracked));

  std::vector<std::string> keep;
  keep.reserve(res.tracked.size());
  for (const auto& sm : res.tracked) keep.push_back(sm.model.key());
  ledger.prune(keep);
  return res;
}

std::pair<ModelIndicator, bool> seed_from_representative(const ModelIndicator* prev,
                                                         const CandidatePool& prev_pool,
                                                         const CandidatePool& pool) {
  if (!prev) return {ModelIndicator::forced_only(pool), false};
  if (prev->size() != prev_pool.size())
    throw std::invalid_argument("seed_from_representative: stale indicator shape");

  std::map<std::string, int> index_by_id;
  for (int i = 0; i < pool.size(); ++i) index_by_id[pool.entries[i].id()] = i;

  ModelIndicator out = ModelIndicator::forced_only(pool);
  for (int i = 0; i < prev_pool.size(); ++i) {
    if (!prev->has(i)) continue;
    auto it = index_by_id.find(prev_pool.entries[i].id());
    if (it == index_by_id.end()) {
      // an included entry vanished: the model no longer exists in this pool
      return {ModelIndicator::forced_only(pool), true};
    }
    out.bits[static_cast<std::size_t>(it->second)] = 1;
  }
  return {out, false};
}

}  // namespace ddnm
