#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ddnm/scoring.hpp"

namespace ddnm {

struct SssConfig {
  int iterations = 5;
  int max_tracked = 100;
  std::uint64_t rng_stream = 0;  // derived per (series, time) by the caller
  bool parallel_eval = true;

  void check() const;
};

struct ScoredModel {
  ModelIndicator model;
  double score = 0.0;
};

struct SearchResult {
  // sorted by score descending; ties toward fewer predictors then canonical key
  std::vector<ScoredModel> tracked;
  std::size_t visited_count = 0;  // distinct models evaluated, seed included
  std::vector<ModelIndicator> seed_trajectory;
};

// Shotgun stochastic search over one series' model space.  Each iteration
// scores the full add/swap/drop neighborhood of the current seed (ledger
// lookup or backfill), merges it into the running list capped at
// max_tracked, and samples the next seed from the neighborhood with
// probability proportional to exp(tau * (score - max)).  On return the
// ledger is pruned to the tracked list; dropped models lose their fitted
// state and are refit if rediscovered.
SearchResult run_sss(const ModelIndicator& seed_model, ScoreLedger& ledger,
                     const SeriesPanel& panel, const SssConfig& cfg);

// Carries the previous representative forward as the next seed.  A pool
// extension pads the indicator with zeros at the new positions; a pool that
// dropped entries the model used degrades to the forced-only model
// (signalled by the second member for the run log).
std::pair<ModelIndicator, bool> seed_from_representative(const ModelIndicator* prev,
                                                         const CandidatePool& prev_pool,
                                                         const CandidatePool& pool);

}  // namespace ddnm
