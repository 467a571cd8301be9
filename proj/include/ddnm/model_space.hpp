#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ddnm/panel.hpp"

namespace ddnm {

enum class EntryKind { Intercept, Lag, Parent, Exogenous };

// One candidate predictor for a series: its own or another series' lagged
// value, a contemporaneous parental series (ordered after the owner), an
// exogenous column, or the intercept.
struct PoolEntry {
  EntryKind kind = EntryKind::Intercept;
  int source = -1;      // series index for Lag/Parent
  int lag = 0;          // >= 1 for Lag
  std::string name;     // column name for Exogenous

  std::string id() const;  // stable identity, e.g. "lag:2:12", "parent:1", "exo:x1"
  bool operator==(const PoolEntry& o) const {
    return kind == o.kind && source == o.source && lag == o.lag && name == o.name;
  }
};

struct CandidatePool {
  int series = 0;                      // owning series index (0-based)
  std::vector<PoolEntry> entries;      // fixed order, unique
  std::vector<std::uint8_t> forced;    // always-include mask, same length
  int max_size = 0;                    // inclusion cap; 0 = no cap

  int size() const { return static_cast<int>(entries.size()); }
  int max_lag() const;
  int free_count() const;

  // Throws std::invalid_argument on a malformed pool (empty, duplicate
  // entries, parent not ordered after the owner, bad mask length).
  void check() const;
};

// Binary inclusion vector over a pool's entries.
struct ModelIndicator {
  std::vector<std::uint8_t> bits;

  static ModelIndicator empty(int p) { return ModelIndicator{std::vector<std::uint8_t>(p, 0)}; }
  static ModelIndicator forced_only(const CandidatePool& pool);
  static ModelIndicator from_key(const std::string& key);

  int size() const { return static_cast<int>(bits.size()); }
  int count() const;
  bool has(int i) const { return bits[i] != 0; }

  // Canonical identity: '0'/'1' string in pool order, used as map key and
  // as the serialized form in outputs.
  std::string key() const;

  bool operator==(const ModelIndicator& o) const { return bits == o.bits; }
  bool operator<(const ModelIndicator& o) const { return bits < o.bits; }
};

struct Neighborhood {
  std::vector<ModelIndicator> added;
  std::vector<ModelIndicator> swapped;
  std::vector<ModelIndicator> dropped;

  std::size_t total() const { return added.size() + swapped.size() + dropped.size(); }
};

// All single-move variations of `model` over non-forced entries.  The seed
// itself is not a member and no duplicates are generated.  An inclusion cap
// on the pool suppresses `added` moves at the cap.
Neighborhood neighborhood(const ModelIndicator& model, const CandidatePool& pool);

// Value sources for building a design vector: series values y(series, t) and
// exogenous values by column name.  Forecast simulation substitutes sampled
// values here; filtering and scoring read the observed panel.
using SeriesValueFn = std::function<double(int series, int t)>;
using ExoValueFn = std::function<double(const std::string& name, int t)>;

Eigen::VectorXd design_vector(const CandidatePool& pool, const ModelIndicator& model,
                              const SeriesValueFn& series_value, const ExoValueFn& exo_value,
                              int t);

// Observed-panel overload; throws DataError on insufficient history or a
// missing exogenous value.
Eigen::VectorXd design_vector(const CandidatePool& pool, const ModelIndicator& model,
                              const SeriesPanel& panel, int t);

}  // namespace ddnm
