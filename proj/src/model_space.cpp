#include "ddnm/model_space.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "ddnm/errors.hpp"

namespace ddnm {

std::string PoolEntry::id() const {
  switch (kind) {
    case EntryKind::Intercept: return "intercept";
    case EntryKind::Lag: return "lag:" + std::to_string(source) + ":" + std::to_string(lag);
    case EntryKind::Parent: return "parent:" + std::to_string(source);
    case EntryKind::Exogenous: return "exo:" + name;
  }
  return "?";
}

int CandidatePool::max_lag() const {
  int ml = 0;
  for (const auto& e : entries)
    if (e.kind == EntryKind::Lag) ml = std::max(ml, e.lag);
  return ml;
}

int CandidatePool::free_count() const {
  int n = 0;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (!forced[i]) ++n;
  return n;
}

void CandidatePool::check() const {
  if (entries.empty()) throw std::invalid_argument("pool: must contain at least one entry");
  if (forced.size() != entries.size())
    throw std::invalid_argument("pool: forced mask length mismatch");
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.id()).second)
      throw std::invalid_argument("pool: duplicate entry " + e.id());
    if (e.kind == EntryKind::Parent && e.source <= series)
      throw std::invalid_argument("pool: parent " + e.id() +
                                  " must reference a series ordered after the owner");
    if (e.kind == EntryKind::Lag && e.lag < 1)
      throw std::invalid_argument("pool: lag entries need lag >= 1");
  }
  if (max_size < 0) throw std::invalid_argument("pool: negative inclusion cap");
}

ModelIndicator ModelIndicator::forced_only(const CandidatePool& pool) {
  ModelIndicator m = empty(pool.size());
  for (int i = 0; i < pool.size(); ++i) m.bits[i] = pool.forced[i] ? 1 : 0;
  return m;
}

ModelIndicator ModelIndicator::from_key(const std::string& key) {
  ModelIndicator m;
  m.bits.reserve(key.size());
  for (char c : key) m.bits.push_back(c == '1' ? 1 : 0);
  return m;
}

int ModelIndicator::count() const {
  int n = 0;
  for (auto b : bits) n += b ? 1 : 0;
  return n;
}

std::string ModelIndicator::key() const {
  std::string k(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) k[i] = '1';
  return k;
}

Neighborhood neighborhood(const ModelIndicator& model, const CandidatePool& pool) {
  const int p = pool.size();
  if (model.size() != p) throw std::invalid_argument("neighborhood: indicator/pool size mismatch");

  std::vector<int> free_in, free_out;
  for (int i = 0; i < p; ++i) {
    if (pool.forced[i]) continue;
    (model.has(i) ? free_in : free_out).push_back(i);
  }

  Neighborhood nb;
  const bool at_cap = pool.max_size > 0 && model.count() >= pool.max_size;
  if (!at_cap) {
    for (int j : free_out) {
      ModelIndicator m = model;
      m.bits[j] = 1;
      nb.added.push_back(std::move(m));
    }
  }
  for (int i : free_in) {
    ModelIndicator m = model;
    m.bits[i] = 0;
    nb.dropped.push_back(std::move(m));
  }
  for (int i : free_in) {
    for (int j : free_out) {
      ModelIndicator m = model;
      m.bits[i] = 0;
      m.bits[j] = 1;
      nb.swapped.push_back(std::move(m));
    }
  }
  return nb;
}

Eigen::VectorXd design_vector(const CandidatePool& pool, const ModelIndicator& model,
                              const SeriesValueFn& series_value, const ExoValueFn& exo_value,
                              int t) {
  if (model.size() != pool.size())
    throw std::invalid_argument("design_vector: indicator/pool size mismatch");
  Eigen::VectorXd F(model.count());
  int k = 0;
  for (int i = 0; i < pool.size(); ++i) {
    if (!model.has(i)) continue;
    const PoolEntry& e = pool.entries[i];
    switch (e.kind) {
      case EntryKind::Intercept: F[k] = 1.0; break;
      case EntryKind::Lag: F[k] = series_value(e.source, t - e.lag); break;
      case EntryKind::Parent: F[k] = series_value(e.source, t); break;
      case EntryKind::Exogenous: F[k] = exo_value(e.name, t); break;
    }
    ++k;
  }
  return F;
}

Eigen::VectorXd design_vector(const CandidatePool& pool, const ModelIndicator& model,
                              const SeriesPanel& panel, int t) {
  auto sv = [&](int series, int u) -> double {
    if (u < 0 || u >= panel.rows())
      throw DataError("design_vector: series value at time " + std::to_string(u) +
                      " outside observed range");
    return panel.y(series, u);
  };
  auto ev = [&](const std::string& name, int u) -> double {
    if (!panel.exo_available(name, u))
      throw DataError("design_vector: exogenous column '" + name + "' has no value at time " +
                      std::to_string(u));
    return panel.exo(name, u);
  };
  return design_vector(pool, model, sv, ev, t);
}

}  // namespace ddnm
