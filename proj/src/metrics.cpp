#include "ddnm/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace ddnm {

std::vector<RmsfeRow> rmsfe_by_horizon(const std::vector<ForecastPoint>& forecasts,
                                       const ActualFn& actual) {
  std::map<std::pair<int, int>, std::pair<double, int>> acc;  // (series,h) -> (sse, n)
  for (const auto& f : forecasts) {
    const auto a = actual(f.series, f.origin + f.horizon);
    if (!a) continue;
    const double e = f.mean - *a;
    auto& slot = acc[{f.series, f.horizon}];
    slot.first += e * e;
    slot.second += 1;
  }
  if (acc.empty()) throw std::invalid_argument("rmsfe_by_horizon: no forecast aligns with actuals");
  std::vector<RmsfeRow> rows;
  rows.reserve(acc.size());
  for (const auto& [key, sse_n] : acc)
    rows.push_back({key.first, key.second, std::sqrt(sse_n.first / sse_n.second)});
  return rows;
}

std::vector<TraceRow> logdensity_trace(const std::vector<std::pair<int, double>>& values) {
  std::vector<TraceRow> rows;
  rows.reserve(values.size());
  double total = 0.0;
  int n = 0;
  for (const auto& [origin, v] : values) {
    total += v;
    ++n;
    rows.push_back({origin, v, total / n});
  }
  return rows;
}

InclusionTrajectory inclusion_trajectory(
    const std::vector<std::pair<int, ModelIndicator>>& representative_history,
    const CandidatePool& pool) {
  InclusionTrajectory out;
  for (const auto& e : pool.entries) out.entry_ids.push_back(e.id());
  for (const auto& [t, model] : representative_history) {
    if (model.size() != pool.size())
      throw std::invalid_argument("inclusion_trajectory: indicator/pool size mismatch");
    out.times.push_back(t);
    out.rows.push_back(model.bits);
  }
  return out;
}

}  // namespace ddnm
