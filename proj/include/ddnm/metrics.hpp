#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ddnm/model_space.hpp"

namespace ddnm {

struct ForecastPoint {
  int origin = 0;  // panel row index of the forecast origin
  int series = 0;
  int horizon = 0;  // 1-based steps ahead
  double mean = 0.0;
};

struct RmsfeRow {
  int series = 0;
  int horizon = 0;
  double value = 0.0;
};

// Per (series, horizon): sqrt of the mean squared error of the point
// forecasts against actuals.  Origins whose actual at origin+horizon is
// unavailable are excluded from that horizon's mean; a horizon with no
// aligned origin at all is dropped.  Throws when nothing aligns.
using ActualFn = std::function<std::optional<double>(int series, int t)>;
std::vector<RmsfeRow> rmsfe_by_horizon(const std::vector<ForecastPoint>& forecasts,
                                       const ActualFn& actual);

struct TraceRow {
  int origin = 0;
  double log_density = 0.0;
  double running_mean = 0.0;
};

// Identity passthrough of per-origin model-averaged log densities, keyed by
// origin, plus the running mean.
std::vector<TraceRow> logdensity_trace(const std::vector<std::pair<int, double>>& values);

// Binary inclusion matrix (time x pool entries) of a series' representative
// model history.
struct InclusionTrajectory {
  std::vector<int> times;
  std::vector<std::string> entry_ids;
  std::vector<std::vector<std::uint8_t>> rows;  // rows[i][e]
};
InclusionTrajectory inclusion_trajectory(
    const std::vector<std::pair<int, ModelIndicator>>& representative_history,
    const CandidatePool& pool);

}  // namespace ddnm
