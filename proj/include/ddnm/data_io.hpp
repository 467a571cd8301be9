#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddnm/model_space.hpp"
#include "ddnm/panel.hpp"

namespace ddnm {

struct PanelSchema {
  std::string time_column = "time";
  std::vector<std::string> series;     // value columns, in model order
  std::vector<std::string> exogenous;  // additional columns carried as exogenous
  char delimiter = ',';
};

// Coefficient path: base + amplitude*sin(2*pi*t/period + phase) + random walk
// with per-step sd walk_sd, plus optional piecewise level shifts
// (time, offset).
struct CoeffPath {
  double base = 0.0;
  double amplitude = 0.0;
  double period = 40.0;
  double walk_sd = 0.0;
  double phase = 0.0;
  std::vector<std::pair<int, double>> shifts;

  std::vector<double> realize(int T, std::uint64_t seed, std::uint64_t stream_id) const;
};

// Two-predictor synthetic DGP: y_t = c + theta1_t*x1_t + theta2_t*x2_t + noise,
// x columns i.i.d. Rademacher.  Defaults give one swinging coefficient path
// and one nearly steady path.  theta1's swing is slow enough for a
// delta=0.98 filter to track at one step yet large enough over ~25 steps to
// ruin a plug-in long-horizon forecast; a faster sine is invisible to the
// filter and removes the contrast entirely.
struct SyntheticConfig {
  int T_total = 130;
  double c = 0.5;
  CoeffPath theta1{0.0, 2.5, 120.0, 0.08, -0.7, {}};
  CoeffPath theta2{1.0, 0.0, 120.0, 0.005, 0.0, {}};
  double obs_noise_sd = 0.25;
  std::uint64_t seed = 0;
};

SeriesPanel load_panel(const std::string& path, const PanelSchema& schema);

// Extends the panel's exogenous columns past the observed range from a table
// in the same format (time column plus exogenous columns).
void load_future_exogenous(SeriesPanel& panel, const std::string& path,
                           const PanelSchema& schema);

void write_panel(const SeriesPanel& panel, const std::string& path, char delimiter = ',');

SeriesPanel generate_synthetic(const SyntheticConfig& cfg);

// true iff every lag any pool entry could reference is observed at t and all
// referenced exogenous columns have values at t.
bool availability(const CandidatePool& pool, const SeriesPanel& panel, int t);

// 17-significant-digit float formatting used by every emitted file.
std::string format_double(double v);

}  // namespace ddnm
