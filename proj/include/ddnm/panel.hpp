#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace ddnm {

// Observed multivariate panel: T rows of m series in equally spaced time,
// plus optional exogenous columns.  Exogenous columns may extend beyond the
// panel end (future values supplied for forecasting).
struct SeriesPanel {
  std::vector<std::string> names;          // m series labels
  std::vector<std::string> times;          // T time labels, strictly increasing
  Eigen::MatrixXd values;                  // T x m
  std::map<std::string, std::vector<double>> exogenous;  // name -> values (size >= T)

  int rows() const { return static_cast<int>(values.rows()); }
  int series_count() const { return static_cast<int>(values.cols()); }

  double y(int series, int t) const { return values(t, series); }

  int series_index(const std::string& name) const;

  // true iff exogenous column `name` has a value at time index t
  bool exo_available(const std::string& name, int t) const;
  double exo(const std::string& name, int t) const;
};

}  // namespace ddnm
