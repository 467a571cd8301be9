#include "ddnm/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ddnm/errors.hpp"
#include "ddnm/rng.hpp"

namespace ddnm {

namespace {

std::vector<std::string> split_row(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_value(const std::string& cell, int row, const std::string& col) {
  if (cell.empty())
    throw DataError("row " + std::to_string(row) + ": missing value in column '" + col + "'");
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0')
    throw DataError("row " + std::to_string(row) + ": cannot parse '" + cell + "' in column '" +
                    col + "'");
  if (!std::isfinite(v))
    throw DataError("row " + std::to_string(row) + ": non-finite value in column '" + col + "'");
  return v;
}

bool all_integer_times(const std::vector<std::string>& times, std::vector<long long>& out) {
  out.clear();
  out.reserve(times.size());
  for (const auto& s : times) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return false;
    out.push_back(v);
  }
  return true;
}

void check_times(const std::vector<std::string>& times) {
  std::vector<long long> ints;
  const bool numeric = all_integer_times(times, ints);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const bool ok = numeric ? ints[i] > ints[i - 1] : times[i] > times[i - 1];
    if (!ok) {
      if ((numeric && ints[i] == ints[i - 1]) || (!numeric && times[i] == times[i - 1]))
        throw DataError("row " + std::to_string(i + 2) + ": duplicate timestamp '" + times[i] + "'");
      throw DataError("row " + std::to_string(i + 2) + ": time column not strictly increasing");
    }
  }
  if (numeric && ints.size() > 2) {
    const long long step = ints[1] - ints[0];
    for (std::size_t i = 2; i < ints.size(); ++i)
      if (ints[i] - ints[i - 1] != step)
        throw DataError("row " + std::to_string(i + 2) + ": time column not equally spaced");
  }
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::string& path, char delim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  table.header = split_row(line, delim);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split_row(line, delim);
    if (cells.size() != table.header.size())
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.empty()) throw DataError("'" + path + "' has a header but no data rows");
  return table;
}

int column_of(const RawTable& t, const std::string& name, const std::string& path) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end())
    throw DataError("'" + path + "' has no column named '" + name + "'");
  return static_cast<int>(it - t.header.begin());
}

}  // namespace

int SeriesPanel::series_index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DataError("unknown series '" + name + "'");
  return static_cast<int>(it - names.begin());
}

bool SeriesPanel::exo_available(const std::string& name, int t) const {
  auto it = exogenous.find(name);
  if (it == exogenous.end()) return false;
  return t >= 0 && t < static_cast<int>(it->second.size());
}

double SeriesPanel::exo(const std::string& name, int t) const {
  return exogenous.at(name)[static_cast<std::size_t>(t)];
}

SeriesPanel load_panel(const std::string& path, const PanelSchema& schema) {
  if (schema.series.empty()) throw ConfigError("panel schema names no series columns");
  RawTable table = read_table(path, schema.delimiter);

  const int tcol = column_of(table, schema.time_column, path);
  std::vector<int> scol;
  for (const auto& s : schema.series) scol.push_back(column_of(table, s, path));
  std::vector<int> xcol;
  for (const auto& x : schema.exogenous) xcol.push_back(column_of(table, x, path));

  SeriesPanel panel;
  panel.names = schema.series;
  const int T = static_cast<int>(table.rows.size());
  const int m = static_cast<int>(scol.size());
  panel.values.resize(T, m);
  for (const auto& x : schema.exogenous) panel.exogenous[x] = {};

  for (int i = 0; i < T; ++i) {
    const auto& cells = table.rows[i];
    const int file_row = i + 2;  // 1-based, after header
    panel.times.push_back(cells[tcol]);
    for (int j = 0; j < m; ++j)
      panel.values(i, j) = parse_value(cells[scol[j]], file_row, schema.series[j]);
    for (std::size_t j = 0; j < xcol.size(); ++j)
      panel.exogenous[schema.exogenous[j]].push_back(
          parse_value(cells[xcol[j]], file_row, schema.exogenous[j]));
  }
  check_times(panel.times);
  return panel;
}

void load_future_exogenous(SeriesPanel& panel, const std::string& path,
                           const PanelSchema& schema) {
  if (schema.exogenous.empty())
    throw ConfigError("future-exogenous table given but schema names no exogenous columns");
  RawTable table = read_table(path, schema.delimiter);
  const int tcol = column_of(table, schema.time_column, path);
  std::vector<int> xcol;
  for (const auto& x : schema.exogenous) xcol.push_back(column_of(table, x, path));

  std::string last_time = panel.times.back();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    const int file_row = static_cast<int>(i) + 2;
    std::vector<long long> dummy;
    std::vector<std::string> pair = {last_time, cells[tcol]};
    if (all_integer_times(pair, dummy) ? dummy[1] <= dummy[0] : cells[tcol] <= last_time)
      throw DataError("future-exogenous row " + std::to_string(file_row) +
                      ": time '" + cells[tcol] + "' does not extend past '" + last_time + "'");
    last_time = cells[tcol];
    for (std::size_t j = 0; j < xcol.size(); ++j)
      panel.exogenous[schema.exogenous[j]].push_back(
          parse_value(cells[xcol[j]], file_row, schema.exogenous[j]));
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_panel(const SeriesPanel& panel, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "time";
  for (const auto& n : panel.names) out << delimiter << n;
  for (const auto& [name, vals] : panel.exogenous) out << delimiter << name;
  out << "\n";
  for (int t = 0; t < panel.rows(); ++t) {
    out << panel.times[t];
    for (int j = 0; j < panel.series_count(); ++j)
      out << delimiter << format_double(panel.values(t, j));
    for (const auto& [name, vals] : panel.exogenous)
      out << delimiter << format_double(vals[static_cast<std::size_t>(t)]);
    out << "\n";
  }
}

std::vector<double> CoeffPath::realize(int T, std::uint64_t seed, std::uint64_t stream_id) const {
  auto gen = rng::stream(seed, {rng::kSynthetic, stream_id});
  std::normal_distribution<double> step(0.0, 1.0);
  std::vector<double> path(static_cast<std::size_t>(T));
  double walk = 0.0;
  for (int t = 0; t < T; ++t) {
    if (walk_sd > 0.0) walk += walk_sd * step(gen);
    double v = base + walk;
    if (amplitude != 0.0) v += amplitude * std::sin(2.0 * M_PI * t / period + phase);
    for (const auto& [t0, offset] : shifts)
      if (t >= t0) v += offset;
    path[static_cast<std::size_t>(t)] = v;
  }
  return path;
}

SeriesPanel generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.T_total < 1) throw ConfigError("synthetic: T_total must be >= 1");
  if (cfg.obs_noise_sd < 0) throw ConfigError("synthetic: obs_noise_sd must be >= 0");
  const int T = cfg.T_total;

  auto rademacher = [&](std::uint64_t id) {
    auto gen = rng::stream(cfg.seed, {rng::kSynthetic, id});
    std::bernoulli_distribution flip(0.5);
    std::vector<double> x(static_cast<std::size_t>(T));
    for (auto& v : x) v = flip(gen) ? 1.0 : -1.0;
    return x;
  };
  std::vector<double> x1 = rademacher(1);
  std::vector<double> x2 = rademacher(2);
  std::vector<double> th1 = cfg.theta1.realize(T, cfg.seed, 3);
  std::vector<double> th2 = cfg.theta2.realize(T, cfg.seed, 4);

  auto noise_gen = rng::stream(cfg.seed, {rng::kSynthetic, 5});
  std::normal_distribution<double> noise(0.0, 1.0);

  SeriesPanel panel;
  panel.names = {"y"};
  panel.values.resize(T, 1);
  for (int t = 0; t < T; ++t) {
    panel.times.push_back(std::to_string(t));
    double eps = cfg.obs_noise_sd > 0.0 ? cfg.obs_noise_sd * noise(noise_gen) : 0.0;
    panel.values(t, 0) = cfg.c + th1[t] * x1[t] + th2[t] * x2[t] + eps;
  }
  panel.exogenous["x1"] = std::move(x1);
  panel.exogenous["x2"] = std::move(x2);
  return panel;
}

bool availability(const CandidatePool& pool, const SeriesPanel& panel, int t) {
  if (t <= pool.max_lag()) return false;
  if (t >= panel.rows()) return false;
  for (const auto& e : pool.entries)
    if (e.kind == EntryKind::Exogenous && !panel.exo_available(e.name, t)) return false;
  return true;
}

}  // namespace ddnm
