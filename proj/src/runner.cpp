#include "ddnm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ddnm/data_io.hpp"
#include "ddnm/errors.hpp"

namespace ddnm {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

int global_fit_start(const RunConfig& cfg, const std::vector<CandidatePool>& pools) {
  int max_lag = 0;
  for (const auto& p : pools) max_lag = std::max(max_lag, p.max_lag());
  return std::max(cfg.score.window_start, max_lag + 1);
}

std::string method_suffix(const std::string& method, const std::string& primary) {
  return method == primary ? "" : "_" + method;
}

struct CsvOut {
  std::ofstream out;
  explicit CsvOut(const std::string& path) : out(path) {
    if (!out) throw DataError("cannot write '" + path + "'");
  }
};

}  // namespace

Schedule make_schedule(const RunConfig& cfg, const SeriesPanel& panel) {
  const auto pools = cfg.build_pools();
  Schedule s;
  s.fit_start = global_fit_start(cfg, pools);
  const int k = cfg.resolved_forecast_k();
  const int T = panel.rows();
  s.eval_start = cfg.eval_start ? *cfg.eval_start : s.fit_start + cfg.training_length;
  s.eval_end = cfg.eval_end ? *cfg.eval_end : T - 1 - k;
  if (s.eval_start < s.fit_start) s.eval_start = s.fit_start;
  if (s.eval_end > T - 2) s.eval_end = T - 2;
  if (s.eval_end < s.eval_start)
    throw ConfigError("panel too short for lags + training + forecast horizon (fit_start " +
                      std::to_string(s.fit_start) + ", eval [" + std::to_string(s.eval_start) +
                      ", " + std::to_string(s.eval_end) + "])");
  s.last_step = std::min(T - 1, s.eval_end + k);
  return s;
}

BacktestResult run_backtest(const SeriesPanel& panel, const RunConfig& cfg) {
  cfg.validate();
  const auto pools = cfg.build_pools();
  const auto discounts = cfg.build_discounts();
  const Schedule sched = make_schedule(cfg, panel);

  std::vector<std::string> methods;
  if (cfg.mode == "avs" || cfg.mode == "both") methods.push_back("avs");
  if (cfg.mode == "bma" || cfg.mode == "both") methods.push_back("bma");

  BacktestResult result;
  result.fit_start = sched.fit_start;
  result.eval_start = sched.eval_start;
  result.eval_end = sched.eval_end;

  for (const auto& method : methods) {
    const auto clock_start = std::chrono::steady_clock::now();

    AvsConfig acfg;
    acfg.score = method == "bma" ? cfg.bma_score() : cfg.score;
    acfg.model_prior = cfg.model_prior;
    acfg.sss = cfg.sss;
    acfg.avs_every = cfg.avs_every;
    acfg.forecast_k = cfg.resolved_forecast_k();
    acfg.mc_samples = cfg.mc_samples;
    acfg.quantiles = cfg.quantiles;
    acfg.seed = cfg.seed;

    AvsEngine engine = AvsEngine::make(panel, pools, discounts, acfg, sched.fit_start,
                                       cfg.prior_g, cfg.prior_n0, cfg.prior_s0, cfg.prior_calib);

    MethodArtifacts art;
    art.method = method;
    for (int t = sched.fit_start; t <= sched.last_step; ++t) {
      const int origin = t - 1;
      const bool emit = origin >= sched.eval_start && origin <= sched.eval_end;
      const bool search = origin <= sched.eval_end;
      StepResult res = engine.step(t, emit, search);

      if (emit) {
        for (const auto& row : res.path_summary)
          art.forecasts.push_back({origin, row.series, row.horizon, row.mean, row.quantiles});
        art.snapshots.push_back({origin, res.origin_probabilities});
      }
      if (res.kstep_trace && res.kstep_trace->first >= sched.eval_start &&
          res.kstep_trace->first <= sched.eval_end)
        art.trace.push_back(*res.kstep_trace);
      if (t >= sched.eval_start && t <= sched.eval_end)
        art.representatives.emplace_back(t, engine.state().representative);
    }
    art.run_log = engine.state().run_log;
    art.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    result.methods.push_back(std::move(art));
  }
  return result;
}

void write_bundle(const BacktestResult& result, const RunConfig& cfg, const SeriesPanel& panel,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string primary = result.methods.front().method;
  const auto pools = cfg.build_pools();

  json meta;
  meta["version"] = kVersion;
  meta["seed"] = cfg.seed;
  meta["config"] = json::parse(cfg.to_json_text());
  meta["fit_start"] = result.fit_start;
  meta["eval_start"] = result.eval_start;
  meta["eval_end"] = result.eval_end;
  json files = json::object();

  // scores.csv is shared across methods, sorted by (origin, method)
  {
    CsvOut csv(out_dir + "/scores.csv");
    csv.out << "origin_time,method,log_density\n";
    std::vector<std::tuple<int, std::string, double>> rows;
    for (const auto& art : result.methods)
      for (const auto& [origin, v] : art.trace) rows.emplace_back(origin, art.method, v);
    std::sort(rows.begin(), rows.end());
    for (const auto& [origin, method, v] : rows)
      csv.out << panel.times[static_cast<std::size_t>(origin)] << ',' << method << ','
              << format_double(v) << "\n";
    files["scores"] = "scores.csv";
  }

  for (const auto& art : result.methods) {
    const std::string suffix = method_suffix(art.method, primary);
    json method_files;

    {
      const std::string name = "forecasts" + suffix + ".csv";
      CsvOut csv(out_dir + "/" + name);
      csv.out << "origin_time,series,horizon,mean,q025,q25,q50,q75,q975\n";
      for (const auto& row : art.forecasts) {
        csv.out << panel.times[static_cast<std::size_t>(row.origin)] << ','
                << panel.names[static_cast<std::size_t>(row.series)] << ',' << row.horizon << ','
                << format_double(row.mean);
        for (double q : row.quantiles) csv.out << ',' << format_double(q);
        csv.out << "\n";
      }
      method_files["forecasts"] = name;
    }

    {
      const std::string name = "inclusion" + suffix + ".csv";
      CsvOut csv(out_dir + "/" + name);
      csv.out << "time,series,predictor_id,included\n";
      for (const auto& [t, reps] : art.representatives) {
        for (std::size_t j = 0; j < reps.size(); ++j) {
          const CandidatePool& pool = pools[j];
          for (int i = 0; i < pool.size(); ++i)
            csv.out << panel.times[static_cast<std::size_t>(t)] << ',' << panel.names[j] << ','
                    << pool.entries[static_cast<std::size_t>(i)].id() << ','
                    << (reps[j].has(i) ? 1 : 0) << "\n";
        }
      }
      method_files["inclusion"] = name;
    }

    meta["wall_seconds"][art.method] = art.wall_seconds;
    meta["run_log"][art.method] = art.run_log;
    files[art.method] = method_files;
  }

  {
    json models = json::object();
    for (const auto& art : result.methods) {
      json per_time = json::object();
      for (const auto& snap : art.snapshots) {
        json per_series = json::object();
        for (std::size_t j = 0; j < snap.per_series.size(); ++j) {
          json probs = json::object();
          for (const auto& [key, p] : snap.per_series[j]) probs[key] = p;
          per_series[panel.names[j]] = probs;
        }
        per_time[panel.times[static_cast<std::size_t>(snap.origin)]] = per_series;
      }
      models[art.method] = per_time;
    }
    std::ofstream out(out_dir + "/models.json");
    if (!out) throw DataError("cannot write models.json");
    out << models.dump(1) << "\n";
  }

  meta["files"] = files;
  std::ofstream out(out_dir + "/meta.json");
  if (!out) throw DataError("cannot write meta.json");
  out << meta.dump(2) << "\n";
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_path) {
  if (!cfg.synthetic) throw ConfigError("simulate: config has no synthetic block");
  SeriesPanel panel = generate_synthetic(*cfg.synthetic);
  write_panel(panel, out_path);
}

void cmd_run(const RunConfig& cfg) {
  SeriesPanel panel = cfg.load_data();
  BacktestResult result = run_backtest(panel, cfg);
  write_bundle(result, cfg, panel, cfg.output_dir);
}

namespace {

struct ScoresFile {
  // method -> ordered (origin label, value)
  std::map<std::string, std::vector<std::pair<std::string, double>>> by_method;
};

ScoresFile read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  ScoresFile sf;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string origin, method, value;
    if (!std::getline(ss, origin, ',') || !std::getline(ss, method, ',') ||
        !std::getline(ss, value))
      throw DataError(path + " row " + std::to_string(row) + ": malformed scores row");
    sf.by_method[method].emplace_back(origin, std::strtod(value.c_str(), nullptr));
  }
  return sf;
}

}  // namespace

void cmd_evaluate(const RunConfig& cfg, const std::string& run_dir, const std::string& out_dir,
                  const std::string& panel_override) {
  namespace fs = std::filesystem;
  std::ifstream meta_in(run_dir + "/meta.json");
  if (!meta_in) throw DataError("cannot open '" + run_dir + "/meta.json'");
  json meta = json::parse(meta_in);

  SeriesPanel panel;
  if (!panel_override.empty()) {
    panel = load_panel(panel_override, cfg.schema);
  } else {
    panel = cfg.load_data();
  }
  std::map<std::string, int> row_of_time;
  for (int t = 0; t < panel.rows(); ++t) row_of_time[panel.times[static_cast<std::size_t>(t)]] = t;

  fs::create_directories(out_dir);

  // rmsfe.csv from the per-method forecast files
  {
    CsvOut csv(out_dir + "/rmsfe.csv");
    csv.out << "series,horizon,method,value\n";
    for (const auto& [method, mf] : meta.at("files").items()) {
      if (method == "scores") continue;
      const std::string fpath = run_dir + "/" + mf.at("forecasts").get<std::string>();
      std::ifstream in(fpath);
      if (!in) throw DataError("cannot open '" + fpath + "'");
      std::string line;
      std::getline(in, line);
      std::vector<ForecastPoint> points;
      int row = 1;
      while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string origin, series, horizon, mean;
        if (!std::getline(ss, origin, ',') || !std::getline(ss, series, ',') ||
            !std::getline(ss, horizon, ',') || !std::getline(ss, mean, ','))
          throw DataError(fpath + " row " + std::to_string(row) + ": malformed forecast row");
        auto it = row_of_time.find(origin);
        if (it == row_of_time.end())
          throw DataError(fpath + " row " + std::to_string(row) + ": origin '" + origin +
                          "' not present in the actuals panel");
        points.push_back({it->second, panel.series_index(series), std::atoi(horizon.c_str()),
                          std::strtod(mean.c_str(), nullptr)});
      }
      auto actual = [&](int series, int t) -> std::optional<double> {
        if (t < 0 || t >= panel.rows()) return std::nullopt;
        return panel.y(series, t);
      };
      for (const auto& r : rmsfe_by_horizon(points, actual))
        csv.out << panel.names[static_cast<std::size_t>(r.series)] << ',' << r.horizon << ','
                << method << ',' << format_double(r.value) << "\n";
    }
  }

  // trace.csv from scores.csv
  {
    ScoresFile sf = read_scores(run_dir + "/" + meta.at("files").at("scores").get<std::string>());
    CsvOut csv(out_dir + "/trace.csv");
    csv.out << "origin_time,method,log_density,running_mean\n";
    for (const auto& [method, rows] : sf.by_method) {
      std::vector<std::pair<int, double>> vals;
      vals.reserve(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i)
        vals.emplace_back(static_cast<int>(i), rows[i].second);
      auto trace = logdensity_trace(vals);
      for (std::size_t i = 0; i < trace.size(); ++i)
        csv.out << rows[i].first << ',' << method << ',' << format_double(trace[i].log_density)
                << ',' << format_double(trace[i].running_mean) << "\n";
    }
  }
}

void cmd_compare(const std::string& scores_a, const std::string& scores_b,
                 const std::string& method_a, const std::string& method_b,
                 const std::string& out_path) {
  ScoresFile a = read_scores(scores_a);
  ScoresFile b = read_scores(scores_b);

  auto pick = [](const ScoresFile& sf, const std::string& wanted, const std::string& path)
      -> const std::vector<std::pair<std::string, double>>& {
    if (!wanted.empty()) {
      auto it = sf.by_method.find(wanted);
      if (it == sf.by_method.end())
        throw DataError("'" + path + "' has no method '" + wanted + "'");
      return it->second;
    }
    if (sf.by_method.size() != 1)
      throw DataError("'" + path + "' holds several methods; pick one with --method-a/--method-b");
    return sf.by_method.begin()->second;
  };
  const auto& ra = pick(a, method_a, scores_a);
  const auto& rb = pick(b, method_b, scores_b);

  std::map<std::string, double> b_by_origin(rb.begin(), rb.end());
  CsvOut csv(out_path);
  csv.out << "origin_time,log_density_a,log_density_b,advantage\n";
  std::size_t matched = 0;
  for (const auto& [origin, va] : ra) {
    auto it = b_by_origin.find(origin);
    if (it == b_by_origin.end()) continue;
    ++matched;
    csv.out << origin << ',' << format_double(va) << ',' << format_double(it->second) << ','
            << format_double(va - it->second) << "\n";
  }
  if (matched == 0) throw DataError("compare: the two score files share no origin");
}

}  // namespace ddnm
