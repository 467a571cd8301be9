#include "ddnm/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ddnm/errors.hpp"

namespace ddnm {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

CoeffPath coeff_path_from_json(const json& j) {
  CoeffPath p;
  read_if(j, "base", p.base);
  read_if(j, "amplitude", p.amplitude);
  read_if(j, "period", p.period);
  read_if(j, "walk_sd", p.walk_sd);
  read_if(j, "phase", p.phase);
  if (j.contains("shifts"))
    for (const auto& s : j.at("shifts"))
      p.shifts.emplace_back(s.at(0).get<int>(), s.at(1).get<double>());
  return p;
}

json coeff_path_to_json(const CoeffPath& p) {
  json j{{"base", p.base},       {"amplitude", p.amplitude}, {"period", p.period},
         {"walk_sd", p.walk_sd}, {"phase", p.phase}};
  if (!p.shifts.empty()) {
    json shifts = json::array();
    for (const auto& [t, v] : p.shifts) shifts.push_back(json::array({t, v}));
    j["shifts"] = shifts;
  }
  return j;
}

dlm::Discounts discounts_from_json(const json& j, const dlm::Discounts& base) {
  double d = base.delta, b = base.beta;
  read_if(j, "delta", d);
  read_if(j, "beta", b);
  return dlm::Discounts(d, b);
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }

  try {
    RunConfig cfg;
    if (j.contains("panel")) {
      const json& p = j.at("panel");
      read_if(p, "path", cfg.panel_path);
      read_if(p, "time_column", cfg.schema.time_column);
      read_if(p, "series", cfg.schema.series);
      read_if(p, "exogenous", cfg.schema.exogenous);
      read_if(p, "future_exogenous", cfg.future_exogenous_path);
      std::string delim;
      read_if(p, "delimiter", delim);
      if (!delim.empty()) cfg.schema.delimiter = delim[0];
    }
    if (j.contains("synthetic")) {
      const json& s = j.at("synthetic");
      SyntheticConfig sc;
      read_if(s, "T_total", sc.T_total);
      read_if(s, "c", sc.c);
      read_if(s, "obs_noise_sd", sc.obs_noise_sd);
      read_if(s, "seed", sc.seed);
      if (s.contains("theta1")) sc.theta1 = coeff_path_from_json(s.at("theta1"));
      if (s.contains("theta2")) sc.theta2 = coeff_path_from_json(s.at("theta2"));
      cfg.synthetic = sc;
      if (cfg.schema.series.empty()) {
        cfg.schema.series = {"y"};
        cfg.schema.exogenous = {"x1", "x2"};
      }
    }

    cfg.series_order = cfg.schema.series;
    read_if(j, "series_order", cfg.series_order);

    if (j.contains("pools")) {
      for (const auto& pj : j.at("pools")) {
        PoolSpec ps;
        ps.series = pj.at("series").get<std::string>();
        read_if(pj, "intercept", ps.intercept);
        if (pj.contains("lags"))
          for (const auto& [src, ll] : pj.at("lags").items())
            ps.lags[src] = ll.get<std::vector<int>>();
        read_if(pj, "parents", ps.parents);
        read_if(pj, "exogenous", ps.exogenous);
        if (pj.contains("forced")) ps.forced = pj.at("forced").get<std::vector<std::string>>();
        read_if(pj, "max_size", ps.max_size);
        cfg.pools.push_back(std::move(ps));
      }
    }

    if (j.contains("discounts"))
      cfg.default_discounts = discounts_from_json(j.at("discounts"), cfg.default_discounts);
    if (j.contains("series_discounts"))
      for (const auto& [name, dj] : j.at("series_discounts").items())
        cfg.series_discounts[name] = discounts_from_json(dj, cfg.default_discounts);

    if (j.contains("prior")) {
      const json& p = j.at("prior");
      read_if(p, "g", cfg.prior_g);
      read_if(p, "n0", cfg.prior_n0);
      read_if(p, "s0", cfg.prior_s0);
      read_if(p, "calib_length", cfg.prior_calib);
    }

    if (j.contains("score")) {
      const json& s = j.at("score");
      std::string kind = "one_step";
      read_if(s, "kind", kind);
      cfg.score.kind = score_kind_from_string(kind);
      read_if(s, "k", cfg.score.k);
      read_if(s, "alpha", cfg.score.alpha);
      read_if(s, "window_start", cfg.score.window_start);
      read_if(s, "raw_history", cfg.score.raw_history);
      if (s.contains("tau"))
        cfg.score.tau = s.at("tau").get<double>();
      else
        cfg.score.tau = cfg.score.kind == ScoreKind::PathLpfd ? 1.0 / cfg.score.k : 1.0;
    }

    if (j.contains("model_prior")) {
      const json& mp = j.at("model_prior");
      std::string kind = "uniform";
      read_if(mp, "kind", kind);
      if (kind == "bernoulli") {
        cfg.model_prior.bernoulli = true;
        read_if(mp, "pi", cfg.model_prior.pi);
      } else if (kind != "uniform") {
        throw ConfigError("model_prior.kind must be 'uniform' or 'bernoulli'");
      }
    }

    if (j.contains("sss")) {
      const json& s = j.at("sss");
      read_if(s, "iterations", cfg.sss.iterations);
      read_if(s, "max_tracked", cfg.sss.max_tracked);
      read_if(s, "parallel_eval", cfg.sss.parallel_eval);
    }

    read_if(j, "avs_every", cfg.avs_every);
    read_if(j, "training_length", cfg.training_length);
    if (j.contains("evaluation")) {
      const json& e = j.at("evaluation");
      if (e.contains("start") && !e.at("start").is_null()) cfg.eval_start = e.at("start").get<int>();
      if (e.contains("end") && !e.at("end").is_null()) cfg.eval_end = e.at("end").get<int>();
    }
    if (j.contains("forecast")) {
      const json& f = j.at("forecast");
      read_if(f, "k", cfg.forecast_k);
      read_if(f, "mc_samples", cfg.mc_samples);
      read_if(f, "quantiles", cfg.quantiles);
    }
    read_if(j, "seed", cfg.seed);
    read_if(j, "mode", cfg.mode);
    read_if(j, "output_dir", cfg.output_dir);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

std::string RunConfig::to_json_text() const {
  json j;
  json panel;
  if (!panel_path.empty()) panel["path"] = panel_path;
  panel["time_column"] = schema.time_column;
  panel["series"] = schema.series;
  panel["exogenous"] = schema.exogenous;
  if (!future_exogenous_path.empty()) panel["future_exogenous"] = future_exogenous_path;
  panel["delimiter"] = std::string(1, schema.delimiter);
  j["panel"] = panel;

  if (synthetic) {
    const SyntheticConfig& s = *synthetic;
    j["synthetic"] = {{"T_total", s.T_total},
                      {"c", s.c},
                      {"obs_noise_sd", s.obs_noise_sd},
                      {"seed", s.seed},
                      {"theta1", coeff_path_to_json(s.theta1)},
                      {"theta2", coeff_path_to_json(s.theta2)}};
  }

  j["series_order"] = series_order;
  json pools_j = json::array();
  for (const auto& ps : pools) {
    json pj{{"series", ps.series}, {"intercept", ps.intercept}, {"max_size", ps.max_size}};
    json lags_j = json::object();
    for (const auto& [src, ll] : ps.lags) lags_j[src] = ll;
    pj["lags"] = lags_j;
    pj["parents"] = ps.parents;
    pj["exogenous"] = ps.exogenous;
    pj["forced"] = ps.forced;
    pools_j.push_back(pj);
  }
  j["pools"] = pools_j;

  j["discounts"] = {{"delta", default_discounts.delta}, {"beta", default_discounts.beta}};
  if (!series_discounts.empty()) {
    json sd = json::object();
    for (const auto& [name, d] : series_discounts)
      sd[name] = {{"delta", d.delta}, {"beta", d.beta}};
    j["series_discounts"] = sd;
  }
  j["prior"] = {{"g", prior_g}, {"n0", prior_n0}, {"s0", prior_s0}, {"calib_length", prior_calib}};
  j["score"] = {{"kind", to_string(score.kind)}, {"k", score.k},     {"alpha", score.alpha},
                {"tau", score.tau},              {"window_start", score.window_start},
                {"raw_history", score.raw_history}};
  j["model_prior"] = model_prior.bernoulli
                         ? json{{"kind", "bernoulli"}, {"pi", model_prior.pi}}
                         : json{{"kind", "uniform"}};
  j["sss"] = {{"iterations", sss.iterations},
              {"max_tracked", sss.max_tracked},
              {"parallel_eval", sss.parallel_eval}};
  j["avs_every"] = avs_every;
  j["training_length"] = training_length;
  json eval = json::object();
  eval["start"] = eval_start ? json(*eval_start) : json(nullptr);
  eval["end"] = eval_end ? json(*eval_end) : json(nullptr);
  j["evaluation"] = eval;
  j["forecast"] = {{"k", forecast_k}, {"mc_samples", mc_samples}, {"quantiles", quantiles}};
  j["seed"] = seed;
  j["mode"] = mode;
  j["output_dir"] = output_dir;
  return j.dump(2);
}

void RunConfig::validate() const {
  if (panel_path.empty() && !synthetic)
    throw ConfigError("config: either panel.path or a synthetic block is required");
  if (!panel_path.empty() && synthetic)
    throw ConfigError("config: panel.path and synthetic block are mutually exclusive");
  if (schema.series.empty()) throw ConfigError("config: panel.series must name at least one column");
  if (series_order.size() != schema.series.size())
    throw ConfigError("config: series_order must be a permutation of panel.series");
  for (const auto& name : series_order)
    if (std::find(schema.series.begin(), schema.series.end(), name) == schema.series.end())
      throw ConfigError("config: series_order names unknown series '" + name + "'");
  std::set<std::string> uniq(series_order.begin(), series_order.end());
  if (uniq.size() != series_order.size())
    throw ConfigError("config: series_order contains duplicates");

  if (pools.size() != series_order.size())
    throw ConfigError("config: exactly one pool per series is required");
  for (std::size_t i = 0; i < pools.size(); ++i)
    if (pools[i].series != series_order[i])
      throw ConfigError("config: pools must be listed in series_order (pool " +
                        std::to_string(i) + " is '" + pools[i].series + "')");

  if (mode != "avs" && mode != "bma" && mode != "both")
    throw ConfigError("config: mode must be avs, bma or both");
  if (training_length < 0) throw ConfigError("config: training_length must be >= 0");
  if (mc_samples < 1) throw ConfigError("config: forecast.mc_samples must be >= 1");
  if (prior_g <= 0 || prior_n0 <= 0) throw ConfigError("config: prior g and n0 must be positive");
  score.check();
  sss.check();
  if (avs_every < 1) throw ConfigError("config: avs_every must be >= 1");
  if (eval_start && eval_end && *eval_end < *eval_start)
    throw ConfigError("config: evaluation.end precedes evaluation.start");

  for (std::size_t i = 0; i < pools.size(); ++i) build_pool(i).check();
}

SeriesPanel RunConfig::load_data() const {
  SeriesPanel panel;
  if (!panel_path.empty()) {
    panel = load_panel(panel_path, schema);
    if (!future_exogenous_path.empty())
      load_future_exogenous(panel, future_exogenous_path, schema);
  } else if (synthetic) {
    panel = generate_synthetic(*synthetic);
  } else {
    throw ConfigError("config: no panel source");
  }

  // bring the columns into model order
  if (!series_order.empty() && series_order != panel.names) {
    Eigen::MatrixXd reordered(panel.rows(), panel.series_count());
    std::vector<std::string> names;
    for (std::size_t k = 0; k < series_order.size(); ++k) {
      const int src = panel.series_index(series_order[k]);
      reordered.col(static_cast<int>(k)) = panel.values.col(src);
      names.push_back(series_order[k]);
    }
    panel.values = std::move(reordered);
    panel.names = std::move(names);
  }
  return panel;
}

CandidatePool RunConfig::build_pool(std::size_t series_index) const {
  if (series_index >= pools.size()) throw ConfigError("build_pool: series index out of range");
  const PoolSpec& ps = pools[series_index];

  auto order_index = [&](const std::string& name) -> int {
    auto it = std::find(series_order.begin(), series_order.end(), name);
    if (it == series_order.end())
      throw ConfigError("pool '" + ps.series + "': unknown series '" + name + "'");
    return static_cast<int>(it - series_order.begin());
  };

  CandidatePool pool;
  pool.series = static_cast<int>(series_index);
  pool.max_size = ps.max_size;
  if (ps.intercept) pool.entries.push_back({EntryKind::Intercept, -1, 0, ""});
  for (const auto& src_name : series_order) {
    auto it = ps.lags.find(src_name);
    if (it == ps.lags.end()) continue;
    std::vector<int> lags = it->second;
    std::sort(lags.begin(), lags.end());
    const int src = order_index(src_name);
    for (int lag : lags) pool.entries.push_back({EntryKind::Lag, src, lag, ""});
  }
  for (const auto& parent : ps.parents) {
    const int src = order_index(parent);
    if (src <= static_cast<int>(series_index))
      throw ConfigError("pool '" + ps.series + "': parent '" + parent +
                        "' must come after the owner in series_order");
    pool.entries.push_back({EntryKind::Parent, src, 0, ""});
  }
  for (const auto& exo : ps.exogenous) {
    if (std::find(schema.exogenous.begin(), schema.exogenous.end(), exo) ==
        schema.exogenous.end())
      throw ConfigError("pool '" + ps.series + "': exogenous column '" + exo +
                        "' not named in the panel schema");
    pool.entries.push_back({EntryKind::Exogenous, -1, 0, exo});
  }

  pool.forced.assign(pool.entries.size(), 0);
  for (const auto& fid : ps.forced) {
    bool found = false;
    for (std::size_t i = 0; i < pool.entries.size(); ++i) {
      if (pool.entries[i].id() == fid) {
        pool.forced[i] = 1;
        found = true;
        break;
      }
    }
    if (!found)
      throw ConfigError("pool '" + ps.series + "': forced entry '" + fid + "' not in the pool");
  }
  return pool;
}

std::vector<CandidatePool> RunConfig::build_pools() const {
  std::vector<CandidatePool> out;
  for (std::size_t i = 0; i < pools.size(); ++i) out.push_back(build_pool(i));
  return out;
}

std::vector<dlm::Discounts> RunConfig::build_discounts() const {
  std::vector<dlm::Discounts> out;
  for (const auto& name : series_order) {
    auto it = series_discounts.find(name);
    out.push_back(it != series_discounts.end() ? it->second : default_discounts);
  }
  return out;
}

ScoreConfig RunConfig::bma_score() const {
  ScoreConfig s;
  s.kind = ScoreKind::OneStep;
  s.k = 1;
  s.alpha = score.alpha;
  s.tau = 1.0;
  s.window_start = score.window_start;
  s.raw_history = score.raw_history;
  return s;
}

}  // namespace ddnm
