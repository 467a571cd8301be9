#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ddnm/data_io.hpp"
#include "ddnm/errors.hpp"

using namespace ddnm;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path((std::filesystem::temp_directory_path() / name).string()) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

PanelSchema macro_schema() {
  PanelSchema s;
  s.time_column = "date";
  s.series = {"Inflation", "Consumption", "Tr10Yr"};
  return s;
}

}  // namespace

TEST_CASE("bundled macro stand-in panel loads with 312 monthly rows") {
  auto panel = load_panel(std::string(DDNM_FIXTURE_DIR) + "/macro_synthetic.csv", macro_schema());
  CHECK(panel.rows() == 312);
  CHECK(panel.series_count() == 3);
  CHECK(panel.times.front() == "1991-01");
  CHECK(panel.times.back() == "2016-12");
}

TEST_CASE("loader rejects malformed files") {
  SUBCASE("duplicate timestamp is named by row") {
    TempFile f("ddnm_dup.csv", "time,y\n1,0.5\n2,0.6\n2,0.7\n");
    PanelSchema s;
    s.series = {"y"};
    try {
      load_panel(f.path, s);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("row 4") != std::string::npos);
      CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }
  }
  SUBCASE("empty file") {
    TempFile f("ddnm_empty.csv", "");
    PanelSchema s;
    s.series = {"y"};
    CHECK_THROWS_AS(load_panel(f.path, s), DataError);
  }
  SUBCASE("header only") {
    TempFile f("ddnm_hdr.csv", "time,y\n");
    PanelSchema s;
    s.series = {"y"};
    CHECK_THROWS_AS(load_panel(f.path, s), DataError);
  }
  SUBCASE("missing value is named by row and column") {
    TempFile f("ddnm_missing.csv", "time,y\n1,0.5\n2,\n");
    PanelSchema s;
    s.series = {"y"};
    try {
      load_panel(f.path, s);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  SUBCASE("non-monotone time") {
    TempFile f("ddnm_mono.csv", "time,y\n3,0.5\n1,0.6\n");
    PanelSchema s;
    s.series = {"y"};
    CHECK_THROWS_AS(load_panel(f.path, s), DataError);
  }
  SUBCASE("unequally spaced integer times") {
    TempFile f("ddnm_space.csv", "time,y\n1,0.5\n2,0.6\n5,0.7\n");
    PanelSchema s;
    s.series = {"y"};
    CHECK_THROWS_AS(load_panel(f.path, s), DataError);
  }
  SUBCASE("unknown column") {
    TempFile f("ddnm_col.csv", "time,y\n1,0.5\n");
    PanelSchema s;
    s.series = {"z"};
    CHECK_THROWS_AS(load_panel(f.path, s), DataError);
  }
}

TEST_CASE("write/load round trip preserves numeric content exactly") {
  SyntheticConfig cfg;
  cfg.T_total = 40;
  cfg.seed = 7;
  auto panel = generate_synthetic(cfg);

  const auto path = (std::filesystem::temp_directory_path() / "ddnm_roundtrip.csv").string();
  write_panel(panel, path);
  PanelSchema s;
  s.series = {"y"};
  s.exogenous = {"x1", "x2"};
  auto back = load_panel(path, s);
  std::remove(path.c_str());

  REQUIRE(back.rows() == panel.rows());
  for (int t = 0; t < panel.rows(); ++t) {
    CHECK(back.y(0, t) == panel.y(0, t));
    CHECK(back.exo("x1", t) == panel.exo("x1", t));
    CHECK(back.exo("x2", t) == panel.exo("x2", t));
  }
}

TEST_CASE("synthetic generator") {
  SUBCASE("noise-free degenerate DGP gives an exact linear identity") {
    SyntheticConfig cfg;
    cfg.T_total = 60;
    cfg.c = 0.0;
    cfg.obs_noise_sd = 0.0;
    cfg.theta1 = CoeffPath{1.0, 0.0, 40.0, 0.0, 0.0, {}};  // theta1 = 1
    cfg.theta2 = CoeffPath{0.0, 0.0, 40.0, 0.0, 0.0, {}};  // theta2 = 0
    auto panel = generate_synthetic(cfg);
    for (int t = 0; t < panel.rows(); ++t) CHECK(panel.y(0, t) == panel.exo("x1", t));
  }
  SUBCASE("default DGP satisfies the structural identity without noise") {
    SyntheticConfig cfg;
    cfg.T_total = 80;
    cfg.obs_noise_sd = 0.0;
    cfg.seed = 3;
    auto panel = generate_synthetic(cfg);
    auto th1 = cfg.theta1.realize(cfg.T_total, cfg.seed, 3);
    auto th2 = cfg.theta2.realize(cfg.T_total, cfg.seed, 4);
    for (int t = 0; t < panel.rows(); ++t) {
      // same summation order as the generator, so equality is exact
      const double expected =
          cfg.c + th1[t] * panel.exo("x1", t) + th2[t] * panel.exo("x2", t);
      CHECK(panel.y(0, t) == expected);
    }
  }
  SUBCASE("deterministic under a fixed seed") {
    SyntheticConfig cfg;
    cfg.seed = 11;
    auto a = generate_synthetic(cfg);
    auto b = generate_synthetic(cfg);
    CHECK(a.values == b.values);
    CHECK(a.exogenous.at("x1") == b.exogenous.at("x1"));
    cfg.seed = 12;
    auto c = generate_synthetic(cfg);
    CHECK(a.values != c.values);
  }
  SUBCASE("x columns are Rademacher with near-zero mean") {
    SyntheticConfig cfg;
    cfg.T_total = 10000;
    cfg.seed = 5;
    auto panel = generate_synthetic(cfg);
    double mean = 0.0;
    for (double v : panel.exogenous.at("x1")) {
      CHECK((v == 1.0 || v == -1.0));
      mean += v;
    }
    mean /= cfg.T_total;
    CHECK(std::abs(mean) <= 3.0 / std::sqrt(static_cast<double>(cfg.T_total)));
  }
  SUBCASE("piecewise shifts apply from their start time") {
    CoeffPath p{1.0, 0.0, 40.0, 0.0, 0.0, {{5, 2.0}}};
    auto path = p.realize(10, 0, 1);
    CHECK(path[4] == 1.0);
    CHECK(path[5] == 3.0);
    CHECK(path[9] == 3.0);
  }
}

TEST_CASE("availability boundaries") {
  SyntheticConfig cfg;
  cfg.T_total = 30;
  auto panel = generate_synthetic(cfg);

  CandidatePool pool;
  pool.series = 0;
  pool.entries = {{EntryKind::Intercept, -1, 0, ""}, {EntryKind::Lag, 0, 12, ""}};
  pool.forced.assign(2, 0);

  CHECK_FALSE(availability(pool, panel, 12));
  CHECK(availability(pool, panel, 13));
  CHECK_FALSE(availability(pool, panel, panel.rows()));

  SUBCASE("pool without lags is available past the start") {
    CandidatePool flat;
    flat.series = 0;
    flat.entries = {{EntryKind::Intercept, -1, 0, ""}};
    flat.forced.assign(1, 0);
    CHECK_FALSE(availability(flat, panel, 0));
    CHECK(availability(flat, panel, 1));
  }
  SUBCASE("exogenous column ending early blocks availability") {
    CandidatePool exo;
    exo.series = 0;
    exo.entries = {{EntryKind::Exogenous, -1, 0, "x1"}};
    exo.forced.assign(1, 0);
    CHECK(availability(exo, panel, 10));
    panel.exogenous["x1"].resize(5);
    CHECK_FALSE(availability(exo, panel, 10));
  }
}

TEST_CASE("future exogenous table extends columns past the panel end") {
  TempFile panel_f("ddnm_fx_panel.csv", "time,y,x\n1,0.5,1\n2,0.6,-1\n3,0.4,1\n");
  TempFile fut_f("ddnm_fx_future.csv", "time,x\n4,-1\n5,1\n");
  PanelSchema s;
  s.series = {"y"};
  s.exogenous = {"x"};
  auto panel = load_panel(panel_f.path, s);
  CHECK_FALSE(panel.exo_available("x", 3));
  load_future_exogenous(panel, fut_f.path, s);
  CHECK(panel.exo_available("x", 4));
  CHECK(panel.exo("x", 3) == -1.0);

  SUBCASE("future times must extend the panel") {
    TempFile bad("ddnm_fx_bad.csv", "time,x\n3,1\n");
    auto p2 = load_panel(panel_f.path, s);
    CHECK_THROWS_AS(load_future_exogenous(p2, bad.path, s), DataError);
  }
}
