#include "ddnm/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ddnm/errors.hpp"
#include "ddnm/parallel.hpp"
#include "ddnm/rng.hpp"

namespace ddnm {

namespace {

double log_normal_density(double y, double mean, double lambda) {
  const double d = y - mean;
  return 0.5 * std::log(lambda) - 0.5 * std::log(2.0 * M_PI) - 0.5 * lambda * d * d;
}

// Per-(series, model) immutable pieces reused across samples.
struct ModelDraws {
  const SeriesModelState* ms = nullptr;
  Eigen::MatrixXd chol;  // lower factor of C
};

struct SeriesDraws {
  const SeriesState* ss = nullptr;
  std::vector<ModelDraws> models;
  std::vector<double> cum_prob;  // cumulative model probabilities
};

std::vector<SeriesDraws> prepare(const DdnmState& state) {
  std::vector<SeriesDraws> out(state.series.size());
  for (std::size_t j = 0; j < state.series.size(); ++j) {
    const SeriesState& ss = state.series[j];
    if (ss.models.empty()) throw std::invalid_argument("forecast: series without models");
    out[j].ss = &ss;
    double cum = 0.0;
    for (const auto& ms : ss.models) {
      ModelDraws md;
      md.ms = &ms;
      Eigen::LLT<Eigen::MatrixXd> llt(ms.state.C);
      if (llt.info() == Eigen::Success) {
        md.chol = llt.matrixL();
      } else {
        // PSD-but-singular scale: fall back to a sqrt via eigendecomposition
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ms.state.C);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        md.chol = es.eigenvectors() * ev.asDiagonal();
      }
      cum += ms.probability;
      out[j].models.push_back(std::move(md));
      out[j].cum_prob.push_back(cum);
    }
  }
  return out;
}

// Latent state of one series along one sampled path.
struct LatentWalk {
  Eigen::VectorXd theta;
  double lambda = 1.0;
  double dof = 1.0;          // current volatility degrees of freedom
  const ModelDraws* md = nullptr;

  void init(const ModelDraws& m, std::mt19937_64& gen) {
    md = &m;
    const dlm::Posterior& post = m.ms->state;
    std::gamma_distribution<double> ga(post.n / 2.0, 2.0 / (post.n * post.s));
    lambda = ga(gen);
    dof = post.n;
    std::normal_distribution<double> z;
    Eigen::VectorXd eps(post.dim());
    for (int i = 0; i < post.dim(); ++i) eps[i] = z(gen);
    theta = post.m + m.chol * eps / std::sqrt(post.s * lambda);
  }

  // One discount evolution step; h is 1-based ahead-count from the origin.
  void evolve(const dlm::Discounts& disc, double s_point, int h, std::mt19937_64& gen) {
    if (disc.beta < 1.0) {
      std::gamma_distribution<double> ga_a(disc.beta * dof / 2.0, 1.0);
      std::gamma_distribution<double> ga_b((1.0 - disc.beta) * dof / 2.0, 1.0);
      const double x = ga_a(gen), y = ga_b(gen);
      const double eta = x / (x + y);
      lambda *= eta / disc.beta;
      dof *= disc.beta;
    }
    if (disc.delta < 1.0) {
      // W_h = C_{h-1}(1-delta)/delta with C compounding as C0/delta^(h-1)
      const double scale =
          std::sqrt((1.0 - disc.delta) / std::pow(disc.delta, h) / (s_point * lambda));
      std::normal_distribution<double> z;
      Eigen::VectorXd eps(theta.size());
      for (int i = 0; i < theta.size(); ++i) eps[i] = z(gen);
      theta += md->chol * eps * scale;
    }
  }
};

enum class Mode { SinglePath, Mixture, Density };

// Shared driver: propagates latent paths and either records sampled
// observations or accumulates the log density of a supplied path.
void run_samples(const DdnmState& state, const SeriesPanel& panel, int k, int n_samples,
                 std::uint64_t rng_stream, Mode mode, const Eigen::MatrixXd* observed,
                 PathSamples* out_paths, std::vector<double>* out_logdens) {
  if (k < 1) throw std::invalid_argument("forecast: k must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("forecast: n_samples must be >= 1");
  const int m = static_cast<int>(state.series.size());
  const int origin = state.origin_time;
  const auto prep = prepare(state);

  if (mode == Mode::SinglePath) {
    for (const auto& sd : prep)
      if (sd.models.size() != 1)
        throw std::invalid_argument("simulate_paths: each series must hold exactly one model");
  }
  if (mode == Mode::Density &&
      (observed->rows() != k || observed->cols() != m))
    throw std::invalid_argument("mc_path_logdensity: observed path must be k x m");

  if (out_paths) {
    out_paths->origin_time = origin;
    out_paths->horizon = k;
    out_paths->n_samples = n_samples;
    out_paths->m = m;
    out_paths->draws.assign(static_cast<std::size_t>(n_samples) * k * m, 0.0);
  }
  if (out_logdens) out_logdens->assign(static_cast<std::size_t>(n_samples), 0.0);

  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t i) {
    auto gen = rng::stream(rng_stream, {rng::kPathSample, static_cast<std::uint64_t>(i)});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> z;

    // model selection per series
    std::vector<LatentWalk> walk(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      std::size_t pick = 0;
      if (mode == Mode::Mixture && prep[j].models.size() > 1) {
        const double u = unif(gen) * prep[j].cum_prob.back();
        while (pick + 1 < prep[j].models.size() && u > prep[j].cum_prob[pick]) ++pick;
      }
      walk[static_cast<std::size_t>(j)].init(prep[j].models[pick], gen);
    }

    Eigen::MatrixXd sim(k, m);
    double logdens = 0.0;
    auto series_value = [&](int s, int u) -> double {
      if (u <= origin) {
        if (u < 0) throw DataError("forecast: lag reaches before the panel start");
        return panel.y(s, u);
      }
      if (mode == Mode::Density) return (*observed)(u - origin - 1, s);
      return sim(u - origin - 1, s);
    };
    auto exo_value = [&](const std::string& name, int u) -> double {
      if (!panel.exo_available(name, u))
        throw DataError("forecast: future value of exogenous column '" + name +
                        "' required at time " + std::to_string(u) + " but not supplied");
      return panel.exo(name, u);
    };

    for (int h = 1; h <= k; ++h) {
      const int t = origin + h;
      for (int j = m - 1; j >= 0; --j) {
        LatentWalk& w = walk[static_cast<std::size_t>(j)];
        const SeriesState& ss = *prep[j].ss;
        w.evolve(ss.discounts, w.md->ms->state.s, h, gen);
        const Eigen::VectorXd F =
            design_vector(ss.pool, w.md->ms->model, series_value, exo_value, t);
        const double mean = F.dot(w.theta);
        if (mode == Mode::Density) {
          logdens += log_normal_density((*observed)(h - 1, j), mean, w.lambda);
        } else {
          sim(h - 1, j) = mean + z(gen) / std::sqrt(w.lambda);
        }
      }
    }

    if (out_paths) {
      for (int h = 0; h < k; ++h)
        for (int j = 0; j < m; ++j)
          out_paths->draws[(i * static_cast<std::size_t>(k) + h) * m + j] = sim(h, j);
    }
    if (out_logdens) (*out_logdens)[i] = logdens;
  });
}

}  // namespace

double joint_one_step_logdensity(const DdnmState& state, const SeriesPanel& panel, int t,
                                 const Eigen::VectorXd& y_t) {
  const int m = static_cast<int>(state.series.size());
  if (y_t.size() != m) throw std::invalid_argument("joint_one_step_logdensity: y_t has wrong size");

  auto series_value = [&](int s, int u) -> double {
    if (u == t) return y_t[s];
    if (u < 0 || u >= panel.rows())
      throw DataError("joint_one_step_logdensity: series value outside observed range");
    return panel.y(s, u);
  };
  auto exo_value = [&](const std::string& name, int u) -> double {
    if (!panel.exo_available(name, u))
      throw DataError("joint_one_step_logdensity: exogenous column '" + name + "' missing at " +
                      std::to_string(u));
    return panel.exo(name, u);
  };

  double total = 0.0;
  for (int j = m - 1; j >= 0; --j) {
    const SeriesState& ss = state.series[static_cast<std::size_t>(j)];
    if (ss.models.size() != 1)
      throw std::invalid_argument("joint_one_step_logdensity: one model per series required");
    const SeriesModelState& ms = ss.models.front();
    const dlm::Prior pr = dlm::evolve(ms.state, ss.discounts);
    const Eigen::VectorXd F = design_vector(ss.pool, ms.model, series_value, exo_value, t);
    total += dlm::log_predictive(dlm::one_step_forecast(pr, F), y_t[j]);
  }
  return total;
}

PathSamples simulate_paths(const DdnmState& state, const SeriesPanel& panel, int k, int n_samples,
                           std::uint64_t rng_stream) {
  PathSamples out;
  run_samples(state, panel, k, n_samples, rng_stream, Mode::SinglePath, nullptr, &out, nullptr);
  return out;
}

PathSamples model_averaged_paths(const DdnmState& state, const SeriesPanel& panel, int k,
                                 int n_samples, std::uint64_t rng_stream) {
  PathSamples out;
  run_samples(state, panel, k, n_samples, rng_stream, Mode::Mixture, nullptr, &out, nullptr);
  return out;
}

McLogDensity mc_path_logdensity(const DdnmState& state, const SeriesPanel& panel,
                                const Eigen::MatrixXd& observed_path, int n_samples,
                                std::uint64_t rng_stream) {
  std::vector<double> logdens;
  run_samples(state, panel, static_cast<int>(observed_path.rows()), n_samples, rng_stream,
              Mode::Density, &observed_path, nullptr, &logdens);

  double mx = logdens[0];
  for (double l : logdens) mx = std::max(mx, l);
  double sum = 0.0;
  for (double l : logdens) sum += std::exp(l - mx);
  const double n = static_cast<double>(logdens.size());
  const double wbar = sum / n;

  McLogDensity res;
  res.log_density = mx + std::log(wbar);
  if (logdens.size() > 1) {
    double ss = 0.0;
    for (double l : logdens) {
      const double d = std::exp(l - mx) - wbar;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    res.standard_error = sd / (wbar * std::sqrt(n));
  }
  return res;
}

std::vector<SummaryRow> summarize(const PathSamples& paths, const std::vector<double>& quantiles) {
  if (paths.n_samples < 1 || paths.draws.empty())
    throw std::invalid_argument("summarize: empty draws");
  std::vector<SummaryRow> rows;
  rows.reserve(static_cast<std::size_t>(paths.horizon) * paths.m);
  std::vector<double> buf(static_cast<std::size_t>(paths.n_samples));
  for (int h = 0; h < paths.horizon; ++h) {
    for (int j = 0; j < paths.m; ++j) {
      for (int i = 0; i < paths.n_samples; ++i) buf[static_cast<std::size_t>(i)] = paths.at(i, h, j);
      SummaryRow row;
      row.horizon = h + 1;
      row.series = j;
      double total = 0.0;
      for (double v : buf) total += v;
      row.mean = total / paths.n_samples;
      std::sort(buf.begin(), buf.end());
      for (double q : quantiles) {
        // type-7: linear interpolation at (n-1)q
        const double pos = (paths.n_samples - 1) * q;
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        double v = buf[lo];
        if (frac > 0.0 && lo + 1 < buf.size()) v += frac * (buf[lo + 1] - buf[lo]);
        row.quantiles.push_back(v);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ddnm
