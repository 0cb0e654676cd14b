#include <cmath>
#include <limits>
#include <random>

#include "cavsol/analysis.hpp"
#include "cavsol/cli/commands.hpp"
#include "cavsol/cli/measure.hpp"
#include "cavsol/cli/output.hpp"
#include "cavsol/errors.hpp"
#include "cavsol/initcond.hpp"

namespace cavsol::cli {

namespace {

struct Series {
  std::vector<double> t, center;
  std::vector<PacketMetrics> metrics;
};

// Tracks the packet along the trajectory, re-centring the window on the
// previous centroid so it follows the packet around a ring.
Series track(const Trajectory& traj, const ModelParams& p, double k, double center0,
             double half_window) {
  Series s;
  double guess = center0;
  for (const auto& st : traj.samples) {
    const auto pm = measure_packet(st, p, k, guess, half_window);
    s.t.push_back(st.t);
    s.metrics.push_back(pm);
    s.center.push_back(pm.center);
    if (std::isfinite(pm.center)) guess = pm.center;
  }
  return s;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

nlohmann::ordered_json cmd_soliton(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto& p = cfg.model;
  const auto& so = cfg.soliton;
  write_resolved_config(out, "soliton", cfg.resolved, cfg.hash);

  const auto coeffs = nls_coefficients(so.k, p);
  const double extent = p.sites * p.spacing;
  const double center0 = so.center.value_or(extent / 4.0);
  const double amplitude = so.amplitude_scale * soliton_amplitude(coeffs, so.width);
  const double half_window = p.boundary == Boundary::periodic ? extent / 2.0 : extent;

  if (so.width < kMinSolitonWidthSites * p.spacing)
    throw InvalidArgument("soliton.width is below the minimum of 5 lattice spacings");
  LatticeState s0 = sech_packet(so.k, amplitude, so.width, center0, p, Branch::optical,
                                cfg.integrator.hp_guard);
  if (so.noise > 0.0) {
    std::mt19937_64 rng(cfg.run.seed);
    std::normal_distribution<double> normal(0.0, so.noise * amplitude / std::sqrt(2.0));
    for (auto& a : s0.alpha) a += Complex{normal(rng), normal(rng)};
  }

  const LatticeModel full(p);
  const auto traj = integrate(s0, full, run_integrator(cfg, full, cfg.integrator.t_end,
                                                       so.sample_interval));
  const auto series = track(traj, p, so.k, center0, half_window);

  CsvWriter csv(out / "soliton.csv", "soliton", "full-nonlinearity soliton time series", cfg.hash,
                {{"t", "time"},
                 {"peak_amp", "1"},
                 {"width", "d"},
                 {"center", "d"},
                 {"energy", "frequency"},
                 {"norm", "1"},
                 {"fit_amp", "1"},
                 {"fit_center", "d"},
                 {"fit_error", "1"},
                 {"rms_width", "d"},
                 {"participation_width", "d"},
                 {"hp_load", "1"}});
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& m = series.metrics[i];
    const auto& d = traj.diagnostics[i];
    csv.row({series.t[i], m.peak, m.fit.width, m.center, d.energy, d.norm, m.fit.amplitude,
             m.fit.center, m.fit.fit_error, m.rms_width, m.participation, d.hp_load});
  }

  nlohmann::ordered_json body;
  body["k"] = so.k;
  body["width"] = so.width;
  body["amplitude"] = amplitude;
  body["c1"] = coeffs.c1;
  body["c2"] = coeffs.c2;
  body["omega_plus"] = coeffs.omega_plus;
  body["v_g_predicted"] = coeffs.v_g;
  body["v_g_discrete"] = group_velocity_discrete(so.k, p);

  const auto& d0 = traj.diagnostics.front();
  double e_drift = 0.0, n_drift = 0.0;
  for (const auto& d : traj.diagnostics) {
    e_drift = std::max(e_drift, std::abs(d.energy - d0.energy) / std::max(std::abs(d0.energy), 1.0));
    if (d0.norm > 0.0) n_drift = std::max(n_drift, std::abs(d.norm - d0.norm) / d0.norm);
  }

  if (!(amplitude > 0.0) || !(series.metrics.front().weight > 0.0)) {
    body["status"] = "empty-field";
    body["amp_drift"] = nullptr;
    body["width_drift"] = nullptr;
    body["measured_velocity"] = nullptr;
    body["velocity_rel_err"] = nullptr;
  } else {
    const auto& first = series.metrics.front();
    const auto& last = series.metrics.back();
    double amp_drift = 0.0, width_drift = 0.0;
    for (const auto& m : series.metrics) {
      amp_drift = std::max(amp_drift, std::abs(m.peak - first.peak) / first.peak);
      width_drift = std::max(width_drift, std::abs(m.fit.width - first.fit.width) / first.fit.width);
    }
    const double v = slope(series.t, series.center);
    body["status"] = "ok";
    body["amp_drift"] = number_or_null(amp_drift);
    body["width_drift"] = number_or_null(width_drift);
    body["amp_final_rel_change"] = number_or_null((last.peak - first.peak) / first.peak);
    body["width_final_rel_change"] =
        number_or_null((last.fit.width - first.fit.width) / first.fit.width);
    body["max_fit_error"] = [&] {
      double e = 0.0;
      for (const auto& m : series.metrics) e = std::max(e, m.fit.fit_error);
      return number_or_null(e);
    }();
    body["measured_velocity"] = number_or_null(v);
    body["velocity_rel_err"] = number_or_null(std::abs(v - coeffs.v_g) / std::abs(coeffs.v_g));
  }
  body["energy_drift"] = e_drift;
  body["norm_drift"] = n_drift;
  body["steps"] = traj.accepted_steps;

  if (so.linear_contrast && amplitude > 0.0) {
    const LatticeModel linear(p, Nonlinearity::linearized);
    const auto lin = integrate(s0, linear, run_integrator(cfg, linear, cfg.integrator.t_end,
                                                          so.sample_interval));
    const auto ls = track(lin, p, so.k, center0, half_window);
    CsvWriter lcsv(out / "linear_contrast.csv", "soliton",
                   "identical envelope under linearized dynamics", cfg.hash,
                   {{"t", "time"},
                    {"peak_amp", "1"},
                    {"rms_width", "d"},
                    {"participation_width", "d"},
                    {"center", "d"}});
    for (std::size_t i = 0; i < lin.samples.size(); ++i) {
      const auto& m = ls.metrics[i];
      lcsv.row({ls.t[i], m.peak, m.rms_width, m.participation, m.center});
    }
    nlohmann::ordered_json lc;
    lc["rms_width_growth"] = ls.metrics.back().rms_width / ls.metrics.front().rms_width;
    lc["participation_growth"] =
        ls.metrics.back().participation / ls.metrics.front().participation;
    lc["peak_ratio"] = ls.metrics.back().peak / ls.metrics.front().peak;
    lc["nonlinear_rms_width_growth"] =
        series.metrics.back().rms_width / series.metrics.front().rms_width;
    body["linear_contrast"] = lc;
  }

  const auto doc = summary_document(
      "soliton", cfg.hash,
      {{"width", "d"}, {"velocity", "d per unit time"}, {"drift", "relative"}}, body);
  write_json(out / "summary.json", doc);
  return doc;
}

}  // namespace cavsol::cli
