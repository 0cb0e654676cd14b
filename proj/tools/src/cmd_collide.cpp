#include <algorithm>
#include <cmath>
#include <limits>

#include "cavsol/analysis.hpp"
#include "cavsol/cli/commands.hpp"
#include "cavsol/cli/measure.hpp"
#include "cavsol/cli/output.hpp"
#include "cavsol/errors.hpp"
#include "cavsol/initcond.hpp"

namespace cavsol::cli {

namespace {

// Shortest signed displacement from a to b on a ring of circumference L.
double ring_offset(double a, double b, double circumference) {
  double d = std::fmod(b - a, circumference);
  if (d > circumference / 2.0) d -= circumference;
  if (d < -circumference / 2.0) d += circumference;
  return d;
}

nlohmann::ordered_json fit_json(const PacketMetrics& m) {
  return {{"center", number_or_null(m.fit.center)},
          {"amplitude", number_or_null(m.fit.amplitude)},
          {"width", number_or_null(m.fit.width)},
          {"peak", m.peak},
          {"fit_error", number_or_null(m.fit.fit_error)}};
}

}  // namespace

nlohmann::ordered_json cmd_collide(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto& p = cfg.model;
  const auto& co = cfg.collide;
  write_resolved_config(out, "collide", cfg.resolved, cfg.hash);
  if (co.width < kMinSolitonWidthSites * p.spacing)
    throw InvalidArgument("collide.width is below the minimum of 5 lattice spacings");

  const double extent = p.sites * p.spacing;
  const double ring = p.boundary == Boundary::periodic ? extent : 0.0;
  // The packet on the left moves right (+k), the other left (-k) unless
  // co-moving.
  const double left = std::min(co.centers[0], co.centers[1]);
  const double right = std::max(co.centers[0], co.centers[1]);
  const double ks[2] = {co.k, co.co_moving ? co.k : -co.k};
  const double x0[2] = {left, right};

  const auto coeffs = nls_coefficients(co.k, p);
  const double amplitude = soliton_amplitude(coeffs, co.width);
  const auto s0 = superpose(
      sech_packet(ks[0], amplitude, co.width, x0[0], p, Branch::optical, cfg.integrator.hp_guard),
      sech_packet(ks[1], amplitude, co.width, x0[1], p, Branch::optical, cfg.integrator.hp_guard));

  const LatticeModel full(p);
  const auto traj =
      integrate(s0, full, run_integrator(cfg, full, cfg.integrator.t_end, co.sample_interval));

  const double v = group_velocity_discrete(co.k, p);
  const double vs[2] = {v, co.co_moving ? v : -v};
  auto predicted = [&](int i, double t) { return x0[i] + vs[i] * t; };
  // Half the distance to the other packet (either way round a ring), capped.
  auto half_window = [&](double t) {
    double gap = std::abs(predicted(1, t) - predicted(0, t));
    if (ring > 0.0) gap = std::abs(ring_offset(predicted(0, t), predicted(1, t), ring));
    return std::min(0.5 * gap, 6.0 * co.width);
  };
  auto measure = [&](const LatticeState& st, int i) {
    return measure_packet(st, p, ks[i], predicted(i, st.t), half_window(st.t));
  };

  CsvWriter csv(out / "collide.csv", "collide", "two-soliton collision time series", cfg.hash,
                {{"t", "time"},
                 {"energy", "frequency"},
                 {"norm", "1"},
                 {"max_amp", "1"},
                 {"predicted_left", "d"},
                 {"predicted_right", "d"},
                 {"separation", "d"}});
  std::size_t pre_index = 0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& st = traj.samples[i];
    double peak = 0.0;
    for (const auto& a : st.alpha) peak = std::max(peak, std::abs(a));
    if (st.t <= co.pre_time + 1e-9) pre_index = i;
    csv.row({st.t, traj.diagnostics[i].energy, traj.diagnostics[i].norm, peak, predicted(0, st.t),
             predicted(1, st.t), 2.0 * half_window(st.t)});
  }

  const auto& pre_state = traj.samples[pre_index];
  const auto& post_state = traj.final_state();
  nlohmann::ordered_json solitons = nlohmann::ordered_json::array();
  double worst_amp_change = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto pre = measure(pre_state, i);
    const auto post = measure(post_state, i);
    const double change = std::abs(post.fit.amplitude - pre.fit.amplitude) / pre.fit.amplitude;
    worst_amp_change = std::isfinite(change) ? std::max(worst_amp_change, change)
                                             : std::numeric_limits<double>::infinity();
    solitons.push_back({{"carrier_k", ks[i]},
                        {"initial_center", x0[i]},
                        {"pre", fit_json(pre)},
                        {"post", fit_json(post)},
                        {"amplitude_rel_change", number_or_null(change)},
                        {"width_rel_change",
                         number_or_null((post.fit.width - pre.fit.width) / pre.fit.width)}});
  }

  const auto& d0 = traj.diagnostics.front();
  double e_drift = 0.0, n_drift = 0.0;
  for (const auto& d : traj.diagnostics) {
    e_drift = std::max(e_drift, std::abs(d.energy - d0.energy) / std::max(std::abs(d0.energy), 1.0));
    n_drift = std::max(n_drift, std::abs(d.norm - d0.norm) / d0.norm);
  }

  // Predicted crossing time of the two centroids on the inner side.
  const double meet = co.co_moving ? std::numeric_limits<double>::infinity()
                                   : (right - left) / (2.0 * v);
  nlohmann::ordered_json body;
  body["k"] = co.k;
  body["width"] = co.width;
  body["amplitude"] = amplitude;
  body["velocity"] = v;
  body["co_moving"] = co.co_moving;
  body["predicted_crossing_time"] = number_or_null(meet);
  body["pre_time"] = pre_state.t;
  body["post_time"] = post_state.t;
  body["collided"] = post_state.t > meet;
  body["solitons"] = solitons;
  body["max_amplitude_rel_change"] = number_or_null(worst_amp_change);
  body["energy_drift"] = e_drift;
  body["norm_drift"] = n_drift;
  body["steps"] = traj.accepted_steps;
  const auto doc = summary_document(
      "collide", cfg.hash, {{"center", "d"}, {"width", "d"}, {"drift", "relative"}}, body);
  write_json(out / "summary.json", doc);
  return doc;
}

}  // namespace cavsol::cli
