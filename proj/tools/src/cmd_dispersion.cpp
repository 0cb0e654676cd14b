#include <cmath>
#include <limits>
#include <numbers>

#include "cavsol/analysis.hpp"
#include "cavsol/cli/commands.hpp"
#include "cavsol/cli/output.hpp"
#include "cavsol/errors.hpp"
#include "cavsol/initcond.hpp"

namespace cavsol::cli {

namespace {

// Nearest wavenumber supported by a periodic ring.
double snap_to_ring(double k, const ModelParams& p) {
  if (p.boundary != Boundary::periodic) return k;
  const double unit = 2.0 * std::numbers::pi / (p.sites * p.spacing);
  return unit * std::round(k / unit);
}

}  // namespace

nlohmann::ordered_json cmd_dispersion(const ExperimentConfig& cfg,
                                      const std::filesystem::path& out) {
  const auto& p = cfg.model;
  const auto& ds = cfg.dispersion;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  write_resolved_config(out, "dispersion", cfg.resolved, cfg.hash);

  CsvWriter csv(out / "dispersion.csv", "dispersion",
                "closed-form and measured linear branches, one row per (k, branch)", cfg.hash,
                {{"k", "1/d"},
                 {"k_requested", "1/d"},
                 {"branch", "+1 optical, -1 acoustic"},
                 {"omega_plus_discrete", "frequency"},
                 {"omega_minus_discrete", "frequency"},
                 {"omega_plus_cont", "frequency"},
                 {"omega_minus_cont", "frequency"},
                 {"omega_measured", "frequency"},
                 {"rel_err", "1"}});

  const LatticeModel linear(p, Nonlinearity::linearized);
  double max_rel = 0.0;
  int measured_rows = 0;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (double k_req : ds.k_grid) {
    const double k = snap_to_ring(k_req, p);
    const double wp = dispersion_discrete(k, p, Branch::optical).omega;
    const double wm = dispersion_discrete(k, p, Branch::acoustic).omega;
    const double cp = dispersion_continuous(k, p, Branch::optical).omega;
    const double cm = dispersion_continuous(k, p, Branch::acoustic).omega;
    for (Branch b : ds.branches) {
      const double target = b == Branch::optical ? wp : wm;
      double measured = nan, rel = nan;
      if (ds.measure) {
        try {
          const auto s0 = plane_wave(k, ds.amplitude, b, p);
          // Sample comfortably above Nyquist for the fastest branch.
          const double w_max = linear.max_frequency(cfg.integrator.hp_guard);
          const double interval = std::min(0.5, std::numbers::pi / (4.0 * std::max(w_max, 1e-12)));
          const auto traj =
              integrate(s0, linear, run_integrator(cfg, linear, ds.record_time, interval));
          const auto spec = measure_spectrum(traj, ds.probe_site, 1);
          if (!spec.peaks.empty()) {
            measured = spec.peaks.front().frequency;
            rel = std::abs(measured - target) / (target != 0.0 ? std::abs(target) : 1.0);
            max_rel = std::max(max_rel, rel);
            ++measured_rows;
          }
        } catch (const SingularCarrier&) {
          // Uncoupled atomic branch: the cavity field carries no amplitude.
        }
      }
      const double bsign = b == Branch::optical ? 1.0 : -1.0;
      csv.row({k, k_req, bsign, wp, wm, cp, cm, measured, rel});
      rows.push_back({{"k", k},
                      {"branch", std::string(to_string(b))},
                      {"omega_discrete", target},
                      {"omega_measured", number_or_null(measured)},
                      {"rel_err", number_or_null(rel)}});
    }
  }

  // omega+ omega- = -Omega^2 N across the zone.
  double product_err = 0.0;
  const double target = -p.coupling * p.coupling * p.atoms;
  for (int i = 0; i < 100; ++i) {
    const double k = -std::numbers::pi / p.spacing + 2.0 * std::numbers::pi / p.spacing * i / 99.0;
    const double prod = dispersion_discrete(k, p, Branch::optical).omega *
                        dispersion_discrete(k, p, Branch::acoustic).omega;
    product_err = std::max(product_err, std::abs(prod - target) / std::max(std::abs(target), 1.0));
  }

  nlohmann::ordered_json body;
  body["rows"] = rows;
  body["measured_rows"] = measured_rows;
  body["max_rel_err"] = measured_rows ? nlohmann::ordered_json(max_rel) : nlohmann::ordered_json(nullptr);
  body["branch_product_max_rel_err"] = product_err;
  body["band_gap"] = band_gap(p);
  body["zone_edge_splitting"] = zone_edge_splitting(p);
  const auto doc = summary_document(
      "dispersion", cfg.hash,
      {{"k", "1/d"}, {"omega", "frequency"}, {"rel_err", "1"}, {"band_gap", "frequency"}}, body);
  write_json(out / "summary.json", doc);
  return doc;
}

}  // namespace cavsol::cli
