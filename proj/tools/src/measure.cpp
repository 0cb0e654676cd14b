#include "cavsol/cli/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cavsol/errors.hpp"

namespace cavsol::cli {

LatticeState rotate(const LatticeState& state, int shift) {
  const int m = state.sites();
  LatticeState out = LatticeState::zeros(m);
  out.t = state.t;
  const int s = ((shift % m) + m) % m;
  for (int l = 0; l < m; ++l) {
    out.alpha[(l + s) % m] = state.alpha[l];
    out.beta[(l + s) % m] = state.beta[l];
  }
  return out;
}

PacketMetrics measure_packet(const LatticeState& state, const ModelParams& params,
                             double carrier_k, double guess, double half_window) {
  const int m = state.sites();
  const double d = params.spacing;
  int shift = 0;
  double local_guess = guess / d;
  if (params.boundary == Boundary::periodic) {
    shift = static_cast<int>(std::lround(m / 2.0 - guess / d));
    local_guess += shift;
  }
  const LatticeState view = shift ? rotate(state, shift) : state;
  const int hw = static_cast<int>(std::ceil(half_window / d));
  const int centre = static_cast<int>(std::lround(local_guess));
  const SiteWindow window{std::max(0, centre - hw), std::min(m, centre + hw)};

  PacketMetrics pm;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pm.fit = {nan, nan, nan, nan};
  for (int l = window.first; l < window.last; ++l) {
    pm.peak = std::max(pm.peak, std::abs(view.alpha[l]));
    pm.weight += std::norm(view.alpha[l]);
  }
  if (!(pm.weight > 0.0)) {
    pm.center = nan;
    return pm;
  }
  const double offset = shift * d;
  pm.center = packet_center(view, d, window) - offset;
  pm.rms_width = packet_width(view, d, window);
  pm.participation = participation_width(view, d, window);
  try {
    pm.fit = fit_sech(view, carrier_k, d, window);
    pm.fit.center -= offset;
  } catch (const Error&) {
    pm.fit = {nan, nan, nan, nan};
  }
  return pm;
}

}  // namespace cavsol::cli
