#pragma once

#include "cavsol/analysis.hpp"
#include "cavsol/model.hpp"

namespace cavsol::cli {

struct PacketMetrics {
  double peak = 0.0;  // max |alpha_l|
  SechFit fit;        // center in absolute, unwrapped coordinates
  double rms_width = 0.0;
  double participation = 0.0;
  double center = 0.0;  // intensity centroid, unwrapped near the guess
  double weight = 0.0;  // sum |alpha_l|^2 inside the window
};

// Measures one packet inside [guess - half_window, guess + half_window).
// On a periodic ring the field is rotated so the window never wraps.
// An empty window yields zero metrics with NaN fit entries.
PacketMetrics measure_packet(const LatticeState& state, const ModelParams& params,
                             double carrier_k, double guess, double half_window);

// Cyclic rotation: out[(l + shift) mod M] = in[l].
LatticeState rotate(const LatticeState& state, int shift);

}  // namespace cavsol::cli
