#pragma once

#include "cavsol/analysis.hpp"
#include "cavsol/model.hpp"

namespace cavsol {

// Ratio beta/alpha of the linear lattice eigenmode, Omega sqrt(N) / w~(k).
// Throws SingularCarrier when the branch frequency vanishes, or for the purely
// atomic branch when Omega = 0 (ratio 0 on the bare photon branch).
double branch_ratio(double k, const ModelParams& params, Branch branch);

// alpha_l = A exp(i k l d), beta_l = branch_ratio * alpha_l, t = 0.
LatticeState plane_wave(double k, double amplitude, Branch branch, const ModelParams& params);

// Smallest admissible soliton width, in units of d.
inline constexpr double kMinSolitonWidthSites = 5.0;

// Physical amplitude of a soliton of width w: sqrt(2 c1 / c2) / w.
double soliton_amplitude(const NLSCoefficients& coeffs, double width);

// Optical-branch sech soliton centred at x_c with physical width w:
// alpha_l = A sech((l d - x_c)/w) exp(i [k l d + sigma (l d - x_c) + phi0]).
// Throws InvalidArgument below the minimum width and HpViolation when the
// peak |beta|^2 / N exceeds hp_guard.
LatticeState soliton_state(const SolitonSpec& spec, const ModelParams& params, double center,
                           double width, double hp_guard = 0.5);

// Same carrier and profile with an explicit amplitude instead of the
// soliton value.
LatticeState sech_packet(double k, double amplitude, double width, double center,
                         const ModelParams& params, Branch branch = Branch::optical,
                         double hp_guard = 0.5);

// alpha_l = A exp(-(l d - x_c)^2 / (2 s^2)) exp(i k l d); beta per branch.
LatticeState gaussian_packet(double k, double amplitude, double width, double center,
                             const ModelParams& params, Branch branch = Branch::optical);

// Site-wise sum of two states of equal size; time taken from the first.
LatticeState superpose(const LatticeState& a, const LatticeState& b);

}  // namespace cavsol
