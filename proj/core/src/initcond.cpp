#include "cavsol/initcond.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavsol/errors.hpp"

namespace cavsol {

double branch_ratio(double k, const ModelParams& params, Branch branch) {
  const double w = dispersion_discrete(k, params, branch).omega;
  const double g = params.collective_coupling();
  if (g == 0.0) {
    // Uncoupled: one branch is the bare photon band, the other is purely
    // atomic and has no cavity field to seed.
    const double photon = -2.0 * params.hopping * std::cos(k * params.spacing);
    if (std::abs(w - photon) <= 1e-12 * std::max(1.0, std::abs(photon))) return 0.0;
    throw SingularCarrier("branch carries no cavity field at Omega = 0");
  }
  if (w == 0.0)
    throw SingularCarrier("branch frequency vanishes at k = " + std::to_string(k));
  return g / w;
}

LatticeState plane_wave(double k, double amplitude, Branch branch, const ModelParams& params) {
  params.validate();
  if (!(amplitude > 0.0)) throw InvalidArgument("plane-wave amplitude must be > 0");
  const double ratio = branch_ratio(k, params, branch);
  LatticeState s = LatticeState::zeros(params.sites);
  for (int l = 0; l < params.sites; ++l) {
    s.alpha[l] = std::polar(amplitude, k * l * params.spacing);
    s.beta[l] = ratio * s.alpha[l];
  }
  return s;
}

double soliton_amplitude(const NLSCoefficients& coeffs, double width) {
  if (!(coeffs.c1 * coeffs.c2 > 0.0)) throw InvalidArgument("bright soliton needs c1 c2 > 0");
  if (!(width > 0.0)) throw InvalidArgument("soliton width must be > 0");
  return std::sqrt(2.0 * coeffs.c1 / coeffs.c2) / width;
}

namespace {

LatticeState sech_field(double k, double sigma, double phi0, double amplitude, double width,
                        double center, const ModelParams& params, Branch branch,
                        double hp_guard) {
  params.validate();
  if (width < kMinSolitonWidthSites * params.spacing) {
    std::ostringstream os;
    os << "envelope width " << width << " is below " << kMinSolitonWidthSites
       << " lattice spacings";
    throw InvalidArgument(os.str());
  }
  const double ratio = branch_ratio(k, params, branch);
  LatticeState s = LatticeState::zeros(params.sites);
  for (int l = 0; l < params.sites; ++l) {
    const double x = l * params.spacing;
    const double env = amplitude / std::cosh((x - center) / width);
    s.alpha[l] = std::polar(env, k * x + sigma * (x - center) + phi0);
    s.beta[l] = ratio * s.alpha[l];
  }
  const double load = hp_load(s, params.atoms);
  if (load > hp_guard) {
    std::ostringstream os;
    os << "soliton peak |beta|^2/N = " << load << " exceeds the HP guard " << hp_guard;
    throw HpViolation(os.str());
  }
  return s;
}

}  // namespace

LatticeState soliton_state(const SolitonSpec& spec, const ModelParams& params, double center,
                           double width, double hp_guard) {
  spec.validate();
  const double amplitude = soliton_amplitude(spec.coeffs, width);
  return sech_field(spec.coeffs.k, spec.sigma, spec.phi0, amplitude, width, center, params,
                    Branch::optical, hp_guard);
}

LatticeState sech_packet(double k, double amplitude, double width, double center,
                         const ModelParams& params, Branch branch, double hp_guard) {
  if (amplitude < 0.0) throw InvalidArgument("packet amplitude must be >= 0");
  return sech_field(k, 0.0, 0.0, amplitude, width, center, params, branch, hp_guard);
}

LatticeState gaussian_packet(double k, double amplitude, double width, double center,
                             const ModelParams& params, Branch branch) {
  params.validate();
  if (!(width > 0.0)) throw InvalidArgument("packet width must be > 0");
  const double ratio = branch_ratio(k, params, branch);
  LatticeState s = LatticeState::zeros(params.sites);
  for (int l = 0; l < params.sites; ++l) {
    const double x = l * params.spacing;
    const double u = (x - center) / width;
    s.alpha[l] = std::polar(amplitude * std::exp(-0.5 * u * u), k * x);
    s.beta[l] = ratio * s.alpha[l];
  }
  return s;
}

LatticeState superpose(const LatticeState& a, const LatticeState& b) {
  if (a.sites() != b.sites() || a.beta.size() != b.beta.size())
    throw ShapeMismatch("cannot superpose states of different size");
  LatticeState s = a;
  for (std::size_t l = 0; l < s.alpha.size(); ++l) {
    s.alpha[l] += b.alpha[l];
    s.beta[l] += b.beta[l];
  }
  return s;
}

}  // namespace cavsol
