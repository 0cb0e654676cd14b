#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cavsol/dynamics.hpp"
#include "cavsol/model.hpp"

namespace cavsol {

// Upper (optical) and lower (acoustic) solutions of
// omega^2 + 2 J c(k) omega - Omega^2 N = 0.
enum class Branch { optical, acoustic };

std::string_view to_string(Branch branch);
Branch parse_branch(std::string_view text);

struct DispersionPoint {
  double k = 0.0;
  Branch branch = Branch::optical;
  double omega = 0.0;
};

// Long-wavelength branches, c(k) = 1 - d^2 k^2 / 2.
DispersionPoint dispersion_continuous(double k, const ModelParams& params, Branch branch);

// Exact linear branches of the lattice, c(k) = cos(kd).
DispersionPoint dispersion_discrete(double k, const ModelParams& params, Branch branch);

// min over the zone of the optical branch minus max of the acoustic branch:
// 2 (sqrt(J^2 + Omega^2 N) - |J|).
double band_gap(const ModelParams& params);

// Vertical splitting at the zone edge, 2 sqrt(J^2 + Omega^2 N).
double zone_edge_splitting(const ModelParams& params);

// 2 k J d^2 w+^2 / (w+^2 + Omega^2 N) with w+ on the long-wavelength branch.
double group_velocity(double k, const ModelParams& params);

// Central difference of the long-wavelength optical branch.
double group_velocity_fd(double k, const ModelParams& params, double h = 1e-5);

// Exact slope of the lattice optical branch, d(omega~+)/dk.
double group_velocity_discrete(double k, const ModelParams& params);

// Coefficients of i e_t + c1 e_xx + c2 |e|^2 e = 0 for the envelope of the
// cavity field riding on an optical carrier at wavenumber k.
struct NLSCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double k = 0.0;
  double omega_plus = 0.0;
  double v_g = 0.0;
};

// Throws SingularCarrier when the optical frequency at k is not positive.
NLSCoefficients nls_coefficients(double k, const ModelParams& params);

struct SolitonSpec {
  double eta = 1.0;
  double sigma = 0.0;
  double nu = 0.0;
  double phi0 = 0.0;
  double mu = 1.0;
  NLSCoefficients coeffs;

  void validate() const;
};

// Bright soliton in scaled variables:
// eta sqrt(2c1/c2) sech(eta (chi - 2 c1 sigma t) - nu)
//   * exp(i [sigma chi - c1 (sigma^2 - eta^2) t + phi0]).
Complex soliton_envelope(double chi, double t, const SolitonSpec& spec);

struct SpectralPeak {
  double frequency = 0.0;  // angular, same sign convention as omega
  double power = 0.0;      // normalised so a unit phasor has power 1
};

struct Spectrum {
  std::vector<SpectralPeak> peaks;  // strongest first
  double resolution = 0.0;          // 2 pi / record length
};

// Hann-windowed, zero-padded DFT of a uniformly sampled signal. A component
// exp(-i w t) shows up at frequency +w. Peaks closer than two bins to a
// stronger one, or weaker than rel_threshold of the strongest, are dropped.
Spectrum measure_spectrum(std::span<const Complex> signal, double sample_dt,
                          std::size_t max_peaks = 4, double rel_threshold = 1e-2);

// Spectrum of alpha at one site over the uniformly spaced prefix of the
// trajectory. Throws TooShort below 16 samples.
Spectrum measure_spectrum(const Trajectory& trajectory, int site,
                          std::size_t max_peaks = 4, double rel_threshold = 1e-2);

// Half-open range of site indices.
struct SiteWindow {
  int first = 0;
  int last = 0;
};

// Intensity-weighted position sum(x_l |alpha_l|^2) / sum(|alpha_l|^2) with
// x_l = l d. Throws DegenerateField for an all-zero field.
double packet_center(const LatticeState& state, double spacing = 1.0,
                     std::optional<SiteWindow> window = std::nullopt);

// rms spread of |alpha_l|^2 about the packet center.
double packet_width(const LatticeState& state, double spacing = 1.0,
                    std::optional<SiteWindow> window = std::nullopt);

// Participation width d (sum |alpha|^2)^2 / sum |alpha|^4.
double participation_width(const LatticeState& state, double spacing = 1.0,
                           std::optional<SiteWindow> window = std::nullopt);

struct SechFit {
  double amplitude = 0.0;
  double width = 0.0;
  double center = 0.0;
  double fit_error = 0.0;  // ||residual|| / ||data||
};

// Demodulates alpha by exp(-i k l d) and least-squares fits
// A sech((l d - x0) / w) to its modulus.
SechFit fit_sech(const LatticeState& state, double carrier_k, double spacing = 1.0,
                 std::optional<SiteWindow> window = std::nullopt);

// Same fit on raw samples of an envelope modulus at positions x.
SechFit fit_sech_profile(std::span<const double> x, std::span<const double> modulus);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace cavsol
