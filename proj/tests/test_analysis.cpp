#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cavsol/analysis.hpp"
#include "cavsol/errors.hpp"
#include "cavsol/initcond.hpp"
#include "test_support.hpp"

namespace cavsol {
namespace {

ModelParams params(double j, double omega, int atoms) {
  ModelParams p;
  p.hopping = j;
  p.coupling = omega;
  p.atoms = atoms;
  return p;
}

TEST(Dispersion, UncoupledChainAtZoneCenter) {
  const auto p = params(1.0, 0.0, 10);
  EXPECT_DOUBLE_EQ(dispersion_continuous(0.0, p, Branch::optical).omega, 0.0);
  EXPECT_DOUBLE_EQ(dispersion_continuous(0.0, p, Branch::acoustic).omega, -2.0);
}

TEST(Dispersion, ReferenceValues) {
  const auto p = params(1.0, 1.0, 10);
  EXPECT_NEAR(dispersion_continuous(0.0, p, Branch::optical).omega, 2.3166247903553998, 1e-14);
  EXPECT_NEAR(dispersion_continuous(0.0, p, Branch::acoustic).omega, -4.3166247903553998, 1e-14);
  EXPECT_NEAR(dispersion_discrete(1.0, p, Branch::optical).omega, 2.6678009626889105, 1e-14);
  const double half_pi = std::numbers::pi / 2.0;
  EXPECT_NEAR(dispersion_discrete(half_pi, p, Branch::optical).omega, std::sqrt(10.0), 1e-14);
  EXPECT_NEAR(dispersion_discrete(half_pi, p, Branch::acoustic).omega, -std::sqrt(10.0), 1e-14);
}

TEST(Dispersion, LongWavelengthAgreement) {
  const auto p = params(1.0, 1.0, 10);
  for (auto b : {Branch::optical, Branch::acoustic}) {
    const double wc = dispersion_continuous(1e-2, p, b).omega;
    const double wd = dispersion_discrete(1e-2, p, b).omega;
    EXPECT_LE(std::abs(wc - wd), 1e-6 * std::abs(wd));
  }
  // |w - w~| / (kd)^4 stays bounded as kd -> 0.
  double worst = 0.0;
  for (double kd = 0.3; kd > 1e-3; kd *= 0.7) {
    const double diff = std::abs(dispersion_continuous(kd, p, Branch::optical).omega -
                                 dispersion_discrete(kd, p, Branch::optical).omega);
    worst = std::max(worst, diff / std::pow(kd, 4));
  }
  EXPECT_LT(worst, 1.0);
}

TEST(Dispersion, BranchProductIdentity) {
  for (const auto& p : {params(1.0, 10.0, 10), params(0.4, 1.3, 3), params(2.0, 0.2, 40)}) {
    const double target = -p.coupling * p.coupling * p.atoms;
    for (int i = 0; i < 100; ++i) {
      const double k = -std::numbers::pi + 2.0 * std::numbers::pi * i / 99.0;
      const double prod = dispersion_discrete(k, p, Branch::optical).omega *
                          dispersion_discrete(k, p, Branch::acoustic).omega;
      EXPECT_NEAR(prod, target, 1e-12 * std::abs(target));
    }
  }
}

TEST(Dispersion, DiscreteBranchIsZonePeriodic) {
  auto p = params(1.0, 2.0, 5);
  p.spacing = 0.5;
  const double period = 2.0 * std::numbers::pi / p.spacing;
  EXPECT_NEAR(dispersion_discrete(0.7, p, Branch::optical).omega,
              dispersion_discrete(0.7 + period, p, Branch::optical).omega, 1e-12);
}

TEST(BandGap, Limits) {
  EXPECT_DOUBLE_EQ(band_gap(params(1.0, 0.0, 10)), 0.0);
  EXPECT_DOUBLE_EQ(band_gap(params(0.0, 1.0, 10)), 2.0 * std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(zone_edge_splitting(params(1.0, 1.0, 10)), 2.0 * std::sqrt(11.0));
}

TEST(BandGap, MatchesDenseZoneScan) {
  for (const auto& p : {params(1.0, 1.0, 10), params(1.0, 10.0, 10), params(3.0, 0.5, 2)}) {
    double min_plus = 1e300, max_minus = -1e300;
    for (int i = 0; i <= 20000; ++i) {
      const double k = std::numbers::pi * i / 20000.0;
      min_plus = std::min(min_plus, dispersion_discrete(k, p, Branch::optical).omega);
      max_minus = std::max(max_minus, dispersion_discrete(k, p, Branch::acoustic).omega);
    }
    EXPECT_NEAR(band_gap(p), min_plus - max_minus, 1e-12);
    EXPECT_GT(band_gap(p), 0.0);
  }
}

TEST(GroupVelocity, OddInK) {
  const auto p = params(1.0, 1.0, 10);
  EXPECT_EQ(group_velocity(0.0, p), 0.0);
  for (double k : {0.1, 0.3, 0.9})
    EXPECT_DOUBLE_EQ(group_velocity(-k, p), -group_velocity(k, p));
}

TEST(GroupVelocity, ClosedFormAgainstFiniteDifference) {
  const auto p = params(1.0, 1.0, 10);
  const double v = group_velocity(0.3, p);
  EXPECT_LE(std::abs(v - group_velocity_fd(0.3, p)), 1e-2 * std::abs(v));
  for (const auto& q : {params(1.0, 10.0, 10), params(0.5, 2.0, 4)}) {
    for (double kd = 0.05; kd <= 0.5; kd += 0.05) {
      const double vc = group_velocity(kd, q);
      EXPECT_LE(std::abs(vc - group_velocity_fd(kd, q)), 1e-2 * std::abs(vc));
    }
  }
}

TEST(GroupVelocity, DiscreteSlope) {
  const auto p = params(1.0, 10.0, 10);
  for (double k : {0.1, 0.3, 1.0, 2.0}) {
    const double h = 1e-5;
    const double fd = (dispersion_discrete(k + h, p, Branch::optical).omega -
                       dispersion_discrete(k - h, p, Branch::optical).omega) /
                      (2.0 * h);
    EXPECT_NEAR(group_velocity_discrete(k, p), fd, 1e-8);
  }
}

TEST(NlsCoefficients, UncoupledHasNoNonlinearity) {
  const auto p = params(1.0, 0.0, 10);
  // Below kd = sqrt(2) the uncoupled optical branch sits at zero frequency.
  EXPECT_THROW(nls_coefficients(0.3, p), SingularCarrier);
  const auto c = nls_coefficients(2.0, p);
  EXPECT_EQ(c.c2, 0.0);
}

TEST(NlsCoefficients, FocusingAcrossFirstHalfZone) {
  const auto p = params(1.0, 10.0, 10);
  for (double k = 0.01; k < std::numbers::pi / 2.0; k += 0.05) {
    const auto c = nls_coefficients(k, p);
    EXPECT_GT(c.c1, 0.0) << k;
    EXPECT_GT(c.c2, 0.0) << k;
  }
}

TEST(NlsCoefficients, ReferenceValues) {
  // 30-digit evaluation of the two formulas at J = 1, Omega = 1, N = 10.
  const auto c = nls_coefficients(0.2, params(1.0, 1.0, 10));
  EXPECT_NEAR(c.omega_plus, 2.33064948310750650509, 1e-13);
  EXPECT_NEAR(c.v_g, 0.140797115188399029689, 1e-14);
  EXPECT_NEAR(c.c1, 0.357504549124843531944, 1e-14);
  EXPECT_NEAR(c.c2, 0.556074361868435125961, 1e-14);
}

TEST(NlsCoefficients, SecondCoefficientScaling) {
  // Doubling Omega and J doubles w+ and keeps w+^2 / Omega^2 N fixed, so
  // c2 ~ Omega^4 / w+^3 doubles.
  const auto a = nls_coefficients(0.4, params(1.0, 3.0, 7));
  const auto b = nls_coefficients(0.4, params(2.0, 6.0, 7));
  EXPECT_NEAR(b.omega_plus / a.omega_plus, 2.0, 1e-12);
  EXPECT_NEAR(b.c2 / a.c2, 2.0, 1e-12);
}

SolitonSpec reference_spec(double eta, double sigma) {
  SolitonSpec s;
  s.eta = eta;
  s.sigma = sigma;
  s.nu = 0.3;
  s.phi0 = 0.2;
  s.coeffs = nls_coefficients(0.3, params(1.0, 10.0, 10));
  return s;
}

TEST(SolitonEnvelope, PeakAndSymmetry) {
  auto s = reference_spec(0.8, 0.0);
  s.nu = 0.0;
  s.phi0 = 0.0;
  const double peak = 0.8 * std::sqrt(2.0 * s.coeffs.c1 / s.coeffs.c2);
  EXPECT_NEAR(std::abs(soliton_envelope(0.0, 0.0, s)), peak, 1e-15);
  for (double chi : {0.3, 1.7, 4.0})
    EXPECT_NEAR(std::abs(soliton_envelope(chi, 0.4, s)), std::abs(soliton_envelope(-chi, 0.4, s)),
                1e-15);
}

// Finite-difference substitution into i e_t + c1 e_xx + c2 |e|^2 e.
double nls_residual_with(const SolitonSpec& s, const NLSCoefficients& eq) {
  const double dx = 1e-3, dt = 1e-4;
  const double c1 = eq.c1, c2 = eq.c2;
  double worst = 0.0;
  for (double t : {0.0, 0.7}) {
    const double center = 2.0 * s.coeffs.c1 * s.sigma * t + s.nu / s.eta;
    for (double chi = center - 8.0 / s.eta; chi <= center + 8.0 / s.eta; chi += 0.01) {
      const Complex e = soliton_envelope(chi, t, s);
      const Complex et =
          (soliton_envelope(chi, t + dt, s) - soliton_envelope(chi, t - dt, s)) / (2.0 * dt);
      const Complex exx = (soliton_envelope(chi + dx, t, s) - 2.0 * e +
                           soliton_envelope(chi - dx, t, s)) /
                          (dx * dx);
      const Complex r = Complex{0.0, 1.0} * et + c1 * exx + c2 * std::norm(e) * e;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

double nls_residual(const SolitonSpec& s) { return nls_residual_with(s, s.coeffs); }

TEST(SolitonEnvelope, SatisfiesEnvelopeEquation) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> eta(0.3, 1.5), sigma(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = reference_spec(eta(rng), sigma(rng));
    // Peak scale of each term: c1 eta^2 |e|_max, with |e|_max the amplitude.
    const double amp = s.eta * std::sqrt(2.0 * s.coeffs.c1 / s.coeffs.c2);
    const double scale = amp * s.coeffs.c1 * (s.eta * s.eta + s.sigma * s.sigma);
    EXPECT_LE(nls_residual(s), 1e-4 * scale) << trial;
  }
}

TEST(SolitonEnvelope, WrongPhaseSignFailsResidual) {
  const auto s = reference_spec(1.0, 0.5);
  // Same modulus, phase rotating the other way.
  SolitonSpec bad = s;
  bad.coeffs.c1 = -s.coeffs.c1;
  bad.coeffs.c2 = -s.coeffs.c2;
  EXPECT_GT(nls_residual_with(bad, s.coeffs), 100.0 * nls_residual(s));
}

TEST(SolitonEnvelope, Validation) {
  auto s = reference_spec(1.0, 0.0);
  EXPECT_NO_THROW(s.validate());
  s.eta = 0.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

std::vector<Complex> tones(const std::vector<std::pair<double, double>>& parts, double dt, int n) {
  std::vector<Complex> out(n);
  for (int i = 0; i < n; ++i)
    for (const auto& [w, a] : parts) out[i] += a * std::polar(1.0, -w * dt * i);
  return out;
}

TEST(Spectrum, SingleToneAtPositiveFrequency) {
  const double dt = 0.05;
  const auto sig = tones({{2.3, 1.0}}, dt, 4096);
  const auto sp = measure_spectrum(sig, dt);
  ASSERT_FALSE(sp.peaks.empty());
  EXPECT_NEAR(sp.peaks[0].frequency, 2.3, 1e-3);
  EXPECT_NEAR(sp.resolution, 2.0 * std::numbers::pi / (4096 * dt), 1e-12);
}

TEST(Spectrum, TwoTonesResolvedAndOrdered) {
  const double dt = 0.02;
  const auto sig = tones({{4.0, 0.3}, {-3.0, 1.0}}, dt, 8192);
  const auto sp = measure_spectrum(sig, dt);
  ASSERT_GE(sp.peaks.size(), 2u);
  EXPECT_NEAR(sp.peaks[0].frequency, -3.0, 1e-3);
  EXPECT_NEAR(sp.peaks[1].frequency, 4.0, 1e-3);
  EXPECT_NEAR(sp.peaks[1].power / sp.peaks[0].power, 0.09, 0.01);
}

TEST(Spectrum, TrajectoryOverloadRejectsShortRecords) {
  ModelParams p;
  p.sites = 2;
  IntegratorConfig c;
  c.dt = 1e-3;
  c.t_end = 0.005;
  const auto traj = integrate(plane_wave(0.0, 0.1, Branch::optical, p), p, c);
  EXPECT_THROW(measure_spectrum(traj, 0), TooShort);
}

TEST(PacketMeasures, SymmetricProfile) {
  LatticeState s = LatticeState::zeros(21);
  for (int l = 0; l < 21; ++l) s.alpha[l] = std::exp(-0.1 * (l - 10) * (l - 10));
  EXPECT_NEAR(packet_center(s), 10.0, 1e-12);
  EXPECT_NEAR(packet_center(s, 0.5), 5.0, 1e-12);
  EXPECT_NEAR(packet_width(s, 2.0), 2.0 * packet_width(s), 1e-12);
  // |alpha|^2 Gaussian with variance 1/(0.4): rms = sqrt(2.5).
  EXPECT_NEAR(packet_width(s), std::sqrt(2.5), 1e-6);
  EXPECT_NEAR(participation_width(s), std::sqrt(2.0 * std::numbers::pi * 2.5) * std::sqrt(2.0),
              1e-6);
  EXPECT_THROW(packet_center(LatticeState::zeros(4)), DegenerateField);
  EXPECT_LT(packet_center(s, 1.0, SiteWindow{0, 10}), 10.0);
}

TEST(SechFitTest, RecoversSyntheticProfile) {
  ModelParams p;
  p.sites = 200;
  const auto s = sech_packet(0.3, 0.07, 8.0, 97.3, p);
  const auto fit = fit_sech(s, 0.3);
  EXPECT_NEAR(fit.amplitude, 0.07, 0.01 * 0.07);
  EXPECT_NEAR(fit.width, 8.0, 0.01 * 8.0);
  EXPECT_NEAR(fit.center, 97.3, 0.05);
  EXPECT_LE(fit.fit_error, 1e-3);
}

TEST(SechFitTest, GaussianIsDistinguishable) {
  ModelParams p;
  p.sites = 200;
  const auto s = gaussian_packet(0.3, 0.07, 8.0, 100.0, p);
  EXPECT_GT(fit_sech(s, 0.3).fit_error, 1e-2);
}

TEST(Spearman, Basics) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 4, 8, 16, 32};
  const std::vector<double> c{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(a, b), 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, c), -1.0);
  const std::vector<double> ties{1, 1, 2, 2, 3};
  EXPECT_NEAR(spearman(a, ties), 0.9486832980505138, 1e-12);
  EXPECT_THROW(spearman(a, std::vector<double>{1, 2}), ShapeMismatch);
}

}  // namespace
}  // namespace cavsol
