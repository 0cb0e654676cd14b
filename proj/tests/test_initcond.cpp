#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cavsol/errors.hpp"
#include "cavsol/initcond.hpp"

namespace cavsol {
namespace {

ModelParams chain(int sites) {
  ModelParams p;
  p.sites = sites;
  p.hopping = 1.0;
  p.coupling = 1.0;
  p.atoms = 10;
  return p;
}

TEST(BranchRatio, ZoneCenterReference) {
  // g / w+ at k = 0 for J = 1, Omega = 1, N = 10, to 18 digits.
  EXPECT_NEAR(branch_ratio(0.0, chain(4), Branch::optical), 1.36503661418698948, 1e-14);
  EXPECT_LT(branch_ratio(0.0, chain(4), Branch::acoustic), 0.0);
}

TEST(BranchRatio, UncoupledPhotonAndAtomicBranches) {
  auto p = chain(4);
  p.coupling = 0.0;
  // cos(kd) > 0: the lower branch is the photon band -2J cos(kd).
  EXPECT_EQ(branch_ratio(0.3, p, Branch::acoustic), 0.0);
  EXPECT_THROW(branch_ratio(0.3, p, Branch::optical), SingularCarrier);
  EXPECT_EQ(branch_ratio(2.5, p, Branch::optical), 0.0);
  EXPECT_THROW(branch_ratio(2.5, p, Branch::acoustic), SingularCarrier);
}

TEST(BranchRatio, IsLinearEigenvector) {
  // The coupled 2x2 block [[-2J cos k, g], [g, 0]] maps (1, r) to w (1, r).
  const auto p = chain(4);
  const double g = p.collective_coupling();
  for (auto b : {Branch::optical, Branch::acoustic}) {
    for (double k : {0.0, 0.4, 1.3, 2.9}) {
      const double r = branch_ratio(k, p, b);
      const double w = dispersion_discrete(k, p, b).omega;
      EXPECT_NEAR(-2.0 * p.hopping * std::cos(k) + g * r, w, 1e-12);
      EXPECT_NEAR(g, w * r, 1e-12);
    }
  }
}

TEST(PlaneWave, Layout) {
  const auto p = chain(8);
  const auto s = plane_wave(0.5, 0.2, Branch::optical, p);
  ASSERT_EQ(s.sites(), 8);
  EXPECT_EQ(s.t, 0.0);
  const double r = branch_ratio(0.5, p, Branch::optical);
  for (int l = 0; l < 8; ++l) {
    EXPECT_NEAR(std::abs(s.alpha[l] - std::polar(0.2, 0.5 * l)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.beta[l] - r * s.alpha[l]), 0.0, 1e-15);
  }
}

TEST(Soliton, AmplitudeFormula) {
  const auto c = nls_coefficients(0.3, chain(4));
  EXPECT_DOUBLE_EQ(soliton_amplitude(c, 8.0), std::sqrt(2.0 * c.c1 / c.c2) / 8.0);
  EXPECT_THROW(soliton_amplitude(c, 0.0), InvalidArgument);
}

TEST(Soliton, ProfileAndCarrier) {
  auto p = chain(64);
  p.coupling = 10.0;
  SolitonSpec spec;
  spec.coeffs = nls_coefficients(0.3, p);
  const auto s = soliton_state(spec, p, 30.0, 6.0);
  const double amp = soliton_amplitude(spec.coeffs, 6.0);
  for (int l = 0; l < 64; ++l) {
    const double expect = amp / std::cosh((l - 30.0) / 6.0);
    EXPECT_NEAR(std::abs(s.alpha[l]), expect, 1e-15);
    EXPECT_NEAR(std::arg(s.alpha[l] * std::polar(1.0, -0.3 * l)), 0.0, 1e-12);
  }
}

TEST(Soliton, RejectsNarrowOrOverloadedPackets) {
  auto p = chain(64);
  SolitonSpec spec;
  spec.coeffs = nls_coefficients(0.3, p);
  EXPECT_THROW(soliton_state(spec, p, 30.0, kMinSolitonWidthSites - 0.5), InvalidArgument);
  p.atoms = 1;
  spec.coeffs = nls_coefficients(0.3, p);
  EXPECT_THROW(sech_packet(0.3, 2.0, 6.0, 30.0, p), HpViolation);
}

TEST(GaussianPacket, ProfileAndSuperposition) {
  const auto p = chain(40);
  const auto a = gaussian_packet(0.2, 0.1, 3.0, 10.0, p);
  EXPECT_NEAR(std::abs(a.alpha[10]), 0.1, 1e-15);
  EXPECT_NEAR(std::abs(a.alpha[13]), 0.1 * std::exp(-0.5), 1e-15);
  const auto b = gaussian_packet(-0.2, 0.1, 3.0, 30.0, p);
  const auto sum = superpose(a, b);
  for (int l = 0; l < 40; ++l) {
    EXPECT_EQ(sum.alpha[l], a.alpha[l] + b.alpha[l]);
    EXPECT_EQ(sum.beta[l], a.beta[l] + b.beta[l]);
  }
  EXPECT_THROW(superpose(a, LatticeState::zeros(3)), ShapeMismatch);
}

}  // namespace
}  // namespace cavsol
