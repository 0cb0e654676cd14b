#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cavsol/errors.hpp"
#include "cavsol/model.hpp"
#include "test_support.hpp"

namespace cavsol {
namespace {

TEST(HpCoefficient, LeadingTerms) {
  EXPECT_EQ(hp_coefficient(0), Rational(1));
  EXPECT_EQ(hp_coefficient(1), Rational(-1, 2));
  EXPECT_EQ(hp_coefficient(2), Rational(-1, 8));
  EXPECT_EQ(hp_coefficient(3), Rational(-1, 16));
  EXPECT_EQ(hp_coefficient(4), Rational(-5, 128));
}

TEST(HpCoefficient, MatchesRepeatedDifferentiationThroughMaxOrder) {
  for (int l = 0; l <= kMaxHpOrder; ++l)
    EXPECT_EQ(hp_coefficient(l), testing::taylor_sqrt_one_minus(l)) << "l = " << l;
}

TEST(HpCoefficient, RejectsOrdersBeyondExactRange) {
  EXPECT_THROW(hp_coefficient(kMaxHpOrder + 1), OrderOverflow);
  EXPECT_THROW(hp_coefficient(-1), InvalidArgument);
  EXPECT_THROW(hp_series(13), OrderOverflow);
}

TEST(HpSeries, ConvergesToSquareRoot) {
  const auto series = hp_series(kMaxHpOrder);
  ASSERT_EQ(series.coeffs.size(), 13u);
  for (double x : {0.0, 0.01, 0.05, 0.1}) {
    // Remainder is bounded by the first omitted term.
    const double bound = std::abs(boost::rational_cast<double>(testing::taylor_sqrt_one_minus(13))) *
                         std::pow(x, 13) * 2.0;
    EXPECT_NEAR(series.value(x), std::sqrt(1.0 - x), bound + 4e-16);
    EXPECT_NEAR(series.derivative(x), -0.5 / std::sqrt(1.0 - x), 1e-9);
  }
}

TEST(ModelParams, Validation) {
  ModelParams p;
  EXPECT_NO_THROW(p.validate());
  p.sites = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.hopping = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.spacing = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.hp_order = 13;
  EXPECT_THROW(p.validate(), OrderOverflow);
  p = {};
  p.hp_order = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  EXPECT_EQ(parse_boundary("open"), Boundary::open);
  EXPECT_THROW(parse_boundary("twisted"), InvalidArgument);
}

ModelParams small_params() {
  ModelParams p;
  p.sites = 2;
  p.atoms = 10;
  p.hopping = 1.0;
  p.coupling = 1.0;
  return p;
}

TEST(Energy, VacuumAndNoCouplingLimits) {
  ModelParams p = small_params();
  EXPECT_EQ(energy(LatticeState::zeros(2), p), 0.0);

  p.hopping = 0.0;
  LatticeState s = LatticeState::zeros(2);
  s.alpha = {{0.3, -0.7}, {1.1, 0.2}};
  EXPECT_EQ(energy(s, p), 0.0);
}

TEST(Energy, HandEvaluatedExamples) {
  const ModelParams p = small_params();
  LatticeState s = LatticeState::zeros(2);
  s.alpha = {{1.0, 0.0}, {0.0, 0.0}};
  s.beta = {{0.0, 0.0}, {1.0, 0.0}};
  // alpha_2 = 0 kills the hopping term and both coupling terms.
  EXPECT_DOUBLE_EQ(energy(s, p), 0.0);

  s.alpha = {{0.5, 0.2}, {0.0, -0.3}};
  s.beta = {{0.4, 0.0}, {0.1, 0.2}};
  // Independent 30-digit evaluation of the three-term sum.
  EXPECT_NEAR(energy(s, p), 1.11626713963265797897, 1e-14);
  EXPECT_NEAR(energy(s, p), testing::energy_order_one(s, p), 1e-14);
}

TEST(Energy, ShapeMismatchIsReported) {
  const ModelParams p = small_params();
  EXPECT_THROW(energy(LatticeState::zeros(3), p), ShapeMismatch);
}

TEST(EomRhs, VacuumIsFixedPoint) {
  const auto d = eom_rhs(LatticeState::zeros(4), [] {
    ModelParams p;
    p.sites = 4;
    return p;
  }());
  for (const auto& v : d.alpha) EXPECT_EQ(v, Complex{});
  for (const auto& v : d.beta) EXPECT_EQ(v, Complex{});
}

TEST(EomRhs, PureHoppingLimit) {
  ModelParams p;
  p.sites = 6;
  p.coupling = 0.0;
  p.hopping = 0.7;
  LatticeState s = LatticeState::zeros(6);
  const int m = 2;
  s.alpha[m] = 1.0;
  const auto d = eom_rhs(s, p);
  for (int l = 0; l < 6; ++l) {
    const double expect = (l == m - 1 || l == m + 1) ? p.hopping : 0.0;
    EXPECT_NEAR(d.alpha[l].real(), 0.0, 1e-15);
    EXPECT_NEAR(d.alpha[l].imag(), expect, 1e-15) << l;
    EXPECT_EQ(d.beta[l], Complex{});
  }
}

TEST(EomRhs, SingleSiteOrderOne) {
  ModelParams p;
  p.sites = 1;
  p.hopping = 0.0;
  p.coupling = 1.3;
  p.atoms = 10;
  LatticeState s = LatticeState::zeros(1);
  s.alpha[0] = 1.0;
  s.beta[0] = 0.3;
  const auto d = eom_rhs(s, p);
  const double n = p.atoms;
  const double expected =
      p.coupling * std::sqrt(n) - p.coupling / (2.0 * std::sqrt(n)) * (2.0 * 0.09 + 0.09);
  EXPECT_NEAR(d.beta[0].real(), 0.0, 1e-15);
  EXPECT_NEAR(d.beta[0].imag(), -expected, 1e-14);
}

// dz/dt = -i dE/dz* with dE/dz* = (dE/dx + i dE/dy) / 2.
LatticeDerivative fd_gradient_flow(const LatticeModel& model, LatticeState s, double h) {
  LatticeDerivative out;
  const int m = s.sites();
  out.alpha.resize(m);
  out.beta.resize(m);
  auto partial = [&](Complex& z) {
    const Complex z0 = z;
    z = z0 + h;
    const double exp = model.energy(s);
    z = z0 - h;
    const double exm = model.energy(s);
    z = z0 + Complex{0.0, h};
    const double eyp = model.energy(s);
    z = z0 - Complex{0.0, h};
    const double eym = model.energy(s);
    z = z0;
    const Complex grad{(exp - exm) / (2.0 * h), (eyp - eym) / (2.0 * h)};
    return Complex{0.0, -1.0} * 0.5 * grad;
  };
  for (int l = 0; l < m; ++l) {
    out.alpha[l] = partial(s.alpha[l]);
    out.beta[l] = partial(s.beta[l]);
  }
  return out;
}

TEST(EomRhs, MatchesFiniteDifferenceGradientOfEnergy) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> sites(1, 8), order(1, 4), atoms(2, 40);
  std::uniform_real_distribution<double> rate(0.0, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    ModelParams p;
    p.sites = sites(rng);
    p.hp_order = order(rng);
    p.atoms = atoms(rng);
    p.hopping = rate(rng);
    p.coupling = rate(rng);
    p.boundary = trial % 2 ? Boundary::open : Boundary::periodic;
    const LatticeModel model(p);
    const auto s = testing::random_state(rng, p.sites, 1.0, p.atoms, 0.4);
    const auto exact = model.rhs(s);
    const auto fd = fd_gradient_flow(model, s, 1e-5);
    double scale = 0.0;
    for (int l = 0; l < p.sites; ++l)
      scale = std::max({scale, std::abs(exact.alpha[l]), std::abs(exact.beta[l])});
    for (int l = 0; l < p.sites; ++l) {
      EXPECT_LE(std::abs(exact.alpha[l] - fd.alpha[l]), 1e-6 * scale) << trial;
      EXPECT_LE(std::abs(exact.beta[l] - fd.beta[l]), 1e-6 * scale) << trial;
    }
  }
}

TEST(EomRhs, OrderOneReproducesSemiclassicalEquations) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p;
    p.sites = 2 + trial % 7;
    p.atoms = 3 + trial;
    p.hopping = 0.3 + 0.1 * trial;
    p.coupling = 2.0;
    p.boundary = trial % 3 ? Boundary::periodic : Boundary::open;
    const auto s = testing::random_state(rng, p.sites, 1.5, p.atoms, 0.5);
    const auto general = eom_rhs(s, p);
    const auto closed = testing::rhs_order_one(s, p);
    for (int l = 0; l < p.sites; ++l) {
      EXPECT_NEAR(std::abs(general.alpha[l] - closed.alpha[l]), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(general.beta[l] - closed.beta[l]), 0.0, 1e-13);
    }
  }
}

TEST(Energy, GlobalPhaseInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  ModelParams p;
  p.sites = 7;
  p.hp_order = 4;
  p.atoms = 12;
  for (int trial = 0; trial < 10; ++trial) {
    auto s = testing::random_state(rng, p.sites, 1.0, p.atoms, 0.5);
    const double e0 = energy(s, p);
    const Complex rot = std::polar(1.0, angle(rng));
    for (auto& a : s.alpha) a *= rot;
    for (auto& b : s.beta) b *= rot;
    EXPECT_NEAR(energy(s, p), e0, 1e-12 * std::max(1.0, std::abs(e0)));
  }
}

TEST(TotalNorm, Basics) {
  EXPECT_EQ(total_norm(LatticeState::zeros(5)), 0.0);
  auto s = LatticeState::zeros(5);
  s.alpha[0] = 1.0;
  EXPECT_EQ(total_norm(s), 1.0);
  s.beta[3] = {0.0, 2.0};
  EXPECT_EQ(total_norm(s), 5.0);
  EXPECT_DOUBLE_EQ(hp_load(s, 8), 0.5);
}

TEST(LatticeModel, LinearizedDropsSeries) {
  ModelParams p;
  p.hp_order = 3;
  const LatticeModel lin(p, Nonlinearity::linearized);
  EXPECT_EQ(lin.envelope(0.4), 1.0);
  EXPECT_EQ(lin.envelope_slope(0.4), 0.0);
  const LatticeModel full(p);
  EXPECT_LT(full.envelope(0.4), 1.0);
  EXPECT_DOUBLE_EQ(full.max_frequency(0.5), 2.0 + p.collective_coupling());
}

}  // namespace
}  // namespace cavsol
