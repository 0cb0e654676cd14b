#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace cavsol {

using Complex = std::complex<double>;
using Rational = boost::rational<std::int64_t>;

enum class Boundary { periodic, open };

std::string_view to_string(Boundary boundary);
Boundary parse_boundary(std::string_view text);

// Largest truncation order of the square-root series whose coefficients stay
// exact in 64-bit rationals.
inline constexpr int kMaxHpOrder = 12;

// Physical constants of a homogeneous cavity array. Rates are in units of the
// hopping J when J = 1 (the default), time in 1/J, lengths in units of d.
struct ModelParams {
  int sites = 2;          // M
  int atoms = 10;         // N, atoms per ensemble
  double hopping = 1.0;   // J
  double coupling = 10.0; // Omega, single-atom coupling
  double spacing = 1.0;   // d
  int hp_order = 1;       // L, truncation order of the sqrt(1 - x) series
  Boundary boundary = Boundary::periodic;

  // Throws InvalidArgument when any invariant is broken. A single site is
  // accepted and simply has no hopping.
  void validate() const;

  // Collectively enhanced coupling Omega * sqrt(N).
  double collective_coupling() const;
};

// Truncated power series of sqrt(1 - x) with exact rational coefficients.
struct HPSeries {
  int order = 0;
  std::vector<Rational> coeffs;

  double value(double x) const;
  double derivative(double x) const;
};

// Coefficient of x^l in sqrt(1 - x): (2l)! / [(1 - 2l) (2^l l!)^2].
// Throws OrderOverflow for l > kMaxHpOrder, InvalidArgument for l < 0.
Rational hp_coefficient(int l);

HPSeries hp_series(int order);

// Classical amplitudes of the cavity modes (alpha) and of the ensemble
// bosons (beta) on every site.
struct LatticeState {
  double t = 0.0;
  std::vector<Complex> alpha;
  std::vector<Complex> beta;

  static LatticeState zeros(int sites);
  int sites() const { return static_cast<int>(alpha.size()); }
};

struct LatticeDerivative {
  std::vector<Complex> alpha;
  std::vector<Complex> beta;
};

enum class Nonlinearity {
  full,       // truncated sqrt series at order L
  linearized, // series replaced by its leading term 1
};

// Evaluates the energy functional and its complex gradient flow for one
// parameter set. Immutable after construction.
class LatticeModel {
 public:
  explicit LatticeModel(ModelParams params,
                        Nonlinearity nonlinearity = Nonlinearity::full);

  const ModelParams& params() const { return params_; }
  Nonlinearity nonlinearity() const { return nonlinearity_; }

  double energy(const LatticeState& state) const;

  // Writes d(alpha)/dt and d(beta)/dt. All spans have length M.
  void rhs(std::span<const Complex> alpha, std::span<const Complex> beta,
           std::span<Complex> dalpha, std::span<Complex> dbeta) const;
  LatticeDerivative rhs(const LatticeState& state) const;

  // Truncated series and its derivative at x = |beta|^2 / N.
  double envelope(double x) const;
  double envelope_slope(double x) const;

  // Fastest linear frequency reachable while |beta|^2/N stays below
  // max_load: 2|J| + Omega sqrt(N) max|A(x)|.
  double max_frequency(double max_load) const;

 private:
  void check_shape(const LatticeState& state) const;

  ModelParams params_;
  Nonlinearity nonlinearity_;
  std::vector<double> coeffs_;
  double g_;
};

double energy(const LatticeState& state, const ModelParams& params);
LatticeDerivative eom_rhs(const LatticeState& state, const ModelParams& params);

// Sum of |alpha_l|^2 + |beta_l|^2, the U(1) charge.
double total_norm(const LatticeState& state);

// max_l |beta_l|^2 / N.
double hp_load(const LatticeState& state, int atoms);

}  // namespace cavsol
