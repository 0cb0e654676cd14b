#include "cavsol/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cavsol/errors.hpp"

namespace cavsol {

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::periodic ? "periodic" : "open";
}

Boundary parse_boundary(std::string_view text) {
  if (text == "periodic") return Boundary::periodic;
  if (text == "open") return Boundary::open;
  throw InvalidArgument("unknown boundary rule '" + std::string(text) +
                        "' (expected periodic or open)");
}

void ModelParams::validate() const {
  if (sites < 1) throw InvalidArgument("sites must be >= 1");
  if (atoms < 1) throw InvalidArgument("atoms must be >= 1");
  if (!(hopping >= 0.0) || !std::isfinite(hopping))
    throw InvalidArgument("hopping must be finite and >= 0");
  if (!(coupling >= 0.0) || !std::isfinite(coupling))
    throw InvalidArgument("coupling must be finite and >= 0");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw InvalidArgument("spacing must be finite and > 0");
  if (hp_order < 1) throw InvalidArgument("hp_order must be >= 1");
  if (hp_order > kMaxHpOrder)
    throw OrderOverflow("hp_order " + std::to_string(hp_order) +
                        " exceeds the exact-rational limit " +
                        std::to_string(kMaxHpOrder));
}

double ModelParams::collective_coupling() const {
  return coupling * std::sqrt(static_cast<double>(atoms));
}

Rational hp_coefficient(int l) {
  if (l < 0) throw InvalidArgument("series index must be non-negative");
  if (l > kMaxHpOrder)
    throw OrderOverflow("series index " + std::to_string(l) + " exceeds " +
                        std::to_string(kMaxHpOrder));
  // (2l)! / (l!)^2 is the central binomial coefficient, so the coefficient
  // reduces to C(2l, l) / [(1 - 2l) 4^l] without forming the factorials.
  std::int64_t central = 1;
  for (std::int64_t i = 1; i <= l; ++i) central = central * (l + i) / i;
  const std::int64_t four_pow = std::int64_t{1} << (2 * l);
  return Rational(central, (1 - 2 * std::int64_t{l}) * four_pow);
}

HPSeries hp_series(int order) {
  if (order < 0) throw InvalidArgument("series order must be non-negative");
  HPSeries series;
  series.order = order;
  series.coeffs.reserve(order + 1);
  for (int l = 0; l <= order; ++l) series.coeffs.push_back(hp_coefficient(l));
  return series;
}

double HPSeries::value(double x) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    acc = acc * x + boost::rational_cast<double>(*it);
  return acc;
}

double HPSeries::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t l = coeffs.size(); l-- > 1;)
    acc = acc * x + static_cast<double>(l) * boost::rational_cast<double>(coeffs[l]);
  return acc;
}

LatticeState LatticeState::zeros(int sites) {
  LatticeState state;
  state.alpha.assign(sites, Complex{});
  state.beta.assign(sites, Complex{});
  return state;
}

LatticeModel::LatticeModel(ModelParams params, Nonlinearity nonlinearity)
    : params_(params), nonlinearity_(nonlinearity) {
  params_.validate();
  if (nonlinearity_ == Nonlinearity::full) {
    for (const auto& c : hp_series(params_.hp_order).coeffs)
      coeffs_.push_back(boost::rational_cast<double>(c));
  } else {
    coeffs_ = {1.0};
  }
  g_ = params_.collective_coupling();
}

double LatticeModel::envelope(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double LatticeModel::envelope_slope(double x) const {
  double acc = 0.0;
  for (std::size_t l = coeffs_.size(); l-- > 1;)
    acc = acc * x + static_cast<double>(l) * coeffs_[l];
  return acc;
}

double LatticeModel::max_frequency(double max_load) const {
  double peak = 0.0;
  constexpr int kSamples = 256;
  for (int i = 0; i <= kSamples; ++i) {
    const double x = max_load * i / kSamples;
    peak = std::max(peak, std::abs(envelope(x)));
  }
  return 2.0 * std::abs(params_.hopping) + g_ * peak;
}

void LatticeModel::check_shape(const LatticeState& state) const {
  if (state.alpha.size() != static_cast<std::size_t>(params_.sites) ||
      state.beta.size() != static_cast<std::size_t>(params_.sites))
    throw ShapeMismatch("state has " + std::to_string(state.alpha.size()) + "/" +
                        std::to_string(state.beta.size()) +
                        " sites, model expects " + std::to_string(params_.sites));
}

double LatticeModel::energy(const LatticeState& state) const {
  check_shape(state);
  const int m = params_.sites;
  const double inv_n = 1.0 / params_.atoms;
  double hop = 0.0;
  if (m > 1) {
    const int bonds = params_.boundary == Boundary::periodic ? m : m - 1;
    for (int l = 0; l < bonds; ++l) {
      const int r = (l + 1) % m;
      hop += std::real(std::conj(state.alpha[l]) * state.alpha[r]);
    }
  }
  double couple = 0.0;
  for (int l = 0; l < m; ++l) {
    const double x = std::norm(state.beta[l]) * inv_n;
    couple += envelope(x) * std::real(std::conj(state.beta[l]) * state.alpha[l]);
  }
  return -2.0 * params_.hopping * hop + 2.0 * g_ * couple;
}

void LatticeModel::rhs(std::span<const Complex> alpha, std::span<const Complex> beta,
                       std::span<Complex> dalpha, std::span<Complex> dbeta) const {
  const int m = params_.sites;
  const double j = params_.hopping;
  const double inv_n = 1.0 / params_.atoms;
  const bool periodic = params_.boundary == Boundary::periodic;
  const Complex minus_i{0.0, -1.0};

  for (int l = 0; l < m; ++l) {
    Complex neighbours{};
    if (m > 1) {
      if (l + 1 < m) neighbours += alpha[l + 1];
      else if (periodic) neighbours += alpha[0];
      if (l > 0) neighbours += alpha[l - 1];
      else if (periodic) neighbours += alpha[m - 1];
    }
    const Complex b = beta[l];
    const Complex a = alpha[l];
    const double x = std::norm(b) * inv_n;
    const double env = envelope(x);
    const double slope = envelope_slope(x);
    dalpha[l] = minus_i * (-j * neighbours + g_ * env * b);
    dbeta[l] = minus_i * g_ * ((env + x * slope) * a + (b * b * inv_n) * slope * std::conj(a));
  }
}

LatticeDerivative LatticeModel::rhs(const LatticeState& state) const {
  check_shape(state);
  LatticeDerivative out;
  out.alpha.resize(state.alpha.size());
  out.beta.resize(state.beta.size());
  rhs(state.alpha, state.beta, out.alpha, out.beta);
  return out;
}

double energy(const LatticeState& state, const ModelParams& params) {
  return LatticeModel(params).energy(state);
}

LatticeDerivative eom_rhs(const LatticeState& state, const ModelParams& params) {
  return LatticeModel(params).rhs(state);
}

double total_norm(const LatticeState& state) {
  double acc = 0.0;
  for (const auto& a : state.alpha) acc += std::norm(a);
  for (const auto& b : state.beta) acc += std::norm(b);
  return acc;
}

double hp_load(const LatticeState& state, int atoms) {
  double peak = 0.0;
  for (const auto& b : state.beta) peak = std::max(peak, std::norm(b));
  return peak / atoms;
}

}  // namespace cavsol
