#include "cavsol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include <Eigen/Core>
#include <fftw3.h>
#include <unsupported/Eigen/NonLinearOptimization>

#include "cavsol/errors.hpp"

namespace cavsol {

std::string_view to_string(Branch branch) {
  return branch == Branch::optical ? "optical" : "acoustic";
}

Branch parse_branch(std::string_view text) {
  if (text == "optical" || text == "+" || text == "plus") return Branch::optical;
  if (text == "acoustic" || text == "-" || text == "minus") return Branch::acoustic;
  throw InvalidArgument("unknown branch '" + std::string(text) + "'");
}

namespace {

double omega_of(double jc, double g2, Branch branch) {
  const double root = std::sqrt(jc * jc + g2);
  return branch == Branch::optical ? -jc + root : -jc - root;
}

double coupling_sq(const ModelParams& p) {
  return p.coupling * p.coupling * static_cast<double>(p.atoms);
}

}  // namespace

DispersionPoint dispersion_continuous(double k, const ModelParams& params, Branch branch) {
  const double kd = k * params.spacing;
  const double jc = params.hopping * (1.0 - 0.5 * kd * kd);
  return {k, branch, omega_of(jc, coupling_sq(params), branch)};
}

DispersionPoint dispersion_discrete(double k, const ModelParams& params, Branch branch) {
  const double jc = params.hopping * std::cos(k * params.spacing);
  return {k, branch, omega_of(jc, coupling_sq(params), branch)};
}

double band_gap(const ModelParams& params) {
  const double j = std::abs(params.hopping);
  return 2.0 * (std::sqrt(j * j + coupling_sq(params)) - j);
}

double zone_edge_splitting(const ModelParams& params) {
  return 2.0 * std::sqrt(params.hopping * params.hopping + coupling_sq(params));
}

double group_velocity(double k, const ModelParams& params) {
  const double w = dispersion_continuous(k, params, Branch::optical).omega;
  const double d = params.spacing;
  const double denom = w * w + coupling_sq(params);
  if (denom == 0.0) return 0.0;
  return 2.0 * k * params.hopping * d * d * w * w / denom;
}

double group_velocity_fd(double k, const ModelParams& params, double h) {
  const double up = dispersion_continuous(k + h, params, Branch::optical).omega;
  const double down = dispersion_continuous(k - h, params, Branch::optical).omega;
  return (up - down) / (2.0 * h);
}

double group_velocity_discrete(double k, const ModelParams& params) {
  const double w = dispersion_discrete(k, params, Branch::optical).omega;
  const double d = params.spacing;
  const double denom = w * w + coupling_sq(params);
  if (denom == 0.0) return 0.0;
  return 2.0 * params.hopping * d * std::sin(k * d) * w * w / denom;
}

NLSCoefficients nls_coefficients(double k, const ModelParams& params) {
  const double w = dispersion_continuous(k, params, Branch::optical).omega;
  if (!(w > 0.0))
    throw SingularCarrier("optical frequency at k = " + std::to_string(k) +
                          " is not positive; no envelope equation");
  const double g2 = coupling_sq(params);
  const double d = params.spacing;
  const double omega4_n = std::pow(params.coupling, 4) * static_cast<double>(params.atoms);
  NLSCoefficients c;
  c.k = k;
  c.omega_plus = w;
  c.v_g = group_velocity(k, params);
  const double denom = w * (w * w + g2);
  c.c1 = (params.hopping * d * d * w * w * w + g2 * c.v_g * c.v_g) / denom;
  c.c2 = 2.0 * omega4_n / denom;
  return c;
}

void SolitonSpec::validate() const {
  if (!(eta > 0.0)) throw InvalidArgument("soliton eta must be > 0");
  if (!(mu > 0.0 && mu <= 1.0)) throw InvalidArgument("soliton scale mu must lie in (0, 1]");
  if (!(coeffs.c1 * coeffs.c2 > 0.0))
    throw InvalidArgument("bright soliton needs c1 c2 > 0");
}

Complex soliton_envelope(double chi, double t, const SolitonSpec& spec) {
  const double c1 = spec.coeffs.c1;
  const double c2 = spec.coeffs.c2;
  const double amp = spec.eta * std::sqrt(2.0 * c1 / c2);
  const double arg = spec.eta * (chi - 2.0 * c1 * spec.sigma * t) - spec.nu;
  const double phase =
      spec.sigma * chi - c1 * (spec.sigma * spec.sigma - spec.eta * spec.eta) * t + spec.phi0;
  return std::polar(amp / std::cosh(arg), phase);
}

namespace {

// fftw planning is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Spectrum measure_spectrum(std::span<const Complex> signal, double sample_dt,
                          std::size_t max_peaks, double rel_threshold) {
  const std::size_t n = signal.size();
  if (n < 16) throw TooShort("spectrum needs at least 16 samples, got " + std::to_string(n));
  if (!(sample_dt > 0.0)) throw InvalidArgument("sample spacing must be positive");

  constexpr std::size_t kPad = 8;
  const std::size_t nfft = n * kPad;
  std::vector<Complex> buf(nfft, Complex{});
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    buf[i] = w * signal[i];
    wsum += w;
  }

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_plan_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(nfft), reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<double> power(nfft);
  for (std::size_t i = 0; i < nfft; ++i) power[i] = std::norm(buf[i]) / (wsum * wsum);
  const double peak_power = *std::max_element(power.begin(), power.end());

  const double bin = 2.0 * std::numbers::pi / (static_cast<double>(nfft) * sample_dt);
  auto freq_of = [&](double idx) {
    const double half = static_cast<double>(nfft) / 2.0;
    return (idx >= half ? idx - static_cast<double>(nfft) : idx) * bin;
  };

  struct Candidate {
    double index;
    double power;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < nfft; ++i) {
    const double p = power[i];
    const double left = power[(i + nfft - 1) % nfft];
    const double right = power[(i + 1) % nfft];
    if (p <= left || p < right || p < rel_threshold * peak_power || p <= 0.0) continue;
    // Parabola through the log-power of the three bins (exact for a Gaussian
    // lobe, close for Hann).
    const double la = std::log(std::max(left, 1e-300));
    const double lb = std::log(p);
    const double lc = std::log(std::max(right, 1e-300));
    const double denom = la - 2.0 * lb + lc;
    double offset = denom != 0.0 ? 0.5 * (la - lc) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double refined = lb - 0.25 * (la - lc) * offset;
    candidates.push_back({static_cast<double>(i) + offset, std::exp(refined)});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.power > b.power; });

  Spectrum out;
  out.resolution = 2.0 * std::numbers::pi / (static_cast<double>(n) * sample_dt);
  const double min_sep = 2.0 * kPad;  // two unpadded bins
  std::vector<double> kept;
  for (const auto& c : candidates) {
    if (out.peaks.size() >= max_peaks) break;
    const bool close = std::any_of(kept.begin(), kept.end(), [&](double k) {
      double dist = std::abs(k - c.index);
      dist = std::min(dist, static_cast<double>(nfft) - dist);
      return dist < min_sep;
    });
    if (close) continue;
    kept.push_back(c.index);
    out.peaks.push_back({freq_of(c.index), c.power});
  }
  return out;
}

Spectrum measure_spectrum(const Trajectory& trajectory, int site, std::size_t max_peaks,
                          double rel_threshold) {
  const auto& samples = trajectory.samples;
  if (samples.size() < 16)
    throw TooShort("trajectory has only " + std::to_string(samples.size()) + " samples");
  if (site < 0 || site >= samples.front().sites())
    throw InvalidArgument("site index out of range");
  const double dt = samples[1].t - samples[0].t;
  if (dt == 0.0) throw InvalidArgument("trajectory samples are not distinct in time");
  std::vector<Complex> signal{samples[0].alpha[site]};
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double step = samples[i].t - samples[i - 1].t;
    if (std::abs(step - dt) > 1e-9 * std::abs(dt)) break;
    signal.push_back(samples[i].alpha[site]);
  }
  // A backward run is a forward record of the time-reversed signal.
  if (dt < 0.0) std::reverse(signal.begin(), signal.end());
  return measure_spectrum(signal, std::abs(dt), max_peaks, rel_threshold);
}

namespace {

struct Range {
  int first;
  int last;
};

Range resolve(const LatticeState& state, const std::optional<SiteWindow>& window) {
  const int m = state.sites();
  if (!window) return {0, m};
  const int first = std::max(0, window->first);
  const int last = std::min(m, window->last);
  if (first >= last) throw InvalidArgument("empty site window");
  return {first, last};
}

double intensity_sum(const LatticeState& state, Range r) {
  double s = 0.0;
  for (int l = r.first; l < r.last; ++l) s += std::norm(state.alpha[l]);
  if (!(s > 0.0)) throw DegenerateField("cavity field vanishes in the measured window");
  return s;
}

}  // namespace

double packet_center(const LatticeState& state, double spacing,
                     std::optional<SiteWindow> window) {
  const Range r = resolve(state, window);
  const double total = intensity_sum(state, r);
  double moment = 0.0;
  for (int l = r.first; l < r.last; ++l) moment += l * spacing * std::norm(state.alpha[l]);
  return moment / total;
}

double packet_width(const LatticeState& state, double spacing,
                    std::optional<SiteWindow> window) {
  const Range r = resolve(state, window);
  const double total = intensity_sum(state, r);
  const double center = packet_center(state, spacing, window);
  double var = 0.0;
  for (int l = r.first; l < r.last; ++l) {
    const double dx = l * spacing - center;
    var += dx * dx * std::norm(state.alpha[l]);
  }
  return std::sqrt(var / total);
}

double participation_width(const LatticeState& state, double spacing,
                           std::optional<SiteWindow> window) {
  const Range r = resolve(state, window);
  const double total = intensity_sum(state, r);
  double quartic = 0.0;
  for (int l = r.first; l < r.last; ++l) quartic += std::pow(std::norm(state.alpha[l]), 2);
  return spacing * total * total / quartic;
}

namespace {

// Residuals A sech((x - x0)/w) - y for Eigen's Levenberg-Marquardt.
struct SechResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  std::span<const double> x;
  std::span<const double> y;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(x.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      f[i] = p[0] / std::cosh((x[i] - p[1]) / p[2]) - y[i];
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (x[i] - p[1]) / p[2];
      const double s = 1.0 / std::cosh(u);
      const double ds = -s * std::tanh(u);  // d sech(u) / du
      jac(i, 0) = s;
      jac(i, 1) = p[0] * ds * (-1.0 / p[2]);
      jac(i, 2) = p[0] * ds * (-u / p[2]);
    }
    return 0;
  }
};

}  // namespace

SechFit fit_sech_profile(std::span<const double> x, std::span<const double> modulus) {
  if (x.size() != modulus.size()) throw ShapeMismatch("profile coordinate/value size mismatch");
  if (x.size() < 4) throw TooShort("sech fit needs at least 4 points");
  double norm2 = 0.0, total = 0.0, moment = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = modulus[i] * modulus[i];
    norm2 += p;
    total += p;
    moment += x[i] * p;
    peak = std::max(peak, modulus[i]);
  }
  if (!(total > 0.0)) throw DegenerateField("cannot fit a sech to an all-zero profile");
  const double center = moment / total;
  double var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    var += (x[i] - center) * (x[i] - center) * modulus[i] * modulus[i];
  // For |sech(x/w)|^2 the rms spread is pi w / sqrt(12).
  const double rms = std::sqrt(var / total);
  const double spacing = x.size() > 1 ? std::abs(x[1] - x[0]) : 1.0;
  const double w0 = std::max(rms * std::sqrt(12.0) / std::numbers::pi, 0.5 * spacing);

  Eigen::VectorXd p(3);
  p << peak, center, w0;
  SechResidual functor{x, modulus};
  Eigen::LevenbergMarquardt<SechResidual> lm(functor);
  lm.parameters.maxfev = 2000;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  lm.minimize(p);

  Eigen::VectorXd f(x.size());
  functor(p, f);
  SechFit out;
  out.amplitude = p[0];
  out.center = p[1];
  out.width = std::abs(p[2]);
  out.fit_error = std::sqrt(f.squaredNorm() / norm2);
  return out;
}

SechFit fit_sech(const LatticeState& state, double carrier_k, double spacing,
                 std::optional<SiteWindow> window) {
  const Range r = resolve(state, window);
  std::vector<double> x;
  std::vector<double> mod;
  x.reserve(r.last - r.first);
  mod.reserve(r.last - r.first);
  for (int l = r.first; l < r.last; ++l) {
    const double pos = l * spacing;
    const Complex envelope = state.alpha[l] * std::polar(1.0, -carrier_k * pos);
    x.push_back(pos);
    mod.push_back(std::abs(envelope));
  }
  return fit_sech_profile(x, mod);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatch("spearman inputs differ in length");
  if (a.size() < 2) throw TooShort("spearman needs at least two points");
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t q = i; q <= j; ++q) r[idx[q]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace cavsol
