#include "cavsol/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavsol/errors.hpp"

namespace cavsol {

std::string_view to_string(Method method) {
  return method == Method::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
}

Method parse_method(std::string_view text) {
  if (text == "rk4_fixed" || text == "rk4") return Method::rk4_fixed;
  if (text == "rk45_adaptive" || text == "rk45") return Method::rk45_adaptive;
  throw InvalidArgument("unknown integration method '" + std::string(text) + "'");
}

void IntegratorConfig::validate() const {
  if (method == Method::rk4_fixed && !(dt > 0.0))
    throw InvalidArgument("rk4_fixed needs dt > 0");
  if (method == Method::rk45_adaptive && !(tol > 0.0))
    throw InvalidArgument("rk45_adaptive needs tol > 0");
  if (method == Method::rk45_adaptive && !(dt > 0.0))
    throw InvalidArgument("rk45_adaptive needs a positive initial step dt");
  if (!std::isfinite(t_end)) throw InvalidArgument("t_end must be finite");
  if (sample_stride < 1) throw InvalidArgument("sample_stride must be >= 1");
  if (!(hp_guard > 0.0 && hp_guard <= 2.0))
    throw InvalidArgument("hp_guard must lie in (0, 2]");
  if (!(conservation_alarm > 0.0))
    throw InvalidArgument("conservation_alarm must be > 0");
}

double stable_step(const LatticeModel& model, double hp_guard, double fraction) {
  const double w = model.max_frequency(hp_guard);
  return w > 0.0 ? fraction / w : fraction;
}

namespace {

using Vec = std::vector<Complex>;

// Packs alpha then beta into one contiguous vector of length 2M.
class System {
 public:
  explicit System(const LatticeModel& model) : model_(model), m_(model.params().sites) {}

  void operator()(const Vec& y, Vec& dy) const {
    const std::span<const Complex> ys(y);
    const std::span<Complex> dys(dy);
    model_.rhs(ys.first(m_), ys.subspan(m_), dys.first(m_), dys.subspan(m_));
  }

 private:
  const LatticeModel& model_;
  std::size_t m_;
};

Vec pack(const LatticeState& state) {
  Vec y(state.alpha);
  y.insert(y.end(), state.beta.begin(), state.beta.end());
  return y;
}

LatticeState unpack(const Vec& y, double t) {
  const auto m = static_cast<std::ptrdiff_t>(y.size() / 2);
  LatticeState s;
  s.t = t;
  s.alpha.assign(y.begin(), y.begin() + m);
  s.beta.assign(y.begin() + m, y.end());
  return s;
}

class Recorder {
 public:
  Recorder(const LatticeModel& model, const IntegratorConfig& config, Trajectory& out)
      : model_(model), config_(config), out_(out) {}

  void record(const Vec& y, double t) {
    LatticeState s = unpack(y, t);
    Diagnostics d;
    d.energy = model_.energy(s);
    d.norm = total_norm(s);
    d.hp_load = hp_load(s, model_.params().atoms);

    if (!std::isfinite(d.energy) || !std::isfinite(d.norm)) {
      throw NonFinite(message("non-finite field", t));
    }
    if (model_.nonlinearity() == Nonlinearity::full && d.hp_load > config_.hp_guard) {
      std::ostringstream os;
      os << "max |beta|^2/N = " << d.hp_load << " exceeds the HP guard " << config_.hp_guard;
      throw HpViolation(message(os.str(), t));
    }
    if (!out_.diagnostics.empty()) {
      const Diagnostics& first = out_.diagnostics.front();
      const double e_drift =
          std::abs(d.energy - first.energy) / std::max(std::abs(first.energy), 1.0);
      const double n_drift = first.norm > 0.0 ? std::abs(d.norm - first.norm) / first.norm
                                              : std::abs(d.norm - first.norm);
      if (e_drift > config_.conservation_alarm || n_drift > config_.conservation_alarm) {
        std::ostringstream os;
        os << "conservation drift (energy " << e_drift << ", norm " << n_drift
           << ") exceeds " << config_.conservation_alarm << "; reduce the step";
        throw ConservationDrift(message(os.str(), t));
      }
    }
    out_.samples.push_back(std::move(s));
    out_.diagnostics.push_back(d);
  }

 private:
  static std::string message(const std::string& what, double t) {
    std::ostringstream os;
    os << what << " at t = " << t;
    return os.str();
  }

  const LatticeModel& model_;
  const IntegratorConfig& config_;
  Trajectory& out_;
};

void axpy(Vec& out, const Vec& y, double h, const Vec& k) {
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
}

void run_rk4(const System& f, Vec& y, double t0, const IntegratorConfig& config,
             Recorder& rec, Trajectory& out) {
  const double span = config.t_end - t0;
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(span) / config.dt - 1e-9));
  if (steps == 0) return;
  const double h = span / static_cast<double>(steps);
  const std::size_t n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n);

  for (std::size_t s = 1; s <= steps; ++s) {
    f(y, k1);
    axpy(tmp, y, 0.5 * h, k1);
    f(tmp, k2);
    axpy(tmp, y, 0.5 * h, k2);
    f(tmp, k3);
    axpy(tmp, y, h, k3);
    f(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    ++out.accepted_steps;
    if (s == steps) {
      rec.record(y, config.t_end);
    } else if (s % config.sample_stride == 0) {
      rec.record(y, t0 + static_cast<double>(s) * h);
    }
  }
}

// Dormand-Prince 5(4) with first-same-as-last.
void run_rk45(const System& f, Vec& y, double t0, const IntegratorConfig& config,
              Recorder& rec, Trajectory& out) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                   a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  const double direction = config.t_end >= t0 ? 1.0 : -1.0;
  const double span = std::abs(config.t_end - t0);
  if (span == 0.0) return;
  const std::size_t n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

  double t = t0;
  double h = std::min(config.dt, span);
  f(y, k1);
  const double min_step = span * 1e-14;

  while (direction * (config.t_end - t) > 0.0) {
    const double remaining = std::abs(config.t_end - t);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    const double hs = direction * h;

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a21 * k1[i]);
    f(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                            a65 * k5[i]);
    f(tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                              e6 * k6[i] + e7 * k7[i]);
      const double scale = config.tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) throw NonFinite("non-finite error estimate in rk45 step");

    if (err <= 1.0) {
      t = last ? config.t_end : t + hs;
      y.swap(ynew);
      k1.swap(k7);
      ++out.accepted_steps;
      if (last) {
        rec.record(y, t);
        break;
      }
      if (out.accepted_steps % config.sample_stride == 0) rec.record(y, t);
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h *= grow;
    } else {
      ++out.rejected_steps;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < min_step) throw NonConvergence("rk45 step size underflow");
    }
  }
}

}  // namespace

Trajectory integrate(const LatticeState& state0, const LatticeModel& model,
                     const IntegratorConfig& config) {
  config.validate();
  if (state0.alpha.size() != static_cast<std::size_t>(model.params().sites) ||
      state0.beta.size() != state0.alpha.size())
    throw ShapeMismatch("initial state does not match the model's site count");

  Trajectory out;
  out.params = model.params();
  out.nonlinearity = model.nonlinearity();
  Recorder rec(model, config, out);
  const System f(model);
  Vec y = pack(state0);
  rec.record(y, state0.t);

  if (config.method == Method::rk4_fixed) {
    run_rk4(f, y, state0.t, config, rec, out);
  } else {
    run_rk45(f, y, state0.t, config, rec, out);
  }
  return out;
}

Trajectory integrate(const LatticeState& state0, const ModelParams& params,
                     const IntegratorConfig& config) {
  const LatticeModel model(params, Nonlinearity::full);
  return integrate(state0, model, config);
}

Trajectory linearized_integrate(const LatticeState& state0, const ModelParams& params,
                                const IntegratorConfig& config) {
  const LatticeModel model(params, Nonlinearity::linearized);
  return integrate(state0, model, config);
}

}  // namespace cavsol
