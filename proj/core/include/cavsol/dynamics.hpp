#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "cavsol/model.hpp"

namespace cavsol {

enum class Method { rk4_fixed, rk45_adaptive };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct IntegratorConfig {
  Method method = Method::rk4_fixed;
  double dt = 1e-3;    // rk4 step bound; initial trial step for rk45
  double tol = 1e-10;  // rk45 mixed absolute/relative local tolerance
  double t_end = 1.0;  // absolute target time; may lie before the start
  int sample_stride = 1;
  double hp_guard = 0.5;            // bound on max |beta|^2 / N
  double conservation_alarm = 1e-6; // relative drift; infinity disables

  void validate() const;
};

struct Diagnostics {
  double energy = 0.0;
  double norm = 0.0;
  double hp_load = 0.0;
};

// Samples are ordered along the direction of integration.
struct Trajectory {
  ModelParams params;
  Nonlinearity nonlinearity = Nonlinearity::full;
  std::vector<LatticeState> samples;
  std::vector<Diagnostics> diagnostics;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const LatticeState& final_state() const { return samples.back(); }
};

// Advances state0 to config.t_end under the full lattice equations, sampling
// every sample_stride accepted steps and at the end. Throws HpViolation,
// ConservationDrift or NonFinite when a sample fails its checks.
Trajectory integrate(const LatticeState& state0, const ModelParams& params,
                     const IntegratorConfig& config);

// Same with the square-root series replaced by 1. No HP guard.
Trajectory linearized_integrate(const LatticeState& state0, const ModelParams& params,
                                const IntegratorConfig& config);

Trajectory integrate(const LatticeState& state0, const LatticeModel& model,
                     const IntegratorConfig& config);

// Largest rk4 step with dt * omega_max <= fraction for states that respect
// the HP guard.
double stable_step(const LatticeModel& model, double hp_guard, double fraction = 0.02);

}  // namespace cavsol
