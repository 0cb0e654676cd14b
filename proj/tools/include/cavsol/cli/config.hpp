#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavsol/analysis.hpp"
#include "cavsol/dynamics.hpp"
#include "cavsol/model.hpp"

namespace cavsol::cli {

// Raised for malformed files, unknown keys and bad override syntax.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DispersionSettings {
  std::vector<double> k_grid{0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5};
  std::vector<Branch> branches{Branch::optical, Branch::acoustic};
  bool measure = true;
  double amplitude = 0.1;
  double record_time = 40.0;
  int probe_site = 0;
};

struct SolitonSettings {
  double k = 0.3;
  double width = 8.0;
  double amplitude_scale = 1.0;      // multiplies the soliton amplitude
  std::optional<double> center;      // default M d / 4
  bool linear_contrast = true;
  double noise = 0.0;                // relative complex noise per site
  double sample_interval = 1.0;
};

struct CollideSettings {
  double k = 0.3;
  double width = 8.0;
  std::vector<double> centers{98.0, 158.0};
  double pre_time = 0.0;
  bool co_moving = false;  // both packets carry +k; no collision
  double sample_interval = 1.0;
};

struct TransitionSettings {
  double k = 0.3;
  double width = 8.0;
  std::vector<int> atoms_sweep{4, 10, 40, 100, 400};
  std::optional<int> reference_atoms;  // envelope amplitude taken from this N
  std::string score = "participation";
  bool linear_control = false;
  std::optional<double> center;
  std::optional<double> amplitude;     // overrides reference_atoms
};

struct OracleSettings {
  int photon_cutoff = 6;
  std::vector<Complex> alpha0{0.5, 0.0};
  std::vector<Complex> beta0{0.0, 0.0};
  double window = 0.5;  // in units of 1/Omega
  int samples = 51;
  double bound_fraction = 0.1;
};

struct RunSettings {
  std::uint64_t seed = 12345;
  int workers = 1;
};

struct ExperimentConfig {
  ModelParams model;
  IntegratorConfig integrator;
  double step_fraction = 0.02;  // automatic dt = step_fraction / omega_max when dt == 0
  DispersionSettings dispersion;
  SolitonSettings soliton;
  CollideSettings collide;
  TransitionSettings transition;
  OracleSettings oracle;
  RunSettings run;

  nlohmann::json resolved;  // effective document after overrides
  std::string hash;         // 16 hex digits of FNV-1a over resolved.dump()
};

// Default document: every recognised key with its default value.
nlohmann::json default_document();

// Applies "section.key=value"; the value is parsed as JSON when possible and
// taken as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view assignment);

// Merges doc over the defaults, rejects unknown keys and validates.
ExperimentConfig parse_config(const nlohmann::json& doc);

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

std::string fnv1a_hex(std::string_view text);

// Integrator settings for a run of the given model: when dt is 0 the step is
// derived from step_fraction, tightened so the expected RK4 damping over the
// run stays below a tenth of the conservation alarm, then rounded down so that sample_interval is a
// whole number of steps.
IntegratorConfig run_integrator(const ExperimentConfig& cfg, const LatticeModel& model,
                                double t_end, double sample_interval);

}  // namespace cavsol::cli
