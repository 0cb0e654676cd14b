#include <iostream>
#include <string>
#include <vector>

#include <CLI11/CLI11.hpp>

#include "cavsol/cli/commands.hpp"
#include "cavsol/cli/config.hpp"
#include "cavsol/errors.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kAlarm = 3, kOverflow = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled cavity-ensemble lattice simulations"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"dispersion", "linear branches: closed form against plane-wave runs"},
      {"soliton", "launch and track one envelope soliton with a linear contrast run"},
      {"collide", "head-on collision of two solitons"},
      {"transition", "delocalization score across an ensemble-size sweep"},
      {"oracle-compare", "exact quantum evolution against the mean-field equations"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--set", overrides, "override, section.key=value (repeatable)");
    sub->add_option("--out", out_dir, "output directory")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = cavsol::cli::load_config(config_path, overrides);
    const auto summary = cavsol::cli::run_command(command, cfg, out_dir);
    std::cout << summary.dump(2) << '\n';
    return kOk;
  } catch (const cavsol::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const cavsol::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const cavsol::NumericalAlarm& e) {
    std::cerr << "numerical alarm: " << e.what() << '\n';
    return kAlarm;
  } catch (const cavsol::DimensionOverflow& e) {
    std::cerr << "oracle overflow: " << e.what() << '\n';
    return kOverflow;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
