#include "cavsol/cli/output.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cavsol/cli/config.hpp"

namespace cavsol::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& command,
                     const std::string& description, const std::string& config_hash,
                     std::vector<Column> columns)
    : out_(open_for_write(path)), width_(columns.size()) {
  out_ << fmt::format("# cavsol {} sim {}: {}\n", kVersion, command, description);
  out_ << fmt::format("# config_hash: {}\n", config_hash);
  out_ << "# units: frequencies share the unit of J and Omega, time is its inverse, "
          "lengths are in units of d\n";
  for (const auto& c : columns) out_ << fmt::format("# column {} [{}]\n", c.name, c.unit);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i].name;
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw std::logic_error("csv row width mismatch");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    if (std::isnan(values[i]))
      line += "nan";
    else
      line += fmt::format("{:.17g}", values[i]);
  }
  line += '\n';
  out_ << line;
  ++rows_;
}

nlohmann::ordered_json summary_document(const std::string& command, const std::string& config_hash,
                                        const nlohmann::ordered_json& units,
                                        const nlohmann::ordered_json& body) {
  nlohmann::ordered_json doc;
  doc["header"] = {{"generator", fmt::format("cavsol {}", kVersion)},
                   {"command", command},
                   {"config_hash", config_hash},
                   {"units", units}};
  for (const auto& [k, v] : body.items()) doc[k] = v;
  return doc;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
}

void write_resolved_config(const std::filesystem::path& out, const std::string& command,
                           const nlohmann::json& resolved, const std::string& config_hash) {
  nlohmann::ordered_json doc;
  doc["header"] = {{"generator", fmt::format("cavsol {}", kVersion)},
                   {"command", command},
                   {"config_hash", config_hash},
                   {"description", "effective configuration after --set overrides"}};
  doc["config"] = nlohmann::ordered_json::parse(resolved.dump());
  write_json(out / "config.json", doc);
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace cavsol::cli
