#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cavsol::cli {

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless
};

// CSV with a '#' comment block (command, file description, config hash, one
// line per column with its unit) followed by the header row. Floats are
// written with 17 significant digits; NaN as "nan".
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& command,
            const std::string& description, const std::string& config_hash,
            std::vector<Column> columns);

  void row(const std::vector<double>& values);
  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

// {"header": {...}, <body keys in insertion order>} written with indent 2.
nlohmann::ordered_json summary_document(const std::string& command, const std::string& config_hash,
                                        const nlohmann::ordered_json& units,
                                        const nlohmann::ordered_json& body);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

// Writes <out>/config.json holding the effective configuration.
void write_resolved_config(const std::filesystem::path& out, const std::string& command,
                           const nlohmann::json& resolved, const std::string& config_hash);

// JSON number, or null when not finite.
nlohmann::ordered_json number_or_null(double v);

}  // namespace cavsol::cli
