#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rcdnet {

/// Comma-separated table with `# key=value` metadata lines above the header.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
  void add_meta(const std::string& key, double value);
  const std::string* find_meta(const std::string& key) const;
  std::size_t column(const std::string& name) const;
};

std::string format_number(double v);

/// Writes to a temporary file in the same directory, then renames it over `path`.
void write_csv_atomic(const CsvTable& table, const std::filesystem::path& path);
void write_text_atomic(const std::string& text, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace rcdnet
