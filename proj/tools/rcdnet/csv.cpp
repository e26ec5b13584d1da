#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "rcd/error.hpp"

namespace rcdnet {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add_meta(const std::string& key, double value) {
  meta.emplace_back(key, format_number(value));
}

const std::string* CsvTable::find_meta(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return &v;
  return nullptr;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  rcd::fail(rcd::ErrorKind::parse, "no column named " + name);
}

void write_text_atomic(const std::string& text, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) rcd::fail(rcd::ErrorKind::io, "cannot open " + tmp.string());
    out << text;
    out.flush();
    if (!out) rcd::fail(rcd::ErrorKind::io, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    rcd::fail(rcd::ErrorKind::io, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void write_csv_atomic(const CsvTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& [k, v] : table.meta) out << "# " << k << '=' << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
  write_text_atomic(out.str(), path);
}

namespace {

double parse_number(const std::string& s, const std::string& where) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) rcd::fail(rcd::ErrorKind::parse, "bad number '" + s + "' in " + where);
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) rcd::fail(rcd::ErrorKind::io, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq == std::string::npos) t.meta.emplace_back(body, "");
      else t.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      t.columns = cells;
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      rcd::fail(rcd::ErrorKind::parse, path.string() + ": row width differs from the header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, path.string()));
    t.rows.push_back(std::move(row));
  }
  if (!header) rcd::fail(rcd::ErrorKind::parse, path.string() + " has no header");
  return t;
}

}  // namespace rcdnet
