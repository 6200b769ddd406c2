#include "ifsynth/core/csv.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ifsynth::csv {

int Table::col(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return (int)i;
  return -1;
}

int Table::require_col(const std::string& name) const {
  const int i = col(name);
  if (i < 0) throw std::runtime_error("missing column: " + name);
  return i;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == delim) {
      out.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

Table read(const std::filesystem::path& path, char delim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv::read: cannot open " + path.string());
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line, delim);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

void write(const std::filesystem::path& path, const Table& table, char delim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv::write: cannot open " + path.string());
  auto emit = [&](const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].find(delim) != std::string::npos ||
          fields[i].find('\n') != std::string::npos)
        throw std::runtime_error("csv::write: field contains delimiter: " + fields[i]);
      if (i) out << delim;
      out << fields[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace ifsynth::csv
