#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ifsynth::csv {

// Minimal delimited-text table. Fields must not contain the delimiter or
// newlines; writers enforce this.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // -1 if absent
  int require_col(const std::string& name) const;
};

Table read(const std::filesystem::path& path, char delim = ',');
void write(const std::filesystem::path& path, const Table& table, char delim = ',');

std::vector<std::string> split_line(const std::string& line, char delim);
std::string format_double(double v);

}  // namespace ifsynth::csv
