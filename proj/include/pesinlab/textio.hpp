#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pesinlab {

// Shortest decimal string that round-trips to the same double (std::to_chars).
std::string fmt_double(double v);
std::string fmt_int(long long v);

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;  // comma-separated, LF, header row first
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pesinlab
