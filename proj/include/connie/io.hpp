// Shared text I/O helpers for the TSV file formats.

#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace connie {

/// Error raised when a data file does not match its format. Carries the
/// 1-based line number where parsing failed (0 when the error is not tied
/// to a specific line, e.g. the file could not be opened).
class parse_error : public std::runtime_error {
public:
  parse_error(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

namespace detail {

// Doubles are serialized with 17 significant digits so that read(write(x))
// reproduces x bit-exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline bool parse_long(std::string_view s, long long& out) {
  if (s.empty()) return false;
  std::size_t idx = 0;
  try {
    out = std::stoll(std::string(s), &idx);
  } catch (const std::exception&) {
    return false;
  }
  return idx == s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::size_t idx = 0;
  try {
    out = std::stod(std::string(s), &idx);
  } catch (const std::exception&) {
    return false;
  }
  return idx == s.size();
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "cannot open file for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error(path, 0, "cannot open file for writing");
  return out;
}

// Strips a trailing carriage return so files written on other platforms parse.
inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

} // namespace detail
} // namespace connie
