#include "wettix/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>

#include "wettix/errors.hpp"

namespace wettix {

std::string fmt(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create directory " + path + ": " + ec.message());
}

std::string join_path(const std::string& a, const std::string& b) {
  return (std::filesystem::path(a) / b).string();
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header) : os_(path) {
  if (!os_) throw ConfigError("cannot write " + path);
  os_ << header << '\n' << std::flush;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
  os_ << '\n' << std::flush;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << text;
}

}  // namespace wettix
