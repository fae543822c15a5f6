#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace wettix {

// Shortest decimal form that round-trips.
std::string fmt(double x);
// Compact form for file names, e.g. 0.008.
std::string fmt_time(double t);

void ensure_dir(const std::string& path);
std::string join_path(const std::string& a, const std::string& b);

/// Line-buffered CSV file; every row is flushed so partial runs keep their log.
class CsvWriter {
 public:
  CsvWriter() = default;
  CsvWriter(const std::string& path, const std::string& header);
  bool open() const { return os_.is_open(); }
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream os_;
};

void write_text(const std::string& path, const std::string& text);

}  // namespace wettix
