#ifndef IONTRAP_IO_HPP
#define IONTRAP_IO_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace iontrap {

// Locale-independent "%.12g" (dot decimal separator, no grouping).
std::string format_number(double value);

// Plain CSV with a single header row; every cell is written by format_number.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
};

std::uint64_t fnv1a64(const std::string& text);
std::string to_hex(std::uint64_t value);

void ensure_directory(const std::string& path);

}  // namespace iontrap

#endif  // IONTRAP_IO_HPP
