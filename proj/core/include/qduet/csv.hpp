#pragma once

// Bit-stable CSV emission: UTF-8, comma separator, '#'-prefixed schema
// header, 17-significant-digit reals.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace qduet {

std::string format_real(double value); // %.17g

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();

  void comment(const std::string& text);            // "# <text>"
  void schema(const std::vector<std::string>& columns); // "# columns: a,b,c"
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);
  void close();

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

// FNV-1a 64-bit over the file bytes (reproducibility bookkeeping).
std::uint64_t fnv1a64_file(const std::string& path);
std::string fnv1a64_hex(const std::string& path);

} // namespace qduet
