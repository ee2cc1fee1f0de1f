#include "qduet/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace qduet {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::schema(const std::vector<std::string>& columns) {
  out_ << "# columns: ";
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (k) out_ << ",";
    out_ << columns[k];
  }
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out_ << ",";
    out_ << format_real(values[k]);
  }
  out_ << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ << ",";
    out_ << cells[k];
  }
  out_ << "\n";
}

void CsvWriter::close() {
  out_.flush();
  out_.close();
  if (!out_ && out_.is_open()) throw std::runtime_error("failed writing " + path_);
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for digest: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return hash;
}

std::string fnv1a64_hex(const std::string& path) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64_file(path)));
  return buf;
}

} // namespace qduet
