#include "ratelqr/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace ratelqr {

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  // snprintf honors the C locale set at startup; keep the separator fixed in
  // case an embedder changed it.
  for (char& c : buf) {
    if (c == '\0') break;
    if (c == ',') c = '.';
  }
  return buf;
}

std::string csv_unsigned(std::uint64_t v) { return std::to_string(v); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(s);
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary) {
  if (!out_)
    throw std::runtime_error("CsvWriter: cannot open " + path.string());
}

void CsvWriter::comment(std::string_view text) {
  out_ << "# " << text << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << csv_field(cells[i]);
  }
  out_ << '\n';
}

void CsvWriter::flush() { out_.flush(); }

}  // namespace ratelqr
