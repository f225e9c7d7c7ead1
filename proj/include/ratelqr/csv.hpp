#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ratelqr {

// Doubles use %.12g with '.' as the decimal separator regardless of locale.
std::string csv_double(double v);
std::string csv_unsigned(std::uint64_t v);

// Quotes a field when it contains a comma, quote, or line break.
std::string csv_field(std::string_view s);

// UTF-8, LF line endings, leading '#' comment lines for the schema note.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void comment(std::string_view text);
  void row(const std::vector<std::string>& cells);
  void flush();

 private:
  std::ofstream out_;
};

}  // namespace ratelqr
