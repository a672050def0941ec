// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace adse {

// Throws InputError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string sha256_hex(std::string_view bytes);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

// Minimal CSV builder: comma separated, quotes fields containing , " or newline.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& empty() { return field(std::string_view{}); }
  void end_row();

  const std::string& str() const { return out_; }
  std::size_t columns() const { return columns_; }

 private:
  std::string out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

// Splits one CSV document into rows of fields (handles the quoting above).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace adse
