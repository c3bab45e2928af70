#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tirs::csv {

struct Record {
  std::size_t line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

// Comma-separated file with a header row. Blank lines are skipped; fields are
// trimmed of surrounding whitespace and a trailing '\r'.
class Table {
 public:
  static Table read(const std::filesystem::path& path);

  const std::filesystem::path& path() const { return path_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Record>& records() const { return records_; }

  // Index of a named column; throws DataError naming the file if absent.
  std::size_t column(std::string_view name) const;

  const std::string& field(const Record& rec, std::size_t column) const;
  double number(const Record& rec, std::size_t column) const;
  std::int64_t integer(const Record& rec, std::size_t column) const;

 private:
  std::filesystem::path path_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Record> records_;
};

std::vector<std::string> split(std::string_view line, char sep = ',');

// Whole-line parsers that raise DataError("<file>:<line>: ...").
double parse_double(std::string_view text, const std::filesystem::path& file,
                    std::size_t line);
std::int64_t parse_int(std::string_view text, const std::filesystem::path& file,
                       std::size_t line);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace tirs::csv
