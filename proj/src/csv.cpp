#include "tirs/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "tirs/errors.hpp"

namespace tirs::csv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::string where(const std::filesystem::path& file, std::size_t line) {
  return file.string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    auto piece = line.substr(start, pos == std::string_view::npos ? line.size() - start
                                                                 : pos - start);
    out.emplace_back(trim(piece));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, const std::filesystem::path& file,
                    std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw DataError(where(file, line) + "expected a number, got '" + std::string(text) + "'");
  if (!std::isfinite(value))
    throw DataError(where(file, line) + "non-finite number '" + std::string(text) + "'");
  return value;
}

std::int64_t parse_int(std::string_view text, const std::filesystem::path& file,
                       std::size_t line) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw DataError(where(file, line) + "expected an integer, got '" + std::string(text) + "'");
  return value;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  Table t;
  t.path_ = path;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header_ = fields;
      for (std::size_t i = 0; i < fields.size(); ++i) t.index_.emplace(fields[i], i);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header_.size())
      throw DataError(where(path, lineno) + "expected " + std::to_string(t.header_.size()) +
                      " fields, found " + std::to_string(fields.size()));
    t.records_.push_back({lineno, std::move(fields)});
  }
  if (!have_header) throw DataError(path.string() + ": missing header row");
  return t;
}

std::size_t Table::column(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end())
    throw DataError(path_.string() + ": missing column '" + std::string(name) + "'");
  return it->second;
}

const std::string& Table::field(const Record& rec, std::size_t column) const {
  return rec.fields.at(column);
}

double Table::number(const Record& rec, std::size_t column) const {
  return parse_double(rec.fields.at(column), path_, rec.line);
}

std::int64_t Table::integer(const Record& rec, std::size_t column) const {
  return parse_int(rec.fields.at(column), path_, rec.line);
}

}  // namespace tirs::csv
