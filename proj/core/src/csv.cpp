#include "ilb/csv.hpp"

#include <charconv>
#include <sstream>

#include "ilb/errors.hpp"

namespace ilb::csv {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

Writer& Writer::cell(double v) {
  if (row_started_) out_ << ',';
  out_ << format_double(v);
  row_started_ = true;
  return *this;
}

Writer& Writer::cell(long long v) {
  if (row_started_) out_ << ',';
  out_ << v;
  row_started_ = true;
  return *this;
}

Writer& Writer::cell(std::string_view v) {
  if (row_started_) out_ << ',';
  out_ << v;
  row_started_ = true;
  return *this;
}

void Writer::end_row() {
  out_ << '\n';
  row_started_ = false;
}

void Writer::close() {
  out_.close();
  if (!out_) throw IoError("write failed for " + path_.string());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

}  // namespace

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing file " + path.string());
  Table t;
  t.source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV " + path.string());
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size())
      throw IoError("row width mismatch in " + path.string() + " at data row " + std::to_string(t.rows.size() + 1));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw IoError(source + ": missing column '" + std::string(name) + "'");
}

double Table::number(std::size_t row, std::size_t col) const {
  const auto& s = rows.at(row).at(col);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError(source + ": not a number '" + s + "'");
  return v;
}

long long Table::integer(std::size_t row, std::size_t col) const {
  const auto& s = rows.at(row).at(col);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError(source + ": not an integer '" + s + "'");
  return v;
}

}  // namespace ilb::csv
