#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ilb::csv {

// Shortest representation that parses back to the same double.
std::string format_double(double v);

class Writer {
 public:
  // Throws IoError if the file cannot be opened.
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

  Writer& cell(double v);
  Writer& cell(long long v);
  Writer& cell(int v) { return cell(static_cast<long long>(v)); }
  Writer& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  Writer& cell(std::string_view v);
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool row_started_ = false;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws IoError naming `source` when absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
  long long integer(std::size_t row, std::size_t col) const;

  std::string source;
};

// Comma-separated with a header row, no quoting.
Table read(const std::filesystem::path& path);

}  // namespace ilb::csv
