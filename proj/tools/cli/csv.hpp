#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bilap::cli {

using Cell = std::variant<double, long long, std::string>;

// Comma-separated writer with 17 significant digits for reals.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::initializer_list<std::string_view> header);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string format_real(double v);

}  // namespace bilap::cli
