#include "cli/csv.hpp"

#include <fmt/format.h>

#include "bilap/errors.hpp"

namespace bilap::cli {

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(const std::string& path, std::initializer_list<std::string_view> header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw DomainError(fmt::format("cannot write '{}'", path));
  std::string line;
  for (auto h : header) {
    if (!line.empty()) line += ',';
    line += h;
  }
  out_ << line << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw DomainError("csv row width does not match the header");
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    if (const auto* d = std::get_if<double>(&c)) line += format_real(*d);
    else if (const auto* i = std::get_if<long long>(&c)) line += std::to_string(*i);
    else line += std::get<std::string>(c);
  }
  out_ << line << '\n';
}

}  // namespace bilap::cli
