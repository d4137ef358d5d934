#include "bilap/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bilap/errors.hpp"

namespace bilap {

void write_field(std::ostream& out, const RadialField& u) {
  const auto r = u.grid()->nodes();
  for (std::size_t i = 0; i < u.size(); ++i) out << fmt::format("{:.17g} {:.17g}\n", r[i], u[i]);
}

void write_field(const std::string& path, const RadialField& u) {
  std::ofstream out(path);
  if (!out) throw DomainError(fmt::format("cannot open '{}' for writing", path));
  write_field(out, u);
}

std::vector<std::pair<double, double>> read_table(std::istream& in) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double r = 0, v = 0;
    if (!(ss >> r >> v)) throw DomainError(fmt::format("malformed table line {}", lineno));
    rows.emplace_back(r, v);
  }
  return rows;
}

std::vector<std::pair<double, double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError(fmt::format("cannot open '{}'", path));
  return read_table(in);
}

RadialField read_field(std::istream& in, const GridPtr& grid) {
  const auto rows = read_table(in);
  if (rows.size() != grid->size()) {
    throw DomainError(fmt::format("field has {} rows, grid has {} nodes", rows.size(), grid->size()));
  }
  std::vector<double> v(rows.size());
  const auto r = grid->nodes();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::fabs(rows[i].first - r[i]) > 1e-12 * r[i]) {
      throw DomainError(fmt::format("field abscissa {} does not match node {}", rows[i].first, r[i]));
    }
    v[i] = rows[i].second;
  }
  return RadialField(grid, std::move(v));
}

RadialField read_field(const std::string& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw DomainError(fmt::format("cannot open '{}'", path));
  return read_field(in, grid);
}

TabulatedFunction::TabulatedFunction(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw DomainError("a table needs at least two rows");
  std::sort(table.begin(), table.end());
  for (const auto& [r, v] : table) {
    if (!(r > 0.0)) throw DomainError("table abscissae must be positive");
    if (!s_.empty() && std::log(r) <= s_.back()) throw DomainError("table abscissae must be distinct");
    s_.push_back(std::log(r));
    v_.push_back(v);
  }
}

double TabulatedFunction::operator()(double r) const {
  const double s = std::log(r);
  if (s <= s_.front()) return v_.front();
  if (s >= s_.back()) return v_.back();
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - s_.begin());
  const double t = (s - s_[j - 1]) / (s_[j] - s_[j - 1]);
  return v_[j - 1] + t * (v_[j] - v_[j - 1]);
}

}  // namespace bilap
