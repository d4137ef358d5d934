#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bilap/grid.hpp"

namespace bilap {

// Two-column text (r, value), one node per line, 17 significant digits.
void write_field(std::ostream& out, const RadialField& u);
void write_field(const std::string& path, const RadialField& u);

// Reads two-column text. Blank lines and lines starting with '#' are skipped.
std::vector<std::pair<double, double>> read_table(std::istream& in);
std::vector<std::pair<double, double>> read_table(const std::string& path);

// Reads a field whose abscissae must coincide with the grid nodes
// (relative tolerance 1e-12).
RadialField read_field(std::istream& in, const GridPtr& grid);
RadialField read_field(const std::string& path, const GridPtr& grid);

// Piecewise-linear interpolant in (log r, value), constant beyond the ends.
class TabulatedFunction {
 public:
  explicit TabulatedFunction(std::vector<std::pair<double, double>> table);
  double operator()(double r) const;

 private:
  std::vector<double> s_;
  std::vector<double> v_;
};

}  // namespace bilap
