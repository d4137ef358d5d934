#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bilap {

struct DimensionContext {
  int N = 5;
  double sigma_N = 0.0;        // measure of the unit sphere S^{N-1}
  double two_star_star = 0.0;  // 2N/(N-4)

  static DimensionContext make(int N);
};

enum class Spacing { uniform, logarithmic };

std::string_view to_string(Spacing s);
Spacing parse_spacing(std::string_view s);

// Radial mesh on [r_min, r_max] with a conservative finite-volume Laplacian.
// With x = r (uniform) or x = log r (logarithmic) and step h, the operator is
//   (L u)_i = [A_{i+1/2}(u_{i+1}-u_i) - A_{i-1/2}(u_i-u_{i-1})] / w_i,
// where w_i are the trapezoid weights of the quadrature (Jacobian included)
// and A are face fluxes. No flux crosses the inner face (reflection at r_1);
// the outer face couples to a ghost value u_{M+1} = 0 (clamped end).
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> build(const DimensionContext& ctx, double r_min, double r_max,
                                                 std::size_t M, Spacing mode);

  const DimensionContext& ctx() const { return ctx_; }
  int dim() const { return ctx_.N; }
  std::size_t size() const { return r_.size(); }
  Spacing spacing() const { return mode_; }
  double step() const { return h_; }
  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }

  std::span<const double> nodes() const { return r_; }
  // Weights for the integral of f(r) r^{N-1} dr, without sigma_N.
  std::span<const double> weights() const { return w_; }

  std::span<const long double> weights_ld() const { return wl_; }
  // Face coefficients A_{i+1/2}, i = 0..M-1; the last entry is the ghost face.
  std::span<const long double> faces_ld() const { return face_; }

  // sigma_N * sum_i w_i f_i, accumulated in index order.
  double integrate(std::span<const double> f) const;

  // Extended-precision kernels shared with the energy module.
  void laplacian_ld(std::span<const long double> u, std::span<long double> out) const;
  void laplacian_ld(std::span<const double> u, std::span<long double> out) const;
  // Flux-form operator S = W L (symmetric tridiagonal).
  void flux_ld(std::span<const long double> u, std::span<long double> out) const;

 private:
  RadialGrid() = default;

  DimensionContext ctx_;
  Spacing mode_ = Spacing::logarithmic;
  double h_ = 0.0;
  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<long double> wl_;
  std::vector<long double> face_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Samples of a radial function on a grid with an optional Laplacian cache.
class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<double> values);

  const GridPtr& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  // Laplacian values, computed once and cached.
  std::span<const double> laplacian_values() const;
  bool has_cached_laplacian() const { return cache_ != nullptr; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
  mutable std::shared_ptr<const std::vector<double>> cache_;
};

template <class F>
RadialField sample(const GridPtr& grid, F&& fn) {
  std::vector<double> v(grid->size());
  const auto r = grid->nodes();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(r[i]);
  return RadialField(grid, std::move(v));
}

RadialField laplacian(const RadialField& u);
RadialField bilaplacian(const RadialField& u);

double integrate(const RadialGrid& grid, std::span<const double> f);

struct NormParts {
  double laplacian_sq = 0.0;  // integral of |Delta u|^2
  double potential_sq = 0.0;  // integral of V u^2
  double norm = 0.0;
};

NormParts norm_HV(std::span<const double> V, const RadialField& u);

struct SumNorm {
  double value = 0.0;
  double split_radius = 0.0;  // nodes with r < split_radius belong to the L^{q1} part
};

// Upper bound on the sum-space norm from ball/complement splittings.
SumNorm sum_norm(std::span<const double> K, const RadialField& u, double q1, double q2);

// Weighted Lebesgue norm (integral of K |u|^q)^{1/q}.
double lebesgue_norm(std::span<const double> K, const RadialField& u, double q);

}  // namespace bilap
