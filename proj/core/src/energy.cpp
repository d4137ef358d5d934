#include "bilap/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "bilap/errors.hpp"

namespace bilap {

PotentialSpec PotentialSpec::power_law(double a) {
  PotentialSpec p;
  p.V = [a](double r) { return std::pow(r, -a); };
  p.K = [a](double r) { return std::pow(r, 1.0 - a); };
  const auto [origin, infinity] = exponents::power_law_params(a);
  p.origin = origin;
  p.infinity = infinity;
  return p;
}

SampledPotentials SampledPotentials::sample(const RadialGrid& grid, const PotentialSpec& pot) {
  if (!pot.V || !pot.K) throw DomainError("potentials V and K must be provided");
  const int N = grid.dim();
  if (!(pot.K_integrability_s > 2.0 * N / (N + 4.0))) {
    throw DomainError(fmt::format("K integrability exponent s={} must exceed 2N/(N+4)", pot.K_integrability_s));
  }
  SampledPotentials s;
  s.forcing = pot.has_forcing();
  const auto r = grid.nodes();
  s.V.resize(r.size());
  s.K.resize(r.size());
  s.Q.assign(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    s.V[i] = pot.V(r[i]);
    s.K[i] = pot.K(r[i]);
    if (s.forcing) s.Q[i] = pot.Q(r[i]);
    if (!std::isfinite(s.V[i]) || !std::isfinite(s.K[i]) || !std::isfinite(s.Q[i])) {
      throw DomainError(fmt::format("non-finite potential sample at r={}", r[i]));
    }
    if (s.V[i] < 0.0) throw DomainError(fmt::format("V({}) = {} is negative", r[i], s.V[i]));
    if (!(s.K[i] > 0.0)) throw DomainError(fmt::format("K({}) = {} is not positive", r[i], s.K[i]));
    if (s.Q[i] < 0.0) throw DomainError(fmt::format("Q({}) = {} is negative", r[i], s.Q[i]));
  }
  return s;
}

std::string_view to_string(NonlinearityKind k) {
  switch (k) {
    case NonlinearityKind::zero: return "zero";
    case NonlinearityKind::pure_power: return "pure_power";
    case NonlinearityKind::capped_pair: return "capped_pair";
    case NonlinearityKind::custom: return "custom";
  }
  return "?";
}

std::string_view to_string(SignConvention s) { return s == SignConvention::odd ? "odd" : "zero_on_negatives"; }

NonlinearityKind parse_nonlinearity_kind(std::string_view s) {
  if (s == "zero") return NonlinearityKind::zero;
  if (s == "pure_power") return NonlinearityKind::pure_power;
  if (s == "capped_pair") return NonlinearityKind::capped_pair;
  if (s == "custom") return NonlinearityKind::custom;
  throw DomainError(fmt::format("unknown nonlinearity kind '{}'", s));
}

SignConvention parse_sign_convention(std::string_view s) {
  if (s == "zero_on_negatives") return SignConvention::zero_on_negatives;
  if (s == "odd") return SignConvention::odd;
  throw DomainError(fmt::format("unknown sign convention '{}'", s));
}

NonlinearitySpec NonlinearitySpec::none() {
  NonlinearitySpec n;
  n.kind = NonlinearityKind::zero;
  return n;
}

NonlinearitySpec NonlinearitySpec::pure_power(double q, SignConvention s) {
  if (!(q > 1.0)) throw DomainError(fmt::format("pure power needs q > 1, got {}", q));
  NonlinearitySpec n;
  n.kind = NonlinearityKind::pure_power;
  n.q = q;
  n.sign = s;
  n.theta = q;
  n.m = 1.0 / q;
  n.t0 = 0.0;
  return n;
}

NonlinearitySpec NonlinearitySpec::capped_pair(double M, double q1, double q2, SignConvention s) {
  if (!(M > 0.0)) throw DomainError("capped pair needs M > 0");
  if (!(q1 > 1.0 && q2 >= q1)) throw DomainError("capped pair needs 1 < q1 <= q2");
  NonlinearitySpec n;
  n.kind = NonlinearityKind::capped_pair;
  n.M = M;
  n.q1 = q1;
  n.q2 = q2;
  n.sign = s;
  n.theta = q1;
  return n;
}

std::optional<std::pair<double, double>> NonlinearitySpec::exponent_range() const {
  switch (kind) {
    case NonlinearityKind::zero: return std::nullopt;
    case NonlinearityKind::pure_power: return std::pair{q, q};
    case NonlinearityKind::capped_pair: return std::pair{std::min(q1, q2), std::max(q1, q2)};
    case NonlinearityKind::custom:
      if (theta) return std::pair{*theta, *theta};
      return std::nullopt;
  }
  return std::nullopt;
}

bool NonlinearitySpec::has_derivative() const { return kind != NonlinearityKind::custom || static_cast<bool>(fprime); }

bool NonlinearitySpec::even_primitive() const { return sign == SignConvention::odd; }

namespace {

// Values for t >= 0.
long double f_pos(const NonlinearitySpec& nl, long double t) {
  switch (nl.kind) {
    case NonlinearityKind::zero: return 0.0L;
    case NonlinearityKind::pure_power: return std::pow(t, static_cast<long double>(nl.q) - 1);
    case NonlinearityKind::capped_pair: {
      const long double e = t <= 1 ? std::max(nl.q1, nl.q2) : std::min(nl.q1, nl.q2);
      return nl.M * std::pow(t, e - 1);
    }
    case NonlinearityKind::custom:
      if (!nl.f) throw DomainError("custom nonlinearity needs f");
      return nl.f(static_cast<double>(t));
  }
  return 0.0L;
}

long double F_pos(const NonlinearitySpec& nl, long double t) {
  switch (nl.kind) {
    case NonlinearityKind::zero: return 0.0L;
    case NonlinearityKind::pure_power: {
      const long double q = nl.q;
      return std::pow(t, q) / q;
    }
    case NonlinearityKind::capped_pair: {
      const long double hi = std::max(nl.q1, nl.q2);
      const long double lo = std::min(nl.q1, nl.q2);
      if (t <= 1) return nl.M * std::pow(t, hi) / hi;
      return nl.M / hi + nl.M * (std::pow(t, lo) - 1) / lo;
    }
    case NonlinearityKind::custom:
      if (!nl.F) throw DomainError("custom nonlinearity requires a caller-supplied primitive F");
      return nl.F(static_cast<double>(t));
  }
  return 0.0L;
}

double fprime_pos(const NonlinearitySpec& nl, double t) {
  switch (nl.kind) {
    case NonlinearityKind::zero: return 0.0;
    case NonlinearityKind::pure_power: return (nl.q - 1.0) * std::pow(t, nl.q - 2.0);
    case NonlinearityKind::capped_pair: {
      const double e = t <= 1 ? std::max(nl.q1, nl.q2) : std::min(nl.q1, nl.q2);
      return nl.M * (e - 1.0) * std::pow(t, e - 2.0);
    }
    case NonlinearityKind::custom:
      if (!nl.fprime) throw DomainError("custom nonlinearity has no derivative");
      return nl.fprime(t);
  }
  return 0.0;
}

}  // namespace

long double f_eval_ld(const NonlinearitySpec& nl, long double t) {
  if (t >= 0) return f_pos(nl, t);
  if (nl.sign == SignConvention::zero_on_negatives) return 0.0L;
  return -f_pos(nl, -t);
}

long double F_eval_ld(const NonlinearitySpec& nl, long double t) {
  if (t >= 0) return F_pos(nl, t);
  if (nl.sign == SignConvention::zero_on_negatives) return 0.0L;
  return F_pos(nl, -t);
}

double f_eval(const NonlinearitySpec& nl, double t) { return static_cast<double>(f_eval_ld(nl, t)); }
double F_eval(const NonlinearitySpec& nl, double t) { return static_cast<double>(F_eval_ld(nl, t)); }

double fprime_eval(const NonlinearitySpec& nl, double t) {
  if (t >= 0) return fprime_pos(nl, t);
  if (nl.sign == SignConvention::zero_on_negatives) return 0.0;
  return fprime_pos(nl, -t);
}

using SpMat = Eigen::SparseMatrix<double>;

struct EnergyFunctional::Factor {
  SpMat B;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  std::once_flag once;
  bool ok = false;
};

namespace {

// B = sigma (S W^-1 S + W V), pentadiagonal and symmetric positive definite.
SpMat assemble_gram(const RadialGrid& g, std::span<const double> V) {
  const std::size_t M = g.size();
  const auto A = g.faces_ld();
  const auto w = g.weights_ld();
  const long double sigma = g.ctx().sigma_N;
  std::vector<long double> diag(M), off(M, 0.0L);
  for (std::size_t i = 0; i < M; ++i) {
    diag[i] = -(A[i] + (i > 0 ? A[i - 1] : 0.0L));
    if (i + 1 < M) off[i] = A[i];
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * M);
  for (std::size_t i = 0; i < M; ++i) {
    // Row i of S W^-1 S: sum over k in {i-1, i, i+1} of S_ik S_kj / w_k.
    for (long d = -2; d <= 2; ++d) {
      const long j = static_cast<long>(i) + d;
      if (j < 0 || j >= static_cast<long>(M)) continue;
      long double acc = 0;
      for (long k = static_cast<long>(i) - 1; k <= static_cast<long>(i) + 1; ++k) {
        if (k < 0 || k >= static_cast<long>(M)) continue;
        if (std::labs(k - j) > 1) continue;
        auto S = [&](long a, long b) -> long double {
          if (a == b) return diag[static_cast<std::size_t>(a)];
          return off[static_cast<std::size_t>(std::min(a, b))];
        };
        acc += S(static_cast<long>(i), k) * S(k, j) / w[static_cast<std::size_t>(k)];
      }
      if (d == 0) acc += w[i] * V[i];
      t.emplace_back(static_cast<int>(i), static_cast<int>(j), static_cast<double>(sigma * acc));
    }
  }
  SpMat B(static_cast<int>(M), static_cast<int>(M));
  B.setFromTriplets(t.begin(), t.end());
  B.makeCompressed();
  return B;
}

}  // namespace

EnergyFunctional::EnergyFunctional(GridPtr grid, SampledPotentials pot, NonlinearitySpec nl)
    : grid_(std::move(grid)), pot_(std::move(pot)), nl_(std::move(nl)), factor_(std::make_shared<Factor>()) {
  if (!grid_) throw DomainError("energy functional needs a grid");
  const std::size_t M = grid_->size();
  if (pot_.V.size() != M || pot_.K.size() != M || pot_.Q.size() != M) {
    throw DomainError("sampled potentials do not match the grid");
  }
}

EnergyFunctional::EnergyFunctional(GridPtr grid, const PotentialSpec& pot, NonlinearitySpec nl)
    : EnergyFunctional(grid, SampledPotentials::sample(*grid, pot), std::move(nl)) {}

EnergyFunctional::~EnergyFunctional() = default;

EnergyFunctional::EnergyFunctional(const EnergyFunctional& o)
    : grid_(o.grid_), pot_(o.pot_), nl_(o.nl_), factor_(std::make_shared<Factor>()) {}

EnergyFunctional& EnergyFunctional::operator=(const EnergyFunctional& o) {
  if (this != &o) {
    grid_ = o.grid_;
    pot_ = o.pot_;
    nl_ = o.nl_;
    factor_ = std::make_shared<Factor>();
  }
  return *this;
}

const EnergyFunctional::Factor& EnergyFunctional::factor() const {
  Factor& f = *factor_;
  std::call_once(f.once, [&] {
    f.B = assemble_gram(*grid_, pot_.V);
    f.ldlt.compute(f.B);
    f.ok = f.ldlt.info() == Eigen::Success;
  });
  if (!f.ok) throw SolverError("factorization of the H^2_V Gram matrix failed");
  return f;
}

EnergyBreakdown EnergyFunctional::energy(std::span<const double> u) const {
  const RadialGrid& g = *grid_;
  if (u.size() != g.size()) throw DomainError("field size does not match the grid");
  std::vector<long double> lap(g.size());
  g.laplacian_ld(u, lap);
  const auto w = g.weights_ld();
  long double quad = 0, kt = 0, qt = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const long double ui = u[i];
    quad += w[i] * (lap[i] * lap[i] + pot_.V[i] * ui * ui);
    kt += w[i] * pot_.K[i] * F_eval_ld(nl_, ui);
    if (pot_.forcing) qt += w[i] * pot_.Q[i] * ui;
  }
  const long double sigma = g.ctx().sigma_N;
  EnergyBreakdown e;
  e.half_norm_sq = static_cast<double>(sigma * quad / 2);
  e.K_term = static_cast<double>(sigma * kt);
  e.Q_term = static_cast<double>(sigma * qt);
  e.total = static_cast<double>(sigma * (quad / 2 - kt - qt));
  return e;
}

long double EnergyFunctional::energy_difference(std::span<const double> u, std::span<const double> v) const {
  const RadialGrid& g = *grid_;
  const std::size_t M = g.size();
  if (u.size() != M || v.size() != M) throw DomainError("field size does not match the grid");
  std::vector<long double> d(M), ld(M), lu(M);
  for (std::size_t i = 0; i < M; ++i) d[i] = static_cast<long double>(v[i]) - u[i];
  g.laplacian_ld(std::span<const long double>(d), ld);
  g.laplacian_ld(u, lu);
  const auto w = g.weights_ld();
  long double acc = 0;
  for (std::size_t i = 0; i < M; ++i) {
    const long double ui = u[i];
    long double term = ld[i] * (2 * lu[i] + ld[i]) / 2 + pot_.V[i] * d[i] * (2 * ui + d[i]) / 2;
    term -= pot_.K[i] * (F_eval_ld(nl_, v[i]) - F_eval_ld(nl_, ui));
    if (pot_.forcing) term -= pot_.Q[i] * d[i];
    acc += w[i] * term;
  }
  return acc * g.ctx().sigma_N;
}

GradientEval EnergyFunctional::gradient(std::span<const double> u) const {
  const RadialGrid& g = *grid_;
  const std::size_t M = g.size();
  if (u.size() != M) throw DomainError("field size does not match the grid");
  std::vector<long double> lu(M), llu(M);
  g.laplacian_ld(u, lu);
  g.laplacian_ld(std::span<const long double>(lu), llu);
  const auto w = g.weights_ld();
  const long double sigma = g.ctx().sigma_N;
  GradientEval out;
  out.strong.resize(M);
  out.dual.resize(M);
  long double l2 = 0;
  for (std::size_t i = 0; i < M; ++i) {
    const long double ui = u[i];
    long double gi = llu[i] + pot_.V[i] * ui - pot_.K[i] * f_eval_ld(nl_, ui);
    if (pot_.forcing) gi -= pot_.Q[i];
    out.strong[i] = static_cast<double>(gi);
    out.dual[i] = static_cast<double>(sigma * w[i] * gi);
    l2 += w[i] * gi * gi;
  }
  out.residual_l2 = static_cast<double>(std::sqrt(sigma * l2));
  out.residual_hv = dual_norm(out.dual);
  return out;
}

double EnergyFunctional::pairing(std::span<const double> gv, std::span<const double> h) const {
  const auto w = grid_->weights_ld();
  long double acc = 0;
  for (std::size_t i = 0; i < grid_->size(); ++i) acc += w[i] * gv[i] * h[i];
  return static_cast<double>(acc * grid_->ctx().sigma_N);
}

double EnergyFunctional::hv_inner(std::span<const double> u, std::span<const double> v) const {
  const RadialGrid& g = *grid_;
  std::vector<long double> lu(g.size()), lv(g.size());
  g.laplacian_ld(u, lu);
  g.laplacian_ld(v, lv);
  const auto w = g.weights_ld();
  long double acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += w[i] * (lu[i] * lv[i] + pot_.V[i] * static_cast<long double>(u[i]) * v[i]);
  }
  return static_cast<double>(acc * g.ctx().sigma_N);
}

double EnergyFunctional::hv_norm(std::span<const double> u) const { return std::sqrt(std::max(0.0, hv_inner(u, u))); }

std::vector<double> EnergyFunctional::riesz(std::span<const double> e) const {
  const Factor& f = factor();
  Eigen::Map<const Eigen::VectorXd> rhs(e.data(), static_cast<Eigen::Index>(e.size()));
  Eigen::VectorXd x = f.ldlt.solve(rhs);
  return std::vector<double>(x.data(), x.data() + x.size());
}

double EnergyFunctional::dual_norm(std::span<const double> e) const {
  const auto x = riesz(e);
  long double acc = 0;
  for (std::size_t i = 0; i < e.size(); ++i) acc += static_cast<long double>(e[i]) * x[i];
  return static_cast<double>(std::sqrt(std::max(0.0L, acc)));
}

std::optional<std::vector<double>> EnergyFunctional::newton_direction(std::span<const double> u,
                                                                     std::span<const double> e) const {
  if (!nl_.has_derivative()) return std::nullopt;
  const Factor& f = factor();
  SpMat H = f.B;
  const auto w = grid_->weights_ld();
  const long double sigma = grid_->ctx().sigma_N;
  constexpr double tiny = 1e-300;
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const double t = std::fabs(u[i]) < tiny ? std::copysign(tiny, u[i] < 0 ? -1.0 : 1.0) : u[i];
    double fp = fprime_eval(nl_, t);
    if (!std::isfinite(fp)) fp = 1e200;
    fp = std::min(fp, 1e200);
    H.coeffRef(static_cast<int>(i), static_cast<int>(i)) -= static_cast<double>(sigma * w[i] * pot_.K[i] * fp);
  }
  Eigen::SparseLU<SpMat> lu;
  lu.compute(H);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::Map<const Eigen::VectorXd> rhs(e.data(), static_cast<Eigen::Index>(e.size()));
  Eigen::VectorXd d = lu.solve(-rhs);
  if (lu.info() != Eigen::Success || !d.allFinite()) return std::nullopt;
  return std::vector<double>(d.data(), d.data() + d.size());
}

EnergyBreakdown energy(const GridPtr& grid, const PotentialSpec& pot, const NonlinearitySpec& nl,
                       const RadialField& u) {
  if (u.grid() != grid) throw DomainError("field lives on a different grid");
  return EnergyFunctional(grid, pot, nl).energy(u.values());
}

GradientResult gradient(const GridPtr& grid, const PotentialSpec& pot, const NonlinearitySpec& nl,
                        const RadialField& u) {
  if (u.grid() != grid) throw DomainError("field lives on a different grid");
  EnergyFunctional fn(grid, pot, nl);
  auto g = fn.gradient(u.values());
  return GradientResult{RadialField(grid, std::move(g.strong)), g.residual_l2, g.residual_hv};
}

namespace {

// Trapezoid in log r of g(r) dr over [a, b] with a fixed density per e-fold.
double log_quadrature(const std::function<double(double)>& g, double a, double b) {
  constexpr double per_efold = 2000.0;
  const double span = std::log(b / a);
  const std::size_t n = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(span * per_efold)));
  const long double h = span / n;
  long double acc = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = a * std::exp(static_cast<double>(h * i));
    long double v = static_cast<long double>(g(r)) * r;
    if (i == 0 || i == n) v /= 2;
    acc += v;
  }
  return static_cast<double>(acc * h);
}

QIntegral probe_integral(const std::function<double(double)>& g, double r_min, double r_max) {
  constexpr double widen = 100.0;
  constexpr double growth_tol = 1e-3;
  QIntegral q;
  q.value = log_quadrature(g, r_min, r_max);
  q.extended_origin = q.value + log_quadrature(g, r_min / widen, r_min);
  q.extended_infinity = q.value + log_quadrature(g, r_max, r_max * widen);
  const double scale = std::max(std::fabs(q.value), std::numeric_limits<double>::min());
  q.origin_growth = !std::isfinite(q.extended_origin) || q.extended_origin - q.value > growth_tol * scale;
  q.infinity_growth = !std::isfinite(q.extended_infinity) || q.extended_infinity - q.value > growth_tol * scale;
  return q;
}

}  // namespace

QAdmissibility check_Q_admissible(const GridPtr& grid, const PotentialSpec& pot) {
  QAdmissibility rep;
  if (!pot.has_forcing()) return rep;
  const int N = grid->dim();
  const double sigma = grid->ctx().sigma_N;
  const double p = 2.0 * N / (N + 4.0);
  const auto Q = pot.Q;
  const auto V = pot.V;
  rep.rellich = probe_integral([&](double r) { const double q = Q(r); return q * q * std::pow(r, N + 3); },
                               grid->r_min(), grid->r_max());
  rep.sobolev = probe_integral([&](double r) { return std::pow(Q(r), p) * std::pow(r, N - 1); },
                               grid->r_min(), grid->r_max());
  rep.potential = probe_integral(
      [&](double r) {
        const double q = Q(r);
        if (q == 0.0) return 0.0;
        const double v = V(r);
        return v > 0.0 ? q * q / v * std::pow(r, N - 1) : std::numeric_limits<double>::infinity();
      },
      grid->r_min(), grid->r_max());

  constexpr double inf = std::numeric_limits<double>::infinity();
  rep.L0_rellich = rep.rellich.finite() ? 4.0 / (N * (N - 4.0)) * std::sqrt(sigma * rep.rellich.value) : inf;
  rep.L0_potential = rep.potential.finite() ? std::sqrt(sigma * rep.potential.value) : inf;
  rep.L0 = std::min(rep.L0_rellich, rep.L0_potential);

  EnergyFunctional fn(grid, pot, NonlinearitySpec::none());
  std::vector<double> e(grid->size());
  const auto w = grid->weights();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = sigma * w[i] * fn.potentials().Q[i];
  rep.L0_discrete = fn.dual_norm(e);
  return rep;
}

}  // namespace bilap
