#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bilap/energy.hpp"
#include "bilap/errors.hpp"
#include "bilap/sampling.hpp"
#include "oracles.hpp"

using namespace bilap;

namespace {

GridPtr make(double r0, double r1, std::size_t M) {
  return RadialGrid::build(DimensionContext::make(5), r0, r1, M, Spacing::logarithmic);
}

PotentialSpec unit_potential() {
  PotentialSpec p;
  p.V = [](double) { return 1.0; };
  p.K = [](double) { return 1.0; };
  return p;
}

NonlinearitySpec smooth_custom() {
  // f(t) = t^3 / (1 + t^2) for t >= 0.
  NonlinearitySpec nl;
  nl.kind = NonlinearityKind::custom;
  nl.f = [](double t) { return t * t * t / (1 + t * t); };
  nl.F = [](double t) { return 0.5 * (t * t - std::log1p(t * t)); };
  nl.fprime = [](double t) { return t * t * (3 + t * t) / ((1 + t * t) * (1 + t * t)); };
  return nl;
}

std::vector<double> mixed_field(const RadialGrid& g, std::uint64_t seed, std::uint64_t k) {
  auto u = sampling::random_bump_field(g, seed, 1, k);
  const auto v = sampling::random_bump_field(g, seed, 2, k);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= 0.5 * v[i];
  return u;
}

}  // namespace

TEST(Nonlinearity, PurePowerExamples) {
  const auto nl = NonlinearitySpec::pure_power(4);
  EXPECT_EQ(f_eval(nl, 2), 8.0);
  EXPECT_EQ(F_eval(nl, 2), 4.0);
  EXPECT_EQ(f_eval(nl, -1), 0.0);
  EXPECT_EQ(F_eval(nl, -1), 0.0);
  EXPECT_EQ(fprime_eval(nl, 2), 12.0);
  EXPECT_THROW(NonlinearitySpec::pure_power(1.0), DomainError);
}

TEST(Nonlinearity, CappedPairContinuousAtOne) {
  const auto nl = NonlinearitySpec::capped_pair(1, 3, 5);
  EXPECT_EQ(f_eval(nl, 1.0), 1.0);
  EXPECT_NEAR(f_eval(nl, 1 - 1e-9), 1.0, 1e-8);
  EXPECT_NEAR(f_eval(nl, 1 + 1e-9), 1.0, 1e-8);
  EXPECT_NEAR(F_eval(nl, 1 - 1e-9), F_eval(nl, 1 + 1e-9), 1e-8);
  for (double t : {0.1, 0.5, 0.9, 1.0, 1.5, 3.0, 10.0}) {
    EXPECT_LE(f_eval(nl, t), std::min(std::pow(t, 2), std::pow(t, 4)) * (1 + 1e-15));
    EXPECT_NEAR(F_eval(nl, t), oracle::simpson([&](double s) { return f_eval(nl, s); }, 0, t, 20000),
                1e-10 * (1 + F_eval(nl, t)));
  }
}

TEST(Nonlinearity, OddConventionGivesEvenPrimitive) {
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> d(0, 5);
  for (const auto& nl : {NonlinearitySpec::pure_power(3.5, SignConvention::odd),
                         NonlinearitySpec::capped_pair(2, 1.5, 1.8, SignConvention::odd)}) {
    for (int k = 0; k < 10; ++k) {
      const double t = d(eng);
      EXPECT_EQ(F_eval(nl, -t), F_eval(nl, t));
      EXPECT_EQ(f_eval(nl, -t), -f_eval(nl, t));
    }
    EXPECT_TRUE(nl.even_primitive());
  }
  EXPECT_FALSE(NonlinearitySpec::pure_power(3).even_primitive());
}

TEST(Nonlinearity, CustomNeedsPrimitive) {
  NonlinearitySpec nl;
  nl.kind = NonlinearityKind::custom;
  nl.f = [](double t) { return t; };
  EXPECT_THROW(F_eval(nl, 1.0), DomainError);
  EXPECT_FALSE(nl.has_derivative());
}

TEST(Nonlinearity, AmbrosettiRabinowitzHolds) {
  std::mt19937_64 eng(2);
  std::uniform_real_distribution<double> d(0, 20);
  for (const auto& nl : {NonlinearitySpec::pure_power(4), NonlinearitySpec::pure_power(1.5),
                         NonlinearitySpec::capped_pair(1, 3, 5), NonlinearitySpec::capped_pair(3, 2.5, 2.5)}) {
    ASSERT_TRUE(nl.theta);
    for (int k = 0; k < 1000; ++k) {
      const double t = d(eng);
      const double F = F_eval(nl, t), ft = f_eval(nl, t) * t;
      EXPECT_GE(*nl.theta * F, 0.0);
      EXPECT_LE(*nl.theta * F, ft * (1 + 1e-14));
    }
  }
}

TEST(Potentials, SamplingValidates) {
  const auto g = make(1e-3, 10, 64);
  auto p = unit_potential();
  p.V = [](double r) { return r < 1 ? -1.0 : 1.0; };
  EXPECT_THROW(SampledPotentials::sample(*g, p), DomainError);
  p = unit_potential();
  p.K = [](double) { return 0.0; };
  EXPECT_THROW(SampledPotentials::sample(*g, p), DomainError);
  p = unit_potential();
  const double pole = g->nodes()[5];
  p.V = [pole](double r) { return 1.0 / (r - pole); };
  EXPECT_THROW(SampledPotentials::sample(*g, p), DomainError);
  p = unit_potential();
  p.K_integrability_s = 2.0 * 5 / 9;
  EXPECT_THROW(SampledPotentials::sample(*g, p), DomainError);
}

TEST(Energy, ZeroField) {
  const auto g = make(1e-4, 20, 256);
  const RadialField zero(g, std::vector<double>(g->size(), 0.0));
  const auto e = energy(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(4), zero);
  EXPECT_EQ(e.total, 0.0);
  const auto gr = gradient(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(4), zero);
  for (double v : gr.field.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(gr.residual_hv, 0.0);
}

TEST(Energy, MatchesRefinedQuadrature) {
  const auto g = make(1e-4, 10, 2048);
  const double q = 4;
  const auto u = sample(g, [](double r) { return std::exp(-r * r); });
  const auto e = energy(g, unit_potential(), NonlinearitySpec::pure_power(q), u);
  const double sigma = oracle::sphere_measure(5);
  const double norm_sq = sigma * oracle::simpson(
                                     [](double r) {
                                       const double l = oracle::lap_gauss(5, r);
                                       return (l * l + std::exp(-2 * r * r)) * std::pow(r, 4);
                                     },
                                     0, 10, 400000);
  const double k_term =
      sigma / q * oracle::simpson([](double r) { return std::exp(-4 * r * r) * std::pow(r, 4); }, 0, 10, 400000);
  EXPECT_NEAR(e.half_norm_sq / (0.5 * norm_sq), 1.0, 1e-5);
  EXPECT_NEAR(e.K_term / k_term, 1.0, 1e-5);
  EXPECT_NEAR(e.total / (0.5 * norm_sq - k_term), 1.0, 1e-5);
  EXPECT_EQ(e.total, e.half_norm_sq - e.K_term - e.Q_term);
}

TEST(Energy, Homogeneity) {
  const auto g = make(1e-4, 20, 400);
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(3.5));
  for (std::uint64_t k = 0; k < 5; ++k) {
    const auto u = sampling::random_bump_field(*g, 41, 1, k);
    const auto base = fn.energy(u);
    for (double lambda : {0.5, 2.0, 3.0, 7.25}) {
      std::vector<double> v(u);
      for (double& x : v) x *= lambda;
      const auto e = fn.energy(v);
      const double expect = lambda * lambda * base.half_norm_sq - std::pow(lambda, 3.5) * base.K_term;
      EXPECT_NEAR(e.total, expect, 1e-13 * (std::abs(e.half_norm_sq) + std::abs(e.K_term)));
    }
  }
}

TEST(Gradient, FiniteDifferenceAllKinds) {
  const auto g = make(1e-3, 20, 300);
  auto pot = PotentialSpec::power_law(2);
  pot.Q = [](double r) { return std::exp(-r); };
  for (const auto& nl : {NonlinearitySpec::pure_power(4), NonlinearitySpec::capped_pair(1, 3, 5), smooth_custom()}) {
    const EnergyFunctional fn(g, pot, nl);
    for (std::uint64_t k = 0; k < 10; ++k) {
      auto u = sampling::random_bump_field(*g, 43, 1, k);
      const auto h = sampling::random_bump_field(*g, 43, 2, k);
      const double eps = 1e-5;
      std::vector<double> up(u), um(u);
      for (std::size_t i = 0; i < u.size(); ++i) {
        up[i] += eps * h[i];
        um[i] -= eps * h[i];
      }
      // Differences are accumulated node by node; subtracting two totals
      // loses pairs whose derivative is tiny relative to the energy.
      const double fd = static_cast<double>(fn.energy_difference(um, up) / (2 * eps));
      const double an = fn.pairing(fn.gradient(u).strong, h);
      EXPECT_NEAR(fd, an, 1e-6 * std::abs(an)) << to_string(nl.kind) << " trial " << k;
    }
  }
}

TEST(Gradient, SecondOrderInEpsilon) {
  const auto g = make(1e-3, 20, 300);
  const EnergyFunctional fn(g, PotentialSpec::power_law(1), NonlinearitySpec::pure_power(4));
  const auto u = sampling::random_bump_field(*g, 47, 1, 0);
  const auto h = sampling::random_bump_field(*g, 47, 2, 0);
  const double an = fn.pairing(fn.gradient(u).strong, h);
  std::vector<double> errs;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    std::vector<double> up(u), um(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
      up[i] += eps * h[i];
      um[i] -= eps * h[i];
    }
    const long double diff = fn.energy_difference(um, up);
    errs.push_back(std::abs(static_cast<double>(diff / (2 * eps)) - an));
  }
  EXPECT_GE(std::log10(errs[0] / errs[1]), 1.9);
  EXPECT_GE(std::log10(errs[1] / errs[2]), 1.9);
}

TEST(Gradient, LinearPartOnQuadratic) {
  PotentialSpec pot;
  pot.V = [](double) { return 0.0; };
  pot.K = [](double) { return 1.0; };
  std::vector<double> err;
  for (std::size_t M : {256u, 512u, 1024u}) {
    const auto g = RadialGrid::build(DimensionContext::make(5), 1e-3, 1.0, M, Spacing::uniform);
    const auto gr = gradient(g, pot, NonlinearitySpec::none(), sample(g, [](double r) { return r * r; }));
    const auto r = g->nodes();
    double e = 0;
    for (std::size_t i = 0; i < g->size(); ++i)
      if (r[i] > 0.25 && r[i] < 0.75) e = std::max(e, std::abs(gr.field[i]));
    err.push_back(e);
  }
  EXPECT_LT(err.back(), 5e-3);
  EXPECT_GE(oracle::observed_order(err[0], err[1]), 1.9);
  EXPECT_GE(oracle::observed_order(err[1], err[2]), 1.9);
}

TEST(Gradient, DualVectorIsWeightedStrongForm) {
  const auto g = make(1e-3, 20, 200);
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(3));
  const auto u = sampling::random_bump_field(*g, 53, 1, 0);
  const auto ge = fn.gradient(u);
  const auto w = g->weights();
  for (std::size_t i = 0; i < u.size(); ++i)
    EXPECT_NEAR(ge.dual[i], g->ctx().sigma_N * w[i] * ge.strong[i], 1e-12 * (1 + std::abs(ge.dual[i])));
  EXPECT_NEAR(ge.residual_hv, fn.dual_norm(ge.dual), 1e-12 * ge.residual_hv);
}

TEST(Gradient, NegativePartIdentity) {
  // u = a - b with supports at least two nodes apart, so their discrete
  // Laplacians do not overlap.
  const auto g = make(1e-3, 40, 400);
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(4));
  const auto r = g->nodes();
  std::mt19937_64 eng(59);
  std::uniform_real_distribution<double> c(-3, 1), wdt(0.2, 0.6), gap(0.05, 0.5), amp(0.1, 2);
  for (int k = 0; k < 10; ++k) {
    const double c1 = c(eng), w1 = wdt(eng), w2 = wdt(eng);
    const double c2 = c1 + w1 + w2 + gap(eng);
    const double a1 = amp(eng), a2 = amp(eng);
    std::vector<double> u(g->size()), neg(g->size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double s = std::log(r[i]);
      u[i] = a1 * sampling::bump_profile((s - c1) / w1) - a2 * sampling::bump_profile((s - c2) / w2);
      neg[i] = std::max(-u[i], 0.0);
    }
    std::size_t last_pos = 0, first_neg = u.size();
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] > 0) last_pos = i;
      if (u[i] < 0 && first_neg == u.size()) first_neg = i;
    }
    ASSERT_GE(first_neg, last_pos + 3);
    const double lhs = fn.pairing(fn.gradient(u).strong, neg);
    const double rhs = -std::pow(fn.hv_norm(neg), 2);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(rhs));
  }
}

TEST(Riesz, InvertsTheGramMatrix) {
  const auto g = make(1e-3, 20, 200);
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::none());
  const auto u = sampling::random_bump_field(*g, 61, 1, 0);
  const auto v = sampling::random_bump_field(*g, 61, 2, 0);
  // e = dual of u under the H^2_V inner product; B^{-1} e recovers u.
  std::vector<double> e(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::vector<double> basis(u.size(), 0.0);
    basis[i] = 1.0;
    e[i] = fn.hv_inner(u, basis);
  }
  const auto back = fn.riesz(e);
  double scale = 0;
  for (double x : u) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(back[i], u[i], 1e-8 * scale);
  EXPECT_NEAR(fn.hv_inner(u, v), fn.hv_inner(v, u), 1e-12 * fn.hv_norm(u) * fn.hv_norm(v));
  EXPECT_NEAR(fn.dual_norm(e), fn.hv_norm(u), 1e-8 * fn.hv_norm(u));
}

TEST(QAdmissible, ZeroForcing) {
  const auto g = make(1e-4, 50, 512);
  const auto rep = check_Q_admissible(g, PotentialSpec::power_law(2));
  EXPECT_EQ(rep.rellich.value, 0.0);
  EXPECT_EQ(rep.sobolev.value, 0.0);
  EXPECT_EQ(rep.potential.value, 0.0);
  EXPECT_EQ(rep.L0, 0.0);
  EXPECT_EQ(rep.L0_discrete, 0.0);
}

TEST(QAdmissible, ExponentialForcing) {
  const auto g = make(1e-4, 50, 2048);
  auto pot = PotentialSpec::power_law(2);
  pot.Q = [](double r) { return std::exp(-r); };
  const auto rep = check_Q_admissible(g, pot);
  const double ref = oracle::simpson_log([](double r) { return std::exp(-2 * r) * std::pow(r, 8); }, 1e-4, 50, 400000);
  EXPECT_NEAR(rep.rellich.value / ref, 1.0, 1e-6);
  EXPECT_NEAR(ref, 40320.0 / 512, 1e-6);
  EXPECT_TRUE(rep.rellich.finite());
  EXPECT_TRUE(rep.sobolev.finite());
  EXPECT_TRUE(rep.potential.finite());
  EXPECT_GT(rep.L0_discrete, 0.0);
  EXPECT_LE(rep.L0_discrete, rep.L0 * 1.01);
}

TEST(QAdmissible, LogDivergenceAtOriginIsFlagged) {
  const auto g = make(1e-4, 50, 512);
  auto pot = PotentialSpec::power_law(2);
  pot.Q = [](double r) { return std::pow(r, -4.5) * std::exp(-r); };
  const auto rep = check_Q_admissible(g, pot);
  EXPECT_TRUE(rep.rellich.origin_growth);
  EXPECT_FALSE(rep.rellich.finite());
}

TEST(QAdmissible, InverseFourthPowerGrowsAtInfinityOnly) {
  // Q^2 r^8 = 1 for Q = r^-4: integrable at the origin, linear growth at infinity.
  const auto g = make(1e-4, 50, 512);
  auto pot = PotentialSpec::power_law(2);
  pot.Q = [](double r) { return std::pow(r, -4.0); };
  const auto rep = check_Q_admissible(g, pot);
  EXPECT_FALSE(rep.rellich.origin_growth);
  EXPECT_TRUE(rep.rellich.infinity_growth);
  EXPECT_NEAR(rep.rellich.value, 50 - 1e-4, 1e-5);
}

TEST(Coercivity, SublinearLowerBound) {
  // I(u) >= 1/2 |u|^2 - (S/q) |u|^q - L0 |u| with S the largest sampled
  // ratio of the K-integral to |u|^q over the fields used.
  const auto g = make(1e-4, 20, 512);
  auto pot = PotentialSpec::power_law(2);
  pot.Q = [](double r) { return 0.1 * std::exp(-r); };
  const double q = 1.5;
  const EnergyFunctional fn(g, pot, NonlinearitySpec::pure_power(q, SignConvention::odd));
  const auto rep = check_Q_admissible(g, pot);
  std::vector<std::vector<double>> fields;
  double S = 0;
  const auto& K = fn.potentials().K;
  for (std::uint64_t k = 0; k < 30; ++k) {
    fields.push_back(mixed_field(*g, 67, k));
    const RadialField f(g, fields.back());
    S = std::max(S, std::pow(lebesgue_norm(K, f, q), q) / std::pow(fn.hv_norm(fields.back()), q));
  }
  for (const auto& u : fields) {
    for (double t : {1e-3, 1e-1, 1.0, 10.0, 1e3}) {
      std::vector<double> v(u);
      for (double& x : v) x *= t;
      const double n = fn.hv_norm(v);
      const double bound = 0.5 * n * n - S / q * std::pow(n, q) - rep.L0_discrete * n;
      EXPECT_GE(fn.energy(v).total, bound - 1e-12 * (1 + n * n));
    }
  }
}
