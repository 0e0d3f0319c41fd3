#include <gtest/gtest.h>

#include <random>

#include "combforge/gap.hpp"

using namespace combforge;

namespace {

std::vector<Vec> grid_points(const Crystal& c, const Region& w) { return crystal_points(c, w); }

}  // namespace

TEST(PsiK, ScalarExampleIsWindowTimesSinc) {
  const auto w = gaussian(1, 2.0);
  const auto psi = make_psi_k(Mat::Identity(1, 1), {make_vec({0.0})}, 0, 0, w);
  for (double x : {0.0, 0.1, 0.37, 1.5, -2.25}) {
    const double sinc = x == 0.0 ? 1.0 : std::sin(2 * kPi * x) / (2 * kPi * x);
    EXPECT_NEAR(std::abs(psi.value(make_vec({x})) - w.value(make_vec({x})) * sinc), 0.0, 1e-14) << x;
  }
}

TEST(PsiK, FirstDerivativeVanishesAtTarget) {
  // Odd (modulated) window: the correction still forces Psi'(0) = 0.
  GaussianParams gp;
  gp.modulation = make_vec({0.3});
  gp.width = 3.0;
  const auto psi = make_psi_k(Mat::Identity(1, 1), {make_vec({0.0})}, 0, 1, gaussian(1, gp));
  const Jet j = psi.jet(make_vec({0.0}), 1);
  EXPECT_NEAR(std::abs(j.value() - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(j.derivative(MultiIndex{1})), 0.0, 1e-12);
}

TEST(PsiK, SineFactorKillsOtherCoset) {
  const auto psi = make_psi_k(Mat::Identity(1, 1), {make_vec({0.0}), make_vec({0.5})}, 0, 0, gaussian(1, 5.0));
  for (int k = -5; k <= 5; ++k) EXPECT_EQ(psi.value(make_vec({k + 0.5})), cplx{});
}

TEST(Gap, VanishingOneDimensional) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0})});
  const auto p = make_gap_probe(sigma, 0, 1, 0.2);
  const auto r = verify_vanishing(p, Region::box1(-10, 10));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.off_target_exact);
  EXPECT_EQ(r.points_checked, 21u);
  EXPECT_NEAR(std::abs(r.target_value - 1.0), 0.0, 1e-12);
}

TEST(Gap, VanishingTwoCosets) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0}), make_vec({0.5})});
  const auto p = make_gap_probe(sigma, 0, 0, 0.2);
  const auto r = verify_vanishing(p, Region::box1(-10, 10));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.off_target_exact);
}

TEST(Gap, VanishingShearDual) {
  const auto shear = make_lattice({{1.0, 1.0}, {0.0, 1.0}});
  const auto sigma = make_crystal(dual(shear), {make_vec({0.0, 0.0})});
  const auto p = make_gap_probe(sigma, 0, 0, 0.3);
  const auto r = verify_vanishing(p, Region::box(make_vec({-3.5, -3.5}), make_vec({3.5, 3.5})));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.off_target_exact);
  EXPECT_GE(r.points_checked, 25u);
}

TEST(Gap, VanishingRandomCrystals) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), f(0.05, 0.95);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 2, K = 1 + trial % 3, m = trial % 3;
    Mat g = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) += 0.3 * u(rng);
    const auto l = make_lattice(g);
    std::vector<Vec> q{Vec::Zero(n)};
    while (static_cast<int>(q.size()) < K) {
      Vec c(n);
      for (int i = 0; i < n; ++i) c[i] = f(rng);
      q.push_back(g * c);
    }
    const auto sigma = make_crystal(l, q);
    for (int k = 0; k < K; ++k) {
      const auto p = make_gap_probe(sigma, k, m, 0.2);
      const auto r = verify_vanishing(p, Region::ball(n, 3.0));
      EXPECT_TRUE(r.pass) << "trial " << trial << " k " << k;
      EXPECT_TRUE(r.off_target_exact) << "trial " << trial << " k " << k;
    }
  }
}

TEST(Gap, SupportBudgetAndHalfBudget) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0})});
  const auto p = make_gap_probe(sigma, 0, 0, 0.05);
  const auto full = verify_support(p, 2.0, 0.01);
  EXPECT_LT(full.outside_energy_fraction, 1e-6);
  EXPECT_TRUE(full.pass);
  EXPECT_LT(full.quadrature_error, 1e-3);
  const auto half = verify_support(p, 2.0, 0.01, scaled_budget(p, 0.5));
  EXPECT_GT(half.outside_energy_fraction, 1e-2);
  EXPECT_FALSE(half.pass);
}

TEST(Gap, SupportTwoCosetsOneDimensional) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0}), make_vec({0.25})});
  const auto p = make_gap_probe(sigma, 1, 1, 0.1);
  const auto r = verify_support(p, 5.0, 0.02);
  EXPECT_LT(r.outside_energy_fraction, 1e-6);
  EXPECT_GT(verify_support(p, 5.0, 0.02, scaled_budget(p, 0.5)).outside_energy_fraction, 1e-2);
}

TEST(Gap, SupportTwoDimensional) {
  const auto sigma = make_crystal(make_lattice({{1.0, 0.0}, {0.5, 1.0}}), {make_vec({0.0, 0.0})});
  const auto p = make_gap_probe(sigma, 0, 0, 0.3);
  const auto r = verify_support(p, 2.5, 0.07);
  EXPECT_LT(r.outside_energy_fraction, 1e-6);
  EXPECT_GT(verify_support(p, 2.5, 0.07, scaled_budget(p, 0.5)).outside_energy_fraction, 1e-2);
}

TEST(Gap, CoarseGridAndBudgetFlag) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0})});
  const auto p = make_gap_probe(sigma, 0, 0, 0.2);
  try {
    verify_support(p, 2.0, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
  const auto wide = make_gap_probe(sigma, 0, 0, 0.8);
  EXPECT_TRUE(wide.budget_exceeded);
  EXPECT_FALSE(verify_support(wide, 3.0, 0.1).pass);
}

TEST(Gap, ExtractScalarCoefficient) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0})});
  const auto p = make_gap_probe(sigma, 0, 0, 0.2);
  const auto t = scalar_comb({make_vec({0.0}), make_vec({1.0})}, {3.0, 5.0}, Region::box1(-2, 2));
  EXPECT_NEAR(std::abs(extract_coefficient(t, p) - 3.0), 0.0, 1e-12);
}

TEST(Gap, ExtractDerivativeCoefficient) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0})});
  const auto p = make_gap_probe(sigma, 0, 1, 0.2);
  DiffOperator d;
  d.add(MultiIndex{1}, 1.0);
  const auto t = make_comb({{make_vec({0.0}), d}}, Region::box1(-1, 1));
  EXPECT_NEAR(std::abs(extract_coefficient(t, p)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(extract_coefficient(t, p, MultiIndex{1}) - 1.0), 0.0, 1e-12);
}

TEST(Gap, ExtractIgnoresOffTargetPerturbations) {
  const auto l = make_lattice({{1.0, 0.2}, {0.0, 0.8}});
  const auto sigma = make_crystal(l, {make_vec({0.0, 0.0}), make_vec({0.5, 0.3})});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const int m = 1;
  const auto probe = make_gap_probe(sigma, 1, m, 0.2);
  const Vec eta = sigma.shifts()[1];
  const auto pts = grid_points(sigma, Region::ball(2, 4.0));
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<CombEntry> es;
    std::map<MultiIndex, cplx> planted;
    for (const Vec& s : pts) {
      DiffOperator op;
      for (const auto& i : multi_indices_up_to(2, m)) op.add(i, {u(rng), u(rng)});
      if ((s - eta).norm() < 1e-12)
        for (const auto& [i, c] : op.terms()) planted[i] = c;
      es.push_back({s, op});
    }
    const auto t = make_comb(es, Region::ball(2, 4.0));
    for (const auto& [i, c] : planted)
      EXPECT_NEAR(std::abs(extract_coefficient(t, probe, i) - c), 0.0, 1e-9) << trial;
  }
}

TEST(Gap, OffCrystalSupportRejected) {
  const auto sigma = make_crystal(integer_lattice(1), {make_vec({0.0})});
  const auto p = make_gap_probe(sigma, 0, 0, 0.2);
  const auto t = scalar_comb({make_vec({0.5})}, {1.0}, Region::box1(-1, 1));
  try {
    extract_coefficient(t, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportMismatch);
  }
}
