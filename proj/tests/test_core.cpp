#include <gtest/gtest.h>

#include <random>

#include "combforge/comb.hpp"
#include "combforge/pointset.hpp"

using namespace combforge;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidParams;
}

double brute_min_distance(const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, (pts[i] - pts[j]).norm());
  return best;
}

}  // namespace

// --- lattices ---------------------------------------------------------------

TEST(Lattice, BasicConstruction) {
  const auto z = make_lattice({{1.0}});
  EXPECT_EQ(z.det_abs(), 1.0);
  const auto d = make_lattice({{2.0, 0.0}, {0.0, 3.0}});
  EXPECT_NEAR(d.det_abs(), 6.0, 1e-15);
  EXPECT_NEAR(d.inverse()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(d.inverse()(1, 1), 1.0 / 3.0, 1e-15);
  const auto shear = make_lattice({{1.0, 1.0}, {0.0, 1.0}});
  EXPECT_TRUE(shear.contains(make_vec({5.0, 3.0})));
  EXPECT_NEAR((shear.coords(make_vec({5.0, 3.0})) - make_vec({2.0, 3.0})).norm(), 0.0, 1e-14);
  EXPECT_FALSE(shear.contains(make_vec({5.5, 3.0})));
  EXPECT_EQ(code_of([] { make_lattice({{1.0, 2.0}, {2.0, 4.0}}); }), ErrorCode::SingularMatrix);
}

TEST(Lattice, Dual) {
  EXPECT_EQ(dual(make_lattice({{1.0}})).generators()(0, 0), 1.0);
  EXPECT_EQ(dual(make_lattice({{2.0}})).generators()(0, 0), 0.5);
  const auto d = dual(make_lattice({{2.0, 0.0}, {0.0, 3.0}}));
  EXPECT_NEAR(d.generators()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(d.generators()(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.generators()(0, 1), 0.0, 1e-15);
}

TEST(Lattice, DualInvolutionRandom) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int t = 0; t < 50; ++t) {
    Mat g = Mat::Identity(3, 3);
    for (int i = 0; i < 9; ++i) g.data()[i] += u(rng);
    const auto l = make_lattice(g);
    const Mat back = dual(dual(l)).generators();
    EXPECT_LT((back - g).norm() / g.norm(), 1e-12);
  }
}

TEST(Lattice, ReduceMod) {
  const auto z = integer_lattice(1);
  auto r = reduce_mod(z, make_vec({3.25}));
  EXPECT_EQ(r.k[0], 3);
  EXPECT_NEAR(r.r[0], 0.25, 1e-15);
  r = reduce_mod(z, make_vec({-0.25}));
  EXPECT_EQ(r.k[0], -1);
  EXPECT_NEAR(r.r[0], 0.75, 1e-15);
  const auto l2 = make_lattice({{2.0, 0.0}, {0.0, 2.0}});
  r = reduce_mod(l2, make_vec({5.0, -1.0}));
  EXPECT_EQ(r.k[0], 2);
  EXPECT_EQ(r.k[1], -1);
  EXPECT_NEAR((r.r - make_vec({1.0, 1.0})).norm(), 0.0, 1e-15);
}

TEST(Lattice, ReduceModReconstructsRandom) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  const auto l = make_lattice({{1.3, 0.2}, {-0.4, 0.9}});
  for (int t = 0; t < 1000; ++t) {
    const Vec x = make_vec({u(rng), u(rng)});
    const auto r = reduce_mod(l, x);
    EXPECT_LT((l.generators() * r.k.cast<double>() + r.r - x).norm(), 1e-12 * x.norm());
    for (int i = 0; i < 2; ++i) {
      EXPECT_GE(r.frac[i], 0.0);
      EXPECT_LT(r.frac[i], 1.0);
    }
  }
}

TEST(Crystal, MakeCrystal) {
  const auto z = integer_lattice(1);
  EXPECT_EQ(make_crystal(z, {make_vec({0.0}), make_vec({1.0})}).size(), 1);
  const auto c = make_crystal(z, {make_vec({0.25}), make_vec({1.25}), make_vec({0.5})});
  ASSERT_EQ(c.size(), 2);
  EXPECT_NEAR(c.shifts()[0][0], 0.25, 1e-15);
  EXPECT_NEAR(c.shifts()[1][0], 0.5, 1e-15);
  EXPECT_EQ(code_of([&] { make_crystal(z, {}); }), ErrorCode::EmptyShifts);
}

TEST(Crystal, Points) {
  const auto z = integer_lattice(1);
  auto pts = crystal_points(make_crystal(z, {make_vec({0.0})}), Region::box1(-2.5, 2.5));
  ASSERT_EQ(pts.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(pts[i][0], i - 2.0, 1e-15);
  pts = crystal_points(make_crystal(z, {make_vec({0.0}), make_vec({0.25})}), Region::box1(0.0, 1.3));
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_NEAR(pts[1][0], 0.25, 1e-15);
  EXPECT_NEAR(pts[3][0], 1.25, 1e-15);
  pts = crystal_points(make_crystal(make_lattice({{2.0, 0.0}, {0.0, 2.0}}), {make_vec({0, 0})}), Region::ball(2, 2.1));
  EXPECT_EQ(pts.size(), 5u);
  EXPECT_EQ(code_of([&] {
              crystal_points(make_crystal(integer_lattice(2), {make_vec({0, 0})}), Region::ball(2, 1000.0), std::nullopt, 1000);
            }),
            ErrorCode::RegionTooLarge);
}

TEST(Crystal, PointsBelongAndLieInside) {
  const auto l = make_lattice({{1.0, 0.4}, {0.1, 0.8}});
  const auto c = make_crystal(l, {make_vec({0, 0}), make_vec({0.3, 0.2}), make_vec({0.7, 0.1})});
  const Region w = Region::ball(make_vec({0.5, -0.2}), 6.0);
  const auto pts = crystal_points(c, w);
  // Oracle: count by brute force over a generous integer box.
  std::size_t count = 0;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j)
      for (const Vec& q : c.shifts())
        if (w.contains(l.generators() * make_vec({double(i), double(j)}) + q, l.default_tol())) ++count;
  EXPECT_EQ(pts.size(), count);
  for (const Vec& p : pts) {
    EXPECT_TRUE(w.contains(p, 1e-9));
    EXPECT_GE(c.coset_of(p, 1e-9), 0);
  }
}

TEST(Lattice, Equivalent) {
  EXPECT_TRUE(equivalent(make_lattice({{1.0}}), make_lattice({{1.0}})));
  EXPECT_TRUE(equivalent(make_lattice({{1.0, 1.0}, {0.0, 1.0}}), integer_lattice(2)));
  EXPECT_FALSE(equivalent(make_lattice({{2.0}}), make_lattice({{1.0}})));
  EXPECT_EQ(code_of([] { equivalent(integer_lattice(1), integer_lattice(2)); }), ErrorCode::DimensionMismatch);
}

TEST(Lattice, EquivalenceRelationOnUnimodularMultiples) {
  const Mat g = make_lattice({{1.2, 0.3}, {0.1, 0.9}}).generators();
  std::vector<LatticeBasis> ls;
  const int us[][4] = {{1, 0, 0, 1}, {1, 1, 0, 1}, {2, 1, 1, 1}, {0, 1, -1, 0}, {3, 2, 1, 1}};
  for (const auto& u : us) {
    Mat m(2, 2);
    m << u[0], u[1], u[2], u[3];
    ls.push_back(make_lattice(g * m));
  }
  for (const auto& a : ls)
    for (const auto& b : ls) {
      EXPECT_TRUE(equivalent(a, b));
      EXPECT_EQ(equivalent(a, b), equivalent(b, a));
    }
}

// --- point sets -------------------------------------------------------------

TEST(PointSet, MinDistanceExamples) {
  auto r = min_distance(make_point_set({make_vec({0.0}), make_vec({0.5}), make_vec({2.0})}));
  EXPECT_EQ(r.min_distance, 0.5);
  r = min_distance(make_point_set({make_vec({0, 0}), make_vec({1, 0}), make_vec({0, 1}), make_vec({3, 4})}));
  EXPECT_EQ(r.min_distance, 1.0);
  EXPECT_EQ(code_of([] { min_distance(make_point_set({make_vec({0.0})})); }), ErrorCode::TooFewPoints);
  EXPECT_EQ(code_of([] { make_point_set({make_vec({0.0}), make_vec({0.0})}); }), ErrorCode::DuplicatePoint);
}

TEST(PointSet, MinDistanceLargeGrid) {
  std::vector<Vec> pts;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) pts.push_back(make_vec({double(i), double(j)}));
  EXPECT_EQ(min_distance(make_point_set(pts)).min_distance, 1.0);
  std::vector<Vec> sub(pts.begin(), pts.begin() + 200);
  EXPECT_EQ(brute_min_distance(sub), 1.0);
}

TEST(PointSet, MinDistanceMatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 3;
    const int count = 2 + static_cast<int>(rng() % 499);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i) {
      Vec p(n);
      for (int d = 0; d < n; ++d) p[d] = u(rng);
      pts.push_back(p);
    }
    const auto r = min_distance(make_point_set(pts));
    EXPECT_EQ(r.min_distance, brute_min_distance(pts)) << t;
    EXPECT_EQ((r.witness->first - r.witness->second).norm(), r.min_distance);
  }
}

TEST(PointSet, DifferenceSetExamples) {
  auto d = difference_set(make_point_set({make_vec({0.0}), make_vec({1.0}), make_vec({3.0})}), 10.0);
  ASSERT_EQ(d.size(), 7u);
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(d.points()[i][0], i - 3.0, 1e-12);
  std::vector<Vec> z;
  for (int k = -5; k <= 5; ++k) z.push_back(make_vec({double(k)}));
  EXPECT_EQ(difference_set(make_point_set(z), 100.0).size(), 21u);
  const double s = std::sqrt(2.0);
  const auto two = make_point_set({make_vec({0.0}), make_vec({1.0}), make_vec({s}), make_vec({1.0 + s})});
  const auto dd = difference_set(two, 10.0);
  bool has1 = false, hass = false;
  for (const Vec& p : dd.points()) {
    has1 |= std::abs(p[0] - 1.0) < 1e-12;
    hass |= std::abs(p[0] - (s - 1.0)) < 1e-12;
  }
  EXPECT_TRUE(has1 && hass);
  // Growing window: separation of the differences collapses below that of the set.
  std::vector<Vec> big;
  for (int k = 0; k <= 10; ++k) big.push_back(make_vec({double(k)}));
  for (int k = 1; k <= 7; ++k) big.push_back(make_vec({s * k}));
  const auto bs = make_point_set(big);
  EXPECT_GT(min_distance(bs).min_distance, 0.07);
  EXPECT_LT(min_distance(difference_set(bs, 20.0)).min_distance, 0.03);
}

TEST(PointSet, DifferenceSetSymmetricAndInsideShiftCrystal) {
  const auto l = make_lattice({{1.0, 0.3}, {0.0, 1.1}});
  const auto c = make_crystal(l, {make_vec({0, 0}), make_vec({0.4, 0.5})});
  const auto ps = make_point_set(crystal_points(c, Region::ball(2, 4.0)), Region::ball(2, 4.0));
  const auto d = difference_set(ps, 3.0);
  std::vector<Vec> diffs;
  for (const Vec& a : c.shifts())
    for (const Vec& b : c.shifts()) diffs.push_back(a - b);
  const auto cd = make_crystal(l, diffs);
  SpatialIndex idx(2, 0.1);
  for (std::size_t i = 0; i < d.size(); ++i) idx.insert(d.points()[i], i);
  EXPECT_TRUE(idx.find_within(Vec::Zero(2), 1e-12).has_value());
  for (const Vec& r : d.points()) {
    EXPECT_TRUE(idx.find_within(-r, 1e-9).has_value());
    EXPECT_GE(cd.coset_of(r, 1e-9), 0);
  }
}

TEST(PointSet, DifferenceSetCap) {
  std::vector<Vec> z;
  for (int k = 0; k < 50; ++k) z.push_back(make_vec({k * 0.37}));
  EXPECT_EQ(code_of([&] { difference_set(make_point_set(z), 100.0, std::nullopt, 10); }), ErrorCode::OutputCap);
}

TEST(PointSet, HypothesisCheck) {
  const auto c = make_crystal(integer_lattice(1), {make_vec({0.0}), make_vec({0.25})});
  const auto ps = make_point_set(crystal_points(c, Region::box1(-20, 20)), Region::box1(-20, 20));
  const auto r = hypothesis_check(ps, 0.1, 10.0);
  EXPECT_TRUE(r.lambda_ud);
  EXPECT_TRUE(r.diff_ud);
  EXPECT_NEAR(r.d_lambda, 0.25, 1e-12);
  EXPECT_NEAR(r.d_diff, 0.25, 1e-9);
  EXPECT_TRUE(r.windowed);

  std::vector<Vec> pts;
  for (int k = -50; k <= 50; ++k) pts.push_back(make_vec({double(k)}));
  for (int k = -35; k <= 35; ++k)
    if (k != 0) pts.push_back(make_vec({std::sqrt(2.0) * k}));
  const auto u = hypothesis_check(make_point_set(pts, Region::box1(-50, 50)), 0.05, 100.0);
  EXPECT_FALSE(u.diff_ud);

  const auto single = hypothesis_check(make_point_set({make_vec({1.0})}), 0.1, 5.0);
  EXPECT_TRUE(single.lambda_ud);
  EXPECT_TRUE(std::isinf(single.d_lambda));
  EXPECT_TRUE(single.diff_ud);
  EXPECT_EQ(single.diff_size, 1u);
}

// --- combs ------------------------------------------------------------------

TEST(Comb, MakeComb) {
  const auto t = make_comb({{make_vec({0.0}), DiffOperator{{MultiIndex{0}, 1.0}}}}, Region::box1(-1, 1));
  EXPECT_EQ(t.order(), 0);
  const auto d = make_comb({{make_vec({1.0}), DiffOperator{{MultiIndex{1}, 2.0}}}}, Region::box1(-2, 2));
  EXPECT_EQ(d.order(), 1);
  EXPECT_EQ(d.entries()[0].op.norm(), 2.0);
  EXPECT_EQ(code_of([] {
              make_comb({{make_vec({0.0}), DiffOperator{{MultiIndex{0}, 1.0}}},
                         {make_vec({0.0}), DiffOperator{{MultiIndex{0}, 1.0}}}},
                        Region::box1(-1, 1));
            }),
            ErrorCode::DuplicatePoint);
  EXPECT_EQ(code_of([] { make_comb({{make_vec({0.0}), DiffOperator{}}}, Region::box1(-1, 1)); }), ErrorCode::EmptyOperator);
}

TEST(Comb, EvaluateExamples) {
  const auto g = gaussian(1);
  const auto delta = unit_comb({make_vec({0.0})}, Region::box1(-1, 1));
  EXPECT_NEAR(std::abs(evaluate(delta, g) - 1.0), 0.0, 1e-15);
  // delta' against a function with f'(0) = c.
  GaussianParams gp;
  gp.center = make_vec({0.4});
  const auto f = gaussian(1, gp);
  const cplx c = f.derivative(MultiIndex{1}, make_vec({0.0}));
  const auto dp = make_comb({{make_vec({0.0}), DiffOperator{{MultiIndex{1}, 1.0}}}}, Region::box1(-1, 1));
  EXPECT_NEAR(std::abs(evaluate(dp, f) + c), 0.0, 1e-15);
  std::vector<Vec> pts;
  double direct = 0.0;
  for (int k = -5; k <= 5; ++k) {
    pts.push_back(make_vec({double(k)}));
    direct += std::exp(-kPi * k * k);
  }
  EXPECT_NEAR(evaluate(unit_comb(pts, Region::box1(-5.5, 5.5)), g).real(), direct, 1e-14);
  EXPECT_NEAR(direct, 1.0864348112, 1e-9);
}

TEST(Comb, EvaluateMatchesDirectSummation) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 2;
    std::vector<Vec> pts;
    std::vector<cplx> ws;
    for (int i = 0; i < 30; ++i) {
      Vec p(n);
      for (int d = 0; d < n; ++d) p[d] = u(rng);
      pts.push_back(p);
      ws.push_back({u(rng), u(rng)});
    }
    GaussianParams gp;
    gp.center = Vec::Zero(n);
    gp.modulation = Vec::Zero(n);
    for (int d = 0; d < n; ++d) {
      gp.center[d] = u(rng) / 3.0;
      gp.modulation[d] = u(rng) / 3.0;
    }
    gp.width = 1.0 + std::abs(u(rng));
    const auto phi = gaussian(n, gp);
    cplx direct{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec x = pts[i];
      direct += ws[i] * std::exp(kJ * gp.modulation.dot(x)) * std::exp(-kPi * (x - gp.center).squaredNorm() / (gp.width * gp.width));
    }
    const cplx v = evaluate(scalar_comb(pts, ws, Region::ball(n, 10.0)), phi);
    EXPECT_LT(std::abs(v - direct), 1e-12 * std::max(1.0, std::abs(direct))) << t;
  }
}

TEST(Comb, EvaluateLinearity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Vec> pts;
  std::vector<cplx> a, b;
  for (int i = 0; i < 20; ++i) {
    pts.push_back(make_vec({u(rng)}));
    a.push_back({u(rng), u(rng)});
    b.push_back({u(rng), u(rng)});
  }
  const cplx s{0.7, -0.3};
  std::vector<cplx> ab;
  for (std::size_t i = 0; i < a.size(); ++i) ab.push_back(a[i] + s * b[i]);
  const Region w = Region::box1(-2, 2);
  const auto f = gaussian(1, 1.3), g = gaussian(1, 0.7);
  const cplx lhs = evaluate(scalar_comb(pts, ab, w), sum(f, scaled(g, s)));
  const cplx rhs = evaluate(scalar_comb(pts, a, w), f) + s * evaluate(scalar_comb(pts, b, w), f) +
                   s * evaluate(scalar_comb(pts, a, w), g) + s * s * evaluate(scalar_comb(pts, b, w), g);
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
}

TEST(Comb, IntegrationByPartsSign) {
  // evaluate(D-comb, phi) = -evaluate(base comb, phi').
  const std::vector<TestFunction> lib{gaussian(1, 1.0), gaussian(1, 2.5), sinc_power(1, 2, 1.0)};
  std::vector<Vec> pts{make_vec({-0.3}), make_vec({0.2}), make_vec({1.1})};
  std::vector<CombEntry> dcomb;
  for (const Vec& p : pts) dcomb.push_back({p, DiffOperator{{MultiIndex{1}, 1.0}}});
  const auto t = make_comb(dcomb, Region::box1(-2, 2));
  for (const auto& phi : lib) {
    cplx base{};
    for (const Vec& p : pts) base += phi.derivative(MultiIndex{1}, p);
    EXPECT_EQ(evaluate(t, phi), -base) << phi.name();
  }
}

TEST(Comb, OrderTooLow) {
  const auto low = TestFunction(1, 0, [](const Vec&, int o) { return Jet::constant(1, o, 1.0); }, "const");
  const auto t = make_comb({{make_vec({0.0}), DiffOperator{{MultiIndex{1}, 1.0}}}}, Region::box1(-1, 1));
  EXPECT_EQ(code_of([&] { evaluate(t, low); }), ErrorCode::OrderTooLow);
}

TEST(Comb, Adjoint) {
  const auto d0 = unit_comb({make_vec({0.0})}, Region::box1(-1, 1));
  EXPECT_EQ(adjoint(d0).entries()[0].point[0], 0.0);
  const auto two = scalar_comb({make_vec({1.0})}, {2.0}, Region::box1(-2, 2));
  EXPECT_EQ(adjoint(two).entries()[0].point[0], -1.0);
  EXPECT_EQ(adjoint(two).entries()[0].op.coeff(MultiIndex{0}), cplx{2.0});
  const auto id = make_comb({{make_vec({1.0}), DiffOperator{{MultiIndex{1}, cplx{0, 1}}}}}, Region::box1(-2, 2));
  const auto a = adjoint(id);
  EXPECT_EQ(a.entries()[0].point[0], -1.0);
  EXPECT_EQ(a.entries()[0].op.coeff(MultiIndex{1}), (cplx{0, 1}));
}

TEST(Comb, AdjointInvolutionAndConjugation) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<CombEntry> es;
  for (int i = 0; i < 15; ++i) {
    DiffOperator op;
    op.add(MultiIndex{0, 0}, {u(rng), u(rng)});
    op.add(MultiIndex{1, 0}, {u(rng), u(rng)});
    op.add(MultiIndex{1, 1}, {u(rng), u(rng)});
    es.push_back({make_vec({u(rng), u(rng)}), op});
  }
  const auto t = make_comb(es, Region::ball(2, 3.0));
  const auto tt = adjoint(adjoint(t));
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(tt.entries()[i].point, t.entries()[i].point);
    EXPECT_EQ(tt.entries()[i].op.terms(), t.entries()[i].op.terms());
  }
  GaussianParams gp;
  gp.center = make_vec({0.2, -0.1});
  gp.modulation = make_vec({0.3, 0.5});
  const auto phi = gaussian(2, gp);
  const cplx lhs = evaluate(adjoint(t), phi);
  const cplx rhs = std::conj(evaluate(t, conj_reflect(phi)));
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST(Comb, Temperedness) {
  std::vector<Vec> pts;
  for (int k = -200; k <= 200; ++k) pts.push_back(make_vec({double(k)}));
  const auto unit = temperedness_diagnostic(unit_comb(pts, Region::box1(-200, 200)), 2);
  EXPECT_TRUE(unit.bounded);
  EXPECT_LT(unit.partial_sum, 1.0 + 2.0 * kPi * kPi / 6.0);
  double direct = 0.0;
  for (int k = -200; k <= 200; ++k) direct += 1.0 / ((std::abs(k) + 1.0) * (std::abs(k) + 1.0));
  EXPECT_NEAR(unit.partial_sum, direct, 1e-12);

  std::vector<cplx> grow;
  std::vector<Vec> gp;
  for (int k = -60; k <= 60; ++k) {
    gp.push_back(make_vec({double(k)}));
    grow.push_back(std::exp(std::abs(double(k))));
  }
  EXPECT_FALSE(temperedness_diagnostic(scalar_comb(gp, grow, Region::box1(-60, 60)), 10).bounded);

  const auto single = temperedness_diagnostic(unit_comb({make_vec({0.0})}, Region::box1(-1, 1)), 3);
  EXPECT_EQ(single.partial_sum, 1.0);
  EXPECT_TRUE(single.bounded);
}

TEST(TestFunctions, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  GaussianParams gp;
  gp.center = make_vec({0.3, -0.2});
  gp.modulation = make_vec({0.4, 0.1});
  gp.width = 1.4;
  const Mat h = Mat::Identity(2, 2);
  const std::vector<TestFunction> lib{gaussian(2, gp), sinc_power(2, 3, 0.7),
                                      make_psi_k(h, {make_vec({0, 0}), make_vec({0.5, 0.25})}, 0, 1, gaussian(2, 3.0))};
  for (const auto& f : lib)
    for (int t = 0; t < 10; ++t) {
      const Vec x = make_vec({u(rng), u(rng)});
      for (int d = 0; d < 2; ++d) {
        const double eps = 1e-5;
        Vec e = Vec::Zero(2);
        e[d] = eps;
        const cplx fd = (f.value(x + e) - f.value(x - e)) / (2 * eps);
        const cplx an = f.derivative(MultiIndex::unit(2, d), x);
        EXPECT_LT(std::abs(fd - an), 1e-6 * std::max(1.0, std::abs(an))) << f.name();
      }
    }
}

TEST(TestFunctions, GaussianPartnerIsTransform) {
  // Midpoint quadrature of int exp(-j xi x) g(x) dx for a modulated, shifted Gaussian.
  GaussianParams gp;
  gp.center = make_vec({0.3});
  gp.modulation = make_vec({-0.2});
  gp.width = 0.8;
  const auto g = gaussian(1, gp);
  for (double xi : {0.0, 0.5, -1.2}) {
    cplx s{};
    const double h = 1e-3;
    for (double x = -8.0; x < 8.0; x += h) s += std::exp(-kJ * xi * (x + h / 2)) * g.value(make_vec({x + h / 2})) * h;
    EXPECT_LT(std::abs(s - g.fourier_partner().value(make_vec({xi}))), 1e-10);
  }
}
