#pragma once

// Built-in fixtures and verification suites. Each check compares a module
// operation against an independent oracle and returns a JSON summary; the
// summaries carry no timings so reports are reproducible byte for byte.

#include <random>

#include "io.hpp"

namespace combforge {

// ---------------------------------------------------------------------------
// fixtures

namespace fixtures {

inline PointSet observe(const Crystal& c, const Region& w) { return make_point_set(crystal_points(c, w), w); }

/// Z^2 together with a shifted copy of sqrt(2) Z x Z, cut to a strip. The two
/// period lattices are incommensurate, so no crystal fits the union.
inline PointSet incommensurate_strip(double half_length = 50.0) {
  std::vector<Vec> pts;
  const int a = static_cast<int>(std::floor(half_length));
  const int b = static_cast<int>(std::floor(half_length / std::sqrt(2.0)));
  for (int i = -a; i <= a; ++i)
    for (int j = -2; j <= 2; ++j) pts.push_back(make_vec({double(i), double(j)}));
  for (int i = -b; i <= b; ++i)
    for (int j = -2; j <= 1; ++j) pts.push_back(make_vec({std::sqrt(2.0) * i, j + 0.5}));
  return make_point_set(pts, Region::box(make_vec({-half_length, -2}), make_vec({half_length, 2})));
}

/// Union of Z and alpha Z on [lo, hi] with coincident points merged.
inline std::vector<Vec> two_lattices_1d(double alpha, double lo, double hi) {
  std::vector<Vec> pts;
  for (int k = static_cast<int>(std::ceil(lo)); k <= static_cast<int>(std::floor(hi)); ++k) pts.push_back(make_vec({double(k)}));
  SpatialIndex idx(1, 1.0);
  for (std::size_t i = 0; i < pts.size(); ++i) idx.insert(pts[i], i);
  for (int k = static_cast<int>(std::ceil(lo / alpha)); k <= static_cast<int>(std::floor(hi / alpha)); ++k) {
    const Vec p = make_vec({alpha * k});
    if (idx.find_within(p, 1e-9)) continue;
    idx.insert(p, pts.size());
    pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end(), lex_less);
  return pts;
}

// Whether some difference of shifts permutes the cosets, which would make
// the period lattice finer than l. Such fixtures are redrawn (with margin).
inline bool has_extra_period(const LatticeBasis& l, const std::vector<Vec>& q) {
  for (std::size_t a = 0; a < q.size(); ++a)
    for (std::size_t b = 0; b < q.size(); ++b) {
      if (a == b) continue;
      double worst = 0.0;
      for (const Vec& s : q) {
        double best = 1e9;
        for (const Vec& t : q) best = std::min(best, l.distance_to_lattice(s + q[a] - q[b] - t));
        worst = std::max(worst, best);
      }
      if (worst < 0.1) return true;
    }
  return false;
}

inline LatticeBasis random_lattice(std::mt19937_64& rng, int n, double spread = 0.35) {
  std::uniform_real_distribution<double> u(-spread, spread);
  while (true) {
    Mat g = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) += u(rng);
    if (std::abs(g.determinant()) >= 0.5) return make_lattice(g);
  }
}

/// Well separated random crystal (shift gaps >= 0.15) whose period lattice is exactly L.
inline Crystal random_crystal(std::mt19937_64& rng, int n, int K) {
  std::uniform_real_distribution<double> f(0.0, 1.0);
  while (true) {
    const auto l = random_lattice(rng, n);
    std::vector<Vec> q{Vec::Zero(n)};
    int guard = 0;
    while (static_cast<int>(q.size()) < K && ++guard < 1000) {
      Vec c(n);
      for (int i = 0; i < n; ++i) c[i] = f(rng);
      const Vec cand = l.generators() * c;
      bool ok = true;
      for (const Vec& o : q)
        if (l.distance_to_lattice(cand - o) < 0.15) ok = false;
      if (ok) q.push_back(cand);
    }
    if (static_cast<int>(q.size()) == K && !has_extra_period(l, q)) return make_crystal(l, q);
  }
}

/// All integer vectors in [-r, r]^n, first axis slowest.
inline std::vector<Vec> integer_box(int n, int r) {
  std::vector<Vec> out;
  Vec k = Vec::Constant(n, -r);
  while (true) {
    out.push_back(k);
    int axis = n - 1;
    while (axis >= 0 && ++k[axis] > r) k[axis--] = -r;
    if (axis < 0) break;
  }
  return out;
}

/// Crystal comb on the whole cells G [-N, N)^n, one weight per coset.
inline WeightedComb crystal_comb(const Crystal& c, const std::vector<cplx>& w, int N) {
  const int n = c.dim();
  const auto& l = c.lattice();
  std::vector<Vec> pts;
  std::vector<cplx> ws;
  std::vector<long> k(static_cast<std::size_t>(n), -N);
  while (true) {
    Vec kv(n);
    for (int i = 0; i < n; ++i) kv[i] = double(k[static_cast<std::size_t>(i)]);
    for (std::size_t s = 0; s < c.shifts().size(); ++s) {
      pts.push_back(l.generators() * kv + c.shifts()[s]);
      ws.push_back(w[s]);
    }
    int axis = 0;
    while (axis < n && ++k[static_cast<std::size_t>(axis)] >= N) k[static_cast<std::size_t>(axis++)] = -N;
    if (axis == n) break;
  }
  Vec lo = pts.front(), hi = pts.front();
  for (const Vec& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo.array() -= 0.5;
  hi.array() += 0.5;
  return scalar_comb(pts, ws, Region::box(lo, hi));
}

/// Scalar comb with weights f(p) on the crystal points in w (zero weights dropped).
inline WeightedComb weights_on(const Crystal& c, const Region& w, const std::function<cplx(const Vec&)>& f) {
  std::vector<CombEntry> es;
  for (const Vec& p : crystal_points(c, w)) {
    const cplx v = f(p);
    if (v != cplx{}) es.push_back({p, DiffOperator::scalar(c.dim(), v)});
  }
  return make_comb(std::move(es), w);
}

/// Weight of a Poisson comb with multiplication-only operators at p.
inline cplx poisson_weight(const PoissonComb& pc, const Vec& p, double tol = 1e-9) {
  cplx s{};
  for (const auto& t : pc.terms()) {
    if (distance_mod(pc.lattice(), p, t.shift) > tol) continue;
    cplx v{};
    for (const auto& [k, cf] : t.op.terms())
      if (k.second.is_zero()) v += cf * monomial(p, k.first);
    s += phase_factor(t.phase, p) * v;
  }
  return s;
}

}  // namespace fixtures

// ---------------------------------------------------------------------------
// checks

struct CheckResult {
  std::string name;
  bool pass = false;
  json details;
};

inline json to_json(const CheckResult& c) { return {{"name", c.name}, {"pass", c.pass}, {"details", c.details}}; }

namespace detail {

inline double longest_generator(const LatticeBasis& l) {
  double h = 0.0;
  for (int i = 0; i < l.dim(); ++i) h = std::max(h, l.generator(i).norm());
  return h;
}

/// Radius that keeps the outer shell of both pairings below the tail bound
/// for Gaussians of width up to `width` (and their transforms).
inline double duality_radius(const LatticeBasis& l, double width) {
  return default_truncation_radius(width) + std::max(longest_generator(l), longest_generator(dual(l))) + 1.0;
}

inline std::vector<TestFunction> gaussian_family(int n) {
  GaussianParams gp;
  gp.center = Vec::Constant(n, 0.1);
  gp.modulation = Vec::Constant(n, -0.2);
  gp.width = 1.4;
  return {gaussian(n, 0.8), gaussian(n, 1.0), gaussian(n, gp)};
}

inline std::string lattice_label(const LatticeBasis& l) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < l.generators().rows(); ++r) {
    if (r) s += ";";
    for (Eigen::Index c = 0; c < l.generators().cols(); ++c) {
      if (c) s += ",";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", l.generators()(r, c));
      s += buf;
    }
  }
  return s + "]";
}

}  // namespace detail

/// Unit combs on several lattices against three Gaussian widths.
inline CheckResult check_poisson_summation(std::uint64_t seed = 42, double tol = 1e-9) {
  std::mt19937_64 rng(seed);
  std::vector<LatticeBasis> ls{integer_lattice(1), make_lattice({{2.0}}), make_lattice({{1.0, 1.0}, {0.0, 1.0}}),
                               fixtures::random_lattice(rng, 2, 0.3)};
  CheckResult r{"poisson_summation", true, json::array()};
  for (const auto& l : ls) {
    const int n = l.dim();
    const auto pc = make_poisson_comb(l, {{Vec::Zero(n), Vec::Zero(n), PolyDiffOperator::constant(n, 1.0)}});
    const double R = detail::duality_radius(l, 1.4);
    const double periods = R / detail::longest_generator(l);
    const auto rep = verify_transform(pc, detail::gaussian_family(n), R, tol);
    const bool ok = rep.pass && periods <= 10.0;
    r.pass = r.pass && ok;
    r.details.push_back({{"lattice", detail::lattice_label(l)},
                         {"trunc_radius", num(R)},
                         {"trunc_periods", num(periods)},
                         {"max_rel_deviation", num(rep.max_rel_deviation)},
                         {"pass", ok}});
  }
  return r;
}

/// Operators, shifts and phases; the negative control uses |det| in place of 1/|det|.
inline CheckResult check_operator_rule(double tol = 1e-9) {
  struct Case {
    LatticeBasis l;
    std::string label;
    PolyDiffOperator op;
  };
  using P = PolyDiffOperator;
  std::vector<Case> cases;
  const auto add1 = [&](const std::string& label, const P& op) {
    cases.push_back({integer_lattice(1), "Z " + label, op});
    cases.push_back({make_lattice({{2.0}}), "2Z " + label, op});
  };
  add1("1", P::constant(1, 1.0));
  add1("x", P::x(1, 0));
  add1("D", P::d(1, 0));
  add1("xD", P::x(1, 0) * P::d(1, 0));
  add1("x^2", P::x(1, 0).pow(2));
  add1("D^2", P::d(1, 0).pow(2));
  const auto l2 = make_lattice({{1.5, 0.3}, {0.0, 0.8}});
  cases.push_back({l2, "2D x1", P::x(2, 0)});
  cases.push_back({l2, "2D D2", P::d(2, 1)});
  cases.push_back({l2, "2D x1D2", P::x(2, 0) * P::d(2, 1)});

  CheckResult r{"operator_rule", true, json::object()};
  json rows = json::array();
  double worst = 0.0, weakest_control = std::numeric_limits<double>::infinity();
  for (const auto& c : cases) {
    const int n = c.l.dim();
    for (double qs : {0.0, 0.25})
      for (double es : {0.0, 0.3}) {
        Vec q = Vec::Zero(n), eta = Vec::Zero(n);
        q[0] = qs;
        eta[0] = es;
        const auto pc = make_poisson_comb(c.l, {{eta, q, c.op}});
        // An off-centre member keeps odd operators from pairing to zero.
        GaussianParams off;
        off.center = Vec::Constant(n, 0.6);
        off.modulation = Vec::Constant(n, 0.35);
        off.width = 1.2;
        auto tests = detail::gaussian_family(n);
        tests.push_back(gaussian(n, off));
        const double R = detail::duality_radius(c.l, 1.4) + 1.0;
        const auto rep = verify_transform(pc, tests, R, tol);
        worst = std::max(worst, rep.max_rel_deviation);
        json row{{"case", c.label},
                 {"q", num(qs)},
                 {"eta", num(es)},
                 {"max_rel_deviation", num(rep.max_rel_deviation)},
                 {"pass", rep.pass}};
        r.pass = r.pass && rep.pass;
        if (std::abs(c.l.det_abs() - 1.0) > 1e-12) {
          // Relative to the pairing itself; pairings that vanish by symmetry
          // cannot see a wrong constant and are skipped.
          const double v = c.l.det_abs();
          const auto wrong = scaled(fourier_comb(pc), v * v);
          const auto neg = verify_transform(pc, tests, R, tol, wrong);
          double dev = 0.0;
          for (const auto& chk : neg.checks)
            if (std::abs(chk.direct_side) > 1e-6) dev = std::max(dev, chk.abs_deviation / std::abs(chk.direct_side));
          row["control_deviation"] = num(dev);
          weakest_control = std::min(weakest_control, dev);
        }
        rows.push_back(row);
      }
  }
  // The control must miss by at least six orders of magnitude beyond tol.
  const bool control_ok = weakest_control >= 1e6 * tol;
  r.pass = r.pass && control_ok;
  r.details = {{"cases", rows},
               {"max_rel_deviation", num(worst)},
               {"weakest_control_deviation", num(weakest_control)},
               {"control_ok", control_ok}};
  return r;
}

inline PoissonComb random_poisson_comb(std::mt19937_64& rng, int n, int max_terms, int max_degree, bool multiplication_only) {
  std::uniform_real_distribution<double> u(0.0, 1.0), c(-1.0, 1.0);
  const auto l = fixtures::random_lattice(rng, n, 0.3);
  const auto ld = dual(l);
  const int terms = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_terms));
  std::vector<PoissonTerm> ts;
  const auto idx = multi_indices_up_to(n, max_degree);
  for (int t = 0; t < terms; ++t) {
    Vec eu(n), qu(n);
    for (int i = 0; i < n; ++i) {
      eu[i] = u(rng);
      qu[i] = u(rng);
    }
    PolyDiffOperator op(n);
    const int mons = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < mons; ++k) {
      const MultiIndex& a = idx[rng() % idx.size()];
      MultiIndex b(n);
      if (!multiplication_only) {
        const auto rest = multi_indices_up_to(n, max_degree - a.total());
        b = rest[rng() % rest.size()];
      }
      op.add(a, b, {c(rng), c(rng)});
    }
    if (op.empty()) op = PolyDiffOperator::constant(n, 1.0);
    ts.push_back({ld.generators() * eu, l.generators() * qu, op});
  }
  return make_poisson_comb(l, std::move(ts));
}

inline CheckResult check_involution(std::uint64_t seed = 42, int trials = 50) {
  std::mt19937_64 rng(seed + 1);
  CheckResult r{"fourier_involution", true, json::object()};
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto pc = random_poisson_comb(rng, 1 + t % 2, 3, 3, false);
    const double dev = structural_deviation(fourier_comb(fourier_comb(pc)), reflect(pc));
    worst = std::max(worst, dev);
  }
  r.pass = worst < 1e-12;
  r.details = {{"trials", trials}, {"max_coefficient_deviation", num(worst)}};
  return r;
}

/// Support inside the windowed difference set and Wiener positivity of the
/// diffraction at dual-lattice points, on windows of 50 periods.
inline CheckResult check_autocorr() {
  struct Fixture {
    Crystal c;
    std::vector<cplx> w;
    int N;
    double radius;
  };
  std::vector<Fixture> fx;
  fx.push_back({make_crystal(integer_lattice(1), {make_vec({0.0}), make_vec({0.3})}), {1.0, cplx{0.5, 0.5}}, 25, 60.0});
  fx.push_back({make_crystal(make_lattice({{1.0, 0.0}, {0.3, 1.2}}),
                             {make_vec({0.0, 0.0}), make_vec({0.5, 0.1}), make_vec({0.2, 0.7})}),
                {1.0, cplx{-0.7, 0.2}, 0.4},
                25,
                120.0});
  CheckResult r{"autocorrelation", true, json::array()};
  for (const auto& f : fx) {
    const int n = f.c.dim();
    const auto t = fixtures::crystal_comb(f.c, f.w, f.N);
    const auto a = autocorr(t, gaussian(n, 4.0), f.radius);
    const auto pts = t.support();
    SpatialIndex idx(n, 1.0);
    for (std::size_t i = 0; i < pts.size(); ++i) idx.insert(pts[i], i);
    const Vec mid = t.window().center();
    std::size_t outside = 0;
    for (const auto& e : a.base.entries()) {
      // A witness pair straddling the window centre is found locally; the
      // exhaustive scan is the fallback.
      bool found = false;
      idx.for_neighbors(mid - 0.5 * e.point, [&](const Vec& q, std::size_t) {
        if (!found && idx.find_within(q + e.point, 1e-9)) found = true;
      });
      if (!found && !in_difference_set(idx, pts, e.point, 1e-9)) ++outside;
    }
    const auto ld = dual(f.c.lattice());
    std::vector<Vec> sig;
    for (const Vec& kv : fixtures::integer_box(n, 3)) sig.push_back(ld.generators() * kv);
    const auto d = diffraction_of_autocorr(a, sig);
    const bool ok = outside == 0 && d.min_real >= -1e-6 && d.max_abs_imag <= 1e-6;
    r.pass = r.pass && ok;
    r.details.push_back({{"dim", n},
                         {"cosets", f.c.size()},
                         {"periods", 2 * f.N},
                         {"autocorr_points", a.base.size()},
                         {"outside_difference_set", outside},
                         {"dual_points", sig.size()},
                         {"min_real", num(d.min_real)},
                         {"max_abs_imag", num(d.max_abs_imag)},
                         {"pass", ok}});
  }
  return r;
}

inline bool same_shifts(const Crystal& a, const Crystal& b, double tol = 1e-7) {
  if (a.size() != b.size()) return false;
  for (const Vec& s : a.shifts())
    if (b.coset_of(s, tol) < 0) return false;
  return true;
}

inline CheckResult check_detection(std::uint64_t seed = 42, int trials = 100) {
  std::mt19937_64 rng(seed + 2);
  CheckResult r{"detection", true, json::object()};
  int recovered = 0;
  json failures = json::array();
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + t % 2, K = 1 + (t / 2) % 3;
    const auto c = fixtures::random_crystal(rng, n, K);
    const Region w = n == 1 ? Region::box1(-12, 12) : Region::ball(2, 9.0);
    const auto rep = detect_crystal(fixtures::observe(c, w));
    const bool ok = rep.verdict == Verdict::Crystal && equivalent(rep.crystal->lattice(), c.lattice(), 1e-6) &&
                    same_shifts(*rep.crystal, c) && rep.coverage_residual == 0.0;
    if (ok) ++recovered;
    else failures.push_back({{"trial", t}, {"verdict", to_string(rep.verdict)}, {"note", rep.note}});
  }
  const auto strip = fixtures::incommensurate_strip();
  const auto srep = detect_crystal(strip);
  const double own_gap = min_distance(strip).min_distance;
  const double diff_gap = min_distance(difference_set(strip, 100.0)).min_distance;
  const bool strip_ok = srep.verdict == Verdict::NonCrystalEvidence && diff_gap < 0.05 && own_gap > 0.2;
  r.pass = recovered == trials && strip_ok;
  r.details = {{"trials", trials},
               {"recovered", recovered},
               {"failures", failures},
               {"strip_verdict", to_string(srep.verdict)},
               {"strip_min_gap", num(own_gap)},
               {"strip_difference_min_gap", num(diff_gap)},
               {"strip_ok", strip_ok}};
  return r;
}

namespace detail {

/// Distance between two dual vectors modulo the dual lattice.
inline double phase_distance(const LatticeBasis& ld, const Vec& a, const Vec& b) {
  Vec u = ld.coords(a - b);
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] -= std::round(u[i]);
  return (ld.generators() * u).norm();
}

// Circular distance of two points of [0,1)^n.
inline double torus_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    s = std::max(s, std::min(d, 1.0 - d));
  }
  return s;
}

}  // namespace detail

/// Exponential-polynomial weights with known phases; recovery of phases and
/// weights, and rejection of a real exponential.
inline CheckResult check_fit(std::uint64_t seed = 42, int trials = 20) {
  std::mt19937_64 rng(seed + 3);
  std::uniform_real_distribution<double> u(0.0, 1.0), mod(0.5, 2.0), ang(0.0, kTwoPi);
  CheckResult r{"poisson_form_recovery", true, json::object()};
  double worst_phase = 0.0, worst_weight = 0.0;
  int ok_count = 0;
  json failures = json::array();
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + t % 2;
    const int K = 1 + (t / 2) % 2;
    const auto c = fixtures::random_crystal(rng, n, K);
    const auto ld = dual(c.lattice());
    const int per_coset = n == 1 ? 2 : 1;
    std::vector<PoissonTerm> terms;
    for (const Vec& q : c.shifts()) {
      std::vector<Vec> used;
      while (static_cast<int>(used.size()) < per_coset) {
        Vec e(n);
        for (int i = 0; i < n; ++i) e[i] = u(rng);
        bool far = true;
        for (const Vec& o : used)
          if (detail::torus_distance(e, o) < 0.1) far = false;
        if (!far) continue;
        used.push_back(e);
        PolyDiffOperator op(n);
        for (const auto& a : multi_indices_up_to(n, 2))
          if (u(rng) < 0.6 || a.is_zero()) op.add(a, MultiIndex(n), std::polar(mod(rng), ang(rng)) * std::pow(0.1, a.total()));
        terms.push_back({ld.generators() * e, q, op});
      }
    }
    const auto truth = make_poisson_comb(c.lattice(), terms);
    const Region w = n == 1 ? Region::box1(-30, 30) : Region::box(Vec::Constant(2, -22.0), Vec::Constant(2, 22.0));
    const auto comb = fixtures::weights_on(c, w, [&](const Vec& p) { return fixtures::poisson_weight(truth, p); });
    const auto fit = fit_exp_poly(c, comb);
    double phase_err = std::numeric_limits<double>::infinity();
    double weight_err = std::numeric_limits<double>::infinity();
    if (fit.roots_on_circle && fit.terms.size() == truth.terms().size()) {
      phase_err = 0.0;
      for (const auto& tt : truth.terms()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& ft : fit.terms)
          if (distance_mod(c.lattice(), ft.shift, tt.shift) < 1e-9)
            best = std::min(best, detail::phase_distance(ld, ft.phase, tt.phase));
        phase_err = std::max(phase_err, best);
      }
      double top = 0.0, dev = 0.0;
      for (const auto& e : comb.entries()) {
        const cplx wv = e.op.coeff(MultiIndex(n));
        top = std::max(top, std::abs(wv));
        dev = std::max(dev, std::abs(wv - fitted_weight(fit, c.lattice(), e.point, 1e-9)));
      }
      weight_err = dev / top;
    }
    worst_phase = std::max(worst_phase, phase_err);
    worst_weight = std::max(worst_weight, weight_err);
    if (phase_err < 1e-6 && weight_err < 1e-6) ++ok_count;
    else failures.push_back({{"trial", t}, {"phase_error", num(phase_err)}, {"weight_error", num(weight_err)}});
  }
  const auto c1 = make_crystal(integer_lattice(1), {make_vec({0.0})});
  const auto growth = fixtures::weights_on(c1, Region::box1(-30, 30), [](const Vec& p) { return cplx{std::exp(p[0])}; });
  const auto neg = fit_exp_poly(c1, growth);
  const bool control_ok = !neg.roots_on_circle;
  r.pass = ok_count == trials && control_ok;
  r.details = {{"trials", trials},
               {"recovered", ok_count},
               {"failures", failures},
               {"max_phase_error", num(worst_phase)},
               {"max_relative_weight_error", num(worst_weight)},
               {"real_exponential_rejected", control_ok},
               {"control_modulus_deviation", num(neg.max_modulus_deviation)}};
  return r;
}

/// Vanishing, support and extraction properties of the gap test functions.
inline CheckResult check_gap(std::uint64_t seed = 42) {
  CheckResult r{"gap_suite", true, json::object()};
  std::mt19937_64 rng(seed + 4);

  // exact vanishing
  std::vector<std::pair<GapProbe, Region>> probes;
  const auto z = make_crystal(integer_lattice(1), {make_vec({0.0})});
  probes.push_back({make_gap_probe(z, 0, 1, 0.2), Region::box1(-10, 10)});
  probes.push_back({make_gap_probe(make_crystal(integer_lattice(1), {make_vec({0.0}), make_vec({0.5})}), 0, 0, 0.2),
                    Region::box1(-10, 10)});
  probes.push_back({make_gap_probe(make_crystal(dual(make_lattice({{1.0, 1.0}, {0.0, 1.0}})), {make_vec({0.0, 0.0})}), 0, 0, 0.3),
                    Region::box(Vec::Constant(2, -3.5), Vec::Constant(2, 3.5))});
  std::uniform_real_distribution<double> f(0.05, 0.95);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 2, K = 1 + trial % 3, m = trial % 3;
    const auto l = fixtures::random_lattice(rng, n, 0.3);
    std::vector<Vec> q{Vec::Zero(n)};
    while (static_cast<int>(q.size()) < K) {
      Vec cv(n);
      for (int i = 0; i < n; ++i) cv[i] = f(rng);
      q.push_back(l.generators() * cv);
    }
    const auto sigma = make_crystal(l, q);
    for (int k = 0; k < sigma.size(); ++k) probes.push_back({make_gap_probe(sigma, k, m, 0.2), Region::ball(n, 3.0)});
  }
  std::size_t exact = 0, checked = 0;
  for (const auto& [p, w] : probes) {
    const auto v = verify_vanishing(p, w);
    if (v.pass && v.off_target_exact) ++exact;
    checked += v.points_checked;
  }
  const bool vanishing_ok = exact == probes.size();

  // support budget
  struct SupportCase {
    GapProbe p;
    double extent, step;
  };
  std::vector<SupportCase> sc{
      {make_gap_probe(z, 0, 0, 0.05), 2.0, 0.01},
      {make_gap_probe(make_crystal(integer_lattice(1), {make_vec({0.0}), make_vec({0.25})}), 1, 1, 0.1), 5.0, 0.02},
      {make_gap_probe(make_crystal(make_lattice({{1.0, 0.0}, {0.5, 1.0}}), {make_vec({0.0, 0.0})}), 0, 0, 0.3), 2.5, 0.07}};
  double worst_in = 0.0, weakest_half = std::numeric_limits<double>::infinity();
  for (const auto& s : sc) {
    worst_in = std::max(worst_in, verify_support(s.p, s.extent, s.step).outside_energy_fraction);
    weakest_half = std::min(weakest_half, verify_support(s.p, s.extent, s.step, scaled_budget(s.p, 0.5)).outside_energy_fraction);
  }
  const bool support_ok = worst_in < 1e-6 && weakest_half > 1e-2;

  // extraction under off-target perturbations
  const auto l = make_lattice({{1.0, 0.2}, {0.0, 0.8}});
  const auto sigma = make_crystal(l, {make_vec({0.0, 0.0}), make_vec({0.5, 0.3})});
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double worst_extract = 0.0;
  int extracted = 0;
  for (int k = 0; k < sigma.size(); ++k) {
    const int m = 1;
    const auto probe = make_gap_probe(sigma, k, m, 0.2);
    const Vec eta = sigma.shifts()[static_cast<std::size_t>(k)];
    const Region w = Region::ball(2, 4.0);
    const auto pts = crystal_points(sigma, w);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<CombEntry> es;
      std::map<MultiIndex, cplx> planted;
      for (const Vec& s : pts) {
        DiffOperator op;
        for (const auto& i : multi_indices_up_to(2, m)) op.add(i, {u(rng), u(rng)});
        if ((s - eta).norm() < 1e-12) planted = op.terms();
        es.push_back({s, op});
      }
      const auto t = make_comb(std::move(es), w);
      for (const auto& [i, cf] : planted) {
        worst_extract = std::max(worst_extract, std::abs(extract_coefficient(t, probe, i) - cf));
        ++extracted;
      }
    }
  }
  const bool extract_ok = worst_extract < 1e-9 && extracted > 0;
  r.pass = vanishing_ok && support_ok && extract_ok;
  r.details = {{"vanishing_probes", probes.size()},
               {"vanishing_exact", exact},
               {"vanishing_points", checked},
               {"support_max_outside", num(worst_in)},
               {"half_budget_min_outside", num(weakest_half)},
               {"extractions", extracted},
               {"extraction_max_error", num(worst_extract)},
               {"pass_vanishing", vanishing_ok},
               {"pass_support", support_ok},
               {"pass_extraction", extract_ok}};
  return r;
}

/// Closest pair and comb evaluation against direct computation.
inline CheckResult check_oracles(std::uint64_t seed = 42) {
  std::mt19937_64 rng(seed + 5);
  CheckResult r{"oracle_equivalence", true, json::object()};
  int md_match = 0;
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
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) brute = std::min(brute, (pts[i] - pts[j]).norm());
    if (min_distance(make_point_set(pts)).min_distance == brute) ++md_match;
  }
  double worst_eval = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 2;
    std::uniform_real_distribution<double> u(-3.0, 3.0);
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
    cplx direct{};
    for (std::size_t i = 0; i < pts.size(); ++i)
      direct += ws[i] * std::exp(kJ * gp.modulation.dot(pts[i])) *
                std::exp(-kPi * (pts[i] - gp.center).squaredNorm() / (gp.width * gp.width));
    const cplx v = evaluate(scalar_comb(pts, ws, Region::ball(n, 10.0)), gaussian(n, gp));
    worst_eval = std::max(worst_eval, std::abs(v - direct) / std::max(1e-300, std::abs(direct)));
  }
  r.pass = md_match == 200 && worst_eval < 1e-12;
  r.details = {{"min_distance_sets", 200},
               {"min_distance_exact_matches", md_match},
               {"evaluate_pairs", 50},
               {"evaluate_max_rel_error", num(worst_eval)}};
  return r;
}

// ---------------------------------------------------------------------------
// suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"poisson", "autocorr", "gap", "detect", "all"};
  return names;
}

inline std::vector<CheckResult> run_checks(const std::string& suite, std::uint64_t seed) {
  require(std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end(), ErrorCode::InvalidParams,
          "unknown suite '" + suite + "'");
  const bool all = suite == "all";
  std::vector<CheckResult> out;
  if (all || suite == "poisson") {
    out.push_back(check_poisson_summation(seed));
    out.push_back(check_operator_rule());
    out.push_back(check_involution(seed));
  }
  if (all || suite == "autocorr") out.push_back(check_autocorr());
  if (all || suite == "detect") {
    out.push_back(check_detection(seed));
    out.push_back(check_fit(seed));
  }
  if (all || suite == "gap") out.push_back(check_gap(seed));
  if (all) out.push_back(check_oracles(seed));
  return out;
}

inline json suite_report(const std::string& suite, std::uint64_t seed, const std::vector<CheckResult>& checks) {
  json cs = json::array();
  bool pass = true;
  for (const auto& c : checks) {
    cs.push_back(to_json(c));
    pass = pass && c.pass;
  }
  return {{"schema", "verify-v1"}, {"suite", suite}, {"seed", seed}, {"checks", cs}, {"pass", pass}};
}

}  // namespace combforge
