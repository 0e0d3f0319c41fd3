#pragma once

// Inverse problems: recover lattice and cosets from an observed point set,
// and recover exponential-polynomial (Poisson form) weights on a crystal.

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "combforge/poisson.hpp"
#include "combforge/pointset.hpp"

namespace combforge {

// ---------------------------------------------------------------------------
// Lattice helpers

namespace detail {

/// Basis (columns) of the integer lattice spanned by `gens`, by column
/// Euclid reduction row by row. Empty when the span is not full rank.
inline std::vector<std::vector<long long>> integer_span_basis(std::vector<std::vector<long long>> gens, int n) {
  for (int row = 0; row < n; ++row) {
    // Move a column with nonzero entry in this row to position `row` and
    // clear the row in all later columns.
    while (true) {
      int pivot = -1;
      for (std::size_t j = static_cast<std::size_t>(row); j < gens.size(); ++j)
        if (gens[j][row] != 0 && (pivot < 0 || std::llabs(gens[j][row]) < std::llabs(gens[pivot][row])))
          pivot = static_cast<int>(j);
      if (pivot < 0) return {};
      std::swap(gens[static_cast<std::size_t>(row)], gens[static_cast<std::size_t>(pivot)]);
      bool done = true;
      for (std::size_t j = static_cast<std::size_t>(row) + 1; j < gens.size(); ++j) {
        const long long f = gens[j][row] / gens[row][row];
        if (f != 0)
          for (int i = 0; i < n; ++i) gens[j][i] -= f * gens[row][i];
        if (gens[j][row] != 0) done = false;
      }
      if (done) break;
    }
  }
  gens.resize(static_cast<std::size_t>(n));
  return gens;
}

}  // namespace detail

/// LLL reduction (delta = 3/4) of the generator columns, for readable output.
inline LatticeBasis lll_reduce(const LatticeBasis& l) {
  const int n = l.dim();
  Mat b = l.generators();
  auto gso = [&](Mat& bs, Mat& mu) {
    bs = b;
    mu = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        mu(i, j) = b.col(i).dot(bs.col(j)) / bs.col(j).squaredNorm();
        bs.col(i) -= mu(i, j) * bs.col(j);
      }
  };
  Mat bs, mu;
  gso(bs, mu);
  int k = 1, guard = 0;
  while (k < n && ++guard < 10000) {
    for (int j = k - 1; j >= 0; --j) {
      const double q = std::round(mu(k, j));
      if (q != 0.0) {
        b.col(k) -= q * b.col(j);
        gso(bs, mu);
      }
    }
    if (bs.col(k).squaredNorm() >= (0.75 - mu(k, k - 1) * mu(k, k - 1)) * bs.col(k - 1).squaredNorm()) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      gso(bs, mu);
      k = std::max(k - 1, 1);
    }
  }
  // Deterministic orientation: first nonzero coordinate of each generator positive.
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < n; ++d) {
      if (std::abs(b(d, i)) > 1e-12 * b.col(i).norm()) {
        if (b(d, i) < 0) b.col(i) = -b.col(i);
        break;
      }
    }
  }
  return make_lattice(b);
}

// ---------------------------------------------------------------------------
// Crystal detection

enum class Verdict { Crystal, NonCrystalEvidence, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Crystal: return "crystal";
    case Verdict::NonCrystalEvidence: return "non_crystal_evidence";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct DetectOptions {
  std::optional<double> membership_tol;  // default 1e-8 * max(1, window extent)
  int max_cosets = 16;
  double shrink = 0.0;             // extra inset of the scoring window
  double miss_rate = 0.0;          // accepted period score
  double residual_threshold = 0.0; // coverage residual allowed for a crystal verdict
  std::size_t max_candidates = 512;
};

struct DetectionReport {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Crystal> crystal;  // present for verdict crystal
  double coverage_residual = 1.0;
  std::size_t period_candidates_tested = 0;
  std::size_t periods_accepted = 0;
  int period_rank = 0;
  std::string note;
};

namespace detail {

struct PeriodScorer {
  const std::vector<Vec>& pts;
  const Region& window;
  const SpatialIndex& index;
  double tol;
  double shrink;

  /// Fraction of points of the inset window whose translate by +v or -v is missing.
  std::optional<double> score(const Vec& v) const {
    const auto inner = window.inset(v.norm() + shrink);
    if (!inner) return std::nullopt;
    std::size_t inside = 0, misses = 0;
    for (const Vec& p : pts) {
      if (!inner->contains(p)) continue;
      ++inside;
      if (!index.find_within(p + v, tol)) ++misses;
      if (!index.find_within(p - v, tol)) ++misses;
    }
    if (inside == 0) return std::nullopt;
    return static_cast<double>(misses) / static_cast<double>(inside);
  }
};

/// Length of the chord through the window centre along unit vector u.
inline double chord(const Region& w, const Vec& u) {
  const Vec c = w.center();
  auto [lo, hi] = w.bounds();
  double a = 0.0, b = (hi - lo).norm();
  for (int it = 0; it < 60; ++it) {
    const double t = 0.5 * (a + b);
    (w.contains(c + t * u) && w.contains(c - t * u) ? a : b) = t;
  }
  return 2.0 * a;
}

/// Rank of the columns of m relative to their scale.
inline int numeric_rank(const Mat& m) {
  if (m.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > 1e-9 * s[0]) ++r;
  return r;
}

}  // namespace detail

inline DetectionReport detect_crystal(const PointSet& ps, const DetectOptions& opts = {}) {
  const int n = ps.dim();
  const auto& pts = ps.points();
  require(pts.size() >= static_cast<std::size_t>(2 * (n + 1)), ErrorCode::TooFewPoints,
          "detection needs at least 2(n+1) points");
  const Region& window = ps.window();
  auto [wlo, whi] = window.bounds();
  const double extent = std::max({1.0, wlo.cwiseAbs().maxCoeff(), whi.cwiseAbs().maxCoeff()});
  const double tol = opts.membership_tol.value_or(1e-8 * extent);

  const double dmin = min_distance_or_inf(ps);
  SpatialIndex index(n, std::isfinite(dmin) ? std::max(dmin, 4.0 * tol) : extent);
  for (std::size_t i = 0; i < pts.size(); ++i) index.insert(pts[i], i);

  DetectionReport rep;
  // Candidates: differences to the point nearest the window centre.
  const Vec c = window.center();
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if ((pts[i] - c).norm() < (pts[i0] - c).norm()) i0 = i;
  const double rc = window.inradius() / 3.0;
  std::vector<Vec> cands;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec v = pts[i] - pts[i0];
    if (i != i0 && v.norm() <= rc) cands.push_back(v);
  }
  std::sort(cands.begin(), cands.end(), [](const Vec& a, const Vec& b) {
    if (a.norm() != b.norm()) return a.norm() < b.norm();
    return lex_less(a, b);
  });
  if (cands.size() > opts.max_candidates) cands.resize(opts.max_candidates);
  rep.period_candidates_tested = cands.size();
  if (static_cast<int>(cands.size()) < n) {
    rep.note = "too few period candidates in the window";
    return rep;
  }

  const detail::PeriodScorer scorer{pts, window, index, tol, opts.shrink};
  std::vector<int> accepted_flag(cands.size(), 0);
  parallel_for(cands.size(), [&](std::size_t k) {
    const auto s = scorer.score(cands[k]);
    accepted_flag[k] = s && *s <= opts.miss_rate;
  });
  std::vector<Vec> accepted;
  for (std::size_t k = 0; k < cands.size(); ++k)
    if (accepted_flag[k]) accepted.push_back(cands[k]);
  rep.periods_accepted = accepted.size();

  // n shortest independent periods.
  Mat basis(n, 0);
  for (const Vec& v : accepted) {
    if (basis.cols() == n) break;
    Mat trial(n, basis.cols() + 1);
    trial << basis, v;
    if (detail::numeric_rank(trial) == trial.cols()) basis = trial;
  }
  rep.period_rank = static_cast<int>(basis.cols());
  if (basis.cols() < n) {
    rep.verdict = Verdict::NonCrystalEvidence;
    rep.note = "accepted periods do not span the space";
    return rep;
  }

  // Coarsest lattice containing every accepted period.
  for (const Vec& v : accepted) {
    const Vec coords = basis.inverse() * v;
    if ((coords.array() - coords.array().round()).abs().maxCoeff() <= 1e-6) continue;
    long long den = 0;
    for (long long d = 2; d <= 64 && den == 0; ++d) {
      const Vec s = coords * static_cast<double>(d);
      if ((s.array() - s.array().round()).abs().maxCoeff() <= 1e-6 * static_cast<double>(d)) den = d;
    }
    if (den == 0) {
      rep.verdict = Verdict::NonCrystalEvidence;
      rep.note = "accepted periods are incommensurate";
      return rep;
    }
    std::vector<std::vector<long long>> gens;
    for (int i = 0; i < n; ++i) {
      std::vector<long long> e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(i)] = den;
      gens.push_back(e);
    }
    std::vector<long long> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = std::llround(coords[i] * static_cast<double>(den));
    gens.push_back(z);
    const auto h = detail::integer_span_basis(gens, n);
    Mat hm(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) hm(i, j) = static_cast<double>(h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    basis = basis * hm / static_cast<double>(den);
  }
  const LatticeBasis lattice = lll_reduce(make_lattice(basis));
  for (int i = 0; i < n; ++i) {
    const Vec g = lattice.generator(i);
    require(detail::chord(window, g / g.norm()) >= 3.0 * g.norm(), ErrorCode::WindowTooSmall,
            "fewer than 3 lattice periods fit in the window");
  }

  // Coset decomposition.
  std::vector<Vec> shifts;
  const double ctol = std::max(tol, lattice.default_tol());
  for (const Vec& p : pts) {
    const Vec q = canonical_shift(lattice, p, ctol);
    if (std::none_of(shifts.begin(), shifts.end(), [&](const Vec& s) { return distance_mod(lattice, s, q) <= ctol; }))
      shifts.push_back(q);
    if (static_cast<int>(shifts.size()) > opts.max_cosets) {
      rep.verdict = Verdict::NonCrystalEvidence;
      rep.note = "more cosets than max_cosets";
      return rep;
    }
  }
  const Crystal crystal = make_crystal(lattice, shifts, ctol);

  // Coverage: observed versus predicted points in the window.
  const auto predicted = crystal_points(crystal, window, tol);
  SpatialIndex pindex(n, std::isfinite(dmin) ? std::max(dmin, 4.0 * tol) : extent);
  for (std::size_t i = 0; i < predicted.size(); ++i) pindex.insert(predicted[i], i);
  std::size_t diff = 0;
  for (const Vec& p : pts)
    if (!pindex.find_within(p, tol)) ++diff;
  for (const Vec& p : predicted)
    if (!index.find_within(p, tol)) ++diff;
  rep.coverage_residual = static_cast<double>(diff) / static_cast<double>(pts.size());
  rep.crystal = crystal;
  if (rep.coverage_residual <= opts.residual_threshold) {
    rep.verdict = Verdict::Crystal;
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.note = "coverage residual above threshold";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exponential-polynomial weights

struct ExpPolyTerm {
  Vec phase;                        // eta, reduced into the dual cell
  Vec shift;                        // coset representative
  std::map<MultiIndex, cplx> poly;  // coefficients of x^a
};

struct ExpPolyFit {
  std::vector<ExpPolyTerm> terms;
  double residual = std::numeric_limits<double>::infinity();  // max |w - fit| on the window
  bool roots_on_circle = true;
  double max_modulus_deviation = 0.0;  // max ||mu| - 1|
  int order_used = 0;                  // largest recurrence order found
};

namespace detail {

struct RootCluster {
  cplx mu;
  int multiplicity = 0;
};

/// Roots of sum_j c_j z^j (c has r+1 entries, c_r != 0), clustered.
inline std::vector<RootCluster> clustered_roots(const CVec& c, double cluster_tol) {
  const Eigen::Index r = c.size() - 1;
  std::vector<cplx> roots;
  if (r == 1) {
    roots.push_back(-c[0] / c[1]);
  } else {
    CMat comp = CMat::Zero(r, r);
    for (Eigen::Index i = 1; i < r; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < r; ++i) comp(i, r - 1) = -c[i] / c[r];
    Eigen::ComplexEigenSolver<CMat> es(comp);
    for (Eigen::Index i = 0; i < r; ++i) roots.push_back(es.eigenvalues()[i]);
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::vector<std::vector<cplx>> groups;
  for (const cplx z : roots) {
    bool placed = false;
    for (auto& g : groups) {
      cplx mean{};
      for (cplx w : g) mean += w;
      mean /= static_cast<double>(g.size());
      if (std::abs(z - mean) <= cluster_tol * std::max(1.0, std::abs(mean))) {
        g.push_back(z);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({z});
  }
  std::vector<RootCluster> out;
  for (const auto& g : groups) {
    cplx mean{};
    for (cplx w : g) mean += w;
    out.push_back({mean / static_cast<double>(g.size()), static_cast<int>(g.size())});
  }
  return out;
}

/// Minimal recurrence shared by all runs: the null vector of stacked,
/// row-normalized windows w_s..w_{s+r}. Returns empty when no order <= max_order fits.
inline CVec minimal_recurrence(const std::vector<std::vector<cplx>>& runs, int max_order) {
  for (int r = 1; r <= max_order; ++r) {
    std::vector<CVec> rows;
    for (const auto& run : runs) {
      for (std::size_t s = 0; s + static_cast<std::size_t>(r) < run.size(); ++s) {
        CVec row(r + 1);
        for (int j = 0; j <= r; ++j) row[j] = run[s + static_cast<std::size_t>(j)];
        const double nrm = row.norm();
        if (nrm > 0.0) rows.push_back(row / nrm);
      }
    }
    if (static_cast<int>(rows.size()) < r + 1) break;
    CMat a(static_cast<Eigen::Index>(rows.size()), r + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[r] <= 1e-8 * sv[0]) {
      CVec c = svd.matrixV().col(r);
      return c;
    }
  }
  return {};
}

}  // namespace detail

/// Fits w(p) = sum_k exp(-j<eta_k, p>) p_k(p) per coset of `c` from the
/// order-0 weights of `t`. Along each generator direction a minimal linear
/// recurrence is found from a Hankel null vector; its root clusters give the
/// multipliers mu = exp(-j<eta, g_i>) with multiplicities. Phase candidates
/// are all combinations of per-direction roots; amplitudes come from a
/// least-squares fit on the window, and combinations with zero amplitude are
/// dropped.
inline ExpPolyFit fit_exp_poly(const Crystal& c, const WeightedComb& t, int max_order = 12) {
  require(t.order() == 0, ErrorCode::InvalidParams, "exp-poly fitting takes order-0 weights");
  require(t.dim() == c.dim(), ErrorCode::DimensionMismatch, "comb dimension differs from crystal");
  const int n = c.dim();
  const LatticeBasis& l = c.lattice();
  const LatticeBasis ld = dual(l);
  const double tol = std::max(l.default_tol(), 1e-9);
  const MultiIndex zero(n);

  ExpPolyFit fit;
  fit.residual = 0.0;
  using Key = std::vector<long>;
  std::vector<std::map<Key, cplx>> cosets(static_cast<std::size_t>(c.size()));
  for (const auto& e : t.entries()) {
    const int k = c.coset_of(e.point, tol);
    require(k >= 0, ErrorCode::SupportMismatch, "weight point lies off the crystal");
    const Vec u = l.coords(e.point - c.shifts()[static_cast<std::size_t>(k)]);
    Key key(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) key[static_cast<std::size_t>(d)] = std::lround(u[d]);
    cosets[static_cast<std::size_t>(k)][key] = e.op.coeff(zero);
  }

  for (std::size_t ci = 0; ci < cosets.size(); ++ci) {
    const auto& w = cosets[ci];
    const Vec& q = c.shifts()[ci];
    if (w.empty()) continue;
    if (std::all_of(w.begin(), w.end(), [](const auto& kv) { return kv.second == cplx{}; })) continue;

    // Per-direction root clusters.
    std::vector<std::vector<detail::RootCluster>> dir_roots(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
      std::map<Key, std::vector<std::pair<long, cplx>>> lines;
      for (const auto& [key, v] : w) {
        Key rest = key;
        rest[static_cast<std::size_t>(d)] = 0;
        lines[rest].push_back({key[static_cast<std::size_t>(d)], v});
      }
      std::vector<std::vector<cplx>> runs;
      for (auto& [rest, line] : lines) {
        std::sort(line.begin(), line.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<cplx> run{line[0].second};
        for (std::size_t i = 1; i < line.size(); ++i) {
          if (line[i].first != line[i - 1].first + 1) {
            runs.push_back(run);
            run.clear();
          }
          run.push_back(line[i].second);
        }
        runs.push_back(run);
      }
      const CVec rec = detail::minimal_recurrence(runs, max_order);
      require(rec.size() > 0, ErrorCode::RecurrenceNotFound, "no linear recurrence of admissible order fits the weights");
      fit.order_used = std::max(fit.order_used, static_cast<int>(rec.size()) - 1);
      dir_roots[static_cast<std::size_t>(d)] = detail::clustered_roots(rec, 1e-4);
      for (const auto& rc : dir_roots[static_cast<std::size_t>(d)]) {
        fit.max_modulus_deviation = std::max(fit.max_modulus_deviation, std::abs(std::abs(rc.mu) - 1.0));
        if (std::abs(std::abs(rc.mu) - 1.0) >= 1e-6) fit.roots_on_circle = false;
      }
    }
    if (!fit.roots_on_circle) {
      fit.terms.clear();
      fit.residual = std::numeric_limits<double>::infinity();
      return fit;
    }

    // Candidate phases with their exponent caps.
    struct Candidate {
      Vec eta;
      std::vector<MultiIndex> exps;
    };
    std::vector<Candidate> cands;
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    while (true) {
      Vec theta(n);
      MultiIndex cap(n);
      for (int d = 0; d < n; ++d) {
        const auto& rc = dir_roots[static_cast<std::size_t>(d)][pick[static_cast<std::size_t>(d)]];
        theta[d] = -std::arg(rc.mu) / kTwoPi;
        cap[d] = rc.multiplicity - 1;
      }
      cands.push_back({ld.generators() * theta, sub_indices(cap)});
      int axis = 0;
      while (axis < n && ++pick[static_cast<std::size_t>(axis)] >= dir_roots[static_cast<std::size_t>(axis)].size())
        pick[static_cast<std::size_t>(axis++)] = 0;
      if (axis == n) break;
    }

    std::vector<Key> keys;
    CVec rhs(static_cast<Eigen::Index>(w.size()));
    for (const auto& [key, v] : w) {
      rhs[static_cast<Eigen::Index>(keys.size())] = v;
      keys.push_back(key);
    }
    auto column = [&](const Candidate& cd, const MultiIndex& a) {
      CVec col(static_cast<Eigen::Index>(keys.size()));
      for (std::size_t r = 0; r < keys.size(); ++r) {
        Vec u(n);
        for (int d = 0; d < n; ++d) u[d] = static_cast<double>(keys[r][static_cast<std::size_t>(d)]);
        const Vec p = l.generators() * u + q;
        col[static_cast<Eigen::Index>(r)] = phase_factor(cd.eta, p) * monomial(u, a);
      }
      return col;
    };
    std::vector<bool> alive(cands.size(), true);
    CVec coef;
    std::vector<std::pair<std::size_t, MultiIndex>> cols;
    CMat design;
    for (int pass = 0; pass < 2; ++pass) {
      cols.clear();
      for (std::size_t k = 0; k < cands.size(); ++k)
        if (alive[k])
          for (const auto& a : cands[k].exps) cols.push_back({k, a});
      require(!cols.empty(), ErrorCode::IllConditioned, "no phase candidates survived");
      require(cols.size() <= keys.size(), ErrorCode::IllConditioned, "more amplitude unknowns than window points");
      design.resize(static_cast<Eigen::Index>(keys.size()), static_cast<Eigen::Index>(cols.size()));
      Vec scale(static_cast<Eigen::Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) {
        CVec col = column(cands[cols[j].first], cols[j].second);
        scale[static_cast<Eigen::Index>(j)] = col.norm();
        design.col(static_cast<Eigen::Index>(j)) = col / col.norm();
      }
      Eigen::ColPivHouseholderQR<CMat> qr(design);
      require(qr.rank() == design.cols(), ErrorCode::IllConditioned, "amplitude design matrix is rank deficient");
      const CVec y = qr.solve(rhs);
      coef = y.cwiseQuotient(scale.cast<cplx>());
      if (pass == 1) {
        fit.residual = std::max(fit.residual, (design * y - rhs).cwiseAbs().maxCoeff());
        break;
      }
      double big = 0.0;
      for (Eigen::Index j = 0; j < y.size(); ++j) big = std::max(big, std::abs(y[j]));
      std::vector<double> cand_size(cands.size(), 0.0);
      for (std::size_t j = 0; j < cols.size(); ++j)
        cand_size[cols[j].first] = std::max(cand_size[cols[j].first], std::abs(y[static_cast<Eigen::Index>(j)]));
      for (std::size_t k = 0; k < cands.size(); ++k)
        if (cand_size[k] <= 1e-8 * big) alive[k] = false;
    }

    // u = G^{-1}(x - q) as operators in x, then p_k(x) = sum_a c_a u^a.
    const Mat& ginv = l.inverse();
    const Vec gq = ginv * q;
    std::vector<PolyDiffOperator> u(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
      PolyDiffOperator ud = PolyDiffOperator::constant(n, -gq[d]);
      for (int e = 0; e < n; ++e) ud += PolyDiffOperator::x(n, e, ginv(d, e));
      u[static_cast<std::size_t>(d)] = ud;
    }
    std::map<std::size_t, PolyDiffOperator> polys;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      PolyDiffOperator term = PolyDiffOperator::constant(n, coef[static_cast<Eigen::Index>(j)]);
      for (int d = 0; d < n; ++d) term = term * u[static_cast<std::size_t>(d)].pow(cols[j].second[d]);
      auto [it, fresh] = polys.try_emplace(cols[j].first, n);
      it->second += term;
    }
    for (auto& [k, poly] : polys) {
      const Vec eta = canonical_shift(ld, cands[k].eta, ld.default_tol());
      const cplx adjust = phase_factor(cands[k].eta - eta, q);
      ExpPolyTerm term{eta, q, {}};
      for (const auto& [key, v] : poly.terms()) {
        const cplx val = v * adjust;
        if (std::abs(val) > 0.0) term.poly[key.first] = val;
      }
      fit.terms.push_back(std::move(term));
    }
  }
  return fit;
}

/// Poisson form of fitted weights: one term per (phase, coset) with the
/// fitted polynomial as a derivative-free operator.
inline PoissonComb to_poisson_comb(const Crystal& c, const ExpPolyFit& fit) {
  require(fit.roots_on_circle, ErrorCode::RootsOffCircle, "fitted multipliers leave the unit circle");
  const int n = c.dim();
  std::vector<PoissonTerm> terms;
  for (const auto& t : fit.terms) {
    PolyDiffOperator op(n);
    for (const auto& [a, v] : t.poly) op.add(a, MultiIndex(n), v);
    terms.push_back({t.phase, t.shift, std::move(op)});
  }
  return make_poisson_comb(c.lattice(), std::move(terms));
}

/// Weight predicted by a fit at p (coset found by the caller).
inline cplx fitted_weight(const ExpPolyFit& fit, const LatticeBasis& l, const Vec& p, double tol = 1e-9) {
  cplx s{};
  for (const auto& t : fit.terms) {
    if (distance_mod(l, p, t.shift) > tol) continue;
    cplx v{};
    for (const auto& [a, c] : t.poly) v += c * monomial(p, a);
    s += phase_factor(t.phase, p) * v;
  }
  return s;
}

}  // namespace combforge
