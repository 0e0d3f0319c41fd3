#pragma once

// Combs of Poisson form
//
//   t = sum_terms exp(-j <eta, x>) P(x, D) sum_{p in L + q} delta_p
//
// and their Fourier transforms, which are again of Poisson form over the
// dual lattice.

#include <limits>
#include <map>

#include "combforge/comb.hpp"

namespace combforge {

/// sum c_{abg} (2 pi)^g x^a D^b in normal order: multiplications left of
/// derivatives. The power of 2 pi is kept as an integer grade so that factors
/// j and 1/j cancel exactly; terms() and coeff() give the evaluated sums.
class PolyDiffOperator {
 public:
  using Key = std::pair<MultiIndex, MultiIndex>;  // (monomial a, derivative b)
  struct GradedKey {
    MultiIndex a, b;
    int grade = 0;
    auto operator<=>(const GradedKey&) const = default;
  };

  PolyDiffOperator() = default;
  explicit PolyDiffOperator(int dim) : dim_(dim) {}

  static PolyDiffOperator constant(int dim, cplx c, int grade = 0) {
    PolyDiffOperator p(dim);
    p.add(MultiIndex(dim), MultiIndex(dim), c, grade);
    return p;
  }
  /// x_axis
  static PolyDiffOperator x(int dim, int axis, cplx c = 1.0, int grade = 0) {
    PolyDiffOperator p(dim);
    p.add(MultiIndex::unit(dim, axis), MultiIndex(dim), c, grade);
    return p;
  }
  /// D_axis
  static PolyDiffOperator d(int dim, int axis, cplx c = 1.0, int grade = 0) {
    PolyDiffOperator p(dim);
    p.add(MultiIndex(dim), MultiIndex::unit(dim, axis), c, grade);
    return p;
  }
  static PolyDiffOperator monomial(const MultiIndex& a, const MultiIndex& b, cplx c = 1.0, int grade = 0) {
    PolyDiffOperator p(a.dim());
    p.add(a, b, c, grade);
    return p;
  }

  int dim() const { return dim_; }
  const std::map<GradedKey, cplx>& graded_terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Coefficients with the grades evaluated.
  std::map<Key, cplx> terms() const {
    std::map<Key, cplx> out;
    for (const auto& [k, c] : terms_) out[{k.a, k.b}] += c * std::pow(kTwoPi, k.grade);
    std::erase_if(out, [](const auto& kv) { return kv.second == cplx{}; });
    return out;
  }

  void add(const MultiIndex& a, const MultiIndex& b, cplx c, int grade = 0) {
    if (c == cplx{}) return;
    auto [it, fresh] = terms_.try_emplace({a, b, grade}, c);
    if (!fresh) {
      it->second += c;
      if (it->second == cplx{}) terms_.erase(it);
    }
  }
  cplx coeff(const MultiIndex& a, const MultiIndex& b) const {
    cplx s{};
    for (auto it = terms_.lower_bound({a, b, std::numeric_limits<int>::min()});
         it != terms_.end() && it->first.a == a && it->first.b == b; ++it)
      s += it->second * std::pow(kTwoPi, it->first.grade);
    return s;
  }
  cplx graded_coeff(const MultiIndex& a, const MultiIndex& b, int grade) const {
    auto it = terms_.find({a, b, grade});
    return it == terms_.end() ? cplx{} : it->second;
  }

  /// Highest derivative order |b|.
  int d_order() const {
    int o = 0;
    for (const auto& [k, c] : terms_) o = std::max(o, k.b.total());
    return o;
  }
  /// Highest total degree |a| + |b|.
  int degree() const {
    int o = 0;
    for (const auto& [k, c] : terms_) o = std::max(o, k.a.total() + k.b.total());
    return o;
  }

  PolyDiffOperator& operator+=(const PolyDiffOperator& o) {
    if (dim_ == 0) dim_ = o.dim_;
    for (const auto& [k, c] : o.terms_) add(k.a, k.b, c, k.grade);
    return *this;
  }
  PolyDiffOperator operator+(const PolyDiffOperator& o) const {
    PolyDiffOperator r(*this);
    r += o;
    return r;
  }
  PolyDiffOperator operator*(cplx s) const {
    PolyDiffOperator r(dim_);
    for (const auto& [k, c] : terms_) r.add(k.a, k.b, c * s, k.grade);
    return r;
  }

  /// Operator composition (this after o), re-normal-ordered with
  /// D^b x^a = sum_k C(b,k) a!/(a-k)! x^{a-k} D^{b-k}.
  PolyDiffOperator operator*(const PolyDiffOperator& o) const {
    PolyDiffOperator r(std::max(dim_, o.dim_));
    for (const auto& [k1, c1] : terms_) {
      for (const auto& [k2, c2] : o.terms_) {
        MultiIndex lim(k1.a.dim());
        for (int d = 0; d < lim.dim(); ++d) lim[d] = std::min(k1.b[d], k2.a[d]);
        for (const MultiIndex& kk : sub_indices(lim)) {
          double w = 1.0;
          for (int d = 0; d < kk.dim(); ++d) w *= binomial(k1.b[d], kk[d]) * falling(k2.a[d], kk[d]);
          r.add(k1.a + k2.a - kk, k1.b - kk + k2.b, c1 * c2 * w, k1.grade + k2.grade);
        }
      }
    }
    return r;
  }

  PolyDiffOperator pow(int e) const {
    PolyDiffOperator r = constant(dim_, 1.0);
    for (int i = 0; i < e; ++i) r = r * (*this);
    return r;
  }

  /// Largest |coefficient| after evaluating grades.
  double max_abs() const {
    double m = 0.0;
    for (const auto& [k, c] : terms()) m = std::max(m, std::abs(c));
    return m;
  }
  /// Largest stored |c_{abg}|.
  double max_abs_graded() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  bool operator==(const PolyDiffOperator& o) const { return terms_ == o.terms_; }

 private:
  int dim_ = 0;
  std::map<GradedKey, cplx> terms_;
};

/// Max deviation of the graded coefficients c_{abg} over the union of keys.
/// Operators built by different routes agree grade by grade when they agree
/// as polynomials in 2 pi.
inline double max_deviation(const PolyDiffOperator& a, const PolyDiffOperator& b) {
  double m = 0.0;
  for (const auto& [k, c] : a.graded_terms()) m = std::max(m, std::abs(c - b.graded_coeff(k.a, k.b, k.grade)));
  for (const auto& [k, c] : b.graded_terms()) m = std::max(m, std::abs(c - a.graded_coeff(k.a, k.b, k.grade)));
  return m;
}

struct PoissonTerm {
  Vec phase;  // eta, a dual vector
  Vec shift;  // q
  PolyDiffOperator op;
};

class PoissonComb {
 public:
  const LatticeBasis& lattice() const { return lattice_; }
  const std::vector<PoissonTerm>& terms() const { return terms_; }
  int dim() const { return lattice_.dim(); }

  friend PoissonComb make_poisson_comb(const LatticeBasis&, std::vector<PoissonTerm>, std::optional<double>);

 private:
  LatticeBasis lattice_;
  std::vector<PoissonTerm> terms_;
};

namespace detail {

/// Rewrites exp(-j<eta + s, x>) P S_q as exp(-j<eta, x>) P' S_q for s in L*:
/// P'(x, D) = exp(-j<s,q>) P(x, D + j s).
inline PolyDiffOperator absorb_dual_shift(const PolyDiffOperator& p, const Vec& s, const Vec& q) {
  const int n = static_cast<int>(s.size());
  PolyDiffOperator out(n);
  for (const auto& [k, c] : p.graded_terms()) {
    const auto& [a, b, g] = k;
    PolyDiffOperator t = PolyDiffOperator::monomial(a, MultiIndex(n), c, g);
    for (int d = 0; d < n; ++d) {
      const PolyDiffOperator shifted = PolyDiffOperator::d(n, d) + PolyDiffOperator::constant(n, cplx{0.0, s[d]}, 1);
      t = t * shifted.pow(b[d]);
    }
    out += t;
  }
  return out * phase_factor(s, q);
}

}  // namespace detail

/// Canonical form: shifts reduced into G[0,1)^n, phases reduced into the dual
/// cell (absorbing the change into the operator), equal (phase, shift)
/// pairs merged, empty operators dropped, terms sorted by (shift, phase).
inline PoissonComb make_poisson_comb(const LatticeBasis& l, std::vector<PoissonTerm> terms,
                                     std::optional<double> tol = std::nullopt) {
  const int n = l.dim();
  const LatticeBasis ld = dual(l);
  const double t = tol.value_or(1e-9);
  PoissonComb pc;
  pc.lattice_ = l;
  for (auto& term : terms) {
    require(term.phase.size() == n && term.shift.size() == n, ErrorCode::DimensionMismatch,
            "Poisson term vectors have wrong dimension");
    const Vec q = canonical_shift(l, term.shift, t * l.covering_radius());
    const Vec eta = canonical_shift(ld, term.phase, t * ld.covering_radius());
    const Vec s = term.phase - eta;  // in L*
    PolyDiffOperator op = s.norm() == 0.0 ? term.op : detail::absorb_dual_shift(term.op, s, q);
    auto same = std::find_if(pc.terms_.begin(), pc.terms_.end(), [&](const PoissonTerm& u) {
      return distance_mod(l, u.shift, q) <= t * l.covering_radius() &&
             distance_mod(ld, u.phase, eta) <= t * ld.covering_radius();
    });
    if (same != pc.terms_.end()) {
      same->op += op;
    } else {
      pc.terms_.push_back({eta, q, std::move(op)});
    }
  }
  std::erase_if(pc.terms_, [](const PoissonTerm& u) { return u.op.empty(); });
  std::sort(pc.terms_.begin(), pc.terms_.end(), [](const PoissonTerm& a, const PoissonTerm& b) {
    if (lex_less(a.shift, b.shift)) return true;
    if (lex_less(b.shift, a.shift)) return false;
    return lex_less(a.phase, b.phase);
  });
  return pc;
}

/// Fourier transform, term by term. For (eta, q, x^a D^b) over L the image
/// over L* is
///
///   exp(-j<eta,q>) / |det G| * (-j^{-1} D + q)^a (j x + j eta)^b
///
/// with phase q and shift -eta, where the parenthesized products act
/// coordinatewise and are normal-ordered by composition.
inline PoissonComb fourier_comb(const PoissonComb& pc) {
  const int n = pc.dim();
  const LatticeBasis ld = dual(pc.lattice());
  const double inv_vol = 1.0 / pc.lattice().det_abs();
  std::vector<PoissonTerm> out;
  out.reserve(pc.terms().size());
  for (const auto& term : pc.terms()) {
    std::vector<PolyDiffOperator> xa(n), db(n);
    for (int d = 0; d < n; ++d) {
      xa[d] = PolyDiffOperator::d(n, d, cplx{0.0, 1.0}, -1) + PolyDiffOperator::constant(n, term.shift[d]);
      db[d] = PolyDiffOperator::x(n, d, cplx{0.0, 1.0}, 1) + PolyDiffOperator::constant(n, cplx{0.0, term.phase[d]}, 1);
    }
    PolyDiffOperator op(n);
    for (const auto& [k, c] : term.op.graded_terms()) {
      const auto& [a, b, g] = k;
      PolyDiffOperator t = PolyDiffOperator::constant(n, c, g);
      for (int d = 0; d < n; ++d) t = t * xa[d].pow(a[d]);
      for (int d = 0; d < n; ++d) t = t * db[d].pow(b[d]);
      op += t;
    }
    op = op * (phase_factor(term.phase, term.shift) * inv_vol);
    out.push_back({term.shift, -term.phase, std::move(op)});
  }
  return make_poisson_comb(ld, std::move(out));
}

/// The reflection p -> -p: (eta, q, c x^a D^b) -> (-eta, -q, (-1)^{|a|+|b|} c x^a D^b).
inline PoissonComb reflect(const PoissonComb& pc) {
  std::vector<PoissonTerm> out;
  for (const auto& term : pc.terms()) {
    PolyDiffOperator op(pc.dim());
    for (const auto& [k, c] : term.op.graded_terms()) op.add(k.a, k.b, c * sign_pow(k.a.total() + k.b.total()), k.grade);
    out.push_back({-term.phase, -term.shift, std::move(op)});
  }
  return make_poisson_comb(pc.lattice(), std::move(out));
}

inline PoissonComb scaled(const PoissonComb& pc, cplx s) {
  std::vector<PoissonTerm> out(pc.terms());
  for (auto& t : out) t.op = t.op * s;
  return make_poisson_comb(pc.lattice(), std::move(out));
}

/// Largest coefficient deviation between two canonical combs over the same
/// lattice, matching terms by (shift, phase) modulo the lattices; unmatched
/// terms count with their full magnitude.
inline double structural_deviation(const PoissonComb& a, const PoissonComb& b, double tol = 1e-9) {
  const LatticeBasis& l = a.lattice();
  const LatticeBasis ld = dual(l);
  double dev = 0.0;
  std::vector<bool> used(b.terms().size(), false);
  for (const auto& ta : a.terms()) {
    bool found = false;
    for (std::size_t k = 0; k < b.terms().size(); ++k) {
      const auto& tb = b.terms()[k];
      if (used[k]) continue;
      if (distance_mod(l, ta.shift, tb.shift) > tol || distance_mod(ld, ta.phase, tb.phase) > tol) continue;
      // Representatives may differ by lattice vectors near the cell boundary.
      const Vec s = tb.phase - ta.phase;
      const PolyDiffOperator aligned = s.norm() < tol ? tb.op : detail::absorb_dual_shift(tb.op, s, tb.shift);
      dev = std::max(dev, max_deviation(ta.op, aligned));
      used[k] = found = true;
      break;
    }
    if (!found) dev = std::max(dev, ta.op.max_abs_graded());
  }
  for (std::size_t k = 0; k < b.terms().size(); ++k)
    if (!used[k]) dev = std::max(dev, b.terms()[k].op.max_abs_graded());
  return dev;
}

struct PairingResult {
  cplx value;
  double tail_estimate = 0.0;  // sum of |contributions| in the outermost shell
  std::size_t points = 0;
};

/// Truncated pairing of the comb with psi over lattice points in B(0, R):
/// sum_p exp(-j<eta,p>) P(x,D) delta_p evaluated as
/// (-1)^{|b|} D^b[x^a exp(-j<eta,x>) psi](p). Throws TailBoundViolated when the
/// outermost shell (one longest generator wide) carries more than 1e-12 of
/// the magnitude.
inline PairingResult pair_detailed(const PoissonComb& pc, const TestFunction& psi, double trunc_radius) {
  const int n = pc.dim();
  require(psi.dim() == n, ErrorCode::DimensionMismatch, "test function dimension differs from comb");
  double hmax = 0.0;
  for (int i = 0; i < n; ++i) hmax = std::max(hmax, pc.lattice().generator(i).norm());
  const Region ball = Region::ball(n, trunc_radius);

  std::vector<cplx> contrib;
  std::vector<double> mag;
  std::vector<bool> outer;
  for (const auto& term : pc.terms()) {
    const int order = term.op.d_order();
    std::vector<Vec> pts;
    detail::for_each_coset_point(pc.lattice(), term.shift, ball, 0.0, kDefaultPointCap,
                                 [&](Vec p) { pts.push_back(std::move(p)); });
    const std::size_t base = contrib.size();
    contrib.resize(base + pts.size());
    mag.resize(base + pts.size());
    outer.resize(base + pts.size());
    parallel_for(pts.size(), [&](std::size_t idx) {
      const Vec& p = pts[idx];
      std::vector<Series> axes(n);
      for (int d = 0; d < n; ++d) {
        axes[d].resize(static_cast<std::size_t>(order) + 1);
        const cplx rate = -kJ * term.phase[d];
        cplx v = std::exp(rate * p[d]);
        for (int k = 0; k <= order; ++k) {
          axes[d][k] = v;
          v *= rate / static_cast<double>(k + 1);
        }
      }
      const Jet e = Jet::separable(axes, order) * psi.jet(p, order);
      cplx s{};
      double m = 0.0;
      for (const auto& [k, c] : term.op.terms()) {
        const auto& [a, b] = k;
        cplx coef{};
        for (const MultiIndex& g : sub_indices(b)) {
          double xg = binomial(a, g);
          if (xg == 0.0) continue;
          for (int d = 0; d < n; ++d) xg *= std::pow(p[d], a[d] - g[d]);
          coef += xg * e.coeff(b - g);
        }
        const cplx v = c * sign_pow(b.total()) * factorial(b) * coef;
        s += v;
        m += std::abs(v);
      }
      contrib[base + idx] = s;
      mag[base + idx] = m;
      outer[base + idx] = p.norm() > trunc_radius - hmax;
    });
  }
  PairingResult r;
  r.value = tree_sum(contrib);
  r.points = contrib.size();
  double total = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    total += mag[i];
    if (outer[i]) r.tail_estimate += mag[i];
  }
  require(r.tail_estimate <= 1e-12 * std::max(1.0, total), ErrorCode::TailBoundViolated,
          "test function is not negligible at the truncation radius (tail " + std::to_string(r.tail_estimate) + ")");
  return r;
}

inline cplx pair(const PoissonComb& pc, const TestFunction& psi, double trunc_radius) {
  return pair_detailed(pc, psi, trunc_radius).value;
}

/// Smallest R with exp(-pi R^2 / s^2) < 1e-14 for a Gaussian of width s.
inline double default_truncation_radius(double widest_width) {
  return widest_width * std::sqrt(14.0 * std::log(10.0) / kPi);
}

struct TransformCheck {
  std::string test_function;
  cplx transformed_side;  // <F(t), psi>
  cplx direct_side;       // <t, F(psi)>
  double abs_deviation = 0.0;
  double rel_deviation = 0.0;
};

struct TransformReport {
  std::vector<TransformCheck> checks;
  double trunc_radius = 0.0;
  double tol = 0.0;
  bool pass = true;
  double max_rel_deviation = 0.0;
};

/// Duality check <F(t), psi> = <t, F(psi)> for every psi with a Fourier
/// partner. A check passes when |lhs - rhs| <= tol * max(1, |rhs|).
inline TransformReport verify_transform(const PoissonComb& pc, const std::vector<TestFunction>& tests,
                                        double trunc_radius, double tol,
                                        const std::optional<PoissonComb>& transformed = std::nullopt) {
  const PoissonComb ft = transformed.value_or(fourier_comb(pc));
  TransformReport rep;
  rep.trunc_radius = trunc_radius;
  rep.tol = tol;
  for (const auto& psi : tests) {
    TransformCheck c;
    c.test_function = psi.name();
    c.transformed_side = pair(ft, psi, trunc_radius);
    c.direct_side = pair(pc, psi.fourier_partner(), trunc_radius);
    c.abs_deviation = std::abs(c.transformed_side - c.direct_side);
    c.rel_deviation = c.abs_deviation / std::max(1.0, std::abs(c.direct_side));
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, c.rel_deviation);
    if (!(c.rel_deviation <= tol)) rep.pass = false;
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace combforge
