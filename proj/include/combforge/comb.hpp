#pragma once

// Weighted Dirac combs t = sum_p t_p(D) delta_p with constant-coefficient
// differential operators as weights, observed in a window.

#include "combforge/pointset.hpp"
#include "combforge/test_function.hpp"

#include <map>

namespace combforge {

/// t_p(D) = sum_i t_{p,i} D^i.
class DiffOperator {
 public:
  DiffOperator() = default;
  DiffOperator(std::initializer_list<std::pair<const MultiIndex, cplx>> terms) {
    for (const auto& [i, c] : terms) add(i, c);
  }

  /// Scalar multiple of the identity in dimension `dim`.
  static DiffOperator scalar(int dim, cplx c) {
    DiffOperator d;
    d.add(MultiIndex(dim), c);
    return d;
  }

  void add(const MultiIndex& i, cplx c) {
    cplx& slot = terms_[i];
    slot += c;
    if (slot == cplx{}) terms_.erase(i);
  }

  const std::map<MultiIndex, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  cplx coeff(const MultiIndex& i) const {
    auto it = terms_.find(i);
    return it == terms_.end() ? cplx{} : it->second;
  }

  int order() const {
    int o = 0;
    for (const auto& [i, c] : terms_) o = std::max(o, i.total());
    return o;
  }
  /// max_i |t_{p,i}|
  double norm() const {
    double m = 0.0;
    for (const auto& [i, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  bool operator==(const DiffOperator&) const = default;

 private:
  std::map<MultiIndex, cplx> terms_;
};

struct CombEntry {
  Vec point;
  DiffOperator op;
};

class WeightedComb {
 public:
  int dim() const { return dim_; }
  const std::vector<CombEntry>& entries() const { return entries_; }
  const Region& window() const { return *window_; }
  int order() const { return order_; }
  std::size_t size() const { return entries_.size(); }

  std::vector<Vec> support() const {
    std::vector<Vec> s;
    s.reserve(entries_.size());
    for (const auto& e : entries_) s.push_back(e.point);
    return s;
  }

  friend WeightedComb make_comb(std::vector<CombEntry>, Region);

 private:
  int dim_ = 0;
  std::vector<CombEntry> entries_;
  std::optional<Region> window_;
  int order_ = 0;
};

/// Normalizes entries (zero coefficients are never stored) and validates them.
inline WeightedComb make_comb(std::vector<CombEntry> entries, Region window) {
  require(!entries.empty(), ErrorCode::InvalidParams, "a comb needs at least one entry");
  WeightedComb t;
  t.dim_ = window.dim();
  double extent = 1.0;
  for (const auto& e : entries) {
    require(e.point.size() == t.dim_, ErrorCode::DimensionMismatch, "comb point dimension differs from window");
    require(!e.op.empty(), ErrorCode::EmptyOperator, "comb entry has an empty operator");
    for (const auto& [i, c] : e.op.terms())
      require(i.dim() == t.dim_, ErrorCode::DimensionMismatch, "multi-index dimension differs from window");
    extent = std::max(extent, e.point.cwiseAbs().maxCoeff());
    t.order_ = std::max(t.order_, e.op.order());
  }
  SpatialIndex idx(t.dim_, std::max(1e-12, extent * 1e-9));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    require(!idx.find_within(entries[i].point, 1e-12).has_value(), ErrorCode::DuplicatePoint,
            "comb points must be pairwise distinct");
    idx.insert(entries[i].point, i);
  }
  t.entries_ = std::move(entries);
  t.window_ = std::move(window);
  return t;
}

/// Order-0 comb sum_p w_p delta_p.
inline WeightedComb scalar_comb(const std::vector<Vec>& points, const std::vector<cplx>& weights, Region window) {
  require(points.size() == weights.size(), ErrorCode::InvalidParams, "points and weights differ in length");
  std::vector<CombEntry> e;
  e.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] == cplx{}) continue;
    e.push_back({points[i], DiffOperator::scalar(window.dim(), weights[i])});
  }
  return make_comb(std::move(e), std::move(window));
}

inline WeightedComb unit_comb(const std::vector<Vec>& points, Region window) {
  return scalar_comb(points, std::vector<cplx>(points.size(), 1.0), std::move(window));
}

/// t(phi) = sum_p sum_i t_{p,i} (-1)^{|i|} (D^i phi)(p).
inline cplx evaluate(const WeightedComb& t, const TestFunction& phi) {
  require(phi.max_order() >= t.order(), ErrorCode::OrderTooLow, "test function order is below the comb order");
  require(phi.dim() == t.dim(), ErrorCode::DimensionMismatch, "test function dimension differs from comb");
  std::vector<cplx> parts(t.size());
  parts.reserve(t.size());
  parallel_for(t.size(), [&](std::size_t k) {
    const auto& e = t.entries()[k];
    const Jet j = phi.jet(e.point, e.op.order());
    cplx s{};
    for (const auto& [i, c] : e.op.terms()) s += c * sign_pow(i.total()) * j.derivative(i);
    parts[k] = s;
  });
  return tree_sum(parts);
}

inline Region reflected(const Region& r) {
  return std::visit(
      [](const auto& k) -> Region {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Ball>) return Region::ball(-k.center, k.radius);
        else if constexpr (std::is_same_v<T, Box>) return Region::box(-k.hi, -k.lo);
        else return Region::dual_cube(k.forms, k.scale, k.margin);
      },
      r.kind());
}

/// t*(x) = conj(t)(-x): (p, {i -> c}) maps to (-p, {i -> (-1)^{|i|} conj(c)}).
inline WeightedComb adjoint(const WeightedComb& t) {
  std::vector<CombEntry> out;
  out.reserve(t.size());
  for (const auto& e : t.entries()) {
    DiffOperator op;
    for (const auto& [i, c] : e.op.terms()) op.add(i, sign_pow(i.total()) * std::conj(c));
    out.push_back({-e.point, std::move(op)});
  }
  return make_comb(std::move(out), reflected(t.window()));
}

struct TemperednessReport {
  bool bounded = true;
  double partial_sum = 0.0;
  /// Fitted exponent e+1 of the shell density dS/dR ~ R^e; negative means a
  /// convergent tail.
  double fitted_exponent = -std::numeric_limits<double>::infinity();
  double exponent_stderr = 0.0;
  int shells_used = 0;
  bool windowed = true;
};

/// Windowed evidence for sum_p (|p|+1)^{-m} ||t_p|| < infinity. Partial sums
/// are taken over `shells` nested balls; the growth exponent of the shell
/// contributions is fitted by least squares in log-log coordinates.
inline TemperednessReport temperedness_diagnostic(const WeightedComb& t, int m, int shells = 16) {
  require(m >= 0, ErrorCode::InvalidParams, "m must be non-negative");
  TemperednessReport rep;
  std::vector<double> radius(t.size()), term(t.size());
  double rmax = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    radius[k] = t.entries()[k].point.norm();
    term[k] = std::pow(radius[k] + 1.0, -static_cast<double>(m)) * t.entries()[k].op.norm();
    rmax = std::max(rmax, radius[k]);
  }
  rep.partial_sum = tree_sum(term);
  if (rmax <= 0.0) return rep;

  // Shells over [rmax/shells * s, rmax/shells * (s+1)); the innermost shell
  // is skipped since log R is undefined there.
  std::vector<double> shell(shells, 0.0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    int s = static_cast<int>(radius[k] / rmax * shells);
    s = std::min(s, shells - 1);
    shell[s] += term[k];
  }
  const double dr = rmax / shells;
  std::vector<double> xs, ys;
  for (int s = 1; s < shells; ++s) {
    if (shell[s] <= 0.0) continue;
    xs.push_back(std::log((s + 0.5) * dr));
    ys.push_back(std::log(shell[s] / dr));
  }
  rep.shells_used = static_cast<int>(xs.size());
  if (xs.size() < 3) return rep;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    sse += r * r;
  }
  rep.exponent_stderr = std::sqrt(sse / std::max(1.0, n - 2.0) / sxx);
  rep.fitted_exponent = slope + 1.0;
  rep.bounded = rep.fitted_exponent + 2.0 * rep.exponent_stderr < 0.0;
  return rep;
}

}  // namespace combforge
