#pragma once

// Truncated multivariate Taylor series ("jets"). A jet of order M at a point
// x stores the coefficients f_b = D^b f(x) / b! for |b| <= M. Products of
// jets follow the Leibniz rule exactly, which is how every derivative in the
// library is evaluated: symbolically, factor by factor, never by finite
// differences.

#include "combforge/core.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace combforge {

/// Enumeration of the multi-indices of a jet space plus its product table.
class JetLayout {
 public:
  JetLayout(int dim, int order) : dim_(dim), order_(order), indices_(multi_indices_up_to(dim, order)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) rank_.emplace(indices_[i], static_cast<int>(i));
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      for (std::size_t j = 0; j < indices_.size(); ++j) {
        if (indices_[i].total() + indices_[j].total() > order_) continue;
        products_.push_back({static_cast<int>(i), static_cast<int>(j), rank(indices_[i] + indices_[j])});
      }
    }
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index(std::size_t k) const { return indices_[k]; }

  /// Position of `m`, or -1 when |m| exceeds the order.
  int rank(const MultiIndex& m) const {
    auto it = rank_.find(m);
    return it == rank_.end() ? -1 : it->second;
  }

  struct Triple {
    int a, b, out;
  };
  const std::vector<Triple>& products() const { return products_; }

 private:
  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, int> rank_;
  std::vector<Triple> products_;
};

inline std::shared_ptr<const JetLayout> jet_layout(int dim, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_shared<const JetLayout>(dim, order);
  return slot;
}

class Jet {
 public:
  Jet() = default;
  Jet(int dim, int order) : layout_(jet_layout(dim, order)), c_(layout_->size(), cplx{}) {}

  static Jet constant(int dim, int order, cplx v) {
    Jet j(dim, order);
    j.c_[0] = v;
    return j;
  }

  /// Jet of the linear form <h, eps> (value 0 at the expansion point).
  static Jet linear(const Vec& h, int order) {
    const int n = static_cast<int>(h.size());
    Jet j(n, order);
    if (order >= 1)
      for (int k = 0; k < n; ++k) j.c_[j.layout_->rank(MultiIndex::unit(n, k))] = h[k];
    return j;
  }

  /// Jet of g(<h, x - x0>) given the univariate Taylor coefficients g_d of g
  /// at the expansion point, d = 0..order.
  static Jet along(const Vec& h, const std::vector<cplx>& g) {
    const int order = static_cast<int>(g.size()) - 1;
    const int n = static_cast<int>(h.size());
    Jet out = constant(n, order, g[0]);
    if (order == 0) return out;
    const Jet lin = linear(h, order);
    Jet power = constant(n, order, 1.0);
    for (int d = 1; d <= order; ++d) {
      power = power * lin;
      if (g[d] != cplx{}) out += power * g[d];
    }
    return out;
  }

  /// Separable jet: product over axes of univariate series u_k (coefficients
  /// in the k-th coordinate).
  static Jet separable(const std::vector<std::vector<cplx>>& per_axis, int order) {
    const int n = static_cast<int>(per_axis.size());
    Jet j(n, order);
    for (std::size_t r = 0; r < j.layout_->size(); ++r) {
      const MultiIndex& m = j.layout_->index(r);
      cplx v = 1.0;
      for (int k = 0; k < n; ++k) v *= per_axis[k][m[k]];
      j.c_[r] = v;
    }
    return j;
  }

  int dim() const { return layout_->dim(); }
  int order() const { return layout_->order(); }
  const JetLayout& layout() const { return *layout_; }
  std::size_t size() const { return c_.size(); }

  cplx value() const { return c_[0]; }
  cplx coeff(std::size_t r) const { return c_[r]; }
  cplx& coeff(std::size_t r) { return c_[r]; }
  cplx coeff(const MultiIndex& m) const {
    const int r = layout_->rank(m);
    return r < 0 ? cplx{} : c_[r];
  }
  /// D^m f at the expansion point.
  cplx derivative(const MultiIndex& m) const { return coeff(m) * factorial(m); }

  Jet& operator+=(const Jet& o) {
    for (std::size_t r = 0; r < c_.size(); ++r) c_[r] += o.c_[r];
    return *this;
  }
  Jet operator+(const Jet& o) const {
    Jet r(*this);
    r += o;
    return r;
  }
  Jet operator*(cplx s) const {
    Jet r(*this);
    for (auto& v : r.c_) v *= s;
    return r;
  }
  Jet operator*(const Jet& o) const {
    Jet r(dim(), order());
    for (const auto& t : layout_->products()) {
      const cplx a = c_[t.a];
      if (a == cplx{}) continue;
      r.c_[t.out] += a * o.c_[t.b];
    }
    return r;
  }

  /// Multiplicative inverse as a truncated series; requires value() != 0.
  Jet reciprocal() const {
    require(std::abs(c_[0]) > 0.0, ErrorCode::IllConditioned, "reciprocal of a jet with zero value");
    Jet g(dim(), order());
    g.c_[0] = 1.0 / c_[0];
    // (f g)_b = 0 for b != 0, solved in graded order.
    for (std::size_t r = 1; r < c_.size(); ++r) {
      const MultiIndex& b = layout_->index(r);
      cplx acc{};
      for (const MultiIndex& gm : sub_indices(b)) {
        if (gm == b) continue;
        acc += coeff(b - gm) * g.coeff(gm);
      }
      g.c_[r] = -acc / c_[0];
    }
    return g;
  }

 private:
  std::shared_ptr<const JetLayout> layout_;
  std::vector<cplx> c_;
};

// ---------------------------------------------------------------------------
// Univariate truncated series helpers (coefficient vectors of length M+1).

using Series = std::vector<cplx>;

inline Series series_mul(const Series& a, const Series& b) {
  Series r(a.size(), cplx{});
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == cplx{}) continue;
    for (std::size_t j = 0; i + j < r.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

inline Series series_pow(const Series& a, int p) {
  Series r(a.size(), cplx{});
  r[0] = 1.0;
  for (int k = 0; k < p; ++k) r = series_mul(r, a);
  return r;
}

/// sin(pi u) and cos(pi u) with exact values at integers and half-integers.
/// `u` is snapped to the nearest integer (resp. half-integer) when closer
/// than `snap`, so lattice arguments produce exact zeros.
inline double sinpi(double u, double snap = 1e-11) {
  const double r = u - 2.0 * std::round(u / 2.0);  // r in [-1, 1]
  if (std::abs(r - std::round(r)) <= snap) return 0.0;
  if (std::abs(std::abs(r) - 0.5) <= snap) return r > 0 ? 1.0 : -1.0;
  return std::sin(kPi * r);
}

inline double cospi(double u, double snap = 1e-11) {
  const double r = u - 2.0 * std::round(u / 2.0);
  if (std::abs(std::abs(r) - 0.5) <= snap) return 0.0;
  if (std::abs(r) <= snap) return 1.0;
  if (std::abs(std::abs(r) - 1.0) <= snap) return -1.0;
  return std::cos(kPi * r);
}

/// Taylor coefficients in e of sin(pi c (u + e)), order M.
inline Series sin_series(double u, double c, int order) {
  const double s0 = sinpi(c * u), c0 = cospi(c * u);
  Series r(static_cast<std::size_t>(order) + 1);
  double scale = 1.0;  // (pi c)^d / d!
  for (int d = 0; d <= order; ++d) {
    // d-th derivative of sin at phase: sin(x + d pi/2)
    double v = 0.0;
    switch (d % 4) {
      case 0: v = s0; break;
      case 1: v = c0; break;
      case 2: v = -s0; break;
      case 3: v = -c0; break;
    }
    r[d] = v * scale;
    scale *= kPi * c / (d + 1);
  }
  return r;
}

/// Taylor coefficients in e of sinc(pi c (u + e)) = sin(pi c (u+e)) / (pi c (u+e)).
inline Series sinc_series(double u, double c, int order) {
  Series r(static_cast<std::size_t>(order) + 1, cplx{});
  const double w = c * u;
  if (std::abs(w) < 0.25) {
    // Power series sum_k (-1)^k (pi c (u+e))^{2k} / (2k+1)!, expanded in e.
    const double pc = kPi * c;
    for (int k = 0; k < 40; ++k) {
      const double ck = sign_pow(k) * std::pow(pc, 2 * k) / factorial(2 * k + 1);
      for (int d = 0; d <= std::min(order, 2 * k); ++d)
        r[d] += ck * binomial(2 * k, d) * std::pow(u, 2 * k - d);
    }
    return r;
  }
  // sin series times 1 / (pi c (u + e)) = 1/(pi c u) * sum (-e/u)^d.
  Series inv(r.size());
  for (int d = 0; d <= order; ++d) inv[d] = sign_pow(d) / (kPi * c * u) / std::pow(u, d);
  return series_mul(sin_series(u, c, order), inv);
}

}  // namespace combforge
