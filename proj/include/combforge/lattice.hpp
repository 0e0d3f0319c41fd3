#pragma once

// Full-rank lattices L = G Z^n, their duals, crystals (finite unions of
// cosets L + q_k) and observation windows.

#include "combforge/core.hpp"

#include <optional>
#include <variant>

namespace combforge {

// ---------------------------------------------------------------------------
// Region

struct Ball {
  Vec center;
  double radius = 1.0;
};

struct Box {
  Vec lo, hi;
};

/// { x : |<g_i, x>| <= scale + margin * |g_i| for all i } where g_i are the
/// rows of `forms`. With margin = 0 this is scale * G for the parallelotope
/// G = { |<g_i, x>| <= 1 }; a positive margin inflates each slab by a ball of
/// radius `margin` (a superset of scale*G + B(margin) that agrees on faces).
struct DualCube {
  Mat forms;
  double scale = 1.0;
  double margin = 0.0;
};

class Region {
 public:
  using Kind = std::variant<Ball, Box, DualCube>;

  static Region ball(Vec center, double radius) {
    require(radius > 0.0, ErrorCode::InvalidParams, "ball radius must be positive");
    return Region(Ball{std::move(center), radius});
  }
  static Region ball(int dim, double radius) { return ball(Vec::Zero(dim), radius); }
  static Region box(Vec lo, Vec hi) {
    require(lo.size() == hi.size(), ErrorCode::DimensionMismatch, "box bounds differ in dimension");
    for (Eigen::Index k = 0; k < lo.size(); ++k)
      require(lo[k] < hi[k], ErrorCode::InvalidParams, "box requires lo < hi componentwise");
    return Region(Box{std::move(lo), std::move(hi)});
  }
  static Region box1(double lo, double hi) { return box(make_vec({lo}), make_vec({hi})); }
  static Region dual_cube(Mat forms, double scale, double margin = 0.0) {
    require(scale > 0.0, ErrorCode::InvalidParams, "dual-cube scale must be positive");
    require(margin >= 0.0, ErrorCode::InvalidParams, "dual-cube margin must be non-negative");
    require(forms.rows() == forms.cols(), ErrorCode::DimensionMismatch, "dual-cube forms must be square");
    return Region(DualCube{std::move(forms), scale, margin});
  }

  const Kind& kind() const { return kind_; }

  int dim() const {
    return std::visit(
        [](const auto& r) -> int {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(r.center.size());
          else if constexpr (std::is_same_v<T, Box>) return static_cast<int>(r.lo.size());
          else return static_cast<int>(r.forms.cols());
        },
        kind_);
  }

  /// Membership with an outward tolerance `tol` (length units).
  bool contains(const Vec& x, double tol = 0.0) const {
    return std::visit(
        [&](const auto& r) -> bool {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Ball>) {
            return (x - r.center).norm() <= r.radius + tol;
          } else if constexpr (std::is_same_v<T, Box>) {
            for (Eigen::Index k = 0; k < x.size(); ++k)
              if (x[k] < r.lo[k] - tol || x[k] > r.hi[k] + tol) return false;
            return true;
          } else {
            for (Eigen::Index i = 0; i < r.forms.rows(); ++i) {
              const double gn = r.forms.row(i).norm();
              if (std::abs(r.forms.row(i).dot(x)) > r.scale + (r.margin + tol) * gn) return false;
            }
            return true;
          }
        },
        kind_);
  }

  /// Axis-aligned bounding box.
  std::pair<Vec, Vec> bounds() const {
    return std::visit(
        [](const auto& r) -> std::pair<Vec, Vec> {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Ball>) {
            const Vec d = Vec::Constant(r.center.size(), r.radius);
            return {r.center - d, r.center + d};
          } else if constexpr (std::is_same_v<T, Box>) {
            return {r.lo, r.hi};
          } else {
            // Vertices of the parallelotope are forms^{-1} * (+-bound_i).
            const Eigen::Index n = r.forms.cols();
            const Mat inv = r.forms.inverse();
            Vec lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
            Vec hi = -lo;
            for (long mask = 0; mask < (1L << n); ++mask) {
              Vec y(n);
              for (Eigen::Index i = 0; i < n; ++i) {
                const double b = r.scale + r.margin * r.forms.row(i).norm();
                y[i] = (mask >> i) & 1 ? b : -b;
              }
              const Vec v = inv * y;
              lo = lo.cwiseMin(v);
              hi = hi.cwiseMax(v);
            }
            return {lo, hi};
          }
        },
        kind_);
  }

  double volume() const {
    return std::visit(
        [](const auto& r) -> double {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Ball>) {
            const double n = static_cast<double>(r.center.size());
            return std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(r.radius, n);
          } else if constexpr (std::is_same_v<T, Box>) {
            return (r.hi - r.lo).prod();
          } else {
            // Volume of the margin-free parallelotope.
            const double n = static_cast<double>(r.forms.cols());
            return std::pow(2.0 * r.scale, n) / std::abs(r.forms.determinant());
          }
        },
        kind_);
  }

  /// Largest r such that the ball B(center, r) around the region's centre fits inside.
  double inradius() const {
    return std::visit(
        [](const auto& r) -> double {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Ball>) return r.radius;
          else if constexpr (std::is_same_v<T, Box>) return 0.5 * (r.hi - r.lo).minCoeff();
          else {
            double m = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < r.forms.rows(); ++i)
              m = std::min(m, r.scale / r.forms.row(i).norm() + r.margin);
            return m;
          }
        },
        kind_);
  }

  Vec center() const {
    auto [lo, hi] = bounds();
    return 0.5 * (lo + hi);
  }

  /// The region shrunk by distance d on every side (Ball/Box), or nullopt when empty.
  std::optional<Region> inset(double d) const {
    return std::visit(
        [&](const auto& r) -> std::optional<Region> {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Ball>) {
            if (r.radius - d <= 0.0) return std::nullopt;
            return Region(Ball{r.center, r.radius - d});
          } else if constexpr (std::is_same_v<T, Box>) {
            const Vec lo = r.lo.array() + d, hi = r.hi.array() - d;
            if ((lo.array() >= hi.array()).any()) return std::nullopt;
            return Region(Box{lo, hi});
          } else {
            DualCube c = r;
            c.margin -= d;
            if (c.margin < 0.0) {
              double fmax = 0.0;
              for (Eigen::Index i = 0; i < c.forms.rows(); ++i) fmax = std::max(fmax, c.forms.row(i).norm());
              c.scale += c.margin * fmax;
              c.margin = 0.0;
            }
            if (c.scale <= 0.0) return std::nullopt;
            return Region(c);
          }
        },
        kind_);
  }

  Region translated(const Vec& v) const {
    return std::visit(
        [&](const auto& r) -> Region {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Ball>) return Region(Ball{r.center + v, r.radius});
          else if constexpr (std::is_same_v<T, Box>) return Region(Box{r.lo + v, r.hi + v});
          else throw Error(ErrorCode::InvalidParams, "dual-cube regions are origin-centred");
        },
        kind_);
  }

 private:
  explicit Region(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// ---------------------------------------------------------------------------
// LatticeBasis

/// L = G Z^n with G nonsingular; columns of G are the generators.
class LatticeBasis {
 public:
  const Mat& generators() const { return g_; }
  const Mat& inverse() const { return inv_; }
  double det_abs() const { return det_abs_; }
  int dim() const { return static_cast<int>(g_.cols()); }
  Vec generator(int i) const { return g_.col(i); }

  /// Upper bound for the covering radius: half the diagonal sum of the cell.
  double covering_radius() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += g_.col(i).norm();
    return 0.5 * s;
  }
  /// Default membership tolerance: 1e-9 times the covering radius.
  double default_tol() const { return 1e-9 * covering_radius(); }

  Vec coords(const Vec& x) const { return inv_ * x; }
  Vec point(const Vec& k) const { return g_ * k; }

  /// Distance from x to the nearest lattice point (by rounding G^{-1} x).
  double distance_to_lattice(const Vec& x) const {
    const Vec c = inv_ * x;
    const Vec k = c.array().round().matrix();
    return (x - g_ * k).norm();
  }
  bool contains(const Vec& x, std::optional<double> tol = std::nullopt) const {
    return distance_to_lattice(x) <= tol.value_or(default_tol());
  }

  friend LatticeBasis make_lattice(const Mat& g);

 private:
  Mat g_, inv_;
  double det_abs_ = 1.0;
};

inline LatticeBasis make_lattice(const Mat& g) {
  require(g.rows() == g.cols() && g.rows() > 0, ErrorCode::DimensionMismatch, "generator matrix must be square");
  require(g.allFinite(), ErrorCode::InvalidParams, "generator matrix has non-finite entries");
  const double det = g.determinant();
  const double scale = std::pow(g.norm(), static_cast<double>(g.rows()));
  require(std::abs(det) > 1e-12 * scale, ErrorCode::SingularMatrix, "|det G| is below 1e-12 * |G|^n");
  LatticeBasis l;
  l.g_ = g;
  l.inv_ = g.partialPivLu().inverse();
  l.det_abs_ = std::abs(det);
  return l;
}

inline LatticeBasis make_lattice(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Mat g(n, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    require(static_cast<Eigen::Index>(row.size()) == n, ErrorCode::DimensionMismatch, "ragged generator matrix");
    Eigen::Index j = 0;
    for (double v : row) g(i, j++) = v;
    ++i;
  }
  return make_lattice(g);
}

inline LatticeBasis integer_lattice(int dim) { return make_lattice(Mat::Identity(dim, dim)); }

/// L* = (G^T)^{-1} Z^n.
inline LatticeBasis dual(const LatticeBasis& l) { return make_lattice(l.inverse().transpose()); }

struct Reduction {
  Eigen::VectorXi k;  // integer coordinates
  Vec r;              // residual in the fundamental cell G [0,1)^n
  Vec frac;           // G^{-1} r, each in [0, 1)
};

/// x = G k + r with G^{-1} r in [0,1)^n, clamping coordinates within 1e-15 of 1.
inline Reduction reduce_mod(const LatticeBasis& l, const Vec& x) {
  require(x.size() == l.dim(), ErrorCode::DimensionMismatch, "point dimension differs from lattice");
  const Vec c = l.coords(x);
  Reduction red;
  red.k.resize(c.size());
  red.frac.resize(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    double fl = std::floor(c[i]);
    double f = c[i] - fl;
    if (f >= 1.0 - 1e-15) {
      fl += 1.0;
      f = 0.0;
    }
    if (f < 0.0) f = 0.0;
    red.k[i] = static_cast<int>(fl);
    red.frac[i] = f;
  }
  red.r = x - l.generators() * red.k.cast<double>();
  return red;
}

/// Distance between x and y modulo L (nearest-point rounding).
inline double distance_mod(const LatticeBasis& l, const Vec& x, const Vec& y) {
  return l.distance_to_lattice(x - y);
}

/// Same lattice up to a unimodular change of generators.
inline bool equivalent(const LatticeBasis& a, const LatticeBasis& b, double tol = 1e-9) {
  require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "lattices of different dimension");
  const Mat m = b.inverse() * a.generators();
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (std::abs(m.data()[i] - std::round(m.data()[i])) > tol) return false;
  return std::abs(std::abs(m.array().round().matrix().determinant()) - 1.0) <= tol;
}

// ---------------------------------------------------------------------------
// Crystal

/// Finite union of cosets L + q_k, shifts canonical in G [0,1)^n and sorted.
class Crystal {
 public:
  const LatticeBasis& lattice() const { return lattice_; }
  const std::vector<Vec>& shifts() const { return shifts_; }
  int size() const { return static_cast<int>(shifts_.size()); }
  int dim() const { return lattice_.dim(); }

  /// Index of the coset containing x, or -1.
  int coset_of(const Vec& x, double tol) const {
    for (std::size_t k = 0; k < shifts_.size(); ++k)
      if (distance_mod(lattice_, x, shifts_[k]) <= tol) return static_cast<int>(k);
    return -1;
  }

  friend Crystal make_crystal(const LatticeBasis&, const std::vector<Vec>&, std::optional<double>);

 private:
  LatticeBasis lattice_;
  std::vector<Vec> shifts_;
};

/// Canonical representative of x modulo L: fractional coordinates within
/// `tol` (length units) of 1 snap to 0.
inline Vec canonical_shift(const LatticeBasis& l, const Vec& x, double tol) {
  Reduction red = reduce_mod(l, x);
  for (int i = 0; i < l.dim(); ++i) {
    const double len = l.generators().col(i).norm();
    if ((1.0 - red.frac[i]) * len <= tol) red.frac[i] = 0.0;
    if (red.frac[i] * len <= tol) red.frac[i] = 0.0;
  }
  return l.generators() * red.frac;
}

inline Crystal make_crystal(const LatticeBasis& l, const std::vector<Vec>& shifts,
                            std::optional<double> tol = std::nullopt) {
  require(!shifts.empty(), ErrorCode::EmptyShifts, "a crystal needs at least one shift");
  const double t = tol.value_or(l.default_tol());
  Crystal c;
  c.lattice_ = l;
  for (const Vec& q : shifts) {
    require(q.size() == l.dim(), ErrorCode::DimensionMismatch, "shift dimension differs from lattice");
    const Vec r = canonical_shift(l, q, t);
    const bool dup = std::any_of(c.shifts_.begin(), c.shifts_.end(),
                                 [&](const Vec& s) { return distance_mod(l, s, r) <= t; });
    if (!dup) c.shifts_.push_back(r);
  }
  std::sort(c.shifts_.begin(), c.shifts_.end(), lex_less);
  return c;
}

inline constexpr std::size_t kDefaultPointCap = 10'000'000;

namespace detail {

/// Calls fn(point) for every lattice point G k + q lying in `region` (with tol).
template <typename Fn>
void for_each_coset_point(const LatticeBasis& l, const Vec& q, const Region& region, double tol,
                          std::size_t cap, Fn&& fn) {
  const int n = l.dim();
  auto [lo, hi] = region.bounds();
  lo.array() -= tol;
  hi.array() += tol;
  // Range of integer coordinates: image of the box corners under G^{-1}.
  Vec kmin = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec kmax = -kmin;
  for (long mask = 0; mask < (1L << n); ++mask) {
    Vec corner(n);
    for (int i = 0; i < n; ++i) corner[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    const Vec c = l.coords(corner - q);
    kmin = kmin.cwiseMin(c);
    kmax = kmax.cwiseMax(c);
  }
  std::vector<long> a(n), b(n);
  double total = 1.0;
  for (int i = 0; i < n; ++i) {
    a[i] = static_cast<long>(std::floor(kmin[i])) - 1;
    b[i] = static_cast<long>(std::ceil(kmax[i])) + 1;
    total *= static_cast<double>(b[i] - a[i] + 1);
  }
  require(total <= static_cast<double>(cap) * 4.0 + 64.0, ErrorCode::RegionTooLarge,
          "enumeration would exceed the point cap");
  std::vector<long> k(a);
  Vec kv(n);
  while (true) {
    for (int i = 0; i < n; ++i) kv[i] = static_cast<double>(k[i]);
    Vec p = l.generators() * kv + q;
    if (region.contains(p, tol)) fn(p);
    int axis = 0;
    while (axis < n && ++k[axis] > b[axis]) {
      k[axis] = a[axis];
      ++axis;
    }
    if (axis == n) break;
  }
}

}  // namespace detail

/// Points of the crystal inside `region`, each once, sorted lexicographically.
inline std::vector<Vec> crystal_points(const Crystal& c, const Region& region,
                                       std::optional<double> tol = std::nullopt,
                                       std::size_t cap = kDefaultPointCap) {
  require(region.dim() == c.dim(), ErrorCode::DimensionMismatch, "region dimension differs from crystal");
  const double t = tol.value_or(c.lattice().default_tol());
  std::vector<Vec> pts;
  for (const Vec& q : c.shifts()) {
    detail::for_each_coset_point(c.lattice(), q, region, t, cap, [&](Vec p) {
      require(pts.size() < cap, ErrorCode::RegionTooLarge, "crystal point count exceeds the cap");
      pts.push_back(std::move(p));
    });
  }
  std::sort(pts.begin(), pts.end(), lex_less);
  return pts;
}

}  // namespace combforge
