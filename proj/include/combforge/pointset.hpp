#pragma once

// Metric analysis of finite point configurations observed in a window:
// minimal distance, difference sets and the uniform-discreteness hypotheses.

#include "combforge/lattice.hpp"

#include <limits>
#include <random>
#include <unordered_map>

namespace combforge {

/// Uniform hash grid over points of fixed dimension.
class SpatialIndex {
 public:
  SpatialIndex(int dim, double cell) : dim_(dim), cell_(cell) {
    require(cell > 0.0 && std::isfinite(cell), ErrorCode::InvalidParams, "spatial index cell must be positive");
  }

  void insert(const Vec& p, std::size_t id) { cells_[key(p)].push_back({p, id}); }

  /// Calls fn(point, id) for candidates in the 3^n cells around p.
  template <typename Fn>
  void for_neighbors(const Vec& p, Fn&& fn) const {
    Key base = key(p);
    Key k = base;
    std::vector<int> off(dim_, -1);
    while (true) {
      for (int i = 0; i < dim_; ++i) k[i] = base[i] + off[i];
      auto it = cells_.find(k);
      if (it != cells_.end())
        for (const auto& e : it->second) fn(e.p, e.id);
      int axis = 0;
      while (axis < dim_ && ++off[axis] > 1) {
        off[axis] = -1;
        ++axis;
      }
      if (axis == dim_) break;
    }
  }

  /// Id of some stored point within `tol` of p (tol <= cell), if any.
  std::optional<std::size_t> find_within(const Vec& p, double tol) const {
    const Key base = key(p);
    if (auto it = cells_.find(base); it != cells_.end())
      for (const auto& e : it->second)
        if ((e.p - p).norm() <= tol) return e.id;
    // Neighbouring cells matter only when p is within tol of a cell face.
    bool edge = false;
    for (int i = 0; i < dim_ && !edge; ++i) {
      const double f = p[i] / cell_ - static_cast<double>(base[i]);
      edge = f * cell_ <= tol || (1.0 - f) * cell_ <= tol;
    }
    if (!edge) return std::nullopt;
    std::optional<std::size_t> hit;
    for_neighbors(p, [&](const Vec& q, std::size_t id) {
      if (!hit && (q - p).norm() <= tol) hit = id;
    });
    return hit;
  }

  void clear() { cells_.clear(); }

 private:
  using Key = std::vector<std::int64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
      return h;
    }
  };
  struct Entry {
    Vec p;
    std::size_t id;
  };

  Key key(const Vec& p) const {
    Key k(dim_);
    for (int i = 0; i < dim_; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_));
    return k;
  }

  int dim_;
  double cell_;
  std::unordered_map<Key, std::vector<Entry>, KeyHash> cells_;
};

// ---------------------------------------------------------------------------

/// A finite observation of a (typically infinite) point set.
class PointSet {
 public:
  int dim() const { return dim_; }
  const std::vector<Vec>& points() const { return points_; }
  const Region& window() const { return *window_; }
  std::size_t size() const { return points_.size(); }

  friend PointSet make_point_set(std::vector<Vec>, Region, double);

 private:
  int dim_ = 0;
  std::vector<Vec> points_;
  std::optional<Region> window_;
};

/// Validates distinctness (1e-12) and containment in the window (within `window_tol`).
inline PointSet make_point_set(std::vector<Vec> points, Region window, double window_tol = 1e-9) {
  PointSet s;
  s.dim_ = window.dim();
  double extent = 1.0;
  for (const Vec& p : points) {
    require(p.size() == s.dim_, ErrorCode::DimensionMismatch, "point dimension differs from window");
    require(p.allFinite(), ErrorCode::InvalidParams, "non-finite point coordinate");
    require(window.contains(p, window_tol), ErrorCode::InvalidParams, "point lies outside the window");
    extent = std::max(extent, p.cwiseAbs().maxCoeff());
  }
  SpatialIndex idx(s.dim_, std::max(1e-12, extent * 1e-9));
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(!idx.find_within(points[i], 1e-12).has_value(), ErrorCode::DuplicatePoint,
            "points must be pairwise distinct");
    idx.insert(points[i], i);
  }
  s.points_ = std::move(points);
  s.window_ = std::move(window);
  return s;
}

/// Point set whose window is the bounding box of the points (padded by `pad`).
inline PointSet make_point_set(std::vector<Vec> points, double pad = 0.5) {
  require(!points.empty(), ErrorCode::TooFewPoints, "empty point set needs an explicit window");
  Vec lo = points.front(), hi = points.front();
  for (const Vec& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo.array() -= pad;
  hi.array() += pad;
  return make_point_set(std::move(points), Region::box(lo, hi));
}

struct UDReport {
  double min_distance = std::numeric_limits<double>::infinity();
  bool is_ud = true;
  std::optional<std::pair<Vec, Vec>> witness;
};

inline double pair_distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// Closest pair by randomized incremental hashing with cell size equal to the
/// current best distance (expected linear time). `threshold` sets is_ud.
inline UDReport min_distance(const PointSet& s, double threshold = 0.0) {
  const auto& pts = s.points();
  require(pts.size() >= 2, ErrorCode::TooFewPoints, "min_distance needs at least two points");
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(0x5eed);
  std::shuffle(order.begin(), order.end(), rng);

  std::size_t wa = order[0], wb = order[1];
  double best = pair_distance(pts[wa], pts[wb]);
  SpatialIndex grid(s.dim(), best);
  grid.insert(pts[order[0]], order[0]);
  grid.insert(pts[order[1]], order[1]);
  for (std::size_t t = 2; t < order.size(); ++t) {
    const std::size_t i = order[t];
    double local = best;
    std::size_t partner = 0;
    grid.for_neighbors(pts[i], [&](const Vec& q, std::size_t id) {
      const double d = pair_distance(pts[i], q);
      if (d < local) {
        local = d;
        partner = id;
      }
    });
    if (local < best) {
      best = local;
      wa = partner;
      wb = i;
      grid = SpatialIndex(s.dim(), best);
      for (std::size_t u = 0; u <= t; ++u) grid.insert(pts[order[u]], order[u]);
    } else {
      grid.insert(pts[i], i);
    }
  }
  UDReport r;
  r.min_distance = best;
  r.is_ud = best >= threshold;
  r.witness = std::make_pair(pts[std::min(wa, wb)], pts[std::max(wa, wb)]);
  return r;
}

/// Minimal distance with the singleton convention d = +inf.
inline double min_distance_or_inf(const PointSet& s) {
  return s.size() < 2 ? std::numeric_limits<double>::infinity() : min_distance(s).min_distance;
}

/// Deduplicating accumulator of vectors (tolerance-merged), used for
/// difference sets and autocorrelation supports.
template <typename Payload>
class VectorBins {
 public:
  VectorBins(int dim, double tol) : tol_(tol), index_(dim, 1024.0 * tol) {}

  /// Returns a reference to the payload of the bin holding v (created on demand).
  Payload& at(const Vec& v) {
    if (auto hit = index_.find_within(v, tol_)) return entries_[*hit].second;
    index_.insert(v, entries_.size());
    entries_.push_back({v, Payload{}});
    return entries_.back().second;
  }
  std::size_t size() const { return entries_.size(); }
  std::vector<std::pair<Vec, Payload>>& entries() { return entries_; }

 private:
  double tol_;
  SpatialIndex index_;
  std::vector<std::pair<Vec, Payload>> entries_;
};

/// Windowed difference set {p - p' : |p - p'| <= max_radius}, including 0.
inline PointSet difference_set(const PointSet& s, double max_radius, std::optional<double> dedupe_tol = std::nullopt,
                               std::size_t cap = kDefaultPointCap) {
  require(max_radius > 0.0, ErrorCode::InvalidParams, "max_radius must be positive");
  const double tol = dedupe_tol.value_or(1e-9 * max_radius);
  VectorBins<char> bins(s.dim(), tol);
  bins.at(Vec::Zero(s.dim()));
  const auto& pts = s.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const Vec d = pts[i] - pts[j];
      if (d.norm() > max_radius) continue;
      bins.at(d);
      require(bins.size() <= cap, ErrorCode::OutputCap, "difference set exceeds the output cap");
    }
  }
  std::vector<Vec> out;
  out.reserve(bins.size());
  for (auto& e : bins.entries()) out.push_back(e.first);
  std::sort(out.begin(), out.end(), lex_less);
  return make_point_set(std::move(out), Region::ball(s.dim(), max_radius), tol + 1e-12 * max_radius);
}

struct HypothesisReport {
  bool lambda_ud = true;
  bool diff_ud = true;
  double d_lambda = std::numeric_limits<double>::infinity();
  double d_diff = std::numeric_limits<double>::infinity();
  double ud_threshold = 0.0;
  double diff_radius = 0.0;
  std::size_t diff_size = 0;
  bool windowed = true;  // windowed evidence, not a proof about the infinite set
};

/// Uniform discreteness of the set and of its windowed difference set.
inline HypothesisReport hypothesis_check(const PointSet& s, double ud_threshold, double diff_radius) {
  HypothesisReport r;
  r.ud_threshold = ud_threshold;
  r.diff_radius = diff_radius;
  r.d_lambda = min_distance_or_inf(s);
  r.lambda_ud = r.d_lambda >= ud_threshold;
  const PointSet diff = difference_set(s, diff_radius);
  r.diff_size = diff.size();
  r.d_diff = min_distance_or_inf(diff);
  r.diff_ud = r.d_diff >= ud_threshold;
  return r;
}

}  // namespace combforge
