#pragma once

// Shared vocabulary: scalar/vector aliases, error type, multi-indices and a
// small deterministic parallel-for.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace combforge {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// The Fourier convention constant j = 2*pi*i.
inline constexpr cplx kJ{0.0, kTwoPi};

enum class ErrorCode {
  SingularMatrix,
  DimensionMismatch,
  EmptyShifts,
  RegionTooLarge,
  TooFewPoints,
  OutputCap,
  DuplicatePoint,
  EmptyOperator,
  OrderTooLow,
  OrderOverflow,
  AllCandidatesDegenerate,
  TailBoundViolated,
  WindowTooSmall,
  RecurrenceNotFound,
  IllConditioned,
  RootsOffCircle,
  GridTooCoarse,
  SupportMismatch,
  SupportBudgetExceeded,
  InvalidParams,
  ParseError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyShifts: return "EmptyShifts";
    case ErrorCode::RegionTooLarge: return "RegionTooLarge";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::OutputCap: return "OutputCap";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::EmptyOperator: return "EmptyOperator";
    case ErrorCode::OrderTooLow: return "OrderTooLow";
    case ErrorCode::OrderOverflow: return "OrderOverflow";
    case ErrorCode::AllCandidatesDegenerate: return "AllCandidatesDegenerate";
    case ErrorCode::TailBoundViolated: return "TailBoundViolated";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::RecurrenceNotFound: return "RecurrenceNotFound";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::RootsOffCircle: return "RootsOffCircle";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::SupportBudgetExceeded: return "SupportBudgetExceeded";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// ---------------------------------------------------------------------------
// MultiIndex

/// Non-negative integer exponent vector i = (i_1..i_n), used both for
/// derivatives D^i and monomials x^i.
struct MultiIndex {
  std::vector<int> entries;

  MultiIndex() = default;
  explicit MultiIndex(int dim) : entries(static_cast<std::size_t>(dim), 0) {}
  MultiIndex(std::initializer_list<int> e) : entries(e) {}
  explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {}

  int dim() const { return static_cast<int>(entries.size()); }
  int total() const { return std::accumulate(entries.begin(), entries.end(), 0); }
  int operator[](int k) const { return entries[static_cast<std::size_t>(k)]; }
  int& operator[](int k) { return entries[static_cast<std::size_t>(k)]; }

  static MultiIndex unit(int dim, int axis) {
    MultiIndex m(dim);
    m[axis] = 1;
    return m;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r(*this);
    for (int k = 0; k < dim(); ++k) r[k] += o[k];
    return r;
  }
  MultiIndex operator-(const MultiIndex& o) const {
    MultiIndex r(*this);
    for (int k = 0; k < dim(); ++k) r[k] -= o[k];
    return r;
  }
  /// Componentwise <=.
  bool le(const MultiIndex& o) const {
    for (int k = 0; k < dim(); ++k)
      if (entries[k] > o.entries[k]) return false;
    return true;
  }
  bool is_zero() const {
    return std::all_of(entries.begin(), entries.end(), [](int v) { return v == 0; });
  }

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;
};

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// i! = i_1! ... i_n!
inline double factorial(const MultiIndex& m) {
  double f = 1.0;
  for (int v : m.entries) f *= factorial(v);
  return f;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Product of componentwise binomials C(a, b).
inline double binomial(const MultiIndex& a, const MultiIndex& b) {
  double r = 1.0;
  for (int k = 0; k < a.dim(); ++k) r *= binomial(a[k], b[k]);
  return r;
}

/// Falling factorial n (n-1) ... (n-k+1).
inline double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (n - i);
  return r;
}

inline double sign_pow(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

/// x^a for a real point.
inline double monomial(const Vec& x, const MultiIndex& a) {
  double r = 1.0;
  for (int k = 0; k < a.dim(); ++k) r *= std::pow(x[k], a[k]);
  return r;
}

/// All multi-indices of dimension `dim` with total degree <= `order`, graded
/// then lexicographic.
inline std::vector<MultiIndex> multi_indices_up_to(int dim, int order) {
  std::vector<MultiIndex> out;
  for (int deg = 0; deg <= order; ++deg) {
    MultiIndex cur(dim);
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == dim - 1) {
        cur[axis] = left;
        out.push_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v) {
        cur[axis] = v;
        rec(axis + 1, left - v);
      }
    };
    if (dim == 0) {
      if (deg == 0) out.emplace_back(0);
      continue;
    }
    rec(0, deg);
  }
  return out;
}

/// All b <= a componentwise.
inline std::vector<MultiIndex> sub_indices(const MultiIndex& a) {
  std::vector<MultiIndex> out;
  MultiIndex cur(a.dim());
  std::function<void(int)> rec = [&](int axis) {
    if (axis == a.dim()) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= a[axis]; ++v) {
      cur[axis] = v;
      rec(axis + 1);
    }
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Vectors

inline Vec make_vec(std::initializer_list<double> v) {
  Vec r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r[i++] = x;
  return r;
}

inline Vec make_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

/// Complex exponential exp(-j <s, x>) with j = 2 pi i.
inline cplx phase_factor(const Vec& s, const Vec& x) {
  const double t = s.dot(x);
  // Reduce before multiplying by 2 pi so large arguments keep their fractional precision.
  const double f = t - std::round(t);
  return std::polar(1.0, -kTwoPi * f);
}

// ---------------------------------------------------------------------------
// Threads

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{0};
  return n;
}
}  // namespace detail

/// Sets the worker count used by parallel_for; 0 means hardware concurrency.
inline void set_thread_count(int n) { detail::thread_setting() = std::max(0, n); }

inline int thread_count() {
  int n = detail::thread_setting();
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return n;
}

/// Runs fn(i) for i in [0, count) over contiguous blocks. Each index is
/// handled by exactly one worker, so results written per index are
/// independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(count, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Pairwise (tree) summation; the result depends only on the input order.
template <typename T>
T tree_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
  if (hi <= lo) return T{};
  if (hi - lo <= 8) {
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

template <typename T>
T tree_sum(const std::vector<T>& v) {
  return tree_sum(v, 0, v.size());
}

}  // namespace combforge
