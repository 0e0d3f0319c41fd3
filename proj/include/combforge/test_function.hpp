#pragma once

// Test functions exposing derivatives through jets, plus the library used to
// probe combs: (modulated, shifted) Gaussians, separable sinc powers and the
// coset-isolating functions Psi_k.
//
// Fourier convention: F(psi)(x) = integral exp(-j <xi, x>) psi(xi) d xi with
// j = 2 pi i, so that <F(t), psi> = <t, F(psi)>.

#include "combforge/jet.hpp"

#include <memory>
#include <string>

namespace combforge {

class TestFunction {
 public:
  using JetFn = std::function<Jet(const Vec& x, int order)>;

  static constexpr int kLibraryMaxOrder = 16;

  TestFunction(int dim, int max_order, JetFn fn, std::string name)
      : dim_(dim), max_order_(max_order), fn_(std::make_shared<JetFn>(std::move(fn))), name_(std::move(name)) {}

  int dim() const { return dim_; }
  int max_order() const { return max_order_; }
  const std::string& name() const { return name_; }

  Jet jet(const Vec& x, int order) const {
    require(order <= max_order_, ErrorCode::OrderTooLow,
            name_ + " supports derivatives up to order " + std::to_string(max_order_));
    require(x.size() == dim_, ErrorCode::DimensionMismatch, name_ + ": point has wrong dimension");
    return (*fn_)(x, order);
  }
  cplx value(const Vec& x) const { return jet(x, 0).value(); }
  cplx derivative(const MultiIndex& b, const Vec& x) const { return jet(x, b.total()).derivative(b); }

  bool has_fourier_partner() const { return static_cast<bool>(partner_); }
  const TestFunction& fourier_partner() const {
    require(has_fourier_partner(), ErrorCode::InvalidParams, name_ + " has no closed-form Fourier partner");
    return *partner_;
  }
  TestFunction with_partner(const TestFunction& p) const {
    TestFunction r(*this);
    r.partner_ = std::make_shared<TestFunction>(p);
    return r;
  }

 private:
  int dim_;
  int max_order_;
  std::shared_ptr<const JetFn> fn_;
  std::string name_;
  std::shared_ptr<const TestFunction> partner_;
};

// ---------------------------------------------------------------------------
// Combinators

inline TestFunction scaled(const TestFunction& f, cplx s) {
  return TestFunction(f.dim(), f.max_order(), [f, s](const Vec& x, int o) { return f.jet(x, o) * s; },
                      "scaled(" + f.name() + ")");
}

inline TestFunction sum(const TestFunction& f, const TestFunction& g) {
  require(f.dim() == g.dim(), ErrorCode::DimensionMismatch, "sum of test functions of different dimension");
  return TestFunction(f.dim(), std::min(f.max_order(), g.max_order()),
                      [f, g](const Vec& x, int o) { return f.jet(x, o) + g.jet(x, o); },
                      f.name() + "+" + g.name());
}

inline TestFunction product(const TestFunction& f, const TestFunction& g) {
  require(f.dim() == g.dim(), ErrorCode::DimensionMismatch, "product of test functions of different dimension");
  return TestFunction(f.dim(), std::min(f.max_order(), g.max_order()),
                      [f, g](const Vec& x, int o) { return f.jet(x, o) * g.jet(x, o); },
                      f.name() + "*" + g.name());
}

/// x -> conj(f(-x)).
inline TestFunction conj_reflect(const TestFunction& f) {
  return TestFunction(
      f.dim(), f.max_order(),
      [f](const Vec& x, int o) {
        Jet j = f.jet(-x, o);
        for (std::size_t r = 0; r < j.size(); ++r)
          j.coeff(r) = std::conj(j.coeff(r)) * sign_pow(j.layout().index(r).total());
        return j;
      },
      "conj_reflect(" + f.name() + ")");
}

/// x -> f(x - c).
inline TestFunction translated(const TestFunction& f, const Vec& c) {
  return TestFunction(f.dim(), f.max_order(), [f, c](const Vec& x, int o) { return f.jet(x - c, o); },
                      f.name() + "(x-c)");
}

/// Jet at x of the polynomial sum_a p_a (x - x0)^a whose coefficients are
/// stored in `poly` (a jet layout used as a coefficient table).
inline Jet polynomial_jet(const Jet& poly, const Vec& offset, int order) {
  const int n = poly.dim();
  Jet out(n, order);
  const auto& lay = poly.layout();
  for (std::size_t r = 0; r < lay.size(); ++r) {
    const cplx qa = poly.coeff(r);
    if (qa == cplx{}) continue;
    const MultiIndex& a = lay.index(r);
    for (std::size_t s = 0; s < out.size(); ++s) {
      const MultiIndex& b = out.layout().index(s);
      if (!b.le(a)) continue;
      double w = binomial(a, b);
      for (int k = 0; k < n; ++k) w *= std::pow(offset[k], a[k] - b[k]);
      out.coeff(s) += qa * w;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian family

/// c * exp(j <a, x>) * exp(-pi |x - b|^2 / s^2).
struct GaussianParams {
  cplx amplitude = 1.0;
  Vec modulation;  // a
  Vec center;      // b
  double width = 1.0;  // s
};

namespace detail {

/// Taylor coefficients of exp(alpha (x-b)^2 + gamma x) at x, via
/// u^{(k+1)} = q' u^{(k)} + k q'' u^{(k-1)}.
inline Series gaussian_axis_series(double x, double b, double s, cplx gamma, int order) {
  const double alpha = -kPi / (s * s);
  const cplx q1 = 2.0 * alpha * (x - b) + gamma;
  const double q2 = 2.0 * alpha;
  std::vector<cplx> d(static_cast<std::size_t>(order) + 1);
  d[0] = std::exp(alpha * (x - b) * (x - b) + gamma * x);
  if (order >= 1) d[1] = q1 * d[0];
  for (int k = 1; k < order; ++k) d[k + 1] = q1 * d[k] + static_cast<double>(k) * q2 * d[k - 1];
  for (int k = 0; k <= order; ++k) d[k] /= factorial(k);
  return d;
}

inline TestFunction gaussian_no_partner(int dim, const GaussianParams& gp) {
  return TestFunction(
      dim, TestFunction::kLibraryMaxOrder,
      [gp, dim](const Vec& x, int order) {
        std::vector<Series> axes(dim);
        for (int k = 0; k < dim; ++k)
          axes[k] = gaussian_axis_series(x[k], gp.center[k], gp.width, kJ * gp.modulation[k], order);
        return Jet::separable(axes, order) * gp.amplitude;
      },
      "gaussian(s=" + std::to_string(gp.width) + ")");
}

}  // namespace detail

/// Parameters of F(g) for g = gaussian(params): again a Gaussian,
/// c s^n exp(j<b,a>) exp(j<-b, x>) exp(-pi |x - a|^2 s^2).
inline GaussianParams gaussian_fourier_params(const GaussianParams& gp) {
  const double n = static_cast<double>(gp.center.size());
  GaussianParams f;
  f.amplitude = gp.amplitude * std::pow(gp.width, n) * std::exp(kJ * gp.center.dot(gp.modulation));
  f.modulation = -gp.center;
  f.center = gp.modulation;
  f.width = 1.0 / gp.width;
  return f;
}

/// Gaussian test function carrying its closed-form Fourier partner.
inline TestFunction gaussian(int dim, GaussianParams gp) {
  if (gp.modulation.size() == 0) gp.modulation = Vec::Zero(dim);
  if (gp.center.size() == 0) gp.center = Vec::Zero(dim);
  require(gp.width > 0.0, ErrorCode::InvalidParams, "gaussian width must be positive");
  require(gp.center.size() == dim && gp.modulation.size() == dim, ErrorCode::DimensionMismatch,
          "gaussian parameters have wrong dimension");
  return detail::gaussian_no_partner(dim, gp).with_partner(detail::gaussian_no_partner(dim, gaussian_fourier_params(gp)));
}

/// exp(-pi |x|^2 / s^2).
inline TestFunction gaussian(int dim, double width = 1.0) {
  GaussianParams gp;
  gp.width = width;
  return gaussian(dim, gp);
}

/// prod_k sinc(pi c x_k)^p, sinc(y) = sin(y)/y.
inline TestFunction sinc_power(int dim, int power, double c = 1.0) {
  return TestFunction(
      dim, TestFunction::kLibraryMaxOrder,
      [dim, power, c](const Vec& x, int order) {
        std::vector<Series> axes(dim);
        for (int k = 0; k < dim; ++k) axes[k] = series_pow(sinc_series(x[k], c, order), power);
        return Jet::separable(axes, order);
      },
      "sinc^" + std::to_string(power));
}

// ---------------------------------------------------------------------------
// Coset-isolating functions

/// Window whose Fourier transform is concentrated in B(rho): a Gaussian with
/// exp(-pi |xi|^2 (rho/4)^2), i.e. Fourier width rho / 4.
inline TestFunction fourier_window(int dim, double rho) {
  require(rho > 0.0, ErrorCode::InvalidParams, "window radius must be positive");
  return gaussian(dim, 4.0 / rho);
}

inline constexpr int kPsiDerivativeBudget = 256;

/// Psi_k for the crystal  union_j (Gamma + eta_j)  with Gamma* generated by
/// the columns of `dual_gens`:
///
///   Psi_k(xi) = Q(xi - eta_k) psi(xi - eta_k)
///               prod_{j != k} prod_{i in I_j} sin^{m+1}(pi <h_i, xi - eta_j>)
///               prod_i sinc^{m+1}(2 pi <h_i, xi - eta_k>)
///
/// I_j holds the directions along which eta_k - eta_j is not a lattice
/// offset, so each sin-block vanishes to order m+1 on Gamma + eta_j but not at
/// eta_k. Q is the degree-m Taylor polynomial of the reciprocal of the rest
/// at eta_k, which makes Psi_k(eta_k) = 1 with vanishing derivatives of
/// orders 1..m. Multiplying by a polynomial does not enlarge the Fourier
/// support. If `moment` is given the result is further multiplied by
/// (-1)^{|i|} (xi - eta_k)^i / i!, which pairs with D^i delta_{eta_k} to 1.
inline TestFunction make_psi_k(const Mat& dual_gens, const std::vector<Vec>& shifts, int k, int m,
                               const TestFunction& window, std::optional<MultiIndex> moment = std::nullopt) {
  const int n = static_cast<int>(dual_gens.rows());
  const int K = static_cast<int>(shifts.size());
  require(dual_gens.cols() == n, ErrorCode::DimensionMismatch, "dual generators must be square");
  require(k >= 0 && k < K, ErrorCode::InvalidParams, "target index out of range");
  require(m >= 0, ErrorCode::InvalidParams, "order must be non-negative");
  require(m * n * K <= kPsiDerivativeBudget && m <= TestFunction::kLibraryMaxOrder, ErrorCode::OrderOverflow,
          "m * n * K exceeds the symbolic derivative budget");
  require(window.dim() == n, ErrorCode::DimensionMismatch, "window dimension differs");
  const Vec eta = shifts[k];

  struct SinBlock {
    Vec h;
    Vec c;
  };
  std::vector<SinBlock> sins;
  for (int j = 0; j < K; ++j) {
    if (j == k) continue;
    bool any = false;
    for (int i = 0; i < n; ++i) {
      const double u = dual_gens.col(i).dot(eta - shifts[j]);
      if (std::abs(u - std::round(u)) > 1e-9) {
        sins.push_back({dual_gens.col(i), shifts[j]});
        any = true;
      }
    }
    require(any, ErrorCode::InvalidParams, "shifts are not distinct modulo the lattice");
  }

  // Everything except Q.
  auto base = [=](const Vec& xi, int order) {
    Jet j = window.jet(xi - eta, order);
    for (const auto& s : sins)
      j = j * Jet::along(s.h, series_pow(sin_series(s.h.dot(xi - s.c), 1.0, order), m + 1));
    for (int i = 0; i < n; ++i) {
      const Vec h = dual_gens.col(i);
      j = j * Jet::along(h, series_pow(sinc_series(h.dot(xi - eta), 2.0, order), m + 1));
    }
    return j;
  };
  const Jet at_eta = base(eta, m);
  require(std::abs(at_eta.value()) > 1e-300, ErrorCode::IllConditioned, "Psi_k base vanishes at its target");
  const Jet q = at_eta.reciprocal();

  std::optional<Jet> mono;
  if (moment) {
    require(moment->dim() == n, ErrorCode::DimensionMismatch, "moment index dimension");
    Jet p(n, moment->total());
    p.coeff(static_cast<std::size_t>(p.layout().rank(*moment))) = sign_pow(moment->total()) / factorial(*moment);
    mono = p;
  }
  std::string name = "psi_" + std::to_string(k) + "(m=" + std::to_string(m) + ")";
  return TestFunction(
      n, TestFunction::kLibraryMaxOrder,
      [base, q, mono, eta](const Vec& xi, int order) {
        Jet j = base(xi, order) * polynomial_jet(q, xi - eta, order);
        if (mono) j = j * polynomial_jet(*mono, xi - eta, order);
        return j;
      },
      name);
}

}  // namespace combforge
