#pragma once

// Coset-isolating test functions on a dual crystal: their vanishing pattern,
// the support of their Fourier transforms, and coefficient extraction.

#include "combforge/comb.hpp"

namespace combforge {

struct GapProbe {
  Crystal sigma;       // crystal in dual space
  int k = 0;           // target coset
  int m = 0;           // vanishing order
  int l = 0;           // order of the distribution under test
  double rho = 0.0;    // Fourier radius of the window
  Mat dual_gens;       // h_i, generators of the dual of sigma's lattice (columns)
  TestFunction window;
  TestFunction psi;
  Region budget;       // (l+1) K G + B(rho), G = {|<g_i, x>| <= 1}
  bool budget_exceeded = false;  // rho too large for the budget slack
};

/// Probe for coset k of `sigma`; l defaults to m.
inline GapProbe make_gap_probe(const Crystal& sigma, int k, int m, double rho, std::optional<int> l = std::nullopt) {
  require(rho > 0.0, ErrorCode::InvalidParams, "rho must be positive");
  const int n = sigma.dim();
  const int ll = l.value_or(m);
  require(ll >= 0 && ll <= m, ErrorCode::InvalidParams, "distribution order must not exceed the vanishing order");
  const Mat forms = sigma.lattice().generators().transpose();
  const Mat h = dual(sigma.lattice()).generators();
  TestFunction w = fourier_window(n, rho);
  TestFunction psi = make_psi_k(h, sigma.shifts(), k, m, w);
  Region budget = Region::dual_cube(forms, static_cast<double>((ll + 1) * sigma.size()), rho);
  double unit_in = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) unit_in = std::min(unit_in, 1.0 / forms.row(i).norm());
  return GapProbe{sigma, k, m, ll, rho, h, w, psi, budget, rho > 0.5 * unit_in};
}

/// The probe's budget shrunk by `factor` (scale and margin).
inline Region scaled_budget(const GapProbe& p, double factor) {
  const auto& c = std::get<DualCube>(p.budget.kind());
  return Region::dual_cube(c.forms, c.scale * factor, c.margin * factor);
}

struct VanishingReport {
  std::size_t points_checked = 0;
  double max_off_target = 0.0;       // max |D^j Psi(sigma)|, sigma != eta_k, |j| <= m
  bool off_target_exact = true;      // every such derivative is exactly 0.0
  cplx target_value;
  double max_target_derivative = 0.0;  // orders 1..m at eta_k
  std::vector<Vec> failures;
  bool pass = true;
};

inline VanishingReport verify_vanishing(const GapProbe& p, const Region& test_window) {
  VanishingReport r;
  const Vec eta = p.sigma.shifts()[static_cast<std::size_t>(p.k)];
  const auto pts = crystal_points(p.sigma, test_window);
  r.points_checked = pts.size();
  bool target_seen = false;
  for (const Vec& s : pts) {
    const Jet j = p.psi.jet(s, p.m);
    if ((s - eta).norm() <= 1e-12 * std::max(1.0, eta.norm())) {
      target_seen = true;
      r.target_value = j.value();
      for (std::size_t i = 1; i < j.size(); ++i)
        r.max_target_derivative = std::max(r.max_target_derivative, std::abs(j.coeff(i)) * factorial(j.layout().index(i)));
      if (std::abs(r.target_value - 1.0) > 1e-12 || r.max_target_derivative > 1e-9) r.failures.push_back(s);
      continue;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const cplx d = j.coeff(i) * factorial(j.layout().index(i));
      if (d != cplx{}) r.off_target_exact = false;
      worst = std::max(worst, std::abs(d));
    }
    r.max_off_target = std::max(r.max_off_target, worst);
    if (worst >= 1e-9) r.failures.push_back(s);
  }
  if (!target_seen) {
    r.target_value = p.psi.value(eta);
    if (std::abs(r.target_value - 1.0) > 1e-12) r.failures.push_back(eta);
  }
  r.pass = r.failures.empty();
  return r;
}

struct SupportReport {
  double outside_energy_fraction = 0.0;
  double grid_energy_fraction = 0.0;  // energy captured by the x grid; 1 up to quadrature error
  double quadrature_error = 0.0;      // |1 - grid_energy_fraction|
  double total_energy = 0.0;          // int |Psi|^2 (Parseval)
  std::size_t xi_samples = 0;
  std::size_t x_samples = 0;
  bool budget_exceeded = false;
  bool pass = false;
};

namespace detail {

// One axis of a separable transform: data has shape (outer, m, inner) and is
// replaced by shape (outer, table.cols(), inner), summing table(a, b) data(., a, .).
inline std::vector<cplx> transform_axis(const std::vector<cplx>& data, std::size_t outer, std::size_t m,
                                        std::size_t inner, const CMat& table) {
  const std::size_t xs = static_cast<std::size_t>(table.cols());
  std::vector<cplx> out(outer * xs * inner, cplx{});
  parallel_for(outer, [&](std::size_t o) {
    for (std::size_t a = 0; a < m; ++a) {
      const cplx* src = &data[(o * m + a) * inner];
      for (std::size_t b = 0; b < xs; ++b) {
        const cplx w = table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        cplx* dst = &out[(o * xs + b) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
      }
    }
  });
  return out;
}

}  // namespace detail

/// Energy of F(Psi_k) outside the budget, from a trapezoid xi grid over
/// eta_k +- 6 window widths and a user x grid [-extent, extent]^n. The total
/// energy comes from Parseval on the xi side.
inline SupportReport verify_support(const GapProbe& p, double grid_extent, double grid_step,
                                    std::optional<Region> budget = std::nullopt) {
  require(grid_step > 0.0 && grid_extent > 0.0, ErrorCode::InvalidParams, "grid extent and step must be positive");
  require(grid_step < p.rho / 4.0, ErrorCode::GridTooCoarse, "grid step must be below rho / 4");
  const Region& region = budget ? *budget : p.budget;
  const int n = p.sigma.dim();
  const Vec eta = p.sigma.shifts()[static_cast<std::size_t>(p.k)];
  const double s = 4.0 / p.rho;

  auto [blo, bhi] = p.budget.bounds();
  const double reach = std::max({grid_extent, blo.cwiseAbs().maxCoeff(), bhi.cwiseAbs().maxCoeff()});
  const double half = 6.0 * s;
  const double dxi = 1.0 / (2.5 * reach);
  const long nxi = static_cast<long>(std::ceil(half / dxi));
  const std::size_t m = static_cast<std::size_t>(2 * nxi + 1);
  const long nx = static_cast<long>(std::floor(grid_extent / grid_step));
  const std::size_t xs = static_cast<std::size_t>(2 * nx + 1);

  std::vector<CMat> tables(n);
  std::vector<std::vector<double>> xi_axis(n), x_axis(n);
  for (int d = 0; d < n; ++d) {
    for (long a = -nxi; a <= nxi; ++a) xi_axis[d].push_back(eta[d] + static_cast<double>(a) * dxi);
    for (long b = -nx; b <= nx; ++b) x_axis[d].push_back(static_cast<double>(b) * grid_step);
    tables[d].resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(xs));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < xs; ++b) {
        const double ph = xi_axis[d][a] * x_axis[d][b];
        tables[d](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            std::exp(-kJ * (ph - std::round(ph))) * dxi;
      }
  }

  std::size_t total = 1;
  for (int d = 0; d < n; ++d) total *= m;
  std::vector<cplx> data(total);
  parallel_for(total, [&](std::size_t flat) {
    Vec xi(n);
    std::size_t rest = flat;
    for (int d = n - 1; d >= 0; --d) {
      xi[d] = xi_axis[d][rest % m];
      rest /= m;
    }
    data[flat] = p.psi.value(xi);
  });
  double e_xi = 0.0;
  for (const cplx& v : data) e_xi += std::norm(v);
  e_xi *= std::pow(dxi, n);

  std::size_t outer = 1, inner = total / m;
  for (int d = 0; d < n; ++d) {
    data = detail::transform_axis(data, outer, m, inner, tables[d]);
    outer *= xs;
    inner /= m;
  }

  double inside = 0.0, outside = 0.0;
  const double cell = std::pow(grid_step, n);
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    Vec x(n);
    std::size_t rest = flat;
    for (int d = n - 1; d >= 0; --d) {
      x[d] = x_axis[d][rest % xs];
      rest /= xs;
    }
    const double e = std::norm(data[flat]) * cell;
    (region.contains(x) ? inside : outside) += e;
  }

  SupportReport r;
  r.total_energy = e_xi;
  r.xi_samples = total;
  r.x_samples = data.size();
  r.outside_energy_fraction = outside / e_xi;
  r.grid_energy_fraction = (inside + outside) / e_xi;
  r.quadrature_error = std::abs(1.0 - r.grid_energy_fraction);
  r.budget_exceeded = p.budget_exceeded;
  r.pass = !r.budget_exceeded && r.outside_energy_fraction < 1e-6 + r.quadrature_error;
  return r;
}

/// Pairs T_hat with Psi_k, or with the moment variant
/// Psi_k (-1)^{|i|} (xi - eta_k)^i / i! when `moment` is given. For T_hat
/// supported on the crystal with order <= m this returns the coefficient of
/// D^i delta_{eta_k} (i = 0 by default) and nothing else.
inline cplx extract_coefficient(const WeightedComb& t_hat, const GapProbe& p,
                                std::optional<MultiIndex> moment = std::nullopt) {
  require(t_hat.dim() == p.sigma.dim(), ErrorCode::DimensionMismatch, "comb dimension differs from probe");
  require(t_hat.order() <= p.m, ErrorCode::OrderTooLow, "comb order exceeds the probe's vanishing order");
  const double tol = 1e-9 * std::max(1.0, p.sigma.lattice().covering_radius());
  for (const auto& e : t_hat.entries())
    require(p.sigma.coset_of(e.point, tol) >= 0, ErrorCode::SupportMismatch, "comb point lies off the crystal");
  if (!moment || moment->is_zero()) return evaluate(t_hat, p.psi);
  require(moment->total() <= p.m, ErrorCode::OrderTooLow, "moment order exceeds the probe's vanishing order");
  const TestFunction psi = make_psi_k(p.dual_gens, p.sigma.shifts(), p.k, p.m, p.window, moment);
  return evaluate(t_hat, psi);
}

}  // namespace combforge
