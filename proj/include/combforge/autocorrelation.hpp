#pragma once

// Regularized autocorrelation A_phi = (phi t) * t^*, its diffraction, and
// finite-window Fourier amplitudes.

#include <random>

#include "combforge/comb.hpp"
#include "combforge/pointset.hpp"

namespace combforge {

struct AutocorrComb {
  WeightedComb base;         // supported in the windowed difference set
  std::string regularizer_id;
  double diff_radius = 0.0;
};

/// Coefficients of phi t * t^* restricted to |r| <= diff_radius.
///
/// With t = sum_p sum_i t_{p,i} D^i delta_p the pairing expands to
///   a_{p-q, i-c+k} += t_{p,i} conj(t_{q,k}) (-1)^{|i|+|i-c+k|} C(i,c) D^c phi(p),
/// so for order 0, a_r = sum_q phi(q+r) w_{q+r} conj(w_q). Points p where
/// phi and its derivatives are negligible (below 1e-17 of the largest) are
/// skipped.
inline AutocorrComb autocorr(const WeightedComb& t, const TestFunction& phi, double diff_radius,
                             std::size_t cap = kDefaultPointCap) {
  require(diff_radius > 0.0, ErrorCode::InvalidParams, "diff_radius must be positive");
  require(phi.dim() == t.dim(), ErrorCode::DimensionMismatch, "regularizer dimension differs from comb");
  const int m = t.order();
  require(phi.max_order() >= 2 * m, ErrorCode::OrderTooLow, "regularizer cannot be differentiated often enough");
  const int n = t.dim();
  const auto& es = t.entries();

  std::vector<Jet> jets(es.size(), Jet(n, m));
  std::vector<double> size(es.size(), 0.0);
  parallel_for(es.size(), [&](std::size_t k) {
    jets[k] = phi.jet(es[k].point, m);
    for (std::size_t r = 0; r < jets[k].size(); ++r) size[k] = std::max(size[k], std::abs(jets[k].coeff(r)));
  });
  const double biggest = es.empty() ? 0.0 : *std::max_element(size.begin(), size.end());

  double extent = diff_radius;
  for (const auto& e : es) extent = std::max(extent, e.point.norm());
  const double tol = 1e-9 * std::max(1.0, extent);

  SpatialIndex near(n, diff_radius);
  for (std::size_t k = 0; k < es.size(); ++k) near.insert(es[k].point, k);

  std::vector<CombEntry> out;
  if (m == 0) {
    // Scalar fast path.
    const MultiIndex zero(n);
    VectorBins<cplx> bins(n, tol);
    for (std::size_t ip = 0; ip < es.size(); ++ip) {
      if (size[ip] <= 1e-17 * biggest) continue;
      const Vec& p = es[ip].point;
      const cplx left = es[ip].op.coeff(zero) * jets[ip].value();
      near.for_neighbors(p, [&](const Vec& q, std::size_t iq) {
        const Vec r = p - q;
        if (r.norm() > diff_radius) return;
        bins.at(r) += left * std::conj(es[iq].op.coeff(zero));
        require(bins.size() <= cap, ErrorCode::OutputCap, "autocorrelation exceeds the output cap");
      });
    }
    out.reserve(bins.size());
    for (auto& [r, c] : bins.entries())
      if (c != cplx{}) out.push_back({r, DiffOperator::scalar(n, c)});
  } else {
    VectorBins<std::map<MultiIndex, cplx>> bins(n, tol);
    for (std::size_t ip = 0; ip < es.size(); ++ip) {
      if (size[ip] <= 1e-17 * biggest) continue;
      const Vec& p = es[ip].point;
      // p-side expanded once: e = i - c  ->  sum t_{p,i} (-1)^{|i|} C(i,c) D^c phi(p)
      std::map<MultiIndex, cplx> left;
      for (const auto& [i, tpi] : es[ip].op.terms())
        for (const MultiIndex& c : sub_indices(i))
          left[i - c] += tpi * sign_pow(i.total()) * binomial(i, c) * jets[ip].derivative(c);
      near.for_neighbors(p, [&](const Vec& q, std::size_t iq) {
        const Vec r = p - q;
        if (r.norm() > diff_radius) return;
        auto& slot = bins.at(r);
        for (const auto& [e, l] : left)
          for (const auto& [k, tqk] : es[iq].op.terms()) {
            const MultiIndex beta = e + k;
            slot[beta] += l * std::conj(tqk) * sign_pow(beta.total());
          }
        require(bins.size() <= cap, ErrorCode::OutputCap, "autocorrelation exceeds the output cap");
      });
    }
    out.reserve(bins.size());
    for (auto& [r, coeffs] : bins.entries()) {
      DiffOperator op;
      for (const auto& [beta, c] : coeffs) op.add(beta, c);
      if (!op.empty()) out.push_back({r, std::move(op)});
    }
  }
  std::sort(out.begin(), out.end(), [](const CombEntry& a, const CombEntry& b) { return lex_less(a.point, b.point); });
  require(!out.empty(), ErrorCode::InvalidParams, "regularizer vanishes on the whole support");
  AutocorrComb a{make_comb(std::move(out), Region::ball(n, diff_radius)), phi.name(), diff_radius};
  return a;
}

struct WindowedAmplitude {
  cplx amplitude;
  bool truncated = false;  // higher-order terms were present and ignored
};

/// (1 / |window|) sum_p w_p exp(-j <sigma, p>) over the order-0 part.
inline WindowedAmplitude windowed_amplitude(const WeightedComb& t, const Vec& sigma) {
  require(sigma.size() == t.dim(), ErrorCode::DimensionMismatch, "sigma dimension differs from comb");
  const int n = t.dim();
  const MultiIndex zero(n);
  std::vector<cplx> parts(t.size());
  bool truncated = false;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto& e = t.entries()[k];
    parts[k] = e.op.coeff(zero) * phase_factor(sigma, e.point);
    if (e.op.order() > 0) truncated = true;
  }
  return {tree_sum(parts) / t.window().volume(), truncated};
}

/// Evaluated spectrum. For kind == Amplitude the values are windowed
/// amplitudes and intensity = |value|^2; for kind == Diffraction the values
/// are F(A_phi)(sigma) and intensity is their real part.
struct SpectrumSamples {
  enum class Kind { Amplitude, Diffraction };
  Kind kind = Kind::Amplitude;
  std::vector<Vec> sigma;
  std::vector<cplx> values;
  std::vector<double> intensity;
  double window_size = 0.0;
  double min_real = std::numeric_limits<double>::infinity();
  double max_abs_imag = 0.0;
};

namespace detail {
inline void finish_spectrum(SpectrumSamples& s) {
  s.intensity.resize(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const cplx v = s.values[i];
    s.intensity[i] = s.kind == SpectrumSamples::Kind::Amplitude ? std::norm(v) : v.real();
    s.min_real = std::min(s.min_real, v.real());
    s.max_abs_imag = std::max(s.max_abs_imag, std::abs(v.imag()));
  }
}
}  // namespace detail

inline SpectrumSamples amplitude_spectrum(const WeightedComb& t, const std::vector<Vec>& sigmas) {
  SpectrumSamples s;
  s.kind = SpectrumSamples::Kind::Amplitude;
  s.sigma = sigmas;
  s.values.resize(sigmas.size());
  s.window_size = t.window().volume();
  parallel_for(sigmas.size(), [&](std::size_t i) { s.values[i] = windowed_amplitude(t, sigmas[i]).amplitude; });
  detail::finish_spectrum(s);
  return s;
}

/// sum_r a_r(D) delta_r transformed at sigma: sum_{r,beta} a_{r,beta} (j sigma)^beta exp(-j<sigma,r>).
inline SpectrumSamples diffraction_of_autocorr(const AutocorrComb& a, const std::vector<Vec>& sigmas) {
  SpectrumSamples s;
  s.kind = SpectrumSamples::Kind::Diffraction;
  s.sigma = sigmas;
  s.values.resize(sigmas.size());
  s.window_size = a.base.window().volume();
  const auto& es = a.base.entries();
  parallel_for(sigmas.size(), [&](std::size_t i) {
    const Vec& sg = sigmas[i];
    std::vector<cplx> parts(es.size());
    for (std::size_t k = 0; k < es.size(); ++k) {
      cplx v{};
      for (const auto& [beta, c] : es[k].op.terms()) {
        cplx w = c;
        for (int d = 0; d < beta.dim(); ++d) w *= std::pow(kJ * sg[d], beta[d]);
        v += w;
      }
      parts[k] = v * phase_factor(sg, es[k].point);
    }
    s.values[i] = tree_sum(parts);
  });
  detail::finish_spectrum(s);
  return s;
}

/// r in the windowed difference set of `points`: some q with q + r also a point.
inline bool in_difference_set(const SpatialIndex& index, const std::vector<Vec>& points, const Vec& r, double tol) {
  if (r.norm() <= tol) return true;
  for (const Vec& q : points)
    if (index.find_within(q + r, tol)) return true;
  return false;
}

struct LambdaChoice {
  Vec lambda;
  double min_abs = 0.0;                // min over sigma of |sum_k lambda^k t_{sigma k}|
  std::vector<double> weights;         // |sum_k lambda^k t_{sigma k}|^2 per sigma
};

inline cplx lambda_sum(const DiffOperator& family, const Vec& lambda) {
  cplx s{};
  for (const auto& [k, c] : family.terms()) s += c * monomial(lambda, k);
  return s;
}

/// Random search over lambda in [-1,1]^n maximizing min_sigma |sum_k lambda^k t_{sigma k}|.
inline LambdaChoice select_lambda(const std::vector<DiffOperator>& families, int dim, int trials = 64,
                                  std::uint64_t seed = 42) {
  require(trials > 0, ErrorCode::InvalidParams, "trials must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LambdaChoice best;
  best.min_abs = -1.0;
  for (int trial = 0; trial < trials; ++trial) {
    Vec l(dim);
    for (int d = 0; d < dim; ++d) l[d] = u(rng);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& f : families) worst = std::min(worst, std::abs(lambda_sum(f, l)));
    if (worst > best.min_abs) {
      best.lambda = l;
      best.min_abs = worst;
    }
  }
  require(best.min_abs >= 1e-12, ErrorCode::AllCandidatesDegenerate, "every lambda candidate hit a zero set");
  for (const auto& f : families) best.weights.push_back(std::norm(lambda_sum(f, best.lambda)));
  return best;
}

}  // namespace combforge
