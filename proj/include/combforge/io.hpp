#pragma once

// JSON and CSV codecs. Output is deterministic: object keys sorted, doubles
// printed with 17 significant digits, non-finite values as the strings
// "inf", "-inf" and "nan".

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "autocorrelation.hpp"
#include "detect.hpp"
#include "gap.hpp"
#include "poisson.hpp"

namespace combforge {

using json = nlohmann::json;

namespace detail {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_json(const json& j, std::string& out, int level) {
  const std::string pad(static_cast<std::size_t>(2 * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * level), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        write_json(it.value(), out, level + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Flat numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        write_json(e, out, level + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string dump(const json& j) {
  std::string out;
  detail::write_json(j, out, 0);
  out += "\n";
  return out;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

// ---------------------------------------------------------------------------
// scalars and vectors

inline json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double get_num(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::ParseError, std::string("expected a number for ") + what);
}

inline const json& field(const json& j, const char* key) {
  require(j.is_object() && j.contains(key), ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

inline Vec vec_from_json(const json& j, const char* what = "vector") {
  require(j.is_array(), ErrorCode::ParseError, std::string(what) + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = get_num(j[i], what);
  return v;
}

inline json to_json(const MultiIndex& m) { return m.entries; }

inline MultiIndex multi_index_from_json(const json& j) {
  require(j.is_array(), ErrorCode::ParseError, "multi-index must be an array");
  MultiIndex m(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number_integer() && j[i].get<int>() >= 0, ErrorCode::ParseError,
            "multi-index entries must be non-negative integers");
    m.entries[i] = j[i].get<int>();
  }
  return m;
}

inline json cplx_json(cplx c) { return {{"re", num(c.real())}, {"im", num(c.imag())}}; }

inline cplx cplx_from_json(const json& j) { return {get_num(field(j, "re"), "re"), get_num(field(j, "im"), "im")}; }

/// Row-major flattening.
inline json mat_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(num(m(r, c)));
  return a;
}

inline Mat mat_from_json(const json& j, int dim, const char* what) {
  require(j.is_array() && j.size() == static_cast<std::size_t>(dim * dim), ErrorCode::ParseError,
          std::string(what) + " must be a row-major array of dim*dim numbers");
  Mat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = get_num(j[static_cast<std::size_t>(r * dim + c)], what);
  return m;
}

// ---------------------------------------------------------------------------
// regions

inline json to_json(const Region& r) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Ball>) return {{"type", "ball"}, {"center", to_json(k.center)}, {"radius", num(k.radius)}};
        else if constexpr (std::is_same_v<T, Box>) return {{"type", "box"}, {"lo", to_json(k.lo)}, {"hi", to_json(k.hi)}};
        else
          return {{"type", "dual_cube"},
                  {"dim", k.forms.cols()},
                  {"forms", mat_json(k.forms)},
                  {"scale", num(k.scale)},
                  {"margin", num(k.margin)}};
      },
      r.kind());
}

inline Region region_from_json(const json& j) {
  const auto type = field(j, "type").get<std::string>();
  if (type == "ball") return Region::ball(vec_from_json(field(j, "center")), get_num(field(j, "radius"), "radius"));
  if (type == "box") return Region::box(vec_from_json(field(j, "lo")), vec_from_json(field(j, "hi")));
  if (type == "dual_cube") {
    const int n = field(j, "dim").get<int>();
    return Region::dual_cube(mat_from_json(field(j, "forms"), n, "forms"), get_num(field(j, "scale"), "scale"),
                             get_num(field(j, "margin"), "margin"));
  }
  throw Error(ErrorCode::ParseError, "unknown region type '" + type + "'");
}

inline void check_schema(const json& j, const char* schema) {
  require(j.is_object() && j.contains("schema") && j.at("schema") == schema, ErrorCode::ParseError,
          std::string("expected schema '") + schema + "'");
}

// ---------------------------------------------------------------------------
// lattices and crystals, schema "v1"

inline json to_json(const LatticeBasis& l) {
  return {{"schema", "v1"}, {"dim", l.dim()}, {"generators", mat_json(l.generators())}};
}

inline LatticeBasis lattice_from_json(const json& j) {
  check_schema(j, "v1");
  const int n = field(j, "dim").get<int>();
  require(n >= 1, ErrorCode::ParseError, "dim must be positive");
  return make_lattice(mat_from_json(field(j, "generators"), n, "generators"));
}

inline json to_json(const Crystal& c) {
  json shifts = json::array();
  for (const Vec& q : c.shifts()) shifts.push_back(to_json(q));
  return {{"schema", "v1"}, {"lattice", to_json(c.lattice())}, {"shifts", shifts}};
}

inline Crystal crystal_from_json(const json& j) {
  check_schema(j, "v1");
  const auto l = lattice_from_json(field(j, "lattice"));
  std::vector<Vec> shifts;
  for (const auto& q : field(j, "shifts")) shifts.push_back(vec_from_json(q, "shift"));
  return make_crystal(l, shifts);
}

// ---------------------------------------------------------------------------
// point sets: JSON {dim, points, window} and CSV

inline json to_json(const PointSet& s) {
  json pts = json::array();
  for (const Vec& p : s.points()) pts.push_back(to_json(p));
  return {{"schema", "points-v1"}, {"dim", s.dim()}, {"points", pts}, {"window", to_json(s.window())}};
}

inline PointSet point_set_from_json(const json& j) {
  const int n = field(j, "dim").get<int>();
  std::vector<Vec> pts;
  for (const auto& p : field(j, "points")) {
    pts.push_back(vec_from_json(p, "point"));
    require(pts.back().size() == n, ErrorCode::ParseError, "point dimension differs from dim");
  }
  if (j.contains("window")) return make_point_set(std::move(pts), region_from_json(j.at("window")));
  return make_point_set(std::move(pts));
}

/// One point per row, comma or whitespace separated; an optional header row;
/// blank lines and lines starting with '#' are skipped. Errors name the line.
inline std::vector<Vec> parse_points_csv(std::istream& in) {
  std::vector<Vec> pts;
  std::string line;
  int lineno = 0;
  Eigen::Index dim = -1;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> vals;
    std::string tok;
    std::string norm = line;
    std::replace(norm.begin(), norm.end(), ',', ' ');
    std::istringstream ss(norm);
    bool numeric = true;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        numeric = false;
        break;
      }
      vals.push_back(v);
    }
    if (!numeric) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": non-numeric field '" + tok + "'");
    }
    header_allowed = false;
    require(!vals.empty(), ErrorCode::ParseError, "line " + std::to_string(lineno) + ": empty row");
    if (dim < 0) dim = static_cast<Eigen::Index>(vals.size());
    require(static_cast<Eigen::Index>(vals.size()) == dim, ErrorCode::ParseError,
            "line " + std::to_string(lineno) + ": expected " + std::to_string(dim) + " columns, found " +
                std::to_string(vals.size()));
    pts.push_back(make_vec(vals));
  }
  require(!pts.empty(), ErrorCode::ParseError, "no points in input");
  return pts;
}

inline std::string points_csv(const std::vector<Vec>& pts) {
  std::string out;
  for (const Vec& p : pts) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (i) out += ",";
      out += detail::format_double(p[i]);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// weighted combs, schema "comb-v1"

inline json to_json(const WeightedComb& t) {
  json entries = json::array();
  for (const auto& e : t.entries()) {
    json ops = json::array();
    for (const auto& [idx, c] : e.op.terms()) {
      json o = cplx_json(c);
      o["idx"] = to_json(idx);
      ops.push_back(o);
    }
    entries.push_back({{"point", to_json(e.point)}, {"ops", ops}});
  }
  return {{"schema", "comb-v1"}, {"dim", t.dim()}, {"window", to_json(t.window())}, {"entries", entries}};
}

inline WeightedComb comb_from_json(const json& j) {
  check_schema(j, "comb-v1");
  const int n = field(j, "dim").get<int>();
  std::vector<CombEntry> es;
  for (const auto& e : field(j, "entries")) {
    CombEntry ce{vec_from_json(field(e, "point"), "point"), {}};
    require(ce.point.size() == n, ErrorCode::ParseError, "point dimension differs from dim");
    for (const auto& o : field(e, "ops")) {
      const MultiIndex idx = multi_index_from_json(field(o, "idx"));
      require(idx.dim() == n, ErrorCode::ParseError, "multi-index dimension differs from dim");
      ce.op.add(idx, cplx_from_json(o));
    }
    es.push_back(std::move(ce));
  }
  return make_comb(std::move(es), region_from_json(field(j, "window")));
}

// ---------------------------------------------------------------------------
// Poisson combs, schema "pcomb-v1"

/// One entry per graded coefficient: re + i im times (2 pi)^tau_grade.
inline json to_json(const PoissonComb& pc) {
  json terms = json::array();
  for (const auto& t : pc.terms()) {
    json op = json::array();
    for (const auto& [k, c] : t.op.graded_terms()) {
      json o = cplx_json(c);
      o["a"] = to_json(k.a);
      o["b"] = to_json(k.b);
      o["tau_grade"] = k.grade;
      op.push_back(o);
    }
    terms.push_back({{"eta", to_json(t.phase)}, {"q", to_json(t.shift)}, {"op", op}});
  }
  return {{"schema", "pcomb-v1"}, {"lattice", to_json(pc.lattice())}, {"terms", terms}};
}

inline PoissonComb poisson_comb_from_json(const json& j) {
  check_schema(j, "pcomb-v1");
  const auto l = lattice_from_json(field(j, "lattice"));
  const int n = l.dim();
  std::vector<PoissonTerm> terms;
  for (const auto& t : field(j, "terms")) {
    PoissonTerm pt{vec_from_json(field(t, "eta"), "eta"), vec_from_json(field(t, "q"), "q"), PolyDiffOperator(n)};
    require(pt.phase.size() == n && pt.shift.size() == n, ErrorCode::ParseError, "term dimension differs from lattice");
    for (const auto& o : field(t, "op")) {
      const MultiIndex a = multi_index_from_json(field(o, "a"));
      const MultiIndex b = multi_index_from_json(field(o, "b"));
      require(a.dim() == n && b.dim() == n, ErrorCode::ParseError, "multi-index dimension differs from lattice");
      const int grade = o.contains("tau_grade") ? o.at("tau_grade").get<int>() : 0;
      pt.op.add(a, b, cplx_from_json(o), grade);
    }
    terms.push_back(std::move(pt));
  }
  return make_poisson_comb(l, std::move(terms));
}

// ---------------------------------------------------------------------------
// spectra

inline const char* to_string(SpectrumSamples::Kind k) {
  return k == SpectrumSamples::Kind::Amplitude ? "amplitude" : "diffraction";
}

inline json to_json(const SpectrumSamples& s) {
  json samples = json::array();
  for (std::size_t i = 0; i < s.sigma.size(); ++i) {
    json e = cplx_json(s.values[i]);
    e["sigma"] = to_json(s.sigma[i]);
    e["intensity"] = num(s.intensity[i]);
    samples.push_back(e);
  }
  return {{"schema", "spectrum-v1"},       {"kind", to_string(s.kind)},
          {"window_size", num(s.window_size)}, {"min_real", num(s.min_real)},
          {"max_abs_imag", num(s.max_abs_imag)}, {"samples", samples}};
}

inline SpectrumSamples spectrum_from_json(const json& j) {
  check_schema(j, "spectrum-v1");
  SpectrumSamples s;
  s.kind = field(j, "kind") == "amplitude" ? SpectrumSamples::Kind::Amplitude : SpectrumSamples::Kind::Diffraction;
  s.window_size = get_num(field(j, "window_size"), "window_size");
  s.min_real = get_num(field(j, "min_real"), "min_real");
  s.max_abs_imag = get_num(field(j, "max_abs_imag"), "max_abs_imag");
  for (const auto& e : field(j, "samples")) {
    s.sigma.push_back(vec_from_json(field(e, "sigma"), "sigma"));
    s.values.push_back(cplx_from_json(e));
    s.intensity.push_back(get_num(field(e, "intensity"), "intensity"));
  }
  return s;
}

inline std::string spectrum_csv(const SpectrumSamples& s) {
  std::string out;
  const Eigen::Index n = s.sigma.empty() ? 0 : s.sigma.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out += "sigma_" + std::to_string(i + 1) + ",";
  out += "re,im,intensity\n";
  for (std::size_t k = 0; k < s.sigma.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) out += detail::format_double(s.sigma[k][i]) + ",";
    out += detail::format_double(s.values[k].real()) + "," + detail::format_double(s.values[k].imag()) + "," +
           detail::format_double(s.intensity[k]) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// reports

inline json to_json(const UDReport& r) {
  json j{{"schema", "ud-v1"}, {"min_distance", num(r.min_distance)}, {"is_ud", r.is_ud}};
  if (r.witness) j["witness"] = {to_json(r.witness->first), to_json(r.witness->second)};
  return j;
}

inline json to_json(const HypothesisReport& r) {
  return {{"schema", "hypothesis-v1"}, {"lambda_ud", r.lambda_ud},       {"diff_ud", r.diff_ud},
          {"d_lambda", num(r.d_lambda)}, {"d_diff", num(r.d_diff)},       {"ud_threshold", num(r.ud_threshold)},
          {"diff_radius", num(r.diff_radius)}, {"diff_size", r.diff_size}, {"windowed", r.windowed}};
}

inline json to_json(const TemperednessReport& r) {
  return {{"schema", "tempered-v1"},
          {"bounded", r.bounded},
          {"partial_sum", num(r.partial_sum)},
          {"fitted_exponent", num(r.fitted_exponent)},
          {"exponent_stderr", num(r.exponent_stderr)},
          {"shells_used", r.shells_used},
          {"windowed", r.windowed}};
}

inline json to_json(const TransformReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"test_function", c.test_function},
                      {"transformed_side", cplx_json(c.transformed_side)},
                      {"direct_side", cplx_json(c.direct_side)},
                      {"abs_deviation", num(c.abs_deviation)},
                      {"rel_deviation", num(c.rel_deviation)}});
  return {{"schema", "transform-report-v1"}, {"checks", checks},          {"trunc_radius", num(r.trunc_radius)},
          {"tol", num(r.tol)},               {"pass", r.pass},            {"max_rel_deviation", num(r.max_rel_deviation)}};
}

inline json to_json(const DetectionReport& r) {
  json j{{"schema", "detection-v1"},
         {"verdict", to_string(r.verdict)},
         {"coverage_residual", num(r.coverage_residual)},
         {"period_candidates_tested", r.period_candidates_tested},
         {"periods_accepted", r.periods_accepted},
         {"period_rank", r.period_rank},
         {"note", r.note}};
  j["crystal"] = r.crystal ? to_json(*r.crystal) : json(nullptr);
  return j;
}

inline json to_json(const ExpPolyFit& f) {
  json terms = json::array();
  for (const auto& t : f.terms) {
    json poly = json::array();
    for (const auto& [a, c] : t.poly) {
      json o = cplx_json(c);
      o["a"] = to_json(a);
      poly.push_back(o);
    }
    terms.push_back({{"eta", to_json(t.phase)}, {"q", to_json(t.shift)}, {"poly", poly}});
  }
  return {{"schema", "fit-v1"},
          {"terms", terms},
          {"residual", num(f.residual)},
          {"roots_on_circle", f.roots_on_circle},
          {"max_modulus_deviation", num(f.max_modulus_deviation)},
          {"order_used", f.order_used}};
}

inline json to_json(const VanishingReport& r) {
  json fails = json::array();
  for (const Vec& v : r.failures) fails.push_back(to_json(v));
  return {{"schema", "vanishing-v1"},
          {"points_checked", r.points_checked},
          {"max_off_target", num(r.max_off_target)},
          {"off_target_exact", r.off_target_exact},
          {"target_value", cplx_json(r.target_value)},
          {"max_target_derivative", num(r.max_target_derivative)},
          {"failures", fails},
          {"pass", r.pass}};
}

inline json to_json(const SupportReport& r) {
  return {{"schema", "support-v1"},
          {"outside_energy_fraction", num(r.outside_energy_fraction)},
          {"grid_energy_fraction", num(r.grid_energy_fraction)},
          {"quadrature_error", num(r.quadrature_error)},
          {"total_energy", num(r.total_energy)},
          {"xi_samples", r.xi_samples},
          {"x_samples", r.x_samples},
          {"budget_exceeded", r.budget_exceeded},
          {"pass", r.pass}};
}

// ---------------------------------------------------------------------------
// command-line specs

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

inline double to_double(const std::string& s, const std::string& ctx) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), ErrorCode::ParseError, "bad number '" + s + "' in " + ctx);
  return v;
}

}  // namespace detail

/// "x0:x1:step[,y0:y1:step,...]" -> Cartesian grid, endpoints inclusive,
/// first axis slowest.
inline std::vector<Vec> parse_grid(const std::string& spec, std::size_t cap = 10'000'000) {
  const auto axes = detail::split(spec, ',');
  require(!axes.empty(), ErrorCode::ParseError, "empty grid spec");
  std::vector<std::vector<double>> ticks;
  std::size_t total = 1;
  for (const auto& a : axes) {
    const auto p = detail::split(a, ':');
    require(p.size() == 3, ErrorCode::ParseError, "grid axis '" + a + "' must be x0:x1:step");
    const double x0 = detail::to_double(p[0], "grid"), x1 = detail::to_double(p[1], "grid"),
                 st = detail::to_double(p[2], "grid");
    require(st > 0.0 && x1 >= x0, ErrorCode::ParseError, "grid axis '" + a + "' needs x1 >= x0 and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((x1 - x0) / st + 1e-9)) + 1;
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = x0 + static_cast<double>(i) * st;
    total *= count;
    require(total <= cap, ErrorCode::OutputCap, "grid has too many samples");
    ticks.push_back(std::move(t));
  }
  const std::size_t n = ticks.size();
  std::vector<Vec> out;
  out.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Vec v(static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) v[static_cast<Eigen::Index>(d)] = ticks[d][idx[d]];
    out.push_back(v);
    for (std::size_t d = n; d-- > 0;) {
      if (++idx[d] < ticks[d].size()) break;
      idx[d] = 0;
    }
  }
  return out;
}

/// "lo:hi[,lo:hi,...]" for a box, "ball:R" or "ball:R:dim" for a centred ball.
inline Region parse_window(const std::string& spec, int default_dim = 1) {
  if (spec.rfind("ball:", 0) == 0) {
    const auto p = detail::split(spec.substr(5), ':');
    require(p.size() == 1 || p.size() == 2, ErrorCode::ParseError, "window '" + spec + "' must be ball:R[:dim]");
    const int dim = p.size() == 2 ? static_cast<int>(detail::to_double(p[1], "window")) : default_dim;
    require(dim >= 1, ErrorCode::ParseError, "window dimension must be positive");
    return Region::ball(dim, detail::to_double(p[0], "window"));
  }
  const auto axes = detail::split(spec, ',');
  require(!axes.empty(), ErrorCode::ParseError, "empty window spec");
  Vec lo(static_cast<Eigen::Index>(axes.size())), hi(static_cast<Eigen::Index>(axes.size()));
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto p = detail::split(axes[i], ':');
    require(p.size() == 2, ErrorCode::ParseError, "window axis '" + axes[i] + "' must be lo:hi");
    lo[static_cast<Eigen::Index>(i)] = detail::to_double(p[0], "window");
    hi[static_cast<Eigen::Index>(i)] = detail::to_double(p[1], "window");
  }
  return Region::box(lo, hi);
}

// ---------------------------------------------------------------------------
// files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::InvalidParams, "cannot write '" + path + "'");
  out << text;
}

}  // namespace combforge
