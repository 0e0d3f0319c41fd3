// combforge command-line front end.
//
// Exit codes: 0 success, 1 analysis-negative result, 2 input error.

#include <CLI11.hpp>

#include <iostream>

#include "combforge/combforge.hpp"
#include "combforge/suites.hpp"

using namespace combforge;

namespace {

struct Negative : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidParams:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DuplicatePoint:
    case ErrorCode::EmptyShifts:
    case ErrorCode::SingularMatrix:
    case ErrorCode::EmptyOperator:
    case ErrorCode::RegionTooLarge:
    case ErrorCode::OutputCap:
    case ErrorCode::GridTooCoarse:
    case ErrorCode::TooFewPoints:
      return true;
    default:
      return false;
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Input {
  std::optional<PointSet> points;
  std::optional<WeightedComb> comb;
};

// Points from CSV, points JSON, or a comb JSON (schema comb-v1).
Input load_input(const std::string& path, const std::string& window) {
  require(!path.empty(), ErrorCode::InvalidParams, "--input is required");
  const std::string text = read_file(path);
  Input in;
  if (ends_with(path, ".json")) {
    const json j = parse_json(text);
    if (j.contains("schema") && j.at("schema") == "comb-v1") {
      in.comb = comb_from_json(j);
      in.points = make_point_set(in.comb->support(), in.comb->window());
      return in;
    }
    in.points = point_set_from_json(j);
    return in;
  }
  std::istringstream ss(text);
  auto pts = parse_points_csv(ss);
  const int n = static_cast<int>(pts.front().size());
  if (!window.empty()) {
    in.points = make_point_set(std::move(pts), parse_window(window, n));
  } else {
    in.points = make_point_set(std::move(pts));
  }
  return in;
}

std::vector<Vec> parse_vec_list(const std::string& spec) {
  // "a,b;c,d" (or "a,b/c,d") -> two vectors
  std::vector<Vec> out;
  std::string norm = spec;
  std::replace(norm.begin(), norm.end(), '/', ';');
  std::stringstream ss(norm);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::vector<double> vals;
    std::stringstream is(item);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == tok.size() && !tok.empty(), ErrorCode::ParseError, "bad number '" + tok + "' in '" + spec + "'");
      vals.push_back(v);
    }
    out.push_back(make_vec(vals));
  }
  require(!out.empty(), ErrorCode::ParseError, "empty vector list");
  return out;
}

Mat rows_to_mat(const std::vector<Vec>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Mat g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    require(rows[static_cast<std::size_t>(r)].size() == n, ErrorCode::DimensionMismatch, "generator matrix must be square");
    g.row(r) = rows[static_cast<std::size_t>(r)].transpose();
  }
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tempered Dirac combs on discrete point sets"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  std::string input, output, window, grid, expect, suite = "all", kind, generators = "1", shifts = "0", eta_spec,
                                                  report_path, csv_path, mode = "diffraction", crystal_path;
  double tol = 1e-9, width = 4.0, radius = 0.0, alpha = std::sqrt(2.0), ud_threshold = 0.0;
  std::uint64_t seed = 42;
  int threads = 0, order = 2, max_order = 12;

  app.add_option("--threads", threads, "worker threads (0 = logical cores)")->envname("COMBFORGE_THREADS");
  app.add_option("--seed", seed, "random seed")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "uniform discreteness, difference-set and temperedness diagnostics");
  analyze->add_option("--input", input, "point CSV/JSON or comb JSON")->required();
  analyze->add_option("--output", output, "report JSON (default stdout)");
  analyze->add_option("--window", window, "window lo:hi[,lo:hi] or ball:R[:dim]");
  analyze->add_option("--radius", radius, "difference-set radius (default window diameter)");
  analyze->add_option("--tol", ud_threshold, "uniform discreteness threshold");
  analyze->add_option("--order", order, "temperedness exponent m for comb input");

  auto* diffract = app.add_subcommand("diffract", "amplitude or diffraction spectrum on a grid");
  diffract->add_option("--input", input, "point CSV/JSON or comb JSON")->required();
  diffract->add_option("--grid", grid, "x0:x1:step[,y0:y1:step]")->required();
  diffract->add_option("--output", output, "spectrum JSON (default stdout)");
  diffract->add_option("--csv", csv_path, "spectrum CSV");
  diffract->add_option("--window", window, "window for point input");
  diffract->add_option("--mode", mode, "amplitude | diffraction")->check(CLI::IsMember({"amplitude", "diffraction"}));
  diffract->add_option("--width", width, "Gaussian regularizer width");
  diffract->add_option("--radius", radius, "autocorrelation radius (default 4 widths)");

  auto* detect = app.add_subcommand("detect", "crystal detection");
  detect->add_option("--input", input, "point CSV/JSON")->required();
  detect->add_option("--output", output, "report JSON (default stdout)");
  detect->add_option("--window", window, "window for CSV input");
  detect->add_option("--tol", tol, "membership tolerance");
  detect->add_option("--expect", expect, "expected verdict")
      ->check(CLI::IsMember({"crystal", "non_crystal_evidence", "inconclusive"}));

  auto* fit = app.add_subcommand("fit", "exponential-polynomial fit of comb weights");
  fit->add_option("--input", input, "comb JSON")->required();
  fit->add_option("--output", output, "Poisson comb JSON (default stdout)");
  fit->add_option("--report", report_path, "fit report JSON");
  fit->add_option("--crystal", crystal_path, "crystal JSON (default: detected from the support)");
  fit->add_option("--max-order", max_order, "largest recurrence order");

  auto* transform = app.add_subcommand("transform", "Fourier transform of a Poisson comb");
  transform->add_option("--input", input, "Poisson comb JSON")->required();
  transform->add_option("--output", output, "transformed comb JSON (default stdout)");
  transform->add_option("--report", report_path, "duality check report JSON");
  transform->add_option("--tol", tol, "duality tolerance");

  auto* verify = app.add_subcommand("verify", "built-in verification suites");
  verify->add_option("--suite", suite, "suite")->check(CLI::IsMember(suite_names()))->capture_default_str();
  verify->add_option("--output", output, "report JSON (default stdout)");

  auto* generate = app.add_subcommand("generate", "fixtures");
  generate->add_option("--kind", kind, "lattice | crystal | two_lattices | poisson_comb_weights")
      ->required()
      ->check(CLI::IsMember({"lattice", "crystal", "two_lattices", "poisson_comb_weights"}));
  generate->add_option("--window", window, "window lo:hi[,lo:hi] or ball:R[:dim]")->required();
  generate->add_option("--generators", generators, "generator matrix rows, e.g. \"1,0;0,1\"");
  generate->add_option("--shifts", shifts, "coset shifts, e.g. \"0;0.25\" or \"0/0.25\"");
  generate->add_option("--alpha", alpha, "second lattice spacing for two_lattices");
  generate->add_option("--eta", eta_spec, "phase vector for poisson_comb_weights");
  generate->add_option("--output", output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  set_thread_count(threads);

  try {
    if (*analyze) {
      const Input in = load_input(input, window);
      const auto& ps = *in.points;
      const auto [lo, hi] = ps.window().bounds();
      const double r = radius > 0.0 ? radius : (hi - lo).norm();
      json j{{"schema", "analyze-v1"}, {"points", ps.size()}, {"window", to_json(ps.window())}};
      if (ps.size() >= 2) j["min_distance"] = to_json(min_distance(ps, ud_threshold));
      j["hypothesis"] = to_json(hypothesis_check(ps, ud_threshold, r));
      if (in.comb) j["temperedness"] = to_json(temperedness_diagnostic(*in.comb, order));
      emit(output, dump(j));
      return 0;
    }
    if (*diffract) {
      const Input in = load_input(input, window);
      const WeightedComb t = in.comb ? *in.comb : unit_comb(in.points->points(), in.points->window());
      const auto sig = parse_grid(grid);
      require(sig.front().size() == t.dim(), ErrorCode::DimensionMismatch, "grid dimension differs from input");
      SpectrumSamples s;
      if (mode == "amplitude") {
        s = amplitude_spectrum(t, sig);
      } else {
        const auto phi = gaussian(t.dim(), width);
        const auto a = autocorr(t, phi, radius > 0.0 ? radius : 4.0 * width);
        s = diffraction_of_autocorr(a, sig);
      }
      emit(output, dump(to_json(s)));
      if (!csv_path.empty()) write_file(csv_path, spectrum_csv(s));
      return 0;
    }
    if (*detect) {
      const Input in = load_input(input, window);
      DetectOptions opts;
      if (detect->count("--tol")) opts.membership_tol = tol;
      const auto rep = detect_crystal(*in.points, opts);
      emit(output, dump(to_json(rep)));
      if (!expect.empty() && expect != to_string(rep.verdict))
        throw Negative("verdict " + std::string(to_string(rep.verdict)) + ", expected " + expect);
      return 0;
    }
    if (*fit) {
      const WeightedComb t = comb_from_json(parse_json(read_file(input)));
      std::optional<Crystal> c;
      if (!crystal_path.empty()) {
        c = crystal_from_json(parse_json(read_file(crystal_path)));
      } else {
        const auto rep = detect_crystal(make_point_set(t.support(), t.window()));
        if (rep.verdict != Verdict::Crystal) throw Negative("support is not a crystal: " + rep.note);
        c = rep.crystal;
      }
      const auto f = fit_exp_poly(*c, t, max_order);
      json rep = to_json(f);
      rep["crystal"] = to_json(*c);
      if (!report_path.empty()) write_file(report_path, dump(rep));
      if (!f.roots_on_circle) {
        if (report_path.empty()) std::cout << dump(rep);
        throw Negative("characteristic roots off the unit circle");
      }
      emit(output, dump(to_json(to_poisson_comb(*c, f))));
      return 0;
    }
    if (*transform) {
      const auto pc = poisson_comb_from_json(parse_json(read_file(input)));
      const auto ft = fourier_comb(pc);
      emit(output, dump(to_json(ft)));
      if (!report_path.empty()) {
        const int n = pc.dim();
        double h = 0.0;
        for (const auto* l : {&pc.lattice(), &ft.lattice()})
          for (int i = 0; i < n; ++i) h = std::max(h, l->generator(i).norm());
        double shift = 0.0;
        for (const auto& t : pc.terms()) shift = std::max({shift, t.phase.norm(), t.shift.norm()});
        const std::vector<TestFunction> tests{gaussian(n, 0.8), gaussian(n, 1.0), gaussian(n, 1.4)};
        const auto rep = verify_transform(pc, tests, default_truncation_radius(1.4) + h + shift + 1.0, tol, ft);
        write_file(report_path, dump(to_json(rep)));
        if (!rep.pass) throw Negative("duality check failed");
      }
      return 0;
    }
    if (*verify) {
      const auto checks = run_checks(suite, seed);
      const json rep = suite_report(suite, seed, checks);
      emit(output, dump(rep));
      for (const auto& c : checks)
        std::cerr << (c.pass ? "pass " : "FAIL ") << c.name << "\n";
      if (!rep.at("pass").get<bool>()) throw Negative("suite '" + suite + "' failed");
      return 0;
    }
    if (*generate) {
      if (kind == "two_lattices") {
        const Region w = parse_window(window, 1);
        require(w.dim() == 1, ErrorCode::InvalidParams, "two_lattices needs a one-dimensional window");
        const auto [lo, hi] = w.bounds();
        require(alpha > 0.0, ErrorCode::InvalidParams, "alpha must be positive");
        emit(output, points_csv(fixtures::two_lattices_1d(alpha, lo[0], hi[0])));
        return 0;
      }
      const auto l = make_lattice(rows_to_mat(parse_vec_list(generators)));
      const int n = l.dim();
      const Region w = parse_window(window, n);
      require(w.dim() == n, ErrorCode::DimensionMismatch, "window dimension differs from lattice");
      std::vector<Vec> q = kind == "lattice" ? std::vector<Vec>{Vec::Zero(n)} : parse_vec_list(shifts);
      if (kind == "lattice" || kind == "crystal") {
        emit(output, points_csv(crystal_points(make_crystal(l, q), w)));
        return 0;
      }
      Vec eta = Vec::Zero(n);
      if (!eta_spec.empty()) eta = parse_vec_list(eta_spec).front();
      require(eta.size() == n, ErrorCode::DimensionMismatch, "eta dimension differs from lattice");
      const auto c = make_crystal(l, q);
      const auto t = fixtures::weights_on(c, w, [&](const Vec& p) { return phase_factor(eta, p); });
      emit(output, dump(to_json(t)));
      return 0;
    }
  } catch (const Negative& e) {
    std::cerr << "negative: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
