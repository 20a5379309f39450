// Command implementations behind the crext executable. Each command writes its
// result to `out`, diagnostics to `err`, and returns the process exit code.
#pragma once

#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crext/continuation.hpp"
#include "crext/edgewedge.hpp"
#include "crext/errors.hpp"
#include "crext/gallery.hpp"
#include "crext/harmonic.hpp"
#include "crext/taylor.hpp"

namespace crext::cli {

using geometry::C2;
using geometry::Interval;
using geometry::Side;
using geometry::Strip;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2 };

struct Options {
  int workers = 1;
  std::uint64_t seed = 12345;  // Monte Carlo only
  double tolerance_scale = 1.0;
};

inline void validate(const Options& o) {
  if (o.workers < 1) throw ConfigError("--workers must be >= 1");
  if (!(o.tolerance_scale > 0 && std::isfinite(o.tolerance_scale)))
    throw ConfigError("--tolerance-scale must be positive");
}

namespace detail {

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

}  // namespace detail

/// "0.5", "-2i", "0.3+0.2i", "1e-3-4.5i".
inline cplx parse_complex(std::string s) {
  std::erase(s, ' ');
  if (s.empty()) throw ConfigError("empty complex number");
  if (s.back() != 'i') return {detail::parse_double(s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  auto imag = [](std::string t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    if (t.front() == '+') t.erase(0, 1);
    return detail::parse_double(t);
  };
  if (split == std::string::npos) return {0.0, imag(s)};
  return {detail::parse_double(s.substr(0, split)), imag(s.substr(split))};
}

/// "z1_re,z1_im,z2_re,z2_im".
inline C2 parse_point(const std::string& s) {
  std::vector<double> v;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = s.find(',', start);
    v.push_back(detail::parse_double(std::string_view(s).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (v.size() != 4) throw ConfigError("a point needs 4 comma-separated numbers: '" + s + "'");
  return {cplx(v[0], v[1]), cplx(v[2], v[3])};
}

// ---------------------------------------------------------------------------
// Error reporting.

/// Runs `body`, mapping library errors to exit codes with a JSON record on `err`.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  auto report = [&](const char* kind, const std::string& what, Json extra = Json::object()) {
    extra["error"] = kind;
    extra["message"] = what;
    err << extra.dump() << '\n';
  };
  try {
    return body();
  } catch (const ConfigError& e) {
    report("config", e.what());
    return kConfigError;
  } catch (const PreconditionError& e) {
    report("precondition", e.what());
    return kConfigError;
  } catch (const AtlasError& e) {
    Json rec = Json::parse(e.record(), nullptr, false);
    report("atlas", e.what(), {{"record", rec.is_discarded() ? Json(e.record()) : rec}});
    return kCheckFailed;
  } catch (const NonExtendibleError& e) {
    report("non_extendible", e.what(), {{"location", e.location()}});
    return kCheckFailed;
  } catch (const ContainmentError& e) {
    report("containment", e.what(), {{"theta", e.theta()}});
    return kCheckFailed;
  } catch (const CoverageError& e) {
    report("coverage", e.what());
    return kCheckFailed;
  } catch (const Error& e) {
    report("check", e.what());
    return kCheckFailed;
  } catch (const Json::exception& e) {
    report("config", e.what());
    return kConfigError;
  }
}

// ---------------------------------------------------------------------------
// gallery

inline int cmd_gallery_list(std::ostream& out) {
  out << gallery::list().dump(2) << '\n';
  return kOk;
}

inline int cmd_gallery_eval(const std::string& name, const std::string& z1s, const std::string& z2s,
                            const Json& params, std::ostream& out) {
  const auto o = gallery::oracle(name, params);
  const cplx z1 = parse_complex(z1s), z2 = parse_complex(z2s);
  if (!o.defined_at(z1, z2))
    throw ConfigError("point (" + z1s + ", " + z2s + ") is outside the domain of " + name);
  const cplx v = o(z1, z2);
  Json r{{"oracle", gallery::describe(o)},
         {"z1", {z1.real(), z1.imag()}},
         {"z2", {z2.real(), z2.imag()}},
         {"value", {v.real(), v.imag()}}};
  out << r.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// march

/// Top-level march configuration: {"job": ContinuationJob, "atlas": path,
/// "trace": path}; paths are optional.
struct MarchConfig {
  continuation::ContinuationJob job;
  std::optional<std::string> atlas;
  std::optional<std::string> trace;
};

inline MarchConfig march_config_from_json(const Json& j, const Options& opt) {
  if (!j.is_object()) throw ConfigError("march config must be a JSON object");
  continuation::detail::check_keys(j, {"job", "atlas", "trace"}, "march config");
  if (!j.contains("job")) throw ConfigError("march config needs a 'job' object");
  MarchConfig c;
  Json job = j.at("job");
  c.job = continuation::job_from_json(job);
  c.job.tol.hartogs *= opt.tolerance_scale;
  c.job.tol.agreement *= opt.tolerance_scale;
  c.job.tol.seed *= opt.tolerance_scale;
  c.job.tol.center *= opt.tolerance_scale;
  for (const char* key : {"atlas", "trace"})
    if (j.contains(key)) {
      if (!j.at(key).is_string()) throw ConfigError(std::string("'") + key + "' must be a path string");
      (std::string(key) == "atlas" ? c.atlas : c.trace) = j.at(key).get<std::string>();
    }
  return c;
}

inline void write_summary(std::ostream& out, const continuation::ExtensionAtlas& a) {
  out << "step  center                      pass  radius      height\n";
  char line[160];
  for (const auto& c : a.charts) {
    std::snprintf(line, sizeof line, "%4d  %+.6f%+.6fi  %-5s %.6e  %.6e\n", c.step, c.center.real(),
                  c.center.imag(), c.certificate.value("pass", false) ? "yes" : "no", c.radius, c.height);
    out << line;
  }
  for (const auto& f : a.failures) out << "failed step " << f.at("step") << ": " << f.dump() << '\n';
  out << (a.complete ? "complete" : "incomplete") << ", " << a.charts.size() << " charts\n";
}

inline int cmd_march(const std::string& config_path, const std::optional<std::string>& out_path,
                     const std::optional<std::string>& trace_path, const Options& opt, std::ostream& out) {
  validate(opt);
  auto cfg = march_config_from_json(detail::read_json_file(config_path), opt);
  if (out_path) cfg.atlas = out_path;
  if (trace_path) cfg.trace = trace_path;
  const auto atlas = continuation::run(cfg.job, opt.workers);
  if (cfg.atlas) detail::write_file(*cfg.atlas, continuation::to_json(atlas).dump() + "\n");
  if (cfg.trace) {
    std::ostringstream csv;
    continuation::write_trace(csv, atlas, continuation::trace_points(atlas));
    detail::write_file(*cfg.trace, csv.str());
  }
  write_summary(out, atlas);
  bool pass = atlas.complete;
  for (const auto& c : atlas.charts) pass = pass && c.certificate.value("pass", false);
  return pass ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  bool pass;
  Json detail;
};

inline Json to_json(const std::string& suite, const std::vector<Check>& checks) {
  Json cs = Json::array();
  bool all = true;
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    all = all && c.pass;
  }
  return {{"suite", suite}, {"pass", all}, {"checks", cs}};
}

/// Conjugate-function identities, disc centers and center values.
inline std::vector<Check> suite_discs(const Options& opt) {
  std::vector<Check> out;
  {
    const int m = 2048;
    double err = 0.0;
    for (int k = 1; k <= 32; ++k) {
      const auto c = harmonic::hilbert_transform(
          harmonic::CircleSamples::from([&](double t) { return std::cos(k * t); }, m));
      const auto s = harmonic::hilbert_transform(
          harmonic::CircleSamples::from([&](double t) { return std::sin(k * t); }, m));
      for (int j = 0; j < m; ++j) {
        const double t = c.theta(j);
        err = std::max({err, std::abs(c.values[j] - std::sin(k * t)), std::abs(s.values[j] + std::cos(k * t))});
      }
    }
    const double tol = 1e-10 * opt.tolerance_scale;
    out.push_back({"hilbert_identities", err < tol, {{"max_error", err}, {"tolerance", tol}, {"samples", m}}});
  }
  const edgewedge::DiscFactory f(1024);
  {
    double worst = 0.0;
    int n = 0;
    for (double x1 : continuation::detail::linspace(-0.05, 0.05, 5))
      for (double x2 : continuation::detail::linspace(-0.05, 0.05, 5))
        for (double l1 : {0.0, 0.01, 0.02, 0.03})
          for (double l2 : {0.0, 0.01, 0.02, 0.03}) {
            const auto d = f.attach({x1, x2}, {l1, l2});
            worst = std::max({worst, std::abs(d.center.z1 - cplx(x1, l1)), std::abs(d.center.z2 - cplx(x2, l2))});
            ++n;
          }
    const double tol = 1e-8 * opt.tolerance_scale;
    out.push_back({"disc_centers", worst < tol, {{"discs", n}, {"max_error", worst}, {"tolerance", tol}}});
  }
  {
    const auto d = f.attach({0.02, -0.03}, {0.02, 0.01});
    auto g = [](cplx a, cplx b) { return std::exp(a) * (1.0 + b * b); };
    const double err = std::abs(edgewedge::extend_at_center(d, g) - g(d.center.z1, d.center.z2));
    const double tol = 1e-9 * opt.tolerance_scale;
    out.push_back({"center_values", err < tol, {{"error", err}, {"tolerance", tol}}});
  }
  return out;
}

/// Half-plane Cauchy-Pompeiu residuals with a second-order cutoff.
inline std::vector<Check> suite_cauchy(const Options& opt) {
  const edgewedge::CutoffSpec spec{Interval(-0.5, 0.5), Interval(-1, 1), 2, 0.5};
  const double tol = 1e-6 * opt.tolerance_scale;
  std::vector<Check> out;
  auto run = [&](const std::string& name, const std::function<cplx(cplx)>& f) {
    try {
      const auto r = edgewedge::cauchy_formula_residual(f, spec, 0.1, 0.1, 2000);
      out.push_back({name, r.residual < tol && r.residual_refined < r.residual,
                     {{"residual", r.residual},
                      {"residual_refined", r.residual_refined},
                      {"observed_order", r.observed_order},
                      {"points", r.points},
                      {"tolerance", tol}}});
    } catch (const InstabilityError& e) {
      out.push_back({name, false, {{"error", e.what()}}});
    }
  };
  run("z^2", [](cplx z) { return z * z; });
  run("1/(z+2i)", [](cplx z) { return 1.0 / (z + cplx(0, 2)); });
  return out;
}

/// Hartogs verifier families, kappa stability, bounds on the arc measure
/// and a Monte Carlo cross-check.
inline std::vector<Check> suite_hartogs(const Options& opt) {
  using harmonic::HartogsHypotheses;
  auto make_seq = [](const std::vector<cplx>& grid, int lo, int hi, const std::function<double(int, cplx)>& phi) {
    taylor::CoeffLogSequence seq{grid, {}, lo, hi};
    for (int nu = lo; nu <= hi; ++nu) {
      std::vector<double> row;
      for (cplx z : grid) row.push_back(phi(nu, z));
      seq.values.push_back(std::move(row));
    }
    return seq;
  };
  std::vector<Check> out;
  const geometry::HalfDisc disc(0.0, 1.0);
  const auto grid = harmonic::hartogs_grid(disc, 24);
  {
    const auto seq = make_seq(grid, 1, 40, [](int, cplx z) { return std::log(std::abs(z)); });
    bool pass = true;
    Json thresholds = Json::array();
    for (double alpha : {1e-3, 0.1, 0.5, 1.0}) {
      HartogsHypotheses hyp;
      hyp.alpha = alpha;
      const auto c = harmonic::verify_hartogs(seq, disc, hyp);
      pass = pass && c.pass && c.nu_threshold == seq.nu_min;
      thresholds.push_back(Json{{"alpha", alpha}, {"nu_threshold", c.nu_threshold}, {"pass", c.pass}});
    }
    out.push_back({"log_abs_family", pass, {{"runs", thresholds}}});
  }
  {
    const auto seq = make_seq(grid, 1, 40, [](int, cplx) { return 0.5; });
    HartogsHypotheses hyp;
    hyp.l = hyp.L = 1.0;
    std::string clause = "none";
    try {
      harmonic::verify_hartogs(seq, disc, hyp);
    } catch (const HypothesisViolation& e) {
      clause = e.clause();
    }
    out.push_back({"constant_positive_rejected", clause == "diameter", {{"clause", clause}}});
  }
  {
    const Strip strip(Interval(-1, 1), 0.3, Side::upper);
    const auto sg = harmonic::hartogs_grid(strip, 20, 8);
    const auto seq = make_seq(sg, 1, 60, [](int nu, cplx z) {
      return std::log(std::abs(0.45 * (z + 1.2))) + 40.0 * z.imag() / nu;
    });
    HartogsHypotheses hyp;
    hyp.l = 0.3;
    hyp.L = 15.0;
    bool pass = true, passed_before = false;
    int last = seq.nu_max + 1;
    Json runs = Json::array();
    for (double alpha : {0.01, 0.05, 0.2, 0.5}) {
      hyp.alpha = alpha;
      const auto c = harmonic::verify_hartogs(seq, strip, hyp);
      if (c.nu_threshold > last || (passed_before && !c.pass)) pass = false;
      passed_before = c.pass;
      last = c.nu_threshold;
      runs.push_back(Json{{"alpha", alpha}, {"nu_threshold", c.nu_threshold}, {"pass", c.pass}});
    }
    out.push_back({"alpha_monotonicity", pass, {{"runs", runs}}});
  }
  {
    const double k128 = harmonic::kappa_estimate(128).kappa, k256 = harmonic::kappa_estimate(256).kappa;
    const double change = std::abs(k256 - k128) / k128;
    out.push_back({"kappa_stability", change < 0.02,
                   {{"kappa_128", k128}, {"kappa_256", k256}, {"relative_change", change}, {"tolerance", 0.02}}});
  }
  const harmonic::HalfDiscExtension u(harmonic::HalfDiscBoundary::chi(256));
  {
    double lo = 1.0, hi = 0.0;
    int n = 0;
    for (int i = 1; i <= 40; ++i)
      for (int k = 1; k < 80; ++k) {
        const cplx z = std::polar(0.998 * i / 40.0, std::numbers::pi * k / 80.0);
        if (z.imag() < 1e-4) continue;
        const double v = u(z).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++n;
      }
    out.push_back({"arc_measure_bounds", lo >= 0.0 && hi <= 1.0, {{"points", n}, {"min", lo}, {"max", hi}}});
  }
  {
    const cplx z(0.0, 0.5);
    const auto mc = harmonic::harmonic_measure_mc(z, 40000, opt.seed);
    const double v = u(z).value;
    const double dev = std::abs(mc.mean - v);
    out.push_back({"monte_carlo_cross_check", dev < 3.0 * mc.standard_error,
                   {{"point", {z.real(), z.imag()}},
                    {"poisson", v},
                    {"monte_carlo", mc.mean},
                    {"standard_error", mc.standard_error},
                    {"walks", mc.walks},
                    {"seed", opt.seed}}});
  }
  return out;
}

/// Counterexample detectors and a positive control.
inline std::vector<Check> suite_probes(const Options& opt) {
  std::vector<Check> out;
  {
    const auto r = gallery::temperedness_probe(gallery::oracle("cordaro"), 0.0);
    const auto& s10 = r.samples[10 - 2];
    const double f10 = std::exp(s10.log_abs_f), want = std::sinh(10.0) / 100.0;
    const double rel = std::abs(f10 - want) / want;
    out.push_back({"cordaro_not_tempered", r.verdict == "not_tempered" && rel < 1e-9 * opt.tolerance_scale,
                   {{"abs_f_at_nu_10", f10}, {"expected", want}, {"report", gallery::to_json(r)}}});
  }
  {
    const auto r = gallery::radius_collapse_probe(gallery::oracle("flat"), 2, {{0.5, 0}, {0.25, 0}, {0.125, 0}});
    bool within = true;
    for (const auto& s : r.samples)
      within = within && !s.error && std::abs(s.radius - s.point.x1) <= 0.3 * s.point.x1;
    out.push_back({"flat_radius_collapse", r.verdict == "not_cr_extendible" && within,
                   {{"report", gallery::to_json(r)}}});
  }
  {
    const auto r = gallery::temperedness_probe(gallery::oracle("good2s"), 0.3);
    out.push_back({"good2s_tempered", r.tempered, {{"fitted_k", r.fitted_k}}});
  }
  return out;
}

inline int cmd_verify(const std::string& suite, const Options& opt, std::ostream& out) {
  validate(opt);
  std::vector<Check> checks;
  if (suite == "discs") checks = suite_discs(opt);
  else if (suite == "cauchy") checks = suite_cauchy(opt);
  else if (suite == "hartogs") checks = suite_hartogs(opt);
  else if (suite == "probes") checks = suite_probes(opt);
  else throw ConfigError("unknown suite '" + suite + "' (hartogs, cauchy, discs, probes)");
  const Json r = to_json(suite, checks);
  out << r.dump(2) << '\n';
  return r.at("pass").get<bool>() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// report

/// Points origin + i/(nu-1) u + j/(nv-1) v, i-major.
struct SliceSpec {
  C2 origin;
  C2 u;
  std::optional<C2> v;
  int nu = 11;
  int nv = 1;

  std::vector<C2> points() const {
    if (nu < 1 || nv < 1) throw ConfigError("slice sizes must be >= 1");
    if (nv > 1 && !v) throw ConfigError("a 2-D slice needs a second direction");
    std::vector<C2> pts;
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) {
        const double s = nu > 1 ? static_cast<double>(i) / (nu - 1) : 0.0;
        const double t = nv > 1 ? static_cast<double>(j) / (nv - 1) : 0.0;
        C2 p{origin.z1 + s * u.z1, origin.z2 + s * u.z2};
        if (v) p = {p.z1 + t * v->z1, p.z2 + t * v->z2};
        pts.push_back(p);
      }
    return pts;
  }
};

/// CSV of the extension along a slice, next to the closed form of the oracle.
inline int cmd_report(const std::string& atlas_path, const SliceSpec& slice, std::ostream& out) {
  const auto atlas = continuation::atlas_from_json(detail::read_json_file(atlas_path));
  const auto job = continuation::job_from_json(atlas.job);
  const auto o = gallery::oracle(job.oracle, job.oracle_params);
  std::ostringstream csv;
  csv.precision(17);
  csv << "z1_re,z1_im,z2_re,z2_im,F_re,F_im,chart_id,tail_bound,f_re,f_im\n";
  for (const auto& p : slice.points()) {
    const auto v = continuation::evaluate_extension(atlas, p);
    const cplx f = o(p.z1, p.z2);
    csv << p.z1.real() << ',' << p.z1.imag() << ',' << p.z2.real() << ',' << p.z2.imag() << ','
        << v.value.real() << ',' << v.value.imag() << ',' << v.chart_id << ',' << v.tail_bound << ','
        << f.real() << ',' << f.imag() << '\n';
  }
  out << csv.str();
  return kOk;
}

}  // namespace crext::cli
