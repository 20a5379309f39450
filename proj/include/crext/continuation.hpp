// Continuation of a separately analytic oracle: seeding on a small quadrant
// with analytic discs, two-sided filling by one Hartogs step, and a one-sided
// march of overlapping charts along the edge, assembled into a wedge.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crext/chebyshev.hpp"
#include "crext/edgewedge.hpp"
#include "crext/errors.hpp"
#include "crext/gallery.hpp"
#include "crext/geometry.hpp"
#include "crext/harmonic.hpp"
#include "crext/oracle.hpp"
#include "crext/parallel.hpp"
#include "crext/taylor.hpp"

namespace crext::continuation {

using geometry::C2;
using geometry::Interval;
using geometry::R2;
using geometry::Side;
using geometry::Strip;
using std::numbers::pi;

// ---------------------------------------------------------------------------
// Job configuration.

enum class Mode { two_sided, one_sided_up };

inline std::string to_string(Mode m) { return m == Mode::two_sided ? "two_sided" : "one_sided_up"; }

inline Mode mode_from_string(const std::string& s) {
  if (s == "two_sided") return Mode::two_sided;
  if (s == "one_sided_up") return Mode::one_sided_up;
  throw ConfigError("unknown mode '" + s + "'");
}

struct Grids {
  int panels = 8;            // z1 panels per chart
  int cheb_nodes = 48;       // z1 nodes per panel
  int hartogs_nx = 40;
  int hartogs_ny = 8;
  int kappa_resolution = 128;
  int disc_points = 1024;    // analytic disc boundary samples
  int slab_points = 41;
};

struct Tolerances {
  double hartogs = 1e-6;
  double agreement = 1e-5;   // relative, on chart overlaps
  double seed = 1e-7;
  double center = 1e-8;      // analytic disc centers
};

/// Base points and lambdas of the seeding discs.
struct SeedGrid {
  std::vector<double> x1, x2, l1, l2;
};

struct ContinuationJob {
  std::string oracle = "good2s";
  Json oracle_params = Json::object();
  Mode mode = Mode::two_sided;
  double delta = 0.2;
  double sigma = 0.02;
  double alpha = 0.25;
  int n_coeffs = 64;
  Grids grids;
  Tolerances tol;
  std::optional<SeedGrid> seed;

  void validate() const {
    gallery::oracle(oracle, oracle_params);
    if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0, 1)");
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(sigma > 0)) throw ConfigError("sigma must be positive");
    if (n_coeffs < 16 || n_coeffs > 2048) throw ConfigError("n_coeffs must lie in [16, 2048]");
    if (grids.cheb_nodes < 8) throw ConfigError("cheb_nodes must be >= 8");
    if (grids.panels < 1) throw ConfigError("panels must be >= 1");
    if (grids.hartogs_nx < 4 || grids.hartogs_ny < 4) throw ConfigError("Hartogs grid too small");
    if (grids.kappa_resolution < 16) throw ConfigError("kappa_resolution must be >= 16");
    const int m = grids.disc_points;
    if (m < 64 || (m & (m - 1)) != 0) throw ConfigError("disc_points must be a power of two >= 64");
    if (grids.slab_points < 3) throw ConfigError("slab_points must be >= 3");
    if (!(tol.hartogs > 0 && tol.agreement > 0 && tol.seed > 0 && tol.center > 0))
      throw ConfigError("tolerances must be positive");
    if (seed && (seed->x1.empty() || seed->x2.empty() || seed->l1.empty() || seed->l2.empty()))
      throw ConfigError("seed grid axes must be nonempty");
  }
};

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown field '" + k + "' in " + where);
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(n == 1 ? 0.5 * (a + b) : a + (b - a) * k / (n - 1));
  return v;
}

inline Json cjson(cplx z) { return Json::array({z.real(), z.imag()}); }
inline cplx jcplx(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace detail

inline Json to_json(const ContinuationJob& job) {
  Json j{{"oracle", job.oracle},
         {"oracle_params", job.oracle_params},
         {"mode", to_string(job.mode)},
         {"delta", job.delta},
         {"sigma", job.sigma},
         {"alpha", job.alpha},
         {"n_coeffs", job.n_coeffs},
         {"grids",
          {{"panels", job.grids.panels},
           {"cheb_nodes", job.grids.cheb_nodes},
           {"hartogs_nx", job.grids.hartogs_nx},
           {"hartogs_ny", job.grids.hartogs_ny},
           {"kappa_resolution", job.grids.kappa_resolution},
           {"disc_points", job.grids.disc_points},
           {"slab_points", job.grids.slab_points}}},
         {"tolerances",
          {{"hartogs", job.tol.hartogs},
           {"agreement", job.tol.agreement},
           {"seed", job.tol.seed},
           {"center", job.tol.center}}}};
  if (job.seed)
    j["seed"] = {{"x1", job.seed->x1}, {"x2", job.seed->x2}, {"l1", job.seed->l1}, {"l2", job.seed->l2}};
  return j;
}

/// Strict parse: unknown fields at any level are configuration errors.
inline ContinuationJob job_from_json(const Json& j) {
  using detail::read;
  detail::check_keys(j, {"oracle", "oracle_params", "mode", "delta", "sigma", "alpha", "n_coeffs",
                         "grids", "tolerances", "seed"},
                     "job");
  ContinuationJob job;
  if (!j.contains("oracle")) throw ConfigError("job needs an oracle");
  read(j, "oracle", job.oracle);
  if (j.contains("oracle_params")) job.oracle_params = j.at("oracle_params");
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m);
    job.mode = mode_from_string(m);
  }
  read(j, "delta", job.delta);
  read(j, "sigma", job.sigma);
  read(j, "alpha", job.alpha);
  read(j, "n_coeffs", job.n_coeffs);
  if (j.contains("grids")) {
    const Json& g = j.at("grids");
    detail::check_keys(g, {"panels", "cheb_nodes", "hartogs_nx", "hartogs_ny", "kappa_resolution",
                           "disc_points", "slab_points"},
                       "grids");
    read(g, "panels", job.grids.panels);
    read(g, "cheb_nodes", job.grids.cheb_nodes);
    read(g, "hartogs_nx", job.grids.hartogs_nx);
    read(g, "hartogs_ny", job.grids.hartogs_ny);
    read(g, "kappa_resolution", job.grids.kappa_resolution);
    read(g, "disc_points", job.grids.disc_points);
    read(g, "slab_points", job.grids.slab_points);
  }
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    detail::check_keys(t, {"hartogs", "agreement", "seed", "center"}, "tolerances");
    read(t, "hartogs", job.tol.hartogs);
    read(t, "agreement", job.tol.agreement);
    read(t, "seed", job.tol.seed);
    read(t, "center", job.tol.center);
  }
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    detail::check_keys(s, {"x1", "x2", "l1", "l2"}, "seed");
    SeedGrid g;
    read(s, "x1", g.x1);
    read(s, "x2", g.x2);
    read(s, "l1", g.l1);
    read(s, "l2", g.l2);
    job.seed = g;
  }
  job.validate();
  return job;
}

// ---------------------------------------------------------------------------
// Bounded slabs.

struct BoundedSlab {
  int axis;
  double l;
  Interval interval;
};

struct SlabScan {
  int axis;
  std::vector<double> schedule;
  std::vector<double> probe;
  std::vector<std::vector<double>> sups;         // sups[i][p], +inf where inadmissible
  std::vector<std::vector<BoundedSlab>> slabs;  // per schedule entry
};

namespace detail {

inline double slice_sup_z2(const SeparateOracle& o, double x1) {
  const auto d = o.meta.z2_domain(x1);
  if (!d) return taylor::kInf;
  std::vector<cplx> pts = std::visit(
      [](const auto& v) -> std::vector<cplx> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, geometry::Disc> || std::is_same_v<T, geometry::HalfDisc>)
          return geometry::sample_grid(v, 8);
        else if constexpr (std::is_same_v<T, geometry::Strip>)
          return geometry::sample_grid(v, 8, 4);
        else
          return {};
      },
      *d);
  for (double x2 : linspace(o.meta.omega2.lo, o.meta.omega2.hi, 9)) pts.emplace_back(x2, 0.0);
  double sup = 0.0;
  for (cplx z2 : pts) {
    const double a = std::abs(o(x1, z2));
    if (!std::isfinite(a)) return taylor::kInf;
    sup = std::max(sup, a);
  }
  return sup;
}

inline double slice_sup_z1(const SeparateOracle& o, double x2, double l) {
  if (!(o.meta.eps1(x2) >= 1.0 / l)) return taylor::kInf;
  double sup = 0.0;
  for (double x1 : linspace(o.meta.omega1.lo, o.meta.omega1.hi, 9))
    for (int k = -3; k <= 3; ++k) {
      const double a = std::abs(o(cplx(x1, 0.25 * k / l), x2));
      if (!std::isfinite(a)) return taylor::kInf;
      sup = std::max(sup, a);
    }
  return sup;
}

}  // namespace detail

/// Sets K_l (axis 1: sup over the z2-slice domain at most l) or J_l (axis 2:
/// z1-slices extend to |y1| < 1/l with sup below l) on a probe grid, and
/// their maximal runs as slabs.
inline SlabScan bounded_slab_scan(const SeparateOracle& o, int axis, std::vector<double> schedule,
                                  int points = 41) {
  if (axis != 1 && axis != 2) throw PreconditionError("axis must be 1 or 2");
  if (schedule.empty()) throw PreconditionError("empty l schedule");
  if (points < 3) throw EmptyGridError("slab scan needs at least 3 probe points");
  std::sort(schedule.begin(), schedule.end());
  const Interval om = axis == 1 ? o.meta.omega1 : o.meta.omega2;
  SlabScan r{axis, schedule, detail::linspace(om.lo, om.hi, points), {}, {}};
  const double spacing = om.length() / (points - 1);

  std::vector<double> fixed;
  if (axis == 1)
    for (double x : r.probe) fixed.push_back(detail::slice_sup_z2(o, x));
  double min_sup = taylor::kInf;
  for (double l : schedule) {
    std::vector<double> sups;
    for (std::size_t p = 0; p < r.probe.size(); ++p)
      sups.push_back(axis == 1 ? fixed[p] : detail::slice_sup_z1(o, r.probe[p], l));
    std::vector<BoundedSlab> slabs;
    std::size_t p = 0;
    while (p < sups.size()) {
      if (!(sups[p] <= l)) { min_sup = std::min(min_sup, sups[p]); ++p; continue; }
      std::size_t q = p;
      while (q + 1 < sups.size() && sups[q + 1] <= l) ++q;
      const double lo = std::max(om.lo, r.probe[p] - 0.5 * spacing);
      const double hi = std::min(om.hi, r.probe[q] + 0.5 * spacing);
      slabs.push_back({axis, l, Interval(lo, hi)});
      p = q + 1;
    }
    r.sups.push_back(std::move(sups));
    r.slabs.push_back(std::move(slabs));
  }
  if (r.slabs.back().empty())
    throw ScanFailure("no bounded slab at the largest l", min_sup);
  return r;
}

inline Json to_json(const SlabScan& s) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    Json slabs = Json::array();
    for (const auto& b : s.slabs[i]) slabs.push_back({b.interval.lo, b.interval.hi});
    levels.push_back({{"l", s.schedule[i]}, {"slabs", slabs}});
  }
  return {{"axis", s.axis}, {"levels", levels}};
}

// ---------------------------------------------------------------------------
// Seeding with analytic discs.

struct SeedPoint {
  R2 base;
  std::array<double, 2> lambda;
  C2 center;
  cplx value;
};

struct SeedField {
  double delta;
  std::vector<SeedPoint> points;
  double boundary_sup = 0.0;  // max |f| over all disc boundaries
};

/// Seeding grid with 5 x 5 base points and 3 x 3 lambdas inside the
/// containment bound delta / (1 + sup |T y_j|).
inline SeedGrid default_seed_grid(Mode mode, double delta, const edgewedge::DiscFactory& f) {
  const double b1 = delta / (1.0 + f.conjugate_sup(1));
  const double b2 = delta / (1.0 + f.conjugate_sup(2));
  SeedGrid g;
  g.x1 = detail::linspace(-0.3 * delta, 0.3 * delta, 5);
  g.l1 = {0.0, 0.4 * b1, 0.8 * b1};
  if (mode == Mode::two_sided) {
    g.x2 = detail::linspace(-0.3 * delta, 0.3 * delta, 5);
    g.l2 = {0.0, 0.4 * b2, 0.8 * b2};
  } else {
    // Centers land in the first march chart, |z2 - i delta| < (1 - alpha) delta.
    g.x2 = detail::linspace(-0.05 * delta, 0.05 * delta, 5);
    g.l2 = {0.93 * b2, 0.95 * b2, 0.97 * b2};
  }
  return g;
}

/// Values at the centers of analytic discs whose boundaries lie in
/// (D x I_delta) u (I_delta x D), by the mean of the oracle over the boundary.
inline SeedField seed_quadrant(const SeparateOracle& o, double delta, const SeedGrid& g,
                               int disc_points = 1024, double center_tol = 1e-8, int workers = 1) {
  const edgewedge::DiscFactory factory(edgewedge::default_bump(1, disc_points),
                                       edgewedge::default_bump(2, disc_points),
                                       center_tol);
  struct Item { R2 x; std::array<double, 2> l; };
  std::vector<Item> items;
  for (double x1 : g.x1)
    for (double x2 : g.x2)
      for (double l1 : g.l1)
        for (double l2 : g.l2) items.push_back({{x1, x2}, {l1, l2}});

  SeedField field{delta, std::vector<SeedPoint>(items.size()), 0.0};
  std::vector<double> sups(items.size(), 0.0);
  parallel_for(items.size(), workers, [&](std::size_t i) {
    const auto d = factory.attach(items[i].x, items[i].l);
    const std::size_t m = d.size();
    std::vector<cplx> vals(m);
    for (std::size_t k = 0; k < m; ++k) {
      const C2& p = d.boundary[k];
      const double theta = 2.0 * pi * k / m;
      const bool a = edgewedge::detail::in_half_disc(p.z1, d.lambda[0]) &&
                     edgewedge::detail::in_segment(p.z2, delta);
      const bool b = edgewedge::detail::in_segment(p.z1, delta) &&
                     edgewedge::detail::in_half_disc(p.z2, d.lambda[1]);
      if (!a && !b) throw ContainmentError("disc boundary leaves the seeding union", theta);
      const cplx z1 = a ? p.z1 : cplx(p.z1.real(), 0.0);
      const cplx z2 = a ? cplx(p.z2.real(), 0.0) : p.z2;
      if (!o.defined_at(z1, z2)) throw ContainmentError("oracle undefined on the disc boundary", theta);
      vals[k] = o(z1, z2);
      if (!std::isfinite(vals[k].real()) || !std::isfinite(vals[k].imag()))
        throw ContainmentError("oracle not finite on the disc boundary", theta);
      sups[i] = std::max(sups[i], std::abs(vals[k]));
    }
    field.points[i] = {items[i].x, items[i].l, d.center, edgewedge::extend_at_center(d, vals)};
  });
  for (double s : sups) field.boundary_sup = std::max(field.boundary_sup, s);
  return field;
}


// ---------------------------------------------------------------------------
// Charts.

/// A z2-power series around `center` whose coefficients are piecewise
/// Chebyshev expansions in z1 over panels of the real extent, stored by their
/// values at the panel nodes. Valid on {|Im z1| < height, Re z1 in extent} x
/// {|z2 - center| < radius}.
struct Chart {
  int id = 0;
  int step = 0;
  cplx center;
  double radius = 0.0;
  double quad_radius = 0.0;
  double height = 0.0;
  std::vector<chebyshev::Grid> panels;
  std::vector<std::vector<cplx>> coeffs;  // coeffs[k][nu], k panel-major
  double noise_level = 0.0;
  Json certificate;

  int order() const { return coeffs.empty() ? -1 : static_cast<int>(coeffs[0].size()) - 1; }
  double lo() const { return panels.front().a; }
  double hi() const { return panels.back().b; }

  bool contains(const C2& z) const {
    return std::abs(z.z1.imag()) < height && lo() < z.z1.real() && z.z1.real() < hi() &&
           std::abs(z.z2 - center) < radius;
  }

  /// Per panel and nu, the expansion of the node values chopped after the
  /// last term above four times the coefficient noise floor.
  void prepare() {
    expansion_.assign(panels.size(), {});
    length_.assign(panels.size(), {});
    max_length_.assign(panels.size(), 0);
    std::size_t k0 = 0;
    for (std::size_t p = 0; p < panels.size(); ++p) {
      const std::size_t n = panels[p].size();
      for (int nu = 0; nu <= order(); ++nu) {
        std::vector<cplx> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = coeffs[k0 + k][nu];
        auto c = chebyshev::coefficients(panels[p], v);
        const double floor = 4.0 * noise_level / std::pow(quad_radius, nu);
        std::size_t len = c.size();
        while (len > 0 && !(std::abs(c[len - 1]) > floor)) --len;
        expansion_[p].push_back(std::move(c));
        length_[p].push_back(len);
        max_length_[p] = std::max(max_length_[p], len);
      }
      k0 += n;
    }
  }

  /// Coefficients at complex z1. The noise floor is scaled by twice the sum
  /// of |T_m| over the retained terms.
  taylor::TaylorSeries series_at(cplx z1) const {
    const double u = (z1.real() - lo()) / (hi() - lo()) * static_cast<double>(panels.size());
    const std::size_t p = std::min(panels.size() - 1, static_cast<std::size_t>(std::max(0.0, u)));
    const cplx t = chebyshev::to_unit(panels[p], z1);
    taylor::TaylorSeries s{center, std::vector<cplx>(order() + 1), std::nullopt, quad_radius, 0.0};
    for (int nu = 0; nu <= order(); ++nu) s.coeffs[nu] = chebyshev::clenshaw(expansion_[p][nu], length_[p][nu], t);
    s.noise_level = 2.0 * noise_level * std::max(1.0, chebyshev::abs_sum(max_length_[p], t));
    return s;
  }

  taylor::Evaluation evaluate(const C2& z) const {
    if (!contains(z)) throw CoverageError("point outside chart " + std::to_string(id));
    return taylor::evaluate(series_at(z.z1), z.z2);
  }

 private:
  std::vector<std::vector<std::vector<cplx>>> expansion_;
  std::vector<std::vector<std::size_t>> length_;
  std::vector<std::size_t> max_length_;
};

namespace detail {
inline std::vector<chebyshev::Grid> make_panels(const Interval& extent, int panels, int nodes) {
  std::vector<chebyshev::Grid> g;
  for (int p = 0; p < panels; ++p)
    g.push_back(chebyshev::first_kind(nodes, extent.lo + extent.length() * p / panels,
                                      extent.lo + extent.length() * (p + 1) / panels));
  return g;
}
}  // namespace detail

/// Real-slice coefficients at the panel nodes of `extent`, extracted on a
/// circle of 0.8 times the smallest slice room around `center`.
inline Chart build_chart(const SeparateOracle& o, int step, cplx center, double radius,
                         const Interval& extent, int panels, int nodes, int order, int workers) {
  Chart c;
  c.step = c.id = step;
  c.center = center;
  c.radius = radius;
  c.panels = detail::make_panels(extent, panels, nodes);
  std::vector<double> xs;
  for (const auto& g : c.panels) xs.insert(xs.end(), g.nodes.begin(), g.nodes.end());
  double room = taylor::kInf, where = 0.0;
  for (double x : xs) {
    const double r = o.slice_room(x, center);
    if (r < room) { room = r; where = x; }
  }
  c.quad_radius = 0.8 * room;
  if (!(c.quad_radius > radius))
    throw NonExtendibleError("slice room " + std::to_string(room) + " at x1 = " + std::to_string(where) +
                                 " does not cover the chart radius " + std::to_string(radius),
                             where);
  c.coeffs.resize(xs.size());
  std::vector<double> noise(xs.size());
  parallel_for(xs.size(), workers, [&](std::size_t k) {
    const double x = xs[k];
    const auto s = taylor::coeffs_from_oracle([&](cplx z) { return o(x, z); }, center, c.quad_radius, order);
    c.coeffs[k] = s.coeffs;
    noise[k] = s.noise_level;
  });
  c.noise_level = *std::max_element(noise.begin(), noise.end());
  for (auto& node : c.coeffs)
    for (std::size_t nu = 0; nu < node.size(); ++nu)
      if (!(std::abs(node[nu]) > c.noise_level / std::pow(c.quad_radius, static_cast<double>(nu)))) node[nu] = 0.0;
  c.prepare();
  return c;
}

inline Json to_json(const Chart& c) {
  Json coeffs = Json::array();
  for (const auto& node : c.coeffs) {
    Json row = Json::array();
    std::size_t len = node.size();
    while (len > 0 && node[len - 1] == cplx(0.0)) --len;
    for (std::size_t nu = 0; nu < len; ++nu) row.push_back(detail::cjson(node[nu]));
    coeffs.push_back(std::move(row));
  }
  return {{"id", c.id},
          {"step", c.step},
          {"center", detail::cjson(c.center)},
          {"radius", c.radius},
          {"quad_radius", c.quad_radius},
          {"height", c.height},
          {"extent", {c.lo(), c.hi()}},
          {"panels", c.panels.size()},
          {"nodes", c.panels.front().size()},
          {"order", c.order()},
          {"noise_level", c.noise_level},
          {"certificate", c.certificate},
          {"coeffs", coeffs}};
}

inline Chart chart_from_json(const Json& j) {
  Chart c;
  c.id = j.at("id");
  c.step = j.at("step");
  c.center = detail::jcplx(j.at("center"));
  c.radius = j.at("radius");
  c.quad_radius = j.at("quad_radius");
  c.height = j.at("height");
  c.panels = detail::make_panels(Interval(j.at("extent")[0], j.at("extent")[1]), j.at("panels"), j.at("nodes"));
  c.noise_level = j.at("noise_level");
  c.certificate = j.at("certificate");
  const int order = j.at("order");
  for (const auto& row : j.at("coeffs")) {
    std::vector<cplx> node;
    for (const auto& a : row) node.push_back(detail::jcplx(a));
    if (node.size() > static_cast<std::size_t>(order) + 1) throw ConfigError("chart row longer than its order");
    node.resize(static_cast<std::size_t>(order) + 1, cplx(0.0));
    c.coeffs.push_back(std::move(node));
  }
  if (c.coeffs.size() != c.panels.size() * c.panels.front().size())
    throw ConfigError("chart coefficient rows do not match its nodes");
  c.prepare();
  return c;
}

// ---------------------------------------------------------------------------
// Hartogs steps.

struct StepCertificate {
  bool pass = false;
  double kappa = 0.0;
  Json record;
};

/// Largest height eps with alpha/2 + l kappa eps <= -log(1 - alpha): below it
/// the certified coefficient bound keeps the series convergent on the radius
/// shrunk by the factor 1 - alpha.
inline double step_height(double alpha, double l, double kappa) {
  return (-std::log1p(-alpha) - 0.5 * alpha) / (l * kappa);
}

/// Runs the Hartogs verifier on psi_nu = (1/nu) log|a_nu(z1)| + shift over the
/// strip of height `strip_height` above the chart extent, and on its mirror
/// image below it. Coefficients under the noise floor count as zeros.
inline StepCertificate certify_chart(const Chart& c, double strip_height, double l, double alpha_h,
                                     double shift, const ContinuationJob& job, int workers) {
  const Strip strip(Interval(c.lo(), c.hi()), strip_height, Side::upper);
  const auto grid = harmonic::hartogs_grid(strip, job.grids.hartogs_nx, job.grids.hartogs_ny);
  StepCertificate out;
  out.kappa = harmonic::domain_kappa(strip, job.grids.kappa_resolution);
  out.record = {{"strip_height", strip_height}, {"l", l}, {"alpha", alpha_h}, {"shift", shift},
                {"kappa", out.kappa}};
  out.pass = true;
  const int n = c.order();
  for (const bool upper : {true, false}) {
    std::vector<taylor::TaylorSeries> fields(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t j) {
      fields[j] = c.series_at(upper ? grid[j] : std::conj(grid[j]));
    });
    auto seq = taylor::phi_sequence(fields, grid, 1, n);
    double sup = l;
    for (int nu = 1; nu <= n; ++nu)
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double& v = seq.values[nu - 1][j];
        v = fields[j].usable(nu) ? v + shift : taylor::kNegInf;
        if (std::isfinite(v)) sup = std::max(sup, v);
      }
    const harmonic::HartogsHypotheses hyp{l, sup, alpha_h, 0.25 * strip_height, 0.25, job.tol.hartogs};
    const char* side = upper ? "upper" : "lower";
    try {
      const auto cert = harmonic::verify_hartogs(seq, strip, hyp, out.kappa);
      out.record[side] = harmonic::to_json(cert);
      out.pass = out.pass && cert.pass;
    } catch (const HypothesisViolation& e) {
      out.record[side] = {{"violation", e.clause()}, {"message", e.what()}};
      out.pass = false;
    }
  }
  out.record["pass"] = out.pass;
  return out;
}

// ---------------------------------------------------------------------------
// Atlases.

struct ExtensionAtlas {
  Json job;
  Mode mode = Mode::two_sided;
  std::vector<Chart> charts;
  bool complete = true;
  Json failures = Json::array();
  Json diagnostics = Json::object();
};

struct ExtensionValue {
  cplx value;
  int chart_id;
  double tail_bound;
};

namespace detail {

inline const Chart* pick_chart(const std::vector<const ExtensionAtlas*>& atlases, const C2& z) {
  const Chart* best = nullptr;
  double best_d = taylor::kInf;
  for (const auto* a : atlases)
    for (const auto& c : a->charts)
      if (c.contains(z)) {
        const double d = std::abs(z.z2 - c.center) / c.radius;
        if (d < best_d) { best_d = d; best = &c; }
      }
  return best;
}

}  // namespace detail

/// Value of the extension at z from the containing chart whose z2-center is
/// nearest, relative to its radius.
inline ExtensionValue evaluate_extension(const std::vector<const ExtensionAtlas*>& atlases, const C2& z) {
  const Chart* c = detail::pick_chart(atlases, z);
  if (!c) {
    double nearest = taylor::kInf;
    int id = -1;
    for (const auto* a : atlases)
      for (const auto& ch : a->charts) {
        const double d = std::abs(z.z2 - ch.center) - ch.radius;
        if (d < nearest) { nearest = d; id = ch.id; }
      }
    throw CoverageError("no chart contains (" + std::to_string(z.z1.real()) + "+" +
                        std::to_string(z.z1.imag()) + "i, " + std::to_string(z.z2.real()) + "+" +
                        std::to_string(z.z2.imag()) + "i); nearest chart " + std::to_string(id));
  }
  const auto e = c->evaluate(z);
  return {e.value, c->id, e.tail_bound};
}

inline ExtensionValue evaluate_extension(const ExtensionAtlas& a, const C2& z) {
  return evaluate_extension(std::vector<const ExtensionAtlas*>{&a}, z);
}

namespace detail {

/// Largest relative gap between seed values and the chart at seed centers
/// inside the chart.
inline Json seed_agreement(const Chart& c, const SeedField& seed, double tol) {
  double worst = 0.0;
  int compared = 0;
  for (const auto& p : seed.points) {
    if (!c.contains(p.center)) continue;
    const cplx v = c.evaluate(p.center).value;
    worst = std::max(worst, std::abs(v - p.value) / (1.0 + std::abs(p.value)));
    ++compared;
  }
  return {{"points", seed.points.size()}, {"compared", compared}, {"max_relative_gap", worst},
          {"within_tolerance", worst <= tol}, {"boundary_sup", seed.boundary_sup}};
}

inline Json scan_record(const SeparateOracle& o, int points) {
  try {
    return to_json(bounded_slab_scan(o, 1, {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024}, points));
  } catch (const ScanFailure& e) {
    return {{"axis", 1}, {"failure", e.what()}, {"sup", e.sup()}};
  }
}

/// Radius probe toward the node where the slice room is smallest.
inline void throw_non_extendible(const SeparateOracle& o, const NonExtendibleError& e) {
  const double x = e.location();
  const double dir = x > 0.5 ? -1.0 : 1.0;
  std::vector<R2> path;
  for (double d : {0.4, 0.2, 0.1, 0.05}) path.push_back({x + dir * d, 0.0});
  const auto probe = gallery::radius_collapse_probe(o, 2, path);
  if (probe.collapsing)
    throw NonExtendibleError("slice radii collapse toward x1 = " + std::to_string(x) + ": " +
                                 gallery::to_json(probe).dump(),
                             x);
  throw e;
}

}  // namespace detail

/// One chart over U_eps x Delta_{1-alpha} from real-slice coefficients around
/// 0, certified on the seeding strip of height delta with l = -log delta.
inline ExtensionAtlas two_sided_fill(const ContinuationJob& job, int workers = 1) {
  job.validate();
  if (job.mode != Mode::two_sided) throw PreconditionError("two_sided_fill needs mode two_sided");
  const auto o = gallery::oracle(job.oracle, job.oracle_params);
  ExtensionAtlas atlas;
  atlas.job = to_json(job);
  atlas.mode = job.mode;
  atlas.diagnostics["slabs"] = detail::scan_record(o, job.grids.slab_points);

  Chart chart;
  try {
    chart = build_chart(o, 0, 0.0, 1.0 - job.alpha, o.meta.omega1, job.grids.panels, job.grids.cheb_nodes,
                        job.n_coeffs, workers);
  } catch (const NonExtendibleError& e) {
    detail::throw_non_extendible(o, e);
  }
  const edgewedge::DiscFactory factory(job.grids.disc_points);
  const SeedGrid sg = job.seed ? *job.seed : default_seed_grid(job.mode, job.delta, factory);
  const auto seed = seed_quadrant(o, job.delta, sg, job.grids.disc_points, job.tol.center, workers);
  const double l = -std::log(job.delta);
  const auto cert = certify_chart(chart, job.delta, l, 0.5 * job.alpha, 0.0, job, workers);
  chart.certificate = cert.record;
  if (!cert.pass) throw AtlasError("Hartogs certificate failed", cert.record.dump());
  chart.height = step_height(job.alpha, l, cert.kappa);
  atlas.diagnostics["seed"] = detail::seed_agreement(chart, seed, job.tol.agreement);
  atlas.charts.push_back(std::move(chart));
  return atlas;
}

namespace detail {

/// Largest h <= delta such that the coefficient radius at every edge-row
/// point x +- ih stays >= delta.
inline double seed_height(const Chart& c, double delta) {
  const auto xs = linspace(0.9 * c.lo() + 0.1 * c.hi(), 0.1 * c.lo() + 0.9 * c.hi(), 21);
  auto ok = [&](double h) {
    for (double x : xs)
      for (double s : {1.0, -1.0})
        if (taylor::radius_or_inf(c.series_at(cplx(x, s * h))) < delta) return false;
    return true;
  };
  if (ok(delta)) return delta;
  double lo = 1e-6 * delta, hi = delta;
  if (!ok(lo)) throw NonExtendibleError("seed strip is empty", 0.0);
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

namespace detail {

/// Compares every pair of charts whose z2-discs meet on a lens-shaped sample
/// set; throws AtlasError with the worst sample above `tol`.
inline Json overlap_check(const ExtensionAtlas& a, double tol, int workers) {
  struct Pair { std::size_t i, j; };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < a.charts.size(); ++i)
    for (std::size_t j = i + 1; j < a.charts.size(); ++j)
      if (std::abs(a.charts[i].center - a.charts[j].center) < 0.98 * (a.charts[i].radius + a.charts[j].radius))
        pairs.push_back({i, j});
  struct Worst { double rel = -1.0; C2 z{}; cplx fa{}, fb{}; long count = 0; };
  std::vector<Worst> worst(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t p) {
    const Chart& A = a.charts[pairs[p].i];
    const Chart& B = a.charts[pairs[p].j];
    const double d = std::abs(B.center - A.center);
    const cplx u = d > 0 ? (B.center - A.center) / d : cplx(1.0);
    const double t0 = 0.5 * (d - B.radius + A.radius);
    const double half = A.radius - t0;
    const double h = std::min(A.height, B.height);
    Worst& w = worst[p];
    for (double tf : {-0.6, -0.3, 0.0, 0.3, 0.6}) {
      const double t = t0 + tf * half;
      const double chord = std::min(std::sqrt(std::max(0.0, A.radius * A.radius - t * t)),
                                    std::sqrt(std::max(0.0, B.radius * B.radius - (d - t) * (d - t))));
      for (double sf : {-0.5, 0.0, 0.5}) {
        const cplx z2 = A.center + u * cplx(t, sf * chord);
        for (double x : linspace(0.9 * A.lo(), 0.9 * A.hi(), 7))
          for (double yf : {-0.5, 0.0, 0.5}) {
            const C2 z{cplx(x, yf * h), z2};
            if (!A.contains(z) || !B.contains(z)) continue;
            const cplx fa = A.evaluate(z).value, fb = B.evaluate(z).value;
            const double rel = std::abs(fa - fb) / (1.0 + std::max(std::abs(fa), std::abs(fb)));
            ++w.count;
            if (rel > w.rel) w = {rel, z, fa, fb, w.count};
          }
      }
    }
  });
  double rel = 0.0;
  long count = 0;
  Json sample;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    count += worst[p].count;
    if (worst[p].rel > rel) {
      rel = worst[p].rel;
      const auto& w = worst[p];
      sample = {{"charts", {a.charts[pairs[p].i].id, a.charts[pairs[p].j].id}},
                {"z1", cjson(w.z.z1)}, {"z2", cjson(w.z.z2)},
                {"F_a", cjson(w.fa)}, {"F_b", cjson(w.fb)}, {"relative_gap", w.rel}};
    }
  }
  Json out{{"pairs", pairs.size()}, {"samples", count}, {"worst_relative_gap", rel}, {"worst_sample", sample}};
  if (rel > tol) throw AtlasError("chart overlap disagreement above tolerance", out.dump());
  return out;
}

/// Neighboring charts against each other's series recentered onto their own
/// center, on the first coefficients scaled by sigma^mu.
inline double recenter_agreement(const ExtensionAtlas& a, double sigma) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < a.charts.size(); ++i) {
    const Chart& A = a.charts[i];
    const Chart& B = a.charts[i + 1];
    if (B.step != A.step + 1) continue;
    const std::size_t n = A.coeffs.size();
    for (std::size_t k : {std::size_t{0}, n / 4, n / 2, 3 * n / 4}) {
      const taylor::TaylorSeries s{A.center, A.coeffs[k], std::nullopt, A.quad_radius, A.noise_level};
      try {
        const auto r = taylor::recenter(s, B.center);
        double scale = 1.0;
        for (int mu = 0; mu <= std::min(8, B.order()); ++mu) {
          worst = std::max(worst, std::abs(r.coeffs[mu] - B.coeffs[k][mu]) * scale /
                                      (1.0 + std::abs(B.coeffs[k][0])));
          scale *= sigma;
        }
      } catch (const Error&) {
        worst = taylor::kInf;
      }
    }
  }
  return worst;
}

}  // namespace detail

/// Charts centered at j (delta' - sigma) + i delta, delta' = (1 - alpha) delta,
/// for |j| <= N with N (delta' - sigma) past the edge. Step j is certified on
/// the strip of the previous step with psi = phi + log delta, l = -log sigma
/// and alpha/2, and its own strip height follows from the certified kappa.
inline ExtensionAtlas march(const ContinuationJob& job, int workers = 1) {
  job.validate();
  if (job.mode != Mode::one_sided_up) throw PreconditionError("march needs mode one_sided_up");
  if (!(job.sigma <= job.delta / 8)) throw PreconditionError("march needs sigma <= delta / 8");
  const double rad = (1.0 - job.alpha) * job.delta;
  const double stride = rad - job.sigma;
  if (!(stride > 0)) throw PreconditionError("march needs (1 - alpha) delta > sigma");
  const auto o = gallery::oracle(job.oracle, job.oracle_params);
  const double mid = o.meta.omega2.mid(), half = 0.5 * o.meta.omega2.length();
  const int n_steps = static_cast<int>(std::floor(half / stride)) + 1;

  ExtensionAtlas atlas;
  atlas.job = to_json(job);
  atlas.mode = job.mode;
  atlas.diagnostics["slabs"] = detail::scan_record(o, job.grids.slab_points);
  atlas.diagnostics["steps"] = n_steps;
  const edgewedge::DiscFactory factory(job.grids.disc_points);
  const SeedGrid sg = job.seed ? *job.seed : default_seed_grid(job.mode, job.delta, factory);
  const auto seed = seed_quadrant(o, job.delta, sg, job.grids.disc_points, job.tol.center, workers);

  const double l = -std::log(job.sigma), shift = std::log(job.delta), ah = 0.5 * job.alpha;
  auto build = [&](int j) {
    return build_chart(o, j, cplx(mid + j * stride, job.delta), rad, o.meta.omega1, job.grids.panels,
                       job.grids.cheb_nodes, job.n_coeffs, workers);
  };
  Chart c0;
  try {
    c0 = build(0);
  } catch (const NonExtendibleError& e) {
    detail::throw_non_extendible(o, e);
  }
  const double h0 = detail::seed_height(c0, job.delta);
  const auto cert0 = certify_chart(c0, h0, l, ah, shift, job, workers);
  c0.certificate = cert0.record;
  c0.height = h0;
  if (!cert0.pass) {
    atlas.failures.push_back({{"step", 0}, {"certificate", cert0.record}});
    atlas.complete = false;
  }
  atlas.diagnostics["seed"] = detail::seed_agreement(c0, seed, job.tol.agreement);
  std::vector<Chart> charts{c0};
  for (const int dir : {1, -1}) {
    double prev = h0;
    for (int m = 1; m <= n_steps; ++m) {
      const int j = dir * m;
      Chart c;
      try {
        c = build(j);
      } catch (const NonExtendibleError& e) {
        atlas.failures.push_back({{"step", j}, {"reason", e.what()}, {"location", e.location()}});
        atlas.complete = false;
        break;
      }
      const auto cert = certify_chart(c, prev, l, ah, shift, job, workers);
      c.certificate = cert.record;
      if (!cert.pass) {
        atlas.failures.push_back({{"step", j}, {"certificate", cert.record}});
        atlas.complete = false;
        break;
      }
      c.height = step_height(job.alpha, l, cert.kappa);
      prev = c.height;
      charts.push_back(std::move(c));
    }
  }
  std::sort(charts.begin(), charts.end(), [](const Chart& a, const Chart& b) { return a.step < b.step; });
  for (std::size_t i = 0; i < charts.size(); ++i) charts[i].id = static_cast<int>(i);
  atlas.charts = std::move(charts);
  atlas.diagnostics["overlap"] = detail::overlap_check(atlas, job.tol.agreement, workers);
  atlas.diagnostics["recenter_gap"] = detail::recenter_agreement(atlas, job.sigma);
  return atlas;
}

inline ExtensionAtlas run(const ContinuationJob& job, int workers = 1) {
  return job.mode == Mode::two_sided ? two_sided_fill(job, workers) : march(job, workers);
}

inline Json to_json(const ExtensionAtlas& a) {
  Json charts = Json::array();
  for (const auto& c : a.charts) charts.push_back(to_json(c));
  return {{"job", a.job},           {"mode", to_string(a.mode)},     {"complete", a.complete},
          {"failures", a.failures}, {"diagnostics", a.diagnostics}, {"charts", charts}};
}

inline ExtensionAtlas atlas_from_json(const Json& j) {
  ExtensionAtlas a;
  a.job = j.at("job");
  a.mode = mode_from_string(j.at("mode"));
  a.complete = j.at("complete");
  a.failures = j.at("failures");
  a.diagnostics = j.at("diagnostics");
  for (const auto& c : j.at("charts")) a.charts.push_back(chart_from_json(c));
  return a;
}

// ---------------------------------------------------------------------------
// Wedge assembly.

struct WedgeFit {
  geometry::Wedge wedge;
  double y_floor;  // samples start at this height
  long samples;
  std::string label;
};

inline Json to_json(const WedgeFit& w) {
  return {{"wedge", geometry::to_json(geometry::Domain(w.wedge))},
          {"y_floor", w.y_floor},
          {"samples", w.samples},
          {"label", w.label}};
}

/// Fits a truncated wedge with axis (0, 1) over the edge (-0.9, 0.9)^2 inside
/// the union of one-sided atlases. A march with step delta covers every x2 of
/// the edge for Im z2 in delta +- sqrt(delta'^2 - stride^2/4); epsilon is the
/// top of the connected union of these bands, the aperture is the largest one
/// whose sampled directions stay inside the charts, by bisection.
inline WedgeFit assemble_wedge(const std::vector<const ExtensionAtlas*>& atlases) {
  if (atlases.size() < 2) throw PreconditionError("a wedge needs at least two atlases");
  std::vector<std::pair<double, double>> bands;
  for (const auto* a : atlases) {
    if (a->mode != Mode::one_sided_up) throw PreconditionError("wedge assembly needs one-sided atlases");
    const double d = a->job.at("delta"), s = a->job.at("sigma"), al = a->job.at("alpha");
    const double rad = (1 - al) * d, stride = rad - s;
    const double w = std::sqrt(rad * rad - 0.25 * stride * stride);
    bands.emplace_back(d - w, d + w);
  }
  std::sort(bands.begin(), bands.end());
  double top = bands[0].second;
  for (std::size_t i = 1; i < bands.size() && bands[i].first < top; ++i) top = std::max(top, bands[i].second);
  const double y_lo = 1.01 * bands[0].first, y_hi = 0.99 * top;
  const Interval edge(-0.9, 0.9);
  const auto xs = detail::linspace(-0.85, 0.85, 5);
  long samples = 0;
  auto covered = [&](double ap) {
    for (double phi : {0.0, 0.5 * ap, -0.5 * ap, ap, -ap}) {
      const double r0 = y_lo / std::cos(ap);
      for (int k = 0; k < 8; ++k) {
        const double rho = r0 * std::pow(y_hi / r0, k / 7.0);
        for (double x1 : xs)
          for (double x2 : xs) {
            ++samples;
            const C2 z{cplx(x1, rho * std::sin(phi)), cplx(x2, rho * std::cos(phi))};
            if (!detail::pick_chart(atlases, z)) return false;
          }
      }
    }
    return true;
  };
  double lo = std::log(1e-300), hi = std::log(1.5);
  if (!(y_lo < y_hi) || !covered(std::exp(lo)))
    throw PreconditionError("degenerate wedge: the atlases do not cover the edge directions");
  if (covered(std::exp(hi))) lo = hi;
  for (int it = 0; it < 60 && lo < hi; ++it) {
    const double m = 0.5 * (lo + hi);
    (covered(std::exp(m)) ? lo : hi) = m;
  }
  return {geometry::Wedge(edge, edge, geometry::Cone({0.0, 1.0}, std::exp(lo)), y_hi), y_lo, samples,
          "pre-Kashiwara fitted cone"};
}

struct EdgeLimit {
  std::vector<double> ys;
  std::vector<double> gaps;  // sup over the real grid of |F(x + i y axis) - f(x)|
  bool decreasing;
};

inline EdgeLimit edge_limit(const std::vector<const ExtensionAtlas*>& atlases, const SeparateOracle& o,
                            const WedgeFit& w, const std::vector<double>& ys, int n = 10) {
  EdgeLimit r{ys, {}, true};
  const R2 ax = w.wedge.cone.axis;
  const auto x1s = detail::linspace(0.95 * w.wedge.edge1.lo, 0.95 * w.wedge.edge1.hi, n);
  const auto x2s = detail::linspace(0.95 * w.wedge.edge2.lo, 0.95 * w.wedge.edge2.hi, n);
  for (double y : ys) {
    double gap = 0.0;
    for (double x1 : x1s)
      for (double x2 : x2s) {
        const C2 z{cplx(x1, y * ax.x1), cplx(x2, y * ax.x2)};
        if (!w.wedge.contains(z)) throw PreconditionError("edge-limit point outside the wedge");
        gap = std::max(gap, std::abs(evaluate_extension(atlases, z).value - o(x1, x2)));
      }
    if (!r.gaps.empty() && !(gap < r.gaps.back())) r.decreasing = false;
    r.gaps.push_back(gap);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Traces.

/// Per chart: z1 in {-0.5, 0, 0.5} + i height/2 against four points on half
/// the chart radius.
inline std::vector<C2> trace_points(const ExtensionAtlas& a) {
  std::vector<C2> pts;
  for (const auto& c : a.charts)
    for (double x : {-0.5, 0.0, 0.5})
      for (int k = 0; k < 4; ++k)
        pts.push_back({cplx(x, 0.5 * c.height), c.center + std::polar(0.5 * c.radius, 0.5 * pi * k)});
  return pts;
}

/// CSV with columns z1_re, z1_im, z2_re, z2_im, F_re, F_im, chart_id, tail_bound.
inline void write_trace(std::ostream& os, const ExtensionAtlas& a, const std::vector<C2>& pts) {
  os << "z1_re,z1_im,z2_re,z2_im,F_re,F_im,chart_id,tail_bound\n";
  os.precision(17);
  for (const auto& p : pts) {
    os << p.z1.real() << ',' << p.z1.imag() << ',' << p.z2.real() << ',' << p.z2.imag() << ',';
    try {
      const auto v = evaluate_extension(a, p);
      os << v.value.real() << ',' << v.value.imag() << ',' << v.chart_id << ',' << v.tail_bound << '\n';
    } catch (const CoverageError&) {
      os << "nan,nan,-1,nan\n";
    }
  }
}

}  // namespace crext::continuation
