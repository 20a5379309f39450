// Built-in oracles with known structure, and probes that detect the two ways
// separate analyticity can fail to give a wedge extension: growth faster than
// any power of 1/y, and slice radii collapsing to zero.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crext/errors.hpp"
#include "crext/geometry.hpp"
#include "crext/oracle.hpp"
#include "crext/taylor.hpp"

namespace crext::gallery {

using geometry::Disc;
using geometry::Domain;
using geometry::Interval;
using geometry::Side;
using geometry::Strip;

namespace detail {
inline double param(const Json& p, const char* key, double dflt) {
  if (!p.is_object() || !p.contains(key)) return dflt;
  return p.at(key).get<double>();
}
inline void reject_unknown(const Json& p, std::initializer_list<const char*> allowed) {
  if (p.is_null()) return;
  if (!p.is_object()) throw ConfigError("oracle params must be an object");
  for (const auto& [k, v] : p.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      throw ConfigError("unknown oracle parameter '" + k + "'");
}
}  // namespace detail

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"good2s", "entire", "onesided", "cordaro", "flat"};
  return n;
}

/// The registered oracle `name`. Parameters:
///   good2s   {"shift": 3}     1/(shift - z1 - z2)
///   onesided {"height": 0.5}  1/(z2 - z1 - i height)
inline SeparateOracle oracle(const std::string& name, const Json& params = Json()) {
  SeparateOracle o;
  o.name = name;
  if (name == "good2s") {
    detail::reject_unknown(params, {"shift"});
    const double a = detail::param(params, "shift", 3.0);
    if (!(a > 2.0)) throw ConfigError("good2s needs shift > 2");
    o.params = {{"shift", a}};
    o.formula = "1/(shift - z1 - z2)";
    o.eval = [a](cplx z1, cplx z2) { return 1.0 / (a - z1 - z2); };
    // Over |x1| <= 1 the pole sheet z2 = shift - x1 stays at distance >= shift - 1.
    const double r = 0.625 * (a - 1.0);
    o.meta.eps1 = [r](double) { return r; };
    o.meta.z2_domain = [r](double) -> std::optional<Domain> { return Disc(0.0, r); };
    o.meta.expected = Expected::two_sided;
    return o;
  }
  if (name == "entire") {
    detail::reject_unknown(params, {});
    o.params = Json::object();
    o.formula = "exp(z1 z2)";
    o.eval = [](cplx z1, cplx z2) { return std::exp(z1 * z2); };
    o.meta.eps1 = [](double) { return 2.0; };
    o.meta.z2_domain = [](double) -> std::optional<Domain> { return Disc(0.0, 2.0); };
    o.meta.expected = Expected::two_sided;
    return o;
  }
  if (name == "onesided") {
    detail::reject_unknown(params, {"height"});
    const double h = detail::param(params, "height", 0.5);
    if (!(h > 0)) throw ConfigError("onesided needs height > 0");
    o.params = {{"height", h}};
    o.formula = "1/(z2 - z1 - i height)";
    o.eval = [h](cplx z1, cplx z2) { return 1.0 / (z2 - z1 - cplx(0.0, h)); };
    // Slices extend upward to just below the pole sheet; the declared domain
    // is the one-sided strip.
    o.meta.eps1 = [h](double) { return 0.9 * h; };
    o.meta.z2_domain = [h](double) -> std::optional<Domain> {
      return Strip(Interval(-1.5, 1.5), 0.9 * h, Side::upper);
    };
    o.meta.expected = Expected::one_sided_up;
    return o;
  }
  if (name == "cordaro") {
    detail::reject_unknown(params, {});
    o.params = Json::object();
    o.formula = "x1 sin(x2/x1), 0 on x1 = 0";
    o.eval = [](cplx z1, cplx z2) -> cplx {
      if (z1 == 0.0) return 0.0;
      return z1 * std::sin(z2 / z1);
    };
    // Every z2-slice is entire; z1-slices are singular at x1 = 0.
    o.meta.eps1 = [](double) { return 0.0; };
    o.meta.z2_domain = [](double) -> std::optional<Domain> { return Disc(0.0, 2.0); };
    o.meta.expected = Expected::not_tempered;
    return o;
  }
  if (name == "flat") {
    detail::reject_unknown(params, {});
    o.params = Json::object();
    o.formula = "x1 x2 exp(-1/(x1^2 + x2^2)), 0 at the origin";
    o.eval = [](cplx z1, cplx z2) -> cplx {
      const cplx q = z1 * z1 + z2 * z2;
      if (z1 == 0.0 && z2 == 0.0) return 0.0;
      if (q == 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
      return z1 * z2 * std::exp(-1.0 / q);
    };
    // The slice through x1 is singular at z2 = +-i x1.
    o.meta.eps1 = [](double x2) { return std::abs(x2); };
    o.meta.z2_domain = [](double x1) -> std::optional<Domain> {
      if (x1 == 0.0) return Disc(0.0, 2.0);  // the zero slice
      return Disc(0.0, std::abs(x1));
    };
    o.meta.expected = Expected::not_cr_extendible;
    return o;
  }
  throw ConfigError("unknown oracle '" + name + "'");
}

inline Json describe(const SeparateOracle& o) {
  return {{"name", o.name},
          {"formula", o.formula},
          {"params", o.params},
          {"expected", to_string(o.meta.expected)},
          {"continuous", o.meta.continuous},
          {"omega", {{o.meta.omega1.lo, o.meta.omega1.hi}, {o.meta.omega2.lo, o.meta.omega2.hi}}}};
}

inline Json list() {
  Json out = Json::array();
  for (const auto& n : names()) out.push_back(describe(oracle(n)));
  return out;
}

// ---------------------------------------------------------------------------
// Temperedness.

struct TemperednessSample {
  int nu;
  double y;          // 1/nu
  double log_abs_f;  // log |f(1/nu^2, x2 + i/nu)|
  double slope;      // d log|f| / d log(1/y) from the previous sample
  int min_k;         // smallest k with |f| <= y^-k at this sample
};

struct TemperednessReport {
  double x2;
  std::vector<TemperednessSample> samples;
  int fitted_k;  // sup of min_k when tempered
  bool tempered;
  std::string verdict;  // "tempered" | "not_tempered"
};

inline Json to_json(const TemperednessReport& r) {
  Json s = Json::array();
  for (const auto& p : r.samples)
    s.push_back({{"nu", p.nu}, {"y", p.y}, {"log_abs_f", p.log_abs_f}, {"slope", p.slope}, {"min_k", p.min_k}});
  return {{"x2", r.x2}, {"samples", s}, {"fitted_k", r.fitted_k}, {"tempered", r.tempered}, {"verdict", r.verdict}};
}

/// Growth of |f| along (1/nu^2, x2 + i/nu), nu = 2..nu_max, against powers
/// of 1/y. The local slope of log|f| against log(1/y) bounds the order of a
/// power law; the sequence is not tempered when the slopes over the last
/// quarter keep increasing and end above k_max.
inline TemperednessReport temperedness_probe(const SeparateOracle& o, double x2, int k_max = 8,
                                             int nu_max = 30) {
  if (nu_max < 8) throw PreconditionError("temperedness probe needs nu_max >= 8");
  TemperednessReport r{x2, {}, 0, true, "tempered"};
  double prev = 0.0;
  for (int nu = 2; nu <= nu_max; ++nu) {
    const double y = 1.0 / nu;
    const cplx v = o(cplx(1.0 / (nu * static_cast<double>(nu)), 0.0), cplx(x2, y));
    const double lf = std::log(std::abs(v));
    const double slope = nu == 2 ? 0.0 : (lf - prev) / (std::log(nu) - std::log(nu - 1.0));
    const int min_k = std::max(0, static_cast<int>(std::ceil(lf / std::log(static_cast<double>(nu)) - 1e-12)));
    r.samples.push_back({nu, y, lf, slope, min_k});
    prev = lf;
  }
  const std::size_t n = r.samples.size();
  const std::size_t from = n - std::max<std::size_t>(3, n / 4);
  bool increasing = true;
  for (std::size_t i = from + 1; i < n; ++i)
    if (!(r.samples[i].slope > r.samples[i - 1].slope)) increasing = false;
  r.tempered = !(increasing && r.samples.back().slope > k_max);
  r.verdict = r.tempered ? "tempered" : "not_tempered";
  for (const auto& s : r.samples)
    if (std::isfinite(s.log_abs_f)) r.fitted_k = std::max(r.fitted_k, s.min_k);
  return r;
}

// ---------------------------------------------------------------------------
// Radius collapse.

struct RadiusSample {
  geometry::R2 point;
  double radius;  // root-test estimate; +inf for polynomial slices
  std::optional<std::string> error;
};

struct RadiusCollapseReport {
  int axis;
  std::vector<RadiusSample> samples;
  bool collapsing;
  std::string verdict;  // "not_cr_extendible" | "bounded_below"
};

inline Json to_json(const RadiusCollapseReport& r) {
  Json s = Json::array();
  for (const auto& p : r.samples) {
    Json e{{"x1", p.point.x1}, {"x2", p.point.x2}};
    e["radius"] = std::isinf(p.radius) ? Json("inf") : Json(p.radius);
    if (p.error) e["error"] = *p.error;
    s.push_back(e);
  }
  return {{"axis", r.axis}, {"samples", s}, {"collapsing", r.collapsing}, {"verdict", r.verdict}};
}

/// Root-test radius of the one-variable slice through each path point in the
/// direction `axis`, with quadrature on 0.8 times the declared slice radius.
/// Collapse means strictly decreasing finite radii ending below half the first.
inline RadiusCollapseReport radius_collapse_probe(const SeparateOracle& o, int axis,
                                                  const std::vector<geometry::R2>& path,
                                                  int n_coeffs = 256) {
  if (axis != 1 && axis != 2) throw PreconditionError("axis must be 1 or 2");
  RadiusCollapseReport r{axis, {}, false, "bounded_below"};
  for (const auto& p : path) {
    RadiusSample s{p, taylor::kNaN, std::nullopt};
    try {
      double declared;
      if (axis == 2) {
        const auto rad = o.z2_radius(p.x1, p.x2);
        if (!rad) throw NonExtendibleError("slice does not extend", p.x1);
        declared = *rad;
      } else {
        declared = o.meta.eps1(p.x2);
        if (!(declared > 0)) throw NonExtendibleError("slice does not extend", p.x2);
      }
      const double rq = 0.8 * declared;
      const auto series = axis == 2
          ? taylor::coeffs_from_oracle([&](cplx z) { return o(p.x1, z); }, p.x2, rq, n_coeffs)
          : taylor::coeffs_from_oracle([&](cplx z) { return o(z, p.x2); }, p.x1, rq, n_coeffs);
      s.radius = taylor::radius_or_inf(series);
    } catch (const Error& e) {
      s.error = e.what();
    }
    r.samples.push_back(s);
  }
  std::vector<double> finite;
  for (const auto& s : r.samples)
    if (!s.error && std::isfinite(s.radius)) finite.push_back(s.radius);
  if (finite.size() >= 2) {
    bool dec = true;
    for (std::size_t i = 1; i < finite.size(); ++i) dec = dec && finite[i] < finite[i - 1];
    r.collapsing = dec && finite.back() < 0.5 * finite.front();
  }
  r.verdict = r.collapsing ? "not_cr_extendible" : "bounded_below";
  return r;
}

}  // namespace crext::gallery
