// Real and complex domains: intervals, discs, half-discs, strips, cones and
// wedges in C^2 = R^2 + iR^2, with membership tests, interior sampling grids
// and JSON serialization.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crext/errors.hpp"

namespace crext::geometry {

using Json = nlohmann::json;

/// A point of R^2 (an edge point, or an imaginary direction y).
struct R2 {
  double x1 = 0.0;
  double x2 = 0.0;
  double norm() const { return std::hypot(x1, x2); }
};

/// A point of C^2.
struct C2 {
  cplx z1;
  cplx z2;
  R2 real() const { return {z1.real(), z2.real()}; }
  R2 imag() const { return {z1.imag(), z2.imag()}; }
};

enum class Side { upper, lower, two_sided };

inline std::string to_string(Side s) {
  switch (s) {
    case Side::upper: return "upper";
    case Side::lower: return "lower";
    case Side::two_sided: return "two_sided";
  }
  return "?";
}

inline Side side_from_string(const std::string& s) {
  if (s == "upper") return Side::upper;
  if (s == "lower") return Side::lower;
  if (s == "two_sided") return Side::two_sided;
  throw DomainError("unknown side '" + s + "'");
}

/// Open interval (lo, hi).
struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi)) throw DomainError("Interval requires lo < hi");
  }
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double t) const { return lo < t && t < hi; }
  /// B contains the closure of *this.
  bool compactly_inside(const Interval& outer) const {
    return outer.lo < lo && hi < outer.hi;
  }
};

struct Disc {
  cplx center;
  double radius;

  Disc(cplx c, double r) : center(c), radius(r) {
    if (!(r > 0)) throw DomainError("Disc requires radius > 0");
  }
  bool contains(cplx z) const { return std::abs(z - center) < radius; }
};

/// Half-disc over a real center; closed along its diameter.
struct HalfDisc {
  double center;
  double radius;
  Side side = Side::upper;

  HalfDisc(double c, double r, Side s = Side::upper)
      : center(c), radius(r), side(s) {
    if (!(r > 0)) throw DomainError("HalfDisc requires radius > 0");
    if (s == Side::two_sided) throw DomainError("HalfDisc side must be upper or lower");
  }
  bool contains(cplx z) const {
    if (!(std::abs(z - cplx(center, 0.0)) < radius)) return false;
    return side == Side::upper ? z.imag() >= 0.0 : z.imag() <= 0.0;
  }
};

/// {tau : Re tau in real_extent, 0 < +-Im tau < height} (or |Im tau| < height).
struct Strip {
  Interval real_extent;
  double height;
  Side side = Side::two_sided;

  Strip(Interval ext, double h, Side s = Side::two_sided)
      : real_extent(ext), height(h), side(s) {
    if (!(h > 0)) throw DomainError("Strip requires height > 0");
  }
  bool contains(cplx z) const {
    if (!real_extent.contains(z.real())) return false;
    const double y = z.imag();
    switch (side) {
      case Side::upper: return 0.0 < y && y < height;
      case Side::lower: return -height < y && y < 0.0;
      case Side::two_sided: return std::abs(y) < height;
    }
    return false;
  }
};

/// Open circular cone {y != 0 : angle(y, axis) < aperture} in the y-plane.
struct Cone {
  R2 axis;
  double aperture;

  Cone(R2 ax, double ap) : aperture(ap) {
    const double n = ax.norm();
    if (!(n > 0)) throw DomainError("Cone axis must be nonzero");
    if (!(ap > 0 && ap < std::numbers::pi / 2))
      throw DomainError("Cone aperture must lie in (0, pi/2)");
    axis = {ax.x1 / n, ax.x2 / n};
  }
  double angle_to(const R2& y) const {
    const double n = y.norm();
    const double c = std::clamp((y.x1 * axis.x1 + y.x2 * axis.x2) / n, -1.0, 1.0);
    return std::acos(c);
  }
  bool contains(const R2& y) const {
    if (y.norm() == 0.0) return false;
    return angle_to(y) < aperture;
  }
};

/// edge + i * (cone truncated by |y| < epsilon), edge an open rectangle.
struct Wedge {
  Interval edge1;
  Interval edge2;
  Cone cone;
  double epsilon;

  Wedge(Interval e1, Interval e2, Cone c, double eps)
      : edge1(e1), edge2(e2), cone(c), epsilon(eps) {
    if (!(eps > 0)) throw DomainError("Wedge requires epsilon > 0");
  }
  /// With `closure_edge`, points with y = 0 over the edge count as members.
  bool contains(const C2& p, bool closure_edge = false) const {
    const R2 x = p.real();
    const R2 y = p.imag();
    if (!edge1.contains(x.x1) || !edge2.contains(x.x2)) return false;
    if (y.norm() == 0.0) return closure_edge;
    return y.norm() < epsilon && cone.contains(y);
  }
};

inline double angle_between(const R2& a, const R2& b) {
  const double c = (a.x1 * b.x1 + a.x2 * b.x2) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// closure(inner) \ {0} is contained in outer.
inline bool is_proper_subcone(const Cone& inner, const Cone& outer) {
  return angle_between(inner.axis, outer.axis) + inner.aperture < outer.aperture;
}

// Interior sampling grids. Nodes sit at lo + k (hi - lo) / (n + 1), k = 1..n,
// so no node touches a boundary.

namespace detail {
inline std::vector<double> interior_nodes(double lo, double hi, int n) {
  if (n < 2) throw EmptyGridError("grid resolution must be at least 2");
  std::vector<double> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) out.push_back(lo + k * (hi - lo) / (n + 1));
  return out;
}

template <class Pred>
std::vector<cplx> box_grid(double xlo, double xhi, double ylo, double yhi, int nx,
                           int ny, Pred inside) {
  std::vector<cplx> out;
  for (double y : interior_nodes(ylo, yhi, ny))
    for (double x : interior_nodes(xlo, xhi, nx))
      if (inside(cplx(x, y))) out.emplace_back(x, y);
  if (out.empty()) throw EmptyGridError("sampling grid is empty");
  return out;
}
}  // namespace detail

inline std::vector<double> sample_grid(const Interval& d, int n) {
  return detail::interior_nodes(d.lo, d.hi, n);
}

inline std::vector<cplx> sample_grid(const Disc& d, int n) {
  const double r = d.radius;
  return detail::box_grid(d.center.real() - r, d.center.real() + r,
                          d.center.imag() - r, d.center.imag() + r, n, n,
                          [&](cplx z) { return d.contains(z); });
}

inline std::vector<cplx> sample_grid(const HalfDisc& d, int n) {
  const double r = d.radius;
  const double ylo = d.side == Side::upper ? 0.0 : -r;
  const double yhi = d.side == Side::upper ? r : 0.0;
  return detail::box_grid(d.center - r, d.center + r, ylo, yhi, n, n,
                          [&](cplx z) { return d.contains(z); });
}

inline std::vector<cplx> sample_grid(const Strip& d, int nx, int ny) {
  double ylo = -d.height, yhi = d.height;
  if (d.side == Side::upper) ylo = 0.0;
  if (d.side == Side::lower) yhi = 0.0;
  return detail::box_grid(d.real_extent.lo, d.real_extent.hi, ylo, yhi, nx, ny,
                          [&](cplx z) { return d.contains(z); });
}

/// Directions of the unit-truncated cone: radii in (0,1), angles inside the aperture.
inline std::vector<R2> sample_grid(const Cone& c, int n) {
  std::vector<R2> out;
  const double base = std::atan2(c.axis.x2, c.axis.x1);
  for (double rho : detail::interior_nodes(0.0, 1.0, n))
    for (double a : detail::interior_nodes(-c.aperture, c.aperture, n))
      out.push_back({rho * std::cos(base + a), rho * std::sin(base + a)});
  return out;
}

inline std::vector<C2> sample_grid(const Wedge& w, int n) {
  std::vector<C2> out;
  const auto dirs = sample_grid(w.cone, n);
  for (double x2 : sample_grid(w.edge2, n))
    for (double x1 : sample_grid(w.edge1, n))
      for (const R2& d : dirs)
        out.push_back({cplx(x1, w.epsilon * d.x1), cplx(x2, w.epsilon * d.x2)});
  return out;
}

// JSON with a "kind" discriminator.

using Domain = std::variant<Interval, Disc, HalfDisc, Strip, Cone, Wedge>;

inline Json to_json(const Domain& d) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return {{"kind", "interval"}, {"lo", v.lo}, {"hi", v.hi}};
        } else if constexpr (std::is_same_v<T, Disc>) {
          return {{"kind", "disc"},
                  {"center", {v.center.real(), v.center.imag()}},
                  {"radius", v.radius}};
        } else if constexpr (std::is_same_v<T, HalfDisc>) {
          return {{"kind", "half_disc"},
                  {"center", {v.center, 0.0}},
                  {"radius", v.radius},
                  {"side", to_string(v.side)}};
        } else if constexpr (std::is_same_v<T, Strip>) {
          return {{"kind", "strip"},
                  {"lo", v.real_extent.lo},
                  {"hi", v.real_extent.hi},
                  {"epsilon", v.height},
                  {"side", to_string(v.side)}};
        } else if constexpr (std::is_same_v<T, Cone>) {
          return {{"kind", "cone"},
                  {"axis", {v.axis.x1, v.axis.x2}},
                  {"aperture", v.aperture}};
        } else {
          return {{"kind", "wedge"},
                  {"lo", {v.edge1.lo, v.edge2.lo}},
                  {"hi", {v.edge1.hi, v.edge2.hi}},
                  {"axis", {v.cone.axis.x1, v.cone.axis.x2}},
                  {"aperture", v.cone.aperture},
                  {"epsilon", v.epsilon}};
        }
      },
      d);
}

inline Domain domain_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "interval") return Interval(j.at("lo"), j.at("hi"));
  if (kind == "disc")
    return Disc(cplx(j.at("center")[0], j.at("center")[1]), j.at("radius"));
  if (kind == "half_disc")
    return HalfDisc(j.at("center")[0].get<double>(), j.at("radius"),
                    side_from_string(j.at("side")));
  if (kind == "strip")
    return Strip(Interval(j.at("lo"), j.at("hi")), j.at("epsilon"),
                 side_from_string(j.at("side")));
  if (kind == "cone")
    return Cone(R2{j.at("axis")[0], j.at("axis")[1]}, j.at("aperture"));
  if (kind == "wedge")
    return Wedge(Interval(j.at("lo")[0], j.at("hi")[0]),
                 Interval(j.at("lo")[1], j.at("hi")[1]),
                 Cone(R2{j.at("axis")[0], j.at("axis")[1]}, j.at("aperture")),
                 j.at("epsilon"));
  throw DomainError("unknown geometry kind '" + kind + "'");
}

}  // namespace crext::geometry
