// Functions of two variables that are known to extend holomorphically in each
// variable separately, with metadata describing where the slices extend.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "crext/errors.hpp"
#include "crext/geometry.hpp"

namespace crext {

using Json = nlohmann::json;

enum class Expected { two_sided, one_sided_up, not_cr_extendible, not_tempered };

inline std::string to_string(Expected e) {
  switch (e) {
    case Expected::two_sided: return "two_sided";
    case Expected::one_sided_up: return "one_sided_up";
    case Expected::not_cr_extendible: return "not_cr_extendible";
    case Expected::not_tempered: return "not_tempered";
  }
  return "?";
}

struct OracleMeta {
  geometry::Interval omega1{-1, 1};
  geometry::Interval omega2{-1, 1};
  /// Holomorphy radius of z1 -> f(z1, x2) around real points, per real x2.
  std::function<double(double)> eps1;
  /// Domain of z2 -> f(x1, z2) for real x1; empty when the slice does not extend.
  std::function<std::optional<geometry::Domain>(double)> z2_domain;
  bool continuous = true;
  Expected expected = Expected::two_sided;
};

struct SeparateOracle {
  std::string name;
  std::string formula;
  Json params;
  std::function<cplx(cplx, cplx)> eval;
  OracleMeta meta;

  cplx operator()(cplx z1, cplx z2) const { return eval(z1, z2); }

  /// Radius of the z2-slice around x2 (for a disc domain, the distance to its
  /// boundary; for strips and half-discs, the distance to the far boundary
  /// pieces that are not the real axis).
  std::optional<double> z2_radius(double x1, double x2) const {
    const auto d = meta.z2_domain(x1);
    if (!d) return std::nullopt;
    return std::visit(
        [&](const auto& v) -> std::optional<double> {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, geometry::Disc>) {
            const double r = v.radius - std::abs(cplx(x2, 0.0) - v.center);
            return r > 0 ? std::optional<double>(r) : std::nullopt;
          } else if constexpr (std::is_same_v<T, geometry::Strip>) {
            const double r = std::min({v.height, x2 - v.real_extent.lo, v.real_extent.hi - x2});
            return r > 0 ? std::optional<double>(r) : std::nullopt;
          } else if constexpr (std::is_same_v<T, geometry::HalfDisc>) {
            const double r = v.radius - std::abs(x2 - v.center);
            return r > 0 ? std::optional<double>(r) : std::nullopt;
          } else {
            return std::nullopt;
          }
        },
        *d);
  }

  /// Distance from a point c of the z2-slice domain over x1 to the boundary of
  /// that domain, the real axis included; 0 when c is outside.
  double slice_room(double x1, cplx c) const {
    const auto d = meta.z2_domain(x1);
    if (!d) return 0.0;
    return std::visit(
        [&](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, geometry::Disc>) {
            return std::max(0.0, v.radius - std::abs(c - v.center));
          } else if constexpr (std::is_same_v<T, geometry::Strip>) {
            const double y = v.side == geometry::Side::upper ? c.imag() : -c.imag();
            return std::max(0.0, std::min({y, v.height - y, c.real() - v.real_extent.lo,
                                           v.real_extent.hi - c.real()}));
          } else if constexpr (std::is_same_v<T, geometry::HalfDisc>) {
            const double y = v.side == geometry::Side::upper ? c.imag() : -c.imag();
            return std::max(0.0, std::min(y, v.radius - std::abs(c - v.center)));
          } else {
            return 0.0;
          }
        },
        *d);
  }

  /// Points where the metadata allows evaluation: real points of the closed
  /// product of omega intervals, a complex z2 inside the slice domain over a
  /// real z1, or a complex z1 within eps1 over a real z2.
  bool defined_at(cplx z1, cplx z2) const {
    auto in_closed = [](const geometry::Interval& i, double t) { return i.lo <= t && t <= i.hi; };
    const bool z1_real = z1.imag() == 0.0, z2_real = z2.imag() == 0.0;
    if (z1_real && z2_real) return in_closed(meta.omega1, z1.real()) && in_closed(meta.omega2, z2.real());
    if (z1_real) {
      if (!in_closed(meta.omega1, z1.real())) return false;
      const auto d = meta.z2_domain(z1.real());
      if (!d) return false;
      return std::visit([&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, geometry::Disc> || std::is_same_v<T, geometry::HalfDisc> ||
                      std::is_same_v<T, geometry::Strip>)
          return v.contains(z2);
        else
          return false;
      }, *d);
    }
    if (z2_real)
      return in_closed(meta.omega2, z2.real()) && std::abs(z1.imag()) < meta.eps1(z2.real());
    return false;
  }
};

}  // namespace crext
