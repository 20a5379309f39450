// Analytic discs attached to the union of two half-disc-by-segment pieces,
// built from bump profiles and the conjugate-function operator, plus numerical
// checks of the half-plane Cauchy-Pompeiu identity behind continuous boundary
// values.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <json.hpp>

#include "crext/errors.hpp"
#include "crext/geometry.hpp"
#include "crext/harmonic.hpp"

namespace crext::edgewedge {

using Json = nlohmann::json;
using geometry::C2;
using geometry::Interval;
using geometry::R2;
using std::numbers::pi;

struct BumpProfile {
  double support_lo;  // support is [support_lo, support_hi] within [0, 2 pi]
  double support_hi;
  std::vector<double> samples;  // on theta_k = 2 pi k / M

  std::size_t size() const { return samples.size(); }
  double mean() const {
    double m = 0.0;
    for (double v : samples) m += v;
    return m / static_cast<double>(samples.size());
  }
};

/// Raised cosine 1 - cos(2 theta) on [0, pi] (j = 1) or [pi, 2 pi] (j = 2),
/// scaled to unit circle mean.
inline BumpProfile default_bump(int j, std::size_t grid_size) {
  if (j != 1 && j != 2) throw PreconditionError("bump index must be 1 or 2");
  if (grid_size < 64) throw PreconditionError("bump grid needs at least 64 points");
  BumpProfile b{j == 1 ? 0.0 : pi, j == 1 ? pi : 2 * pi, std::vector<double>(grid_size, 0.0)};
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double th = 2 * pi * static_cast<double>(k) / grid_size;
    const bool inside = j == 1 ? 2 * k <= grid_size : 2 * k >= grid_size;
    if (inside) b.samples[k] = 1.0 - std::cos(2 * th);
  }
  const double m = b.mean();
  for (double& v : b.samples) v /= m;
  return b;
}

struct AnalyticDisc {
  R2 base;
  std::array<double, 2> lambda;
  std::vector<C2> boundary;  // on theta_k = 2 pi k / M
  C2 center;

  std::size_t size() const { return boundary.size(); }
};

/// Builds discs for fixed bumps; the conjugates T0 y_j are computed once.
class DiscFactory {
 public:
  DiscFactory(BumpProfile y1, BumpProfile y2, double center_tolerance = 1e-8)
      : y_{std::move(y1), std::move(y2)}, tol_(center_tolerance) {
    if (y_[0].size() != y_[1].size()) throw PreconditionError("bumps must share a grid");
    if ((y_[0].size() & (y_[0].size() - 1)) != 0)
      throw PreconditionError("bump grid must be a power of two");
    for (int j = 0; j < 2; ++j) ty_[j] = harmonic::hilbert_transform(harmonic::CircleSamples{y_[j].samples}).values;
  }

  explicit DiscFactory(std::size_t grid_size)
      : DiscFactory(default_bump(1, grid_size), default_bump(2, grid_size)) {}

  std::size_t grid_size() const { return y_[0].size(); }
  const BumpProfile& bump(int j) const { return y_[j - 1]; }
  const std::vector<double>& conjugate(int j) const { return ty_[j - 1]; }

  /// sup |T0 y_j|.
  double conjugate_sup(int j) const {
    double m = 0.0;
    for (double v : ty_[j - 1]) m = std::max(m, std::abs(v));
    return m;
  }

  /// Boundary (x_o - T0 y_lambda) + i y_lambda with y_lambda = (l1 y1, l2 y2).
  /// Negative lambda gives the discs of the other sign quadrants.
  AnalyticDisc attach(R2 x_o, std::array<double, 2> lambda) const {
    const std::size_t m = grid_size();
    AnalyticDisc d{x_o, lambda, std::vector<C2>(m), {}};
    const double xo[2] = {x_o.x1, x_o.x2};
    cplx sum[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < m; ++k) {
      cplx z[2];
      for (int j = 0; j < 2; ++j) {
        z[j] = cplx(xo[j] - lambda[j] * ty_[j][k], lambda[j] * y_[j].samples[k]);
        sum[j] += z[j];
      }
      d.boundary[k] = {z[0], z[1]};
    }
    d.center = {sum[0] / static_cast<double>(m), sum[1] / static_cast<double>(m)};
    const double err = std::max(std::abs(d.center.z1 - cplx(x_o.x1, lambda[0])),
                                std::abs(d.center.z2 - cplx(x_o.x2, lambda[1])));
    if (!(err < tol_))
      throw InstabilityError("disc center misses x_o + i lambda; refine the transform grid");
    return d;
  }

 private:
  std::array<BumpProfile, 2> y_;
  std::array<std::vector<double>, 2> ty_;
  double tol_;
};

inline AnalyticDisc attach_disc(R2 x_o, std::array<double, 2> lambda,
                                const std::array<BumpProfile, 2>& bumps) {
  return DiscFactory(bumps[0], bumps[1]).attach(x_o, lambda);
}

namespace detail {
inline bool in_half_disc(cplx z, double sign) {
  if (!(std::abs(z) < 1.0)) return false;
  if (sign > 0) return z.imag() >= 0.0;
  if (sign < 0) return z.imag() <= 0.0;
  return z.imag() == 0.0;
}
inline bool in_segment(cplx z, double delta) {
  return std::abs(z.imag()) <= 1e-15 && std::abs(z.real()) < delta;
}
}  // namespace detail

/// Every boundary point lies in (D x I_delta) u (I_delta x D), D the closed
/// half-disc on the side of the corresponding lambda.
inline bool boundary_in_union(const AnalyticDisc& d, double delta) {
  for (const C2& p : d.boundary) {
    const bool a = detail::in_half_disc(p.z1, d.lambda[0]) && detail::in_segment(p.z2, delta);
    const bool b = detail::in_segment(p.z1, delta) && detail::in_half_disc(p.z2, d.lambda[1]);
    if (!a && !b) return false;
  }
  return true;
}

/// theta-mean of boundary values: the value at the disc center.
inline cplx extend_at_center(const AnalyticDisc& d, const std::vector<cplx>& f_boundary) {
  if (f_boundary.size() != d.size())
    throw PreconditionError("boundary values must be sampled on the disc grid");
  cplx s = 0.0;
  for (const cplx& v : f_boundary) s += v;
  return s / static_cast<double>(f_boundary.size());
}

template <class F>
  requires std::invocable<F&, cplx, cplx>
cplx extend_at_center(const AnalyticDisc& d, F&& f) {
  std::vector<cplx> vals;
  vals.reserve(d.size());
  for (const C2& p : d.boundary) vals.push_back(f(p.z1, p.z2));
  return extend_at_center(d, vals);
}

inline Json to_json(const AnalyticDisc& d) {
  Json b = Json::array();
  for (const C2& p : d.boundary)
    b.push_back({p.z1.real(), p.z1.imag(), p.z2.real(), p.z2.imag()});
  return {{"base", {d.base.x1, d.base.x2}},
          {"lambda", {d.lambda[0], d.lambda[1]}},
          {"theta_points", d.size()},
          {"boundary", b},
          {"center", {d.center.z1.real(), d.center.z1.imag(), d.center.z2.real(), d.center.z2.imag()}}};
}

// ---------------------------------------------------------------------------
// Cutoffs and the Cauchy-Pompeiu identity on the upper half-plane.

/// chi = psi on the real line, psi = 1 on `inner`, 0 off `outer`, extended to
/// y > 0 almost-analytically to order k and cut off at height `height`:
///   chi(x + iy) = omega(y) * sum_{m <= k} psi^(m)(x) (iy)^m / m!,
/// so that dbar chi = O(y^k) for y < height / 2.
struct CutoffSpec {
  Interval inner;
  Interval outer;
  int decay_order = 2;
  double height = 0.5;

  void validate() const {
    if (!inner.compactly_inside(outer)) throw PreconditionError("cutoff needs inner compactly inside outer");
    if (decay_order < 1) throw PreconditionError("cutoff decay order must be >= 1");
    if (!(height > 0)) throw PreconditionError("cutoff height must be positive");
  }
};

namespace detail {

/// Coefficients (ascending) of the C^p smoothstep of degree 2p + 1 on [0, 1].
inline std::vector<double> smoothstep_poly(int p) {
  std::vector<double> c(2 * p + 2, 0.0);
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  for (int j = 0; j <= p; ++j)
    c[p + 1 + j] = binom(p + j, j) * binom(2 * p + 1, p - j) * ((j % 2) ? -1.0 : 1.0);
  return c;
}

inline double poly_derivative(const std::vector<double>& c, int m, double t) {
  double acc = 0.0;
  for (int n = static_cast<int>(c.size()) - 1; n >= m; --n) {
    double f = 1.0;
    for (int i = 0; i < m; ++i) f *= n - i;
    acc = acc * t + c[n] * f;
  }
  return acc;
}

class Cutoff {
 public:
  explicit Cutoff(const CutoffSpec& s) : s_(s), step_(smoothstep_poly(s.decay_order + 1)) {
    s.validate();
  }

  /// psi^(m)(x).
  double psi(int m, double x) const {
    const double a0 = s_.outer.lo, a1 = s_.inner.lo, b1 = s_.inner.hi, b0 = s_.outer.hi;
    if (x <= a0 || x >= b0) return 0.0;
    if (x >= a1 && x <= b1) return m == 0 ? 1.0 : 0.0;
    if (x < a1) {
      const double l = a1 - a0;
      return poly_derivative(step_, m, (x - a0) / l) / std::pow(l, m);
    }
    const double l = b0 - b1;
    return poly_derivative(step_, m, (b0 - x) / l) * ((m % 2) ? -1.0 : 1.0) / std::pow(l, m);
  }

  double omega(int m, double y) const {
    const double h = s_.height;
    if (y <= 0.5 * h) return m == 0 ? 1.0 : 0.0;
    if (y >= h) return 0.0;
    const double l = 0.5 * h;
    const double v = poly_derivative(step_, m, (y - l) / l) / std::pow(l, m);
    return m == 0 ? 1.0 - v : -v;
  }

  cplx chi(cplx z) const {
    const double x = z.real(), y = z.imag();
    const double w = omega(0, y);
    if (w == 0.0) return 0.0;
    cplx s = 0.0, iy_pow = 1.0;
    double fact = 1.0;
    for (int m = 0; m <= s_.decay_order; ++m) {
      if (m > 0) {
        iy_pow *= cplx(0.0, y);
        fact *= m;
      }
      s += psi(m, x) * iy_pow / fact;
    }
    return w * s;
  }

  /// dbar chi = (1/2)(d/dx + i d/dy) chi.
  cplx dbar(cplx z) const {
    const double x = z.real(), y = z.imag();
    const int k = s_.decay_order;
    double fact = 1.0;
    for (int m = 2; m <= k; ++m) fact *= m;
    const cplx ds = 0.5 * psi(k + 1, x) * std::pow(cplx(0.0, y), k) / fact;
    const double w = omega(0, y);
    cplx out = w * ds;
    const double dw = omega(1, y);
    if (dw != 0.0) {
      cplx s = 0.0, iy_pow = 1.0;
      double f = 1.0;
      for (int m = 0; m <= k; ++m) {
        if (m > 0) {
          iy_pow *= cplx(0.0, y);
          f *= m;
        }
        s += psi(m, x) * iy_pow / f;
      }
      out += 0.5 * cplx(0.0, 1.0) * dw * s;
    }
    return out;
  }

  const CutoffSpec& spec() const { return s_; }

 private:
  CutoffSpec s_;
  std::vector<double> step_;
};

/// Simpson nodes and weights on [a, b] with n (even) intervals.
inline void simpson(double a, double b, int n, std::vector<double>& x, std::vector<double>& w) {
  n += n % 2;
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    x.push_back(a + i * h);
    w.push_back(h / 3.0 * ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0)));
  }
}

/// Composite Simpson on consecutive breakpoints, about n intervals in total.
inline void composite(const std::vector<double>& brk, int n, std::vector<double>& x,
                      std::vector<double>& w) {
  const double total = brk.back() - brk.front();
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const int m = std::max(2, static_cast<int>(std::lround(n * (brk[i + 1] - brk[i]) / total)));
    simpson(brk[i], brk[i + 1], m, x, w);
  }
}

struct CauchySides {
  cplx lhs, boundary, area;
};

template <class F>
CauchySides cauchy_sides(F& f, const Cutoff& chi, double x_n, double y_n, int n) {
  const auto& s = chi.spec();
  std::vector<double> xs, wx, ys, wy;
  composite({s.outer.lo, s.inner.lo, s.inner.hi, s.outer.hi}, n, xs, wx);
  composite({0.0, 0.5 * s.height, s.height}, std::max(4, n / 2), ys, wy);

  // Boundary term (1/pi) int psi f y_n / ((x - x_n)^2 + y_n^2) dx.
  cplx bnd = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double p = chi.psi(0, xs[i]);
    if (p == 0.0) continue;
    const double d = xs[i] - x_n;
    bnd += wx[i] * p * f(cplx(xs[i], 0.0)) * (y_n / (d * d + y_n * y_n));
  }
  bnd /= pi;

  // Area term -(2i/pi) int int dbar(chi) f y_n / ((z - x_n)^2 + y_n^2) dA.
  cplx area = 0.0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (ys[j] == 0.0) continue;  // dbar chi vanishes on the real line
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const cplx z(xs[i], ys[j]);
      const cplx db = chi.dbar(z);
      if (db == 0.0) continue;
      const cplx zeta = z - x_n;
      area += wx[i] * wy[j] * db * f(z) * (y_n / (zeta * zeta + y_n * y_n));
    }
  }
  area *= cplx(0.0, -2.0 / pi);

  const cplx z0(x_n, y_n);
  return {chi.chi(z0) * f(z0), bnd, area};
}

}  // namespace detail

/// Sup of |dbar chi| / y^k over a sample grid with 0 < y < height / 2.
inline double cutoff_decay_ratio(const CutoffSpec& spec, int n = 64) {
  const detail::Cutoff chi(spec);
  double worst = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double y = 0.5 * spec.height * j / (n + 1);
    for (int i = 0; i <= 4 * n; ++i) {
      const double x = spec.outer.lo + spec.outer.length() * i / (4 * n);
      worst = std::max(worst, std::abs(chi.dbar(cplx(x, y))) / std::pow(y, spec.decay_order));
    }
  }
  return worst;
}

struct CauchyResidual {
  double residual;          // at n quadrature points
  double residual_refined;  // at 2n
  cplx lhs;
  cplx boundary_term;
  cplx area_term;  // at 2n
  double observed_order;
  int points;
};

/// Both sides of
///   (chi f)(z0) = (1/pi) int chi f y_n/((x-x_n)^2+y_n^2) dx
///               - (2i/pi) int int dbar(chi f) y_n/((z-x_n)^2+y_n^2) dA,
/// z0 = x_n + i y_n, for f holomorphic on 0 < y < height and continuous at y = 0.
/// The identity is the Cauchy-Pompeiu formula for the half-plane after the
/// affine map z -> (z - x_n)/y_n.
template <class F>
CauchyResidual cauchy_formula_residual(F&& f, const CutoffSpec& spec, double x_n, double y_n,
                                       int points = 2000) {
  spec.validate();
  if (!(y_n > 0 && y_n < 0.5 * spec.height))
    throw PreconditionError("need 0 < y_n < height / 2");
  if (!spec.inner.contains(x_n)) throw PreconditionError("x_n must lie where chi = 1");
  if (points < 16) throw PreconditionError("too few quadrature points");
  const detail::Cutoff chi(spec);
  const auto a = detail::cauchy_sides(f, chi, x_n, y_n, points);
  const auto b = detail::cauchy_sides(f, chi, x_n, y_n, 2 * points);
  const double r1 = std::abs(a.lhs - a.boundary - a.area);
  const double r2 = std::abs(b.lhs - b.boundary - b.area);
  const double floor = 1e-13 * std::max(1.0, std::abs(a.lhs));
  if (r2 > r1 && r1 > floor)
    throw InstabilityError("Cauchy residual grew under quadrature refinement");
  const double order = (r1 > 0 && r2 > 0) ? std::log2(r1 / r2) : std::numeric_limits<double>::infinity();
  return {r1, r2, b.lhs, b.boundary, b.area, order, points};
}

struct ContinuityGap {
  double y;
  double gap;
};

struct ContinuityModulus {
  std::vector<ContinuityGap> gaps;
  bool decreasing;
};

/// sup over an x-grid (nx + 1 nodes including the ends of the real extent)
/// of |f(x + iy) - f(x)| for each y.
template <class F>
ContinuityModulus uniform_continuity_modulus(F&& f, const geometry::Strip& region,
                                             const std::vector<double>& ys, int nx = 200) {
  if (region.side == geometry::Side::lower)
    throw PreconditionError("continuity modulus is measured from above");
  ContinuityModulus out{{}, true};
  for (double y : ys) {
    if (!(y > 0 && y < region.height)) throw PreconditionError("heights must lie in (0, height)");
    double sup = 0.0;
    for (int i = 0; i <= nx; ++i) {
      const double x = region.real_extent.lo + region.real_extent.length() * i / nx;
      sup = std::max(sup, std::abs(f(cplx(x, y)) - f(cplx(x, 0.0))));
    }
    if (!out.gaps.empty() && !(sup <= out.gaps.back().gap)) out.decreasing = false;
    out.gaps.push_back({y, sup});
  }
  return out;
}

}  // namespace crext::edgewedge
