// Truncated Taylor models in one complex variable: coefficient extraction by
// trapezoid quadrature on a circle, evaluation with a geometric tail estimate,
// recentering, root-test radius estimates and the log-coefficient sequences
//   phi_nu(z1) = (1/nu) log |a_nu(z1)|
// that feed the Hartogs verifier.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "crext/errors.hpp"

namespace crext::taylor {

using Json = nlohmann::json;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TaylorSeries {
  cplx center;
  std::vector<cplx> coeffs;  // a_0 .. a_N
  std::optional<double> declared_radius;

  // Provenance of quadrature-extracted coefficients: |a_nu| r^nu below
  // noise_level is indistinguishable from roundoff.
  std::optional<double> quadrature_radius;
  double noise_level = 0.0;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }

  /// Magnitude below which a_nu is treated as a numerical zero.
  double zero_floor(int nu) const {
    if (!quadrature_radius || noise_level <= 0.0) return 0.0;
    return noise_level / std::pow(*quadrature_radius, nu);
  }
  bool usable(int nu) const {
    const double m = std::abs(coeffs[nu]);
    return m > 0.0 && m > zero_floor(nu);
  }
};

struct Evaluation {
  cplx value;
  double tail_bound;  // heuristic, not a rigorous remainder
};

/// Trapezoid-rule Taylor coefficients of a holomorphic `oracle` on the circle
/// |z - center| = circle_radius with `quad_points` nodes (default 4(N+1)).
template <class Oracle>
  requires std::invocable<Oracle&, cplx>
TaylorSeries coeffs_from_oracle(Oracle&& oracle, cplx center, double circle_radius,
                                int order, int quad_points = 0) {
  if (order < 0) throw PreconditionError("coefficient order must be >= 0");
  if (!(circle_radius > 0)) throw PreconditionError("circle radius must be positive");
  const int m_pts = quad_points > 0 ? quad_points : 4 * (order + 1);
  if (m_pts < 4 * (order + 1))
    throw PreconditionError("quadrature needs at least 4(N+1) points");

  // Twiddles e^{-2 pi i k / M}; index arithmetic keeps them exact per k.
  std::vector<cplx> roots(m_pts);
  for (int k = 0; k < m_pts; ++k)
    roots[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / m_pts);

  std::vector<cplx> samples(m_pts);
  double max_abs = 0.0;
  for (int m = 0; m < m_pts; ++m) {
    const cplx z = center + circle_radius * std::conj(roots[m]);
    const cplx v = oracle(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ExtractionError("oracle returned a non-finite value on the quadrature circle", z);
    samples[m] = v;
    max_abs = std::max(max_abs, std::abs(v));
  }

  TaylorSeries s{center, std::vector<cplx>(order + 1), std::nullopt, circle_radius,
                 8.0 * std::numeric_limits<double>::epsilon() * max_abs};
  double scale = 1.0;
  for (int nu = 0; nu <= order; ++nu) {
    cplx acc = 0.0;
    for (int m = 0; m < m_pts; ++m)
      acc += samples[m] * roots[(static_cast<long long>(nu) * m) % m_pts];
    s.coeffs[nu] = acc / static_cast<double>(m_pts) / scale;
    scale *= circle_radius;
  }
  return s;
}

namespace detail {
/// Trailing index window [lo, N] covering `tail_fraction` of the indices, at least 8.
inline int window_start(int order, double tail_fraction) {
  const int count = std::max(8, static_cast<int>(std::ceil(tail_fraction * order)));
  return std::max(1, order - count + 1);
}

struct TailWindow {
  int lo = 1, hi = 0, usable = 0;
};

/// Trailing window ending at the last resolvable coefficient, widened
/// downward until it holds 8 usable coefficients when possible.
inline TailWindow tail_window(const TaylorSeries& s, double tail_fraction) {
  TailWindow w;
  for (int nu = s.order(); nu >= 1; --nu)
    if (s.usable(nu)) {
      w.hi = nu;
      break;
    }
  if (w.hi == 0) return w;
  w.lo = window_start(w.hi, tail_fraction);
  for (int nu = w.lo; nu <= w.hi; ++nu) w.usable += s.usable(nu) ? 1 : 0;
  while (w.usable < 8 && w.lo > 1) {
    --w.lo;
    w.usable += s.usable(w.lo) ? 1 : 0;
  }
  return w;
}
}  // namespace detail

/// exp(-max phi_nu) over the trailing window of resolvable coefficients;
/// +inf when fewer than 8 coefficients past a_0 are nonzero (polynomial data).
inline double radius_root_test(const TaylorSeries& s, double tail_fraction = 0.25) {
  if (!(tail_fraction > 0 && tail_fraction <= 1))
    throw PreconditionError("tail_fraction must lie in (0, 1]");
  if (s.order() < 8) throw PreconditionError("root test needs at least 8 coefficients past a_0");
  const auto w = detail::tail_window(s, tail_fraction);
  if (w.usable < 8) return kInf;
  double max_phi = kNegInf;
  for (int nu = w.lo; nu <= w.hi; ++nu)
    if (s.usable(nu)) max_phi = std::max(max_phi, std::log(std::abs(s.coeffs[nu])) / nu);
  return std::exp(-max_phi);
}

/// Root test that reports +inf instead of throwing for sparse numerical tails.
inline double radius_or_inf(const TaylorSeries& s, double tail_fraction = 0.25) {
  try {
    return radius_root_test(s, tail_fraction);
  } catch (const PreconditionError&) {
    return kInf;
  }
}

/// Horner evaluation plus the tail estimate C q^{N+1} / (1 - q), raised to the
/// last-ratio geometric extrapolation when that is larger.
inline Evaluation evaluate(const TaylorSeries& s, cplx z) {
  const double dist = std::abs(z - s.center);
  if (s.declared_radius && !(dist < *s.declared_radius))
    throw DomainError("evaluation point outside the declared radius");

  cplx value = 0.0;
  for (int nu = s.order(); nu >= 0; --nu) value = value * (z - s.center) + s.coeffs[nu];
  if (dist == 0.0) return {s.coeffs[0], 0.0};

  const int n = s.order();
  if (n < 8) return {value, kInf};
  const double r_est = radius_or_inf(s);
  if (std::isinf(r_est)) return {value, 0.0};
  const double q = dist / r_est;
  if (q >= 1.0) throw DivergenceError("evaluation point beyond the root-test radius");
  double c = 0.0;
  const auto w = detail::tail_window(s, 0.25);
  for (int nu = w.lo; nu <= w.hi; ++nu)
    c = std::max(c, std::abs(s.coeffs[nu]) * std::pow(r_est, nu));
  double tail = c * std::pow(q, n + 1) / (1.0 - q);
  // The windowed root test overshoots the radius by O(1/N); the last-ratio
  // extrapolation a_{N+k} ~ a_N rho^k covers that gap for pole-dominated tails.
  if (s.usable(n) && s.usable(n - 1)) {
    const double x = std::abs(s.coeffs[n] / s.coeffs[n - 1]) * dist;
    if (x < 1.0)
      tail = std::max(tail, std::abs(s.coeffs[n]) * std::pow(dist, n) * x / (1.0 - x));
  }
  return {value, tail};
}

/// Re-expand around `new_center`. The coefficient list is first extended by a
/// geometric tail a_{N+k} = a_N rho^k, rho = a_N / a_{N-1}, whenever
/// |rho * shift| <= 0.9, then shifted by repeated synthetic division and
/// truncated back to order N.
inline TaylorSeries recenter(const TaylorSeries& s, cplx new_center) {
  const cplx shift = new_center - s.center;
  const int n = s.order();
  if (std::abs(shift) == 0.0) return s;

  const double r_est = n >= 8 ? radius_or_inf(s) : kInf;
  if (!(std::abs(shift) < r_est))
    throw OutOfRadiusError("recentering shift reaches the estimated radius");

  std::vector<cplx> p = s.coeffs;
  if (n >= 1 && s.usable(n) && s.usable(n - 1)) {
    const cplx rho = s.coeffs[n] / s.coeffs[n - 1];
    const double x = std::abs(rho * shift);
    if (x <= 0.9 && x > 0.0) {
      // Extend until binom(L, N) x^{L-N} < 1e-18 (checked in log space).
      int len = n;
      double log_term = 0.0;
      const int cap = n + 40 * (n + 1);
      while (len < cap) {
        ++len;
        log_term += std::log(static_cast<double>(len) / (len - n)) + std::log(x);
        if (len - n > 4 && log_term < std::log(1e-18)) break;
      }
      p.reserve(len + 1);
      for (int k = n + 1; k <= len; ++k) p.push_back(p.back() * rho);
    }
  }

  const int last = static_cast<int>(p.size()) - 1;
  for (int k = 0; k < std::min(last, n + 1); ++k)
    for (int j = last - 1; j >= k; --j) p[j] += shift * p[j + 1];
  p.resize(n + 1);

  TaylorSeries out{new_center, std::move(p), std::nullopt, std::nullopt, 0.0};
  if (s.declared_radius) out.declared_radius = *s.declared_radius - std::abs(shift);
  return out;
}

/// phi_nu(z1_j) = (1/nu) log |a_nu(z1_j)|, stored nu-major; -inf marks a_nu = 0.
struct CoeffLogSequence {
  std::vector<cplx> grid;
  std::vector<std::vector<double>> values;  // values[nu - nu_min][j]
  int nu_min = 1;
  int nu_max = 1;

  double at(int nu, std::size_t j) const { return values[nu - nu_min][j]; }
};

inline CoeffLogSequence phi_sequence(const std::vector<TaylorSeries>& fields,
                                     const std::vector<cplx>& grid, int nu_min,
                                     int nu_max) {
  if (fields.size() != grid.size())
    throw PreconditionError("one coefficient field per grid point is required");
  if (!(1 <= nu_min && nu_min <= nu_max)) throw PreconditionError("bad nu range");
  for (const auto& f : fields)
    if (f.order() < nu_max) throw PreconditionError("series order below nu_max");

  CoeffLogSequence seq{grid, {}, nu_min, nu_max};
  seq.values.assign(nu_max - nu_min + 1, std::vector<double>(grid.size()));
  for (int nu = nu_min; nu <= nu_max; ++nu)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double m = std::abs(fields[j].coeffs[nu]);
      seq.values[nu - nu_min][j] = m > 0.0 ? std::log(m) / nu : kNegInf;
    }
  return seq;
}

inline Json to_json(const TaylorSeries& s) {
  Json coeffs = Json::array();
  for (const cplx& a : s.coeffs) coeffs.push_back({a.real(), a.imag()});
  Json j{{"center", {s.center.real(), s.center.imag()}}, {"coeffs", coeffs}};
  j["declared_radius"] = s.declared_radius ? Json(*s.declared_radius) : Json(nullptr);
  return j;
}

inline TaylorSeries series_from_json(const Json& j) {
  TaylorSeries s;
  s.center = cplx(j.at("center")[0], j.at("center")[1]);
  for (const auto& a : j.at("coeffs")) s.coeffs.emplace_back(a[0], a[1]);
  if (s.coeffs.empty()) throw DomainError("TaylorSeries needs at least one coefficient");
  if (j.contains("declared_radius") && !j["declared_radius"].is_null())
    s.declared_radius = j["declared_radius"].get<double>();
  return s;
}

/// CSV with columns nu, z1_re, z1_im, phi.
inline void write_csv(std::ostream& os, const CoeffLogSequence& seq) {
  os << "nu,z1_re,z1_im,phi\n";
  os.precision(17);
  for (int nu = seq.nu_min; nu <= seq.nu_max; ++nu)
    for (std::size_t j = 0; j < seq.grid.size(); ++j)
      os << nu << ',' << seq.grid[j].real() << ',' << seq.grid[j].imag() << ','
         << seq.at(nu, j) << '\n';
}

}  // namespace crext::taylor
