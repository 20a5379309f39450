// Poisson integrals on the unit disc and upper half-disc, the conjugate-function
// operator T0 on the circle, harmonic-measure constants kappa for the half-disc
// and for rectangular strips, and the verifier for the Hartogs-type bound
//   phi_nu(tau) <= alpha + l * kappa * Im tau   (Im tau >= eta, nu large).
#pragma once

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crext/errors.hpp"
#include "crext/geometry.hpp"
#include "crext/taylor.hpp"

namespace crext::harmonic {

using Json = nlohmann::json;
using geometry::HalfDisc;
using geometry::Strip;
using std::numbers::pi;

/// Real samples on the uniform circle grid theta_k = 2 pi k / M.
struct CircleSamples {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double theta(std::size_t k) const { return 2.0 * pi * k / values.size(); }

  template <class F>
  static CircleSamples from(F&& f, std::size_t m) {
    if (m < 16) throw PreconditionError("a boundary function needs at least 16 samples");
    CircleSamples s;
    s.values.resize(m);
    for (std::size_t k = 0; k < m; ++k) s.values[k] = f(2.0 * pi * k / m);
    return s;
  }
};

/// Data on the boundary of the upper unit half-disc: the arc sampled at
/// theta_k = pi k / M_a (k = 0..M_a, both corners included) and the diameter
/// sampled at t_j = -1 + 2 j / M_d (j = 0..M_d).
struct HalfDiscBoundary {
  std::vector<double> arc;
  std::vector<double> diameter;

  template <class FArc, class FDiam>
  static HalfDiscBoundary from(FArc&& on_arc, FDiam&& on_diameter, std::size_t m_arc,
                               std::size_t m_diam) {
    if (m_arc < 16 || m_diam < 16)
      throw PreconditionError("a boundary function needs at least 16 samples per piece");
    HalfDiscBoundary b;
    for (std::size_t k = 0; k <= m_arc; ++k) b.arc.push_back(on_arc(pi * k / m_arc));
    for (std::size_t j = 0; j <= m_diam; ++j)
      b.diameter.push_back(on_diameter(-1.0 + 2.0 * j / m_diam));
    return b;
  }

  /// 0 on the diameter, 1 on the arc.
  static HalfDiscBoundary chi(std::size_t m) {
    return from([](double) { return 1.0; }, [](double) { return 0.0; }, m, m);
  }
};

struct PoissonValue {
  double value;
  bool ill_conditioned;  // |z| > 0.999: the kernel is under-resolved by the grid
};

inline PoissonValue poisson_disc(const CircleSamples& bf, cplx z) {
  const double r = std::abs(z);
  if (!(r < 1.0)) throw DomainError("Poisson evaluation point must lie in the open disc");
  const std::size_t m = bf.size();
  if (m < 16) throw PreconditionError("a boundary function needs at least 16 samples");
  const double num = 1.0 - r * r;
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const cplx zeta = std::polar(1.0, bf.theta(k));
    acc += num / std::norm(zeta - z) * bf.values[k];
  }
  return {acc / m, r > 0.999};
}

namespace detail {

/// (1/pi) * int_{t0}^{t1} y g(t) / ((x - t)^2 + y^2) dt for linear g with
/// g(t0) = g0, g(t1) = g1.
inline double halfplane_linear_piece(double t0, double t1, double g0, double g1, double x,
                                     double y) {
  const double s = (g1 - g0) / (t1 - t0);
  const double a = g0 + s * (x - t0);
  const double ang = std::atan2(t1 - x, y) - std::atan2(t0 - x, y);
  const double lg = 0.5 * y *
                    std::log(((t1 - x) * (t1 - x) + y * y) / ((t0 - x) * (t0 - x) + y * y));
  return (a * ang + s * lg) / pi;
}

/// Half-plane Poisson integral of the piecewise-linear interpolant of the
/// diameter samples. On the real axis it returns the limit from above.
inline double halfplane_of_diameter(const std::vector<double>& g, cplx z) {
  const std::size_t md = g.size() - 1;
  const double x = z.real(), y = z.imag();
  if (y <= 0.0) {
    if (x < -1.0 || x > 1.0) return 0.0;
    const double pos = (x + 1.0) * md / 2.0;
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(pos), md - 1);
    const double w = pos - j;
    const double v = (1 - w) * g[j] + w * g[j + 1];
    return (x == -1.0 || x == 1.0) ? 0.5 * v : v;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < md; ++j) {
    const double t0 = -1.0 + 2.0 * j / md, t1 = -1.0 + 2.0 * (j + 1) / md;
    acc += halfplane_linear_piece(t0, t1, g[j], g[j + 1], x, y);
  }
  return acc;
}

/// Harmonic in the half-disc: 1 on the arc, 0 on the diameter.
inline double arc_measure(cplx z) {
  return 2.0 / pi * std::arg((1.0 + z) / (1.0 - z));
}

/// Harmonic in the half-disc: cos(theta) on the arc, 0 on the diameter.
inline double arc_cosine(cplx z) {
  if (std::abs(z) < 1e-8) return 0.0;
  return 2.0 / pi * ((z + 1.0 / z) * std::atanh(z)).imag();
}

}  // namespace detail

/// Harmonic extension into the upper half-disc. The diameter data are carried
/// by a closed-form half-plane integral; the remaining arc data, after removing
/// their corner values with two explicit harmonic functions, vanish at both
/// corners and are extended oddly to the full circle.
class HalfDiscExtension {
 public:
  explicit HalfDiscExtension(HalfDiscBoundary bf) : bf_(std::move(bf)) {
    if (bf_.arc.size() < 17 || bf_.diameter.size() < 17)
      throw PreconditionError("a boundary function needs at least 16 samples per piece");
    const std::size_t ma = bf_.arc.size() - 1;
    // Corner values seen from the arc: the half-plane term contributes half the
    // diameter value there.
    const double c0 = bf_.arc[0] - 0.5 * bf_.diameter.back();
    const double cpi = bf_.arc[ma] - 0.5 * bf_.diameter.front();
    a_ = 0.5 * (c0 + cpi);
    b_ = 0.5 * (c0 - cpi);
    odd_.values.assign(2 * ma, 0.0);
    for (std::size_t k = 1; k < ma; ++k) {
      const double th = pi * k / ma;
      const double v = bf_.arc[k] -
                       detail::halfplane_of_diameter(bf_.diameter, std::polar(1.0, th)) - a_ -
                       b_ * std::cos(th);
      odd_.values[k] = v;
      odd_.values[2 * ma - k] = -v;
    }
  }

  PoissonValue operator()(cplx z) const {
    if (z.imag() < 1e-4)
      throw DomainError("half-disc evaluation point is on or too near the diameter");
    if (std::abs(z) > 0.999) throw DomainError("half-disc evaluation point too near the arc");
    const double u = detail::halfplane_of_diameter(bf_.diameter, z) + poisson_disc(odd_, z).value +
                     a_ * detail::arc_measure(z) + b_ * detail::arc_cosine(z);
    return {u, false};
  }

 private:
  HalfDiscBoundary bf_;
  CircleSamples odd_;
  double a_ = 0.0, b_ = 0.0;
};

inline PoissonValue poisson_halfdisc(const HalfDiscBoundary& bf, cplx z) {
  return HalfDiscExtension(bf)(z);
}

// ---------------------------------------------------------------------------
// Conjugate function on the circle.

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

/// Trigonometric interpolation of uniform samples onto 2^k points.
inline std::vector<double> resample_pow2(const std::vector<double>& v) {
  const std::size_t m = v.size();
  const std::size_t target = std::bit_ceil(m);
  if (target == m) return v;
  std::vector<cplx> c(m, 0.0);
  for (std::size_t n = 0; n < m; ++n)
    for (std::size_t k = 0; k < m; ++k)
      c[n] += v[k] * std::polar(1.0, -2.0 * pi * static_cast<double>((n * k) % m) / m);
  std::vector<double> out(target);
  for (std::size_t j = 0; j < target; ++j) {
    const double th = 2.0 * pi * j / target;
    double acc = c[0].real();
    for (std::size_t n = 1; 2 * n < m; ++n) acc += 2.0 * (c[n] * std::polar(1.0, n * th)).real();
    if (m % 2 == 0) acc += c[m / 2].real() * std::cos(m / 2 * th);
    out[j] = acc / m;
  }
  return out;
}
}  // namespace detail

/// Boundary values of the harmonic conjugate (vanishing at the center) of the
/// harmonic extension of `bf`: Fourier mode n is multiplied by -i sign(n).
/// Non power-of-two inputs are resampled to the next power of two first.
inline CircleSamples hilbert_transform(const CircleSamples& bf) {
  if (bf.size() < 16) throw PreconditionError("a boundary function needs at least 16 samples");
  std::vector<double> in = detail::resample_pow2(bf.values);
  const std::size_t m = in.size();
  const std::size_t half = m / 2 + 1;
  std::vector<fftw_complex> spec(half);
  std::vector<double> out(m);

  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(), spec.data(), FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec.data(), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  spec[0][0] = spec[0][1] = 0.0;
  spec[half - 1][0] = spec[half - 1][1] = 0.0;  // Nyquist mode has no sign
  for (std::size_t n = 1; n + 1 < half; ++n) {
    const double re = spec[n][0], im = spec[n][1];
    spec[n][0] = im;  // (-i) * (re + i im)
    spec[n][1] = -re;
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  for (double& v : out) v /= static_cast<double>(m);
  return CircleSamples{std::move(out)};
}

/// Complex input is accepted only when it is real.
inline CircleSamples hilbert_transform(const std::vector<cplx>& bf) {
  CircleSamples re;
  for (const cplx& v : bf) {
    if (v.imag() != 0.0) throw PreconditionError("hilbert_transform requires real-valued data");
    re.values.push_back(v.real());
  }
  return hilbert_transform(re);
}

// ---------------------------------------------------------------------------
// Harmonic-measure constants.

struct KappaEstimate {
  double kappa;
  cplx argmax;
  int resolution;
  Json grid;  // descriptor for reproducibility
};

/// sup of u(z) / Im z, u the harmonic measure of the arc in the unit
/// half-disc, over |Re z| <= 0.9, Im z in [1e-3, 0.5], |z| <= 0.999.
inline KappaEstimate kappa_estimate(int resolution) {
  if (resolution < 64) throw PreconditionError("kappa grid resolution must be at least 64");
  const HalfDiscExtension u(HalfDiscBoundary::chi(static_cast<std::size_t>(resolution)));
  KappaEstimate best{-1.0, 0.0, resolution,
                     Json{{"kind", "half_disc"},
                          {"re", {-0.9, 0.9}},
                          {"im", {1e-3, 0.5}},
                          {"resolution", resolution}}};
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = 1e-3 + (0.5 - 1e-3) * iy / (resolution - 1);
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = -0.9 + 1.8 * ix / (resolution - 1);
      const cplx z(x, y);
      if (std::abs(z) > 0.999) continue;
      const double q = u(z).value / y;
      if (q > best.kappa) {
        best.kappa = q;
        best.argmax = z;
      }
    }
  }
  return best;
}

/// Harmonic measure of the top and sides of (-1,1) x (0,h), by separation of
/// variables: y/h + sum 2/(n pi) sin(n pi y/h) cosh(n pi x/h) / cosh(n pi/h).
inline double strip_measure(cplx z, double h) {
  const double x = std::abs(z.real()), y = z.imag();
  double u = y / h;
  for (int n = 1; n < 100000; ++n) {
    const double k = n * pi / h;
    // cosh(kx)/cosh(k) without overflow
    const double ratio = std::exp(k * (x - 1.0)) * (1.0 + std::exp(-2.0 * k * x)) /
                         (1.0 + std::exp(-2.0 * k));
    const double term = 2.0 / (n * pi) * std::sin(k * y) * ratio;
    u += term;
    if (2.0 / (n * pi) * ratio < 1e-17) break;
  }
  return u;
}

/// sup of u(z) / Im z for the strip measure over |Re z| <= 0.9,
/// Im z in [1e-3 h, 0.5 h].
inline KappaEstimate kappa_strip(double h, int resolution = 128) {
  if (!(h > 0)) throw DomainError("strip height must be positive");
  if (resolution < 64) throw PreconditionError("kappa grid resolution must be at least 64");
  KappaEstimate best{-1.0, 0.0, resolution,
                     Json{{"kind", "strip"},
                          {"height", h},
                          {"re", {-0.9, 0.9}},
                          {"im", {1e-3 * h, 0.5 * h}},
                          {"resolution", resolution}}};
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = h * (1e-3 + (0.5 - 1e-3) * iy / (resolution - 1));
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = -0.9 + 1.8 * ix / (resolution - 1);
      const double q = strip_measure(cplx(x, y), h) / y;
      if (q > best.kappa) {
        best.kappa = q;
        best.argmax = cplx(x, y);
      }
    }
  }
  return best;
}

/// u(z)/Im z on the kappa grid, for plotting.
inline void write_kappa_csv(std::ostream& os, int resolution) {
  const HalfDiscExtension ext(HalfDiscBoundary::chi(static_cast<std::size_t>(resolution)));
  os << "re,im,u,ratio\n";
  os.precision(17);
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = 1e-3 + (0.5 - 1e-3) * iy / (resolution - 1);
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = -0.9 + 1.8 * ix / (resolution - 1);
      if (std::abs(cplx(x, y)) > 0.999) continue;
      const double u = ext(cplx(x, y)).value;
      os << x << ',' << y << ',' << u << ',' << u / y << '\n';
    }
  }
}

struct MonteCarloEstimate {
  double mean;
  double standard_error;
  long walks;
};

/// Walk-on-spheres estimate of the harmonic measure of the arc seen from z.
inline MonteCarloEstimate harmonic_measure_mc(cplx z, long walks, std::uint64_t seed,
                                              double absorb = 1e-6) {
  if (!(z.imag() > 0 && std::abs(z) < 1)) throw DomainError("start point must lie in the half-disc");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  double sum = 0.0, sum_sq = 0.0;
  for (long w = 0; w < walks; ++w) {
    cplx p = z;
    double hit = 0.0;
    for (;;) {
      const double to_diam = p.imag();
      const double to_arc = 1.0 - std::abs(p);
      const double d = std::min(to_diam, to_arc);
      if (d < absorb) {
        hit = to_arc < to_diam ? 1.0 : 0.0;
        break;
      }
      p += std::polar(d, angle(rng));
    }
    sum += hit;
    sum_sq += hit * hit;
  }
  const double mean = sum / walks;
  const double var = std::max(0.0, sum_sq / walks - mean * mean);
  return {mean, std::sqrt(var / walks), walks};
}

// ---------------------------------------------------------------------------
// Hartogs verifier.

struct HartogsHypotheses {
  double l = 0.0;
  double L = 0.0;
  double alpha = 0.1;
  double eta = 0.05;
  double tail_fraction = 0.25;
  double tolerance = 1e-6;

  void validate() const {
    if (!(L >= l)) throw PreconditionError("hypotheses require L >= l");
    if (!(alpha > 0)) throw PreconditionError("hypotheses require alpha > 0");
    if (!(eta > 0 && eta < 1)) throw PreconditionError("hypotheses require 0 < eta < 1");
    if (!(tail_fraction > 0 && tail_fraction <= 1))
      throw PreconditionError("tail_fraction must lie in (0, 1]");
  }
};

struct HartogsCertificate {
  int nu_threshold;
  double kappa;
  double max_violation;
  bool pass;
  HartogsHypotheses hyp;
  Json grid;
};

inline Json to_json(const HartogsCertificate& c) {
  return {{"nu_threshold", c.nu_threshold}, {"kappa", c.kappa},       {"l", c.hyp.l},
          {"L", c.hyp.L},                   {"alpha", c.hyp.alpha},    {"eta", c.hyp.eta},
          {"max_violation", c.max_violation}, {"pass", c.pass},       {"grid", c.grid}};
}

using HartogsDomain = std::variant<HalfDisc, Strip>;

enum class PointRole { interior, boundary, diameter };

namespace detail {

struct Frame {
  double x_lo, x_hi;  // real extent
  double top;         // y of the top edge (strip) or radius (half-disc)
  bool strip;
  double center = 0.0;
};

inline Frame frame_of(const HartogsDomain& d) {
  if (const auto* h = std::get_if<HalfDisc>(&d)) {
    if (h->side != geometry::Side::upper)
      throw PreconditionError("the Hartogs verifier works on upper half-discs");
    return {h->center - h->radius, h->center + h->radius, h->radius, false, h->center};
  }
  const auto& s = std::get<Strip>(d);
  if (s.side != geometry::Side::upper)
    throw PreconditionError("the Hartogs verifier works on upper strips");
  return {s.real_extent.lo, s.real_extent.hi, s.height, true, s.real_extent.mid()};
}

inline PointRole classify(const Frame& f, cplx z) {
  const double tol = 1e-9 * std::min(f.x_hi - f.x_lo, f.top);
  if (std::abs(z.imag()) <= tol) return PointRole::diameter;
  if (f.strip) {
    if (std::abs(z.imag() - f.top) <= tol || std::abs(z.real() - f.x_lo) <= tol ||
        std::abs(z.real() - f.x_hi) <= tol)
      return PointRole::boundary;
    return PointRole::interior;
  }
  if (std::abs(std::abs(z - cplx(f.center, 0.0)) - f.top) <= tol) return PointRole::boundary;
  return PointRole::interior;
}

}  // namespace detail

inline PointRole classify_point(const HartogsDomain& d, cplx z) {
  return detail::classify(detail::frame_of(d), z);
}

/// Grid on the closed upper half-disc: arc, diameter and interior points.
inline std::vector<cplx> hartogs_grid(const HalfDisc& d, int n) {
  if (n < 4) throw EmptyGridError("grid resolution must be at least 4");
  std::vector<cplx> g;
  for (int k = 1; k < n; ++k) g.push_back(cplx(d.center, 0.0) + std::polar(d.radius, pi * k / n));
  for (int j = 0; j <= n; ++j) g.emplace_back(d.center - d.radius + 2.0 * d.radius * j / n, 0.0);
  for (cplx z : geometry::sample_grid(d, n))
    if (z.imag() > 0) g.push_back(z);
  return g;
}

/// Grid on the closed upper strip: bottom, top, sides and interior points.
inline std::vector<cplx> hartogs_grid(const Strip& s, int nx, int ny) {
  if (nx < 4 || ny < 2) throw EmptyGridError("grid resolution too small");
  std::vector<cplx> g;
  const double lo = s.real_extent.lo, hi = s.real_extent.hi, h = s.height;
  for (int j = 0; j <= nx; ++j) {
    const double x = lo + (hi - lo) * j / nx;
    g.emplace_back(x, 0.0);
    g.emplace_back(x, h);
  }
  for (int k = 1; k < ny + 1; ++k) {
    const double y = h * k / (ny + 1);
    g.emplace_back(lo, y);
    g.emplace_back(hi, y);
  }
  for (cplx z : geometry::sample_grid(s, nx, ny)) g.push_back(z);
  return g;
}

/// kappa for the domain, scaled to its size.
inline double domain_kappa(const HartogsDomain& d, int resolution = 128) {
  if (const auto* h = std::get_if<HalfDisc>(&d))
    return kappa_estimate(resolution).kappa / h->radius;
  const auto& s = std::get<Strip>(d);
  // kappa_strip is computed on (-1,1); rescale the real extent to that.
  const double half_width = 0.5 * s.real_extent.length();
  return kappa_strip(s.height / half_width, resolution).kappa / half_width;
}

/// Empirical check of the hypotheses on the trailing window, then the smallest
/// nu_threshold such that the bound holds for every nu >= nu_threshold.
/// The bound is checked at interior points with Im tau >= eta over the central
/// 90% of the real extent, where kappa was computed.
inline HartogsCertificate verify_hartogs(const taylor::CoeffLogSequence& seq,
                                         const HartogsDomain& dom, const HartogsHypotheses& hyp,
                                         std::optional<double> kappa = std::nullopt) {
  hyp.validate();
  const detail::Frame fr = detail::frame_of(dom);
  const double tol = hyp.tolerance;

  std::vector<std::size_t> bdry, diam, check;
  const double mid = 0.5 * (fr.x_lo + fr.x_hi), half = 0.5 * (fr.x_hi - fr.x_lo);
  for (std::size_t j = 0; j < seq.grid.size(); ++j) {
    const cplx z = seq.grid[j];
    switch (detail::classify(fr, z)) {
      case PointRole::boundary: bdry.push_back(j); break;
      case PointRole::diameter: diam.push_back(j); break;
      case PointRole::interior:
        if (z.imag() >= hyp.eta && std::abs(z.real() - mid) <= 0.9 * half) check.push_back(j);
        break;
    }
  }
  if (bdry.empty() || diam.empty())
    throw PreconditionError("sequence grid must include boundary and diameter points");
  if (check.empty()) throw PreconditionError("sequence grid has no points with Im >= eta");

  const int n_total = seq.nu_max - seq.nu_min + 1;
  const int count = std::max(1, static_cast<int>(std::ceil(hyp.tail_fraction * n_total)));
  const int window_lo = seq.nu_max - std::min(count, n_total) + 1;

  double worst_bdry = taylor::kNegInf, worst_diam = taylor::kNegInf, worst_all = taylor::kNegInf;
  for (int nu = seq.nu_min; nu <= seq.nu_max; ++nu) {
    for (std::size_t j = 0; j < seq.grid.size(); ++j) worst_all = std::max(worst_all, seq.at(nu, j));
    if (nu < window_lo) continue;
    for (std::size_t j : bdry) worst_bdry = std::max(worst_bdry, seq.at(nu, j));
    for (std::size_t j : diam) worst_diam = std::max(worst_diam, seq.at(nu, j));
  }
  if (worst_bdry > hyp.l + tol)
    throw HypothesisViolation("boundary", "boundary tail sup " + std::to_string(worst_bdry) +
                                              " exceeds l = " + std::to_string(hyp.l));
  if (worst_diam > tol)
    throw HypothesisViolation("diameter",
                              "real-axis tail sup " + std::to_string(worst_diam) + " exceeds 0");
  if (worst_all > hyp.L + tol)
    throw HypothesisViolation("global", "global sup " + std::to_string(worst_all) +
                                            " exceeds L = " + std::to_string(hyp.L));

  const double k = kappa ? *kappa : domain_kappa(dom);
  std::vector<double> slack(n_total, taylor::kNegInf);
  for (int nu = seq.nu_min; nu <= seq.nu_max; ++nu)
    for (std::size_t j : check) {
      const double s = seq.at(nu, j) - hyp.alpha - hyp.l * k * seq.grid[j].imag();
      slack[nu - seq.nu_min] = std::max(slack[nu - seq.nu_min], s);
    }

  // Suffix maxima give the threshold directly.
  int threshold = seq.nu_max + 1;
  double suffix = taylor::kNegInf;
  for (int nu = seq.nu_max; nu >= seq.nu_min; --nu) {
    suffix = std::max(suffix, slack[nu - seq.nu_min]);
    if (suffix <= tol) threshold = nu;
    else break;
  }
  const bool pass = threshold <= window_lo;
  double worst = taylor::kNegInf;
  for (int nu = pass ? threshold : window_lo; nu <= seq.nu_max; ++nu)
    worst = std::max(worst, slack[nu - seq.nu_min]);

  Json grid{{"domain", std::visit([](const auto& v) { return geometry::to_json(v); }, dom)},
            {"points", seq.grid.size()},
            {"nu_min", seq.nu_min},
            {"nu_max", seq.nu_max}};
  return {threshold, k, worst, pass, hyp, std::move(grid)};
}

}  // namespace crext::harmonic
