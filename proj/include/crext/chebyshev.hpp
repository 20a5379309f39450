// Chebyshev points of the first kind on [a, b], barycentric interpolation,
// and Chebyshev expansions evaluated at complex arguments.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "crext/errors.hpp"

namespace crext::chebyshev {

struct Grid {
  double a = -1.0, b = 1.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

inline Grid first_kind(int n, double a, double b) {
  if (n < 2) throw PreconditionError("need at least 2 Chebyshev nodes");
  if (!(a < b)) throw PreconditionError("Chebyshev interval needs a < b");
  Grid g{a, b, {}, {}};
  for (int k = 0; k < n; ++k) {
    const double t = (2.0 * k + 1.0) * std::numbers::pi / (2.0 * n);
    g.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * std::cos(t));
    g.weights.push_back(((k % 2) ? -1.0 : 1.0) * std::sin(t));
  }
  return g;
}

/// Normalized barycentric weights l_k(z), sum_k l_k(z) f_k = p(z).
inline std::vector<cplx> lagrange_weights(const Grid& g, cplx z) {
  std::vector<cplx> l(g.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    if (z == cplx(g.nodes[k], 0.0)) {
      l.assign(g.size(), 0.0);
      l[k] = 1.0;
      return l;
    }
  cplx sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    l[k] = g.weights[k] / (z - g.nodes[k]);
    sum += l[k];
  }
  for (auto& v : l) v /= sum;
  return l;
}

/// Interpolant of node values at z.
inline cplx interpolate(const Grid& g, const std::vector<cplx>& values, cplx z) {
  if (values.size() != g.size()) throw PreconditionError("one value per node is required");
  const auto l = lagrange_weights(g, z);
  cplx s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += l[k] * values[k];
  return s;
}

/// Expansion coefficients c_0..c_{n-1} of the interpolant, p = sum c_m T_m(t),
/// t the affine image of [a, b] on [-1, 1].
inline std::vector<cplx> coefficients(const Grid& g, const std::vector<cplx>& values) {
  const std::size_t n = g.size();
  if (values.size() != n) throw PreconditionError("one value per node is required");
  std::vector<cplx> c(n);
  for (std::size_t m = 0; m < n; ++m) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += values[k] * std::cos(m * (2.0 * k + 1.0) * std::numbers::pi / (2.0 * n));
    c[m] = acc * (m == 0 ? 1.0 : 2.0) / static_cast<double>(n);
  }
  return c;
}

inline cplx to_unit(const Grid& g, cplx z) { return (2.0 * z - (g.a + g.b)) / (g.b - g.a); }

/// sum_{m < len} c_m T_m(t) by the Clenshaw recurrence.
inline cplx clenshaw(const std::vector<cplx>& c, std::size_t len, cplx t) {
  cplx b1 = 0.0, b2 = 0.0;
  for (std::size_t m = len; m-- > 1;) {
    const cplx b0 = 2.0 * t * b1 - b2 + c[m];
    b2 = b1;
    b1 = b0;
  }
  return len == 0 ? cplx(0.0) : t * b1 - b2 + c[0];
}

/// sum_{m < len} |T_m(t)|.
inline double abs_sum(std::size_t len, cplx t) {
  double s = 0.0;
  cplx t0 = 1.0, t1 = t;
  for (std::size_t m = 0; m < len; ++m) {
    s += std::abs(t0);
    const cplx t2 = 2.0 * t * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return s;
}

}  // namespace crext::chebyshev
