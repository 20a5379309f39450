#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "crext/taylor.hpp"

using namespace crext;
using namespace crext::taylor;

namespace {

// Exact binomial-sum recentering of an explicit coefficient list (independent
// of the synthetic-division path): b_mu = sum_{nu >= mu} a_nu C(nu, mu) s^{nu - mu}.
std::vector<cplx> brute_recenter(const std::vector<cplx>& a, cplx s, int keep) {
  std::vector<cplx> b(keep + 1, 0.0);
  for (int mu = 0; mu <= keep; ++mu) {
    double binom = 1.0;  // C(mu, mu)
    cplx sp = 1.0;
    for (int nu = mu; nu < static_cast<int>(a.size()); ++nu) {
      b[mu] += a[nu] * binom * sp;
      binom = binom * (nu + 1) / (nu + 1 - mu);
      sp *= s;
    }
  }
  return b;
}

TaylorSeries exact_series(cplx center, std::vector<cplx> c) {
  return TaylorSeries{center, std::move(c), std::nullopt, std::nullopt, 0.0};
}

}  // namespace

TEST_CASE("coefficients of closed-form oracles", "[taylor]") {
  SECTION("geometric series") {
    const auto s = coeffs_from_oracle([](cplx z) { return 1.0 / (1.0 - z); }, 0.0, 0.5, 8, 256);
    for (int nu = 0; nu <= 8; ++nu) CHECK(std::abs(s.coeffs[nu] - 1.0) < 1e-10);
  }
  SECTION("constant") {
    const cplx c(2.5, -1.0);
    const auto s = coeffs_from_oracle([&](cplx) { return c; }, 0.3, 0.7, 10);
    CHECK(std::abs(s.coeffs[0] - c) < 1e-12);
    for (int nu = 1; nu <= 10; ++nu) CHECK(std::abs(s.coeffs[nu]) < 1e-12);
  }
  SECTION("1/(2-z): a_nu = 2^{-nu-1}") {
    const auto s = coeffs_from_oracle([](cplx z) { return 1.0 / (2.0 - z); }, 0.0, 1.0, 12);
    for (int nu = 0; nu <= 12; ++nu)
      CHECK(std::abs(s.coeffs[nu] - std::ldexp(1.0, -nu - 1)) < 1e-9);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(coeffs_from_oracle([](cplx z) { return z; }, 0.0, 1.0, 8, 20),
                    PreconditionError);
    try {
      coeffs_from_oracle([](cplx z) { return 1.0 / (z - 0.5); }, 0.0, 0.5, 3, 16);
      FAIL("expected extraction error");
    } catch (const ExtractionError& e) {
      CHECK(std::abs(e.point() - cplx(0.5, 0)) < 1e-12);
    }
  }
}

TEST_CASE("evaluation with tail bound", "[taylor]") {
  const auto geo = exact_series(0.0, std::vector<cplx>(51, 1.0));
  const auto e = evaluate(geo, 0.5);
  CHECK(std::abs(e.value - 2.0) < 1e-12);

  const auto at_center = evaluate(geo, 0.0);
  CHECK(at_center.value == geo.coeffs[0]);
  CHECK(at_center.tail_bound == 0.0);

  std::vector<cplx> half(41);
  for (int nu = 0; nu <= 40; ++nu) half[nu] = std::ldexp(1.0, -nu - 1);
  const auto s = exact_series(0.0, half);
  const cplx z(1.0, 0.5);
  CHECK(std::abs(evaluate(s, z).value - 1.0 / (2.0 - z)) < 1e-8);

  CHECK_THROWS_AS(evaluate(geo, 1.5), DivergenceError);
  auto declared = geo;
  declared.declared_radius = 0.4;
  CHECK_THROWS_AS(evaluate(declared, 0.45), DomainError);
}

TEST_CASE("tail bound dominates the truncation error on 0.8 r_est", "[taylor][property]") {
  struct Case {
    cplx pole;
    int order;
  };
  for (const Case& c : {Case{2.0, 40}, Case{{0.0, 1.5}, 32}, Case{{-1.2, 0.9}, 64}}) {
    const auto s = coeffs_from_oracle([&](cplx z) { return 1.0 / (c.pole - z); }, 0.0,
                                      0.8 * std::abs(c.pole), c.order);
    const double r_est = radius_root_test(s);
    for (int k = 0; k < 16; ++k) {
      const cplx z = std::polar(0.8 * r_est, 2 * std::numbers::pi * k / 16);
      const auto e = evaluate(s, z);
      CHECK(std::abs(e.value - 1.0 / (c.pole - z)) <= e.tail_bound);
    }
  }
}

TEST_CASE("root-test radius", "[taylor]") {
  std::vector<cplx> geo(101);
  const double r = 0.7;
  for (int nu = 0; nu <= 100; ++nu) geo[nu] = std::pow(r, -nu);
  CHECK(radius_root_test(exact_series(0.0, geo)) == Catch::Approx(r).epsilon(0.02));

  std::vector<cplx> poly(65, 0.0);
  poly[0] = 1.0;
  poly[3] = 2.0;
  CHECK(std::isinf(radius_root_test(exact_series(0.0, poly))));

  const auto quad_poly = coeffs_from_oracle([](cplx z) { return 1.0 + z * z * z; }, 0.0, 0.5, 64);
  CHECK(std::isinf(radius_root_test(quad_poly)));

  const auto s = coeffs_from_oracle([](cplx z) { return 1.0 / (2.0 - z); }, 0.0, 1.6, 64);
  CHECK(radius_root_test(s) == Catch::Approx(2.0).epsilon(0.02));

  CHECK_THROWS_AS(radius_root_test(exact_series(0.0, std::vector<cplx>(5, 1.0))),
                  PreconditionError);
}

TEST_CASE("recentering", "[taylor]") {
  const int n = 60;
  const auto geo = exact_series(0.0, std::vector<cplx>(n + 1, 1.0));

  SECTION("1/(1-z) moved to 1/2 has b_mu = 2^{mu+1}") {
    const auto b = recenter(geo, 0.5);
    CHECK(b.center == cplx(0.5));
    for (int mu = 0; mu <= n / 2; ++mu)
      CHECK(std::abs(b.coeffs[mu] - std::ldexp(1.0, mu + 1)) / std::ldexp(1.0, mu + 1) < 1e-8);
  }
  SECTION("zero shift is the identity") {
    const auto b = recenter(geo, 0.0);
    CHECK(b.coeffs == geo.coeffs);
  }
  SECTION("there and back again") {
    const cplx c(0.2, 0.1);
    const auto back = recenter(recenter(geo, c), 0.0);
    for (int nu = 0; nu <= n / 2; ++nu) CHECK(std::abs(back.coeffs[nu] - geo.coeffs[nu]) < 1e-7);
  }
  SECTION("matches the brute binomial sum for entire data") {
    std::vector<cplx> e(41);
    double f = 1.0;
    for (int nu = 0; nu <= 40; ++nu) {
      e[nu] = 1.0 / f;
      f *= nu + 1;
    }
    const cplx s(0.4, -0.3);
    const auto b = recenter(exact_series(0.0, e), s);
    const auto ref = brute_recenter(e, s, 40);
    for (int mu = 0; mu <= 20; ++mu) CHECK(std::abs(b.coeffs[mu] - ref[mu]) < 1e-13);
    // And agrees with exp(s) * s^... closed form: exp(z) around s has b_mu = e^s / mu!.
    double fact = 1.0;
    for (int mu = 0; mu <= 20; ++mu) {
      CHECK(std::abs(b.coeffs[mu] - std::exp(s) / fact) < 1e-12);
      fact *= mu + 1;
    }
  }
  SECTION("shift beyond the estimated radius") {
    CHECK_THROWS_AS(recenter(geo, 1.0), OutOfRadiusError);
  }
}

TEST_CASE("two successive shifts agree with a single shift", "[taylor][property]") {
  struct Case {
    cplx pole;
    cplx s1, s2;
  };
  const std::vector<Case> cases{{2.0, 0.3, 0.5},
                                {{0.0, 1.2}, {0.2, 0.1}, {-0.1, 0.3}},
                                {{-1.0, -1.0}, {-0.3, 0.0}, {0.0, -0.5}},
                                {{0.5, 0.9}, {0.1, 0.1}, {0.2, 0.1}}};
  for (const auto& c : cases) {
    const auto s = coeffs_from_oracle([&](cplx z) { return 1.0 / (c.pole - z); }, 0.0,
                                      0.8 * std::abs(c.pole), 48);
    const double r_est = radius_root_test(s);
    REQUIRE(std::abs(c.s1) + std::abs(c.s2) <= 0.8 * r_est);
    const auto twice = recenter(recenter(s, c.s1), c.s1 + c.s2);
    const auto once = recenter(s, c.s1 + c.s2);
    for (int mu = 0; mu <= 24; ++mu) {
      const double scale = std::max(1.0, std::abs(once.coeffs[mu]));
      CHECK(std::abs(twice.coeffs[mu] - once.coeffs[mu]) / scale < 1e-6);
    }
  }
}

TEST_CASE("phi sequences", "[taylor]") {
  // a_nu(z1) = z1^nu gives phi_nu = log|z1|.
  const std::vector<cplx> grid{{0.5, 0.1}, {-0.3, 0.4}, {0.9, 0.0}};
  std::vector<TaylorSeries> fields;
  for (cplx z1 : grid) {
    std::vector<cplx> c(21);
    for (int nu = 0; nu <= 20; ++nu) c[nu] = std::pow(z1, nu);
    fields.push_back(exact_series(0.0, c));
  }
  const auto seq = phi_sequence(fields, grid, 1, 20);
  for (int nu = 1; nu <= 20; ++nu)
    for (std::size_t j = 0; j < grid.size(); ++j)
      CHECK(seq.at(nu, j) == Catch::Approx(std::log(std::abs(grid[j]))).margin(1e-12));

  // 1/(2 - z2): phi_nu = (1/nu) log 2^{-nu-1} -> -log 2.
  std::vector<cplx> half(201);
  for (int nu = 0; nu <= 200; ++nu) half[nu] = std::ldexp(1.0, -nu - 1);
  const auto seq2 = phi_sequence({exact_series(0.0, half)}, {0.0}, 1, 200);
  for (int nu : {1, 10, 200})
    CHECK(seq2.at(nu, 0) == Catch::Approx(-(nu + 1.0) / nu * std::log(2.0)));
  CHECK(std::abs(seq2.at(200, 0) + std::log(2.0)) < 0.01);

  const auto zero = phi_sequence({exact_series(0.0, std::vector<cplx>(5, 0.0))}, {0.0}, 1, 4);
  CHECK(zero.at(3, 0) == kNegInf);
  CHECK_THROWS_AS(phi_sequence(fields, grid, 1, 30), PreconditionError);
}

TEST_CASE("log-coefficients of holomorphic fields satisfy the sub-mean-value inequality",
          "[taylor][property]") {
  // f(z1, z2) = 1 / (3 - z1 - z2) + exp(z1 z2): coefficients in z2 are holomorphic in z1.
  auto field_at = [](cplx z1) {
    return coeffs_from_oracle(
        [&](cplx z2) { return 1.0 / (3.0 - z1 - z2) + std::exp(z1 * z2); }, 0.0, 1.0, 24);
  };
  const std::vector<cplx> centers{{0.0, 0.0}, {0.3, 0.2}, {-0.4, -0.1}};
  const double rho = 0.25;
  const int m = 64;
  for (cplx c : centers) {
    std::vector<cplx> grid{c};
    for (int k = 0; k < m; ++k) grid.push_back(c + std::polar(rho, 2 * std::numbers::pi * k / m));
    std::vector<TaylorSeries> fields;
    for (cplx z : grid) fields.push_back(field_at(z));
    const auto seq = phi_sequence(fields, grid, 1, 20);
    for (int nu = 1; nu <= 20; ++nu) {
      double mean = 0.0;
      for (int k = 1; k <= m; ++k) mean += seq.at(nu, k);
      mean /= m;
      CHECK(seq.at(nu, 0) <= mean + 1e-3);
    }
  }
}

TEST_CASE("series JSON and sequence CSV", "[taylor]") {
  auto s = exact_series({0.5, -0.25}, {{1, 2}, {3, 4}});
  s.declared_radius = 0.75;
  const Json j = to_json(s);
  CHECK(j.at("center") == Json::array({0.5, -0.25}));
  CHECK(j.at("coeffs")[1] == Json::array({3.0, 4.0}));
  CHECK(to_json(series_from_json(j)) == j);

  const auto seq = phi_sequence({exact_series(0.0, {1.0, 0.0, 4.0})}, {{0.1, 0.2}}, 1, 2);
  std::ostringstream os;
  write_csv(os, seq);
  CHECK(os.str().rfind("nu,z1_re,z1_im,phi\n", 0) == 0);
  CHECK(os.str().find("-inf") != std::string::npos);
}
