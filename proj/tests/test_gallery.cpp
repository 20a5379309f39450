#include <catch_amalgamated.hpp>

#include <cmath>

#include "crext/edgewedge.hpp"
#include "crext/gallery.hpp"

using namespace crext;
using namespace crext::gallery;

TEST_CASE("registry", "[gallery]") {
  CHECK(list().size() == 5);
  CHECK_THROWS_AS(oracle("nope"), ConfigError);
  CHECK_THROWS_AS(oracle("good2s", Json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(oracle("good2s", Json{{"shift", 1.5}}), ConfigError);
  CHECK(oracle("onesided", Json{{"height", 0.7}}).params.at("height") == 0.7);
  CHECK(oracle("cordaro").meta.expected == Expected::not_tempered);
  CHECK(oracle("flat").meta.expected == Expected::not_cr_extendible);
  CHECK(oracle("onesided").meta.expected == Expected::one_sided_up);
}

TEST_CASE("closed forms at fixed points", "[gallery]") {
  CHECK(std::abs(oracle("good2s")(0.0, 0.0) - 1.0 / 3.0) < 1e-15);
  const auto c = oracle("cordaro");
  for (double x1 : {-0.7, 0.0, 0.3, 1.0}) CHECK(c(x1, 0.0) == 0.0);
  CHECK(std::abs(c(0.5, 0.25) - 0.2397127693021015) < 1e-12);
  const auto f = oracle("flat");
  CHECK(std::abs(f(1.0, 1.0) - 0.6065306597126334) < 1e-12);
  CHECK(f(0.0, 0.0) == 0.0);
  CHECK(std::isnan(f(cplx(0.3, 0), cplx(0, 0.3)).real()));
}

TEST_CASE("every oracle matches its definition on 25 rational points", "[gallery][property]") {
  const auto g = oracle("good2s");
  const auto e = oracle("entire");
  const auto o = oracle("onesided");
  const auto c = oracle("cordaro");
  const auto f = oracle("flat");
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      const double x1 = a / 3.0 + 0.1, x2 = b / 4.0;  // x1 never 0
      CHECK(std::abs(g(x1, x2) - 1.0 / (3.0 - x1 - x2)) < 1e-12);
      CHECK(std::abs(e(x1, x2) - std::exp(x1 * x2)) < 1e-12);
      CHECK(std::abs(o(x1, x2) - 1.0 / cplx(x2 - x1, -0.5)) < 1e-12);
      CHECK(std::abs(c(x1, x2) - x1 * std::sin(x2 / x1)) < 1e-12);
      CHECK(std::abs(f(x1, x2) - x1 * x2 * std::exp(-1.0 / (x1 * x1 + x2 * x2))) < 1e-12);
    }
}

TEST_CASE("cordaro is continuous and bounded by |x1|", "[gallery][property]") {
  const auto c = oracle("cordaro");
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) {
      const double x1 = i / 20.0, x2 = j / 20.0;
      CHECK(std::abs(c(x1, x2)) <= std::abs(x1) + 1e-15);
    }
}

TEST_CASE("cordaro slices lose uniform continuity near x1 = 0", "[gallery]") {
  const auto c = oracle("cordaro");
  const geometry::Strip region(geometry::Interval(-1, 1), 0.5, geometry::Side::upper);
  for (double y : {0.1, 0.05, 0.02}) {
    const double x1 = y * y;
    const auto m = edgewedge::uniform_continuity_modulus([&](cplx z) { return c(x1, z); }, region, {y});
    CHECK(m.gaps[0].gap > 0.5);
  }
}

TEST_CASE("metadata", "[gallery]") {
  const auto f = oracle("flat");
  CHECK(*f.z2_radius(0.25, 0.0) == Catch::Approx(0.25));
  CHECK(f.meta.eps1(0.5) == 0.5);
  const auto o = oracle("onesided");
  CHECK(o.defined_at(0.0, cplx(0.3, 0.2)));
  CHECK_FALSE(o.defined_at(0.0, cplx(0.3, 0.46)));
  CHECK_FALSE(o.defined_at(0.0, cplx(0.3, -0.1)));
  CHECK(oracle("good2s").defined_at(0.5, -1.0));
  CHECK_FALSE(oracle("good2s").defined_at(1.5, 0.0));
  CHECK_FALSE(oracle("cordaro").defined_at(cplx(0.0, 0.1), 0.3));
}

TEST_CASE("temperedness probe", "[gallery]") {
  const auto r = temperedness_probe(oracle("cordaro"), 0.0);
  CHECK(r.verdict == "not_tempered");
  CHECK_FALSE(r.tempered);
  const auto& s10 = r.samples[10 - 2];
  REQUIRE(s10.nu == 10);
  CHECK(std::exp(s10.log_abs_f) == Catch::Approx(std::sinh(10.0) / 100).epsilon(1e-12));
  CHECK(std::abs(std::exp(s10.log_abs_f) - 110.1323) < 1e-4);
  CHECK(s10.min_k == 3);

  const auto g = temperedness_probe(oracle("good2s"), 0.3);
  CHECK(g.tempered);
  CHECK(g.fitted_k == 0);

  SeparateOracle konst = oracle("entire");
  konst.eval = [](cplx, cplx) { return cplx(0.5); };
  const auto k = temperedness_probe(konst, 0.0);
  CHECK(k.tempered);
  CHECK(k.fitted_k == 0);
  CHECK(to_json(k).at("verdict") == "tempered");
}

TEST_CASE("radius collapse probe", "[gallery]") {
  const auto f = radius_collapse_probe(oracle("flat"), 2, {{0.5, 0}, {0.25, 0}, {0.125, 0}});
  CHECK(f.verdict == "not_cr_extendible");
  for (const auto& s : f.samples) {
    REQUIRE_FALSE(s.error);
    CHECK(std::abs(s.radius - s.point.x1) <= 0.3 * s.point.x1);
  }
  CHECK(f.samples[0].radius > f.samples[1].radius);
  CHECK(f.samples[1].radius > f.samples[2].radius);

  const auto g = radius_collapse_probe(oracle("good2s"), 2, {{0.9, 0}, {0.0, 0.2}, {-0.8, -0.5}});
  CHECK(g.verdict == "bounded_below");
  for (const auto& s : g.samples) CHECK(s.radius >= 1.0);

  SeparateOracle poly = oracle("entire");
  poly.eval = [](cplx z1, cplx z2) { return 1.0 + z1 * z2 * z2; };
  const auto p = radius_collapse_probe(poly, 2, {{0.5, 0}, {0.25, 0}});
  for (const auto& s : p.samples) CHECK(std::isinf(s.radius));
  CHECK(p.verdict == "bounded_below");

  // A path through the singular slice records the failure and carries on.
  const auto c = radius_collapse_probe(oracle("cordaro"), 1, {{0.5, 0.3}, {0.25, 0.3}});
  for (const auto& s : c.samples) CHECK(s.error);
  CHECK(to_json(c).at("samples").size() == 2);
}

TEST_CASE("flat slices reproduce themselves within the tail bound", "[gallery][property]") {
  const auto f = oracle("flat");
  for (double t : {0.6, 0.4, 0.3}) {
    const double rq = 0.8 * t;
    const auto s = taylor::coeffs_from_oracle([&](cplx z) { return f(t, z); }, 0.0, rq, 256);
    const double r_est = taylor::radius_root_test(s);
    for (int k = 0; k < 12; ++k) {
      const double x = -0.5 * r_est + r_est * k / 11.0;  // real points within half the radius
      const auto e = taylor::evaluate(s, x);
      CHECK(std::abs(e.value - f(t, x)) <= e.tail_bound + 1e-13);
    }
  }
}
