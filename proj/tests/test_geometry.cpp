#include <catch_amalgamated.hpp>

#include <numbers>

#include "crext/geometry.hpp"

using namespace crext;
using namespace crext::geometry;
using std::numbers::pi;

TEST_CASE("membership follows the open-set definitions", "[geometry]") {
  CHECK(Disc({0, 0}, 1).contains({0.5, 0}));
  CHECK_FALSE(Disc({0, 0}, 1).contains({1.0, 0}));
  CHECK_FALSE(HalfDisc(0, 1, Side::upper).contains({0.5, -0.1}));
  CHECK(HalfDisc(0, 1, Side::upper).contains({0.5, 0.0}));  // closed on the diameter
  CHECK(HalfDisc(0, 1, Side::lower).contains({0.5, -0.1}));

  const Strip upper(Interval(-1, 1), 0.1, Side::upper);
  CHECK(upper.contains({0.0, 0.05}));
  CHECK_FALSE(upper.contains({0.0, 0.0}));
  CHECK_FALSE(upper.contains({1.0, 0.05}));

  const Wedge w(Interval(-1, 1), Interval(-1, 1), Cone({0, 1}, pi / 6), 0.1);
  CHECK(w.contains({{0, 0}, {0, 0.05}}));
  CHECK_FALSE(w.contains({{0, 0}, {0, 0.15}}));
  CHECK_FALSE(w.contains({{0, 0.05}, {0, 0.05}}));  // 45 degrees off axis
  CHECK_FALSE(w.contains({{0.3, 0}, {0.2, 0}}));
  CHECK(w.contains({{0.3, 0}, {0.2, 0}}, true));
}

TEST_CASE("invalid values are rejected", "[geometry]") {
  CHECK_THROWS_AS(Interval(1, 1), DomainError);
  CHECK_THROWS_AS(Disc({0, 0}, 0), DomainError);
  CHECK_THROWS_AS(Cone({0, 1}, pi / 2), DomainError);
  CHECK_THROWS_AS(Cone({0, 0}, 0.3), DomainError);
  CHECK_THROWS_AS(Strip(Interval(-1, 1), -0.1), DomainError);
}

TEST_CASE("proper subcones", "[geometry]") {
  const Cone outer({0, 1}, pi / 4);
  CHECK(is_proper_subcone(Cone({0, 1}, pi / 8), outer));
  CHECK_FALSE(is_proper_subcone(outer, outer));
  // Axes pi/4 apart: pi/4 + pi/8 exceeds pi/4. Confirm by sampling the inner
  // cone's boundary rays: one of them leaves the outer cone.
  const Cone tilted({std::sin(pi / 4), std::cos(pi / 4)}, pi / 8);
  CHECK_FALSE(is_proper_subcone(tilted, outer));
  bool some_ray_outside = false;
  const double base = std::atan2(tilted.axis.x2, tilted.axis.x1);
  for (double a : {-tilted.aperture, tilted.aperture}) {
    const R2 ray{std::cos(base + a), std::sin(base + a)};
    some_ray_outside |= !outer.contains(ray);
  }
  CHECK(some_ray_outside);
}

TEST_CASE("subcone relation is irreflexive and transitive on a cone family", "[geometry][property]") {
  std::vector<Cone> family;
  for (double tilt : {-0.3, -0.1, 0.0, 0.1, 0.25})
    for (double ap : {0.1, 0.3, 0.6, 0.9, 1.3})
      family.emplace_back(R2{std::sin(tilt), std::cos(tilt)}, ap);
  for (const auto& a : family) {
    CHECK_FALSE(is_proper_subcone(a, a));
    for (const auto& b : family)
      for (const auto& c : family)
        if (is_proper_subcone(a, b) && is_proper_subcone(b, c))
          CHECK(is_proper_subcone(a, c));
  }
}

TEST_CASE("sampling grids", "[geometry]") {
  const auto g = sample_grid(Interval(-1, 1), 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == Catch::Approx(-0.5));
  CHECK(g[1] == Catch::Approx(0.0).margin(1e-15));
  CHECK(g[2] == Catch::Approx(0.5));

  const Strip s(Interval(-1, 1), 0.1, Side::upper);
  const auto sg = sample_grid(s, 4, 4);
  CHECK(sg.size() == 16);
  for (cplx z : sg) CHECK((z.imag() > 0 && z.imag() < 0.1));

  CHECK_THROWS_AS(sample_grid(Interval(0, 1), 1), EmptyGridError);
  CHECK(sample_grid(Interval(0, 1), 5) == sample_grid(Interval(0, 1), 5));
}

TEST_CASE("every sampled point is a member", "[geometry][property]") {
  for (int n : {2, 3, 7, 16}) {
    const Disc d({0.2, -0.1}, 0.7);
    for (cplx z : sample_grid(d, n)) CHECK(d.contains(z));
    const HalfDisc h(0.1, 0.5, Side::lower);
    for (cplx z : sample_grid(h, n)) CHECK(h.contains(z));
    const Strip st(Interval(-0.5, 2), 0.3, Side::two_sided);
    for (cplx z : sample_grid(st, n, n)) CHECK(st.contains(z));
    const Cone c({1, 1}, 0.4);
    for (const R2& y : sample_grid(c, n)) CHECK(c.contains(y));
    const Wedge w(Interval(-1, 1), Interval(0, 2), Cone({0, 1}, 0.5), 0.2);
    for (const C2& p : sample_grid(w, n)) CHECK(w.contains(p));
  }
}

TEST_CASE("wedge membership is translation invariant along real vectors", "[geometry][property]") {
  const Wedge w(Interval(-1, 1), Interval(-1, 1), Cone({0.2, 1}, 0.6), 0.3);
  const R2 shift{0.37, -0.21};
  const Wedge moved(Interval(-1 + shift.x1, 1 + shift.x1), Interval(-1 + shift.x2, 1 + shift.x2),
                    w.cone, w.epsilon);
  for (double x1 : {-0.9, -0.2, 0.5, 0.95})
    for (double x2 : {-0.7, 0.0, 0.8})
      for (double y1 : {-0.2, -0.05, 0.0, 0.1})
        for (double y2 : {0.0, 0.05, 0.2, 0.29}) {
          const C2 p{{x1, y1}, {x2, y2}};
          const C2 q{{x1 + shift.x1, y1}, {x2 + shift.x2, y2}};
          CHECK(w.contains(p) == moved.contains(q));
        }
}

TEST_CASE("geometry JSON round trip keeps kind and fields", "[geometry]") {
  const std::vector<Domain> values{
      Interval(-1, 1), Disc({0.5, -0.25}, 2), HalfDisc(0.1, 1, Side::lower),
      Strip(Interval(-1, 1), 0.2, Side::upper), Cone({0, 1}, 0.5),
      Wedge(Interval(-1, 1), Interval(-0.5, 0.5), Cone({0, 1}, 0.3), 0.1)};
  for (const auto& v : values) {
    const Json j = to_json(v);
    CHECK(to_json(domain_from_json(j)) == j);
  }
  const Json strip = to_json(Strip(Interval(-1, 1), 0.2, Side::upper));
  CHECK(strip.at("kind") == "strip");
  CHECK(strip.at("epsilon") == 0.2);
  CHECK_THROWS_AS(domain_from_json(Json{{"kind", "torus"}}), DomainError);
}
