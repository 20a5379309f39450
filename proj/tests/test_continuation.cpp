#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "crext/continuation.hpp"

using namespace crext;
using namespace crext::continuation;

namespace {

ContinuationJob one_sided(const std::string& oracle, double delta = 0.2) {
  ContinuationJob job;
  job.oracle = oracle;
  job.mode = Mode::one_sided_up;
  job.delta = delta;
  job.sigma = delta / 10;
  return job;
}

// Built once; the march is the expensive part of this file.
const ExtensionAtlas& atlas_for(const std::string& oracle, double delta = 0.2) {
  static std::map<std::pair<std::string, double>, ExtensionAtlas> cache;
  const auto key = std::make_pair(oracle, delta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, march(one_sided(oracle, delta), 4)).first;
  return it->second;
}

const ExtensionAtlas& good2s_atlas() {
  static const ExtensionAtlas a = two_sided_fill(ContinuationJob{}, 4);
  return a;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("job JSON is strict and round-trips", "[continuation][config]") {
  const ContinuationJob job = one_sided("entire");
  const Json j = to_json(job);
  CHECK(to_json(job_from_json(j)) == j);
  CHECK(job_from_json(Json{{"oracle", "onesided"}, {"mode", "one_sided_up"}}).mode == Mode::one_sided_up);

  Json bad = j;
  bad["colour"] = 1;
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
  bad = j;
  bad["grids"]["extra"] = 3;
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
  bad = j;
  bad["tolerances"]["nope"] = 1e-3;
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
  bad = j;
  bad["alpha"] = 0.0;
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
  bad = j;
  bad["mode"] = "sideways";
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
  bad = j;
  bad["grids"]["disc_points"] = 1000;
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
  bad = j;
  bad["oracle"] = "missing";
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
  bad = j;
  bad["delta"] = "0.2";
  CHECK_THROWS_AS(job_from_json(bad), ConfigError);
}

TEST_CASE("bounded slab scans", "[continuation][slab]") {
  const auto g = bounded_slab_scan(gallery::oracle("good2s"), 1, {1, 4, 16});
  for (const auto& level : g.slabs) {
    REQUIRE(level.size() == 1);
    CHECK(level[0].interval.lo == -1.0);
    CHECK(level[0].interval.hi == 1.0);
  }

  // z1-slices of flat extend only to |y1| < |x2|, so the slabs retreat from 0 as l grows.
  const auto f = bounded_slab_scan(gallery::oracle("flat"), 2, {4, 16, 64});
  double prev_gap = 1.0;
  for (const auto& level : f.slabs) {
    REQUIRE(level.size() == 2);
    const double gap = level[1].interval.lo - level[0].interval.hi;
    CHECK(gap > 0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }

  // Every slab at level l lies in a slab at the next, larger l.
  const auto e = bounded_slab_scan(gallery::oracle("entire"), 1, {1, 4, 16});
  for (std::size_t i = 0; i + 1 < e.slabs.size(); ++i)
    for (const auto& s : e.slabs[i]) {
      bool inside = false;
      for (const auto& t : e.slabs[i + 1])
        inside = inside || (t.interval.lo <= s.interval.lo && s.interval.hi <= t.interval.hi);
      CHECK(inside);
    }

  CHECK_THROWS_AS(bounded_slab_scan(gallery::oracle("cordaro"), 2, {1, 4}), ScanFailure);
  CHECK_THROWS_AS(bounded_slab_scan(gallery::oracle("good2s"), 3, {1}), PreconditionError);
  CHECK_THROWS_AS(bounded_slab_scan(gallery::oracle("good2s"), 1, {}), PreconditionError);
  CHECK(to_json(g).at("levels").size() == 3);
}

TEST_CASE("seed values match the closed form at disc centers", "[continuation][seed]") {
  const edgewedge::DiscFactory factory(1024);
  for (const auto& [name, mode] : {std::pair{"good2s", Mode::two_sided}, std::pair{"onesided", Mode::one_sided_up},
                                   std::pair{"entire", Mode::one_sided_up}}) {
    const auto o = gallery::oracle(name);
    const auto g = default_seed_grid(mode, 0.2, factory);
    const auto s = seed_quadrant(o, 0.2, g, 1024, 1e-8, 4);
    REQUIRE(s.points.size() == 5 * 5 * 3 * 3);
    for (const auto& p : s.points) {
      const cplx want = o(p.center.z1, p.center.z2);
      CHECK(std::abs(p.value - want) <= 1e-7 * (1.0 + std::abs(want)));
      CHECK(std::abs(p.center.z1 - cplx(p.base.x1, p.lambda[0])) < 1e-8);
      CHECK(std::abs(p.center.z2 - cplx(p.base.x2, p.lambda[1])) < 1e-8);
    }
    CHECK(s.boundary_sup > 0);
  }
}

TEST_CASE("seed discs must stay in the seeding union", "[continuation][seed]") {
  const edgewedge::DiscFactory factory(1024);
  auto g = default_seed_grid(Mode::two_sided, 0.2, factory);
  g.l1 = {0.5};
  try {
    seed_quadrant(gallery::oracle("good2s"), 0.2, g);
    FAIL("expected ContainmentError");
  } catch (const ContainmentError& e) {
    CHECK(e.theta() >= 0.0);
    CHECK(e.theta() < 2 * std::numbers::pi);
  }
}

TEST_CASE("two-sided fill reproduces good2s", "[continuation][two_sided]") {
  const auto& a = good2s_atlas();
  REQUIRE(a.charts.size() == 1);
  const auto& c = a.charts[0];
  CHECK(c.certificate.at("pass") == true);
  CHECK(c.radius == Catch::Approx(0.75));
  CHECK(c.height == Catch::Approx(0.01326).epsilon(1e-3));
  CHECK(a.diagnostics.at("seed").at("within_tolerance") == true);

  const auto o = gallery::oracle("good2s");
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k)
        for (int m = 0; m < 10; ++m) {
          const cplx z1(-0.95 + 1.9 * i / 9, c.height * (-0.95 + 1.9 * j / 9));
          const cplx z2 = std::polar(0.5 * (k + 0.5) / 10, 2 * std::numbers::pi * m / 10);
          worst = std::max(worst, rel(evaluate_extension(a, {z1, z2}).value, o(z1, z2)));
        }
  CHECK(worst < 1e-6);
  CHECK_THROWS_AS(evaluate_extension(a, {cplx(0, 0), cplx(0.8, 0)}), CoverageError);
  CHECK_THROWS_AS(evaluate_extension(a, {cplx(0, 2 * c.height), cplx(0, 0)}), CoverageError);
}

TEST_CASE("flat is not extendible", "[continuation][two_sided]") {
  ContinuationJob job;
  job.oracle = "flat";
  try {
    two_sided_fill(job);
    FAIL("expected NonExtendibleError");
  } catch (const NonExtendibleError& e) {
    CHECK(std::abs(e.location()) < 0.05);
    CHECK(std::string(e.what()).find("collapse") != std::string::npos);
  }
}

TEST_CASE("march on onesided and entire", "[continuation][march]") {
  for (const std::string name : {"onesided", "entire"}) {
    INFO(name);
    const auto& a = atlas_for(name);
    const auto job = job_from_json(a.job);
    CHECK(a.complete);
    CHECK(a.failures.empty());
    const int n = a.diagnostics.at("steps");
    const double stride = (1 - job.alpha) * job.delta - job.sigma;
    CHECK(n * stride > 1.0);
    CHECK(a.charts.size() == static_cast<std::size_t>(2 * n + 1));
    for (const auto& c : a.charts) CHECK(c.certificate.at("pass") == true);
    CHECK(a.diagnostics.at("overlap").at("worst_relative_gap").get<double>() <= 1e-5);
    CHECK(a.diagnostics.at("seed").at("within_tolerance") == true);
    CHECK(a.diagnostics.at("recenter_gap").get<double>() < 1e-8);

    const auto o = gallery::oracle(name);
    double worst = 0.0;
    for (const auto& c : a.charts)
      for (int i = 0; i < 7; ++i)
        for (int k = 0; k < 6; ++k) {
          const cplx z1(-0.9 + 0.3 * i, c.height * (-0.8 + 0.32 * k));
          const cplx z2 = c.center + std::polar(0.9 * c.radius * (k + 1) / 6, 1.1 * i + k);
          worst = std::max(worst, rel(evaluate_extension(a, {z1, z2}).value, o(z1, z2)));
        }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("march preconditions", "[continuation][march]") {
  auto job = one_sided("entire");
  job.sigma = 0.026;
  CHECK_THROWS_AS(march(job), PreconditionError);
  CHECK_THROWS_AS(march(ContinuationJob{}), PreconditionError);
  CHECK_THROWS_AS(two_sided_fill(one_sided("entire")), PreconditionError);
  job.sigma = 0.02;
  job.alpha = 0.0;
  CHECK_THROWS_AS(march(job), ConfigError);
}

TEST_CASE("step heights", "[continuation][property]") {
  CHECK(step_height(0.25, 1.6, 6.7) == Catch::Approx((-std::log(0.75) - 0.125) / (1.6 * 6.7)));
  for (double a : {0.1, 0.25, 0.5})
    for (double l : {0.5, 1.0, 4.0})
      for (double k : {1.0, 10.0}) {
        CHECK(step_height(a, l, k) > 0);
        CHECK(step_height(a, 2 * l, k) < step_height(a, l, k));
        CHECK(step_height(a, l, 2 * k) < step_height(a, l, k));
        CHECK(step_height(a + 0.1, l, k) > step_height(a, l, k));
      }

  // Heights shrink with every step away from the seed chart.
  const auto& a = atlas_for("entire");
  for (const auto& c : a.charts)
    for (const auto& d : a.charts)
      if (std::abs(d.step) == std::abs(c.step) + 1) CHECK(d.height < c.height);
}

TEST_CASE("atlas JSON round trip", "[continuation][json]") {
  const auto& a = atlas_for("onesided");
  const std::string s = to_json(a).dump();
  const auto b = atlas_from_json(Json::parse(s));
  CHECK(to_json(b).dump() == s);
  for (const auto& p : trace_points(a))
    CHECK(evaluate_extension(a, p).value == evaluate_extension(b, p).value);

  Json bad = to_json(a.charts[0]);
  bad["coeffs"][0] = Json::array();
  for (int i = 0; i <= a.charts[0].order() + 1; ++i) bad["coeffs"][0].push_back({1.0, 0.0});
  CHECK_THROWS_AS(chart_from_json(bad), ConfigError);
}

TEST_CASE("atlases do not depend on the worker count", "[continuation][determinism]") {
  const auto one = march(one_sided("entire"), 1);
  CHECK(to_json(one).dump() == to_json(atlas_for("entire")).dump());
  CHECK(to_json(two_sided_fill(ContinuationJob{}, 1)).dump() == to_json(good2s_atlas()).dump());
}

TEST_CASE("wedge and edge limit", "[continuation][wedge]") {
  const auto& hi = atlas_for("entire", 0.2);
  const auto& lo = atlas_for("entire", 0.1);
  const std::vector<const ExtensionAtlas*> atlases{&hi, &lo};
  const auto w = assemble_wedge(atlases);
  CHECK(w.wedge.cone.axis.x1 == 0.0);
  CHECK(w.wedge.cone.axis.x2 == 1.0);
  CHECK(w.wedge.cone.aperture > 0);
  CHECK(w.wedge.epsilon > 0.3);
  CHECK(w.y_floor < 0.05);
  CHECK(to_json(w).at("label") == "pre-Kashiwara fitted cone");

  const auto o = gallery::oracle("entire");
  const auto e = edge_limit(atlases, o, w, {0.2, 0.1, 0.05});
  CHECK(e.decreasing);
  // F(x + i y e2) - f(x) is y x1 exp(x1 x2) to first order.
  for (std::size_t i = 0; i < e.ys.size(); ++i) CHECK(e.gaps[i] < 2 * e.ys[i]);

  CHECK_THROWS_AS(assemble_wedge({&hi}), PreconditionError);
  CHECK_THROWS_AS(assemble_wedge({&hi, &good2s_atlas()}), PreconditionError);
  CHECK_THROWS_AS(edge_limit(atlases, o, w, {0.9}), PreconditionError);
}

TEST_CASE("trace CSV", "[continuation][trace]") {
  const auto& a = good2s_atlas();
  auto pts = trace_points(a);
  CHECK(pts.size() == 12);
  pts.push_back({cplx(0, 0), cplx(5, 0)});
  std::ostringstream os;
  write_trace(os, a, pts);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "z1_re,z1_im,z2_re,z2_im,F_re,F_im,chart_id,tail_bound");
  int rows = 0;
  std::string last;
  while (std::getline(is, line)) {
    ++rows;
    last = line;
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
  }
  CHECK(rows == 13);
  CHECK(last.ends_with("nan,nan,-1,nan"));
}
