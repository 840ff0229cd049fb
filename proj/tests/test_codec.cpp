#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "opstat/codec.hpp"
#include "opstat/errors.hpp"
#include "opstat/tolerances.hpp"

using namespace opstat;
using namespace opstat::codec;

TEST_CASE("object constructors and validation") {
  CHECK_THROWS_AS(GeometricObject::disk(0.5, 0.5, 0.6), ValidationError);
  CHECK_THROWS_AS(GeometricObject::disk(0.1, 0.5, 0.25), ValidationError);
  CHECK_THROWS_AS(GeometricObject::polygon({{0, 0}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(GeometricObject::polygon({{0, 0}, {2, 0}, {1, 1}}), ValidationError);

  const GeometricObject disk = GeometricObject::disk(0.5, 0.5, 0.25);
  CHECK(disk.reference_area() == doctest::Approx(M_PI / 16).epsilon(1e-14));
  CHECK(disk.contains(0.5, 0.5));
  CHECK(disk.contains(0.5, 0.74));
  CHECK_FALSE(disk.contains(0.5, 0.76));

  const GeometricObject square = GeometricObject::whole_square();
  CHECK(square.reference_area() == doctest::Approx(1.0));
  CHECK(square.contains(0.01, 0.99));

  CHECK(GeometricObject::empty().reference_area() == 0.0);
  CHECK_FALSE(GeometricObject::empty().contains(0.5, 0.5));
}

TEST_CASE("object json descriptors") {
  const GeometricObject disk =
      GeometricObject::from_json_text("{\"disk\": {\"cx\": 0.5, \"cy\": 0.5, \"r\": 0.25}}");
  CHECK(disk.is_disk());
  CHECK(disk.as_disk().r == 0.25);

  const GeometricObject poly = GeometricObject::from_json_text(
      "{\"polygon\": [[0,0],[1,0],[1,1],[0,1]]}");
  CHECK(poly.is_polygon());
  CHECK(poly.reference_area() == doctest::Approx(1.0));

  CHECK_THROWS_AS(GeometricObject::from_json_text("{\"blob\": 1}"), ValidationError);
  CHECK_THROWS_AS(GeometricObject::from_json_text("{\"disk\": {\"cx\": 0.5}}"),
                  ValidationError);

  // round trip through the writer
  const GeometricObject back = GeometricObject::from_json_text(disk.to_json_text());
  CHECK(back.as_disk().cx == disk.as_disk().cx);
}

TEST_CASE("encode: determinism, degenerate objects, label law") {
  const GeometricObject disk = GeometricObject::disk(0.5, 0.5, 0.25);
  const HitSet a = encode(disk, 500.0, 9);
  const HitSet b = encode(disk, 500.0, 9);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    CHECK(a.points[k].x == b.points[k].x);
    CHECK(a.labels[k] == b.labels[k]);
  }

  const HitSet all = encode(GeometricObject::whole_square(), 300.0, 1);
  for (const auto l : all.labels) CHECK(l == 1);
  const HitSet none = encode(GeometricObject::empty(), 300.0, 1);
  for (const auto l : none.labels) CHECK(l == 0);

  // label fraction ~ area(disk) = pi/16, binomial 3 sigma over pooled seeds
  std::int64_t total = 0, inside = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const HitSet h = encode(disk, 2000.0, s);
    total += static_cast<std::int64_t>(h.points.size());
    for (const auto l : h.labels) inside += l;
  }
  const double p = M_PI / 16.0;
  const double frac = static_cast<double>(inside) / static_cast<double>(total);
  CHECK(std::fabs(frac - p) <=
        3.0 * std::sqrt(p * (1 - p) / static_cast<double>(total)));

  CHECK_THROWS_AS(encode(disk, 0.0, 1), ValidationError);
}

TEST_CASE("tessellate: single site, bisector pair, partition property") {
  HitSet one;
  one.points = {{0.3, 0.7}};
  one.labels = {1};
  const Tessellation t1 = tessellate(one);
  REQUIRE(t1.cells.size() == 1);
  CHECK(t1.cells[0].area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t1.cells[0].neighbors.empty());

  HitSet two;
  two.points = {{0.25, 0.5}, {0.75, 0.5}};
  two.labels = {1, 0};
  const Tessellation t2 = tessellate(two);
  REQUIRE(t2.cells.size() == 2);
  CHECK(t2.cells[0].area == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t2.cells[1].area == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t2.cells[0].neighbors == std::vector<int>{1});
  CHECK(t2.cells[1].neighbors == std::vector<int>{0});

  // 1000 random points: areas sum to 1, mean cell area = 1/count
  const HitSet many = encode(GeometricObject::disk(0.5, 0.5, 0.25), 1000.0, 4);
  const Tessellation tm = tessellate(many);
  double sum = 0.0;
  for (const auto& c : tm.cells) sum += c.area;
  CHECK(std::fabs(sum - 1.0) <= tol::kAreaPartition);
  CHECK(1.0 / tm.cells.size() == doctest::Approx(sum / tm.cells.size()));

  HitSet empty;
  CHECK_THROWS_WITH_AS(tessellate(empty), doctest::Contains("empty hit set"),
                       ValidationError);

  // co-circular sites: four cells meeting at one Voronoi vertex
  HitSet square_sites;
  square_sites.points = {{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}};
  square_sites.labels = {1, 1, 0, 0};
  const Tessellation ts = tessellate(square_sites);
  double area_sum = 0.0;
  for (const auto& c : ts.cells) {
    CHECK(c.area == doctest::Approx(0.25).epsilon(1e-12));
    area_sum += c.area;
    // each cell touches at least its two side-sharing neighbors
    CHECK(c.neighbors.size() >= 2);
  }
  CHECK(area_sum == doctest::Approx(1.0).epsilon(1e-12));
  // side-sharing pairs are adjacent both ways
  auto adjacent = [&](int a, int b) {
    return std::find(ts.cells[a].neighbors.begin(), ts.cells[a].neighbors.end(),
                     b) != ts.cells[a].neighbors.end();
  };
  CHECK(adjacent(0, 1));
  CHECK(adjacent(1, 0));
  CHECK(adjacent(1, 2));
  CHECK(adjacent(2, 3));
  CHECK(adjacent(3, 0));

  // duplicates collapse
  HitSet dup;
  dup.points = {{0.5, 0.5}, {0.5, 0.5}, {0.25, 0.25}};
  dup.labels = {1, 1, 0};
  CHECK(tessellate(dup).cells.size() == 2);
}

TEST_CASE("decode: trivial labels and hit-set consistency guard") {
  const HitSet hits = encode(GeometricObject::disk(0.5, 0.5, 0.25), 300.0, 5);
  const Tessellation tess = tessellate(hits);

  HitSet all = hits;
  for (auto& l : all.labels) l = 1;
  const GeometricObject whole = decode(tess, all);
  CHECK(whole.reference_area() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fidelity(whole, GeometricObject::whole_square(), 200) == 1.0);

  HitSet none = hits;
  for (auto& l : none.labels) l = 0;
  const GeometricObject nothing = decode(tess, none);
  CHECK(nothing.reference_area() == 0.0);
  CHECK_FALSE(nothing.contains(0.5, 0.5));

  HitSet other = encode(GeometricObject::disk(0.5, 0.5, 0.25), 300.0, 6);
  CHECK_THROWS_AS(decode(tess, other), ValidationError);
}

TEST_CASE("fidelity: identity, disjoint, nested disks") {
  const GeometricObject d1 = GeometricObject::disk(0.5, 0.5, 0.2);
  CHECK(fidelity(d1, d1, 400) == 1.0);

  const GeometricObject d2 = GeometricObject::disk(0.15, 0.15, 0.1);
  const GeometricObject d3 = GeometricObject::disk(0.85, 0.85, 0.1);
  CHECK(fidelity(d2, d3, 400) == 0.0);

  // nested disks: IoU = (0.1/0.2)^2 = 1/4 within the grid error bound
  const GeometricObject inner = GeometricObject::disk(0.5, 0.5, 0.1);
  const double iou = fidelity(inner, d1, 500);
  CHECK(std::fabs(iou - 0.25) <= 2.0 / 500.0);

  CHECK_THROWS_AS(fidelity(d1, d2, 50), ValidationError);

  // both empty -> identical -> 1
  CHECK(fidelity(GeometricObject::empty(), GeometricObject::empty(), 200) == 1.0);
}

TEST_CASE("decode fidelity rises across intensity doublings") {
  const GeometricObject disk = GeometricObject::disk(0.5, 0.5, 0.25);
  double prev_mean = 0.0;
  for (const double lambda : {250.0, 1000.0}) {
    double mean = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const HitSet hits = encode(disk, lambda, 100 + s);
      const GeometricObject rebuilt = decode(tessellate(hits), hits);
      mean += fidelity(disk, rebuilt, 500);
    }
    mean /= 10.0;
    CHECK(mean > prev_mean);
    prev_mean = mean;
  }
  CHECK(prev_mean > 0.85);
}

TEST_CASE("geodesic walk: endpoints, greedy reachability, temperature") {
  const HitSet hits = encode(GeometricObject::disk(0.5, 0.5, 0.25), 150.0, 8);
  const Tessellation tess = tessellate(hits);
  const int n = static_cast<int>(tess.sites.size());

  const WalkResult trivial = geodesic_walk(tess, 3, 3, 1, 0.0);
  CHECK(trivial.sites == std::vector<int>{3});
  CHECK_FALSE(trivial.truncated);

  // greedy reaches any goal within site-count steps (Delaunay greedy routing)
  for (int rep = 0; rep < 50; ++rep) {
    const int start = (rep * 7) % n;
    const int goal = (rep * 13 + 5) % n;
    const WalkResult walk = geodesic_walk(tess, start, goal, rep, 0.0);
    CHECK_FALSE(walk.truncated);
    CHECK(walk.sites.back() == goal);
    CHECK(walk.sites.size() <= static_cast<std::size_t>(n));
  }

  // two sites: the only neighbor is the goal
  HitSet two;
  two.points = {{0.25, 0.5}, {0.75, 0.5}};
  two.labels = {1, 0};
  const Tessellation t2 = tessellate(two);
  const WalkResult direct = geodesic_walk(t2, 0, 1, 1, 0.0);
  CHECK(direct.sites == std::vector<int>{0, 1});

  // greedy path length is a lower envelope for the hot walk's mean length
  const int start = tess.nearest_site(0.05, 0.05);
  const int goal = tess.nearest_site(0.95, 0.95);
  const std::size_t greedy_len = geodesic_walk(tess, start, goal, 0, 0.0).sites.size();
  double hot_mean = 0.0;
  int reached = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const WalkResult hot = geodesic_walk(tess, start, goal, s, 1.0);
    if (!hot.truncated) {
      hot_mean += static_cast<double>(hot.sites.size());
      ++reached;
    }
  }
  REQUIRE(reached > 0);
  hot_mean /= reached;
  CHECK(static_cast<double>(greedy_len) <= hot_mean);

  CHECK_THROWS_AS(geodesic_walk(tess, -1, 0, 1, 0.0), ValidationError);
  CHECK_THROWS_AS(geodesic_walk(tess, 0, n, 1, 0.0), ValidationError);
}

TEST_CASE("stopping check: converged run, single round, ramped intensity") {
  const GeometricObject disk = GeometricObject::disk(0.5, 0.5, 0.25);

  const CodecRunState good =
      run_codec_rounds(disk, {500, 500, 500, 500}, 21, 500);
  const StoppingReport report = stopping_check(good);
  CHECK(report.conditions[0].name == "poisson_stationarity");
  CHECK(report.conditions[0].pass);
  CHECK(report.conditions[1].pass);
  CHECK(report.conditions[2].pass);
  CHECK(report.conditions[3].pass);
  CHECK(report.all_pass);

  CodecRunState single = run_codec_rounds(disk, {500}, 3, 500);
  CHECK_THROWS_WITH_AS(stopping_check(single), doctest::Contains("not enough rounds"),
                       ValidationError);

  const CodecRunState ramped =
      run_codec_rounds(disk, {100, 300, 900, 2700}, 5, 500);
  const StoppingReport bad = stopping_check(ramped);
  CHECK_FALSE(bad.conditions[0].pass);
  CHECK_FALSE(bad.all_pass);
}
