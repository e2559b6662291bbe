#include <doctest.h>

#include <set>

#include "mmgest/cloud_ops.hpp"
#include "oracles.hpp"

using namespace mmgest;

TEST_CASE("normalize_center moves the centroid to the origin") {
  GestureCloud c;
  c.points.push_back({1, 1, 1, 0.5, 2.0});
  GestureCloud out = normalize_center(c);
  CHECK(out.points[0].x == doctest::Approx(0.0));
  CHECK(out.points[0].y == doctest::Approx(0.0));
  CHECK(out.points[0].z == doctest::Approx(0.0));
  CHECK(out.points[0].doppler == 0.5);
  CHECK(out.points[0].intensity == 2.0);
  CHECK(c.points[0].x == 1.0);  // input untouched

  GestureCloud two;
  two.points.push_back({0, 0, 0, 0, 0});
  two.points.push_back({2, 0, 0, 0, 0});
  out = normalize_center(two);
  CHECK(out.points[0].x == doctest::Approx(-1.0));
  CHECK(out.points[1].x == doctest::Approx(1.0));

  Rng rng(3);
  const GestureCloud random = oracle::random_cloud(rng, 5, 50);
  out = normalize_center(random);
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const Point& p : out.points) centroid += p.xyz();
  centroid /= static_cast<double>(out.points.size());
  CHECK(centroid.norm() < 1e-9);

  CHECK_THROWS_AS(normalize_center(GestureCloud{}), Error);
}

TEST_CASE("resample_fixed cardinality and determinism") {
  Rng rng(11);
  GestureCloud big = oracle::random_cloud(rng, 300, 300);
  GestureCloud out = resample_fixed(big, 256, 42);
  CHECK(out.points.size() == 256);
  // Without replacement: all distinct originals.
  std::set<std::array<double, 3>> seen;
  for (const Point& p : out.points) seen.insert({p.x, p.y, p.z});
  CHECK(seen.size() == 256);

  GestureCloud small = oracle::random_cloud(rng, 100, 100);
  out = resample_fixed(small, 256, 42);
  CHECK(out.points.size() == 256);
  std::set<std::array<double, 3>> originals, sampled;
  for (const Point& p : small.points) originals.insert({p.x, p.y, p.z});
  for (const Point& p : out.points) sampled.insert({p.x, p.y, p.z});
  CHECK(originals == sampled);  // every original kept at least once

  const GestureCloud again = resample_fixed(small, 256, 42);
  REQUIRE(again.points.size() == out.points.size());
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    CHECK(again.points[i].x == out.points[i].x);
    CHECK(again.points[i].doppler == out.points[i].doppler);
  }

  CHECK_THROWS_AS(resample_fixed(GestureCloud{}, 16, 1), Error);
  CHECK_THROWS_AS(resample_fixed(small, 0, 1), Error);
}
