#include <doctest.h>

#include <set>

#include "mmgest/net_ops.hpp"
#include "oracles.hpp"

using namespace mmgest;

TEST_CASE("farthest_point_sample walks to the extremes") {
  Eigen::Matrix3Xd xyz(3, 4);
  xyz << 0, 1, 2, 3, 0, 0, 0, 0, 0, 0, 0, 0;

  const auto two = farthest_point_sample(xyz, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == 0);
  CHECK(two[1] == 3);

  const auto all = farthest_point_sample(xyz, 4);
  CHECK(std::set<int>(all.begin(), all.end()).size() == 4);  // a permutation

  const auto cycled = farthest_point_sample(xyz, 6);
  REQUIRE(cycled.size() == 6);
  CHECK(cycled[4] == cycled[0]);
  CHECK(cycled[5] == cycled[1]);

  const auto again = farthest_point_sample(xyz, 6);
  CHECK(again == cycled);

  CHECK_THROWS_AS(farthest_point_sample(Eigen::Matrix3Xd(3, 0), 2), Error);
  CHECK_THROWS_AS(farthest_point_sample(xyz, 0), Error);
}

TEST_CASE("farthest_point_sample maximizes the min distance greedily") {
  Rng rng(2024);
  Eigen::Matrix3Xd xyz(3, 40);
  for (int i = 0; i < 40; ++i)
    xyz.col(i) << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1);
  const auto picks = farthest_point_sample(xyz, 10);
  for (std::size_t k = 1; k < picks.size(); ++k) {
    // The k-th pick attains the max over all points of min distance to the
    // already-picked prefix.
    double best = -1.0;
    for (int i = 0; i < 40; ++i) {
      double mind = 1e300;
      for (std::size_t j = 0; j < k; ++j)
        mind = std::min(mind, (xyz.col(i) - xyz.col(picks[j])).norm());
      best = std::max(best, mind);
    }
    double mind_pick = 1e300;
    for (std::size_t j = 0; j < k; ++j)
      mind_pick = std::min(mind_pick, (xyz.col(picks[k]) - xyz.col(picks[j])).norm());
    CHECK(mind_pick == doctest::Approx(best));
  }
}

TEST_CASE("ball_query_group ordering, radius cut, and padding") {
  // Center at origin plus neighbors at increasing distance.
  Eigen::Matrix3Xd xyz(3, 5);
  xyz << 0.0, 0.1, 0.2, 0.3, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0;

  const auto groups = ball_query_group(xyz, {0}, 0.5, 3);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0] == 0);  // self, distance 0
  CHECK(groups[1] == 1);
  CHECK(groups[2] == 2);

  // Fewer than m qualify: repeat the nearest (the center itself).
  const auto padded = ball_query_group(xyz, {4}, 0.2, 4);
  REQUIRE(padded.size() == 4);
  for (int idx : padded) CHECK(idx == 4);

  // All points within radius, m >= count: all sorted by distance then padded.
  const auto all = ball_query_group(xyz, {0}, 10.0, 7);
  REQUIRE(all.size() == 7);
  CHECK(all[0] == 0);
  CHECK(all[4] == 4);
  CHECK(all[5] == 0);
  CHECK(all[6] == 0);

  CHECK_THROWS_AS(ball_query_group(xyz, {0}, 0.0, 3), Error);
  CHECK_THROWS_AS(ball_query_group(xyz, {0}, 1.0, 0), Error);
}

TEST_CASE("prepare_input validates the cloud and builds both block structures") {
  NetConfig cfg = NetConfig::tiny(2);
  Rng rng(8);
  GestureCloud cloud = oracle::random_cloud(rng, cfg.point_count, cfg.point_count);
  const PreparedInput prep = prepare_input(cloud, cfg);

  CHECK(prep.x.rows() == cfg.in_channels);
  CHECK(prep.x.cols() == cfg.point_count);
  CHECK(static_cast<int>(prep.sa1.center_idx.size()) == cfg.sa1.centers);
  CHECK(static_cast<int>(prep.sa2.center_idx.size()) == cfg.sa2.centers);
  REQUIRE(prep.sa1.scales.size() == cfg.sa1.scales.size());
  for (std::size_t s = 0; s < cfg.sa1.scales.size(); ++s) {
    const auto& ps = prep.sa1.scales[s];
    CHECK(static_cast<int>(ps.members.size()) ==
          cfg.sa1.centers * cfg.sa1.scales[s].group_size);
    CHECK(ps.base_input.rows() == cfg.in_channels);  // 3 + 2 extra channels
  }

  GestureCloud wrong = cloud;
  wrong.points.pop_back();
  CHECK_THROWS_AS(prepare_input(wrong, cfg), Error);
  CHECK_THROWS_AS(prepare_input(GestureCloud{}, cfg), Error);
}
