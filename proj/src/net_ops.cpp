#include "mmgest/net_ops.hpp"

#include <algorithm>
#include <limits>

namespace mmgest {

std::vector<int> farthest_point_sample(const Eigen::Matrix3Xd& xyz, int n,
                                       std::uint64_t /*seed*/) {
  const int count = static_cast<int>(xyz.cols());
  if (count < 1) fail(Errc::empty_cloud, "farthest_point_sample: no points");
  if (n < 1) fail(Errc::bad_config, "farthest_point_sample: n must be >= 1");

  const int distinct = std::min(n, count);
  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(n));
  picked.push_back(0);

  std::vector<double> min_d2(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    min_d2[static_cast<std::size_t>(i)] = (xyz.col(i) - xyz.col(0)).squaredNorm();

  while (static_cast<int>(picked.size()) < distinct) {
    int best = 0;
    double best_d2 = -1.0;
    for (int i = 0; i < count; ++i) {
      if (min_d2[static_cast<std::size_t>(i)] > best_d2) {
        best_d2 = min_d2[static_cast<std::size_t>(i)];
        best = i;
      }
    }
    picked.push_back(best);
    for (int i = 0; i < count; ++i) {
      const double d2 = (xyz.col(i) - xyz.col(best)).squaredNorm();
      min_d2[static_cast<std::size_t>(i)] =
          std::min(min_d2[static_cast<std::size_t>(i)], d2);
    }
  }
  for (int i = distinct; i < n; ++i) picked.push_back(picked[static_cast<std::size_t>(i - distinct)]);
  return picked;
}

std::vector<int> ball_query_group(const Eigen::Matrix3Xd& xyz,
                                  const std::vector<int>& center_idx, double radius,
                                  int m) {
  if (!(radius > 0.0)) fail(Errc::bad_config, "ball_query_group: radius must be > 0");
  if (m < 1) fail(Errc::bad_config, "ball_query_group: m must be >= 1");

  const double r2 = radius * radius;
  std::vector<int> groups;
  groups.reserve(center_idx.size() * static_cast<std::size_t>(m));
  std::vector<std::pair<double, int>> candidates;

  for (const int c : center_idx) {
    candidates.clear();
    for (int i = 0; i < static_cast<int>(xyz.cols()); ++i) {
      const double d2 = (xyz.col(i) - xyz.col(c)).squaredNorm();
      if (d2 <= r2) candidates.emplace_back(d2, i);
    }
    std::sort(candidates.begin(), candidates.end());
    if (candidates.empty()) {
      // Unreachable when centers index the set itself (self distance 0);
      // kept for generality with external center lists.
      candidates.emplace_back(0.0, c);
    }
    for (int t = 0; t < m; ++t) {
      groups.push_back(t < static_cast<int>(candidates.size())
                           ? candidates[static_cast<std::size_t>(t)].second
                           : candidates.front().second);
    }
  }
  return groups;
}

namespace {

PreparedBlock prepare_block(const Eigen::Matrix3Xd& xyz, const Eigen::MatrixXd* feat,
                            const SABlockSpec& spec) {
  PreparedBlock block;
  block.center_idx = farthest_point_sample(xyz, spec.centers);
  block.center_xyz.resize(3, spec.centers);
  for (int j = 0; j < spec.centers; ++j)
    block.center_xyz.col(j) = xyz.col(block.center_idx[static_cast<std::size_t>(j)]);

  const Eigen::Index feat_rows = feat ? feat->rows() : 0;
  for (const ScaleSpec& scale : spec.scales) {
    PreparedScale ps;
    ps.members = ball_query_group(xyz, block.center_idx, scale.radius, scale.group_size);
    const Eigen::Index cols =
        static_cast<Eigen::Index>(spec.centers) * scale.group_size;
    ps.base_input.setZero(3 + feat_rows, cols);
    for (int j = 0; j < spec.centers; ++j) {
      for (int t = 0; t < scale.group_size; ++t) {
        const Eigen::Index col = static_cast<Eigen::Index>(j) * scale.group_size + t;
        const int member = ps.members[static_cast<std::size_t>(col)];
        ps.base_input.block<3, 1>(0, col) = xyz.col(member) - block.center_xyz.col(j);
        if (feat) ps.base_input.block(3, col, feat_rows, 1) = feat->col(member);
      }
    }
    block.scales.push_back(std::move(ps));
  }
  return block;
}

}  // namespace

PreparedInput prepare_input(const GestureCloud& cloud, const NetConfig& cfg) {
  cfg.validate();
  if (cloud.empty()) fail(Errc::empty_cloud, "prepare_input: empty cloud");
  if (static_cast<int>(cloud.points.size()) != cfg.point_count)
    fail(Errc::shape_mismatch, "prepare_input: cloud must hold exactly point_count points");

  PreparedInput prep;
  prep.x.resize(cfg.in_channels, cfg.point_count);
  for (int i = 0; i < cfg.point_count; ++i) {
    const Point& p = cloud.points[static_cast<std::size_t>(i)];
    if (!p.finite()) fail(Errc::non_finite_activation, "prepare_input: non-finite point");
    prep.x(0, i) = p.x;
    prep.x(1, i) = p.y;
    prep.x(2, i) = p.z;
    if (cfg.in_channels == 5) {
      prep.x(3, i) = p.doppler;
      prep.x(4, i) = p.intensity;
    }
  }

  const Eigen::Matrix3Xd xyz = prep.x.topRows<3>();
  if (cfg.in_channels > 3) {
    const Eigen::MatrixXd extra = prep.x.bottomRows(cfg.in_channels - 3);
    prep.sa1 = prepare_block(xyz, &extra, cfg.sa1);
  } else {
    prep.sa1 = prepare_block(xyz, nullptr, cfg.sa1);
  }

  // sa2 groups sa1's centers; its feature rows (sa1's pooled features) are
  // parameter-dependent and get filled at forward time.
  const Eigen::MatrixXd dummy_feat =
      Eigen::MatrixXd::Zero(cfg.sa1.output_width(), cfg.sa1.centers);
  prep.sa2 = prepare_block(prep.sa1.center_xyz, &dummy_feat, cfg.sa2);
  return prep;
}

}  // namespace mmgest
