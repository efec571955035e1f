/**
 * @file sphere.cpp
 */
#include "miso/sphere.hpp"

#include <cmath>
#include <limits>

namespace miso {

namespace {

struct Search {
  Eigen::MatrixXd R;
  Eigen::VectorXd z;
  std::vector<int> L;
  const LeafScore* leaf;
  double resid = 0.0;
  std::uint64_t limit = 0;

  std::vector<int> u;
  std::vector<int> best_u;
  double best_metric = std::numeric_limits<double>::infinity();
  std::uint64_t best_index = std::numeric_limits<std::uint64_t>::max();
  double radius2 = std::numeric_limits<double>::infinity();
  std::uint64_t nodes = 0;
  bool truncated = false;

  void at_leaf(double dist) {
    double m;
    std::uint64_t idx = 0;
    if (*leaf) {
      std::tie(m, idx) = (*leaf)(u);
    } else {
      m = dist + resid;
    }
    if (m < best_metric || (m == best_metric && idx < best_index)) {
      best_metric = m;
      best_index = idx;
      best_u = u;
      // Slack keeps exact-metric ties and rounding-level differences in range.
      const double q = best_metric - resid;
      radius2 = q + 1e-9 * (std::fabs(best_metric) + std::fabs(resid)) + 1e-300;
    }
  }

  void run(int k, double dist) {
    if (truncated) return;
    if (++nodes > limit) {
      truncated = true;
      return;
    }
    if (k < 0) {
      at_leaf(dist);
      return;
    }
    const int n = static_cast<int>(z.size());
    double s = z(k);
    for (int j = k + 1; j < n; ++j) s -= R(k, j) * u[j];
    const double rkk = R(k, k);
    const double c = s / rkk;
    const int hi_level = L[k] - 1;
    long start = std::lround(c);
    if (start < 0) start = 0;
    if (start > hi_level) start = hi_level;
    long lo = start - 1, hi = start + 1;
    long cur = start;
    while (true) {
      const double e = rkk * (static_cast<double>(cur) - c);
      const double d = dist + e * e;
      if (d > radius2) break;
      u[k] = static_cast<int>(cur);
      run(k - 1, d);
      if (truncated) return;
      const bool lo_ok = lo >= 0, hi_ok = hi <= hi_level;
      if (!lo_ok && !hi_ok) break;
      if (lo_ok && (!hi_ok || std::fabs(lo - c) <= std::fabs(hi - c))) {
        cur = lo--;
      } else {
        cur = hi++;
      }
    }
  }
};

}  // namespace

SphereResult sphere_decode(const Eigen::MatrixXd& G, const Eigen::VectorXd& r,
                           const std::vector<int>& levels, const LeafScore& leaf,
                           std::uint64_t node_limit) {
  const int n = static_cast<int>(G.cols());
  Eigen::VectorXd m0(n);
  for (int j = 0; j < n; ++j) m0(j) = levels[j] - 1;
  const Eigen::MatrixXd A = 2.0 * G;
  const Eigen::VectorXd rp = r + G * m0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const Eigen::VectorXd qtr = qr.householderQ().transpose() * rp;

  Search s;
  s.R = R;
  s.z = qtr.head(n);
  s.L = levels;
  s.leaf = &leaf;
  s.resid = rp.squaredNorm() - s.z.squaredNorm();
  s.limit = node_limit;
  s.u.assign(n, 0);
  s.run(n - 1, 0.0);

  SphereResult out;
  out.levels = s.best_u;
  out.metric = s.best_metric;
  out.nodes = s.nodes;
  out.truncated = s.truncated;
  if (out.levels.empty()) out.levels.assign(n, 0);
  return out;
}

}  // namespace miso
