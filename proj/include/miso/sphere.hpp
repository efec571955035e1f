/**
 * @file sphere.hpp
 * @brief Exact ML search over a box of odd-integer points (Schnorr-Euchner
 * enumeration).
 */
#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace miso {

struct SphereResult {
  std::vector<int> levels;  ///< u_j in [0, L_j)
  double metric = 0.0;
  std::uint64_t nodes = 0;
  bool truncated = false;   ///< node budget exhausted; result is best found so far
};

/// Scores a full candidate: (metric, tie-break index). Lower wins on both.
using LeafScore = std::function<std::pair<double, std::uint64_t>(const std::vector<int>&)>;

/// Minimizes ||r - G s||^2 over s_j = 2 u_j - (L_j - 1), 0 <= u_j < L_j.
/// With `leaf` set, candidates are ranked by its score, which must agree with
/// the quadratic form up to rounding; ties go to the smaller index.
SphereResult sphere_decode(const Eigen::MatrixXd& G, const Eigen::VectorXd& r,
                           const std::vector<int>& levels, const LeafScore& leaf = {},
                           std::uint64_t node_limit = 4000000);

}  // namespace miso
