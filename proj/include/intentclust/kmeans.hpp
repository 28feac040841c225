#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "intentclust/vector_index.hpp"

namespace intentclust {

struct KMeansConfig {
  std::size_t k = 0;
  std::size_t n_init = 10;
  std::size_t max_iters = 300;
  double tol = 1e-6;  ///< stop once the relative inertia drop falls below this
  std::uint64_t seed = 0;
  bool normalize = true;  ///< L2-normalize rows first
};

struct ClusterAssignment {
  std::vector<std::size_t> labels;
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  std::size_t restart = 0;  ///< which restart won
  std::size_t empty_reseeds = 0;
  bool degenerate = false;  ///< every point identical; split is positional
  /// Inertia after each assignment step, one list per restart.
  std::vector<std::vector<double>> inertia_history;
};

/// Dense row-major point set.
struct PointMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  static PointMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static PointMatrix from_snapshot(const IndexSnapshot& snapshot);
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// Lloyd's algorithm with k-means++ seeding, best of n_init restarts by
/// inertia. Empty clusters are re-seeded at the point farthest from its
/// centroid. Throws KTooLarge when k > N and ConfigError when k == 0.
ClusterAssignment kmeans(const PointMatrix& points, const KMeansConfig& cfg);
ClusterAssignment kmeans(const IndexSnapshot& snapshot, const KMeansConfig& cfg);

}  // namespace intentclust
