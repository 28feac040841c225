#pragma once

#include <cmath>

#include "intentclust/kmeans.hpp"
#include "intentclust/util.hpp"

namespace testing {

struct Blobs {
  intentclust::PointMatrix points;
  std::vector<std::size_t> truth;
};

/// `k` isotropic Gaussian blobs of `per` points in `dim` dimensions, centers
/// on well-separated unit axes plus a shared offset.
inline Blobs make_blobs(std::size_t k, std::size_t per, std::size_t dim, double sigma, std::uint64_t seed) {
  intentclust::Rng rng(seed);
  Blobs b;
  std::vector<std::vector<double>> rows;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per; ++i) {
      std::vector<double> row(dim, 0.0);
      row[c % dim] = 1.0;
      for (auto& x : row) x += 0.1 + sigma * rng.normal();
      rows.push_back(std::move(row));
      b.truth.push_back(c);
    }
  }
  b.points = intentclust::PointMatrix::from_rows(rows);
  return b;
}

}  // namespace testing
