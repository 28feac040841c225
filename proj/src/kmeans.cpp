#include "intentclust/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "intentclust/error.hpp"
#include "intentclust/util.hpp"

namespace intentclust {

PointMatrix PointMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  PointMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw DimMismatch("ragged point rows");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

PointMatrix PointMatrix::from_snapshot(const IndexSnapshot& snapshot) {
  PointMatrix m;
  m.rows = snapshot.size();
  m.cols = snapshot.dim();
  m.data.reserve(m.rows * m.cols);
  for (const auto& v : snapshot.vectors()) m.data.insert(m.data.end(), v.values().begin(), v.values().end());
  return m;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

struct Restart {
  std::vector<std::size_t> labels;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::size_t empty_reseeds = 0;
  std::vector<double> history;
};

class Lloyd {
 public:
  Lloyd(const PointMatrix& x, std::size_t k) : x_(x), k_(k), centroids_(k * x.cols), labels_(x.rows) {}

  std::span<double> centroid(std::size_t c) { return {centroids_.data() + c * x_.cols, x_.cols}; }

  /// Greedy k-means++: each step samples 2 + floor(ln k) candidates by D^2
  /// and keeps the one that lowers the potential most.
  void seed_plus_plus(Rng& rng) {
    const std::size_t n = x_.rows;
    const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k_)));
    auto first = rng.below(n);
    std::copy_n(x_.row(first).begin(), x_.cols, centroid(0).begin());
    std::vector<double> d2(n), cand_d2(n), best_d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x_.row(i), centroid(0));
    for (std::size_t c = 1; c < k_; ++c) {
      double total = 0.0;
      for (double v : d2) total += v;
      std::size_t pick = 0;
      double best_potential = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < trials; ++t) {
        const auto cand = total <= 0.0 ? rng.below(n) : sample_d2(d2, total, rng);
        double potential = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          cand_d2[i] = std::min(d2[i], sq_dist(x_.row(i), x_.row(cand)));
          potential += cand_d2[i];
        }
        if (potential < best_potential) {
          best_potential = potential;
          pick = cand;
          best_d2.swap(cand_d2);
        }
      }
      std::copy_n(x_.row(pick).begin(), x_.cols, centroid(c).begin());
      d2.swap(best_d2);
    }
  }

  static std::size_t sample_d2(const std::vector<double>& d2, double total, Rng& rng) {
    const double r = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < d2.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      last_positive = i;
      acc += d2[i];
      if (acc > r) break;
    }
    return last_positive;
  }

  /// Nearest centroid per point (ties -> lowest id); returns inertia.
  double assign() {
    double inertia = 0.0;
    for (std::size_t i = 0; i < x_.rows; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t c = 0; c < k_; ++c) {
        const double d = sq_dist(x_.row(i), centroid(c));
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      labels_[i] = arg;
      inertia += best;
    }
    return inertia;
  }

  /// Means of the current partition; returns how many empty clusters had
  /// to be re-seeded.
  std::size_t update() {
    std::vector<std::size_t> counts(k_, 0);
    std::fill(centroids_.begin(), centroids_.end(), 0.0);
    for (std::size_t i = 0; i < x_.rows; ++i) {
      auto c = centroid(labels_[i]);
      const auto r = x_.row(i);
      for (std::size_t d = 0; d < x_.cols; ++d) c[d] += r[d];
      ++counts[labels_[i]];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < k_; ++c) {
      if (counts[c] == 0) {
        empty.push_back(c);
        continue;
      }
      for (double& v : centroid(c)) v /= static_cast<double>(counts[c]);
    }
    if (empty.empty()) return 0;

    // Farthest points from their own (new) centroids, from clusters that
    // can spare one.
    std::vector<std::pair<double, std::size_t>> far;
    far.reserve(x_.rows);
    for (std::size_t i = 0; i < x_.rows; ++i) {
      if (counts[labels_[i]] > 1) far.emplace_back(sq_dist(x_.row(i), centroid(labels_[i])), i);
    }
    std::sort(far.begin(), far.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t e = 0; e < empty.size(); ++e) {
      const auto src = e < far.size() ? far[e].second : e % x_.rows;
      std::copy_n(x_.row(src).begin(), x_.cols, centroid(empty[e]).begin());
    }
    return empty.size();
  }

  const std::vector<std::size_t>& labels() const { return labels_; }

  double final_inertia() {
    update();
    double s = 0.0;
    for (std::size_t i = 0; i < x_.rows; ++i) s += sq_dist(x_.row(i), centroid(labels_[i]));
    return s;
  }

 private:
  const PointMatrix& x_;
  std::size_t k_;
  std::vector<double> centroids_;
  std::vector<std::size_t> labels_;
};

Restart run_restart(const PointMatrix& x, const KMeansConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Lloyd lloyd(x, cfg.k);
  lloyd.seed_plus_plus(rng);

  Restart r;
  double inertia = lloyd.assign();
  r.history.push_back(inertia);
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const auto prev_labels = lloyd.labels();
    r.empty_reseeds += lloyd.update();
    const double next = lloyd.assign();
    r.history.push_back(next);
    r.iterations = it;
    const bool fixpoint = lloyd.labels() == prev_labels;
    const bool small_change = inertia > 0.0 ? (inertia - next) <= cfg.tol * inertia : true;
    inertia = next;
    if (fixpoint || small_change) break;
  }
  if (r.iterations == 0) r.iterations = 1;
  r.labels = lloyd.labels();
  r.inertia = lloyd.final_inertia();
  return r;
}

bool all_identical(const PointMatrix& x) {
  const auto first = x.row(0);
  for (std::size_t i = 1; i < x.rows; ++i) {
    if (!std::equal(first.begin(), first.end(), x.row(i).begin())) return false;
  }
  return true;
}

}  // namespace

ClusterAssignment kmeans(const PointMatrix& input, const KMeansConfig& cfg) {
  if (cfg.k == 0) throw ConfigError("k must be >= 1");
  if (cfg.n_init == 0 || cfg.max_iters == 0) throw ConfigError("n_init and max_iters must be >= 1");
  if (cfg.tol < 0.0) throw ConfigError("tol must be >= 0");
  if (cfg.k > input.rows) {
    throw KTooLarge("k=" + std::to_string(cfg.k) + " exceeds the " + std::to_string(input.rows) + " points");
  }
  for (double v : input.data) {
    if (!std::isfinite(v)) throw Error("k-means input contains a non-finite value");
  }

  PointMatrix x = input;
  if (cfg.normalize) {
    for (std::size_t i = 0; i < x.rows; ++i) {
      double sq = 0.0;
      for (std::size_t d = 0; d < x.cols; ++d) sq += x.data[i * x.cols + d] * x.data[i * x.cols + d];
      if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (std::size_t d = 0; d < x.cols; ++d) x.data[i * x.cols + d] *= inv;
      }
    }
  }

  ClusterAssignment out;
  if (cfg.k > 1 && all_identical(x)) {
    out.degenerate = true;
    out.labels.resize(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out.labels[i] = i * cfg.k / x.rows;
    out.iterations_run = 1;
    return out;
  }

  std::vector<Restart> restarts(cfg.n_init);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  parallel_for(cfg.n_init, workers, [&](std::size_t r) {
    std::uint64_t s = cfg.seed ^ (0x9E3779B97F4A7C15ULL * (r + 1));
    restarts[r] = run_restart(x, cfg, splitmix64(s));
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts.size(); ++r) {
    if (restarts[r].inertia < restarts[best].inertia) best = r;
  }
  out.labels = restarts[best].labels;
  out.inertia = restarts[best].inertia;
  out.iterations_run = restarts[best].iterations;
  out.restart = best;
  for (auto& r : restarts) {
    out.empty_reseeds += r.empty_reseeds;
    out.inertia_history.push_back(std::move(r.history));
  }
  return out;
}

ClusterAssignment kmeans(const IndexSnapshot& snapshot, const KMeansConfig& cfg) {
  return kmeans(PointMatrix::from_snapshot(snapshot), cfg);
}

}  // namespace intentclust
