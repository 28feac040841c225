#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "intentclust/corpus.hpp"
#include "intentclust/embedding.hpp"

namespace intentclust {

struct Neighbor {
  UtteranceId id;
  double similarity;

  bool operator==(const Neighbor&) const = default;
};

/// Embeddings of every utterance for one pipeline round. Immutable; vectors
/// are stored unit-normalized and contiguous for the exact scan.
class IndexSnapshot {
 public:
  /// Throws DimMismatch if dims differ, Error if `vectors` is empty.
  IndexSnapshot(std::vector<EmbeddingVector> vectors, std::size_t round);

  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t round() const noexcept { return round_; }
  const std::vector<EmbeddingVector>& vectors() const noexcept { return vectors_; }
  const EmbeddingVector& operator[](UtteranceId id) const { return vectors_.at(id); }

  /// Unit-normalized row for `id`.
  std::span<const double> unit_row(UtteranceId id) const {
    return {unit_.data() + id * dim_, dim_};
  }

  /// Up to m neighbors of `query_id`, by cosine similarity descending with
  /// ties broken by ascending id. Throws MOutOfRange if query_id >= N, if
  /// m == 0, or if m > N-1 under exclude_self (m > N otherwise).
  std::vector<Neighbor> top_m(UtteranceId query_id, std::size_t m, bool exclude_self) const;

  /// Every other utterance ranked as in top_m.
  std::vector<Neighbor> ranked(UtteranceId query_id, bool exclude_self) const;

 private:
  std::vector<Neighbor> scan(UtteranceId query_id, bool exclude_self) const;

  std::vector<EmbeddingVector> vectors_;
  std::vector<double> unit_;
  std::size_t dim_ = 0;
  std::size_t round_ = 0;
};

}  // namespace intentclust
