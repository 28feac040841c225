#include "intentclust/vector_index.hpp"

#include <algorithm>

#include "intentclust/error.hpp"

namespace intentclust {

namespace {

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

}  // namespace

IndexSnapshot::IndexSnapshot(std::vector<EmbeddingVector> vectors, std::size_t round)
    : vectors_(std::move(vectors)), round_(round) {
  if (vectors_.empty()) throw Error("index snapshot needs at least one vector");
  dim_ = vectors_.front().dim();
  unit_.resize(vectors_.size() * dim_);
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const auto& v = vectors_[i];
    if (v.dim() != dim_) {
      throw DimMismatch("snapshot vector " + std::to_string(i) + " has dim " + std::to_string(v.dim()) +
                        ", expected " + std::to_string(dim_));
    }
    const double inv = 1.0 / v.norm();
    for (std::size_t d = 0; d < dim_; ++d) unit_[i * dim_ + d] = v.values()[d] * inv;
  }
}

std::vector<Neighbor> IndexSnapshot::scan(UtteranceId query_id, bool exclude_self) const {
  if (query_id >= size()) {
    throw MOutOfRange("query id " + std::to_string(query_id) + " outside snapshot of size " + std::to_string(size()));
  }
  const auto q = unit_row(query_id);
  std::vector<Neighbor> all;
  all.reserve(size());
  for (std::size_t j = 0; j < size(); ++j) {
    if (exclude_self && j == query_id) continue;
    const auto row = unit_row(j);
    double dot = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) dot += q[d] * row[d];
    all.push_back({j, std::clamp(dot, -1.0, 1.0)});
  }
  return all;
}

std::vector<Neighbor> IndexSnapshot::top_m(UtteranceId query_id, std::size_t m, bool exclude_self) const {
  const std::size_t available = exclude_self ? size() - 1 : size();
  if (m == 0 || m > available) {
    throw MOutOfRange("m=" + std::to_string(m) + " but only " + std::to_string(available) + " candidates exist");
  }
  auto all = scan(query_id, exclude_self);
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m), all.end(), ranks_before);
  all.resize(m);
  return all;
}

std::vector<Neighbor> IndexSnapshot::ranked(UtteranceId query_id, bool exclude_self) const {
  auto all = scan(query_id, exclude_self);
  std::sort(all.begin(), all.end(), ranks_before);
  return all;
}

}  // namespace intentclust
