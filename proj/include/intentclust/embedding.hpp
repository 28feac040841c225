#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "intentclust/util.hpp"

namespace intentclust {

/// A non-zero, finite embedding with its L2 norm cached.
class EmbeddingVector {
 public:
  /// Throws ZeroVector for an all-zero input and Error for non-finite
  /// entries or an empty vector.
  explicit EmbeddingVector(std::vector<float> values);

  std::span<const float> values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  double norm() const noexcept { return norm_; }

  bool operator==(const EmbeddingVector& other) const { return values_ == other.values_; }

 private:
  std::vector<float> values_;
  double norm_;
};

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);
inline double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) { return 1.0 - cosine(a, b); }

struct EmbedRequest {
  std::optional<std::string> instruction;
  std::string content;
};

/// Lowercased tokens split on anything that is not an ASCII letter/digit.
/// Non-ASCII bytes are kept inside tokens so UTF-8 words stay whole.
std::vector<std::string> bow_tokens(std::string_view text);

/// Hashed bag-of-words embedding, L2-normalized. Deterministic for a fixed
/// (text, vocab_dim, seed). Throws EmptyTokenization when text has no tokens.
EmbeddingVector mock_bow_embed(std::string_view text, std::size_t vocab_dim, std::uint64_t seed);

/// Bucket a single token lands in under mock_bow_embed.
std::size_t mock_bow_bucket(std::string_view token, std::size_t vocab_dim, std::uint64_t seed);

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  /// Stable identity; part of every cache key.
  virtual std::string id() const = 0;
  virtual std::size_t max_batch() const = 0;
  /// One raw vector per request, same order. Transport failures must be
  /// reported as BackendUnavailable so the gateway can retry them.
  virtual std::vector<std::vector<float>> embed(std::span<const EmbedRequest> batch) = 0;
};

class MockBowBackend final : public EmbeddingBackend {
 public:
  MockBowBackend(std::size_t vocab_dim, std::uint64_t seed, std::size_t max_batch = 512);

  std::string id() const override;
  std::size_t max_batch() const override { return max_batch_; }
  std::vector<std::vector<float>> embed(std::span<const EmbedRequest> batch) override;

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::size_t vocab_dim_;
  std::uint64_t seed_;
  std::size_t max_batch_;
  std::atomic<std::size_t> calls_{0};
};

struct HttpEndpoint {
  std::string url;  ///< full URL, e.g. http://localhost:8080/v1/embeddings
  std::string model;
  std::string api_key;  ///< empty: no Authorization header
  std::chrono::seconds timeout{60};
};

/// OpenAI-style embeddings endpoint: POST {"model","input":[...]} and
/// read data[].embedding, re-sorted by data[].index.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  HttpEmbeddingBackend(HttpEndpoint endpoint, std::size_t batch_size);

  std::string id() const override;
  std::size_t max_batch() const override { return batch_size_; }
  std::vector<std::vector<float>> embed(std::span<const EmbedRequest> batch) override;

  /// Text actually sent for one request: "<instruction> <content>".
  static std::string wire_text(const EmbedRequest& request);

 private:
  HttpEndpoint endpoint_;
  std::size_t batch_size_;
};

/// Content-addressed vector store. Values live in memory and, when a
/// directory is given, on disk as <dir>/<key[0:2]>/<key>.vec holding a
/// little-endian uint32 dim followed by dim little-endian float32s.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::optional<std::filesystem::path> dir = std::nullopt);

  static std::string key(std::string_view backend_id, std::string_view instruction, std::string_view content);

  std::optional<EmbeddingVector> get(const std::string& key) const;
  void put(const std::string& key, const EmbeddingVector& vec);

  static std::string encode(const EmbeddingVector& vec);
  static EmbeddingVector decode(std::string_view bytes);

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, EmbeddingVector> mem_;
  std::mutex write_mu_;
};

struct EmbedStats {
  std::size_t requests = 0;
  std::size_t cache_hits = 0;
  std::size_t backend_calls = 0;
  std::size_t retries = 0;
};

class EmbedderGateway {
 public:
  struct Options {
    std::string instruction = "Represent the sentence for intent clustering:";
    std::size_t parallelism = 8;
    RetryPolicy retry;
  };

  EmbedderGateway(std::shared_ptr<EmbeddingBackend> backend, std::shared_ptr<EmbeddingCache> cache,
                  Options options);

  /// One vector per request, same order. Cached entries never reach the
  /// backend; misses are de-duplicated and chunked by the backend's
  /// max_batch, with chunks issued concurrently.
  std::vector<EmbeddingVector> embed_batch(std::span<const EmbedRequest> requests);

  /// Embeds plain strings under the configured instruction.
  std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts);

  const std::string& backend_id() const noexcept { return backend_id_; }
  const std::string& instruction() const noexcept { return options_.instruction; }
  EmbedStats stats() const;

 private:
  std::vector<std::vector<float>> call_with_retry(std::span<const EmbedRequest> chunk);

  std::shared_ptr<EmbeddingBackend> backend_;
  std::shared_ptr<EmbeddingCache> cache_;
  Options options_;
  std::string backend_id_;
  mutable std::mutex stats_mu_;
  EmbedStats stats_;
};

}  // namespace intentclust
