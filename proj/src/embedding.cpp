#include "intentclust/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "http_client.hpp"
#include "intentclust/error.hpp"

namespace intentclust {

EmbeddingVector::EmbeddingVector(std::vector<float> values) : values_(std::move(values)), norm_(0.0) {
  if (values_.empty()) throw Error("embedding vector must have dim > 0");
  double sq = 0.0;
  for (float v : values_) {
    if (!std::isfinite(v)) throw Error("embedding vector contains a non-finite entry");
    sq += static_cast<double>(v) * v;
  }
  norm_ = std::sqrt(sq);
  if (norm_ == 0.0) throw ZeroVector("embedding vector is all zeros");
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw DimMismatch("cosine of vectors with dims " + std::to_string(a.dim()) + " and " +
                                            std::to_string(b.dim()));
  double dot = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) dot += static_cast<double>(av[i]) * bv[i];
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// mock bag-of-words

namespace {

bool is_token_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<std::string> bow_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::size_t mock_bow_bucket(std::string_view token, std::size_t vocab_dim, std::uint64_t seed) {
  std::uint64_t state = fnv1a(token) ^ (seed * 0xD1B54A32D192ED03ULL);
  return static_cast<std::size_t>(splitmix64(state) % vocab_dim);
}

EmbeddingVector mock_bow_embed(std::string_view text, std::size_t vocab_dim, std::uint64_t seed) {
  if (vocab_dim < 8) throw ConfigError("mock_bow vocab_dim must be >= 8");
  const auto tokens = bow_tokens(text);
  if (tokens.empty()) throw EmptyTokenization("no tokens in text: '" + std::string(text) + "'");
  std::vector<double> counts(vocab_dim, 0.0);
  for (const auto& t : tokens) counts[mock_bow_bucket(t, vocab_dim, seed)] += 1.0;
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  const double inv = 1.0 / std::sqrt(sq);
  std::vector<float> values(vocab_dim);
  for (std::size_t i = 0; i < vocab_dim; ++i) values[i] = static_cast<float>(counts[i] * inv);
  return EmbeddingVector(std::move(values));
}

MockBowBackend::MockBowBackend(std::size_t vocab_dim, std::uint64_t seed, std::size_t max_batch)
    : vocab_dim_(vocab_dim), seed_(seed), max_batch_(max_batch) {
  if (vocab_dim_ < 8) throw ConfigError("mock_bow vocab_dim must be >= 8");
  if (max_batch_ == 0) throw ConfigError("mock_bow max_batch must be positive");
}

std::string MockBowBackend::id() const {
  return "mock_bow:dim=" + std::to_string(vocab_dim_) + ":seed=" + std::to_string(seed_);
}

std::vector<std::vector<float>> MockBowBackend::embed(std::span<const EmbedRequest> batch) {
  ++calls_;
  std::vector<std::vector<float>> out;
  out.reserve(batch.size());
  // The instruction prefix is ignored: it would add the same tokens to
  // every vector.
  for (const auto& r : batch) {
    const auto v = mock_bow_embed(r.content, vocab_dim_, seed_);
    out.emplace_back(v.values().begin(), v.values().end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP backend

HttpEmbeddingBackend::HttpEmbeddingBackend(HttpEndpoint endpoint, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), batch_size_(batch_size) {
  if (endpoint_.url.empty()) throw ConfigError("embedding endpoint URL is empty");
  if (batch_size_ == 0) throw ConfigError("embedding batch size must be positive");
}

std::string HttpEmbeddingBackend::id() const { return "http:" + endpoint_.url + ":" + endpoint_.model; }

std::string HttpEmbeddingBackend::wire_text(const EmbedRequest& request) {
  if (!request.instruction || request.instruction->empty()) return request.content;
  return *request.instruction + " " + request.content;
}

std::vector<std::vector<float>> HttpEmbeddingBackend::embed(std::span<const EmbedRequest> batch) {
  nlohmann::json input = nlohmann::json::array();
  for (const auto& r : batch) input.push_back(wire_text(r));
  const auto reply = detail::post_json(endpoint_.url, {{"model", endpoint_.model}, {"input", input}},
                                       endpoint_.api_key, endpoint_.timeout);

  const auto data = reply.find("data");
  if (data == reply.end() || !data->is_array()) throw Error("embedding reply lacks a \"data\" array");
  std::map<std::size_t, std::vector<float>> by_index;
  for (const auto& entry : *data) {
    const auto index = entry.at("index").get<std::size_t>();
    by_index[index] = entry.at("embedding").get<std::vector<float>>();
  }
  if (by_index.size() != batch.size() || (!by_index.empty() && by_index.rbegin()->first != batch.size() - 1)) {
    throw Error("embedding reply has " + std::to_string(by_index.size()) + " entries for " +
                std::to_string(batch.size()) + " inputs");
  }
  std::vector<std::vector<float>> out;
  out.reserve(batch.size());
  for (auto& [_, v] : by_index) out.push_back(std::move(v));
  return out;
}

// ---------------------------------------------------------------------------
// cache

EmbeddingCache::EmbeddingCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::string EmbeddingCache::key(std::string_view backend_id, std::string_view instruction, std::string_view content) {
  return digest_fields({"embed", backend_id, instruction, content});
}

namespace {

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32_le(std::string_view in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  return v;
}

}  // namespace

std::string EmbeddingCache::encode(const EmbeddingVector& vec) {
  std::string out;
  out.reserve(4 + 4 * vec.dim());
  put_u32_le(out, static_cast<std::uint32_t>(vec.dim()));
  for (float f : vec.values()) put_u32_le(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

EmbeddingVector EmbeddingCache::decode(std::string_view bytes) {
  if (bytes.size() < 4) throw Error("truncated embedding cache entry");
  const auto dim = get_u32_le(bytes);
  if (bytes.size() != 4 + 4 * static_cast<std::size_t>(dim)) throw Error("embedding cache entry has wrong length");
  std::vector<float> values(dim);
  for (std::size_t i = 0; i < dim; ++i) values[i] = std::bit_cast<float>(get_u32_le(bytes.substr(4 + 4 * i)));
  return EmbeddingVector(std::move(values));
}

std::optional<EmbeddingVector> EmbeddingCache::get(const std::string& key) const {
  {
    std::shared_lock lock(mu_);
    if (auto it = mem_.find(key); it != mem_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  const auto path = *dir_ / key.substr(0, 2) / (key + ".vec");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  auto vec = decode(buf.str());
  std::unique_lock lock(mu_);
  mem_.emplace(key, vec);
  return vec;
}

void EmbeddingCache::put(const std::string& key, const EmbeddingVector& vec) {
  {
    std::unique_lock lock(mu_);
    mem_.insert_or_assign(key, vec);
  }
  if (!dir_) return;
  std::lock_guard write_lock(write_mu_);
  const auto sub = *dir_ / key.substr(0, 2);
  std::filesystem::create_directories(sub);
  const auto tmp = sub / (key + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << encode(vec);
  }
  std::filesystem::rename(tmp, sub / (key + ".vec"));
}

// ---------------------------------------------------------------------------
// gateway

EmbedderGateway::EmbedderGateway(std::shared_ptr<EmbeddingBackend> backend, std::shared_ptr<EmbeddingCache> cache,
                                 Options options)
    : backend_(std::move(backend)),
      cache_(cache ? std::move(cache) : std::make_shared<EmbeddingCache>()),
      options_(std::move(options)),
      backend_id_(backend_->id()) {}

EmbedStats EmbedderGateway::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

std::vector<std::vector<float>> EmbedderGateway::call_with_retry(std::span<const EmbedRequest> chunk) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.backend_calls;
      }
      return backend_->embed(chunk);
    } catch (const BackendUnavailable& e) {
      if (attempt >= options_.retry.delays.size()) {
        throw BackendUnavailable(std::string("embedding backend unavailable after ") + std::to_string(attempt + 1) +
                                 " attempts: " + e.what());
      }
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.retries;
      }
      std::this_thread::sleep_for(options_.retry.delays[attempt]);
    }
  }
}

std::vector<EmbeddingVector> EmbedderGateway::embed_batch(std::span<const EmbedRequest> requests) {
  std::vector<std::optional<EmbeddingVector>> results(requests.size());
  std::vector<std::string> keys(requests.size());

  // Unique cache misses, in first-seen order.
  std::vector<std::size_t> miss_rep;
  std::unordered_map<std::string, std::size_t> miss_slot;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    if (r.content.empty()) throw Error("embed request content must be non-empty");
    keys[i] = EmbeddingCache::key(backend_id_, r.instruction.value_or(""), r.content);
    if (miss_slot.contains(keys[i])) continue;
    if (auto hit = cache_->get(keys[i])) {
      results[i] = std::move(*hit);
      ++hits;
    } else {
      miss_slot.emplace(keys[i], miss_rep.size());
      miss_rep.push_back(i);
    }
  }

  const std::size_t batch = std::max<std::size_t>(1, backend_->max_batch());
  const std::size_t n_chunks = (miss_rep.size() + batch - 1) / batch;
  std::vector<std::optional<EmbeddingVector>> fresh(miss_rep.size());
  parallel_for(n_chunks, options_.parallelism, [&](std::size_t c) {
    const std::size_t begin = c * batch;
    const std::size_t end = std::min(miss_rep.size(), begin + batch);
    std::vector<EmbedRequest> chunk;
    chunk.reserve(end - begin);
    for (std::size_t j = begin; j < end; ++j) chunk.push_back(requests[miss_rep[j]]);
    auto raw = call_with_retry(chunk);
    if (raw.size() != chunk.size()) {
      throw Error("embedding backend returned " + std::to_string(raw.size()) + " vectors for " +
                  std::to_string(chunk.size()) + " inputs");
    }
    for (std::size_t j = begin; j < end; ++j) {
      EmbeddingVector v(std::move(raw[j - begin]));
      cache_->put(keys[miss_rep[j]], v);
      fresh[j] = std::move(v);
    }
  });

  std::vector<EmbeddingVector> out;
  out.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!results[i]) results[i] = fresh[miss_slot.at(keys[i])];
    if (!out.empty() && results[i]->dim() != out.front().dim()) {
      throw DimMismatch("embedding dims disagree within one batch: " + std::to_string(out.front().dim()) + " vs " +
                        std::to_string(results[i]->dim()));
    }
    out.push_back(std::move(*results[i]));
  }

  std::lock_guard lock(stats_mu_);
  stats_.requests += requests.size();
  stats_.cache_hits += hits;
  return out;
}

std::vector<EmbeddingVector> EmbedderGateway::embed_texts(std::span<const std::string> texts) {
  std::vector<EmbedRequest> reqs;
  reqs.reserve(texts.size());
  for (const auto& t : texts) reqs.push_back({options_.instruction, t});
  return embed_batch(reqs);
}

}  // namespace intentclust
