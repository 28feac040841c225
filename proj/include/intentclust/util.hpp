#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace intentclust {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Builds an unambiguous hash key from several fields (each field is length
/// prefixed, so ("ab","c") and ("a","bc") never collide).
std::string digest_fields(std::initializer_list<std::string_view> fields);

/// SplitMix64 step. Used wherever a seed has to be stretched into a stream,
/// because std:: distributions are not portable across standard libraries.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Small portable PRNG: identical streams on every platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

/// Runs fn(i) for i in [0, n) on at most `workers` threads. The first
/// exception (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Retry schedule for transport calls: one initial attempt plus one retry
/// per entry in `delays`.
struct RetryPolicy {
  std::vector<std::chrono::milliseconds> delays{std::chrono::milliseconds(500),
                                                std::chrono::milliseconds(2000),
                                                std::chrono::milliseconds(8000)};
};

std::string trim(std::string_view s);

/// Replaces every run of CR/LF characters by a single space.
std::string flatten_newlines(std::string_view s);

std::string to_lower_ascii(std::string_view s);

}  // namespace intentclust
