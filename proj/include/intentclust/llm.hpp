#pragma once

#include <atomic>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "intentclust/corpus.hpp"
#include "intentclust/embedding.hpp"
#include "intentclust/util.hpp"
#include "json.hpp"

namespace intentclust {

/// Intent name in lowercase_underscore form: [a-z0-9]+ joined by single
/// underscores.
class PseudoLabel {
 public:
  /// Throws EmptyLabel for "" and FormatViolation for any other token that
  /// is not already in canonical form. Use normalize_label for raw text.
  explicit PseudoLabel(std::string token);

  const std::string& str() const noexcept { return token_; }

  auto operator<=>(const PseudoLabel&) const = default;

 private:
  std::string token_;
};

bool is_canonical_label(std::string_view token);

/// Lowercases, collapses every run of non-alphanumeric characters into one
/// underscore and trims underscores at both ends. Throws EmptyLabel when
/// nothing is left.
PseudoLabel normalize_label(std::string_view raw);

struct ConstructionPrompt {
  std::string target_text;
  std::vector<std::string> candidates;
};

struct ClassificationCandidate {
  std::string text;
  PseudoLabel initial_label;
};

struct ClassificationPrompt {
  std::string target_text;
  std::vector<ClassificationCandidate> candidates;
};

/// Label-generation prompt. Newline runs inside texts become one space.
std::string render_construction_prompt(const ConstructionPrompt& prompt);
/// Multi-label selection prompt; candidate lines read "i. {text} {label}".
std::string render_classification_prompt(const ClassificationPrompt& prompt);

inline constexpr std::string_view kConstructionMarker = "The intent is:";
inline constexpr std::string_view kClassificationMarker = "The selected intent(s):";

/// Label after the last "The intent is:" (case-insensitive), normalized.
/// Throws FormatViolation if the marker is missing or the label is empty.
PseudoLabel parse_construction_reply(std::string_view raw);

struct ClassificationParse {
  std::vector<PseudoLabel> selected;  ///< reply order, no duplicates, all in `allowed`
  std::vector<std::string> dropped;   ///< tokens that were not among the allowed labels
};

/// Labels after the last "The selected intent(s):" (case-insensitive).
/// "none" yields an empty selection. Throws FormatViolation if the marker
/// is missing.
ClassificationParse parse_classification_reply(std::string_view raw, std::span<const PseudoLabel> allowed);

enum class PromptKind { Construction, Classification, Unknown };

/// Inverse of the renderers; lets mock backends answer from prompt text.
struct ParsedPrompt {
  PromptKind kind = PromptKind::Unknown;
  std::string target;
  std::vector<std::string> candidate_texts;
  std::vector<std::string> candidate_labels;  ///< classification only
};

ParsedPrompt parse_prompt(std::string_view prompt);

struct DecodeParams {
  double temperature = 0.0;
  int max_tokens = 64;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string id() const = 0;
  /// Largest accepted prompt in bytes; 0 means unbounded.
  virtual std::size_t context_limit() const = 0;
  /// Must be safe to call concurrently. Transport failures are reported as
  /// BackendUnavailable.
  virtual std::string complete(const std::string& prompt, const DecodeParams& decode) = 0;
};

/// Canned replies: an exact prompt->reply map first, then an optional
/// handler, then per-kind defaults. Throws Error when nothing matches.
class ScriptedChatBackend final : public ChatBackend {
 public:
  using Handler = std::function<std::optional<std::string>(const std::string& prompt)>;

  struct Script {
    std::map<std::string, std::string> replies;
    std::optional<std::string> construction_default;
    std::optional<std::string> classification_default;
    Handler handler;
  };

  explicit ScriptedChatBackend(Script script, std::string name = "scripted", std::size_t context_limit = 0);

  std::string id() const override { return name_; }
  std::size_t context_limit() const override { return context_limit_; }
  std::string complete(const std::string& prompt, const DecodeParams& decode) override;

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  Script script_;
  std::string name_;
  std::size_t context_limit_;
  std::atomic<std::size_t> calls_{0};
};

/// Answers from gold intents: construction returns the target's normalized
/// gold intent; classification selects exactly the candidates whose gold
/// intent equals the target's.
class OracleChatBackend final : public ChatBackend {
 public:
  /// Requires a labeled corpus.
  explicit OracleChatBackend(const Corpus& corpus);

  std::string id() const override { return "oracle"; }
  std::size_t context_limit() const override { return 0; }
  std::string complete(const std::string& prompt, const DecodeParams& decode) override;

  /// Gold intent of a text as seen in prompts; nullopt for unknown texts.
  std::optional<std::string> gold_of(const std::string& text) const;

 private:
  std::unordered_map<std::string, std::string> gold_by_text_;
};

/// OpenAI-style chat-completions endpoint; the prompt is sent as a single
/// user message.
class HttpChatBackend final : public ChatBackend {
 public:
  HttpChatBackend(HttpEndpoint endpoint, std::size_t context_limit);

  std::string id() const override { return "http:" + endpoint_.url + ":" + endpoint_.model; }
  std::size_t context_limit() const override { return context_limit_; }
  std::string complete(const std::string& prompt, const DecodeParams& decode) override;

  static nlohmann::json request_body(const std::string& model, const std::string& prompt, const DecodeParams& decode);

 private:
  HttpEndpoint endpoint_;
  std::size_t context_limit_;
};

/// Raw completions keyed by content hash; on disk as <dir>/<key[0:2]>/<key>.txt.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& value);

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::string> mem_;
  std::mutex write_mu_;
};

struct LlmReply {
  std::string raw;
  std::vector<PseudoLabel> labels;  ///< one label for construction; the selection for classification
  std::vector<std::string> dropped;
  std::size_t attempts = 0;
  bool fallback = false;
};

struct LlmStats {
  std::size_t completions = 0;
  std::size_t cache_hits = 0;
  std::size_t backend_calls = 0;
  std::size_t retries = 0;
  std::size_t format_violations = 0;
  std::size_t fallbacks = 0;
  std::size_t dropped_tokens = 0;
};

/// Label used when construction replies keep violating the format: the
/// normalized first six whitespace tokens of the target text.
PseudoLabel construction_fallback_label(std::string_view target_text);

class LlmGateway {
 public:
  struct Options {
    DecodeParams decode;
    std::size_t parallelism = 4;
    std::size_t max_reasks = 2;
    RetryPolicy retry;
  };

  LlmGateway(std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache, Options options);

  static std::string cache_key(std::string_view backend_id, std::string_view prompt, const DecodeParams& decode,
                               std::size_t attempt);

  /// Raw completion for `prompt`; `attempt` distinguishes re-asks in the
  /// cache. Throws ContextOverflow before any backend call when the prompt
  /// exceeds the backend's limit, BackendUnavailable once retries run out.
  std::string complete(const std::string& prompt, std::size_t attempt = 0);

  /// Renders, completes and parses a construction prompt, re-asking on
  /// FormatViolation and falling back to construction_fallback_label.
  LlmReply construct_label(const ConstructionPrompt& prompt);

  /// Renders, completes and parses a classification prompt; persistent
  /// format violations fall back to an empty selection.
  LlmReply classify(const ClassificationPrompt& prompt);

  const std::string& backend_id() const noexcept { return backend_id_; }
  std::size_t parallelism() const noexcept { return options_.parallelism; }
  const Options& options() const noexcept { return options_; }
  LlmStats stats() const;

 private:
  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<ResponseCache> cache_;
  Options options_;
  std::string backend_id_;
  mutable std::mutex stats_mu_;
  LlmStats stats_;
};

}  // namespace intentclust
