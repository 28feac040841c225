#include "intentclust/llm.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "http_client.hpp"
#include "intentclust/error.hpp"

namespace intentclust {

// ---------------------------------------------------------------------------
// labels

bool is_canonical_label(std::string_view token) {
  if (token.empty() || token.front() == '_' || token.back() == '_') return false;
  char prev = 0;
  for (char c : token) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
    if (c == '_' && prev == '_') return false;
    prev = c;
  }
  return true;
}

PseudoLabel::PseudoLabel(std::string token) : token_(std::move(token)) {
  if (token_.empty()) throw EmptyLabel("pseudo-label is empty");
  if (!is_canonical_label(token_)) throw FormatViolation("'" + token_ + "' is not a lowercase_underscore label");
}

PseudoLabel normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_sep = false;
  for (unsigned char c : raw) {
    if (std::isalnum(c) && c < 0x80) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_sep = true;
    }
  }
  if (out.empty()) throw EmptyLabel("label '" + std::string(raw) + "' normalizes to nothing");
  return PseudoLabel(std::move(out));
}

PseudoLabel construction_fallback_label(std::string_view target_text) {
  std::istringstream words{std::string(target_text)};
  std::string word, joined;
  for (int i = 0; i < 6 && words >> word; ++i) {
    if (!joined.empty()) joined.push_back(' ');
    joined += word;
  }
  try {
    return normalize_label(joined);
  } catch (const EmptyLabel&) {
    return PseudoLabel("unlabeled");
  }
}

// ---------------------------------------------------------------------------
// prompt templates

namespace {

constexpr std::string_view kConstructionHead =
    "Task Instructions:\n"
    "1. You are given a target utterance and several candidate utterances. One or more candidates share the "
    "same intent as the target.\n"
    "2. Create a single intent label that best represents the target utterance and all matching candidate(s).\n"
    "\n"
    "Answer Format:\n"
    "1. Use the format: The intent is: [intent]\n"
    "2. Use lowercase and separate all words with underscores (e.g., answerisseparate \xE2\x86\x92 "
    "answer_is_separate).\n"
    "3. No explanations. Stick to the format.\n"
    "\n"
    "Task:\n";

constexpr std::string_view kClassificationHead =
    "Task Instructions:\n"
    "1. You are given one target utterance.\n"
    "2. You are also given several candidate utterances with labeled intents.\n"
    "3. Your task is to select the intent(s) that match the target utterance from the candidates.\n"
    "\n"
    "Answer Format:\n"
    "1. Use the format: The selected intent(s): [Intent1], [Intent2], ..., [IntentN]\n"
    "2. If no candidate matches, write: The selected intent(s): none\n"
    "3. No explanations. Stick to the format.\n"
    "\n"
    "Task:\n";

constexpr std::string_view kTargetPrefix = "Target Utterance: ";
constexpr std::string_view kCandidatesHeader = "Candidate Utterances:";

}  // namespace

std::string render_construction_prompt(const ConstructionPrompt& prompt) {
  std::string out(kConstructionHead);
  out += kTargetPrefix;
  out += flatten_newlines(prompt.target_text);
  out += '\n';
  out += kCandidatesHeader;
  out += '\n';
  for (std::size_t i = 0; i < prompt.candidates.size(); ++i) {
    out += std::to_string(i + 1) + ". " + flatten_newlines(prompt.candidates[i]) + '\n';
  }
  return out;
}

std::string render_classification_prompt(const ClassificationPrompt& prompt) {
  std::string out(kClassificationHead);
  out += kTargetPrefix;
  out += flatten_newlines(prompt.target_text);
  out += '\n';
  out += kCandidatesHeader;
  out += '\n';
  for (std::size_t i = 0; i < prompt.candidates.size(); ++i) {
    const auto& c = prompt.candidates[i];
    out += std::to_string(i + 1) + ". " + flatten_newlines(c.text) + ' ' + c.initial_label.str() + '\n';
  }
  return out;
}

ParsedPrompt parse_prompt(std::string_view prompt) {
  ParsedPrompt parsed;
  if (prompt.starts_with(kConstructionHead)) {
    parsed.kind = PromptKind::Construction;
    prompt.remove_prefix(kConstructionHead.size());
  } else if (prompt.starts_with(kClassificationHead)) {
    parsed.kind = PromptKind::Classification;
    prompt.remove_prefix(kClassificationHead.size());
  } else {
    return parsed;
  }

  std::vector<std::string_view> lines;
  while (!prompt.empty()) {
    const auto eol = prompt.find('\n');
    lines.push_back(prompt.substr(0, eol));
    prompt.remove_prefix(eol == std::string_view::npos ? prompt.size() : eol + 1);
  }
  if (lines.size() < 2 || !lines[0].starts_with(kTargetPrefix) || lines[1] != kCandidatesHeader) {
    parsed.kind = PromptKind::Unknown;
    return parsed;
  }
  parsed.target = std::string(lines[0].substr(kTargetPrefix.size()));
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::string number = std::to_string(i - 1) + ". ";
    if (!lines[i].starts_with(number)) break;
    auto body = lines[i].substr(number.size());
    if (parsed.kind == PromptKind::Classification) {
      const auto sp = body.rfind(' ');
      if (sp == std::string_view::npos) break;
      parsed.candidate_labels.emplace_back(body.substr(sp + 1));
      body = body.substr(0, sp);
    }
    parsed.candidate_texts.emplace_back(body);
  }
  return parsed;
}

// ---------------------------------------------------------------------------
// reply parsing

namespace {

std::optional<std::string_view> after_last_marker(std::string_view raw, std::string_view marker) {
  const auto lower = to_lower_ascii(raw);
  const auto pos = lower.rfind(to_lower_ascii(marker));
  if (pos == std::string::npos) return std::nullopt;
  return raw.substr(pos + marker.size());
}

std::string strip_decorations(std::string_view s) {
  auto is_deco = [](unsigned char c) {
    return std::isspace(c) || c == '[' || c == ']' || c == '{' || c == '}' || c == '"' || c == '\'' || c == '`' ||
           c == '.' || c == '*';
  };
  std::size_t b = 0, e = s.size();
  while (b < e && is_deco(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_deco(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

PseudoLabel parse_construction_reply(std::string_view raw) {
  auto rest = after_last_marker(raw, kConstructionMarker);
  if (!rest) throw FormatViolation("reply lacks \"" + std::string(kConstructionMarker) + "\"");
  auto body = std::string_view(*rest);
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
  body = body.substr(0, body.find('\n'));
  try {
    return normalize_label(strip_decorations(body));
  } catch (const EmptyLabel&) {
    throw FormatViolation("reply carries an empty intent label");
  }
}

ClassificationParse parse_classification_reply(std::string_view raw, std::span<const PseudoLabel> allowed) {
  auto rest = after_last_marker(raw, kClassificationMarker);
  if (!rest) throw FormatViolation("reply lacks \"" + std::string(kClassificationMarker) + "\"");

  const std::set<PseudoLabel> allowed_set(allowed.begin(), allowed.end());
  ClassificationParse out;
  std::set<PseudoLabel> seen;
  std::string_view body = *rest;
  while (true) {
    const auto cut = body.find_first_of(",\n");
    const auto piece = strip_decorations(body.substr(0, cut));
    if (!piece.empty()) {
      std::optional<PseudoLabel> label;
      try {
        label = normalize_label(piece);
      } catch (const EmptyLabel&) {
      }
      if (!label) {
        out.dropped.push_back(piece);
      } else if (label->str() != "none") {
        if (!allowed_set.contains(*label)) {
          out.dropped.push_back(label->str());
        } else if (seen.insert(*label).second) {
          out.selected.push_back(*label);
        }
      }
    }
    if (cut == std::string_view::npos) break;
    body.remove_prefix(cut + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// backends

ScriptedChatBackend::ScriptedChatBackend(Script script, std::string name, std::size_t context_limit)
    : script_(std::move(script)), name_(std::move(name)), context_limit_(context_limit) {}

std::string ScriptedChatBackend::complete(const std::string& prompt, const DecodeParams&) {
  ++calls_;
  if (auto it = script_.replies.find(prompt); it != script_.replies.end()) return it->second;
  if (script_.handler) {
    if (auto reply = script_.handler(prompt)) return *reply;
  }
  const auto kind = parse_prompt(prompt).kind;
  if (kind == PromptKind::Construction && script_.construction_default) return *script_.construction_default;
  if (kind == PromptKind::Classification && script_.classification_default) return *script_.classification_default;
  throw Error("scripted backend '" + name_ + "' has no reply for this prompt");
}

OracleChatBackend::OracleChatBackend(const Corpus& corpus) {
  if (!corpus.labeled()) throw ConfigError("the oracle LLM needs a corpus with gold labels");
  for (const auto& u : corpus.utterances()) gold_by_text_.emplace(flatten_newlines(u.text), *u.gold_intent);
}

std::optional<std::string> OracleChatBackend::gold_of(const std::string& text) const {
  if (auto it = gold_by_text_.find(text); it != gold_by_text_.end()) return it->second;
  return std::nullopt;
}

std::string OracleChatBackend::complete(const std::string& prompt, const DecodeParams&) {
  const auto parsed = parse_prompt(prompt);
  const auto gold = gold_of(parsed.target);
  switch (parsed.kind) {
    case PromptKind::Construction:
      if (!gold) return "I cannot tell.";
      return std::string(kConstructionMarker) + " " + normalize_label(*gold).str();
    case PromptKind::Classification: {
      std::string picked;
      for (std::size_t i = 0; i < parsed.candidate_texts.size(); ++i) {
        if (gold && gold_of(parsed.candidate_texts[i]) == gold) {
          if (!picked.empty()) picked += ", ";
          picked += parsed.candidate_labels[i];
        }
      }
      return std::string(kClassificationMarker) + " " + (picked.empty() ? "none" : picked);
    }
    case PromptKind::Unknown:
      break;
  }
  return "Unrecognized prompt.";
}

HttpChatBackend::HttpChatBackend(HttpEndpoint endpoint, std::size_t context_limit)
    : endpoint_(std::move(endpoint)), context_limit_(context_limit) {
  if (endpoint_.url.empty()) throw ConfigError("chat endpoint URL is empty");
}

nlohmann::json HttpChatBackend::request_body(const std::string& model, const std::string& prompt,
                                             const DecodeParams& decode) {
  return {{"model", model},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
          {"temperature", decode.temperature},
          {"max_tokens", decode.max_tokens}};
}

std::string HttpChatBackend::complete(const std::string& prompt, const DecodeParams& decode) {
  const auto reply =
      detail::post_json(endpoint_.url, request_body(endpoint_.model, prompt, decode), endpoint_.api_key,
                        endpoint_.timeout);
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("chat reply lacks choices[0].message.content: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// cache

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  {
    std::shared_lock lock(mu_);
    if (auto it = mem_.find(key); it != mem_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  std::ifstream in(*dir_ / key.substr(0, 2) / (key + ".txt"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  std::unique_lock lock(mu_);
  mem_.emplace(key, buf.str());
  return buf.str();
}

void ResponseCache::put(const std::string& key, const std::string& value) {
  {
    std::unique_lock lock(mu_);
    mem_.insert_or_assign(key, value);
  }
  if (!dir_) return;
  std::lock_guard write_lock(write_mu_);
  const auto sub = *dir_ / key.substr(0, 2);
  std::filesystem::create_directories(sub);
  const auto tmp = sub / (key + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << value;
  }
  std::filesystem::rename(tmp, sub / (key + ".txt"));
}

// ---------------------------------------------------------------------------
// gateway

LlmGateway::LlmGateway(std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache, Options options)
    : backend_(std::move(backend)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      options_(std::move(options)),
      backend_id_(backend_->id()) {}

LlmStats LlmGateway::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

std::string LlmGateway::cache_key(std::string_view backend_id, std::string_view prompt, const DecodeParams& decode,
                                  std::size_t attempt) {
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.17g", decode.temperature);
  return digest_fields({"chat", backend_id, prompt, temp, std::to_string(decode.max_tokens), std::to_string(attempt)});
}

std::string LlmGateway::complete(const std::string& prompt, std::size_t attempt) {
  const auto limit = backend_->context_limit();
  if (limit != 0 && prompt.size() > limit) {
    throw ContextOverflow("prompt of " + std::to_string(prompt.size()) + " bytes exceeds the backend limit of " +
                          std::to_string(limit));
  }
  const auto key = cache_key(backend_id_, prompt, options_.decode, attempt);
  {
    std::lock_guard lock(stats_mu_);
    ++stats_.completions;
  }
  if (auto hit = cache_->get(key)) {
    std::lock_guard lock(stats_mu_);
    ++stats_.cache_hits;
    return *hit;
  }
  for (std::size_t retry = 0;; ++retry) {
    try {
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.backend_calls;
      }
      auto raw = backend_->complete(prompt, options_.decode);
      cache_->put(key, raw);
      return raw;
    } catch (const BackendUnavailable& e) {
      if (retry >= options_.retry.delays.size()) {
        throw BackendUnavailable(std::string("chat backend unavailable after ") + std::to_string(retry + 1) +
                                 " attempts: " + e.what());
      }
      {
        std::lock_guard lock(stats_mu_);
        ++stats_.retries;
      }
      std::this_thread::sleep_for(options_.retry.delays[retry]);
    }
  }
}

LlmReply LlmGateway::construct_label(const ConstructionPrompt& prompt) {
  const auto text = render_construction_prompt(prompt);
  LlmReply reply;
  for (std::size_t attempt = 0; attempt <= options_.max_reasks; ++attempt) {
    reply.raw = complete(text, attempt);
    reply.attempts = attempt + 1;
    try {
      reply.labels = {parse_construction_reply(reply.raw)};
      return reply;
    } catch (const FormatViolation&) {
      std::lock_guard lock(stats_mu_);
      ++stats_.format_violations;
    }
  }
  reply.labels = {construction_fallback_label(prompt.target_text)};
  reply.fallback = true;
  std::lock_guard lock(stats_mu_);
  ++stats_.fallbacks;
  return reply;
}

LlmReply LlmGateway::classify(const ClassificationPrompt& prompt) {
  const auto text = render_classification_prompt(prompt);
  std::vector<PseudoLabel> allowed;
  allowed.reserve(prompt.candidates.size());
  for (const auto& c : prompt.candidates) allowed.push_back(c.initial_label);

  LlmReply reply;
  for (std::size_t attempt = 0; attempt <= options_.max_reasks; ++attempt) {
    reply.raw = complete(text, attempt);
    reply.attempts = attempt + 1;
    try {
      auto parsed = parse_classification_reply(reply.raw, allowed);
      reply.labels = std::move(parsed.selected);
      reply.dropped = std::move(parsed.dropped);
      if (!reply.dropped.empty()) {
        std::lock_guard lock(stats_mu_);
        stats_.dropped_tokens += reply.dropped.size();
      }
      return reply;
    } catch (const FormatViolation&) {
      std::lock_guard lock(stats_mu_);
      ++stats_.format_violations;
    }
  }
  reply.fallback = true;
  std::lock_guard lock(stats_mu_);
  ++stats_.fallbacks;
  return reply;
}

}  // namespace intentclust
