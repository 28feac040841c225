#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intentclust {

using UtteranceId = std::size_t;

struct Utterance {
  UtteranceId id = 0;
  std::string text;
  std::optional<std::string> gold_intent;

  bool operator==(const Utterance&) const = default;
};

enum class CorpusFormat { Jsonl, Csv };

CorpusFormat parse_corpus_format(std::string_view name);

/// The clustering population D. Immutable once built: ids are dense in
/// [0, N) and follow record order.
class Corpus {
 public:
  /// Validates and takes ownership. Ids are (re)assigned from position.
  /// Throws EmptyCorpus when fewer than two utterances are given and
  /// MixedLabeling when gold intents are only partially present.
  Corpus(std::string name, std::vector<Utterance> utterances);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return utterances_.size(); }
  const Utterance& operator[](UtteranceId id) const { return utterances_.at(id); }
  const std::vector<Utterance>& utterances() const noexcept { return utterances_; }

  bool labeled() const noexcept { return gold_k_.has_value(); }
  std::optional<std::size_t> gold_k() const noexcept { return gold_k_; }

  /// Gold intents mapped to dense class ids in order of first appearance.
  /// Empty when the corpus is unlabeled.
  const std::vector<std::size_t>& gold_ids() const noexcept { return gold_ids_; }
  /// Class id -> intent name, parallel to gold_ids().
  const std::vector<std::string>& gold_names() const noexcept { return gold_names_; }

  bool operator==(const Corpus& other) const {
    return name_ == other.name_ && utterances_ == other.utterances_;
  }

 private:
  std::string name_;
  std::vector<Utterance> utterances_;
  std::optional<std::size_t> gold_k_;
  std::vector<std::size_t> gold_ids_;
  std::vector<std::string> gold_names_;
};

/// Loads a JSONL ({"text": str, "label"?: str} per line) or CSV (header
/// row with text[,label]) file. Texts are whitespace-trimmed.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Parses from memory; `name` becomes the corpus name.
Corpus parse_corpus(std::string_view content, CorpusFormat format, std::string name);

/// Canonical JSONL rendering, one object per line.
std::string to_jsonl(const Corpus& corpus);
void save_jsonl(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace intentclust
