#include "intentclust/synthetic.hpp"

#include <algorithm>
#include <set>

#include "intentclust/error.hpp"
#include "intentclust/util.hpp"
#include "json.hpp"

namespace intentclust {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::vector<std::string> make_words(std::size_t count, Rng& rng) {
  std::set<std::string> seen{"none"};
  std::vector<std::string> words;
  words.reserve(count);
  while (words.size() < count) {
    const std::size_t syllables = 2 + rng.below(2);
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w.push_back(kConsonants[rng.below(kConsonants.size())]);
      w.push_back(kVowels[rng.below(kVowels.size())]);
    }
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

void draw(const std::vector<std::string>& pool, std::size_t count, Rng& rng, std::vector<std::string>& out) {
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  for (std::size_t i = 0; i < count && i < idx.size(); ++i) out.push_back(pool[idx[i]]);
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.k == 0 || spec.per_cluster == 0 || spec.vocab == 0) {
    throw ConfigError("k, per_cluster and vocab must all be positive");
  }
  const std::size_t topics = (spec.k + 1) / 2;
  const std::size_t pool = std::clamp<std::size_t>(spec.vocab / (3 * spec.k), 3, 8);
  const std::size_t topical = (spec.k + topics) * pool;
  if (spec.vocab < topical + 4) {
    throw ConfigError("vocab " + std::to_string(spec.vocab) + " is too small for k=" + std::to_string(spec.k) +
                      " (need at least " + std::to_string(topical + 4) + ")");
  }

  Rng rng(spec.seed);
  const auto words = make_words(spec.vocab, rng);
  auto slice = [&](std::size_t begin, std::size_t len) {
    return std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(begin),
                                    words.begin() + static_cast<std::ptrdiff_t>(begin + len));
  };
  std::vector<std::vector<std::string>> own(spec.k), topic(topics);
  for (std::size_t c = 0; c < spec.k; ++c) own[c] = slice(c * pool, pool);
  for (std::size_t t = 0; t < topics; ++t) topic[t] = slice((spec.k + t) * pool, pool);
  const auto noise = slice(topical, spec.vocab - topical);

  SyntheticCorpus out;
  for (std::size_t c = 0; c < spec.k; ++c) {
    out.intent_names.push_back(own[c][0] + "_" + own[c][1]);
    out.mate.push_back((c ^ 1) < spec.k ? (c ^ 1) : c);
  }

  for (std::size_t c = 0; c < spec.k; ++c) {
    for (std::size_t j = 0; j < spec.per_cluster; ++j) {
      std::vector<std::string> tokens;
      draw(own[c], 2 + rng.below(2), rng, tokens);
      draw(topic[c / 2], 1 + rng.below(2), rng, tokens);
      draw(noise, 2 + rng.below(2), rng, tokens);
      rng.shuffle(tokens);
      std::string text;
      for (const auto& t : tokens) {
        if (!text.empty()) text.push_back(' ');
        text += t;
      }
      text[0] = static_cast<char>(text[0] - 'a' + 'A');
      text.push_back(rng.below(2) == 0 ? '?' : '.');
      out.utterances.push_back(Utterance{0, std::move(text), out.intent_names[c]});
    }
  }
  rng.shuffle(out.utterances);
  for (std::size_t i = 0; i < out.utterances.size(); ++i) out.utterances[i].id = i;
  return out;
}

std::string synthetic_jsonl(const SyntheticSpec& spec) {
  std::string out;
  for (const auto& u : generate_synthetic(spec).utterances) {
    out += nlohmann::json{{"text", u.text}, {"label", *u.gold_intent}}.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace intentclust
