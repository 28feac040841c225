#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "intentclust/corpus.hpp"

namespace intentclust {

struct SyntheticSpec {
  std::size_t k = 10;
  std::size_t per_cluster = 20;
  std::size_t vocab = 512;
  std::uint64_t seed = 7;
};

/// Desk-scale labeled corpus. Each intent owns a pool of content words and
/// its label is two of them joined by '_'. Intents come in "mate" pairs
/// (2j, 2j+1) that share a topic-word pool, so mates are the confusable
/// neighbours. Every utterance mixes 2-3 own words, 1-2 topic words and
/// 2-3 noise words drawn from a pool shared by all intents.
struct SyntheticCorpus {
  std::vector<Utterance> utterances;
  std::vector<std::string> intent_names;
  std::vector<std::size_t> mate;  ///< mate[c] = paired intent (c itself when k is odd and c is last)
};

/// Throws ConfigError if any argument is zero or vocab is too small for k.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// JSONL rendering of generate_synthetic; byte-identical for a fixed spec.
std::string synthetic_jsonl(const SyntheticSpec& spec);

}  // namespace intentclust
