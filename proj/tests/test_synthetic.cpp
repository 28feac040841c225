#include <set>
#include <sstream>

#include "doctest.h"
#include "intentclust/corpus.hpp"
#include "intentclust/error.hpp"
#include "intentclust/synthetic.hpp"
#include "intentclust/embedding.hpp"

using namespace intentclust;

TEST_CASE("default spec gives 200 lines and 10 labels") {
  const auto jsonl = synthetic_jsonl({10, 20, 512, 7});
  std::istringstream in(jsonl);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 200);
  const auto corpus = parse_corpus(jsonl, CorpusFormat::Jsonl, "syn");
  CHECK(*corpus.gold_k() == 10);
}

TEST_CASE("fixed seed is byte-identical, other seeds differ") {
  CHECK(synthetic_jsonl({10, 20, 512, 7}) == synthetic_jsonl({10, 20, 512, 7}));
  CHECK(synthetic_jsonl({10, 20, 512, 7}) != synthetic_jsonl({10, 20, 512, 8}));
}

TEST_CASE("labels are canonical and mates pair up") {
  const auto syn = generate_synthetic({7, 3, 300, 1});
  CHECK(syn.intent_names.size() == 7);
  CHECK(std::set<std::string>(syn.intent_names.begin(), syn.intent_names.end()).size() == 7);
  for (std::size_t c = 0; c < 7; ++c) {
    CHECK(syn.mate[syn.mate[c]] == c);
    CHECK(syn.intent_names[c].find('_') != std::string::npos);
  }
  CHECK(syn.mate[6] == 6);
  for (std::size_t i = 0; i < syn.utterances.size(); ++i) CHECK(syn.utterances[i].id == i);
}

TEST_CASE("mock_bow: mean intra-cluster cosine exceeds inter-cluster") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto syn = generate_synthetic({10, 20, 512, seed});
    std::vector<EmbeddingVector> vs;
    for (const auto& u : syn.utterances) vs.push_back(mock_bow_embed(u.text, 4096, 0));
    double intra = 0, inter = 0;
    std::size_t ni = 0, nx = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        const double c = cosine(vs[i], vs[j]);
        if (syn.utterances[i].gold_intent == syn.utterances[j].gold_intent) {
          intra += c;
          ++ni;
        } else {
          inter += c;
          ++nx;
        }
      }
    }
    CHECK(intra / static_cast<double>(ni) > inter / static_cast<double>(nx));
  }
}

TEST_CASE("argument errors") {
  CHECK_THROWS_AS(generate_synthetic({0, 20, 512, 7}), ConfigError);
  CHECK_THROWS_AS(generate_synthetic({10, 0, 512, 7}), ConfigError);
  CHECK_THROWS_AS(generate_synthetic({10, 20, 0, 7}), ConfigError);
  CHECK_THROWS_AS(generate_synthetic({10, 20, 40, 7}), ConfigError);
}
