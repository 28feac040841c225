#include <map>
#include <mutex>
#include <set>

#include "doctest.h"
#include "intentclust/error.hpp"
#include "intentclust/pipeline.hpp"
#include "intentclust/synthetic.hpp"
#include "support.hpp"

using namespace intentclust;

namespace {

Corpus small_corpus(std::uint64_t seed = 7) {
  auto syn = generate_synthetic({4, 6, 128, seed});
  return Corpus("small", syn.utterances);
}

struct Rig {
  std::shared_ptr<MockBowBackend> embed_backend = std::make_shared<MockBowBackend>(1024, 0);
  EmbedderGateway embedder{embed_backend, nullptr, {"inst", 2, testing::no_wait_retry()}};
  std::shared_ptr<ChatBackend> chat;
  std::unique_ptr<LlmGateway> llm;

  explicit Rig(std::shared_ptr<ChatBackend> backend) : chat(std::move(backend)) {
    llm = std::make_unique<LlmGateway>(chat, nullptr, LlmGateway::Options{{}, 3, 2, testing::no_wait_retry()});
  }
};

/// Scripted LLM that picks a pseudo-random subset of the offered labels;
/// the choice depends only on the prompt text, so runs are reproducible.
std::shared_ptr<ScriptedChatBackend> random_selector(std::uint64_t seed) {
  ScriptedChatBackend::Script script;
  script.handler = [seed](const std::string& prompt) -> std::optional<std::string> {
    const auto parsed = parse_prompt(prompt);
    Rng rng(std::hash<std::string>{}(prompt) ^ seed);
    if (parsed.kind == PromptKind::Construction) {
      return "The intent is: lbl_" + std::to_string(rng.below(5));
    }
    std::string picked;
    for (const auto& l : parsed.candidate_labels) {
      if (rng.below(4) == 0) picked += (picked.empty() ? "" : ", ") + l;
    }
    return "The selected intent(s): " + (picked.empty() ? std::string("none") : picked);
  };
  return std::make_shared<ScriptedChatBackend>(script, "random:" + std::to_string(seed));
}

}  // namespace

TEST_CASE("concat policy") {
  LabelState s(0, PseudoLabel("a"));
  s.labels_by_round.push_back({PseudoLabel("a"), PseudoLabel("b_c")});
  const Utterance u{0, "hello there", std::nullopt};
  CHECK(concat_for_embedding(s, 0, u, {}) == "a hello there");
  CHECK(concat_for_embedding(s, 1, u, {}) == "a, b_c hello there");
  CHECK(concat_for_embedding(s, 1, u, {"; ", " | ", false}) == "hello there | a; b_c");
  CHECK_THROWS_AS(concat_for_embedding(s, 2, u, {}), Error);
}

TEST_CASE("config validation") {
  PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  c.m = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.max_rounds = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.concat.label_separator = "";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("distinct_label_candidates keeps the nearest neighbor per initial label") {
  std::vector<LabelState> states;
  for (const char* l : {"x", "a", "a", "b", "a", "c"}) states.emplace_back(states.size(), PseudoLabel(l));
  const std::vector<Neighbor> ranked{{2, 0.9}, {1, 0.8}, {3, 0.7}, {4, 0.6}, {5, 0.5}};
  CHECK(distinct_label_candidates(ranked, states, 10) == std::vector<UtteranceId>{2, 3, 5});
  CHECK(distinct_label_candidates(ranked, states, 2) == std::vector<UtteranceId>{2, 3});
}

TEST_CASE("oracle construction yields the normalized gold intent") {
  const auto corpus = small_corpus();
  Rig rig(std::make_shared<OracleChatBackend>(corpus));
  const auto res = construct_initial_labels(corpus, rig.embedder, *rig.llm, {});
  REQUIRE(res.states.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(res.states[i].initial_label.str() == *corpus[i].gold_intent);
    CHECK(res.states[i].labels_by_round.size() == 1);
  }
  CHECK(res.raw_snapshot.round() == 0);
}

TEST_CASE("construction clamps m to N-1") {
  const Corpus tiny("t", {{0, "alpha beta", "x"}, {0, "gamma delta", "y"}, {0, "beta gamma", "x"}});
  std::mutex mu;
  std::vector<std::size_t> shown;
  ScriptedChatBackend::Script script;
  script.handler = [&](const std::string& p) -> std::optional<std::string> {
    std::lock_guard lock(mu);
    shown.push_back(parse_prompt(p).candidate_texts.size());
    return "The intent is: z";
  };
  Rig rig(std::make_shared<ScriptedChatBackend>(script));
  PipelineConfig cfg;
  cfg.m = 10;
  construct_initial_labels(tiny, rig.embedder, *rig.llm, cfg);
  REQUIRE(shown.size() == 3);
  for (auto n : shown) CHECK(n == 2);
}

TEST_CASE("classification prompts offer initial labels only") {
  const auto corpus = small_corpus();
  std::mutex mu;
  std::set<std::string> offered;
  std::set<std::string> initial;
  ScriptedChatBackend::Script script;
  script.handler = [&](const std::string& p) -> std::optional<std::string> {
    const auto parsed = parse_prompt(p);
    if (parsed.kind == PromptKind::Construction) {
      return "The intent is: init_" + std::to_string(std::hash<std::string>{}(parsed.target) % 7);
    }
    std::lock_guard lock(mu);
    for (const auto& l : parsed.candidate_labels) offered.insert(l);
    // Select everything on offer so label sets grow as much as possible.
    std::string all;
    for (const auto& l : parsed.candidate_labels) all += (all.empty() ? "" : ", ") + l;
    return "The selected intent(s): " + all;
  };
  Rig rig(std::make_shared<ScriptedChatBackend>(script));
  PipelineConfig cfg;
  cfg.max_rounds = 3;
  const auto res = run_pipeline(corpus, rig.embedder, *rig.llm, cfg);
  for (const auto& s : res.states) initial.insert(s.initial_label.str());
  CHECK(std::includes(initial.begin(), initial.end(), offered.begin(), offered.end()));
  // Offered candidates carry distinct labels, so no prompt repeats a label.
  CHECK(res.manifest.rounds_executed >= 1);
}

TEST_CASE("label sets are nested and runs terminate") {
  const auto corpus = small_corpus(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rig rig(random_selector(seed));
    PipelineConfig cfg;
    cfg.m = 1 + seed % 6;
    cfg.max_rounds = 1 + seed % 4;
    const auto res = run_pipeline(corpus, rig.embedder, *rig.llm, cfg);
    CHECK(res.manifest.rounds_executed <= cfg.max_rounds);
    for (const auto& s : res.states) {
      REQUIRE(s.labels_by_round.front() == std::vector<PseudoLabel>{s.initial_label});
      REQUIRE(s.last_round() <= cfg.max_rounds);
      for (std::size_t r = 1; r < s.labels_by_round.size(); ++r) {
        const auto& prev = s.labels_by_round[r - 1];
        const auto& cur = s.labels_by_round[r];
        for (const auto& l : prev) REQUIRE(std::find(cur.begin(), cur.end(), l) != cur.end());
        std::set<PseudoLabel> uniq(cur.begin(), cur.end());
        REQUIRE(uniq.size() == cur.size());
      }
      if (s.converged) {
        REQUIRE(s.converged_at_round);
        const auto r = *s.converged_at_round;
        REQUIRE(s.labels_by_round[r] == s.labels_by_round[r - 1]);
        for (std::size_t q = r; q < s.labels_by_round.size(); ++q) REQUIRE(s.labels_by_round[q] == s.latest());
      }
    }
  }
}

TEST_CASE("all-none LLM converges in one round with unchanged labels") {
  const auto corpus = small_corpus();
  ScriptedChatBackend::Script script;
  script.construction_default = "The intent is: only";
  script.classification_default = "The selected intent(s): none";
  Rig rig(std::make_shared<ScriptedChatBackend>(script));
  const auto res = run_pipeline(corpus, rig.embedder, *rig.llm, {});
  CHECK(res.manifest.rounds_executed == 1);
  CHECK(res.manifest.changed_per_round == std::vector<std::size_t>{0});
  for (const auto& s : res.states) {
    CHECK(s.converged);
    CHECK(*s.converged_at_round == 1);
    CHECK(s.latest().size() == 1);
  }
}

TEST_CASE("ablation stops after construction") {
  const auto corpus = small_corpus();
  Rig rig(std::make_shared<OracleChatBackend>(corpus));
  PipelineConfig cfg;
  cfg.ablation_no_iteration = true;
  const auto res = run_pipeline(corpus, rig.embedder, *rig.llm, cfg);
  CHECK(res.manifest.mode == "w/o Iteration");
  CHECK(res.manifest.rounds_executed == 0);
  CHECK(res.final_snapshot.round() == 0);
  for (const auto& s : res.states) CHECK(s.labels_by_round.size() == 1);
}

TEST_CASE("round errors") {
  const auto corpus = small_corpus();
  Rig rig(std::make_shared<OracleChatBackend>(corpus));
  auto states = construct_initial_labels(corpus, rig.embedder, *rig.llm, {}).states;
  CHECK_THROWS_AS(run_iteration_round(states, corpus, rig.embedder, *rig.llm, {}, 0), Error);
  CHECK_THROWS_AS(run_iteration_round(states, corpus, rig.embedder, *rig.llm, {}, 2), Error);
  auto fewer = states;
  fewer.pop_back();
  CHECK_THROWS_AS(run_iteration_round(fewer, corpus, rig.embedder, *rig.llm, {}, 1), Error);
}

TEST_CASE("resuming from any checkpoint reproduces the uninterrupted run") {
  const auto corpus = small_corpus(11);
  PipelineConfig cfg;
  cfg.max_rounds = 4;

  std::map<std::size_t, std::pair<std::vector<LabelState>, RunManifest>> checkpoints;
  PipelineHooks record;
  record.on_checkpoint = [&](std::size_t round, const std::vector<LabelState>& states, const RunManifest& m) {
    // Through JSON, as on disk.
    RunManifest progress;
    restore_manifest_progress(progress, manifest_progress_json(m));
    checkpoints[round] = {states_from_json(states_to_json(states)), progress};
  };
  Rig full_rig(random_selector(99));
  const auto full = run_pipeline(corpus, full_rig.embedder, *full_rig.llm, cfg, record);
  REQUIRE(checkpoints.size() >= 2);

  for (const auto& [round, cp] : checkpoints) {
    Rig rig(random_selector(99));
    PipelineHooks resume;
    resume.resume = cp;
    const auto res = run_pipeline(corpus, rig.embedder, *rig.llm, cfg, resume);
    CHECK(res.states == full.states);
    CHECK(res.manifest.deterministic_json() == full.manifest.deterministic_json());
    CHECK(res.final_snapshot.vectors() == full.final_snapshot.vectors());
  }
}

TEST_CASE("state JSON round trip") {
  std::vector<LabelState> states;
  states.emplace_back(0, PseudoLabel("a"));
  states.emplace_back(1, PseudoLabel("b"));
  states[0].labels_by_round.push_back({PseudoLabel("a"), PseudoLabel("b")});
  states[1].labels_by_round.push_back({PseudoLabel("b")});
  states[1].converged = true;
  states[1].converged_at_round = 1;
  const auto j = states_to_json(states);
  CHECK(j[0]["labels"] == nlohmann::json::array({"a", "b"}));
  CHECK(states_from_json(j) == states);
  auto broken = j;
  broken[1]["id"] = 5;
  CHECK_THROWS_AS(states_from_json(broken), Error);
}

TEST_CASE("check_assumption on hand-made pairs") {
  EmbedderGateway gw(std::make_shared<MockBowBackend>(4096, 0), nullptr, {});
  // Shared label tokens pull overlapping texts together.
  CHECK(check_assumption(gw, "card_arrival", {{"my card is late", "where is my card"}}) == 1.0);
  // Label disjoint from both texts, texts disjoint from each other.
  CHECK(check_assumption(gw, "card_arrival", {{"alpha beta", "gamma delta"}}) == 1.0);
  CHECK_THROWS_AS(check_assumption(gw, std::vector<LabeledPair>{}), Error);
}
