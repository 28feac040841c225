#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intentclust/corpus.hpp"
#include "intentclust/embedding.hpp"
#include "intentclust/llm.hpp"
#include "intentclust/vector_index.hpp"
#include "json.hpp"

namespace intentclust {

/// Per-utterance label history. labels_by_round[0] holds only the initial
/// label; every later round is a superset of the one before it, kept in
/// insertion order.
struct LabelState {
  UtteranceId utterance_id = 0;
  PseudoLabel initial_label;
  std::vector<std::vector<PseudoLabel>> labels_by_round;
  bool converged = false;
  std::optional<std::size_t> converged_at_round;

  explicit LabelState(UtteranceId id, PseudoLabel initial)
      : utterance_id(id), initial_label(initial), labels_by_round{{std::move(initial)}} {}

  std::size_t last_round() const noexcept { return labels_by_round.size() - 1; }
  const std::vector<PseudoLabel>& latest() const { return labels_by_round.back(); }

  bool operator==(const LabelState&) const = default;
};

struct ConcatPolicy {
  std::string label_separator = ", ";
  std::string label_text_separator = " ";
  bool labels_first = true;
};

struct PipelineConfig {
  std::size_t m = 10;
  std::size_t max_rounds = 5;
  std::uint64_t seed = 0;
  bool ablation_no_iteration = false;
  ConcatPolicy concat;

  /// Throws ConfigError on m == 0, max_rounds == 0 or empty separators.
  void validate() const;
};

/// "<l1><sep><l2>...<label_text_sep><text>" for labels_by_round[round]
/// (text first when !labels_first). Throws Error if `round` has not been
/// materialized.
std::string concat_for_embedding(const LabelState& state, std::size_t round, const Utterance& utt,
                                 const ConcatPolicy& policy);

/// Greedy scan of a ranked neighbor list keeping the first neighbor for
/// each distinct initial label, up to m of them.
std::vector<UtteranceId> distinct_label_candidates(const std::vector<Neighbor>& ranked,
                                                   const std::vector<LabelState>& states, std::size_t m);

struct ConstructionResult {
  std::vector<LabelState> states;
  IndexSnapshot raw_snapshot;
};

/// Construction stage: embed raw texts, show each text its top-m raw
/// neighbors (self excluded, m clamped to N-1) and keep one label.
ConstructionResult construct_initial_labels(const Corpus& corpus, EmbedderGateway& embedder, LlmGateway& llm,
                                            const PipelineConfig& cfg);

struct RoundResult {
  std::size_t changed_count = 0;
  std::size_t converged_count = 0;
  std::size_t dropped_tokens = 0;
};

/// One synchronous classification round. Neighbors come from a snapshot of
/// round-1 concatenations for all utterances; label sets are updated only
/// after every prompt of the round has been answered.
RoundResult run_iteration_round(std::vector<LabelState>& states, const Corpus& corpus, EmbedderGateway& embedder,
                                LlmGateway& llm, const PipelineConfig& cfg, std::size_t round);

struct RunManifest {
  nlohmann::json config;
  std::string mode;  ///< "full" or "w/o Iteration"
  std::string embedder_backend;
  std::string embedder_instruction;
  std::string llm_backend;
  DecodeParams decode;
  std::size_t rounds_executed = 0;
  std::vector<std::size_t> changed_per_round;
  std::vector<std::size_t> converged_per_round;
  std::size_t dropped_tokens = 0;
  EmbedStats embed_stats;
  LlmStats llm_stats;

  /// Everything except cache statistics, which depend on cache warmth.
  nlohmann::json deterministic_json() const;
  nlohmann::json to_json() const;
};

struct PipelineResult {
  std::vector<LabelState> states;
  IndexSnapshot final_snapshot;
  RunManifest manifest;
};

struct PipelineHooks {
  /// Called after construction (round 0) and after each iteration round.
  std::function<void(std::size_t round, const std::vector<LabelState>&, const RunManifest&)> on_checkpoint;
  /// Continue from a checkpoint instead of starting over.
  std::optional<std::pair<std::vector<LabelState>, RunManifest>> resume;
};

PipelineResult run_pipeline(const Corpus& corpus, EmbedderGateway& embedder, LlmGateway& llm,
                            const PipelineConfig& cfg, const PipelineHooks& hooks = {});

/// Fraction of pairs whose cosine distance does not grow when both texts
/// are prefixed with `label` (float32 rounding tolerance 1e-6).
double check_assumption(EmbedderGateway& embedder, const std::string& label,
                        const std::vector<std::pair<std::string, std::string>>& text_pairs);

struct LabeledPair {
  std::string label;
  std::string first;
  std::string second;
};

/// check_assumption with a label per pair.
double check_assumption(EmbedderGateway& embedder, const std::vector<LabeledPair>& pairs);

nlohmann::json states_to_json(const std::vector<LabelState>& states);
std::vector<LabelState> states_from_json(const nlohmann::json& j);
nlohmann::json manifest_progress_json(const RunManifest& manifest);
void restore_manifest_progress(RunManifest& manifest, const nlohmann::json& j);

}  // namespace intentclust
