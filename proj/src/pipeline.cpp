#include "intentclust/pipeline.hpp"

#include <algorithm>
#include <set>

#include "intentclust/error.hpp"
#include "intentclust/util.hpp"

namespace intentclust {

using nlohmann::json;

void PipelineConfig::validate() const {
  if (m == 0) throw ConfigError("pipeline m must be >= 1");
  if (max_rounds == 0) throw ConfigError("pipeline max_rounds must be >= 1");
  if (concat.label_separator.empty() || concat.label_text_separator.empty()) {
    throw ConfigError("concatenation separators must be non-empty");
  }
}

std::string concat_for_embedding(const LabelState& state, std::size_t round, const Utterance& utt,
                                 const ConcatPolicy& policy) {
  if (round >= state.labels_by_round.size()) {
    throw Error("round " + std::to_string(round) + " not materialized for utterance " +
                std::to_string(state.utterance_id));
  }
  std::string labels;
  for (const auto& l : state.labels_by_round[round]) {
    if (!labels.empty()) labels += policy.label_separator;
    labels += l.str();
  }
  return policy.labels_first ? labels + policy.label_text_separator + utt.text
                             : utt.text + policy.label_text_separator + labels;
}

std::vector<UtteranceId> distinct_label_candidates(const std::vector<Neighbor>& ranked,
                                                   const std::vector<LabelState>& states, std::size_t m) {
  std::vector<UtteranceId> kept;
  std::set<PseudoLabel> seen;
  for (const auto& n : ranked) {
    if (kept.size() >= m) break;
    if (seen.insert(states.at(n.id).initial_label).second) kept.push_back(n.id);
  }
  return kept;
}

namespace {

std::vector<std::string> texts_of(const Corpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& u : corpus.utterances()) texts.push_back(u.text);
  return texts;
}

std::vector<std::string> concats_at(const std::vector<LabelState>& states, const Corpus& corpus, std::size_t round,
                                    const ConcatPolicy& policy) {
  std::vector<std::string> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(concat_for_embedding(s, round, corpus[s.utterance_id], policy));
  return out;
}

std::size_t clamp_m(std::size_t m, const Corpus& corpus) { return std::min(m, corpus.size() - 1); }

}  // namespace

ConstructionResult construct_initial_labels(const Corpus& corpus, EmbedderGateway& embedder, LlmGateway& llm,
                                            const PipelineConfig& cfg) {
  cfg.validate();
  const auto texts = texts_of(corpus);
  IndexSnapshot snapshot(embedder.embed_texts(texts), 0);
  const std::size_t m = clamp_m(cfg.m, corpus);

  std::vector<std::optional<PseudoLabel>> labels(corpus.size());
  parallel_for(corpus.size(), llm.parallelism(), [&](std::size_t i) {
    ConstructionPrompt prompt{texts[i], {}};
    for (const auto& n : snapshot.top_m(i, m, /*exclude_self=*/true)) prompt.candidates.push_back(texts[n.id]);
    labels[i] = llm.construct_label(prompt).labels.front();
  });

  std::vector<LabelState> states;
  states.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) states.emplace_back(i, *labels[i]);
  return {std::move(states), std::move(snapshot)};
}

RoundResult run_iteration_round(std::vector<LabelState>& states, const Corpus& corpus, EmbedderGateway& embedder,
                                LlmGateway& llm, const PipelineConfig& cfg, std::size_t round) {
  cfg.validate();
  if (round == 0) throw Error("iteration rounds start at 1");
  if (states.size() != corpus.size()) throw Error("label states do not cover the corpus");
  for (const auto& s : states) {
    if (s.last_round() != round - 1) {
      throw Error("utterance " + std::to_string(s.utterance_id) + " is at round " + std::to_string(s.last_round()) +
                  ", expected " + std::to_string(round - 1));
    }
  }

  // Every query in this round sees the same round-1 embeddings.
  const IndexSnapshot snapshot(embedder.embed_texts(concats_at(states, corpus, round - 1, cfg.concat)), round - 1);
  const std::size_t m = clamp_m(cfg.m, corpus);

  std::vector<UtteranceId> active;
  for (const auto& s : states) {
    if (!s.converged) active.push_back(s.utterance_id);
  }

  std::vector<LlmReply> replies(active.size());
  parallel_for(active.size(), llm.parallelism(), [&](std::size_t k) {
    const auto id = active[k];
    const auto kept = distinct_label_candidates(snapshot.ranked(id, /*exclude_self=*/true), states, m);
    ClassificationPrompt prompt{corpus[id].text, {}};
    for (auto c : kept) prompt.candidates.push_back({corpus[c].text, states[c].initial_label});
    replies[k] = llm.classify(prompt);
  });

  RoundResult result;
  std::size_t next_active = 0;
  for (auto& s : states) {
    auto next = s.latest();
    if (!s.converged) {
      const auto& reply = replies[next_active++];
      result.dropped_tokens += reply.dropped.size();
      for (const auto& l : reply.labels) {
        if (std::find(next.begin(), next.end(), l) == next.end()) next.push_back(l);
      }
      if (next == s.latest()) {
        s.converged = true;
        s.converged_at_round = round;
      } else {
        ++result.changed_count;
      }
    }
    s.labels_by_round.push_back(std::move(next));
    if (s.converged) ++result.converged_count;
  }
  return result;
}

json RunManifest::deterministic_json() const {
  return {{"config", config},
          {"mode", mode},
          {"embedder_backend", embedder_backend},
          {"embedder_instruction", embedder_instruction},
          {"llm_backend", llm_backend},
          {"decode", {{"temperature", decode.temperature}, {"max_tokens", decode.max_tokens}}},
          {"rounds_executed", rounds_executed},
          {"changed_per_round", changed_per_round},
          {"converged_per_round", converged_per_round},
          {"dropped_tokens", dropped_tokens}};
}

json RunManifest::to_json() const {
  auto j = deterministic_json();
  j["embed_cache"] = {{"requests", embed_stats.requests},
                      {"hits", embed_stats.cache_hits},
                      {"backend_calls", embed_stats.backend_calls},
                      {"retries", embed_stats.retries}};
  j["llm_cache"] = {{"completions", llm_stats.completions},
                    {"hits", llm_stats.cache_hits},
                    {"backend_calls", llm_stats.backend_calls},
                    {"retries", llm_stats.retries},
                    {"format_violations", llm_stats.format_violations},
                    {"fallbacks", llm_stats.fallbacks},
                    {"dropped_tokens", llm_stats.dropped_tokens}};
  return j;
}

json manifest_progress_json(const RunManifest& manifest) {
  return {{"rounds_executed", manifest.rounds_executed},
          {"changed_per_round", manifest.changed_per_round},
          {"converged_per_round", manifest.converged_per_round},
          {"dropped_tokens", manifest.dropped_tokens}};
}

void restore_manifest_progress(RunManifest& manifest, const json& j) {
  manifest.rounds_executed = j.at("rounds_executed").get<std::size_t>();
  manifest.changed_per_round = j.at("changed_per_round").get<std::vector<std::size_t>>();
  manifest.converged_per_round = j.at("converged_per_round").get<std::vector<std::size_t>>();
  manifest.dropped_tokens = j.at("dropped_tokens").get<std::size_t>();
}

PipelineResult run_pipeline(const Corpus& corpus, EmbedderGateway& embedder, LlmGateway& llm,
                            const PipelineConfig& cfg, const PipelineHooks& hooks) {
  cfg.validate();
  RunManifest manifest;
  manifest.config = {{"m", cfg.m},
                     {"max_rounds", cfg.max_rounds},
                     {"seed", cfg.seed},
                     {"ablation_no_iteration", cfg.ablation_no_iteration},
                     {"concat",
                      {{"label_separator", cfg.concat.label_separator},
                       {"label_text_separator", cfg.concat.label_text_separator},
                       {"labels_first", cfg.concat.labels_first}}}};
  manifest.mode = cfg.ablation_no_iteration ? "w/o Iteration" : "full";
  manifest.embedder_backend = embedder.backend_id();
  manifest.embedder_instruction = embedder.instruction();
  manifest.llm_backend = llm.backend_id();
  manifest.decode = llm.options().decode;

  std::vector<LabelState> states;
  if (hooks.resume) {
    states = hooks.resume->first;
    restore_manifest_progress(manifest, manifest_progress_json(hooks.resume->second));
    if (states.size() != corpus.size()) throw Error("checkpoint does not match the corpus size");
  } else {
    states = construct_initial_labels(corpus, embedder, llm, cfg).states;
    if (hooks.on_checkpoint) hooks.on_checkpoint(0, states, manifest);
  }

  if (!cfg.ablation_no_iteration) {
    auto pending = [&] {
      return std::any_of(states.begin(), states.end(), [](const LabelState& s) { return !s.converged; });
    };
    for (std::size_t round = states.front().last_round() + 1; round <= cfg.max_rounds && pending(); ++round) {
      const auto r = run_iteration_round(states, corpus, embedder, llm, cfg, round);
      manifest.rounds_executed = round;
      manifest.changed_per_round.push_back(r.changed_count);
      manifest.converged_per_round.push_back(r.converged_count);
      manifest.dropped_tokens += r.dropped_tokens;
      if (hooks.on_checkpoint) hooks.on_checkpoint(round, states, manifest);
    }
  }

  const std::size_t final_round = states.front().last_round();
  IndexSnapshot final_snapshot(embedder.embed_texts(concats_at(states, corpus, final_round, cfg.concat)),
                               final_round);
  manifest.embed_stats = embedder.stats();
  manifest.llm_stats = llm.stats();
  return {std::move(states), std::move(final_snapshot), std::move(manifest)};
}

double check_assumption(EmbedderGateway& embedder, const std::vector<LabeledPair>& pairs) {
  if (pairs.empty()) throw Error("check_assumption needs at least one pair");
  std::vector<std::string> texts;
  texts.reserve(pairs.size() * 4);
  for (const auto& p : pairs) {
    texts.push_back(p.first);
    texts.push_back(p.second);
    texts.push_back(p.label + " " + p.first);
    texts.push_back(p.label + " " + p.second);
  }
  const auto vecs = embedder.embed_texts(texts);
  constexpr double kTolerance = 1e-6;
  std::size_t holds = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double before = cosine_distance(vecs[4 * i], vecs[4 * i + 1]);
    const double after = cosine_distance(vecs[4 * i + 2], vecs[4 * i + 3]);
    if (after <= before + kTolerance) ++holds;
  }
  return static_cast<double>(holds) / static_cast<double>(pairs.size());
}

double check_assumption(EmbedderGateway& embedder, const std::string& label,
                        const std::vector<std::pair<std::string, std::string>>& text_pairs) {
  std::vector<LabeledPair> pairs;
  pairs.reserve(text_pairs.size());
  for (const auto& [a, b] : text_pairs) pairs.push_back({label, a, b});
  return check_assumption(embedder, pairs);
}

json states_to_json(const std::vector<LabelState>& states) {
  json arr = json::array();
  for (const auto& s : states) {
    json rounds = json::array();
    for (const auto& r : s.labels_by_round) {
      json labels = json::array();
      for (const auto& l : r) labels.push_back(l.str());
      rounds.push_back(std::move(labels));
    }
    arr.push_back({{"id", s.utterance_id},
                   {"initial_label", s.initial_label.str()},
                   {"labels", rounds.back()},
                   {"labels_by_round", std::move(rounds)},
                   {"converged", s.converged},
                   {"converged_at_round", s.converged_at_round ? json(*s.converged_at_round) : json(nullptr)}});
  }
  return arr;
}

std::vector<LabelState> states_from_json(const json& j) {
  std::vector<LabelState> states;
  for (const auto& e : j) {
    LabelState s(e.at("id").get<std::size_t>(), PseudoLabel(e.at("initial_label").get<std::string>()));
    s.labels_by_round.clear();
    for (const auto& r : e.at("labels_by_round")) {
      std::vector<PseudoLabel> labels;
      for (const auto& l : r) labels.emplace_back(l.get<std::string>());
      s.labels_by_round.push_back(std::move(labels));
    }
    if (s.labels_by_round.empty()) throw Error("checkpoint entry without rounds");
    s.converged = e.at("converged").get<bool>();
    if (!e.at("converged_at_round").is_null()) s.converged_at_round = e.at("converged_at_round").get<std::size_t>();
    states.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].utterance_id != i) throw Error("checkpoint ids are not dense");
  }
  return states;
}

}  // namespace intentclust
