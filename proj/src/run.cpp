#include "intentclust/run.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include "intentclust/error.hpp"
#include "intentclust/kmeans.hpp"
#include "intentclust/util.hpp"

#ifndef INTENTCLUST_VERSION
#define INTENTCLUST_VERSION "dev"
#endif

namespace intentclust {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view section) {
  if (!obj.is_object()) throw ConfigError(std::string(section) + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(section));
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? v : "";
}

}  // namespace

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  check_keys(j, {"dataset", "embedder", "llm", "pipeline", "kmeans", "evaluation", "retry_delays_ms", "cache_dir",
                 "output_dir"},
             "config");
  RunConfig c;

  const auto ds = j.value("dataset", json::object());
  check_keys(ds, {"path", "format"}, "dataset");
  if (!ds.contains("path")) throw ConfigError("dataset.path is required");
  c.dataset = resolve(base_dir, get_or<std::string>(ds, "path", ""));
  c.format = parse_corpus_format(get_or<std::string>(ds, "format", "jsonl"));

  const auto em = j.value("embedder", json::object());
  check_keys(em, {"kind", "dim", "seed", "batch_size", "url", "model", "api_key_env", "instruction", "parallelism",
                  "timeout_s"},
             "embedder");
  auto& e = c.embedder;
  e.kind = get_or(em, "kind", e.kind);
  e.dim = get_or(em, "dim", e.dim);
  e.seed = get_or(em, "seed", e.seed);
  e.batch_size = get_or(em, "batch_size", e.batch_size);
  e.url = get_or(em, "url", e.url);
  e.model = get_or(em, "model", e.model);
  e.api_key_env = get_or(em, "api_key_env", e.api_key_env);
  e.instruction = get_or(em, "instruction", e.instruction);
  e.parallelism = get_or(em, "parallelism", e.parallelism);
  e.timeout_s = get_or(em, "timeout_s", e.timeout_s);
  if (e.kind != "mock_bow" && e.kind != "http") throw ConfigError("embedder.kind must be mock_bow or http");
  if (e.kind == "http" && e.url.empty()) throw ConfigError("embedder.url is required for kind=http");

  const auto lm = j.value("llm", json::object());
  check_keys(lm, {"kind", "url", "model", "api_key_env", "temperature", "max_tokens", "context_limit", "parallelism",
                  "max_reasks", "timeout_s", "replies", "replies_file", "construction_default",
                  "classification_default"},
             "llm");
  auto& l = c.llm;
  l.kind = get_or(lm, "kind", l.kind);
  l.url = get_or(lm, "url", l.url);
  l.model = get_or(lm, "model", l.model);
  l.api_key_env = get_or(lm, "api_key_env", l.api_key_env);
  l.decode.temperature = get_or(lm, "temperature", l.decode.temperature);
  l.decode.max_tokens = get_or(lm, "max_tokens", l.decode.max_tokens);
  l.context_limit = get_or(lm, "context_limit", l.context_limit);
  l.parallelism = get_or(lm, "parallelism", l.parallelism);
  l.max_reasks = get_or(lm, "max_reasks", l.max_reasks);
  l.timeout_s = get_or(lm, "timeout_s", l.timeout_s);
  l.replies = get_or(lm, "replies", l.replies);
  if (lm.contains("replies_file")) {
    const auto file = resolve(base_dir, get_or<std::string>(lm, "replies_file", ""));
    try {
      for (auto& [k, v] : json::parse(read_file(file)).get<std::map<std::string, std::string>>()) l.replies[k] = v;
    } catch (const json::exception& ex) {
      throw ConfigError("bad replies_file " + file.string() + ": " + ex.what());
    }
  }
  if (lm.contains("construction_default")) l.construction_default = get_or<std::string>(lm, "construction_default", "");
  if (lm.contains("classification_default")) {
    l.classification_default = get_or<std::string>(lm, "classification_default", "");
  }
  if (l.kind != "oracle" && l.kind != "scripted" && l.kind != "http") {
    throw ConfigError("llm.kind must be oracle, scripted or http");
  }
  if (l.kind == "http" && l.url.empty()) throw ConfigError("llm.url is required for kind=http");
  if (l.decode.max_tokens <= 0) throw ConfigError("llm.max_tokens must be positive");

  const auto pl = j.value("pipeline", json::object());
  check_keys(pl, {"m", "max_rounds", "seed", "ablation", "concat"}, "pipeline");
  auto& p = c.pipeline;
  p.m = get_or(pl, "m", p.m);
  p.max_rounds = get_or(pl, "max_rounds", p.max_rounds);
  p.seed = get_or(pl, "seed", p.seed);
  p.ablation_no_iteration = get_or(pl, "ablation", p.ablation_no_iteration);
  const auto cc = pl.value("concat", json::object());
  check_keys(cc, {"label_separator", "label_text_separator", "labels_first"}, "pipeline.concat");
  p.concat.label_separator = get_or(cc, "label_separator", p.concat.label_separator);
  p.concat.label_text_separator = get_or(cc, "label_text_separator", p.concat.label_text_separator);
  p.concat.labels_first = get_or(cc, "labels_first", p.concat.labels_first);
  p.validate();

  const auto km = j.value("kmeans", json::object());
  check_keys(km, {"k", "n_init", "max_iters", "tol", "normalize", "seeds"}, "kmeans");
  auto& ev = c.eval;
  if (km.contains("k") && !km["k"].is_null()) ev.k = get_or<std::size_t>(km, "k", 0);
  ev.n_init = get_or(km, "n_init", ev.n_init);
  ev.max_iters = get_or(km, "max_iters", ev.max_iters);
  ev.tol = get_or(km, "tol", ev.tol);
  ev.normalize = get_or(km, "normalize", ev.normalize);
  ev.seeds = get_or(km, "seeds", ev.seeds);
  if (ev.seeds.empty()) throw ConfigError("kmeans.seeds must list at least one seed");
  if (ev.k && *ev.k == 0) throw ConfigError("kmeans.k must be positive");

  const auto evj = j.value("evaluation", json::object());
  check_keys(evj, {"nmi_normalization", "assumption_pairs", "assumption_seed"}, "evaluation");
  ev.nmi = parse_nmi_normalization(get_or<std::string>(evj, "nmi_normalization", "arithmetic"));
  ev.assumption_pairs = get_or(evj, "assumption_pairs", ev.assumption_pairs);
  ev.assumption_seed = get_or(evj, "assumption_seed", ev.assumption_seed);

  if (j.contains("retry_delays_ms")) {
    c.retry.delays.clear();
    for (auto ms : get_or<std::vector<long>>(j, "retry_delays_ms", {})) {
      c.retry.delays.emplace_back(std::chrono::milliseconds(ms));
    }
  }
  if (j.contains("cache_dir") && !j["cache_dir"].is_null()) {
    c.cache_dir = resolve(base_dir, get_or<std::string>(j, "cache_dir", ""));
  }
  if (const char* env = std::getenv("INTENTCLUST_CACHE_DIR"); env && *env) c.cache_dir = fs::path(env);
  c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "out"));
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

json RunConfig::effective_json() const {
  json retry_ms = json::array();
  for (auto d : retry.delays) retry_ms.push_back(d.count());
  json replies_digest = nullptr;
  if (!llm.replies.empty()) replies_digest = sha256_hex(json(llm.replies).dump());
  return {
      {"dataset_format", format == CorpusFormat::Jsonl ? "jsonl" : "csv"},
      {"embedder",
       {{"kind", embedder.kind},
        {"dim", embedder.dim},
        {"seed", embedder.seed},
        {"batch_size", embedder.batch_size},
        {"url", embedder.url},
        {"model", embedder.model},
        {"instruction", embedder.instruction}}},
      {"llm",
       {{"kind", llm.kind},
        {"url", llm.url},
        {"model", llm.model},
        {"temperature", llm.decode.temperature},
        {"max_tokens", llm.decode.max_tokens},
        {"context_limit", llm.context_limit},
        {"max_reasks", llm.max_reasks},
        {"replies_digest", replies_digest},
        {"construction_default", llm.construction_default ? json(*llm.construction_default) : json(nullptr)},
        {"classification_default", llm.classification_default ? json(*llm.classification_default) : json(nullptr)}}},
      {"pipeline",
       {{"m", pipeline.m},
        {"max_rounds", pipeline.max_rounds},
        {"seed", pipeline.seed},
        {"ablation", pipeline.ablation_no_iteration},
        {"concat",
         {{"label_separator", pipeline.concat.label_separator},
          {"label_text_separator", pipeline.concat.label_text_separator},
          {"labels_first", pipeline.concat.labels_first}}}}},
      {"kmeans",
       {{"k", eval.k ? json(*eval.k) : json(nullptr)},
        {"n_init", eval.n_init},
        {"max_iters", eval.max_iters},
        {"tol", eval.tol},
        {"normalize", eval.normalize},
        {"seeds", eval.seeds}}},
      {"evaluation",
       {{"nmi_normalization", std::string(to_string(eval.nmi))},
        {"assumption_pairs", eval.assumption_pairs},
        {"assumption_seed", eval.assumption_seed}}},
      {"retry_delays_ms", retry_ms},
  };
}

namespace {

std::shared_ptr<EmbeddingBackend> make_embedding_backend(const EmbedderSpec& s) {
  if (s.kind == "mock_bow") return std::make_shared<MockBowBackend>(s.dim, s.seed, s.batch_size);
  HttpEndpoint ep{s.url, s.model, env_or_empty(s.api_key_env), std::chrono::seconds(s.timeout_s)};
  return std::make_shared<HttpEmbeddingBackend>(std::move(ep), s.batch_size);
}

std::shared_ptr<ChatBackend> make_chat_backend(const LlmSpec& s, const Corpus& corpus) {
  if (s.kind == "oracle") return std::make_shared<OracleChatBackend>(corpus);
  if (s.kind == "scripted") {
    ScriptedChatBackend::Script script;
    script.replies = s.replies;
    script.construction_default = s.construction_default;
    script.classification_default = s.classification_default;
    return std::make_shared<ScriptedChatBackend>(std::move(script));
  }
  HttpEndpoint ep{s.url, s.model, env_or_empty(s.api_key_env), std::chrono::seconds(s.timeout_s)};
  return std::make_shared<HttpChatBackend>(std::move(ep), s.context_limit);
}

struct Checkpoint {
  std::size_t round = 0;
  std::vector<LabelState> states;
  RunManifest progress;
};

std::optional<Checkpoint> latest_checkpoint(const fs::path& dir, const std::string& digest) {
  if (!fs::exists(dir)) return std::nullopt;
  std::optional<Checkpoint> best;
  const std::regex name(R"(round_(\d+)\.json)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const auto fname = entry.path().filename().string();
    if (!std::regex_match(fname, m, name)) continue;
    json j;
    try {
      j = json::parse(read_file(entry.path()));
    } catch (const json::exception&) {
      continue;
    }
    if (j.value("config_digest", "") != digest) continue;
    const auto round = j.at("round").get<std::size_t>();
    if (best && best->round >= round) continue;
    Checkpoint cp;
    cp.round = round;
    cp.states = states_from_json(j.at("states"));
    restore_manifest_progress(cp.progress, j.at("progress"));
    best = std::move(cp);
  }
  return best;
}

std::vector<LabeledPair> sample_same_intent_pairs(const Corpus& corpus, const std::vector<LabelState>& states,
                                                  std::size_t count, std::uint64_t seed) {
  std::vector<LabeledPair> pairs;
  if (!corpus.labeled() || count == 0) return pairs;
  std::map<std::size_t, std::vector<UtteranceId>> members;
  for (std::size_t i = 0; i < corpus.size(); ++i) members[corpus.gold_ids()[i]].push_back(i);
  std::vector<UtteranceId> eligible;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (members[corpus.gold_ids()[i]].size() > 1) eligible.push_back(i);
  }
  if (eligible.empty()) return pairs;
  Rng rng(seed);
  for (std::size_t p = 0; p < count; ++p) {
    const auto i = eligible[rng.below(eligible.size())];
    const auto& group = members[corpus.gold_ids()[i]];
    auto j = group[rng.below(group.size() - 1)];
    if (j == i) j = group.back();
    pairs.push_back({states[i].initial_label.str(), corpus[i].text, corpus[j].text});
  }
  return pairs;
}

json metrics_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

}  // namespace

RunOutcome execute_run(const RunConfig& base_config, const RunOptions& options) {
  RunConfig config = base_config;
  if (options.ablation) config.pipeline.ablation_no_iteration = true;

  const auto corpus = load_corpus(config.dataset, config.format);
  std::size_t k = 0;
  if (config.eval.k) {
    k = *config.eval.k;
  } else if (corpus.gold_k()) {
    k = *corpus.gold_k();
  } else {
    throw ConfigError("kmeans.k is not set and the corpus carries no gold labels");
  }
  if (k > corpus.size()) throw ConfigError("kmeans.k exceeds the corpus size");

  const auto corpus_digest = sha256_hex(to_jsonl(corpus));
  const auto digest = digest_fields({config.effective_json().dump(), corpus_digest});

  std::shared_ptr<EmbeddingCache> embed_cache;
  std::shared_ptr<ResponseCache> llm_cache;
  if (config.cache_dir) {
    embed_cache = std::make_shared<EmbeddingCache>(*config.cache_dir / "embeddings");
    llm_cache = std::make_shared<ResponseCache>(*config.cache_dir / "llm");
  }
  EmbedderGateway embedder(make_embedding_backend(config.embedder), embed_cache,
                           {config.embedder.instruction, config.embedder.parallelism, config.retry});
  LlmGateway llm(make_chat_backend(config.llm, corpus), llm_cache,
                 {config.llm.decode, config.llm.parallelism, config.llm.max_reasks, config.retry});

  const auto out_dir = config.output_dir;
  const auto cp_dir = out_dir / "checkpoints";
  fs::create_directories(cp_dir);

  PipelineHooks hooks;
  hooks.on_checkpoint = [&](std::size_t round, const std::vector<LabelState>& states, const RunManifest& m) {
    char name[32];
    std::snprintf(name, sizeof name, "round_%03zu.json", round);
    const json cp{{"round", round},
                  {"config_digest", digest},
                  {"states", states_to_json(states)},
                  {"progress", manifest_progress_json(m)}};
    write_file_atomic(cp_dir / name, cp.dump());
    if (!options.quiet) std::cerr << "checkpoint: round " << round << " written\n";
  };
  if (options.resume) {
    if (auto cp = latest_checkpoint(cp_dir, digest)) {
      if (!options.quiet) std::cerr << "resuming from round " << cp->round << "\n";
      hooks.resume = std::make_pair(std::move(cp->states), std::move(cp->progress));
    } else if (!options.quiet) {
      std::cerr << "no matching checkpoint found; starting from scratch\n";
    }
  }

  auto result = run_pipeline(corpus, embedder, llm, config.pipeline, hooks);

  std::vector<RunMetrics> metrics;
  json per_run = json::array();
  std::optional<ClusterAssignment> first_assignment;
  for (auto seed : config.eval.seeds) {
    KMeansConfig kc{k, config.eval.n_init, config.eval.max_iters, config.eval.tol, seed, config.eval.normalize};
    auto assignment = kmeans(result.final_snapshot, kc);
    json run{{"seed", seed},
             {"inertia", assignment.inertia},
             {"iterations", assignment.iterations_run},
             {"degenerate", assignment.degenerate},
             {"assignment", assignment.labels}};
    if (corpus.labeled()) {
      const PartitionPair pp{corpus.gold_ids(), assignment.labels};
      RunMetrics rm{seed, nmi(pp, config.eval.nmi), clustering_accuracy(pp)};
      run["nmi"] = rm.nmi;
      run["acc"] = rm.acc;
      metrics.push_back(rm);
    } else {
      run["nmi"] = nullptr;
      run["acc"] = nullptr;
    }
    per_run.push_back(std::move(run));
    if (!first_assignment) first_assignment = std::move(assignment);
  }

  const auto crosstab = label_cluster_crosstab(result.states, *first_assignment);
  json crosstab_json = json::array();
  for (const auto& r : crosstab) {
    crosstab_json.push_back({{"label", r.label}, {"cluster", r.cluster}, {"count", r.count}, {"purity", r.purity}});
  }

  json assumption = nullptr;
  const auto pairs = sample_same_intent_pairs(corpus, result.states, config.eval.assumption_pairs,
                                              config.eval.assumption_seed);
  if (!pairs.empty()) assumption = check_assumption(embedder, pairs);

  json report{{"config_digest", digest},
              {"corpus", {{"name", corpus.name()}, {"n", corpus.size()}, {"gold_k", corpus.gold_k() ? json(*corpus.gold_k()) : json(nullptr)}}},
              {"mode", result.manifest.mode},
              {"k", k},
              {"nmi_normalization", std::string(to_string(config.eval.nmi))},
              {"acc_matching", "one-to-one optimal assignment (Hungarian)"},
              {"kmeans",
               {{"normalize", config.eval.normalize},
                {"n_init", config.eval.n_init},
                {"max_iters", config.eval.max_iters},
                {"tol", config.eval.tol},
                {"variance_source", "k-means seeds over one final snapshot"}}},
              {"pipeline", result.manifest.deterministic_json()},
              {"per_run", per_run},
              {"crosstab_seed", config.eval.seeds.front()},
              {"crosstab", crosstab_json},
              {"assumption_check", assumption}};
  if (!metrics.empty()) {
    const auto agg = aggregate(metrics);
    report["mean_sd"] = {{"nmi", metrics_json(agg.nmi)}, {"acc", metrics_json(agg.acc)}};
    report["summary"] = "NMI " + format_mean_sd(agg.nmi) + "  Acc " + format_mean_sd(agg.acc);
  } else {
    report["mean_sd"] = nullptr;
  }

  // Stats gathered after the assumption check too.
  result.manifest.embed_stats = embedder.stats();
  result.manifest.llm_stats = llm.stats();
  auto manifest = result.manifest.to_json();
  manifest["config_digest"] = digest;
  manifest["corpus_digest"] = corpus_digest;
  manifest["effective_config"] = config.effective_json();
  manifest["kmeans_seeds"] = config.eval.seeds;
  manifest["code_version"] = INTENTCLUST_VERSION;
  manifest["resumed"] = hooks.resume.has_value();

  RunOutcome outcome{report, manifest, out_dir / "report.json"};
  write_file_atomic(outcome.report_path, report.dump(2) + "\n");
  write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  write_file_atomic(out_dir / "crosstab.csv", crosstab_csv(crosstab));
  return outcome;
}

// ---------------------------------------------------------------------------
// eval

namespace {

std::string scalar_label(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ConfigError("assignment entries must be strings or integers");
}

std::vector<std::string> scalar_labels(const json& arr) {
  std::vector<std::string> out;
  for (const auto& v : arr) out.push_back(scalar_label(v));
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> read_assignments(const fs::path& path) {
  const auto content = read_file(path);
  json whole;
  bool parsed = false;
  try {
    whole = json::parse(content);
    parsed = true;
  } catch (const json::parse_error&) {
  }

  if (parsed) {
    if (whole.is_array()) {
      if (!whole.empty() && whole.front().is_array()) {
        std::vector<std::vector<std::string>> runs;
        for (const auto& run : whole) runs.push_back(scalar_labels(run));
        return runs;
      }
      return {scalar_labels(whole)};
    }
    if (whole.is_object() && whole.contains("per_run")) {
      std::vector<std::vector<std::string>> runs;
      for (const auto& run : whole["per_run"]) runs.push_back(scalar_labels(run.at("assignment")));
      return runs;
    }
    if (whole.is_object() && whole.contains("label")) return {{scalar_label(whole["label"])}};
    throw ConfigError(path.string() + ": unrecognized assignment JSON");
  }

  // JSONL corpus with labels, or plain text with one label per line.
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    std::vector<std::string> labels;
    std::istringstream lines(content);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      ++n;
      if (trim(line).empty()) continue;
      try {
        labels.push_back(scalar_label(json::parse(line).at("label")));
      } catch (const json::exception& e) {
        throw MalformedRecord(n, e.what());
      }
    }
    return {labels};
  }
  std::vector<std::string> labels;
  std::istringstream lines(content);
  std::string line;
  while (std::getline(lines, line)) {
    auto t = trim(line);
    if (!t.empty()) labels.push_back(std::move(t));
  }
  return {labels};
}

namespace {

std::vector<std::size_t> dense_ids(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(ids.emplace(l, ids.size()).first->second);
  return out;
}

}  // namespace

EvalOutcome evaluate_files(const fs::path& gold_path, const fs::path& pred_path, NmiNormalization norm) {
  const auto gold_runs = read_assignments(gold_path);
  if (gold_runs.size() != 1) throw ConfigError("gold file must hold exactly one assignment");
  const auto gold = dense_ids(gold_runs.front());
  const auto pred_runs = read_assignments(pred_path);

  std::vector<RunMetrics> runs;
  std::ostringstream text;
  for (std::size_t r = 0; r < pred_runs.size(); ++r) {
    if (pred_runs[r].size() != gold.size()) {
      throw LengthMismatch("run " + std::to_string(r) + " has " + std::to_string(pred_runs[r].size()) +
                           " labels but gold has " + std::to_string(gold.size()));
    }
    const PartitionPair pp{gold, dense_ids(pred_runs[r])};
    runs.push_back({r, nmi(pp, norm), clustering_accuracy(pp)});
    char line[96];
    std::snprintf(line, sizeof line, "run %zu: NMI %.4f  Acc %.4f\n", r, runs.back().nmi, runs.back().acc);
    text << line;
  }
  auto report = aggregate(std::move(runs));
  text << "NMI " << format_mean_sd(report.nmi) << "  Acc " << format_mean_sd(report.acc) << "  ("
       << report.per_run.size() << " run" << (report.per_run.size() == 1 ? "" : "s") << ", mean (SD) in %)\n";
  return {std::move(report), text.str()};
}

}  // namespace intentclust
