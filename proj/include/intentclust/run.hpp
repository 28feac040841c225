#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intentclust/corpus.hpp"
#include "intentclust/llm.hpp"
#include "intentclust/metrics.hpp"
#include "intentclust/pipeline.hpp"
#include "json.hpp"

namespace intentclust {

struct EmbedderSpec {
  std::string kind = "mock_bow";  ///< mock_bow | http
  std::size_t dim = 4096;
  std::uint64_t seed = 0;
  std::size_t batch_size = 512;
  std::string url;
  std::string model;
  std::string api_key_env = "INTENTCLUST_EMBEDDER_API_KEY";
  std::string instruction = "Represent the sentence for intent clustering:";
  std::size_t parallelism = 8;
  std::size_t timeout_s = 60;
};

struct LlmSpec {
  std::string kind = "oracle";  ///< oracle | scripted | http
  std::string url;
  std::string model;
  std::string api_key_env = "INTENTCLUST_LLM_API_KEY";
  DecodeParams decode;
  std::size_t context_limit = 32768;  ///< bytes; http only
  std::size_t parallelism = 4;
  std::size_t max_reasks = 2;
  std::size_t timeout_s = 120;
  std::map<std::string, std::string> replies;  ///< scripted only
  std::optional<std::string> construction_default;
  std::optional<std::string> classification_default;
};

struct EvalSpec {
  std::optional<std::size_t> k;  ///< defaults to the corpus gold_k
  std::size_t n_init = 10;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  bool normalize = true;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  NmiNormalization nmi = NmiNormalization::Arithmetic;
  std::size_t assumption_pairs = 200;
  std::uint64_t assumption_seed = 0;
};

struct RunConfig {
  std::filesystem::path dataset;
  CorpusFormat format = CorpusFormat::Jsonl;
  EmbedderSpec embedder;
  LlmSpec llm;
  PipelineConfig pipeline;
  EvalSpec eval;
  RetryPolicy retry;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path output_dir = "out";

  /// Effective settings with every default filled in (paths excluded).
  nlohmann::json effective_json() const;
};

/// Relative paths resolve against `base_dir`. INTENTCLUST_CACHE_DIR, when
/// set, overrides cache_dir. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct RunOptions {
  bool ablation = false;  ///< force the w/o Iteration mode
  bool resume = false;
  bool quiet = true;
};

struct RunOutcome {
  nlohmann::json report;
  nlohmann::json manifest;
  std::filesystem::path report_path;
};

/// Pipeline -> K-means per seed -> evaluation. Writes report.json,
/// manifest.json, crosstab.csv and checkpoints/round_NNN.json under the
/// output directory.
RunOutcome execute_run(const RunConfig& config, const RunOptions& options);

/// One or more assignment vectors read from a file: plain text (one label
/// per line), a JSON array (or array of arrays), a report JSON with
/// per_run[].assignment, or a JSONL corpus with "label" fields.
std::vector<std::vector<std::string>> read_assignments(const std::filesystem::path& path);

struct EvalOutcome {
  MetricReport report;
  std::string text;  ///< human-readable block
};

/// Scores every predicted run against the gold run. Throws LengthMismatch.
EvalOutcome evaluate_files(const std::filesystem::path& gold, const std::filesystem::path& pred,
                           NmiNormalization norm = NmiNormalization::Arithmetic);

}  // namespace intentclust
