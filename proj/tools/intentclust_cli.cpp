// intentclust: run the pipeline, score assignment files, generate corpora.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "intentclust/error.hpp"
#include "intentclust/metrics.hpp"
#include "intentclust/run.hpp"
#include "intentclust/synthetic.hpp"

namespace ic = intentclust;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitBackend = 2;

int cmd_run(const std::string& config_path, bool ablation, bool resume) {
  const auto config = ic::load_run_config(config_path);
  ic::RunOptions opts;
  opts.ablation = ablation;
  opts.resume = resume;
  opts.quiet = false;
  const auto outcome = ic::execute_run(config, opts);
  std::cout << "mode: " << outcome.report.at("mode").get<std::string>() << "\n";
  if (outcome.report.contains("summary")) std::cout << outcome.report.at("summary").get<std::string>() << "\n";
  std::cout << "report: " << outcome.report_path.string() << "\n";
  return 0;
}

int cmd_eval(const std::string& gold, const std::string& pred, const std::string& norm) {
  const auto outcome = ic::evaluate_files(gold, pred, ic::parse_nmi_normalization(norm));
  std::cout << outcome.text;
  return 0;
}

int cmd_gen_synthetic(const ic::SyntheticSpec& spec, const std::string& out_path) {
  const auto content = ic::synthetic_jsonl(spec);
  const std::filesystem::path out(out_path);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw ic::Error("cannot open " + out_path + " for writing");
  f << content;
  if (!f) throw ic::Error("write to " + out_path + " failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intent clustering with LLM pseudo-labels"};
  app.require_subcommand(1);

  std::string config_path;
  bool ablation = false, resume = false;
  auto* run = app.add_subcommand("run", "Run pseudo-labeling, K-means and evaluation from a JSON config");
  run->add_option("--config", config_path, "Config JSON")->required();
  run->add_flag("--ablation", ablation, "Stop after the construction stage (w/o Iteration)");
  run->add_flag("--resume", resume, "Continue from the latest matching checkpoint");

  std::string gold, pred, norm = "arithmetic";
  auto* eval = app.add_subcommand("eval", "Score predicted assignments against gold labels");
  eval->add_option("--gold", gold, "Gold assignment file")->required();
  eval->add_option("--pred", pred, "Predicted assignment file (one or more runs)")->required();
  eval->add_option("--nmi", norm, "NMI normalization: arithmetic, geometric, min, max");

  ic::SyntheticSpec spec;
  std::string out_path;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a labeled synthetic JSONL corpus");
  gen->add_option("--k", spec.k, "Number of intents")->check(CLI::PositiveNumber);
  gen->add_option("--per-cluster", spec.per_cluster, "Utterances per intent")->check(CLI::PositiveNumber);
  gen->add_option("--vocab", spec.vocab, "Vocabulary size")->check(CLI::PositiveNumber);
  gen->add_option("--seed", spec.seed, "Generator seed");
  gen->add_option("--out", out_path, "Output JSONL path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, ablation, resume);
    if (*eval) return cmd_eval(gold, pred, norm);
    if (*gen) return cmd_gen_synthetic(spec, out_path);
  } catch (const ic::BackendUnavailable& e) {
    std::cerr << "backend failure: " << e.what() << "\n(checkpoints kept; rerun with --resume)\n";
    return kExitBackend;
  } catch (const ic::ContextOverflow& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
