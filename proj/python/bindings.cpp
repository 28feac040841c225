#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "intentclust/embedding.hpp"
#include "intentclust/error.hpp"
#include "intentclust/kmeans.hpp"
#include "intentclust/llm.hpp"
#include "intentclust/metrics.hpp"
#include "intentclust/run.hpp"
#include "intentclust/synthetic.hpp"

namespace py = pybind11;
namespace ic = intentclust;

namespace {

py::dict run_config(const std::filesystem::path& config, bool ablation, bool resume) {
  ic::RunOptions opts;
  opts.ablation = ablation;
  opts.resume = resume;
  ic::RunOutcome out;
  {
    py::gil_scoped_release release;
    out = ic::execute_run(ic::load_run_config(config), opts);
  }
  py::dict d;
  d["report"] = out.report.dump();
  d["manifest"] = out.manifest.dump();
  d["report_path"] = out.report_path;
  return d;
}

py::dict kmeans_py(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                   std::size_t n_init, std::size_t max_iters, double tol, bool normalize) {
  const auto m = ic::PointMatrix::from_rows(points);
  ic::ClusterAssignment a;
  {
    py::gil_scoped_release release;
    a = ic::kmeans(m, {k, n_init, max_iters, tol, seed, normalize});
  }
  py::dict d;
  d["labels"] = a.labels;
  d["inertia"] = a.inertia;
  d["iterations"] = a.iterations_run;
  d["degenerate"] = a.degenerate;
  d["inertia_history"] = a.inertia_history;
  return d;
}

py::dict t_test_py(const std::vector<double>& a, const std::vector<double>& b) {
  const auto r = ic::paired_t_test(a, b);
  py::dict d;
  d["t"] = r.t_statistic;
  d["p"] = r.p_value;
  d["df"] = r.df;
  return d;
}

std::vector<std::string> label_strings(const std::vector<ic::PseudoLabel>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(l.str());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Intent clustering with LLM pseudo-labels (C++ core)";

  auto base = py::register_exception<ic::Error>(m, "IntentclustError", PyExc_RuntimeError);
  py::register_exception<ic::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ic::LengthMismatch>(m, "LengthMismatch", base.ptr());
  py::register_exception<ic::BackendUnavailable>(m, "BackendUnavailable", base.ptr());

  m.def("run", &run_config, py::arg("config"), py::arg("ablation") = false, py::arg("resume") = false,
        "Run the pipeline from a JSON config file. Returns report/manifest as JSON text.");

  m.def(
      "evaluate",
      [](const std::filesystem::path& gold, const std::filesystem::path& pred, const std::string& norm) {
        return ic::evaluate_files(gold, pred, ic::parse_nmi_normalization(norm)).text;
      },
      py::arg("gold"), py::arg("pred"), py::arg("nmi") = "arithmetic");

  m.def(
      "synthetic_jsonl",
      [](std::size_t k, std::size_t per_cluster, std::size_t vocab, std::uint64_t seed) {
        return ic::synthetic_jsonl({k, per_cluster, vocab, seed});
      },
      py::arg("k") = 10, py::arg("per_cluster") = 20, py::arg("vocab") = 512, py::arg("seed") = 7);

  m.def(
      "nmi",
      [](const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred, const std::string& norm) {
        return ic::nmi({gold, pred}, ic::parse_nmi_normalization(norm));
      },
      py::arg("gold"), py::arg("pred"), py::arg("normalization") = "arithmetic");
  m.def(
      "clustering_accuracy",
      [](const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred) {
        return ic::clustering_accuracy({gold, pred});
      },
      py::arg("gold"), py::arg("pred"));
  m.def("paired_t_test", &t_test_py, py::arg("a"), py::arg("b"));

  m.def("kmeans", &kmeans_py, py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("n_init") = 10,
        py::arg("max_iters") = 300, py::arg("tol") = 1e-6, py::arg("normalize") = true);

  m.def(
      "mock_bow_embed",
      [](const std::string& text, std::size_t dim, std::uint64_t seed) {
        const auto v = ic::mock_bow_embed(text, dim, seed);
        return std::vector<float>(v.values().begin(), v.values().end());
      },
      py::arg("text"), py::arg("dim") = 4096, py::arg("seed") = 0);

  m.def(
      "normalize_label", [](const std::string& raw) { return ic::normalize_label(raw).str(); }, py::arg("raw"));
  m.def(
      "render_construction_prompt",
      [](const std::string& target, const std::vector<std::string>& candidates) {
        return ic::render_construction_prompt({target, candidates});
      },
      py::arg("target"), py::arg("candidates"));
  m.def(
      "render_classification_prompt",
      [](const std::string& target, const std::vector<std::pair<std::string, std::string>>& candidates) {
        ic::ClassificationPrompt p{target, {}};
        for (const auto& [text, label] : candidates) p.candidates.push_back({text, ic::PseudoLabel(label)});
        return ic::render_classification_prompt(p);
      },
      py::arg("target"), py::arg("candidates"));
  m.def(
      "parse_construction_reply", [](const std::string& raw) { return ic::parse_construction_reply(raw).str(); },
      py::arg("raw"));
  m.def(
      "parse_classification_reply",
      [](const std::string& raw, const std::vector<std::string>& allowed) {
        std::vector<ic::PseudoLabel> labels;
        for (const auto& a : allowed) labels.emplace_back(a);
        const auto r = ic::parse_classification_reply(raw, labels);
        return py::make_tuple(label_strings(r.selected), r.dropped);
      },
      py::arg("raw"), py::arg("allowed"));
}
