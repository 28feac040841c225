#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intentclust/kmeans.hpp"
#include "intentclust/pipeline.hpp"

namespace intentclust {

/// Gold classes and predicted clusters for the same N items. Ids need not
/// be dense; they are compacted internally.
struct PartitionPair {
  std::vector<std::size_t> gold;
  std::vector<std::size_t> predicted;
};

enum class NmiNormalization { Arithmetic, Geometric, Min, Max };

NmiNormalization parse_nmi_normalization(std::string_view name);
std::string_view to_string(NmiNormalization n);

/// Mutual information over a normalizing mean of the two entropies (natural
/// log). 1.0 when both partitions are a single cluster. Throws
/// LengthMismatch.
double nmi(const PartitionPair& p, NmiNormalization norm = NmiNormalization::Arithmetic);

/// Fraction of items matched under the best one-to-one cluster->class
/// assignment. Throws LengthMismatch.
double clustering_accuracy(const PartitionPair& p);

/// Per-item 1.0/0.0 correctness under the same optimal matching.
std::vector<double> item_correctness(const PartitionPair& p);

/// Optimal assignment maximizing total weight on a rectangular matrix
/// (rows x cols, row-major). Returns, per row, the matched column or -1
/// when the row is left unmatched (rows > cols).
std::vector<long> max_weight_assignment(std::span<const long long> weights, std::size_t rows, std::size_t cols);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t df = 0;
};

/// Two-sided paired t-test. Identical inputs give t=0, p=1. A constant
/// non-zero difference gives t=+-inf, p=0 unless `tolerate_degenerate` is
/// false, in which case DegenerateVariance is thrown. Throws LengthMismatch
/// for unequal or too-short inputs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, bool tolerate_degenerate = true);

/// "p<1e-12" below the reporting floor, otherwise the value.
std::string format_p_value(double p);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  ///< sample SD (n-1); 0 for a single run
};

MeanSd mean_sd(std::span<const double> values);

struct RunMetrics {
  std::uint64_t seed = 0;
  double nmi = 0.0;
  double acc = 0.0;
};

struct MetricReport {
  std::vector<RunMetrics> per_run;
  MeanSd nmi;
  MeanSd acc;
};

MetricReport aggregate(std::vector<RunMetrics> per_run);

/// Percentages with SD in parentheses, two decimals: "83.56 (0.26)".
std::string format_mean_sd(const MeanSd& m);

struct CrosstabRow {
  std::string label;
  std::size_t cluster = 0;
  std::size_t count = 0;
  double purity = 0.0;  ///< largest single-cluster share of this label
};

/// Occurrences of every pseudo-label in the final label sets per predicted
/// cluster, sorted by label then cluster.
std::vector<CrosstabRow> label_cluster_crosstab(const std::vector<LabelState>& states,
                                                const ClusterAssignment& assignment);

std::string crosstab_csv(const std::vector<CrosstabRow>& rows);

}  // namespace intentclust
