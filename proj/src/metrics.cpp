#include "intentclust/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "intentclust/error.hpp"
#include "intentclust/util.hpp"

namespace intentclust {

NmiNormalization parse_nmi_normalization(std::string_view name) {
  const auto lower = to_lower_ascii(name);
  if (lower == "arithmetic") return NmiNormalization::Arithmetic;
  if (lower == "geometric") return NmiNormalization::Geometric;
  if (lower == "min") return NmiNormalization::Min;
  if (lower == "max") return NmiNormalization::Max;
  throw ConfigError("unknown NMI normalization '" + std::string(name) + "'");
}

std::string_view to_string(NmiNormalization n) {
  switch (n) {
    case NmiNormalization::Arithmetic:
      return "arithmetic";
    case NmiNormalization::Geometric:
      return "geometric";
    case NmiNormalization::Min:
      return "min";
    case NmiNormalization::Max:
      return "max";
  }
  return "arithmetic";
}

namespace {

struct Contingency {
  std::size_t n = 0;
  std::size_t rows = 0;  // gold classes
  std::size_t cols = 0;  // predicted clusters
  std::vector<long long> counts;
  std::vector<std::size_t> gold_dense;
  std::vector<std::size_t> pred_dense;

  long long at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }
};

std::vector<std::size_t> compact(const std::vector<std::size_t>& ids, std::size_t& k) {
  std::map<std::size_t, std::size_t> remap;
  for (auto id : ids) remap.emplace(id, 0);
  k = 0;
  for (auto& [_, dense] : remap) dense = k++;
  std::vector<std::size_t> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out[i] = remap[ids[i]];
  return out;
}

Contingency contingency(const PartitionPair& p) {
  if (p.gold.size() != p.predicted.size()) {
    throw LengthMismatch("gold has " + std::to_string(p.gold.size()) + " items, predicted has " +
                         std::to_string(p.predicted.size()));
  }
  if (p.gold.empty()) throw LengthMismatch("partitions are empty");
  Contingency c;
  c.n = p.gold.size();
  c.gold_dense = compact(p.gold, c.rows);
  c.pred_dense = compact(p.predicted, c.cols);
  c.counts.assign(c.rows * c.cols, 0);
  for (std::size_t i = 0; i < c.n; ++i) ++c.counts[c.gold_dense[i] * c.cols + c.pred_dense[i]];
  return c;
}

double entropy(const std::vector<long long>& marginal, double n) {
  double h = 0.0;
  for (auto m : marginal) {
    if (m > 0) {
      const double p = static_cast<double>(m) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

double nmi(const PartitionPair& p, NmiNormalization norm) {
  const auto c = contingency(p);
  const double n = static_cast<double>(c.n);
  std::vector<long long> a(c.rows, 0), b(c.cols, 0);
  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t k = 0; k < c.cols; ++k) {
      a[r] += c.at(r, k);
      b[k] += c.at(r, k);
    }
  }
  const double ha = entropy(a, n);
  const double hb = entropy(b, n);
  if (c.rows == 1 && c.cols == 1) return 1.0;

  double mi = 0.0;
  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t k = 0; k < c.cols; ++k) {
      const auto nij = c.at(r, k);
      if (nij == 0) continue;
      const double ratio = (n * static_cast<double>(nij)) / (static_cast<double>(a[r]) * static_cast<double>(b[k]));
      mi += static_cast<double>(nij) / n * std::log(ratio);
    }
  }

  double denom = 0.0;
  switch (norm) {
    case NmiNormalization::Arithmetic:
      denom = 0.5 * (ha + hb);
      break;
    case NmiNormalization::Geometric:
      denom = std::sqrt(ha * hb);
      break;
    case NmiNormalization::Min:
      denom = std::min(ha, hb);
      break;
    case NmiNormalization::Max:
      denom = std::max(ha, hb);
      break;
  }
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

std::vector<long> max_weight_assignment(std::span<const long long> weights, std::size_t rows, std::size_t cols) {
  if (weights.size() != rows * cols) throw LengthMismatch("weight matrix size does not match its shape");
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  long long max_w = 0;
  for (auto w : weights) max_w = std::max(max_w, w);
  // Square, 1-indexed cost matrix for the minimizing Hungarian method;
  // padding cells carry weight 0.
  auto cost = [&](std::size_t i, std::size_t j) -> long long {
    const long long w = (i <= rows && j <= cols) ? weights[(i - 1) * cols + (j - 1)] : 0;
    return max_w - w;
  };

  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);  // match[col] = row
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      long long delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<long> row_to_col(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match[j];
    if (i >= 1 && i <= rows && j <= cols) row_to_col[i - 1] = static_cast<long>(j - 1);
  }
  return row_to_col;
}

namespace {

/// Optimal cluster->class map: result[cluster] = class or -1.
std::vector<long> optimal_cluster_map(const Contingency& c) {
  // Rows are predicted clusters, columns gold classes.
  std::vector<long long> w(c.cols * c.rows);
  for (std::size_t k = 0; k < c.cols; ++k) {
    for (std::size_t r = 0; r < c.rows; ++r) w[k * c.rows + r] = c.at(r, k);
  }
  return max_weight_assignment(w, c.cols, c.rows);
}

}  // namespace

double clustering_accuracy(const PartitionPair& p) {
  const auto c = contingency(p);
  const auto map = optimal_cluster_map(c);
  long long matched = 0;
  for (std::size_t k = 0; k < c.cols; ++k) {
    if (map[k] >= 0) matched += c.at(static_cast<std::size_t>(map[k]), k);
  }
  return static_cast<double>(matched) / static_cast<double>(c.n);
}

std::vector<double> item_correctness(const PartitionPair& p) {
  const auto c = contingency(p);
  const auto map = optimal_cluster_map(c);
  std::vector<double> out(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    const auto mapped = map[c.pred_dense[i]];
    out[i] = mapped >= 0 && static_cast<std::size_t>(mapped) == c.gold_dense[i] ? 1.0 : 0.0;
  }
  return out;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, bool tolerate_degenerate) {
  if (a.size() != b.size()) throw LengthMismatch("paired samples differ in length");
  if (a.size() < 2) throw LengthMismatch("paired t-test needs at least two pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const auto [mean, sd] = mean_sd(d);

  TTestResult r;
  r.df = n - 1;
  if (sd == 0.0) {
    if (!tolerate_degenerate) throw DegenerateVariance("all paired differences are equal");
    if (mean == 0.0) return r;
    r.t_statistic = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(r.df));
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t_statistic))));
  return r;
}

std::string format_p_value(double p) {
  if (p < 1e-12) return "p<1e-12";
  char buf[32];
  std::snprintf(buf, sizeof buf, "p=%.4g", p);
  return buf;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / (n - 1.0));
  return out;
}

MetricReport aggregate(std::vector<RunMetrics> per_run) {
  MetricReport r;
  std::vector<double> nmis, accs;
  for (const auto& m : per_run) {
    nmis.push_back(m.nmi);
    accs.push_back(m.acc);
  }
  r.nmi = mean_sd(nmis);
  r.acc = mean_sd(accs);
  r.per_run = std::move(per_run);
  return r;
}

std::string format_mean_sd(const MeanSd& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", 100.0 * m.mean, 100.0 * m.sd);
  return buf;
}

std::vector<CrosstabRow> label_cluster_crosstab(const std::vector<LabelState>& states,
                                                const ClusterAssignment& assignment) {
  if (states.size() != assignment.labels.size()) {
    throw LengthMismatch("label states cover " + std::to_string(states.size()) + " items, assignment covers " +
                         std::to_string(assignment.labels.size()));
  }
  std::map<std::string, std::map<std::size_t, std::size_t>> counts;
  for (const auto& s : states) {
    const auto cluster = assignment.labels.at(s.utterance_id);
    for (const auto& l : s.latest()) ++counts[l.str()][cluster];
  }
  std::vector<CrosstabRow> rows;
  for (const auto& [label, per_cluster] : counts) {
    std::size_t total = 0, top = 0;
    for (const auto& [_, n] : per_cluster) {
      total += n;
      top = std::max(top, n);
    }
    const double purity = static_cast<double>(top) / static_cast<double>(total);
    for (const auto& [cluster, n] : per_cluster) rows.push_back({label, cluster, n, purity});
  }
  return rows;
}

std::string crosstab_csv(const std::vector<CrosstabRow>& rows) {
  std::string out = "label,cluster,count,purity\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%zu,%zu,%.6f\n", r.cluster, r.count, r.purity);
    out += r.label;
    out += buf;
  }
  return out;
}

}  // namespace intentclust
