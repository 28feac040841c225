#include <cmath>

#include "doctest.h"
#include "intentclust/error.hpp"
#include "intentclust/metrics.hpp"
#include "oracles.hpp"

using namespace intentclust;

namespace {

std::vector<std::size_t> random_partition(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> out(n);
  for (auto& x : out) x = rng.below(k) * 3 + 5;  // sparse, non-dense ids on purpose
  return out;
}

}  // namespace

TEST_CASE("crossed partitions") {
  const PartitionPair p{{0, 0, 1, 1}, {0, 1, 0, 1}};
  CHECK(nmi(p) == 0.0);
  CHECK(clustering_accuracy(p) == 0.5);
}

TEST_CASE("identical partitions up to renaming") {
  const PartitionPair p{{0, 0, 1, 1, 2}, {7, 7, 3, 3, 9}};
  CHECK(nmi(p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(clustering_accuracy(p) == 1.0);
  CHECK(nmi({{4, 4, 4}, {1, 1, 1}}) == 1.0);
  CHECK(nmi({{4, 4, 4}, {1, 2, 3}}) == 0.0);
}

TEST_CASE("accuracy matches factorial brute force") {
  Rng rng(100);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(30);
    const std::size_t kg = 1 + rng.below(6), kp = 1 + rng.below(6);
    const auto g = random_partition(rng, n, kg), p = random_partition(rng, n, kp);
    REQUIRE(clustering_accuracy({g, p}) == oracle::accuracy_brute_force(g, p));
  }
}

TEST_CASE("nmi matches the direct formula") {
  Rng rng(200);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng.below(60);
    const auto g = random_partition(rng, n, 1 + rng.below(8));
    const auto p = random_partition(rng, n, 1 + rng.below(8));
    REQUIRE(std::fabs(nmi({g, p}) - std::clamp(oracle::nmi_direct(g, p), 0.0, 1.0)) <= 1e-9);
  }
}

TEST_CASE("metric properties") {
  Rng rng(300);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng.below(40);
    const auto g = random_partition(rng, n, 1 + rng.below(5));
    const auto p = random_partition(rng, n, 1 + rng.below(5));
    const double a = clustering_accuracy({g, p});
    const double m = nmi({g, p});
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0);
    REQUIRE(m >= 0.0);
    REQUIRE(m <= 1.0);
    // NMI is symmetric; accuracy too, since the matching is one-to-one.
    REQUIRE(nmi({p, g}) == doctest::Approx(m).epsilon(1e-12));
    REQUIRE(clustering_accuracy({p, g}) == a);
    const auto items = item_correctness({g, p});
    double s = 0;
    for (double x : items) s += x;
    REQUIRE(s / static_cast<double>(n) == doctest::Approx(a));
  }
}

TEST_CASE("nmi normalizations") {
  const PartitionPair p{{0, 0, 0, 1, 1, 1, 2, 2}, {0, 0, 1, 1, 1, 1, 2, 2}};
  const double a = nmi(p, NmiNormalization::Arithmetic);
  const double g = nmi(p, NmiNormalization::Geometric);
  const double mn = nmi(p, NmiNormalization::Min);
  const double mx = nmi(p, NmiNormalization::Max);
  CHECK(mx <= a);
  CHECK(a <= mn);
  CHECK(g <= mn);
  CHECK(mx <= g);
  CHECK(parse_nmi_normalization("Geometric") == NmiNormalization::Geometric);
  CHECK(to_string(NmiNormalization::Max) == "max");
  CHECK_THROWS_AS(parse_nmi_normalization("harmonic"), ConfigError);
}

TEST_CASE("length mismatches") {
  CHECK_THROWS_AS(nmi({{0, 1}, {0}}), LengthMismatch);
  CHECK_THROWS_AS(clustering_accuracy({{}, {}}), LengthMismatch);
}

TEST_CASE("rectangular assignment") {
  // 3 rows, 2 cols: one row stays unmatched.
  const std::vector<long long> w{5, 1, 4, 4, 1, 9};
  const auto m = max_weight_assignment(w, 3, 2);
  CHECK(m == std::vector<long>{0, -1, 1});
  const std::vector<long long> w2{1, 2, 3, 3, 2, 1};
  CHECK(max_weight_assignment(w2, 2, 3) == std::vector<long>{2, 0});
}

TEST_CASE("paired t-test matches the closed-form t distribution") {
  Rng rng(400);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng.below(20);
    std::vector<double> a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = rng.normal();
      b[j] = rng.normal() + 0.3;
    }
    const auto r = paired_t_test(a, b);
    REQUIRE(r.df == n - 1);
    std::vector<double> d(n);
    double mean = 0;
    for (std::size_t j = 0; j < n; ++j) mean += (d[j] = a[j] - b[j]) / static_cast<double>(n);
    double ss = 0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double t = mean / std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    REQUIRE(r.t_statistic == doctest::Approx(t).epsilon(1e-10));
    REQUIRE(r.p_value == doctest::Approx(oracle::t_two_sided_p(t, static_cast<unsigned>(n - 1))).epsilon(1e-8));
  }
}

TEST_CASE("t-test on a hand-worked example") {
  // d = {1, 2, 3, 4}: mean 2.5, sd sqrt(5/3), t = 2.5 / (sd / 2) = 3.8729833.
  const std::vector<double> a{2, 4, 6, 8}, b{1, 2, 3, 4};
  const auto r = paired_t_test(a, b);
  CHECK(r.t_statistic == doctest::Approx(3.872983346207417));
  CHECK(r.df == 3);
  CHECK(r.p_value == doctest::Approx(oracle::t_two_sided_p(3.872983346207417, 3)).epsilon(1e-10));
  CHECK(r.p_value == doctest::Approx(0.030466).epsilon(1e-4));
}

TEST_CASE("t-test degenerate cases") {
  const std::vector<double> a{1, 2, 3}, same{1, 2, 3}, shifted{0, 1, 2};
  const auto eq = paired_t_test(a, same);
  CHECK(eq.t_statistic == 0.0);
  CHECK(eq.p_value == 1.0);
  const auto sh = paired_t_test(a, shifted);
  CHECK(std::isinf(sh.t_statistic));
  CHECK(sh.p_value == 0.0);
  CHECK_THROWS_AS(paired_t_test(a, shifted, false), DegenerateVariance);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), LengthMismatch);
  CHECK_THROWS_AS(paired_t_test(a, std::vector<double>{1, 2}), LengthMismatch);
}

TEST_CASE("p-value formatting") {
  CHECK(format_p_value(1e-15) == "p<1e-12");
  CHECK(format_p_value(0.0) == "p<1e-12");
  CHECK(format_p_value(0.0305) == "p=0.0305");
}

TEST_CASE("mean and sample SD") {
  const std::vector<double> v{0.8, 0.82, 0.84};
  const auto m = mean_sd(v);
  CHECK(m.mean == doctest::Approx(0.82));
  CHECK(m.sd == doctest::Approx(0.02));
  CHECK(mean_sd(std::vector<double>{0.5}).sd == 0.0);
  CHECK(format_mean_sd({0.835612, 0.0026}) == "83.56 (0.26)");
}

TEST_CASE("aggregate") {
  const auto r = aggregate({{0, 1.0, 0.5}, {1, 0.5, 1.0}});
  CHECK(r.nmi.mean == doctest::Approx(0.75));
  CHECK(r.acc.mean == doctest::Approx(0.75));
  CHECK(r.per_run.size() == 2);
}

TEST_CASE("label x cluster cross-tab") {
  std::vector<LabelState> states;
  states.emplace_back(0, PseudoLabel("a"));
  states.emplace_back(1, PseudoLabel("a"));
  states.emplace_back(2, PseudoLabel("b"));
  states[2].labels_by_round.push_back({PseudoLabel("b"), PseudoLabel("a")});
  ClusterAssignment asg;
  asg.labels = {0, 0, 1};
  const auto rows = label_cluster_crosstab(states, asg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == "a");
  CHECK(rows[0].cluster == 0);
  CHECK(rows[0].count == 2);
  CHECK(rows[0].purity == doctest::Approx(2.0 / 3.0));
  CHECK(rows[1].label == "a");
  CHECK(rows[1].cluster == 1);
  CHECK(rows[2].label == "b");
  CHECK(rows[2].purity == 1.0);
  CHECK(crosstab_csv(rows) ==
        "label,cluster,count,purity\na,0,2,0.666667\na,1,1,0.666667\nb,1,1,1.000000\n");
  asg.labels = {0, 0};
  CHECK_THROWS_AS(label_cluster_crosstab(states, asg), LengthMismatch);
}
