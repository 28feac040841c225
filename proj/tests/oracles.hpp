#pragma once

// Independent reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

/// Accuracy by trying every injective cluster->class map (tiny K only).
inline double accuracy_brute_force(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred) {
  std::map<std::size_t, std::size_t> gi, pi;
  for (auto g : gold) gi.emplace(g, gi.size());
  for (auto p : pred) pi.emplace(p, pi.size());
  const std::size_t n = std::max(gi.size(), pi.size());
  std::vector<std::vector<long>> count(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++count[pi[pred[i]]][gi[gold[i]]];
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long s = 0;
    for (std::size_t c = 0; c < n; ++c) s += count[c][perm[c]];
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(gold.size());
}

/// NMI straight from the textbook sums with probabilities, arithmetic mean.
inline double nmi_direct(const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
  const double n = static_cast<double>(u.size());
  std::map<std::size_t, double> pu, pv;
  std::map<std::pair<std::size_t, std::size_t>, double> puv;
  for (std::size_t i = 0; i < u.size(); ++i) {
    pu[u[i]] += 1.0 / n;
    pv[v[i]] += 1.0 / n;
    puv[{u[i], v[i]}] += 1.0 / n;
  }
  double hu = 0, hv = 0, mi = 0;
  for (auto& [_, p] : pu) hu -= p * std::log(p);
  for (auto& [_, p] : pv) hv -= p * std::log(p);
  for (auto& [key, p] : puv) mi += p * std::log(p / (pu[key.first] * pv[key.second]));
  if (pu.size() == 1 && pv.size() == 1) return 1.0;
  const double denom = (hu + hv) / 2.0;
  return denom == 0.0 ? 0.0 : mi / denom;
}

/// Two-sided Student-t tail probability P(|T| >= t) from the finite series
/// for integer df (Abramowitz & Stegun 26.7.3 / 26.7.4).
inline double t_two_sided_p(double t, unsigned df) {
  const double pi = std::acos(-1.0);
  const double theta = std::atan(std::fabs(t) / std::sqrt(static_cast<double>(df)));
  const double s = std::sin(theta), c = std::cos(theta), c2 = c * c;
  double a = 0.0;
  if (df % 2 == 1) {
    double series = 0.0;
    if (df > 1) {
      double term = 1.0;
      series = 1.0;
      for (unsigned k = 3; k + 2 <= df; k += 2) {
        term *= c2 * static_cast<double>(k - 1) / static_cast<double>(k);
        series += term;
      }
    }
    a = 2.0 / pi * (theta + s * c * series);
  } else {
    double term = 1.0, series = 1.0;
    for (unsigned k = 2; k + 2 <= df; k += 2) {
      term *= c2 * static_cast<double>(k - 1) / static_cast<double>(k);
      series += term;
    }
    a = s * series;
  }
  return 1.0 - a;
}

}  // namespace oracle
