// fairdet/stats.hpp
//
// Pooled two-proportion z-tests on group metric disparities and the
// Holm step-down multiple-comparison correction.
//
// Copyright 2026 The fairdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRDET_STATS_HPP_
#define FAIRDET_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairdet/metrics.hpp"

namespace fairdet {

// k successes out of n trials; 0 <= k <= n, n >= 1.
struct proportion_sample {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
};

// Result of one pooled two-proportion z-test. defined is false when the
// pooled proportion is 0 or 1 (zero variance, no evidence either way); the
// convention is then z = 0, p = 1.
struct test_result {
  static constexpr const char* method = "pooled-z";
  double z = 0.0;
  double p_two_sided = 1.0;
  bool defined = false;
};

struct holm_outcome {
  std::vector<double> p_adjusted;  // aligned to input order, capped at 1
  std::vector<bool> reject;        // strict: adjusted < alpha
};

// Scope of one Holm family: all rows of a report jointly, or one family per
// metric across systems.
enum class holm_family : std::uint8_t { per_run, per_metric };

constexpr std::string_view to_string(holm_family f) noexcept {
  return f == holm_family::per_run ? "per-run" : "per-metric";
}

// Standard normal CDF via erfc; absolute error well below 1e-12.
inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Pooled test of H0: the two underlying proportions are equal.
//   p_hat = (k_a + k_b) / (n_a + n_b)
//   z = (p_a - p_b) / sqrt(p_hat (1 - p_hat) (1/n_a + 1/n_b))
//   p = 2 (1 - Phi(|z|)), evaluated as erfc(|z| / sqrt 2)
// Antisymmetric: swapping the samples negates z and preserves p exactly.
inline test_result two_proportion_z(const proportion_sample& a,
                                    const proportion_sample& b) {
  auto validate = [](const proportion_sample& s, const char* which) {
    if (s.trials < 1 || s.successes < 0 || s.successes > s.trials) {
      raise(errc::invalid_sample,
            std::string(which) + " sample has k=" + std::to_string(s.successes) +
                ", n=" + std::to_string(s.trials));
    }
  };
  validate(a, "first");
  validate(b, "second");

  test_result r;
  const std::int64_t k = a.successes + b.successes;
  const std::int64_t n = a.trials + b.trials;
  if (k == 0 || k == n) {
    // All failures or all successes pooled: both observed proportions are
    // equal and the pooled variance is zero.
    return r;
  }
  const double pa = static_cast<double>(a.successes) / static_cast<double>(a.trials);
  const double pb = static_cast<double>(b.successes) / static_cast<double>(b.trials);
  const double pooled = static_cast<double>(k) / static_cast<double>(n);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(a.trials) +
                               1.0 / static_cast<double>(b.trials)));
  r.z = (pa - pb) / se;
  r.p_two_sided = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  r.defined = true;
  return r;
}

// Holm step-down: sort p ascending (ties broken by input index), adjusted
// value at sorted rank j (0-based, m inputs) is the running maximum of
// min(1, p_(j) * (m - j)), mapped back to input order. Rejection is strict:
// adjusted < alpha. Rejections are always a superset of plain Bonferroni's.
inline holm_outcome holm_correct(const std::vector<double>& p_raw, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    raise(errc::invalid_p, "alpha must lie in (0,1), got " + std::to_string(alpha));
  }
  for (double p : p_raw) {
    if (!(p >= 0.0 && p <= 1.0)) {
      raise(errc::invalid_p, "p-value outside [0,1]: " + std::to_string(p));
    }
  }
  const std::size_t m = p_raw.size();
  holm_outcome out;
  out.p_adjusted.resize(m);
  out.reject.resize(m);
  if (m == 0) return out;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return p_raw[i] != p_raw[j] ? p_raw[i] < p_raw[j] : i < j;
  });

  double running = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double scaled =
        std::min(1.0, p_raw[order[j]] * static_cast<double>(m - j));
    running = std::max(running, scaled);
    out.p_adjusted[order[j]] = running;
    out.reject[order[j]] = running < alpha;
  }
  return out;
}

// Maps one metric's per-group confusion cells to the two proportion samples
// its z-test compares. Callers gate on both group metric values being
// defined first. Treatment equality is a ratio, not a proportion; it is
// tested through fp / (fp + fn) = TE / (1 + TE), a strictly monotone
// transform of fp / fn, so equality of the transformed proportions is
// equality of TE. The TPR/FPR-mean variant has no single proportion form and
// maps to nullopt (reported untested).
inline std::optional<std::pair<proportion_sample, proportion_sample>>
metric_to_samples(fairness_metric metric, eo_variant eo,
                  const confusion_counts& a, const confusion_counts& b) {
  auto make = [](std::int64_t ka, std::int64_t na, std::int64_t kb,
                 std::int64_t nb)
      -> std::optional<std::pair<proportion_sample, proportion_sample>> {
    if (na < 1 || nb < 1) return std::nullopt;
    return std::make_pair(proportion_sample{ka, na}, proportion_sample{kb, nb});
  };
  switch (metric) {
    case fairness_metric::statistical_parity:
      return make(a.tp + a.fp, a.total(), b.tp + b.fp, b.total());
    case fairness_metric::equal_opportunity:
      return make(a.tp, a.tp + a.fn, b.tp, b.tp + b.fn);
    case fairness_metric::equality_of_odds:
      if (eo == eo_variant::tpr_fpr_mean) return std::nullopt;
      return make(a.fp, a.fp + a.tn, b.fp, b.fp + b.tn);
    case fairness_metric::predictive_parity:
      return make(a.tp, a.tp + a.fp, b.tp, b.tp + b.fp);
    case fairness_metric::treatment_equality:
      return make(a.fp, a.fp + a.fn, b.fp, b.fp + b.fn);
  }
  return std::nullopt;
}

}  // namespace fairdet

#endif  // FAIRDET_STATS_HPP_
