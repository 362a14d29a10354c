// fairdet/fairness.hpp
//
// Group fairness rows under one shared operating point, computed by two
// structurally independent paths that must agree exactly: evaluate_fairness
// (partition, decision vectors, confusion matrices, metric functions) and
// cross_check (one streaming pass of per-trial conditional frequencies that
// never materializes a confusion matrix).
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

#ifndef FAIRDET_FAIRNESS_HPP_
#define FAIRDET_FAIRNESS_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairdet/stats.hpp"

namespace fairdet {

// One metric for one system: per-group values, first-minus-second disparity,
// z, raw p, Holm-adjusted p, and the significance flag at alpha. tested is
// false when any group value is Undefined or the metric has no proportion
// form; such rows carry no z/p and never count toward a Holm family.
struct fairness_row {
  std::string system;
  fairness_metric metric = fairness_metric::statistical_parity;
  group_metric_value first;   // group_pair.first, e.g. F
  group_metric_value second;  // group_pair.second, e.g. M
  double diff = std::numeric_limits<double>::quiet_NaN();
  bool diff_defined = false;
  bool tested = false;
  test_result test;  // valid only when tested
  double p_holm = std::numeric_limits<double>::quiet_NaN();
  bool significant = false;
  confusion_counts cc_first;
  confusion_counts cc_second;
};

struct fairness_options {
  std::pair<std::string, std::string> group_pair = {"F", "M"};
  eo_variant eo = eo_variant::fpr_only;
  te_variant te = te_variant::count_ratio;
  double alpha = 0.05;
  holm_family family = holm_family::per_run;
};

constexpr std::array<fairness_metric, 5> kMetricOrder = {
    fairness_metric::statistical_parity, fairness_metric::equal_opportunity,
    fairness_metric::equality_of_odds, fairness_metric::predictive_parity,
    fairness_metric::treatment_equality,
};

// Applies Holm within the configured family over the tested rows and fills
// p_holm plus the strict-inequality significance flag. PerRun treats all
// given rows as one family; PerMetric forms one family per metric across the
// given rows. Untested rows keep p_holm = NaN, significant = false.
inline std::vector<fairness_row> build_significance(std::vector<fairness_row> rows,
                                                    double alpha,
                                                    holm_family family) {
  std::map<int, std::vector<std::size_t>> families;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].tested) continue;
    const int key = family == holm_family::per_run
                        ? 0
                        : static_cast<int>(rows[i].metric);
    families[key].push_back(i);
  }
  for (const auto& [key, indices] : families) {
    std::vector<double> p;
    p.reserve(indices.size());
    for (std::size_t i : indices) p.push_back(rows[i].test.p_two_sided);
    const holm_outcome outcome = holm_correct(p, alpha);
    for (std::size_t j = 0; j < indices.size(); ++j) {
      rows[indices[j]].p_holm = outcome.p_adjusted[j];
      rows[indices[j]].significant = outcome.reject[j];
    }
  }
  return rows;
}

namespace detail {

inline group_metric_value metric_from_counts(fairness_metric metric,
                                             const confusion_counts& cc,
                                             eo_variant eo, te_variant te,
                                             const std::string& group) {
  group_metric_value v;
  switch (metric) {
    case fairness_metric::statistical_parity: v = statistical_parity(cc); break;
    case fairness_metric::equal_opportunity: v = equal_opportunity(cc); break;
    case fairness_metric::equality_of_odds: v = equality_of_odds(cc, eo); break;
    case fairness_metric::predictive_parity: v = predictive_parity(cc); break;
    case fairness_metric::treatment_equality: v = treatment_equality(cc, te); break;
  }
  v.group = group;
  return v;
}

// The confusion-matrix path shared by evaluate_fairness and the report
// runner: five rows ordered SP, EOP, EO, PP, TE with values, diff, and raw
// z/p filled in. Holm is applied separately so families may span systems.
inline std::vector<fairness_row> rows_from_counts(const confusion_counts& cc_a,
                                                  const confusion_counts& cc_b,
                                                  const fairness_options& opt) {
  std::vector<fairness_row> rows;
  rows.reserve(kMetricOrder.size());
  for (fairness_metric metric : kMetricOrder) {
    fairness_row row;
    row.metric = metric;
    row.cc_first = cc_a;
    row.cc_second = cc_b;
    row.first = metric_from_counts(metric, cc_a, opt.eo, opt.te,
                                   opt.group_pair.first);
    row.second = metric_from_counts(metric, cc_b, opt.eo, opt.te,
                                    opt.group_pair.second);
    if (row.first.defined && row.second.defined) {
      row.diff = row.first.value - row.second.value;
      row.diff_defined = true;
      const auto samples = metric_to_samples(metric, opt.eo, cc_a, cc_b);
      if (samples.has_value()) {
        row.test = two_proportion_z(samples->first, samples->second);
        row.tested = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Path one: partition by group, apply the shared operating point to each
// subset, tally confusion matrices, evaluate the metric functions, and
// attach significance over the five rows.
inline std::vector<fairness_row> evaluate_fairness(const evaluation_set& set,
                                                   const operating_point& op,
                                                   const fairness_options& opt = {}) {
  group_partition parts = partition_by_group(set);
  auto it_a = parts.by_group.find(opt.group_pair.first);
  auto it_b = parts.by_group.find(opt.group_pair.second);
  if (it_a == parts.by_group.end()) {
    raise(errc::missing_group, "group '" + opt.group_pair.first + "' absent");
  }
  if (it_b == parts.by_group.end()) {
    raise(errc::missing_group, "group '" + opt.group_pair.second + "' absent");
  }
  const confusion_counts cc_a =
      confusion(it_a->second, apply_threshold(it_a->second, op));
  const confusion_counts cc_b =
      confusion(it_b->second, apply_threshold(it_b->second, op));
  return build_significance(detail::rows_from_counts(cc_a, cc_b, opt),
                            opt.alpha, opt.family);
}

// Path two: a single streaming pass over the unpartitioned set estimating
// every metric as a per-trial conditional relative frequency. Four
// accumulators per group (trials, predicted-positive, truth-positive, and
// their intersection); every cell a metric needs is derived by subtraction,
// so no confusion matrix is ever built and nothing from the first path is
// reused. Must agree with evaluate_fairness exactly on every input.
inline std::vector<fairness_row> cross_check(const evaluation_set& set,
                                             const operating_point& op,
                                             const fairness_options& opt = {}) {
  if (op.score_polarity != set.score_polarity) {
    raise(errc::polarity_mismatch,
          "operating point and evaluation set disagree on score orientation");
  }
  // Independent restatement of the orientation and tie rules.
  const bool higher_is_positive =
      (set.score_polarity == polarity::higher_bonafide) ==
      (set.positive_class == class_label::bonafide);
  const double factor = higher_is_positive ? 1.0 : -1.0;

  struct tally {
    std::int64_t n = 0;         // trials in the group
    std::int64_t yhat1 = 0;     // predicted positive
    std::int64_t y1 = 0;        // truth positive
    std::int64_t y1_yhat1 = 0;  // truth positive and predicted positive
  };
  std::map<std::string, tally> tallies;
  for (const scored_trial& r : set.records) {
    tally& t = tallies[r.trial.group];
    const bool pred = factor * r.score >= op.threshold;
    const bool truth = r.trial.label == set.positive_class;
    t.n += 1;
    t.yhat1 += pred ? 1 : 0;
    t.y1 += truth ? 1 : 0;
    t.y1_yhat1 += (pred && truth) ? 1 : 0;
  }
  const auto it_a = tallies.find(opt.group_pair.first);
  const auto it_b = tallies.find(opt.group_pair.second);
  if (it_a == tallies.end()) {
    raise(errc::missing_group, "group '" + opt.group_pair.first + "' absent");
  }
  if (it_b == tallies.end()) {
    raise(errc::missing_group, "group '" + opt.group_pair.second + "' absent");
  }
  const tally ta = it_a->second;
  const tally tb = it_b->second;

  // Conditional-frequency estimate of one metric over one group's tally.
  auto estimate = [&](fairness_metric metric, const tally& t,
                      const std::string& group) {
    group_metric_value v;
    v.metric = metric;
    v.group = group;
    const std::int64_t fp = t.yhat1 - t.y1_yhat1;  // predicted + among truth -
    const std::int64_t fn = t.y1 - t.y1_yhat1;     // predicted - among truth +
    const std::int64_t n_neg = t.n - t.y1;
    auto proportion = [&v](std::int64_t num, std::int64_t den) {
      if (den > 0) {
        v.value = static_cast<double>(num) / static_cast<double>(den);
        v.defined = true;
        v.num = num;
        v.den = den;
        v.has_backing = true;
      }
    };
    switch (metric) {
      case fairness_metric::statistical_parity:
        proportion(t.yhat1, t.n);  // P(Yhat=1 | G=g)
        break;
      case fairness_metric::equal_opportunity:
        proportion(t.y1_yhat1, t.y1);  // P(Yhat=1 | Y=1, G=g)
        break;
      case fairness_metric::equality_of_odds:
        if (opt.eo == eo_variant::fpr_only) {
          proportion(fp, n_neg);  // P(Yhat=1 | Y=0, G=g)
        } else if (t.y1 > 0 && n_neg > 0) {
          const double tpr = static_cast<double>(t.y1_yhat1) /
                             static_cast<double>(t.y1);
          const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
          v.value = 0.5 * (tpr + fpr);
          v.defined = true;
        }
        break;
      case fairness_metric::predictive_parity:
        proportion(t.y1_yhat1, t.yhat1);  // P(Y=1 | Yhat=1, G=g)
        break;
      case fairness_metric::treatment_equality:
        if (opt.te == te_variant::count_ratio) {
          if (fn > 0) {
            v.value = static_cast<double>(fp) / static_cast<double>(fn);
            v.defined = true;
          }
        } else if (n_neg > 0 && t.y1 > 0 && fn > 0) {
          const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
          const double fnr = static_cast<double>(fn) / static_cast<double>(t.y1);
          v.value = fpr / fnr;
          v.defined = true;
        }
        break;
    }
    return v;
  };

  // This path's own metric -> proportion-sample mapping.
  auto samples_for = [&](fairness_metric metric, const tally& t)
      -> std::optional<proportion_sample> {
    const std::int64_t fp = t.yhat1 - t.y1_yhat1;
    const std::int64_t fn = t.y1 - t.y1_yhat1;
    std::int64_t k = 0, n = 0;
    switch (metric) {
      case fairness_metric::statistical_parity: k = t.yhat1; n = t.n; break;
      case fairness_metric::equal_opportunity: k = t.y1_yhat1; n = t.y1; break;
      case fairness_metric::equality_of_odds:
        if (opt.eo == eo_variant::tpr_fpr_mean) return std::nullopt;
        k = fp;
        n = t.n - t.y1;
        break;
      case fairness_metric::predictive_parity: k = t.y1_yhat1; n = t.yhat1; break;
      case fairness_metric::treatment_equality: k = fp; n = fp + fn; break;
    }
    if (n < 1) return std::nullopt;
    return proportion_sample{k, n};
  };

  auto counts_from = [](const tally& t) {
    confusion_counts cc;
    cc.tp = t.y1_yhat1;
    cc.fp = t.yhat1 - t.y1_yhat1;
    cc.fn = t.y1 - t.y1_yhat1;
    cc.tn = t.n - t.yhat1 - cc.fn;
    return cc;
  };

  std::vector<fairness_row> rows;
  rows.reserve(kMetricOrder.size());
  for (fairness_metric metric : kMetricOrder) {
    fairness_row row;
    row.metric = metric;
    row.first = estimate(metric, ta, opt.group_pair.first);
    row.second = estimate(metric, tb, opt.group_pair.second);
    row.cc_first = counts_from(ta);
    row.cc_second = counts_from(tb);
    if (row.first.defined && row.second.defined) {
      row.diff = row.first.value - row.second.value;
      row.diff_defined = true;
      const auto sa = samples_for(metric, ta);
      const auto sb = samples_for(metric, tb);
      if (sa.has_value() && sb.has_value()) {
        row.test = two_proportion_z(*sa, *sb);
        row.tested = true;
      }
    }
    rows.push_back(std::move(row));
  }

  // This path's own Holm application over its tested rows.
  std::map<int, std::vector<std::size_t>> families;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].tested) continue;
    families[opt.family == holm_family::per_run ? 0
                                                : static_cast<int>(rows[i].metric)]
        .push_back(i);
  }
  for (const auto& [key, indices] : families) {
    std::vector<double> p;
    for (std::size_t i : indices) p.push_back(rows[i].test.p_two_sided);
    const holm_outcome outcome = holm_correct(p, opt.alpha);
    for (std::size_t j = 0; j < indices.size(); ++j) {
      rows[indices[j]].p_holm = outcome.p_adjusted[j];
      rows[indices[j]].significant = outcome.reject[j];
    }
  }
  return rows;
}

namespace detail {

inline bool close_or_equal(double a, double b) noexcept {
  if (a == b) return true;
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= 1e-12 * scale;
}

inline std::optional<std::string> describe_value_mismatch(
    const group_metric_value& a, const group_metric_value& b) {
  if (a.metric != b.metric || a.group != b.group) return "identity differs";
  if (a.defined != b.defined) return "defined flag differs";
  if (a.has_backing != b.has_backing) return "backing presence differs";
  if (a.has_backing && (a.num != b.num || a.den != b.den)) {
    return "integer backing differs (" + std::to_string(a.num) + "/" +
           std::to_string(a.den) + " vs " + std::to_string(b.num) + "/" +
           std::to_string(b.den) + ")";
  }
  if (a.defined && !close_or_equal(a.value, b.value)) {
    return "value differs (" + std::to_string(a.value) + " vs " +
           std::to_string(b.value) + ")";
  }
  return std::nullopt;
}

}  // namespace detail

// Compares the outputs of the two paths; any disagreement is an
// implementation bug, never a data problem.
inline void expect_cross_check_equal(const std::vector<fairness_row>& a,
                                     const std::vector<fairness_row>& b) {
  auto fail = [](const fairness_row& row, const std::string& what) {
    raise(errc::cross_check_mismatch,
          std::string(to_string(row.metric)) + ": " + what);
  };
  if (a.size() != b.size()) {
    raise(errc::cross_check_mismatch, "row counts differ");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const fairness_row& ra = a[i];
    const fairness_row& rb = b[i];
    if (ra.metric != rb.metric) fail(ra, "row order differs");
    if (auto why = detail::describe_value_mismatch(ra.first, rb.first)) {
      fail(ra, "group " + ra.first.group + ": " + *why);
    }
    if (auto why = detail::describe_value_mismatch(ra.second, rb.second)) {
      fail(ra, "group " + ra.second.group + ": " + *why);
    }
    if (!(ra.cc_first == rb.cc_first) || !(ra.cc_second == rb.cc_second)) {
      fail(ra, "confusion counts differ");
    }
    if (ra.diff_defined != rb.diff_defined) fail(ra, "diff definedness differs");
    if (ra.diff_defined && !detail::close_or_equal(ra.diff, rb.diff)) {
      fail(ra, "diff differs");
    }
    if (ra.tested != rb.tested) fail(ra, "tested flag differs");
    if (ra.tested) {
      if (ra.test.defined != rb.test.defined) fail(ra, "test definedness differs");
      if (!detail::close_or_equal(ra.test.z, rb.test.z)) fail(ra, "z differs");
      if (!detail::close_or_equal(ra.test.p_two_sided, rb.test.p_two_sided)) {
        fail(ra, "raw p differs");
      }
      if (!detail::close_or_equal(ra.p_holm, rb.p_holm)) fail(ra, "Holm p differs");
      if (ra.significant != rb.significant) fail(ra, "significance flag differs");
    }
  }
}

}  // namespace fairdet

#endif  // FAIRDET_FAIRNESS_HPP_
