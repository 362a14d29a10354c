// fairdet/metrics.hpp
//
// Per-group confusion counts and the five group-fairness metrics, each with
// exact integer backings where the metric is a plain proportion.
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

#ifndef FAIRDET_METRICS_HPP_
#define FAIRDET_METRICS_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "fairdet/scoring.hpp"

namespace fairdet {

struct confusion_counts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const noexcept { return tp + fp + tn + fn; }

  friend bool operator==(const confusion_counts&, const confusion_counts&) = default;
};

enum class fairness_metric : std::uint8_t {
  statistical_parity,
  equal_opportunity,
  equality_of_odds,
  predictive_parity,
  treatment_equality,
};

constexpr std::string_view to_string(fairness_metric m) noexcept {
  switch (m) {
    case fairness_metric::statistical_parity: return "statistical_parity";
    case fairness_metric::equal_opportunity: return "equal_opportunity";
    case fairness_metric::equality_of_odds: return "equality_of_odds";
    case fairness_metric::predictive_parity: return "predictive_parity";
    case fairness_metric::treatment_equality: return "treatment_equality";
  }
  return "unknown";
}

// Equality of odds: group FPR alone, or the mean of TPR and FPR.
enum class eo_variant : std::uint8_t { fpr_only, tpr_fpr_mean };

// Treatment equality: FP/FN counts, or FPR/FNR rates.
enum class te_variant : std::uint8_t { count_ratio, rate_ratio };

constexpr std::string_view to_string(eo_variant v) noexcept {
  return v == eo_variant::fpr_only ? "fpr-only" : "tpr-fpr-mean";
}

constexpr std::string_view to_string(te_variant v) noexcept {
  return v == te_variant::count_ratio ? "count-ratio" : "rate-ratio";
}

// One metric evaluated on one group's confusion cell. Undefined exactly when
// the metric's denominator is zero; an undefined value is NaN, never +-inf.
// Proportion-form metrics carry their integer backing (value == num / den
// exactly); ratio-form treatment equality and the TPR/FPR mean do not.
struct group_metric_value {
  fairness_metric metric = fairness_metric::statistical_parity;
  std::string group;
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
  std::int64_t num = 0;
  std::int64_t den = 0;
  bool has_backing = false;
};

namespace detail {

inline group_metric_value proportion_value(fairness_metric metric,
                                           std::int64_t num, std::int64_t den) {
  group_metric_value v;
  v.metric = metric;
  if (den > 0) {
    v.value = static_cast<double>(num) / static_cast<double>(den);
    v.defined = true;
    v.num = num;
    v.den = den;
    v.has_backing = true;
  }
  return v;
}

}  // namespace detail

// Exact integer tally of decisions against ground truth. "Positive" is the
// set's configured positive class.
inline confusion_counts confusion(const evaluation_set& set,
                                  const decision_vector& decisions) {
  if (decisions.positive.size() != set.records.size()) {
    raise(errc::length_mismatch,
          "decision vector has " + std::to_string(decisions.positive.size()) +
              " entries for " + std::to_string(set.records.size()) + " trials");
  }
  confusion_counts cc;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const bool truth = set.records[i].trial.label == set.positive_class;
    const bool pred = decisions.positive[i];
    if (truth) {
      (pred ? cc.tp : cc.fn) += 1;
    } else {
      (pred ? cc.fp : cc.tn) += 1;
    }
  }
  return cc;
}

// P(predicted positive): (tp+fp) / total.
inline group_metric_value statistical_parity(const confusion_counts& cc) {
  return detail::proportion_value(fairness_metric::statistical_parity,
                                  cc.tp + cc.fp, cc.total());
}

// True positive rate: tp / (tp+fn).
inline group_metric_value equal_opportunity(const confusion_counts& cc) {
  return detail::proportion_value(fairness_metric::equal_opportunity, cc.tp,
                                  cc.tp + cc.fn);
}

// fpr_only: fp / (fp+tn). tpr_fpr_mean: (TPR + FPR) / 2, which has no single
// proportion backing.
inline group_metric_value equality_of_odds(const confusion_counts& cc,
                                           eo_variant variant) {
  if (variant == eo_variant::fpr_only) {
    return detail::proportion_value(fairness_metric::equality_of_odds, cc.fp,
                                    cc.fp + cc.tn);
  }
  group_metric_value v;
  v.metric = fairness_metric::equality_of_odds;
  const std::int64_t pos = cc.tp + cc.fn;
  const std::int64_t neg = cc.fp + cc.tn;
  if (pos > 0 && neg > 0) {
    const double tpr = static_cast<double>(cc.tp) / static_cast<double>(pos);
    const double fpr = static_cast<double>(cc.fp) / static_cast<double>(neg);
    v.value = 0.5 * (tpr + fpr);
    v.defined = true;
  }
  return v;
}

// Precision of positive predictions: tp / (tp+fp).
inline group_metric_value predictive_parity(const confusion_counts& cc) {
  return detail::proportion_value(fairness_metric::predictive_parity, cc.tp,
                                  cc.tp + cc.fp);
}

// count_ratio: fp / fn. rate_ratio: FPR / FNR. Both are ratios, not
// proportions, so neither carries a proportion backing; a zero denominator
// yields Undefined, never +-inf.
inline group_metric_value treatment_equality(const confusion_counts& cc,
                                             te_variant variant) {
  group_metric_value v;
  v.metric = fairness_metric::treatment_equality;
  if (variant == te_variant::count_ratio) {
    if (cc.fn > 0) {
      v.value = static_cast<double>(cc.fp) / static_cast<double>(cc.fn);
      v.defined = true;
    }
    return v;
  }
  const std::int64_t neg = cc.fp + cc.tn;
  const std::int64_t pos = cc.tp + cc.fn;
  if (neg > 0 && pos > 0 && cc.fn > 0) {
    const double fpr = static_cast<double>(cc.fp) / static_cast<double>(neg);
    const double fnr = static_cast<double>(cc.fn) / static_cast<double>(pos);
    v.value = fpr / fnr;
    v.defined = true;
  }
  return v;
}

}  // namespace fairdet

#endif  // FAIRDET_METRICS_HPP_
