// fairdet/scoring.hpp
//
// DET statistics, the EER operating point, and thresholded hard decisions
// applied uniformly across subsets.
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

#ifndef FAIRDET_SCORING_HPP_
#define FAIRDET_SCORING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fairdet/protocol.hpp"

namespace fairdet {

// Error trade-off sweep over ascending distinct oriented scores, with the
// -inf / +inf limits stored explicitly as sentinel endpoints. At threshold t
// the decision rule is: positive iff oriented score >= t. Rates are exact
// integer counts over integer totals, evaluated in floating point, so fpr is
// non-increasing and fnr non-decreasing along the sweep.
struct det_curve {
  std::vector<double> thresholds;
  std::vector<double> fpr;
  std::vector<double> fnr;
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
};

enum class split_tag : std::uint8_t { dev, eval, custom };

constexpr std::string_view to_string(split_tag tag) noexcept {
  switch (tag) {
    case split_tag::dev: return "dev";
    case split_tag::eval: return "eval";
    case split_tag::custom: return "custom";
  }
  return "custom";
}

// The single decision threshold used for all hard decisions in a run, plus
// provenance. threshold is in oriented-score space. Applying it back to the
// derivation set yields |FPR - FNR| <= crossing_gap.
struct operating_point {
  double threshold = 0.0;
  double eer_at_derivation = 0.0;
  split_tag source_split = split_tag::custom;
  polarity score_polarity = polarity::higher_bonafide;
  double crossing_gap = 0.0;
};

// Per-trial predicted labels, aligned to an evaluation_set's record order.
struct decision_vector {
  std::vector<bool> positive;

  std::size_t size() const noexcept { return positive.size(); }
};

namespace detail {

// (oriented score, is_positive) pairs sorted ascending by score.
inline std::vector<std::pair<double, bool>> sorted_oriented(
    const evaluation_set& set, std::int64_t& n_pos, std::int64_t& n_neg) {
  const double factor =
      orientation_factor(set.score_polarity, set.positive_class);
  std::vector<std::pair<double, bool>> items;
  items.reserve(set.records.size());
  n_pos = n_neg = 0;
  for (const scored_trial& r : set.records) {
    const bool is_pos = r.trial.label == set.positive_class;
    (is_pos ? n_pos : n_neg) += 1;
    items.emplace_back(factor * r.score, is_pos);
  }
  std::sort(items.begin(), items.end());
  return items;
}

}  // namespace detail

// Single sort plus one linear sweep. Requires at least one trial of each
// class.
inline det_curve compute_det(const evaluation_set& set) {
  std::int64_t n_pos = 0, n_neg = 0;
  const auto items = detail::sorted_oriented(set, n_pos, n_neg);
  if (n_pos < 1 || n_neg < 1) {
    raise(errc::degenerate_set,
          "need at least one trial of each class (got " +
              std::to_string(n_pos) + " positive, " + std::to_string(n_neg) +
              " negative)");
  }

  det_curve curve;
  curve.n_pos = n_pos;
  curve.n_neg = n_neg;
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < items.size(); ++i) {
    distinct += items[i].first != items[i - 1].first;
  }
  curve.thresholds.reserve(distinct + 2);
  curve.fpr.reserve(distinct + 2);
  curve.fnr.reserve(distinct + 2);

  const double inf = std::numeric_limits<double>::infinity();
  curve.thresholds.push_back(-inf);  // everything decides positive
  curve.fpr.push_back(1.0);
  curve.fnr.push_back(0.0);

  // At threshold v: fn = positives strictly below v, fp = negatives at or
  // above v.
  std::int64_t pos_below = 0, neg_below = 0;
  std::size_t i = 0;
  while (i < items.size()) {
    const double v = items[i].first;
    curve.thresholds.push_back(v);
    curve.fpr.push_back(static_cast<double>(n_neg - neg_below) /
                        static_cast<double>(n_neg));
    curve.fnr.push_back(static_cast<double>(pos_below) /
                        static_cast<double>(n_pos));
    while (i < items.size() && items[i].first == v) {
      (items[i].second ? pos_below : neg_below) += 1;
      ++i;
    }
  }

  curve.thresholds.push_back(inf);  // everything decides negative
  curve.fpr.push_back(0.0);
  curve.fnr.push_back(1.0);
  return curve;
}

struct eer_result {
  double eer = 0.0;
  double threshold = 0.0;
  // |FPR - FNR| actually achievable when the threshold is applied back to
  // the derivation set; 0 at an exact crossing.
  double crossing_gap = 0.0;
};

// Finds the sweep points bracketing the sign change of (fpr - fnr) and
// linearly interpolates both the common rate and the threshold. An exact
// crossing is returned directly; ties resolve to the smallest crossing
// threshold. The sign test runs on exact integer counts, never on rounded
// rates.
inline eer_result compute_eer(const det_curve& curve) {
  const std::size_t n = curve.thresholds.size();
  if (n < 2 || curve.n_pos < 1 || curve.n_neg < 1) {
    raise(errc::degenerate_set, "DET curve has no sweep points");
  }
  // diff_sign(k) = sign of fpr_k - fnr_k via fp_k * n_pos - fn_k * n_neg.
  auto diff_exact = [&](std::size_t k) -> std::int64_t {
    const std::int64_t fp = std::llround(curve.fpr[k] * static_cast<double>(curve.n_neg));
    const std::int64_t fn = std::llround(curve.fnr[k] * static_cast<double>(curve.n_pos));
    return fp * curve.n_pos - fn * curve.n_neg;
  };

  std::size_t cross = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (diff_exact(k) <= 0) {
      cross = k;
      break;
    }
  }
  // The sweep ends at (fpr 0, fnr 1), so a non-positive diff always exists,
  // and the first point (all-positive decisions) has diff +1.
  eer_result out;
  if (cross == n || cross == 0) {
    raise(errc::degenerate_set, "DET curve lacks a valid crossing");
  }
  if (diff_exact(cross) == 0) {
    out.eer = 0.5 * (curve.fpr[cross] + curve.fnr[cross]);
    out.threshold = curve.thresholds[cross];
    out.crossing_gap = std::abs(curve.fpr[cross] - curve.fnr[cross]);
    return out;
  }

  const std::size_t a = cross - 1, b = cross;
  const double diff_a = curve.fpr[a] - curve.fnr[a];  // > 0
  const double diff_b = curve.fpr[b] - curve.fnr[b];  // < 0
  const double lambda = diff_a / (diff_a - diff_b);
  const double eer_from_fpr = curve.fpr[a] + lambda * (curve.fpr[b] - curve.fpr[a]);
  const double eer_from_fnr = curve.fnr[a] + lambda * (curve.fnr[b] - curve.fnr[a]);
  out.eer = 0.5 * (eer_from_fpr + eer_from_fnr);

  if (std::isinf(curve.thresholds[b])) {
    // Only reachable when ties push the crossing past the largest score;
    // one ulp above it makes every decision negative, the closest the
    // finite grid gets to the interpolated point.
    out.threshold = std::nextafter(curve.thresholds[a],
                                   std::numeric_limits<double>::infinity());
  } else {
    out.threshold = curve.thresholds[a] +
                    lambda * (curve.thresholds[b] - curve.thresholds[a]);
  }
  // A threshold strictly inside (t_a, t_b] realizes point b's rates; guard
  // against the interpolated value rounding onto t_a as well.
  out.crossing_gap = std::max(std::abs(diff_a), std::abs(diff_b));
  return out;
}

// Trapezoidal area under TPR vs FPR; equals the Mann-Whitney pair statistic
// with half credit for ties.
inline double compute_auc(const det_curve& curve) {
  const std::size_t n = curve.thresholds.size();
  if (n < 2) raise(errc::degenerate_set, "DET curve has no sweep points");
  double area = 0.0;
  // Walk thresholds descending so fpr ascends 0 -> 1.
  for (std::size_t k = n - 1; k > 0; --k) {
    const double x0 = curve.fpr[k], x1 = curve.fpr[k - 1];
    const double y0 = 1.0 - curve.fnr[k], y1 = 1.0 - curve.fnr[k - 1];
    area += (x1 - x0) * 0.5 * (y0 + y1);
  }
  return area;
}

// Derives the run's operating point from a derivation split.
inline operating_point derive_operating_point(const evaluation_set& set,
                                              split_tag source) {
  const eer_result r = compute_eer(compute_det(set));
  operating_point op;
  op.threshold = r.threshold;
  op.eer_at_derivation = r.eer;
  op.source_split = source;
  op.score_polarity = set.score_polarity;
  op.crossing_gap = r.crossing_gap;
  return op;
}

// Fixed tie rule: a score exactly at the threshold decides positive.
inline decision_vector apply_threshold(const evaluation_set& set,
                                       const operating_point& op) {
  if (op.score_polarity != set.score_polarity) {
    raise(errc::polarity_mismatch,
          "operating point and evaluation set disagree on score orientation");
  }
  const double factor =
      orientation_factor(set.score_polarity, set.positive_class);
  decision_vector out;
  out.positive.resize(set.records.size());
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    out.positive[i] = factor * set.records[i].score >= op.threshold;
  }
  return out;
}

// DET curve as CSV for external plotting: threshold,fpr,fnr with exact
// shortest-round-trip numbers.
inline std::string render_det_csv(const det_curve& curve) {
  std::string out = "threshold,fpr,fnr\n";
  auto fmt = [](double v) {
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    return format_score_exact(v);
  };
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    out += fmt(curve.thresholds[k]);
    out += ',';
    out += format_score_exact(curve.fpr[k]);
    out += ',';
    out += format_score_exact(curve.fnr[k]);
    out += '\n';
  }
  return out;
}

}  // namespace fairdet

#endif  // FAIRDET_SCORING_HPP_
