// Protocol parsing/joining and DET/EER scoring tests.
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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "fairdet/fairdet.hpp"
#include "test_util.hpp"

using namespace fairdet;
using testutil::make_set;
using testutil::row;

namespace {

errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  FAIL("expected a fairdet::error");
  return errc::io_error;
}

}  // namespace

// ---------------------------------------------------------------------------
// [protocol]
// ---------------------------------------------------------------------------

TEST_CASE("protocol line maps columns by layout", "[protocol]") {
  const auto records = parse_protocol("SPK01 U0001 F bonafide\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].utt_id == "U0001");
  CHECK(records[0].speaker_id == "SPK01");
  CHECK(records[0].group == "F");
  CHECK(records[0].label == class_label::bonafide);
}

TEST_CASE("protocol accepts custom column order and delimiter", "[protocol]") {
  column_layout layout;
  layout.utt = 0;
  layout.label = 1;
  layout.gender = 2;
  layout.speaker = 3;
  layout.delimiter = ',';
  const auto records = parse_protocol("U1,spoof,m,SPKX\n", layout);
  REQUIRE(records.size() == 1);
  CHECK(records[0].utt_id == "U1");
  CHECK(records[0].speaker_id == "SPKX");
  CHECK(records[0].group == "M");  // tokens are upper-cased
  CHECK(records[0].label == class_label::spoof);
}

TEST_CASE("protocol tolerates comments, blanks, CRLF, and extra columns",
          "[protocol]") {
  const std::string text =
      "# header comment\n"
      "\n"
      "SPK01 U0001 F bonafide extra stuff\r\n"
      "  # indented comment\n"
      "SPK02\tU0002\tM\tSPOOF\n";
  const auto records = parse_protocol(text);
  REQUIRE(records.size() == 2);
  CHECK(records[0].utt_id == "U0001");
  CHECK(records[1].utt_id == "U0002");
  CHECK(records[1].label == class_label::spoof);
}

TEST_CASE("protocol errors carry line numbers and codes", "[protocol]") {
  CHECK(code_of([] { parse_protocol("SPK U1 F bonafide\nSPK U1 F spoof\n"); }) ==
        errc::duplicate_utt);
  CHECK_THROWS_WITH(parse_protocol("SPK U0001 F bonafide\nSPK U0001 M spoof\n"),
                    Catch::Matchers::ContainsSubstring("U0001"));
  CHECK(code_of([] { parse_protocol("SPK U1 F\n"); }) == errc::malformed_row);
  CHECK_THROWS_WITH(parse_protocol("SPK U1 F bonafide\nSPK U2 F\n"),
                    Catch::Matchers::ContainsSubstring("line 2"));
  CHECK(code_of([] { parse_protocol("SPK U1 F genuine\n"); }) ==
        errc::malformed_row);
  CHECK(code_of([] { parse_protocol("# only comments\n\n"); }) ==
        errc::empty_file);
  CHECK(code_of([] { parse_protocol(""); }) == errc::empty_file);
}

TEST_CASE("protocol accepts unknown gender tokens as their own group",
          "[protocol]") {
  const auto records = parse_protocol("S U1 x spoof\nS2 U2 F bonafide\n");
  REQUIRE(records.size() == 2);
  CHECK(records[0].group == "X");
}

TEST_CASE("protocol custom label tokens extend the mapping", "[protocol]") {
  column_layout layout;
  layout.label_tokens.emplace_back("genuine", class_label::bonafide);
  layout.label_tokens.emplace_back("fake", class_label::spoof);
  const auto records = parse_protocol("S U1 F GENUINE\nS U2 M fake\n", layout);
  REQUIRE(records.size() == 2);
  CHECK(records[0].label == class_label::bonafide);
  CHECK(records[1].label == class_label::spoof);
}

TEST_CASE("score lines parse id and value", "[protocol]") {
  const auto records = parse_scores("U0001 0.73\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].utt_id == "U0001");
  CHECK(records[0].score == 0.73);
}

TEST_CASE("score parsing rejects bad rows", "[protocol]") {
  CHECK(code_of([] { parse_scores("U0001 nan\n"); }) == errc::non_finite_score);
  CHECK(code_of([] { parse_scores("U0001 inf\n"); }) == errc::non_finite_score);
  CHECK(code_of([] { parse_scores("U0001 -inf\n"); }) == errc::non_finite_score);
  CHECK(code_of([] { parse_scores("U0001\n"); }) == errc::malformed_row);
  CHECK(code_of([] { parse_scores("U0001 0.5 0.6\n"); }) == errc::malformed_row);
  CHECK(code_of([] { parse_scores("U0001 abc\n"); }) == errc::malformed_row);
  CHECK(code_of([] { parse_scores("U1 0.5\nU1 0.5\n"); }) == errc::duplicate_utt);
  CHECK(code_of([] { parse_scores("\n# none\n"); }) == errc::empty_file);
}

TEST_CASE("score parsing accepts signs and exponents", "[protocol]") {
  const auto records = parse_scores("U1 -0.25\nU2 +3\nU3 1e-3\nU4 2.5E+2\n");
  REQUIRE(records.size() == 4);
  CHECK(records[0].score == -0.25);
  CHECK(records[1].score == 3.0);
  CHECK(records[2].score == 1e-3);
  CHECK(records[3].score == 250.0);
}

TEST_CASE("logit conversion is symmetric, exact, and overflow-safe",
          "[protocol]") {
  CHECK(logits_to_score(0.0, 0.0) == 0.5);
  CHECK_THAT(logits_to_score(0.0, std::log(3.0)),
             Catch::Matchers::WithinAbs(0.75, 1e-15));
  // Huge logits must not overflow: value depends only on the difference.
  const double v = logits_to_score(1000.0, 1001.0);
  CHECK_THAT(v, Catch::Matchers::WithinAbs(0.7310585786300049, 1e-15));
  CHECK(std::isfinite(v));
  CHECK(code_of([] {
          logits_to_score(std::numeric_limits<double>::infinity(), 0.0);
        }) == errc::non_finite_input);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logit(-700.0, 700.0);
  for (int i = 0; i < 200; ++i) {
    const double a = logit(rng), b = logit(rng);
    CHECK_THAT(logits_to_score(a, b) + logits_to_score(b, a),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("join matches every trial to exactly one score", "[protocol]") {
  const auto trials = parse_protocol(
      "S1 U3 F bonafide\nS2 U1 M spoof\nS3 U2 F spoof\n");
  const auto scores = parse_scores("U1 0.9\nU2 0.5\nU3 0.1\n");
  join_summary summary;
  const evaluation_set set =
      join_trials(trials, scores, polarity::higher_bonafide,
                  class_label::spoof, false, &summary);
  REQUIRE(set.size() == 3);
  // Sorted by utt_id regardless of input order.
  CHECK(set.records[0].trial.utt_id == "U1");
  CHECK(set.records[1].trial.utt_id == "U2");
  CHECK(set.records[2].trial.utt_id == "U3");
  CHECK(set.records[0].score == 0.9);
  CHECK(summary.n_total == 3);
  CHECK(summary.per_group.at("F") == 2);
  CHECK(summary.per_group.at("M") == 1);
  CHECK(summary.n_bonafide == 1);
  CHECK(summary.n_spoof == 2);
}

TEST_CASE("join reports missing and orphan scores", "[protocol]") {
  const auto trials = parse_protocol("S U1 F bonafide\nS U2 M spoof\nS U3 F spoof\n");
  const auto two = parse_scores("U1 0.9\nU2 0.5\n");
  CHECK(code_of([&] {
          join_trials(trials, two, polarity::higher_bonafide, class_label::spoof);
        }) == errc::missing_score);
  CHECK_THROWS_WITH(
      join_trials(trials, two, polarity::higher_bonafide, class_label::spoof),
      Catch::Matchers::ContainsSubstring("U3"));

  const auto extra = parse_scores("U1 0.9\nU2 0.5\nU3 0.2\nU9 0.4\n");
  CHECK(code_of([&] {
          join_trials(trials, extra, polarity::higher_bonafide, class_label::spoof);
        }) == errc::orphan_score);
  join_summary summary;
  const evaluation_set set =
      join_trials(trials, extra, polarity::higher_bonafide, class_label::spoof,
                  /*allow_orphans=*/true, &summary);
  CHECK(set.size() == 3);
  REQUIRE(summary.orphan_utts.size() == 1);
  CHECK(summary.orphan_utts[0] == "U9");
}

TEST_CASE("join is invariant under input permutations", "[protocol]") {
  std::mt19937_64 rng(11);
  auto trials = parse_protocol(
      "S1 U1 F bonafide\nS2 U2 M spoof\nS3 U3 F spoof\nS4 U4 M bonafide\n"
      "S5 U5 X spoof\n");
  auto scores = parse_scores("U1 0.1\nU2 0.2\nU3 0.3\nU4 0.4\nU5 0.5\n");
  const evaluation_set base = join_trials(trials, scores,
                                          polarity::higher_bonafide,
                                          class_label::spoof);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(trials.begin(), trials.end(), rng);
    std::shuffle(scores.begin(), scores.end(), rng);
    const evaluation_set shuffled = join_trials(
        trials, scores, polarity::higher_bonafide, class_label::spoof);
    CHECK(shuffled.records == base.records);
  }
}

TEST_CASE("partition splits by group and preserves conventions", "[protocol]") {
  const evaluation_set set = make_set(
      {row{"U1", "F", class_label::bonafide, 0.1},
       row{"U2", "F", class_label::spoof, 0.2},
       row{"U3", "M", class_label::bonafide, 0.3},
       row{"U4", "M", class_label::spoof, 0.4},
       row{"U5", "M", class_label::spoof, 0.5}},
      polarity::higher_spoof, class_label::bonafide);
  const group_partition parts = partition_by_group(set);
  REQUIRE(parts.by_group.size() == 2);
  CHECK(parts.by_group.at("F").size() == 2);
  CHECK(parts.by_group.at("M").size() == 3);
  CHECK(parts.all.size() == 5);
  CHECK(parts.by_group.at("F").score_polarity == polarity::higher_spoof);
  CHECK(parts.by_group.at("F").positive_class == class_label::bonafide);

  std::size_t total = 0;
  for (const auto& [group, subset] : parts.by_group) total += subset.size();
  CHECK(total == parts.all.size());
}

TEST_CASE("single-group partition equals the whole set", "[protocol]") {
  const evaluation_set set = make_set({row{"U1", "F", class_label::spoof, 1.0},
                                       row{"U2", "F", class_label::bonafide, 0.0}});
  const group_partition parts = partition_by_group(set);
  REQUIRE(parts.by_group.size() == 1);
  CHECK(parts.by_group.at("F").records == parts.all.records);
}

TEST_CASE("canonical TSV round-trips exactly", "[protocol]") {
  const evaluation_set set = make_set(
      {row{"U1", "F", class_label::bonafide, 0.125},
       row{"U2", "M", class_label::spoof, -3.0},
       row{"U3", "X", class_label::spoof, 0.1}},
      polarity::higher_bonafide, class_label::spoof);
  const std::string text = render_canonical_tsv(set);
  CHECK(text.substr(0, kCanonicalTsvHeader.size()) == kCanonicalTsvHeader);
  const evaluation_set back = parse_canonical_tsv(
      text, polarity::higher_bonafide, class_label::spoof);
  CHECK(back.records == set.records);
  CHECK(render_canonical_tsv(back) == text);

  CHECK(code_of([&] {
          parse_canonical_tsv("not a header\n", polarity::higher_bonafide,
                              class_label::spoof);
        }) == errc::malformed_row);
}

TEST_CASE("generated protocols round-trip through the parsers", "[protocol]") {
  sim_config config;
  config.seed = 42;
  config.models = {group_class_model{"F", class_label::bonafide, 2500, 1.0, 1.0},
                   group_class_model{"F", class_label::spoof, 2500, -1.0, 1.0},
                   group_class_model{"M", class_label::bonafide, 2500, 1.0, 1.0},
                   group_class_model{"M", class_label::spoof, 2500, -1.0, 1.0}};
  const sim_output out = generate(config);

  const auto trials = parse_protocol(out.protocol_text);
  const auto scores = parse_scores(out.score_text);
  REQUIRE(trials.size() == 10000);
  REQUIRE(scores.size() == 10000);

  join_summary summary;
  const evaluation_set set =
      join_trials(trials, scores, polarity::higher_bonafide,
                  class_label::spoof, false, &summary);
  CHECK(summary.per_group.at("F") == 5000);
  CHECK(summary.per_group.at("M") == 5000);
  CHECK(summary.n_bonafide == 5000);
  CHECK(summary.n_spoof == 5000);

  // Canonical TSV round trip over the joined set.
  const evaluation_set back = parse_canonical_tsv(
      render_canonical_tsv(set), polarity::higher_bonafide, class_label::spoof);
  CHECK(back.records == set.records);
}

// ---------------------------------------------------------------------------
// [scoring]
// ---------------------------------------------------------------------------

namespace {

evaluation_set two_class_set(const std::vector<double>& spoof_scores,
                             const std::vector<double>& bona_scores,
                             polarity pol = polarity::higher_spoof) {
  std::vector<row> rows;
  int i = 0;
  for (double s : spoof_scores) {
    rows.push_back(row{testutil::utt_name(i++), i % 2 ? "F" : "M",
                       class_label::spoof, s});
  }
  for (double s : bona_scores) {
    rows.push_back(row{testutil::utt_name(i++), i % 2 ? "F" : "M",
                       class_label::bonafide, s});
  }
  return make_set(std::move(rows), pol, class_label::spoof);
}

// Naive recount oracle: per stored threshold, re-derive fp/fn by scanning
// every trial. Costs O(n * t); use on small sets only.
void check_curve_against_recount(const det_curve& curve,
                                 const evaluation_set& set) {
  const double factor =
      orientation_factor(set.score_polarity, set.positive_class);
  REQUIRE(curve.thresholds.size() == curve.fpr.size());
  REQUIRE(curve.thresholds.size() == curve.fnr.size());
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    const double t = curve.thresholds[k];
    std::int64_t fp = 0, fn = 0, n_pos = 0, n_neg = 0;
    for (const scored_trial& r : set.records) {
      const bool is_positive = r.trial.label == set.positive_class;
      bool decided_positive;
      if (std::isinf(t)) {
        decided_positive = t < 0;  // -inf accepts everything, +inf nothing
      } else {
        decided_positive = factor * r.score >= t;
      }
      if (is_positive) {
        ++n_pos;
        if (!decided_positive) ++fn;
      } else {
        ++n_neg;
        if (decided_positive) ++fp;
      }
    }
    REQUIRE(curve.n_pos == n_pos);
    REQUIRE(curve.n_neg == n_neg);
    // Same integers, same division: the doubles must be identical.
    REQUIRE(curve.fpr[k] == static_cast<double>(fp) / static_cast<double>(n_neg));
    REQUIRE(curve.fnr[k] == static_cast<double>(fn) / static_cast<double>(n_pos));
  }
}

}  // namespace

TEST_CASE("orientation factor covers all four conventions", "[scoring]") {
  CHECK(orientation_factor(polarity::higher_bonafide, class_label::bonafide) == 1.0);
  CHECK(orientation_factor(polarity::higher_bonafide, class_label::spoof) == -1.0);
  CHECK(orientation_factor(polarity::higher_spoof, class_label::spoof) == 1.0);
  CHECK(orientation_factor(polarity::higher_spoof, class_label::bonafide) == -1.0);
}

TEST_CASE("perfectly separated scores give zero errors", "[scoring]") {
  const evaluation_set set = two_class_set({0.9, 0.8}, {0.1, 0.2});
  const det_curve curve = compute_det(set);
  CHECK(curve.n_pos == 2);
  CHECK(curve.n_neg == 2);

  // Hard decisions at threshold 0.5: no false positives, no false negatives.
  operating_point op;
  op.threshold = 0.5;
  op.score_polarity = set.score_polarity;
  const confusion_counts cc = confusion(set, apply_threshold(set, op));
  CHECK(cc.fp == 0);
  CHECK(cc.fn == 0);

  const eer_result eer = compute_eer(curve);
  CHECK(eer.eer == 0.0);
  CHECK(compute_auc(curve) == 1.0);
}

TEST_CASE("identical scores produce the degenerate sweep", "[scoring]") {
  const evaluation_set set = two_class_set({1.5, 1.5, 1.5}, {1.5, 1.5});
  const det_curve curve = compute_det(set);
  REQUIRE(curve.thresholds.size() == 3);  // -inf, 1.5, +inf
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    const bool all_positive = curve.fpr[k] == 1.0 && curve.fnr[k] == 0.0;
    const bool all_negative = curve.fpr[k] == 0.0 && curve.fnr[k] == 1.0;
    CHECK((all_positive || all_negative));
  }
  CHECK_THAT(compute_eer(curve).eer, Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("DET sentinels and monotonicity hold on random sets", "[scoring]") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pol = trial % 2 ? polarity::higher_spoof : polarity::higher_bonafide;
    const auto positive = trial % 3 ? class_label::spoof : class_label::bonafide;
    evaluation_set set = testutil::random_set(rng, 120, pol, positive);
    // random_set guarantees groups, not classes; patch in one of each.
    set.records[0].trial.label = class_label::spoof;
    set.records[1].trial.label = class_label::bonafide;

    const det_curve curve = compute_det(set);
    REQUIRE(curve.thresholds.size() >= 3);
    CHECK(curve.thresholds.front() == -std::numeric_limits<double>::infinity());
    CHECK(curve.thresholds.back() == std::numeric_limits<double>::infinity());
    CHECK(curve.fpr.front() == 1.0);
    CHECK(curve.fnr.front() == 0.0);
    CHECK(curve.fpr.back() == 0.0);
    CHECK(curve.fnr.back() == 1.0);
    for (std::size_t k = 1; k < curve.thresholds.size(); ++k) {
      CHECK(curve.thresholds[k - 1] < curve.thresholds[k]);
      CHECK(curve.fpr[k] <= curve.fpr[k - 1]);
      CHECK(curve.fnr[k] >= curve.fnr[k - 1]);
    }
    check_curve_against_recount(curve, set);
  }
}

TEST_CASE("DET requires both classes", "[scoring]") {
  CHECK(code_of([] {
          compute_det(make_set({row{"U1", "F", class_label::spoof, 1.0},
                                row{"U2", "M", class_label::spoof, 2.0}}));
        }) == errc::degenerate_set);
}

TEST_CASE("EER interpolates between bracketing sweep points", "[scoring]") {
  // diff = fpr - fnr walks 4/15 -> -1/15 between thresholds 2.5 and 3, so
  // lambda = 0.8: threshold 2.9, both interpolated rates 0.4.
  const evaluation_set set =
      two_class_set({1.0, 2.0, 3.0, 4.0, 5.0}, {0.5, 2.5, 3.5});
  const eer_result eer = compute_eer(compute_det(set));
  CHECK_THAT(eer.eer, Catch::Matchers::WithinAbs(0.4, 1e-12));
  CHECK_THAT(eer.threshold, Catch::Matchers::WithinAbs(2.9, 1e-12));
  CHECK_THAT(eer.crossing_gap, Catch::Matchers::WithinAbs(4.0 / 15.0, 1e-12));
}

TEST_CASE("EER returns exact crossings directly", "[scoring]") {
  const evaluation_set set =
      two_class_set({1.0, 3.0, 4.0, 5.0}, {0.0, 0.5, 2.0, 6.0});
  const eer_result eer = compute_eer(compute_det(set));
  CHECK(eer.eer == 0.25);
  CHECK(eer.threshold == 3.0);
  CHECK(eer.crossing_gap == 0.0);
}

TEST_CASE("AUC matches a brute-force pair count", "[scoring]") {
  const evaluation_set fixture =
      two_class_set({1.0, 3.0, 4.0, 5.0}, {0.0, 0.5, 2.0, 6.0});
  CHECK_THAT(compute_auc(compute_det(fixture)),
             Catch::Matchers::WithinAbs(11.0 / 16.0, 1e-12));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> score(-2.0, 2.0);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> spoof(200), bona ((rep + 2) * 70);
    for (double& s : spoof) s = std::round(score(rng) * 8.0) / 8.0;
    for (double& s : bona) s = std::round(score(rng) * 8.0) / 8.0;
    const evaluation_set set = two_class_set(spoof, bona);

    double pairs = 0.0;
    for (double p : spoof) {
      for (double n : bona) {
        if (p > n) pairs += 1.0;
        else if (p == n) pairs += 0.5;
      }
    }
    const double mann_whitney =
        pairs / (static_cast<double>(spoof.size()) * bona.size());
    CHECK_THAT(compute_auc(compute_det(set)),
               Catch::Matchers::WithinAbs(mann_whitney, 1e-9));
  }
}

TEST_CASE("identical distributions sit at chance", "[scoring]") {
  sim_config config;
  config.seed = 9;
  config.models = {group_class_model{"F", class_label::bonafide, 10000, 0.3, 1.0},
                   group_class_model{"F", class_label::spoof, 10000, 0.3, 1.0}};
  const evaluation_set set =
      generate_set(config, polarity::higher_spoof, class_label::spoof);
  const det_curve curve = compute_det(set);
  CHECK_THAT(compute_eer(curve).eer, Catch::Matchers::WithinAbs(0.5, 0.01));
  CHECK_THAT(compute_auc(curve), Catch::Matchers::WithinAbs(0.5, 0.01));
}

TEST_CASE("Gaussian overlap EER matches the closed form", "[scoring]") {
  // means 2 sigma apart -> EER = Phi(-1) = 0.15865525393145705.
  sim_config config;
  config.seed = 31;
  config.models = {group_class_model{"F", class_label::bonafide, 20000, 0.0, 1.0},
                   group_class_model{"F", class_label::spoof, 20000, 2.0, 1.0}};
  const evaluation_set set =
      generate_set(config, polarity::higher_spoof, class_label::spoof);
  CHECK_THAT(compute_eer(compute_det(set)).eer,
             Catch::Matchers::WithinAbs(0.15865525393145705, 0.01));
}

TEST_CASE("threshold decisions follow the oriented >= rule", "[scoring]") {
  const evaluation_set set = make_set({row{"U1", "F", class_label::spoof, 0.4},
                                       row{"U2", "M", class_label::spoof, 0.6}});
  operating_point op;
  op.threshold = 0.5;
  op.score_polarity = polarity::higher_spoof;
  const decision_vector decisions = apply_threshold(set, op);
  REQUIRE(decisions.positive.size() == 2);
  CHECK_FALSE(decisions.positive[0]);
  CHECK(decisions.positive[1]);

  // Tie rule: equality decides positive.
  op.threshold = 0.6;
  CHECK(apply_threshold(set, op).positive[1]);

  // Below-everything threshold accepts everything.
  op.threshold = -100.0;
  const decision_vector all = apply_threshold(set, op);
  CHECK(all.positive[0]);
  CHECK(all.positive[1]);
}

TEST_CASE("threshold application rejects polarity mismatches", "[scoring]") {
  const evaluation_set set = make_set({row{"U1", "F", class_label::spoof, 0.4}},
                                      polarity::higher_bonafide);
  operating_point op;
  op.score_polarity = polarity::higher_spoof;
  CHECK(code_of([&] { apply_threshold(set, op); }) == errc::polarity_mismatch);
}

TEST_CASE("bonafide-likelihood scores orient negatively for spoof detection",
          "[scoring]") {
  // higher_bonafide scores with positive class spoof: low score => spoof.
  const evaluation_set set =
      make_set({row{"U1", "F", class_label::spoof, 0.1},
                row{"U2", "M", class_label::bonafide, 0.9}},
               polarity::higher_bonafide);
  operating_point op;
  op.threshold = -0.5;  // oriented space: -score >= -0.5 <=> score <= 0.5
  op.score_polarity = polarity::higher_bonafide;
  const decision_vector decisions = apply_threshold(set, op);
  CHECK(decisions.positive[0]);
  CHECK_FALSE(decisions.positive[1]);
}

TEST_CASE("derived operating points verify on their own split", "[scoring]") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> spoofish(0.0, 3.0);
  std::uniform_real_distribution<double> bonaish(-3.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    // Distinct scores: nextafter nudges resolve duplicates.
    std::vector<double> spoof, bona;
    for (int i = 0; i < 40 + rep; ++i) spoof.push_back(spoofish(rng));
    for (int i = 0; i < 25 + rep; ++i) bona.push_back(bonaish(rng));
    evaluation_set set = two_class_set(spoof, bona);

    const operating_point op = derive_operating_point(set, split_tag::dev);
    CHECK(op.source_split == split_tag::dev);
    CHECK(op.score_polarity == set.score_polarity);
    CHECK(std::isfinite(op.threshold));

    const confusion_counts cc = confusion(set, apply_threshold(set, op));
    const double fpr = static_cast<double>(cc.fp) / (cc.fp + cc.tn);
    const double fnr = static_cast<double>(cc.fn) / (cc.fn + cc.tp);
    const double bound =
        1.0 / std::min<double>(spoof.size(), bona.size()) + 1e-12;
    CHECK(std::abs(fpr - fnr) <= bound);
  }
}

TEST_CASE("EER is invariant under strictly increasing transforms", "[scoring]") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> score(-3.5, 3.5);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> spoof, bona;
    for (int i = 0; i < 60; ++i) spoof.push_back(score(rng) + 0.8);
    for (int i = 0; i < 45; ++i) bona.push_back(score(rng) - 0.8);
    const evaluation_set base = two_class_set(spoof, bona);

    auto transformed = [&](auto&& f) {
      std::vector<double> ts, tb;
      for (double s : spoof) ts.push_back(f(s));
      for (double s : bona) tb.push_back(f(s));
      return two_class_set(ts, tb);
    };

    const double eer0 = compute_eer(compute_det(base)).eer;
    const double eer1 =
        compute_eer(compute_det(transformed([](double x) { return 2.0 * x + 1.0; })))
            .eer;
    const double eer2 =
        compute_eer(compute_det(transformed([](double x) { return std::tanh(x); })))
            .eer;
    CHECK_THAT(eer1, Catch::Matchers::WithinAbs(eer0, 1e-12));
    CHECK_THAT(eer2, Catch::Matchers::WithinAbs(eer0, 1e-12));
  }
}

TEST_CASE("polarity flip with negated scores leaves decisions unchanged",
          "[scoring]") {
  std::mt19937_64 rng(41);
  const evaluation_set set =
      testutil::random_set(rng, 100, polarity::higher_spoof, class_label::spoof);
  evaluation_set flipped = set;
  flipped.score_polarity = polarity::higher_bonafide;
  for (scored_trial& r : flipped.records) r.score = -r.score;

  operating_point op;
  op.threshold = 0.25;
  op.score_polarity = polarity::higher_spoof;
  operating_point op_flipped = op;
  op_flipped.score_polarity = polarity::higher_bonafide;

  CHECK(apply_threshold(set, op).positive ==
        apply_threshold(flipped, op_flipped).positive);
}

TEST_CASE("DET curves export as CSV", "[scoring]") {
  const evaluation_set set = two_class_set({1.0, 2.0}, {0.0});
  const std::string csv = render_det_csv(compute_det(set));
  CHECK(csv.rfind("threshold,fpr,fnr\n", 0) == 0);
  CHECK(csv.find("-inf,1,0\n") != std::string::npos);
  CHECK(csv.find("inf,0,1\n") != std::string::npos);
}
