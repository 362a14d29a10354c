// fairdet/simgen.hpp
//
// Deterministic synthetic protocol/score generation with controllable
// per-group, per-class Gaussian score distributions, plus analytic and
// brute-force oracles for end-to-end testing.
//
// Portability contract (fixed by name, do not change):
//   - PRNG: xoshiro256++ (Blackman/Vigna reference update function).
//   - Stream seeding: cell k draws from a xoshiro256++ state initialized by
//     four successive outputs of SplitMix64 whose state starts at
//     config.seed + (k+1) * 0x9E3779B97F4A7C15 (SplitMix64's own increment,
//     used here for stream separation).
//   - Normal transform: trigonometric Box-Muller, first variate only:
//     u1 = ((a >> 11) + 1) * 2^-53 in (0,1], u2 = (b >> 11) * 2^-53 in [0,1),
//     z = sqrt(-2 ln u1) * cos(2 pi u2), score = mean + stddev * z.
//   - Score text: printf "%.9g" (9 significant digits).
// Identical configs therefore produce byte-identical outputs.
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

#ifndef FAIRDET_SIMGEN_HPP_
#define FAIRDET_SIMGEN_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fairdet/stats.hpp"

namespace fairdet {

// One synthetic (group, class) cell: `count` scores from N(mean, stddev^2).
struct group_class_model {
  std::string group;
  class_label label = class_label::bonafide;
  std::int64_t count = 0;
  double mean = 0.0;
  double stddev = 1.0;
};

struct sim_config {
  std::vector<group_class_model> models;
  std::uint64_t seed = 1;
  std::string id_prefix = "SIM";
  std::int64_t count_cap = 10'000'000;  // per cell
};

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

struct splitmix64 {
  std::uint64_t state;

  std::uint64_t next() noexcept {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

struct xoshiro256pp {
  std::array<std::uint64_t, 4> s;

  static xoshiro256pp for_cell(std::uint64_t seed, std::uint64_t cell) noexcept {
    splitmix64 sm{seed + (cell + 1) * kGolden};
    xoshiro256pp g;
    for (std::uint64_t& word : g.s) word = sm.next();
    return g;
  }

  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  double standard_normal() noexcept {
    constexpr double kTwoPow53Inv = 0x1.0p-53;
    const double u1 =
        static_cast<double>((next() >> 11) + 1) * kTwoPow53Inv;  // (0,1]
    const double u2 = static_cast<double>(next() >> 11) * kTwoPow53Inv;
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
};

inline std::string format_score_9g(double value) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof(buf), "%.9g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline std::string format_double_17g(double value) {
  char buf[48];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline void validate_config(const sim_config& config) {
  if (config.models.empty()) {
    raise(errc::config_error, "generator needs at least one cell");
  }
  bool has_bonafide = false, has_spoof = false;
  std::map<std::pair<std::string, class_label>, bool> seen;
  for (const group_class_model& m : config.models) {
    if (m.group.empty()) raise(errc::config_error, "cell with empty group token");
    if (!(m.stddev > 0.0)) {
      raise(errc::config_error, "cell stddev must be strictly positive");
    }
    if (m.count < 0) raise(errc::config_error, "cell count must be >= 0");
    if (m.count > config.count_cap) {
      raise(errc::cap_exceeded,
            "cell count " + std::to_string(m.count) + " exceeds cap " +
                std::to_string(config.count_cap));
    }
    if (!seen.emplace(std::make_pair(m.group, m.label), true).second) {
      raise(errc::config_error, "duplicate (group, class) cell: " + m.group +
                                    "/" + std::string(to_string(m.label)));
    }
    has_bonafide = has_bonafide || m.label == class_label::bonafide;
    has_spoof = has_spoof || m.label == class_label::spoof;
  }
  if (!has_bonafide || !has_spoof) {
    raise(errc::config_error, "config needs at least one bonafide and one spoof cell");
  }
}

inline std::size_t id_width(std::int64_t total) noexcept {
  std::size_t width = 1;
  for (std::int64_t v = total; v >= 10; v /= 10) ++width;
  return width < 7 ? 7 : width;
}

inline std::string padded_index(std::int64_t index, std::size_t width) {
  std::string digits = std::to_string(index);
  return std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

}  // namespace detail

struct sim_output {
  std::string protocol_text;
  std::string score_text;
  std::string manifest_text;
};

// Emits (protocol bytes, score bytes, manifest). Cells are generated in
// config order with one PRNG stream per cell; utterance ids are the prefix
// plus a zero-padded global index, so lexicographic order equals generation
// order. Per-cell running sums accumulate the values exactly as printed, so
// parsing the score file back and summing in file order reproduces them
// bit for bit.
inline sim_output generate(const sim_config& config) {
  detail::validate_config(config);
  std::int64_t total = 0;
  for (const group_class_model& m : config.models) total += m.count;
  const std::size_t width = detail::id_width(total);

  sim_output out;
  out.protocol_text.reserve(static_cast<std::size_t>(total) * 40);
  out.score_text.reserve(static_cast<std::size_t>(total) * 32);

  std::string manifest;
  manifest += "seed=" + std::to_string(config.seed) + "\n";
  manifest += "prefix=" + config.id_prefix + "\n";
  manifest += "cells=" + std::to_string(config.models.size()) + "\n";
  manifest += "total=" + std::to_string(total) + "\n";

  std::int64_t index = 0;
  for (std::size_t cell = 0; cell < config.models.size(); ++cell) {
    const group_class_model& m = config.models[cell];
    auto rng = detail::xoshiro256pp::for_cell(config.seed,
                                              static_cast<std::uint64_t>(cell));
    const std::string speaker = config.id_prefix + "-S" + m.group;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t i = 0; i < m.count; ++i, ++index) {
      const double raw = m.mean + m.stddev * rng.standard_normal();
      const std::string text = detail::format_score_9g(raw);
      double printed = raw;
      detail::parse_double(text, printed);  // the value readers will see
      sum += printed;
      sumsq += printed * printed;

      const std::string utt =
          config.id_prefix + "-" + detail::padded_index(index, width);
      out.protocol_text += speaker;
      out.protocol_text += '\t';
      out.protocol_text += utt;
      out.protocol_text += '\t';
      out.protocol_text += m.group;
      out.protocol_text += '\t';
      out.protocol_text += to_string(m.label);
      out.protocol_text += '\n';

      out.score_text += utt;
      out.score_text += '\t';
      out.score_text += text;
      out.score_text += '\n';
    }
    const std::string key = "cell." + std::to_string(cell) + ".";
    manifest += key + "group=" + m.group + "\n";
    manifest += key + "label=" + std::string(to_string(m.label)) + "\n";
    manifest += key + "count=" + std::to_string(m.count) + "\n";
    manifest += key + "mean=" + detail::format_double_17g(m.mean) + "\n";
    manifest += key + "stddev=" + detail::format_double_17g(m.stddev) + "\n";
    manifest += key + "sum=" + detail::format_double_17g(sum) + "\n";
    manifest += key + "sumsq=" + detail::format_double_17g(sumsq) + "\n";
  }
  out.manifest_text = std::move(manifest);
  return out;
}

// In-memory form of generate: identical PRNG streams and utterance ids, with
// scores kept at full precision instead of passing through "%.9g" text.
// Records come out already sorted by utt_id (generation order).
inline evaluation_set generate_set(const sim_config& config, polarity pol,
                                   class_label positive) {
  detail::validate_config(config);
  std::int64_t total = 0;
  for (const group_class_model& m : config.models) total += m.count;
  const std::size_t width = detail::id_width(total);

  evaluation_set set;
  set.score_polarity = pol;
  set.positive_class = positive;
  set.records.reserve(static_cast<std::size_t>(total));

  std::int64_t index = 0;
  for (std::size_t cell = 0; cell < config.models.size(); ++cell) {
    const group_class_model& m = config.models[cell];
    auto rng = detail::xoshiro256pp::for_cell(config.seed,
                                              static_cast<std::uint64_t>(cell));
    const std::string speaker = config.id_prefix + "-S" + m.group;
    for (std::int64_t i = 0; i < m.count; ++i, ++index) {
      set.records.push_back(scored_trial{
          trial_record{config.id_prefix + "-" + detail::padded_index(index, width),
                       speaker, m.group, m.label},
          m.mean + m.stddev * rng.standard_normal()});
    }
  }
  std::sort(set.records.begin(), set.records.end(),
            [](const scored_trial& a, const scored_trial& b) {
              return a.trial.utt_id < b.trial.utt_id;
            });
  return set;
}

// Analytic per-cell behavior of the decision rule at a fixed oriented-space
// threshold. p_positive is the exact Gaussian exceedance probability of the
// oriented score; expected counts are probability times cell count.
struct cell_rates {
  std::string group;
  class_label label = class_label::bonafide;
  std::int64_t count = 0;
  double p_positive = 0.0;
  double e_tp = 0.0, e_fp = 0.0, e_tn = 0.0, e_fn = 0.0;
};

inline std::vector<cell_rates> expected_rates(const sim_config& config,
                                              double threshold, polarity pol,
                                              class_label positive) {
  // +-inf thresholds are meaningful (decide-none / decide-all); NaN is not.
  if (std::isnan(threshold)) {
    raise(errc::non_finite_input, "threshold must not be NaN");
  }
  detail::validate_config(config);
  const double factor = orientation_factor(pol, positive);
  std::vector<cell_rates> out;
  out.reserve(config.models.size());
  for (const group_class_model& m : config.models) {
    cell_rates r;
    r.group = m.group;
    r.label = m.label;
    r.count = m.count;
    // factor * score ~ N(factor * mean, stddev^2)
    r.p_positive = normal_cdf((factor * m.mean - threshold) / m.stddev);
    const double n = static_cast<double>(m.count);
    if (m.label == positive) {
      r.e_tp = n * r.p_positive;
      r.e_fn = n * (1.0 - r.p_positive);
    } else {
      r.e_fp = n * r.p_positive;
      r.e_tn = n * (1.0 - r.p_positive);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Independent brute-force oracle: naive per-trial tallies with no code
// shared with the fairness module, reporting every metric variant per group.
struct brute_force_cell {
  double value = 0.0;
  bool defined = false;
};

struct brute_force_group {
  brute_force_cell sp, eop, eo_fpr, eo_mean, pp, te_count, te_rate;
};

using brute_force_result = std::map<std::string, brute_force_group>;

inline brute_force_result brute_force_fairness(
    const std::vector<trial_record>& trials,
    const std::vector<score_record>& scores, double threshold,
    class_label positive, polarity pol) {
  constexpr std::size_t kMaxTrials = 100'000;
  if (trials.size() > kMaxTrials || scores.size() > kMaxTrials) {
    raise(errc::too_large, "brute-force oracle is capped at " +
                               std::to_string(kMaxTrials) + " trials");
  }
  std::map<std::string, double> score_by_utt;
  for (const score_record& s : scores) score_by_utt[s.utt_id] = s.score;

  const bool higher_is_positive =
      (pol == polarity::higher_bonafide) == (positive == class_label::bonafide);

  // counts[group][pred][truth], pred/truth in {0,1}
  std::map<std::string, std::array<std::array<std::int64_t, 2>, 2>> counts;
  for (const trial_record& t : trials) {
    const auto it = score_by_utt.find(t.utt_id);
    if (it == score_by_utt.end()) {
      raise(errc::missing_score, "trial '" + t.utt_id + "' has no score");
    }
    const double oriented = higher_is_positive ? it->second : -it->second;
    const int pred = oriented >= threshold ? 1 : 0;
    const int truth = t.label == positive ? 1 : 0;
    counts[t.group][pred][truth] += 1;
  }

  brute_force_result result;
  for (const auto& [group, c] : counts) {
    const std::int64_t tp = c[1][1], fp = c[1][0], fn = c[0][1], tn = c[0][0];
    brute_force_group g;
    auto ratio = [](std::int64_t num, std::int64_t den) {
      brute_force_cell cell;
      if (den > 0) {
        cell.value = static_cast<double>(num) / static_cast<double>(den);
        cell.defined = true;
      }
      return cell;
    };
    g.sp = ratio(tp + fp, tp + fp + tn + fn);
    g.eop = ratio(tp, tp + fn);
    g.eo_fpr = ratio(fp, fp + tn);
    if (tp + fn > 0 && fp + tn > 0) {
      g.eo_mean.value = 0.5 * (static_cast<double>(tp) / static_cast<double>(tp + fn) +
                               static_cast<double>(fp) / static_cast<double>(fp + tn));
      g.eo_mean.defined = true;
    }
    g.pp = ratio(tp, tp + fp);
    g.te_count = ratio(fp, fn);
    if (fn > 0 && fp + tn > 0) {
      const double fpr = static_cast<double>(fp) / static_cast<double>(fp + tn);
      const double fnr = static_cast<double>(fn) / static_cast<double>(fn + tp);
      g.te_rate.value = fpr / fnr;
      g.te_rate.defined = true;
    }
    result[group] = g;
  }
  return result;
}

}  // namespace fairdet

#endif  // FAIRDET_SIMGEN_HPP_
