// Shared helpers for the test suite: hand-built evaluation sets, random set
// generation (std::mt19937_64, deliberately unrelated to the library's own
// generator), and scratch directories for subprocess tests.
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

#ifndef FAIRDET_TESTS_TEST_UTIL_HPP_
#define FAIRDET_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fairdet/fairdet.hpp"

namespace testutil {

struct row {
  std::string utt;
  std::string group;
  fairdet::class_label label;
  double score;
};

inline fairdet::evaluation_set make_set(
    std::vector<row> rows,
    fairdet::polarity pol = fairdet::polarity::higher_spoof,
    fairdet::class_label positive = fairdet::class_label::spoof) {
  fairdet::evaluation_set set;
  set.score_polarity = pol;
  set.positive_class = positive;
  std::sort(rows.begin(), rows.end(),
            [](const row& a, const row& b) { return a.utt < b.utt; });
  for (row& r : rows) {
    set.records.push_back(fairdet::scored_trial{
        fairdet::trial_record{r.utt, "SPK-" + r.group, r.group, r.label},
        r.score});
  }
  return set;
}

inline std::string utt_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U%06d", i);
  return std::string(buf);
}

// Random evaluation set: groups F and M always present, occasionally a third
// group; labels random; scores either continuous or coarsely quantized (to
// force score ties). Polarity/positive class randomized by the caller.
inline fairdet::evaluation_set random_set(std::mt19937_64& rng, int max_n,
                                          fairdet::polarity pol,
                                          fairdet::class_label positive) {
  std::uniform_int_distribution<int> n_dist(2, max_n);
  std::uniform_real_distribution<double> score_dist(-4.0, 4.0);
  std::bernoulli_distribution third_group(0.15);
  std::bernoulli_distribution quantize(0.4);
  std::bernoulli_distribution label_dist(0.5);
  std::uniform_int_distribution<int> group_dist(0, 2);

  const int n = n_dist(rng);
  const bool with_third = third_group(rng);
  const bool coarse = quantize(rng);
  std::vector<row> rows;
  rows.reserve(static_cast<std::size_t>(n) + 2);
  for (int i = 0; i < n; ++i) {
    const int g = group_dist(rng);
    const std::string group = (g == 2 && with_third) ? "X" : (g == 0 ? "F" : "M");
    double s = score_dist(rng);
    if (coarse) s = std::round(s * 4.0) / 4.0;  // 0.25 grid: many exact ties
    rows.push_back(row{utt_name(i), group,
                       label_dist(rng) ? fairdet::class_label::spoof
                                       : fairdet::class_label::bonafide,
                       s});
  }
  // Both comparison groups always present.
  rows.push_back(row{utt_name(n), "F",
                     label_dist(rng) ? fairdet::class_label::spoof
                                     : fairdet::class_label::bonafide,
                     score_dist(rng)});
  rows.push_back(row{utt_name(n + 1), "M",
                     label_dist(rng) ? fairdet::class_label::spoof
                                     : fairdet::class_label::bonafide,
                     score_dist(rng)});
  return make_set(std::move(rows), pol, positive);
}

// Fresh scratch directory under the system temp dir; removed first if left
// over from a previous run.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("fairdet_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil

#endif  // FAIRDET_TESTS_TEST_UTIL_HPP_
