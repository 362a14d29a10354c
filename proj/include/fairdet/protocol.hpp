// fairdet/protocol.hpp
//
// Parsing, validation, and joining of trial-metadata (protocol) files and
// detector score files into evaluation sets partitionable by group.
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

#ifndef FAIRDET_PROTOCOL_HPP_
#define FAIRDET_PROTOCOL_HPP_

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairdet/error.hpp"

namespace fairdet {

// The two ground-truth classes. Which one plays the role of the numeric
// positive class (Y = 1) is run-level configuration, never hard-coded.
enum class class_label : std::uint8_t { bonafide, spoof };

// Score orientation: whether larger raw scores indicate bonafide or spoof.
enum class polarity : std::uint8_t { higher_bonafide, higher_spoof };

constexpr std::string_view to_string(class_label label) noexcept {
  return label == class_label::bonafide ? "bonafide" : "spoof";
}

constexpr std::string_view to_string(polarity pol) noexcept {
  return pol == polarity::higher_bonafide ? "higher-bonafide" : "higher-spoof";
}

// +1 when larger raw scores indicate the positive class, -1 otherwise.
// Every threshold in this library lives in oriented-score space:
// decide positive iff orientation_factor * raw_score >= threshold.
constexpr double orientation_factor(polarity pol, class_label positive) noexcept {
  const bool higher_is_positive =
      (pol == polarity::higher_bonafide) == (positive == class_label::bonafide);
  return higher_is_positive ? 1.0 : -1.0;
}

struct trial_record {
  std::string utt_id;
  std::string speaker_id;
  std::string group;  // upper-cased token, e.g. "F", "M"
  class_label label = class_label::bonafide;

  friend bool operator==(const trial_record&, const trial_record&) = default;
};

struct score_record {
  std::string utt_id;
  double score = 0.0;

  friend bool operator==(const score_record&, const score_record&) = default;
};

struct scored_trial {
  trial_record trial;
  double score = 0.0;

  friend bool operator==(const scored_trial&, const scored_trial&) = default;
};

// Validated join of trials with scores. records is sorted by utt_id
// ascending; every trial carries exactly one finite score.
struct evaluation_set {
  std::vector<scored_trial> records;
  polarity score_polarity = polarity::higher_bonafide;
  class_label positive_class = class_label::spoof;

  std::size_t size() const noexcept { return records.size(); }
};

// Column positions (0-based) and tokenization rules for protocol files.
// delimiter '\0' means any run of spaces/tabs; otherwise the exact character.
// Lines may carry more columns than the named ones; extras are ignored.
struct column_layout {
  std::size_t speaker = 0;
  std::size_t utt = 1;
  std::size_t gender = 2;
  std::size_t label = 3;
  char delimiter = '\0';
  // Token -> class map; tokens compared case-insensitively (stored lower).
  std::vector<std::pair<std::string, class_label>> label_tokens = {
      {"bonafide", class_label::bonafide}, {"spoof", class_label::spoof}};
};

namespace detail {

inline char ascii_lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline char ascii_upper(char c) noexcept {
  return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

inline std::string lower_copy(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

inline std::string upper_copy(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_upper(c);
  return out;
}

inline bool is_blank(char c) noexcept { return c == ' ' || c == '\t'; }

// Strips one trailing '\r' (CRLF tolerance) and leading blanks.
inline std::string_view trim_line(std::string_view line) noexcept {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  while (!line.empty() && is_blank(line.front())) line.remove_prefix(1);
  return line;
}

// Content line: non-empty after trimming and not a '#' comment.
inline bool is_content_line(std::string_view trimmed) noexcept {
  return !trimmed.empty() && trimmed.front() != '#';
}

// Calls fn(line_no, trimmed_line) for every content line of text.
template <typename Fn>
void for_each_content_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    std::string_view line = trim_line(text.substr(pos, eol - pos));
    if (is_content_line(line)) fn(line_no, line);
    pos = eol + 1;
  }
}

inline std::size_t count_content_lines(std::string_view text) {
  std::size_t n = 0;
  for_each_content_line(text, [&](std::size_t, std::string_view) { ++n; });
  return n;
}

// Splits line into out; returns the token count. delimiter '\0' splits on
// runs of blanks, anything else splits on that exact character (so empty
// fields between adjacent delimiters count as missing columns).
inline std::size_t split_tokens(std::string_view line, char delimiter,
                                std::vector<std::string_view>& out) {
  out.clear();
  if (delimiter == '\0') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_blank(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t start = i;
      while (i < line.size() && !is_blank(line[i])) ++i;
      out.push_back(line.substr(start, i - start));
    }
  } else {
    std::size_t start = 0;
    while (true) {
      std::size_t end = line.find(delimiter, start);
      if (end == std::string_view::npos) {
        std::string_view tok = line.substr(start);
        if (!tok.empty() && tok.back() == '\r') tok.remove_suffix(1);
        if (!tok.empty()) out.push_back(tok);
        break;
      }
      if (end > start) out.push_back(line.substr(start, end - start));
      start = end + 1;
    }
  }
  return out.size();
}

// Strict decimal float parse of a whole token; optional leading '+'.
inline bool parse_double(std::string_view token, double& value) noexcept {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

inline const class_label* lookup_label(const column_layout& layout,
                                       std::string_view token) {
  const std::string lowered = lower_copy(token);
  for (const auto& [tok, cls] : layout.label_tokens) {
    if (tok == lowered) return &cls;
  }
  return nullptr;
}

}  // namespace detail

// Reads a whole file into memory; io_error names the path on failure.
inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path.string());
  std::string text;
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  if (end > 0) text.reserve(static_cast<std::size_t>(end));
  in.seekg(0, std::ios::beg);
  text.assign(std::istreambuf_iterator<char>(in),
              std::istreambuf_iterator<char>());
  if (in.bad()) raise(errc::io_error, "cannot read " + path.string());
  return text;
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(errc::io_error, "cannot write " + path.string());
}

// One trial per content line, in file order. Duplicate utt_id, wrong column
// counts, and unknown label tokens are hard errors; nothing is skipped
// silently. Gender tokens are upper-cased at parse time.
inline std::vector<trial_record> parse_protocol(std::string_view text,
                                                const column_layout& layout = {}) {
  const std::size_t max_col =
      std::max({layout.speaker, layout.utt, layout.gender, layout.label});
  const std::size_t n_lines = detail::count_content_lines(text);
  if (n_lines == 0) raise(errc::empty_file, "protocol file has no trial lines");

  std::vector<trial_record> records;
  records.reserve(n_lines);  // no reallocation: duplicate-set views stay valid
  std::unordered_set<std::string_view> seen;
  seen.reserve(n_lines * 2);
  std::vector<std::string_view> tokens;
  tokens.reserve(max_col + 2);

  detail::for_each_content_line(text, [&](std::size_t line_no,
                                          std::string_view line) {
    detail::split_tokens(line, layout.delimiter, tokens);
    if (tokens.size() <= max_col) {
      raise(errc::malformed_row,
            "line " + std::to_string(line_no) + ": expected at least " +
                std::to_string(max_col + 1) + " columns, got " +
                std::to_string(tokens.size()));
    }
    const class_label* label = detail::lookup_label(layout, tokens[layout.label]);
    if (label == nullptr) {
      raise(errc::malformed_row,
            "line " + std::to_string(line_no) + ": unknown class label '" +
                std::string(tokens[layout.label]) + "'");
    }
    std::string_view gender = tokens[layout.gender];
    if (gender.empty()) {
      raise(errc::malformed_row,
            "line " + std::to_string(line_no) + ": empty gender token");
    }
    records.push_back(trial_record{std::string(tokens[layout.utt]),
                                   std::string(tokens[layout.speaker]),
                                   detail::upper_copy(gender), *label});
    if (!seen.insert(records.back().utt_id).second) {
      raise(errc::duplicate_utt,
            "utt_id '" + records.back().utt_id + "' appears more than once");
    }
  });
  return records;
}

// One "utt_id score" pair per content line. Scores must parse as finite
// decimal floating point; duplicates are errors.
inline std::vector<score_record> parse_scores(std::string_view text) {
  const std::size_t n_lines = detail::count_content_lines(text);
  if (n_lines == 0) raise(errc::empty_file, "score file has no score lines");

  std::vector<score_record> records;
  records.reserve(n_lines);
  std::unordered_set<std::string_view> seen;
  seen.reserve(n_lines * 2);
  std::vector<std::string_view> tokens;
  tokens.reserve(4);

  detail::for_each_content_line(text, [&](std::size_t line_no,
                                          std::string_view line) {
    detail::split_tokens(line, '\0', tokens);
    if (tokens.size() != 2) {
      raise(errc::malformed_row,
            "line " + std::to_string(line_no) + ": expected 'utt_id score', got " +
                std::to_string(tokens.size()) + " tokens");
    }
    double value = 0.0;
    if (!detail::parse_double(tokens[1], value)) {
      raise(errc::malformed_row,
            "line " + std::to_string(line_no) + ": unparseable score '" +
                std::string(tokens[1]) + "'");
    }
    if (!std::isfinite(value)) {
      raise(errc::non_finite_score,
            "utt_id '" + std::string(tokens[0]) + "' has non-finite score");
    }
    records.push_back(score_record{std::string(tokens[0]), value});
    if (!seen.insert(records.back().utt_id).second) {
      raise(errc::duplicate_utt,
            "utt_id '" + records.back().utt_id + "' appears more than once");
    }
  });
  return records;
}

// Softmax posterior of the bonafide class, overflow-safe (max logit
// subtracted before exponentiation). Monotone increasing in (b - s);
// logits_to_score(a, b) + logits_to_score(b, a) == 1 within 1e-12.
inline double logits_to_score(double logit_spoof, double logit_bonafide) {
  if (!std::isfinite(logit_spoof) || !std::isfinite(logit_bonafide)) {
    raise(errc::non_finite_input, "logits must be finite");
  }
  const double m = std::max(logit_spoof, logit_bonafide);
  const double es = std::exp(logit_spoof - m);
  const double eb = std::exp(logit_bonafide - m);
  return eb / (es + eb);
}

// Counts reported alongside a join.
struct join_summary {
  std::size_t n_total = 0;
  std::map<std::string, std::size_t> per_group;
  std::size_t n_bonafide = 0;
  std::size_t n_spoof = 0;
  std::vector<std::string> orphan_utts;  // populated only under allow_orphans
};

// Strict join by utt_id: every trial needs exactly one score. Scores with no
// trial are errors unless allow_orphans; trials without scores are always
// errors. Output sorted by utt_id ascending, so the result is invariant
// under any permutation of either input.
inline evaluation_set join_trials(const std::vector<trial_record>& trials,
                                  const std::vector<score_record>& scores,
                                  polarity pol, class_label positive,
                                  bool allow_orphans = false,
                                  join_summary* summary = nullptr) {
  std::unordered_map<std::string_view, double> score_by_utt;
  score_by_utt.reserve(scores.size() * 2);
  for (const score_record& s : scores) {
    if (!score_by_utt.emplace(s.utt_id, s.score).second) {
      raise(errc::duplicate_utt, "score utt_id '" + s.utt_id + "' duplicated");
    }
  }

  evaluation_set set;
  set.score_polarity = pol;
  set.positive_class = positive;
  set.records.reserve(trials.size());

  std::unordered_set<std::string_view> trial_utts;
  trial_utts.reserve(trials.size() * 2);
  std::vector<std::string> missing;
  for (const trial_record& t : trials) {
    if (!trial_utts.insert(t.utt_id).second) {
      raise(errc::duplicate_utt, "trial utt_id '" + t.utt_id + "' duplicated");
    }
    auto it = score_by_utt.find(t.utt_id);
    if (it == score_by_utt.end()) {
      if (missing.size() < 8) missing.push_back(t.utt_id);
      continue;
    }
    set.records.push_back(scored_trial{t, it->second});
  }
  if (!missing.empty()) {
    std::string joined;
    for (const std::string& id : missing) {
      if (!joined.empty()) joined += ", ";
      joined += id;
    }
    raise(errc::missing_score, "trials without scores: " + joined +
                                   (set.records.size() + missing.size() < trials.size()
                                        ? ", ..."
                                        : ""));
  }

  std::vector<std::string> orphans;
  if (scores.size() != trials.size()) {
    for (const score_record& s : scores) {
      if (!trial_utts.contains(s.utt_id)) orphans.push_back(s.utt_id);
    }
  }
  if (!orphans.empty() && !allow_orphans) {
    std::string joined;
    for (std::size_t i = 0; i < orphans.size() && i < 8; ++i) {
      if (!joined.empty()) joined += ", ";
      joined += orphans[i];
    }
    raise(errc::orphan_score,
          std::to_string(orphans.size()) + " scores without trials: " + joined);
  }

  std::sort(set.records.begin(), set.records.end(),
            [](const scored_trial& a, const scored_trial& b) {
              return a.trial.utt_id < b.trial.utt_id;
            });

  if (summary != nullptr) {
    summary->n_total = set.records.size();
    summary->per_group.clear();
    summary->n_bonafide = summary->n_spoof = 0;
    for (const scored_trial& r : set.records) {
      ++summary->per_group[r.trial.group];
      if (r.trial.label == class_label::bonafide) {
        ++summary->n_bonafide;
      } else {
        ++summary->n_spoof;
      }
    }
    summary->orphan_utts = std::move(orphans);
  }
  return set;
}

// Lossless partition by group token plus the unpartitioned combined set.
// Subsets are disjoint, inherit polarity and positive_class, and their sizes
// sum to |all|.
struct group_partition {
  std::map<std::string, evaluation_set> by_group;
  evaluation_set all;
};

inline group_partition partition_by_group(evaluation_set set) {
  group_partition out;
  for (const scored_trial& r : set.records) {
    auto [it, inserted] = out.by_group.try_emplace(r.trial.group);
    if (inserted) {
      it->second.score_polarity = set.score_polarity;
      it->second.positive_class = set.positive_class;
    }
    it->second.records.push_back(r);
  }
  out.all = std::move(set);
  return out;
}

// Canonical TSV: header + one row per record, LF endings, labels lowercased,
// scores in shortest round-trip decimal form. parse_canonical_tsv of the
// output reproduces the set exactly.
inline constexpr std::string_view kCanonicalTsvHeader =
    "utt_id\tspeaker_id\tgender\tlabel\tscore";

inline std::string format_score_exact(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string render_canonical_tsv(const evaluation_set& set) {
  std::string out;
  out.reserve(set.records.size() * 48 + 64);
  out += kCanonicalTsvHeader;
  out += '\n';
  for (const scored_trial& r : set.records) {
    out += r.trial.utt_id;
    out += '\t';
    out += r.trial.speaker_id;
    out += '\t';
    out += r.trial.group;
    out += '\t';
    out += to_string(r.trial.label);
    out += '\t';
    out += format_score_exact(r.score);
    out += '\n';
  }
  return out;
}

inline evaluation_set parse_canonical_tsv(std::string_view text, polarity pol,
                                          class_label positive) {
  evaluation_set set;
  set.score_polarity = pol;
  set.positive_class = positive;

  bool header_seen = false;
  std::vector<std::string_view> tokens;
  detail::for_each_content_line(text, [&](std::size_t line_no,
                                          std::string_view line) {
    if (!header_seen) {
      if (line != kCanonicalTsvHeader) {
        raise(errc::malformed_row, "line " + std::to_string(line_no) +
                                       ": missing canonical TSV header");
      }
      header_seen = true;
      return;
    }
    detail::split_tokens(line, '\t', tokens);
    if (tokens.size() != 5) {
      raise(errc::malformed_row, "line " + std::to_string(line_no) +
                                     ": expected 5 tab-separated fields");
    }
    const std::string label_token = detail::lower_copy(tokens[3]);
    class_label label;
    if (label_token == "bonafide") {
      label = class_label::bonafide;
    } else if (label_token == "spoof") {
      label = class_label::spoof;
    } else {
      raise(errc::malformed_row, "line " + std::to_string(line_no) +
                                     ": unknown class label '" + label_token + "'");
    }
    double value = 0.0;
    if (!detail::parse_double(tokens[4], value) || !std::isfinite(value)) {
      raise(errc::malformed_row, "line " + std::to_string(line_no) +
                                     ": unparseable score '" +
                                     std::string(tokens[4]) + "'");
    }
    set.records.push_back(scored_trial{
        trial_record{std::string(tokens[0]), std::string(tokens[1]),
                     detail::upper_copy(tokens[2]), label},
        value});
  });
  if (!header_seen) raise(errc::empty_file, "canonical TSV has no header");

  for (std::size_t i = 1; i < set.records.size(); ++i) {
    const std::string& prev = set.records[i - 1].trial.utt_id;
    const std::string& cur = set.records[i].trial.utt_id;
    if (cur == prev) raise(errc::duplicate_utt, "utt_id '" + cur + "' duplicated");
    if (cur < prev) {
      raise(errc::malformed_row,
            "canonical TSV rows must be sorted by utt_id ('" + cur +
                "' after '" + prev + "')");
    }
  }
  return set;
}

}  // namespace fairdet

#endif  // FAIRDET_PROTOCOL_HPP_
