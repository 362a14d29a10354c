// fairdet/report.hpp
//
// Run configuration, end-to-end orchestration, and deterministic rendering
// of the evaluation as Markdown, CSV, and JSON report tables.
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

#ifndef FAIRDET_REPORT_HPP_
#define FAIRDET_REPORT_HPP_

#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairdet/fairness.hpp"
#include "fairdet/simgen.hpp"

namespace fairdet {

inline constexpr std::string_view kVersion = "0.1.0";

struct system_spec {
  std::string name;
  std::string dev_protocol;
  std::string dev_scores;
  std::string eval_protocol;
  std::string eval_scores;
};

// Everything one evaluation needs. Paths are kept as written; base_dir (the
// config file's directory) resolves relative ones at read time so reports
// echo stable strings.
struct run_config {
  std::vector<system_spec> systems;
  column_layout layout;
  polarity score_polarity = polarity::higher_bonafide;
  class_label positive_class = class_label::spoof;
  std::pair<std::string, std::string> group_pair = {"F", "M"};
  eo_variant eo = eo_variant::fpr_only;
  te_variant te = te_variant::count_ratio;
  double alpha = 0.05;
  holm_family family = holm_family::per_run;
  std::vector<std::string> formats = {"markdown", "csv", "json"};
  std::string out_dir;
  bool allow_orphans = false;
  std::string base_dir = ".";
};

struct system_report {
  std::string name;
  system_spec paths;
  operating_point op;
  join_summary dev_counts;
  join_summary eval_counts;
  double eer_first = 0.0;   // group_pair.first subset of the eval split
  double eer_second = 0.0;  // group_pair.second subset
  double eer_all = 0.0;     // combined eval split
  std::vector<fairness_row> rows;  // SP, EOP, EO, PP, TE
};

// Every table cell is traceable to a fairness_row or an EER computation;
// nothing here is a stored constant. generated_at stays empty unless the
// caller stamps it; golden comparisons rely on that.
struct report_bundle {
  std::string version = std::string(kVersion);
  std::string generated_at;
  std::pair<std::string, std::string> group_pair = {"F", "M"};
  class_label positive_class = class_label::spoof;
  polarity score_polarity = polarity::higher_bonafide;
  eo_variant eo = eo_variant::fpr_only;
  te_variant te = te_variant::count_ratio;
  double alpha = 0.05;
  holm_family family = holm_family::per_run;
  std::vector<system_report> systems;
};

namespace detail {

inline void validate_run_config(const run_config& config) {
  if (config.systems.empty()) {
    raise(errc::config_error, "config defines no systems");
  }
  for (const system_spec& s : config.systems) {
    if (s.name.empty()) raise(errc::config_error, "system with empty name");
    for (const auto& [what, path] :
         {std::pair{"dev_protocol", &s.dev_protocol},
          std::pair{"dev_scores", &s.dev_scores},
          std::pair{"eval_protocol", &s.eval_protocol},
          std::pair{"eval_scores", &s.eval_scores}}) {
      if (path->empty()) {
        raise(errc::config_error,
              "system '" + s.name + "' is missing " + what);
      }
    }
    for (const system_spec& other : config.systems) {
      if (&other != &s && other.name == s.name) {
        raise(errc::config_error, "duplicate system name '" + s.name + "'");
      }
    }
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    raise(errc::config_error, "alpha must lie in (0,1)");
  }
  if (config.group_pair.first.empty() || config.group_pair.second.empty() ||
      config.group_pair.first == config.group_pair.second) {
    raise(errc::config_error, "group pair must be two distinct tokens");
  }
  if (config.formats.empty()) raise(errc::config_error, "no output formats");
  for (const std::string& f : config.formats) {
    if (f != "markdown" && f != "csv" && f != "json") {
      raise(errc::config_error, "unknown output format '" + f + "'");
    }
  }
}

inline std::filesystem::path resolve_path(const run_config& config,
                                          const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  return std::filesystem::path(config.base_dir) / p;
}

}  // namespace detail

// Full pipeline for one configuration: per system, parse and join both
// splits, derive the operating point on dev, apply it uniformly to the
// grouped eval subsets, compute per-group EERs and the five fairness rows,
// verify the independent cross-check path, and attach Holm significance over
// the configured family across all systems. Deterministic for fixed inputs.
inline report_bundle run(const run_config& config) {
  detail::validate_run_config(config);

  report_bundle bundle;
  bundle.group_pair = config.group_pair;
  bundle.positive_class = config.positive_class;
  bundle.score_polarity = config.score_polarity;
  bundle.eo = config.eo;
  bundle.te = config.te;
  bundle.alpha = config.alpha;
  bundle.family = config.family;

  fairness_options opt;
  opt.group_pair = config.group_pair;
  opt.eo = config.eo;
  opt.te = config.te;
  opt.alpha = config.alpha;
  opt.family = config.family;

  std::vector<fairness_row> all_rows;
  for (const system_spec& spec : config.systems) {
    try {
      system_report report;
      report.name = spec.name;
      report.paths = spec;

      {
        const std::vector<trial_record> trials = parse_protocol(
            read_file(detail::resolve_path(config, spec.dev_protocol)),
            config.layout);
        const std::vector<score_record> scores = parse_scores(
            read_file(detail::resolve_path(config, spec.dev_scores)));
        const evaluation_set dev =
            join_trials(trials, scores, config.score_polarity,
                        config.positive_class, config.allow_orphans,
                        &report.dev_counts);
        report.op = derive_operating_point(dev, split_tag::dev);
      }

      evaluation_set eval;
      {
        const std::vector<trial_record> trials = parse_protocol(
            read_file(detail::resolve_path(config, spec.eval_protocol)),
            config.layout);
        const std::vector<score_record> scores = parse_scores(
            read_file(detail::resolve_path(config, spec.eval_scores)));
        eval = join_trials(trials, scores, config.score_polarity,
                           config.positive_class, config.allow_orphans,
                           &report.eval_counts);
      }

      group_partition parts = partition_by_group(std::move(eval));
      const auto it_a = parts.by_group.find(config.group_pair.first);
      const auto it_b = parts.by_group.find(config.group_pair.second);
      if (it_a == parts.by_group.end()) {
        raise(errc::missing_group,
              "group '" + config.group_pair.first + "' absent from eval split");
      }
      if (it_b == parts.by_group.end()) {
        raise(errc::missing_group,
              "group '" + config.group_pair.second + "' absent from eval split");
      }
      report.eer_first = compute_eer(compute_det(it_a->second)).eer;
      report.eer_second = compute_eer(compute_det(it_b->second)).eer;
      report.eer_all = compute_eer(compute_det(parts.all)).eer;

      const confusion_counts cc_a =
          confusion(it_a->second, apply_threshold(it_a->second, report.op));
      const confusion_counts cc_b =
          confusion(it_b->second, apply_threshold(it_b->second, report.op));
      std::vector<fairness_row> rows = detail::rows_from_counts(cc_a, cc_b, opt);
      for (fairness_row& row : rows) row.system = spec.name;

      // The independent path must reproduce the rows exactly; a mismatch is
      // an internal bug and surfaces as its own error code.
      expect_cross_check_equal(build_significance(rows, opt.alpha, opt.family),
                               cross_check(parts.all, report.op, opt));

      report.rows = rows;
      for (fairness_row& row : rows) all_rows.push_back(std::move(row));
      bundle.systems.push_back(std::move(report));
    } catch (const error& e) {
      if (e.code() == errc::cross_check_mismatch) throw;
      throw error(e.code(), "system '" + spec.name + "': " + e.what());
    }
  }

  // Holm families span the whole report: per_run pools every tested row,
  // per_metric pools each metric across systems.
  all_rows = build_significance(std::move(all_rows), config.alpha, config.family);
  for (std::size_t s = 0; s < bundle.systems.size(); ++s) {
    for (std::size_t r = 0; r < bundle.systems[s].rows.size(); ++r) {
      bundle.systems[s].rows[r] = all_rows[s * kMetricOrder.size() + r];
    }
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

struct named_output {
  std::string filename;
  std::string bytes;
};

namespace detail {

inline std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline std::string fmt_sci3(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.3e", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline std::string fmt_g6(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

// Display floor applied at render time only; stored p stays full precision.
inline std::string fmt_p(double p) {
  if (p < 1e-16) return "<1e-16";
  if (p < 1e-4) return fmt_sci3(p);
  return fmt_fixed(p, 4);
}

inline std::string display_group(const std::string& token) {
  if (token == "F") return "Female";
  if (token == "M") return "Male";
  return token;
}

inline std::string metric_title(fairness_metric m) {
  switch (m) {
    case fairness_metric::statistical_parity: return "Statistical parity";
    case fairness_metric::equal_opportunity: return "Equal opportunity";
    case fairness_metric::equality_of_odds: return "Equality of odds";
    case fairness_metric::predictive_parity: return "Predictive parity";
    case fairness_metric::treatment_equality: return "Treatment equality";
  }
  return "Unknown";
}

inline int metric_decimals(fairness_metric m) {
  return m == fairness_metric::treatment_equality ? 4 : 3;
}

inline std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

inline std::string orientation_note(polarity pol, class_label positive) {
  const double factor = orientation_factor(pol, positive);
  std::string note = "oriented score = ";
  note += factor > 0 ? "+1" : "-1";
  note += " * raw score; decide ";
  note += to_string(positive);
  note += " iff oriented score >= threshold";
  return note;
}

inline std::string render_markdown(const report_bundle& b) {
  const std::string ga = display_group(b.group_pair.first);
  const std::string gb = display_group(b.group_pair.second);
  std::string md;
  md += "# Detection fairness report\n\n";
  md += "Generated by fairdet " + b.version + ".";
  if (!b.generated_at.empty()) md += " Stamped " + b.generated_at + ".";
  md += "\n\n";

  md += "## Conventions\n\n";
  md += "- Positive class (Y=1): " + std::string(to_string(b.positive_class)) + "\n";
  md += "- Score polarity: " + std::string(to_string(b.score_polarity)) + " (" +
        orientation_note(b.score_polarity, b.positive_class) + ")\n";
  md += "- Group pair: " + ga + " (" + b.group_pair.first + ") minus " + gb +
        " (" + b.group_pair.second + ")\n";
  md += "- Significance: pooled two-proportion z-tests, two-sided, "
        "Holm-corrected (family: " +
        std::string(to_string(b.family)) +
        ") at alpha = " + fmt_g6(b.alpha) + "\n";
  md += "- Equality of odds variant: " + std::string(to_string(b.eo)) +
        "; treatment equality variant: " + std::string(to_string(b.te)) + "\n";
  md += "\n";

  md += "## Inputs\n\n";
  for (const system_report& s : b.systems) {
    md += "- " + s.name + ": dev = " + s.paths.dev_protocol + " + " +
          s.paths.dev_scores + " (" + std::to_string(s.dev_counts.n_total) +
          " trials); eval = " + s.paths.eval_protocol + " + " +
          s.paths.eval_scores + " (" + std::to_string(s.eval_counts.n_total) +
          " trials";
    for (const auto& [group, n] : s.eval_counts.per_group) {
      md += ", " + group + " " + std::to_string(n);
    }
    md += ", bonafide " + std::to_string(s.eval_counts.n_bonafide) + ", spoof " +
          std::to_string(s.eval_counts.n_spoof) + ")\n";
  }
  md += "\n";

  md += "## Operating points\n\n";
  md += "| System | Source | Threshold (oriented) | EER at derivation (%) |\n";
  md += "|---|---|---|---|\n";
  for (const system_report& s : b.systems) {
    md += "| " + s.name + " | " + std::string(to_string(s.op.source_split)) +
          " | " + fmt_g6(s.op.threshold) + " | " +
          fmt_fixed(100.0 * s.op.eer_at_derivation, 2) + " |\n";
  }
  md += "\n";

  md += "## Equal error rate (%)\n\n";
  md += "| System | " + ga + " | " + gb + " | All |\n";
  md += "|---|---|---|---|\n";
  for (const system_report& s : b.systems) {
    md += "| " + s.name + " | " + fmt_fixed(100.0 * s.eer_first, 2) + " | " +
          fmt_fixed(100.0 * s.eer_second, 2) + " | " +
          fmt_fixed(100.0 * s.eer_all, 2) + " |\n";
  }
  md += "\n";

  for (std::size_t m = 0; m < kMetricOrder.size(); ++m) {
    const fairness_metric metric = kMetricOrder[m];
    const int decimals = metric_decimals(metric);
    md += "## " + metric_title(metric) + "\n\n";
    md += "| System | " + ga + " | " + gb + " | Diff (" + ga + "-" + gb +
          ") | p (Holm) | Significant |\n";
    md += "|---|---|---|---|---|---|\n";
    for (const system_report& s : b.systems) {
      const fairness_row& row = s.rows[m];
      auto cell = [&](const group_metric_value& v) {
        return v.defined ? fmt_fixed(v.value, decimals) : std::string("-");
      };
      md += "| " + s.name + " | " + cell(row.first) + " | " + cell(row.second) +
            " | " + (row.diff_defined ? fmt_fixed(row.diff, decimals) : "-") +
            " | " + (row.tested ? fmt_p(row.p_holm) : "-") + " | " +
            (row.tested ? (row.significant ? "yes" : "no") : "-") + " |\n";
    }
    md += "\n";
  }
  md += "Treatment equality significance is tested on fp/(fp+fn), an "
        "order-preserving transform of fp/fn. Cells shown as \"-\" are "
        "undefined (zero denominator) or untestable.\n";
  return md;
}

inline std::vector<named_output> render_csv(const report_bundle& b) {
  std::vector<named_output> files;

  std::string lower_a = lower_copy(display_group(b.group_pair.first));
  std::string lower_b = lower_copy(display_group(b.group_pair.second));
  std::string eer = "system,eer_" + lower_a + ",eer_" + lower_b + ",eer_all\n";
  for (const system_report& s : b.systems) {
    eer += csv_field(s.name) + ',' + format_score_exact(s.eer_first) + ',' +
           format_score_exact(s.eer_second) + ',' +
           format_score_exact(s.eer_all) + '\n';
  }
  files.push_back({"eer.csv", std::move(eer)});

  for (std::size_t m = 0; m < kMetricOrder.size(); ++m) {
    const fairness_metric metric = kMetricOrder[m];
    std::string csv = "system," + lower_a + "," + lower_b +
                      ",diff,z,p_raw,p_holm,significant\n";
    for (const system_report& s : b.systems) {
      const fairness_row& row = s.rows[m];
      auto cell = [](const group_metric_value& v) {
        return v.defined ? format_score_exact(v.value) : std::string();
      };
      csv += csv_field(s.name) + ',' + cell(row.first) + ',' + cell(row.second) +
             ',' + (row.diff_defined ? format_score_exact(row.diff) : "") + ',';
      if (row.tested) {
        csv += format_score_exact(row.test.z) + ',' +
               format_score_exact(row.test.p_two_sided) + ',' +
               format_score_exact(row.p_holm) + ',' +
               (row.significant ? "true" : "false");
      } else {
        csv += ",,,";
      }
      csv += '\n';
    }
    files.push_back({std::string(to_string(metric)) + ".csv", std::move(csv)});
  }
  return files;
}

inline nlohmann::ordered_json json_group_value(const group_metric_value& v) {
  nlohmann::ordered_json j;
  j["defined"] = v.defined;
  j["value"] = v.defined ? nlohmann::ordered_json(v.value)
                         : nlohmann::ordered_json(nullptr);
  if (v.has_backing) {
    j["numerator"] = v.num;
    j["denominator"] = v.den;
  }
  return j;
}

inline nlohmann::ordered_json json_counts(const join_summary& s) {
  nlohmann::ordered_json j;
  j["total"] = s.n_total;
  j["bonafide"] = s.n_bonafide;
  j["spoof"] = s.n_spoof;
  nlohmann::ordered_json groups = nlohmann::ordered_json::object();
  for (const auto& [group, n] : s.per_group) groups[group] = n;
  j["groups"] = groups;
  return j;
}

inline nlohmann::ordered_json json_confusion(const confusion_counts& cc) {
  nlohmann::ordered_json j;
  j["tp"] = cc.tp;
  j["fp"] = cc.fp;
  j["tn"] = cc.tn;
  j["fn"] = cc.fn;
  return j;
}

inline std::string render_json(const report_bundle& b) {
  nlohmann::ordered_json root;
  root["version"] = b.version;
  if (!b.generated_at.empty()) root["generated_at"] = b.generated_at;
  nlohmann::ordered_json conv;
  conv["positive_class"] = std::string(to_string(b.positive_class));
  conv["polarity"] = std::string(to_string(b.score_polarity));
  conv["decision_rule"] = orientation_note(b.score_polarity, b.positive_class);
  conv["group_pair"] = {b.group_pair.first, b.group_pair.second};
  conv["alpha"] = b.alpha;
  conv["eo_variant"] = std::string(to_string(b.eo));
  conv["te_variant"] = std::string(to_string(b.te));
  conv["holm_family"] = std::string(to_string(b.family));
  conv["te_significance"] =
      "tested on fp/(fp+fn), an order-preserving transform of fp/fn";
  root["conventions"] = conv;

  nlohmann::ordered_json systems = nlohmann::ordered_json::array();
  for (const system_report& s : b.systems) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["inputs"] = {{"dev_protocol", s.paths.dev_protocol},
                    {"dev_scores", s.paths.dev_scores},
                    {"eval_protocol", s.paths.eval_protocol},
                    {"eval_scores", s.paths.eval_scores}};
    js["counts"] = {{"dev", json_counts(s.dev_counts)},
                    {"eval", json_counts(s.eval_counts)}};
    js["operating_point"] = {
        {"threshold", s.op.threshold},
        {"eer_at_derivation", s.op.eer_at_derivation},
        {"source_split", std::string(to_string(s.op.source_split))},
        {"polarity", std::string(to_string(s.op.score_polarity))},
        {"crossing_gap", s.op.crossing_gap}};
    js["eer"] = {{b.group_pair.first, s.eer_first},
                 {b.group_pair.second, s.eer_second},
                 {"all", s.eer_all}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const fairness_row& row : s.rows) {
      nlohmann::ordered_json jr;
      jr["metric"] = std::string(to_string(row.metric));
      jr["groups"] = {{b.group_pair.first, json_group_value(row.first)},
                      {b.group_pair.second, json_group_value(row.second)}};
      jr["diff"] = row.diff_defined ? nlohmann::ordered_json(row.diff)
                                    : nlohmann::ordered_json(nullptr);
      jr["tested"] = row.tested;
      if (row.tested) {
        jr["z"] = row.test.z;
        jr["p_raw"] = row.test.p_two_sided;
        jr["p_holm"] = row.p_holm;
        jr["significant"] = row.significant;
        jr["test_degenerate"] = !row.test.defined;
      }
      jr["confusion"] = {{b.group_pair.first, json_confusion(row.cc_first)},
                         {b.group_pair.second, json_confusion(row.cc_second)}};
      rows.push_back(jr);
    }
    js["fairness"] = rows;
    systems.push_back(js);
  }
  root["systems"] = systems;
  return root.dump(2) + "\n";
}

}  // namespace detail

// Byte-deterministic rendering: markdown mirrors the table shapes above, csv
// emits one file per table at full precision, json carries every value at
// full round-trip precision.
inline std::vector<named_output> render(const report_bundle& bundle,
                                        std::string_view format) {
  if (format == "markdown") {
    return {{"report.md", detail::render_markdown(bundle)}};
  }
  if (format == "csv") {
    return detail::render_csv(bundle);
  }
  if (format == "json") {
    return {{"report.json", detail::render_json(bundle)}};
  }
  raise(errc::config_error, "unknown output format '" + std::string(format) + "'");
}

// ---------------------------------------------------------------------------
// Config file parsing
// ---------------------------------------------------------------------------
//
// Flat "key = value" lines plus one "[system NAME]" section per system:
//
//   alpha = 0.05
//   positive_class = spoof
//   polarity = higher-bonafide
//   group_pair = F M
//   eo_variant = fpr-only
//   te_variant = count-ratio
//   holm_family = per-run
//   formats = markdown csv json
//   out_dir = reports
//   allow_orphans = false
//   column_speaker = 0
//   column_utt = 1
//   column_gender = 2
//   column_label = 3
//   delimiter = whitespace
//   bonafide_token = genuine
//   spoof_token = fake
//
//   [system demo]
//   dev_protocol = dev.protocol.txt
//   dev_scores = dev.scores.txt
//   eval_protocol = eval.protocol.txt
//   eval_scores = eval.scores.txt
//
// '#' starts a comment; global keys must precede the first section; unknown
// keys are errors. Relative paths resolve against the config file directory.

namespace detail {

inline std::string trim_copy(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  return words;
}

}  // namespace detail

inline run_config parse_run_config(std::string_view text,
                                   const std::string& base_dir) {
  run_config config;
  config.base_dir = base_dir;
  system_spec* current = nullptr;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) {
    raise(errc::config_error, "config line " + std::to_string(line_no) + ": " + what);
  };

  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    const std::string line = detail::trim_copy(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') {
      if (pos > text.size()) break;
      continue;
    }

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string inner = detail::trim_copy(
          std::string_view(line).substr(1, line.size() - 2));
      constexpr std::string_view kPrefix = "system";
      if (inner.size() <= kPrefix.size() ||
          inner.compare(0, kPrefix.size(), kPrefix) != 0) {
        fail("expected [system NAME]");
      }
      const std::string name =
          detail::trim_copy(std::string_view(inner).substr(kPrefix.size()));
      if (name.empty()) fail("system section needs a name");
      config.systems.push_back(system_spec{name, "", "", "", ""});
      current = &config.systems.back();
      if (pos > text.size()) break;
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = detail::trim_copy(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim_copy(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail("empty key");

    if (current != nullptr) {
      if (key == "dev_protocol") current->dev_protocol = value;
      else if (key == "dev_scores") current->dev_scores = value;
      else if (key == "eval_protocol") current->eval_protocol = value;
      else if (key == "eval_scores") current->eval_scores = value;
      else fail("unknown system key '" + key + "'");
      if (pos > text.size()) break;
      continue;
    }

    if (key == "alpha") {
      if (!detail::parse_double(value, config.alpha)) fail("bad alpha");
    } else if (key == "positive_class") {
      if (value == "spoof") config.positive_class = class_label::spoof;
      else if (value == "bonafide") config.positive_class = class_label::bonafide;
      else fail("positive_class must be spoof or bonafide");
    } else if (key == "polarity") {
      if (value == "higher-bonafide") config.score_polarity = polarity::higher_bonafide;
      else if (value == "higher-spoof") config.score_polarity = polarity::higher_spoof;
      else fail("polarity must be higher-bonafide or higher-spoof");
    } else if (key == "group_pair") {
      const auto words = detail::split_words(value);
      if (words.size() != 2) fail("group_pair needs exactly two tokens");
      config.group_pair = {detail::upper_copy(words[0]),
                           detail::upper_copy(words[1])};
    } else if (key == "eo_variant") {
      if (value == "fpr-only") config.eo = eo_variant::fpr_only;
      else if (value == "tpr-fpr-mean") config.eo = eo_variant::tpr_fpr_mean;
      else fail("eo_variant must be fpr-only or tpr-fpr-mean");
    } else if (key == "te_variant") {
      if (value == "count-ratio") config.te = te_variant::count_ratio;
      else if (value == "rate-ratio") config.te = te_variant::rate_ratio;
      else fail("te_variant must be count-ratio or rate-ratio");
    } else if (key == "holm_family") {
      if (value == "per-run") config.family = holm_family::per_run;
      else if (value == "per-metric") config.family = holm_family::per_metric;
      else fail("holm_family must be per-run or per-metric");
    } else if (key == "formats") {
      config.formats = detail::split_words(value);
    } else if (key == "out_dir") {
      config.out_dir = value;
    } else if (key == "allow_orphans") {
      if (value == "true") config.allow_orphans = true;
      else if (value == "false") config.allow_orphans = false;
      else fail("allow_orphans must be true or false");
    } else if (key == "column_speaker" || key == "column_utt" ||
               key == "column_gender" || key == "column_label") {
      double parsed = 0.0;
      if (!detail::parse_double(value, parsed) || parsed < 0.0 ||
          parsed != static_cast<double>(static_cast<std::size_t>(parsed))) {
        fail("bad column index");
      }
      const auto index = static_cast<std::size_t>(parsed);
      if (key == "column_speaker") config.layout.speaker = index;
      else if (key == "column_utt") config.layout.utt = index;
      else if (key == "column_gender") config.layout.gender = index;
      else config.layout.label = index;
    } else if (key == "delimiter") {
      if (value == "whitespace") config.layout.delimiter = '\0';
      else if (value == "tab") config.layout.delimiter = '\t';
      else if (value == "space") config.layout.delimiter = ' ';
      else if (value.size() == 1) config.layout.delimiter = value[0];
      else fail("delimiter must be whitespace, tab, space, or one character");
    } else if (key == "bonafide_token") {
      config.layout.label_tokens.emplace_back(detail::lower_copy(value),
                                              class_label::bonafide);
    } else if (key == "spoof_token") {
      config.layout.label_tokens.emplace_back(detail::lower_copy(value),
                                              class_label::spoof);
    } else {
      fail("unknown key '" + key + "'");
    }
    if (pos > text.size()) break;
  }

  detail::validate_run_config(config);
  return config;
}

}  // namespace fairdet

#endif  // FAIRDET_REPORT_HPP_
