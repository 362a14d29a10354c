// fairdet command-line front end.
//
// Subcommands:
//   eval      run the fairness evaluation described by a config file
//   simulate  generate a synthetic protocol/score/manifest triple
//   det       compute a DET curve and its EER for one protocol+score pair
//   check     validate protocol/score files and print counts
//
// Exit codes: 0 success, 1 usage/data errors, 2 internal consistency failure.
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

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairdet/fairdet.hpp"

namespace {

namespace fs = std::filesystem;
using fairdet::errc;
using fairdet::raise;

std::string env_out_dir() {
  const char* env = std::getenv("FAIRDET_OUT_DIR");
  return env != nullptr ? std::string(env) : std::string();
}

std::string pick_out_dir(const std::string& flag_value,
                         const std::string& config_value = std::string()) {
  if (!flag_value.empty()) return flag_value;
  if (!config_value.empty()) return config_value;
  const std::string env = env_out_dir();
  return env.empty() ? std::string(".") : env;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

fairdet::class_label parse_positive_class(const std::string& value) {
  if (value == "spoof") return fairdet::class_label::spoof;
  if (value == "bonafide") return fairdet::class_label::bonafide;
  raise(errc::config_error, "positive class must be spoof or bonafide");
}

fairdet::polarity parse_polarity(const std::string& value) {
  if (value == "higher-bonafide") return fairdet::polarity::higher_bonafide;
  if (value == "higher-spoof") return fairdet::polarity::higher_spoof;
  raise(errc::config_error, "polarity must be higher-bonafide or higher-spoof");
}

struct layout_flags {
  std::int64_t speaker = 0;
  std::int64_t utt = 1;
  std::int64_t gender = 2;
  std::int64_t label = 3;
  std::string delimiter = "whitespace";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--col-speaker", speaker, "Protocol column of the speaker id");
    cmd.add_option("--col-utt", utt, "Protocol column of the utterance id");
    cmd.add_option("--col-gender", gender, "Protocol column of the gender token");
    cmd.add_option("--col-label", label, "Protocol column of the class label");
    cmd.add_option("--delimiter", delimiter,
                   "Protocol delimiter: whitespace, tab, space, or one character");
  }

  fairdet::column_layout to_layout() const {
    fairdet::column_layout layout;
    if (speaker < 0 || utt < 0 || gender < 0 || label < 0) {
      raise(errc::config_error, "column indices must be non-negative");
    }
    layout.speaker = static_cast<std::size_t>(speaker);
    layout.utt = static_cast<std::size_t>(utt);
    layout.gender = static_cast<std::size_t>(gender);
    layout.label = static_cast<std::size_t>(label);
    if (delimiter == "whitespace") layout.delimiter = '\0';
    else if (delimiter == "tab") layout.delimiter = '\t';
    else if (delimiter == "space") layout.delimiter = ' ';
    else if (delimiter.size() == 1) layout.delimiter = delimiter[0];
    else raise(errc::config_error, "delimiter must be whitespace, tab, space, or one character");
    return layout;
  }
};

void write_outputs(const std::string& out_dir,
                   const std::vector<fairdet::named_output>& outputs) {
  fs::create_directories(out_dir);
  for (const fairdet::named_output& out : outputs) {
    const fs::path path = fs::path(out_dir) / out.filename;
    fairdet::write_file(path, out.bytes);
    std::printf("wrote %s\n", path.string().c_str());
  }
}

int run_eval(const std::string& config_path, const CLI::App& cmd,
             const std::string& alpha_s, const std::string& positive_s,
             const std::string& polarity_s, const std::string& eo_s,
             const std::string& te_s, const std::string& family_s,
             const std::vector<std::string>& formats,
             const std::string& out_dir_flag, bool allow_orphans, bool stamp) {
  const fs::path path(config_path);
  fairdet::run_config config = fairdet::parse_run_config(
      fairdet::read_file(path),
      path.has_parent_path() ? path.parent_path().string() : std::string("."));

  if (cmd.count("--alpha") > 0) {
    if (!fairdet::detail::parse_double(alpha_s, config.alpha)) {
      raise(errc::config_error, "bad --alpha value '" + alpha_s + "'");
    }
  }
  if (cmd.count("--positive-class") > 0) {
    config.positive_class = parse_positive_class(positive_s);
  }
  if (cmd.count("--polarity") > 0) {
    config.score_polarity = parse_polarity(polarity_s);
  }
  if (cmd.count("--eo-variant") > 0) {
    if (eo_s == "fpr-only") config.eo = fairdet::eo_variant::fpr_only;
    else if (eo_s == "tpr-fpr-mean") config.eo = fairdet::eo_variant::tpr_fpr_mean;
    else raise(errc::config_error, "--eo-variant must be fpr-only or tpr-fpr-mean");
  }
  if (cmd.count("--te-variant") > 0) {
    if (te_s == "count-ratio") config.te = fairdet::te_variant::count_ratio;
    else if (te_s == "rate-ratio") config.te = fairdet::te_variant::rate_ratio;
    else raise(errc::config_error, "--te-variant must be count-ratio or rate-ratio");
  }
  if (cmd.count("--holm-family") > 0) {
    if (family_s == "per-run") config.family = fairdet::holm_family::per_run;
    else if (family_s == "per-metric") config.family = fairdet::holm_family::per_metric;
    else raise(errc::config_error, "--holm-family must be per-run or per-metric");
  }
  if (cmd.count("--format") > 0) config.formats = formats;
  if (cmd.count("--allow-orphans") > 0) config.allow_orphans = allow_orphans;

  fairdet::report_bundle bundle = fairdet::run(config);
  if (stamp) bundle.generated_at = utc_timestamp();

  for (const fairdet::system_report& s : bundle.systems) {
    std::printf("system %s: threshold %.6g, dev EER %.2f%%, eval EER %.2f%% "
                "(%s %.2f%%, %s %.2f%%)\n",
                s.name.c_str(), s.op.threshold, 100.0 * s.op.eer_at_derivation,
                100.0 * s.eer_all, bundle.group_pair.first.c_str(),
                100.0 * s.eer_first, bundle.group_pair.second.c_str(),
                100.0 * s.eer_second);
  }

  const std::string out_dir = pick_out_dir(out_dir_flag, config.out_dir);
  std::vector<fairdet::named_output> outputs;
  for (const std::string& format : config.formats) {
    for (fairdet::named_output& out : fairdet::render(bundle, format)) {
      outputs.push_back(std::move(out));
    }
  }
  write_outputs(out_dir, outputs);
  return 0;
}

int run_simulate(std::uint64_t seed, const std::string& prefix,
                 const std::vector<std::string>& cell_specs,
                 const std::string& out_dir_flag) {
  fairdet::sim_config config;
  config.seed = seed;
  config.id_prefix = prefix;
  for (const std::string& spec : cell_specs) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = spec.find(',', start);
      fields.push_back(spec.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) {
      raise(errc::config_error,
            "--cell needs GROUP,LABEL,COUNT,MEAN,STDDEV: '" + spec + "'");
    }
    fairdet::group_class_model model;
    model.group = fairdet::detail::upper_copy(fields[0]);
    const std::string label = fairdet::detail::lower_copy(fields[1]);
    if (label == "bonafide") model.label = fairdet::class_label::bonafide;
    else if (label == "spoof") model.label = fairdet::class_label::spoof;
    else raise(errc::config_error, "cell label must be bonafide or spoof");
    try {
      model.count = std::stoll(fields[2]);
    } catch (const std::exception&) {
      raise(errc::config_error, "bad cell count '" + fields[2] + "'");
    }
    if (!fairdet::detail::parse_double(fields[3], model.mean) ||
        !fairdet::detail::parse_double(fields[4], model.stddev)) {
      raise(errc::config_error, "bad cell mean/stddev in '" + spec + "'");
    }
    config.models.push_back(std::move(model));
  }

  const fairdet::sim_output out = fairdet::generate(config);
  const std::string out_dir = pick_out_dir(out_dir_flag);
  write_outputs(out_dir, {{"protocol.txt", out.protocol_text},
                          {"scores.txt", out.score_text},
                          {"manifest.txt", out.manifest_text}});
  return 0;
}

int run_det(const std::string& protocol_path, const std::string& scores_path,
            const std::string& positive_s, const std::string& polarity_s,
            const layout_flags& layout, bool allow_orphans,
            const std::string& out_dir_flag) {
  const fairdet::polarity pol = parse_polarity(polarity_s);
  const fairdet::class_label positive = parse_positive_class(positive_s);
  const fairdet::evaluation_set set = fairdet::join_trials(
      fairdet::parse_protocol(fairdet::read_file(protocol_path), layout.to_layout()),
      fairdet::parse_scores(fairdet::read_file(scores_path)), pol, positive,
      allow_orphans);
  const fairdet::det_curve curve = fairdet::compute_det(set);
  const fairdet::eer_result eer = fairdet::compute_eer(curve);
  std::printf("trials %zu (positive %lld, negative %lld)\n", set.records.size(),
              static_cast<long long>(curve.n_pos),
              static_cast<long long>(curve.n_neg));
  std::printf("eer %.6f%% at oriented threshold %.17g\n", 100.0 * eer.eer,
              eer.threshold);
  std::printf("auc %.6f\n", fairdet::compute_auc(curve));
  const std::string out_dir = pick_out_dir(out_dir_flag);
  write_outputs(out_dir, {{"det.csv", fairdet::render_det_csv(curve)}});
  return 0;
}

int run_check(const std::string& protocol_path, const std::string& scores_path,
              const layout_flags& layout, bool allow_orphans) {
  std::vector<fairdet::trial_record> trials;
  std::vector<fairdet::score_record> scores;
  if (!protocol_path.empty()) {
    trials = fairdet::parse_protocol(fairdet::read_file(protocol_path),
                                     layout.to_layout());
    std::int64_t bonafide = 0;
    std::map<std::string, std::int64_t> groups;
    for (const fairdet::trial_record& t : trials) {
      if (t.label == fairdet::class_label::bonafide) ++bonafide;
      ++groups[t.group];
    }
    std::printf("protocol: %zu trials, %lld bonafide, %lld spoof\n",
                trials.size(), static_cast<long long>(bonafide),
                static_cast<long long>(trials.size() - bonafide));
    for (const auto& [group, n] : groups) {
      std::printf("  group %s: %lld\n", group.c_str(),
                  static_cast<long long>(n));
    }
  }
  if (!scores_path.empty()) {
    scores = fairdet::parse_scores(fairdet::read_file(scores_path));
    std::printf("scores: %zu entries\n", scores.size());
  }
  if (!protocol_path.empty() && !scores_path.empty()) {
    fairdet::join_summary summary;
    const fairdet::evaluation_set set = fairdet::join_trials(
        trials, scores, fairdet::polarity::higher_bonafide,
        fairdet::class_label::spoof, allow_orphans, &summary);
    std::printf("join: %lld scored trials, %zu orphan scores\n",
                static_cast<long long>(summary.n_total),
                summary.orphan_utts.size());
    (void)set;
  }
  std::printf("ok\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-fairness evaluation for binary detection scores"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fairdet::kVersion));

  // eval
  auto* eval_cmd = app.add_subcommand(
      "eval", "Run the fairness evaluation described by a config file");
  std::string config_path;
  std::string alpha_s, positive_s = "spoof", polarity_s = "higher-bonafide";
  std::string eo_s, te_s, family_s, eval_out_dir;
  std::vector<std::string> formats;
  bool eval_allow_orphans = false;
  bool stamp = false;
  eval_cmd->add_option("--config", config_path, "Evaluation config file")
      ->required();
  eval_cmd->add_option("--alpha", alpha_s, "Significance level in (0,1)");
  eval_cmd->add_option("--positive-class", positive_s, "spoof or bonafide");
  eval_cmd->add_option("--polarity", polarity_s,
                       "higher-bonafide or higher-spoof");
  eval_cmd->add_option("--eo-variant", eo_s, "fpr-only or tpr-fpr-mean");
  eval_cmd->add_option("--te-variant", te_s, "count-ratio or rate-ratio");
  eval_cmd->add_option("--holm-family", family_s, "per-run or per-metric");
  eval_cmd->add_option("--format", formats,
                       "Output format(s): markdown, csv, json");
  eval_cmd->add_option("--out-dir", eval_out_dir, "Output directory");
  eval_cmd->add_flag("--allow-orphans", eval_allow_orphans,
                     "Ignore scores whose utterance is missing from the protocol");
  eval_cmd->add_flag("--stamp", stamp, "Embed a UTC timestamp in the report");

  // simulate
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Generate a synthetic protocol/score/manifest triple");
  std::uint64_t seed = 1;
  std::string prefix = "SIM";
  std::vector<std::string> cells;
  std::string sim_out_dir;
  sim_cmd->add_option("--seed", seed, "Generator seed");
  sim_cmd->add_option("--prefix", prefix, "Utterance id prefix");
  sim_cmd->add_option("--cell", cells, "GROUP,LABEL,COUNT,MEAN,STDDEV")
      ->required();
  sim_cmd->add_option("--out-dir", sim_out_dir, "Output directory");

  // det
  auto* det_cmd = app.add_subcommand(
      "det", "Compute the DET curve and EER for one protocol+score pair");
  std::string det_protocol, det_scores, det_out_dir;
  std::string det_positive = "spoof", det_polarity = "higher-bonafide";
  bool det_allow_orphans = false;
  layout_flags det_layout;
  det_cmd->add_option("--protocol", det_protocol, "Protocol file")->required();
  det_cmd->add_option("--scores", det_scores, "Score file")->required();
  det_cmd->add_option("--positive-class", det_positive, "spoof or bonafide");
  det_cmd->add_option("--polarity", det_polarity,
                      "higher-bonafide or higher-spoof");
  det_cmd->add_flag("--allow-orphans", det_allow_orphans,
                    "Ignore scores whose utterance is missing from the protocol");
  det_cmd->add_option("--out-dir", det_out_dir, "Output directory");
  det_layout.add_to(*det_cmd);

  // check
  auto* check_cmd = app.add_subcommand(
      "check", "Validate protocol/score files and print counts");
  std::string check_protocol, check_scores;
  bool check_allow_orphans = false;
  layout_flags check_layout;
  check_cmd->add_option("--protocol", check_protocol, "Protocol file");
  check_cmd->add_option("--scores", check_scores, "Score file");
  check_cmd->add_flag("--allow-orphans", check_allow_orphans,
                      "Ignore scores whose utterance is missing from the protocol");
  check_layout.add_to(*check_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(eval_cmd)) {
      return run_eval(config_path, *eval_cmd, alpha_s, positive_s, polarity_s,
                      eo_s, te_s, family_s, formats, eval_out_dir,
                      eval_allow_orphans, stamp);
    }
    if (app.got_subcommand(sim_cmd)) {
      return run_simulate(seed, prefix, cells, sim_out_dir);
    }
    if (app.got_subcommand(det_cmd)) {
      return run_det(det_protocol, det_scores, det_positive, det_polarity,
                     det_layout, det_allow_orphans, det_out_dir);
    }
    if (app.got_subcommand(check_cmd)) {
      if (check_protocol.empty() && check_scores.empty()) {
        raise(errc::config_error, "check needs --protocol and/or --scores");
      }
      return run_check(check_protocol, check_scores, check_layout,
                       check_allow_orphans);
    }
  } catch (const fairdet::error& e) {
    std::fprintf(stderr, "fairdet: error [%s]: %s\n",
                 std::string(fairdet::to_string(e.code())).c_str(), e.what());
    return e.code() == errc::cross_check_mismatch ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fairdet: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
