#include "fragrec/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "fragrec/augmentor.hpp"
#include "fragrec/corpus.hpp"
#include "fragrec/ngramlm.hpp"
#include "fragrec/scangen.hpp"
#include "fragrec/stats.hpp"

namespace fragrec {

namespace {

CorpusFormat parse_format(const std::string& name) {
  auto f = format_from_name(name);
  if (!f) throw CLI::ValidationError("--format", "unknown format: " + name);
  return *f;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open output file: " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

struct AugmentArgs {
  std::string input;
  std::string output;
  std::string format = "lines";
  std::string preset;
  std::string report_path;
  std::optional<int> max_parts;
  std::optional<int> max_tokens;
  std::optional<int> window;
  std::optional<int> max_fragment_count;
  std::optional<size_t> max_distinct_fragments;
  std::string env_mode;
  bool no_dedup = false;
  int threads = 1;
  unsigned seed = 0;  // reserved; the pipeline is deterministic

  AugmentConfig to_config() const {
    AugmentConfig cfg;
    if (!preset.empty()) {
      if (preset == "scan")
        cfg = AugmentConfig::scan_preset();
      else if (preset == "semparse")
        cfg = AugmentConfig::semparse_preset();
      else if (preset == "lm")
        cfg = AugmentConfig::lm_preset();
      else
        throw CLI::ValidationError("--preset", "unknown preset: " + preset);
    }
    if (max_parts) cfg.max_parts = *max_parts;
    if (max_tokens) cfg.max_tokens = *max_tokens;
    if (!env_mode.empty()) {
      if (env_mode == "full")
        cfg.env_mode = EnvMode::kFullTemplate;
      else if (env_mode == "window")
        cfg.env_mode = EnvMode::kWindow;
      else
        throw CLI::ValidationError("--env", "unknown environment mode: " + env_mode);
    }
    if (window) {
      cfg.window = *window;
      if (env_mode.empty()) cfg.env_mode = EnvMode::kWindow;
    }
    if (max_fragment_count) cfg.max_fragment_count = *max_fragment_count;
    if (max_distinct_fragments) cfg.max_distinct_fragments = *max_distinct_fragments;
    cfg.dedup = !no_dedup;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

int run_augment(const AugmentArgs& args) {
  AugmentConfig cfg = args.to_config();
  CorpusFormat format = parse_format(args.format);
  Dataset data = load_dataset(args.input, format);
  SynthesisReport report;
  Dataset augmented = augment(data, cfg, &report);
  save_dataset(augmented, format, args.output);
  if (!args.report_path.empty()) write_text_file(args.report_path, to_json(report));
  std::cout << "synthesized " << report.n_synthesized << " sequences ("
            << report.n_distinct_templates_used << " templates, "
            << report.n_distinct_fragments_used << " fragments)\n";
  return 0;
}

int run_stats(const std::string& train_path, const std::string& test_path,
              const std::string& format_name, const std::string& report_path) {
  CorpusFormat format = parse_format(format_name);
  auto vocab = std::make_shared<Vocabulary>();
  Dataset train = load_dataset(train_path, format, vocab);
  Dataset test = load_dataset(test_path, format, vocab);
  OverlapReport report = overlap_report(train, test);
  std::string json = to_json(report);
  std::cout << json << "\n";
  if (!report_path.empty()) write_text_file(report_path, json);
  return 0;
}

int run_scan_gen(const std::string& condition, const std::string& direction,
                 const std::string& train_out, const std::string& test_out,
                 const std::string& all_out) {
  Dataset all = scan_generate_all();
  if (!all_out.empty()) save_dataset(all, CorpusFormat::kScan, all_out);
  if (train_out.empty() && test_out.empty()) return 0;
  ScanSplit split;
  if (condition == "jump")
    split = ScanSplit::kAddPrimitiveJump;
  else if (condition == "around-right")
    split = ScanSplit::kAddTemplateAroundRight;
  else
    throw CLI::ValidationError("--condition", "unknown condition: " + condition);
  SplitPair pair = make_split(all, split);
  if (direction == "nacs") {
    pair.train = reverse_dataset(pair.train);
    pair.test = reverse_dataset(pair.test);
  } else if (direction != "scan") {
    throw CLI::ValidationError("--direction", "unknown direction: " + direction);
  }
  if (!train_out.empty()) save_dataset(pair.train, CorpusFormat::kScan, train_out);
  if (!test_out.empty()) save_dataset(pair.test, CorpusFormat::kScan, test_out);
  std::cout << "train " << pair.train.size() << " test " << pair.test.size() << "\n";
  return 0;
}

int run_validate(const std::string& input, const std::string& format_name,
                 const std::string& report_path) {
  CorpusFormat format = parse_format(format_name);
  Dataset data = load_dataset(input, format);
  size_t valid = 0;
  for (const Sequence& s : data.sequences)
    if (validate_pair(s, *data.vocab).valid) ++valid;
  nlohmann::ordered_json j;
  j["n_valid"] = valid;
  j["n_total"] = data.size();
  j["valid_fraction"] = data.empty() ? 0.0 : static_cast<double>(valid) / data.size();
  std::string json = j.dump(2);
  std::cout << json << "\n";
  if (!report_path.empty()) write_text_file(report_path, json);
  return 0;
}

int run_lm_train(const std::string& input, const std::string& model_out, int order,
                 const std::vector<std::string>& vocab_files) {
  Dataset data = load_dataset(input, CorpusFormat::kLines);
  std::vector<std::string> extra;
  for (const std::string& path : vocab_files) {
    Dataset extra_data = load_dataset(path, CorpusFormat::kLines, data.vocab);
    for (const Sequence& s : extra_data.sequences)
      for (TokenId t : s.tokens) extra.push_back(data.vocab->text(t));
  }
  NGramModel model = NGramModel::train(data, order, extra);
  model.save_arpa_file(model_out);
  std::cout << "trained order-" << order << " model on " << data.size() << " sentences\n";
  return 0;
}

int run_lm_eval(const std::string& model_path, const std::string& test_path,
                const std::string& interpolate_path, std::optional<double> weight,
                const std::string& validation_path, const std::string& report_path) {
  NGramModel base = NGramModel::load_arpa_file(model_path);
  Dataset test = load_dataset(test_path, CorpusFormat::kLines);
  nlohmann::ordered_json j;
  if (interpolate_path.empty()) {
    double ppl = perplexity(base, test);
    j["perplexity"] = ppl;
  } else {
    NGramModel aug = NGramModel::load_arpa_file(interpolate_path);
    InterpolatedModel mix{&base, &aug, weight.value_or(0.0)};
    if (!validation_path.empty()) {
      Dataset validation = load_dataset(validation_path, CorpusFormat::kLines);
      mix = select_weight(base, aug, validation);
      j["validation_perplexity"] = perplexity(mix, validation);
    } else if (!weight) {
      throw CLI::ValidationError("--interpolate", "requires --weight or --validation");
    }
    j["weight"] = mix.weight;
    j["perplexity"] = perplexity(mix, test);
  }
  std::string json = j.dump(2);
  std::cout << json << "\n";
  if (!report_path.empty()) write_text_file(report_path, json);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"fragment-recombination data augmentation for token sequences"};
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* augment_cmd = app.add_subcommand("augment", "synthesize new sequences and append them");
  augment_cmd->add_option("input", aug.input, "input corpus")->required();
  augment_cmd->add_option("output", aug.output, "augmented corpus")->required();
  augment_cmd->add_option("--format", aug.format, "corpus format: lines|tsv|scan");
  augment_cmd->add_option("--preset", aug.preset, "config preset: scan|semparse|lm");
  augment_cmd->add_option("--max-parts", aug.max_parts, "max parts per fragment");
  augment_cmd->add_option("--max-tokens", aug.max_tokens, "max total tokens per fragment");
  augment_cmd->add_option("--env", aug.env_mode, "environment mode: full|window");
  augment_cmd->add_option("--window", aug.window, "window size k (implies --env window)");
  augment_cmd->add_option("--max-fragment-count", aug.max_fragment_count,
                          "substitute in only fragments seen in fewer sequences than this");
  augment_cmd->add_option("--max-distinct-fragments", aug.max_distinct_fragments,
                          "memory guard: keep only the N most frequent fragments");
  augment_cmd->add_flag("--no-dedup", aug.no_dedup, "keep sequences that duplicate the input");
  augment_cmd->add_option("--threads", aug.threads, "worker threads");
  augment_cmd->add_option("--seed", aug.seed, "reserved; outputs are deterministic");
  augment_cmd->add_option("--report", aug.report_path, "write a synthesis report JSON");

  std::string stats_train, stats_test, stats_format = "lines", stats_report;
  auto* stats_cmd = app.add_subcommand("stats", "train/test overlap diagnostics");
  stats_cmd->add_option("--train", stats_train, "training corpus")->required();
  stats_cmd->add_option("--test", stats_test, "test corpus")->required();
  stats_cmd->add_option("--format", stats_format, "corpus format: lines|tsv|scan");
  stats_cmd->add_option("--report", stats_report, "write the overlap report JSON");

  std::string gen_condition = "jump", gen_direction = "scan";
  std::string gen_train_out, gen_test_out, gen_all_out;
  auto* gen_cmd = app.add_subcommand("scan-gen", "generate SCAN-style diagnostic splits");
  gen_cmd->add_option("--condition", gen_condition, "split condition: jump|around-right");
  gen_cmd->add_option("--direction", gen_direction, "scan|nacs (nacs swaps the sides)");
  gen_cmd->add_option("--train-out", gen_train_out, "training split path");
  gen_cmd->add_option("--test-out", gen_test_out, "test split path");
  gen_cmd->add_option("--all-out", gen_all_out, "full dataset path");

  std::string val_input, val_format = "scan", val_report;
  auto* val_cmd = app.add_subcommand("validate", "audit pairs with the command interpreter");
  val_cmd->add_option("input", val_input, "dataset to audit")->required();
  val_cmd->add_option("--format", val_format, "corpus format: tsv|scan");
  val_cmd->add_option("--report", val_report, "write the audit JSON");

  std::string lmt_input, lmt_model;
  int lmt_order = 5;
  std::vector<std::string> lmt_vocab_files;
  auto* lmt_cmd = app.add_subcommand("lm-train", "train a Kneser-Ney n-gram model");
  lmt_cmd->add_option("input", lmt_input, "training text, one sentence per line")->required();
  lmt_cmd->add_option("model", lmt_model, "output model path")->required();
  lmt_cmd->add_option("--order", lmt_order, "n-gram order");
  lmt_cmd->add_option("--vocab-extra", lmt_vocab_files,
                      "additional files whose tokens join the vocabulary");

  std::string lme_model, lme_test, lme_interpolate, lme_validation, lme_report;
  std::optional<double> lme_weight;
  auto* lme_cmd = app.add_subcommand("lm-eval", "perplexity evaluation");
  lme_cmd->add_option("model", lme_model, "model path")->required();
  lme_cmd->add_option("test", lme_test, "evaluation text")->required();
  lme_cmd->add_option("--interpolate", lme_interpolate, "second model to mix in");
  lme_cmd->add_option("--weight", lme_weight, "mixture weight on the second model");
  lme_cmd->add_option("--validation", lme_validation,
                      "select the weight from {0.05,0.1,0.5} on this text");
  lme_cmd->add_option("--report", lme_report, "write the evaluation JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (augment_cmd->parsed()) return run_augment(aug);
    if (stats_cmd->parsed()) return run_stats(stats_train, stats_test, stats_format, stats_report);
    if (gen_cmd->parsed())
      return run_scan_gen(gen_condition, gen_direction, gen_train_out, gen_test_out, gen_all_out);
    if (val_cmd->parsed()) return run_validate(val_input, val_format, val_report);
    if (lmt_cmd->parsed()) return run_lm_train(lmt_input, lmt_model, lmt_order, lmt_vocab_files);
    if (lme_cmd->parsed())
      return run_lm_eval(lme_model, lme_test, lme_interpolate, lme_weight, lme_validation,
                         lme_report);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace fragrec
