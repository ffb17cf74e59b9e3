#include "logtax/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "logtax/error.hpp"
#include "logtax/ingest.hpp"
#include "logtax/pipeline.hpp"
#include "logtax/synthetic.hpp"

namespace logtax {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutDirEnv = "LOGTAX_OUT_DIR";
constexpr const char* kIncompleteMarker = "INCOMPLETE";

struct AnalyzeOptions {
  std::string input;
  std::string format = "generic";
  std::optional<std::size_t> limit;
  std::size_t before = 10;
  std::size_t after = 0;
  std::string thresholds = "0.6,0.7,0.8,0.9,1.0";
  std::string outDir;
  unsigned threads = 1;
  std::string maskRules;
  std::size_t minerDepth = 4;
  double minerSimilarity = 0.4;
  std::size_t minerMaxChildren = 100;
  std::string attributeKeying = "global";
  std::string templates;
  bool dumpScores = false;
  bool dumpContexts = false;
  bool scoreNormal = false;
};

struct SynthOptions {
  std::string out;
  std::string truth;
  std::size_t messages = 1000;
  double anomalyRate = 0.1;
  std::uint64_t seed = 7;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  return os;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  auto os = open_output(path);
  fn(os);
  os.flush();
  if (!os) throw IoError("error writing '" + path.string() + "'");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();

  PipelineConfig config;
  config.miner.treeDepth = opt.minerDepth;
  config.miner.similarityThreshold = opt.minerSimilarity;
  config.miner.maxChildrenPerNode = opt.minerMaxChildren;
  if (!opt.maskRules.empty()) config.miner.maskRules = load_mask_rules(opt.maskRules);
  config.miner.validate();
  config.bounds = {opt.before, opt.after};
  config.sweep = ThresholdSweep::parse(opt.thresholds);
  config.attributeKeying = parse_attribute_keying(opt.attributeKeying);
  config.scoreNormal = opt.scoreNormal;
  config.threads = std::max(1u, opt.threads);
  const DatasetFormat format = dataset_preset(opt.format);

  std::optional<std::vector<Template>> frozen;
  if (!opt.templates.empty()) {
    std::ifstream in(opt.templates);
    if (!in) throw IoError("cannot open template forest '" + opt.templates + "'");
    frozen = read_templates_json(in);
  }

  fs::path outDir = opt.outDir;
  if (outDir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    outDir = env && *env ? env : "logtax-out";
  }
  fs::create_directories(outDir);
  const fs::path marker = outDir / kIncompleteMarker;
  write_file(marker, [](std::ostream& os) { os << "run in progress\n"; });

  try {
    auto read = read_dataset(opt.input, format, opt.limit);
    const auto& sum = read.summary;
    err << "read " << sum.linesRead << " lines: " << sum.recordsEmitted << " records, "
        << sum.malformedLines << " malformed";
    if (!sum.malformedSamples.empty()) {
      err << " (first at line";
      for (auto l : sum.malformedSamples) err << ' ' << l;
      err << ')';
    }
    err << '\n';

    AnalysisResult result = analyze(std::move(read.corpus), config, frozen ? &*frozen : nullptr);
    auto& report = result.report;
    report.malformedLines = sum.malformedLines;
    report.config.input = opt.input;
    report.config.format = format.name;
    report.config.limit = opt.limit;

    write_file(outDir / "templates.json",
               [&](std::ostream& os) { write_forest_json(os, result.forest, result.corpus); });
    if (opt.dumpScores)
      write_file(outDir / "scores.csv", [&](std::ostream& os) { write_scores_csv(os, result.scores); });
    if (opt.dumpContexts)
      write_file(outDir / "contexts.csv", [&](std::ostream& os) { write_contexts_csv(os, result.contexts); });
    write_file(outDir / "taxonomy.csv", [&](std::ostream& os) { write_figure_csv(os, report); });
    write_file(outDir / "report.txt", [&](std::ostream& os) { print_report_table(os, report); });
    write_file(outDir / "report.json", [&](std::ostream& os) { write_report_json(os, report); });

    print_report_table(out, report);
    fs::remove(marker);
    err << "wrote " << outDir.string() << " in " << seconds_since(t0) << " s\n";
    return 0;
  } catch (const std::exception& e) {
    std::ofstream(marker, std::ios::app) << "failed: " << e.what() << '\n';
    throw;
  }
}

int run_synth(const SynthOptions& opt, std::ostream& err) {
  auto spec = random_synthetic_spec(opt.seed, opt.messages, opt.anomalyRate);
  auto synth = generate_synthetic(spec);
  write_file(opt.out, [&](std::ostream& os) { write_generic(os, synth.corpus); });
  if (!opt.truth.empty()) {
    write_file(opt.truth, [&](std::ostream& os) {
      os << "index,kinds\n";
      for (std::size_t i = 0; i < synth.truth.size(); ++i) {
        os << i + 1 << ',';
        bool first = true;
        for (auto k : kAllKinds) {
          if (!synth.truth[i].contains(k)) continue;
          os << (first ? "" : ";") << to_string(k);
          first = false;
        }
        os << '\n';
      }
    });
  }
  err << "wrote " << synth.corpus.size() << " messages (" << synth.corpus.anomalous_count()
      << " anomalous) to " << opt.out << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify anomalies in labeled logs into template, attribute and contextual anomalies"};
  app.require_subcommand(1);

  AnalyzeOptions a;
  auto* analyze_cmd = app.add_subcommand("analyze", "Run the full classification pipeline on a labeled log");
  analyze_cmd->add_option("--input", a.input, "Labeled log file (plain or gzip)")->required();
  analyze_cmd->add_option("--format,--preset", a.format, "Dataset preset: bgl, thunderbird, spirit, generic")
      ->capture_default_str();
  analyze_cmd->add_option("--limit", a.limit, "Read at most this many records");
  analyze_cmd->add_option("--context-before", a.before, "Messages before each message in its context")
      ->capture_default_str();
  analyze_cmd->add_option("--context-after", a.after, "Messages after each message in its context")
      ->capture_default_str();
  analyze_cmd->add_option("--thresholds", a.thresholds, "Comma separated ascending thresholds in (0,1]")
      ->capture_default_str();
  analyze_cmd->add_option("--out-dir", a.outDir,
                          std::string("Output directory (default $") + kOutDirEnv + " or ./logtax-out)");
  analyze_cmd->add_option("--threads", a.threads, "Worker threads; results do not depend on it")
      ->capture_default_str();
  analyze_cmd->add_option("--mask-rules", a.maskRules, "JSON file with mask rules");
  analyze_cmd->add_option("--miner-depth", a.minerDepth, "Prefix tree depth")->capture_default_str();
  analyze_cmd->add_option("--miner-similarity", a.minerSimilarity, "Similarity threshold in (0,1]")
      ->capture_default_str();
  analyze_cmd->add_option("--miner-max-children", a.minerMaxChildren, "Max children per tree node")
      ->capture_default_str();
  analyze_cmd->add_option("--attribute-keying", a.attributeKeying, "global or per-slot")->capture_default_str();
  analyze_cmd->add_option("--templates", a.templates, "Reuse a templates.json instead of mining");
  analyze_cmd->add_flag("--dump-scores", a.dumpScores, "Write scores.csv");
  analyze_cmd->add_flag("--dump-contexts", a.dumpContexts, "Write contexts.csv");
  analyze_cmd->add_flag("--score-normal", a.scoreNormal, "Also score normal messages in scores.csv");

  SynthOptions s;
  auto* synth_cmd = app.add_subcommand("synth", "Write a random synthetic labeled log in the generic format");
  synth_cmd->add_option("--out", s.out, "Output log file")->required();
  synth_cmd->add_option("--truth", s.truth, "Also write the injected anomaly kinds as CSV");
  synth_cmd->add_option("--messages", s.messages, "Number of messages")->capture_default_str();
  synth_cmd->add_option("--anomaly-rate", s.anomalyRate, "Fraction of injected anomalies")->capture_default_str();
  synth_cmd->add_option("--seed", s.seed, "PRNG seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (analyze_cmd->parsed()) return run_analyze(a, out, err);
    return run_synth(s, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace logtax
