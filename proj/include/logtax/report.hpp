#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logtax/context.hpp"
#include "logtax/core_model.hpp"
#include "logtax/fraction.hpp"
#include "logtax/scoring.hpp"
#include "logtax/templating.hpp"

namespace logtax {

inline constexpr int kReportSchemaVersion = 1;

/// Strictly ascending thresholds in (0, 1].
struct ThresholdSweep {
  std::vector<Fraction> thresholds = {{6, 10}, {7, 10}, {8, 10}, {9, 10}, {1, 1}};

  void validate() const;
  /// Comma separated decimals, e.g. "0.6,0.7,1".
  static ThresholdSweep parse(std::string_view list);
};

/// Kinds whose score is present and >= threshold. Throws ValidationError for
/// a threshold outside (0, 1].
KindSet classify(const ScoreTriple& score, Fraction threshold);

struct DatasetStats {
  std::size_t normalMessages = 0;
  std::size_t anomalousMessages = 0;
  std::size_t totalTemplates = 0;
  std::size_t normalTemplates = 0;     // templates occurring in normal messages
  std::size_t anomalousTemplates = 0;  // templates occurring in anomalous messages
  std::size_t intersectionTemplates = 0;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_statistics(const LabeledCorpus& corpus, std::span<const Template> templates,
                                std::span<const TemplateId> assignment);

struct ThresholdRow {
  Fraction threshold;
  std::array<std::size_t, 3> kindCounts{};  // indexed by AnomalyKind
  std::size_t classified = 0;               // messages with at least one kind
  std::size_t unclassified = 0;

  std::size_t count(AnomalyKind k) const { return kindCounts[static_cast<std::size_t>(k)]; }
};

/// Run settings copied into the report.
struct ConfigEcho {
  std::string input;
  std::string format;
  std::optional<std::size_t> limit;
  std::size_t minerDepth = 0;
  double minerSimilarity = 0;
  std::size_t minerMaxChildren = 0;
  std::vector<std::string> maskRules;
  ContextBounds bounds;
  AttributeKeying attributeKeying = AttributeKeying::Global;
};

struct TaxonomyReport {
  std::size_t anomalousTotal = 0;
  std::vector<ThresholdRow> rows;
  DatasetStats stats;
  ConfigEcho config;
  std::size_t malformedLines = 0;

  /// Share of anomalous messages, in [0, 100].
  double percent(std::size_t count) const;
};

/// Per-threshold classification counts over the anomalous messages in
/// `scores`; normal messages, if present, are ignored.
TaxonomyReport sweep_report(std::span<const ScoredMessage> scores, const ThresholdSweep& sweep);

void write_report_json(std::ostream& os, const TaxonomyReport& report);
/// threshold,template,attribute,contextual,unclassified percentages.
void write_figure_csv(std::ostream& os, const TaxonomyReport& report);
void print_report_table(std::ostream& os, const TaxonomyReport& report);

}  // namespace logtax
