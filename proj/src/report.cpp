#include "logtax/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <string>

#include <json.hpp>

#include "logtax/error.hpp"

namespace logtax {

namespace {

bool in_unit_interval(Fraction f) { return f.den > 0 && f.num > 0 && f.num <= f.den; }

// "0.600000" -> "0.6", "1.000000" -> "1"
std::string compact_decimal(const Fraction& f) {
  std::string s = f.to_decimal(6);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string percent_text(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

}  // namespace

void ThresholdSweep::validate() const {
  if (thresholds.empty()) throw ValidationError("threshold sweep is empty");
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (!in_unit_interval(thresholds[k]))
      throw ValidationError("threshold " + compact_decimal(thresholds[k]) + " outside (0, 1]");
    if (k > 0 && !(thresholds[k - 1] < thresholds[k]))
      throw ValidationError("thresholds must be strictly ascending");
  }
}

ThresholdSweep ThresholdSweep::parse(std::string_view list) {
  ThresholdSweep sweep;
  sweep.thresholds.clear();
  while (true) {
    auto comma = list.find(',');
    auto item = list.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    sweep.thresholds.push_back(parse_decimal_fraction(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  sweep.validate();
  return sweep;
}

KindSet classify(const ScoreTriple& score, Fraction threshold) {
  if (!in_unit_interval(threshold))
    throw ValidationError("threshold " + compact_decimal(threshold) + " outside (0, 1]");
  KindSet kinds;
  if (score.alpha >= threshold) kinds.insert(AnomalyKind::Template);
  if (score.beta && *score.beta >= threshold) kinds.insert(AnomalyKind::Attribute);
  if (score.gamma >= threshold) kinds.insert(AnomalyKind::Contextual);
  return kinds;
}

DatasetStats dataset_statistics(const LabeledCorpus& corpus, std::span<const Template> templates,
                                std::span<const TemplateId> assignment) {
  if (assignment.size() != corpus.size()) throw ConsistencyError("assignment does not cover the corpus");
  std::vector<char> in_normal(templates.size(), 0);
  std::vector<char> in_anomalous(templates.size(), 0);
  for (const auto& r : corpus.records()) {
    auto id = assignment[r.index - 1];
    if (id >= templates.size()) throw ConsistencyError("assignment references unknown template");
    (r.anomalous() ? in_anomalous : in_normal)[id] = 1;
  }

  DatasetStats stats;
  stats.normalMessages = corpus.normal_count();
  stats.anomalousMessages = corpus.anomalous_count();
  stats.totalTemplates = templates.size();
  for (std::size_t x = 0; x < templates.size(); ++x) {
    stats.normalTemplates += in_normal[x];
    stats.anomalousTemplates += in_anomalous[x];
    stats.intersectionTemplates += in_normal[x] & in_anomalous[x];
  }
  return stats;
}

double TaxonomyReport::percent(std::size_t count) const {
  if (anomalousTotal == 0) return 0.0;
  return 100.0 * static_cast<double>(count) / static_cast<double>(anomalousTotal);
}

TaxonomyReport sweep_report(std::span<const ScoredMessage> scores, const ThresholdSweep& sweep) {
  sweep.validate();
  TaxonomyReport report;
  for (const auto& m : scores)
    if (m.label == Label::Anomalous) ++report.anomalousTotal;

  for (const auto& threshold : sweep.thresholds) {
    ThresholdRow row;
    row.threshold = threshold;
    for (const auto& m : scores) {
      if (m.label != Label::Anomalous) continue;
      KindSet kinds = classify(m.scores, threshold);
      for (auto k : kAllKinds)
        if (kinds.contains(k)) ++row.kindCounts[static_cast<std::size_t>(k)];
      if (kinds.empty())
        ++row.unclassified;
      else
        ++row.classified;
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_report_json(std::ostream& os, const TaxonomyReport& report) {
  using nlohmann::json;
  const auto& st = report.stats;
  const auto& cfg = report.config;

  json rows = json::array();
  for (const auto& row : report.rows) {
    json counts = json::object();
    json percentages = json::object();
    for (auto k : kAllKinds) {
      counts[std::string(to_string(k))] = row.count(k);
      percentages[std::string(to_string(k))] = report.percent(row.count(k));
    }
    rows.push_back({{"threshold", compact_decimal(row.threshold)},
                    {"thresholdExact", std::to_string(row.threshold.reduced().num) + "/" +
                                           std::to_string(row.threshold.reduced().den)},
                    {"counts", counts},
                    {"percentages", percentages},
                    {"classified", row.classified},
                    {"unclassified", row.unclassified},
                    {"unclassifiedPercentage", report.percent(row.unclassified)}});
  }

  json doc = {
      {"schemaVersion", kReportSchemaVersion},
      {"complete", true},
      {"dataset",
       {{"normalMessages", st.normalMessages},
        {"anomalousMessages", st.anomalousMessages},
        {"totalTemplates", st.totalTemplates},
        {"normalTemplates", st.normalTemplates},
        {"anomalousTemplates", st.anomalousTemplates},
        {"intersectionTemplates", st.intersectionTemplates},
        {"malformedLines", report.malformedLines}}},
      {"config",
       {{"input", cfg.input},
        {"format", cfg.format},
        {"limit", cfg.limit ? json(*cfg.limit) : json(nullptr)},
        {"miner",
         {{"treeDepth", cfg.minerDepth},
          {"similarityThreshold", cfg.minerSimilarity},
          {"maxChildrenPerNode", cfg.minerMaxChildren},
          {"maskRules", cfg.maskRules}}},
        {"context", {{"before", cfg.bounds.before}, {"after", cfg.bounds.after}}},
        {"attributeKeying", std::string(to_string(cfg.attributeKeying))}}},
      {"anomalousTotal", report.anomalousTotal},
      {"thresholds", rows},
  };
  os << doc.dump(2) << '\n';
}

void write_figure_csv(std::ostream& os, const TaxonomyReport& report) {
  os << "threshold,template,attribute,contextual,unclassified\n";
  for (const auto& row : report.rows) {
    os << compact_decimal(row.threshold);
    for (auto k : kAllKinds) os << ',' << percent_text(report.percent(row.count(k)));
    os << ',' << percent_text(report.percent(row.unclassified)) << '\n';
  }
}

void print_report_table(std::ostream& os, const TaxonomyReport& report) {
  const auto& st = report.stats;
  os << "messages:  " << st.normalMessages << " normal, " << st.anomalousMessages << " anomalous\n"
     << "templates: " << st.normalTemplates << " normal, " << st.anomalousTemplates << " anomalous, "
     << st.intersectionTemplates << " in both (" << st.totalTemplates << " total)\n\n";

  auto cell = [&](std::size_t count) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%zu (%.2f%%)", count, report.percent(count));
    return std::string(buf);
  };

  os << std::left << std::setw(11) << "threshold" << std::setw(22) << "template" << std::setw(22)
     << "attribute" << std::setw(22) << "contextual" << "unclassified\n";
  for (const auto& row : report.rows) {
    os << std::setw(11) << compact_decimal(row.threshold);
    for (auto k : kAllKinds) os << std::setw(22) << cell(row.count(k));
    os << cell(row.unclassified) << '\n';
  }
  os << std::right;
}

}  // namespace logtax
