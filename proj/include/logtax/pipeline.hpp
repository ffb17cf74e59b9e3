#pragma once

#include <vector>

#include "logtax/context.hpp"
#include "logtax/core_model.hpp"
#include "logtax/report.hpp"
#include "logtax/scoring.hpp"
#include "logtax/templating.hpp"

namespace logtax {

struct PipelineConfig {
  MinerConfig miner;
  ContextBounds bounds;
  ThresholdSweep sweep;
  AttributeKeying attributeKeying = AttributeKeying::Global;
  bool scoreNormal = false;
  unsigned threads = 1;
};

struct AnalysisResult {
  LabeledCorpus corpus;
  TemplateForest forest;
  std::vector<AttributeSet> attributes;
  std::vector<ContextSignature> contexts;
  CountTable table;
  std::vector<ScoredMessage> scores;
  TaxonomyReport report;
};

/// tokenize -> mine -> attributes -> contexts -> counts -> scores -> report.
/// With `frozenTemplates` the mining step is replaced by assignment against
/// those templates.
AnalysisResult analyze(LabeledCorpus corpus, const PipelineConfig& config,
                       const std::vector<Template>* frozenTemplates = nullptr);

}  // namespace logtax
