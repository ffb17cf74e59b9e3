#include "logtax/pipeline.hpp"

#include "logtax/error.hpp"

namespace logtax {

AnalysisResult analyze(LabeledCorpus corpus, const PipelineConfig& config,
                       const std::vector<Template>* frozenTemplates) {
  if (corpus.empty()) throw ValidationError("empty corpus");
  config.miner.validate();
  config.sweep.validate();
  const unsigned threads = config.threads == 0 ? 1 : config.threads;

  AnalysisResult result;
  tokenize_corpus(corpus, config.miner.maskRules, threads);

  if (frozenTemplates) {
    result.forest.templates = *frozenTemplates;
    result.forest.assignment = assign_templates(corpus, result.forest.templates, threads);
  } else {
    result.forest = mine_templates(corpus, config.miner, threads);
  }

  result.attributes = extract_all_attributes(corpus, result.forest);
  result.contexts = build_all_contexts(result.forest.assignment, config.bounds, threads);
  result.table = build_count_table(corpus, result.forest.assignment, result.attributes,
                                   result.contexts, config.attributeKeying, threads);
  result.scores = score_corpus(corpus, result.forest.assignment, result.attributes, result.contexts,
                               result.table, config.scoreNormal);

  result.report = sweep_report(result.scores, config.sweep);
  result.report.stats = dataset_statistics(corpus, result.forest.templates, result.forest.assignment);

  auto& echo = result.report.config;
  echo.minerDepth = config.miner.treeDepth;
  echo.minerSimilarity = config.miner.similarityThreshold;
  echo.minerMaxChildren = config.miner.maxChildrenPerNode;
  for (const auto& rule : config.miner.maskRules) echo.maskRules.push_back(rule.name() + ": " + rule.pattern());
  echo.bounds = config.bounds;
  echo.attributeKeying = config.attributeKeying;

  result.corpus = std::move(corpus);
  return result;
}

}  // namespace logtax
