#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "logtax/error.hpp"
#include "logtax/pipeline.hpp"
#include "logtax/scoring.hpp"
#include "logtax/synthetic.hpp"
#include "support/test_util.hpp"

namespace logtax {
namespace {

using testing::compare_with_oracle;
using testing::make_corpus;
using testing::oracle_scores;

PipelineConfig bounds_config(std::size_t before, std::size_t after) {
  PipelineConfig c;
  c.bounds = {before, after};
  return c;
}

TEST(CountTable, SameTemplateCountsBothColumns) {
  auto result = analyze(make_corpus({{true, "disk full"}, {true, "disk full"}, {false, "disk full"}}), {});
  ASSERT_EQ(result.table.templates().size(), 1u);
  EXPECT_EQ(result.table.templates()[0], (OccurrenceCounts{2, 1}));
}

// Hand-assembled inputs: records 1-10 carry attribute p (3 anomalous),
// records 11-20 carry q (9 anomalous).
struct HandTable {
  LabeledCorpus corpus;
  std::vector<TemplateId> assignment;
  std::vector<AttributeSet> attributes;
  std::vector<ContextSignature> contexts;
};

HandTable hand_table() {
  HandTable h;
  std::vector<std::pair<bool, std::string>> lines;
  for (int k = 0; k < 20; ++k) {
    bool anomalous = k < 10 ? k < 3 : k - 10 < 9;
    lines.emplace_back(anomalous, "");
    h.assignment.push_back(0);
    h.attributes.push_back({{k < 10 ? "p" : "q"}});
    h.contexts.push_back({{static_cast<TemplateId>(k % 2)}});
  }
  h.corpus = make_corpus(lines);
  return h;
}

TEST(ScoreTemplate, Ratios) {
  EXPECT_TRUE(score_template({5, 0}).same_representation({5, 5}));
  EXPECT_EQ(score_template({5, 0}).value(), 1.0);
  EXPECT_EQ(score_template({0, 3}).value(), 0.0);
  EXPECT_THROW(score_template({0, 0}), ConsistencyError);
}

TEST(ScoreTemplate, ThreeOfFourAgainstOracle) {
  auto result = analyze(
      make_corpus({{true, "fan speed low"}, {false, "fan speed low"}, {true, "fan speed low"}, {true, "fan speed low"}}),
      {});
  auto expected = oracle_scores(result, {10, 0});
  ASSERT_EQ(expected.size(), 3u);
  EXPECT_EQ(expected[0].alpha.num, 3u);
  EXPECT_EQ(expected[0].alpha.den, 4u);
  for (const auto& m : result.scores) EXPECT_EQ(m.scores.alpha.value(), 0.75);
  EXPECT_EQ(compare_with_oracle(result.scores, expected), "");
}

TEST(ScoreAttribute, SingleTokenAgainstOracle) {
  std::vector<std::pair<bool, std::string>> lines;
  for (int k = 0; k < 10; ++k) lines.emplace_back(k < 2, "login by x");
  for (int k = 0; k < 5; ++k) lines.emplace_back(false, "login by y");
  auto result = analyze(make_corpus(lines), {});
  ASSERT_EQ(result.forest.templates.size(), 1u);
  ASSERT_EQ(result.forest.templates[0].text(), "login by *");

  auto expected = oracle_scores(result, {10, 0});
  ASSERT_EQ(expected.size(), 2u);
  ASSERT_TRUE(expected[0].beta);
  EXPECT_EQ(expected[0].beta->num, 2u);
  EXPECT_EQ(expected[0].beta->den, 10u);
  EXPECT_EQ(result.scores[0].scores.beta->value(), 0.2);
  EXPECT_EQ(compare_with_oracle(result.scores, expected), "");
}

TEST(ScoreAttribute, MaximumOverTokens) {
  auto h = hand_table();
  auto table = build_count_table(h.corpus, h.assignment, h.attributes, h.contexts);
  EXPECT_EQ(*score_attribute({{"p"}}, table), Fraction(3, 10));
  EXPECT_EQ(*score_attribute({{"q"}}, table), Fraction(9, 10));
  EXPECT_TRUE(score_attribute({{"p", "q"}}, table)->same_representation({9, 10}));
  EXPECT_TRUE(score_attribute({{"q", "p"}}, table)->same_representation({9, 10}));
}

TEST(ScoreAttribute, AbsentWithoutAttributes) {
  auto h = hand_table();
  auto table = build_count_table(h.corpus, h.assignment, h.attributes, h.contexts);
  EXPECT_FALSE(score_attribute({}, table));
  EXPECT_THROW(score_attribute({{"never-seen"}}, table), ConsistencyError);

  auto result = analyze(make_corpus({{true, "kernel panic"}, {false, "all good here"}}), {});
  ASSERT_EQ(result.scores.size(), 1u);
  EXPECT_FALSE(result.scores[0].scores.beta);
}

TEST(ScoreAttribute, PerSlotKeyingSeparatesTemplates) {
  // "x" is anomalous in the login template but normal in the logout one
  std::vector<std::pair<bool, std::string>> lines;
  for (int k = 0; k < 4; ++k) lines.emplace_back(true, "login by x");
  lines.emplace_back(false, "login by y");
  for (int k = 0; k < 4; ++k) lines.emplace_back(false, "logout from x");
  lines.emplace_back(false, "logout from z");

  PipelineConfig global;
  auto g = analyze(make_corpus(lines), global);
  EXPECT_TRUE(g.scores[0].scores.beta->same_representation({4, 8}));
  EXPECT_EQ(compare_with_oracle(g.scores, oracle_scores(g, global.bounds)), "");

  PipelineConfig per_slot;
  per_slot.attributeKeying = AttributeKeying::PerSlot;
  auto p = analyze(make_corpus(lines), per_slot);
  EXPECT_TRUE(p.scores[0].scores.beta->same_representation({4, 4}));
  EXPECT_EQ(compare_with_oracle(p.scores, oracle_scores(p, per_slot.bounds, true)), "");
}

TEST(ScoreContext, Ratios) {
  auto h = hand_table();
  auto table = build_count_table(h.corpus, h.assignment, h.attributes, h.contexts);
  // contexts alternate {0},{1}; {0} holds records 1,3,...,19, seven anomalous
  EXPECT_TRUE(score_context({{0}}, table).same_representation({7, 10}));
  EXPECT_THROW(score_context({{7}}, table), ConsistencyError);
}

TEST(ScoreContext, OnlyAroundAnomalies) {
  // a=1: the signature is the previous message's template. Messages 3-6
  // follow "alarm raised" and all of them are anomalous.
  auto result = analyze(make_corpus({{false, "boot start"},
                                     {true, "alarm raised"},
                                     {true, "alarm raised"},
                                     {true, "alarm raised"},
                                     {true, "alarm raised"},
                                     {true, "boot start"},
                                     {false, "fan check"},
                                     {false, "boot start"},
                                     {false, "fan check"}}),
                        bounds_config(1, 0));
  for (const auto& m : result.scores) {
    if (m.index >= 3 && m.index <= 6) EXPECT_TRUE(m.scores.gamma.same_representation({4, 4})) << m.index;
  }
  EXPECT_EQ(compare_with_oracle(result.scores, oracle_scores(result, {1, 0})), "");
}

TEST(ScoreContext, OneAnomalousOfFour) {
  // signature {A} appears four times; one of them is anomalous
  auto result = analyze(make_corpus({{false, "a start"},
                                     {false, "b next"},
                                     {false, "a start"},
                                     {true, "b next"},
                                     {false, "a start"},
                                     {false, "b next"},
                                     {false, "a start"},
                                     {false, "b next"}}),
                        bounds_config(1, 0));
  ASSERT_EQ(result.scores.size(), 1u);
  auto expected = oracle_scores(result, {1, 0});
  EXPECT_EQ(expected[0].gamma.num, 1u);
  EXPECT_EQ(expected[0].gamma.den, 4u);
  EXPECT_EQ(result.scores[0].scores.gamma.value(), 0.25);
}

TEST(ScoreContext, PeriodicInterruptionIsUnique) {
  // A B C repeated with one extra B: the C after "B B" is the only message
  // whose two predecessors form the set {B}.
  std::vector<std::pair<bool, std::string>> lines;
  const char* cycle[] = {"alpha start job", "beta run step", "gamma end job"};
  std::size_t interrupted = 0;
  for (int k = 0; k < 30; ++k) {
    lines.emplace_back(false, cycle[k % 3]);
    if (k == 16) {  // a B
      lines.emplace_back(false, cycle[1]);
      interrupted = lines.size() + 1;
    }
  }
  lines[interrupted - 1].first = true;
  ASSERT_EQ(lines[interrupted - 1].second, "gamma end job");

  auto result = analyze(make_corpus(lines), bounds_config(2, 0));
  ASSERT_EQ(result.scores.size(), 1u);
  EXPECT_EQ(result.scores[0].index, interrupted);
  EXPECT_TRUE(result.scores[0].scores.gamma.same_representation({1, 1}));

  std::size_t same_signature = 0;
  for (const auto& sig : result.contexts) same_signature += sig == result.contexts[interrupted - 1];
  EXPECT_EQ(same_signature, 1u);
  EXPECT_EQ(compare_with_oracle(result.scores, oracle_scores(result, {2, 0})), "");
}

TEST(CountTable, EqualsBruteForceRecount) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    auto spec = random_synthetic_spec(seed, 800, 0.15);
    auto result = analyze(generate_synthetic(spec).corpus, {});

    std::map<TemplateId, OccurrenceCounts> templates;
    std::map<std::string, OccurrenceCounts> attributes;
    std::map<std::vector<TemplateId>, OccurrenceCounts> contexts;
    for (const auto& r : result.corpus.records()) {
      const auto& t = result.forest.template_of(r.index);
      templates[t.id].add(r.label);
      for (std::size_t p = 0; p < t.length(); ++p)
        if (t.is_wildcard(p)) attributes[r.tokens.tokens[p]].add(r.label);
      std::set<TemplateId> window;
      for (std::size_t j = r.index > 10 ? r.index - 10 : 1; j < r.index; ++j)
        window.insert(result.forest.assignment[j - 1]);
      contexts[{window.begin(), window.end()}].add(r.label);
    }

    const auto& table = result.table;
    ASSERT_EQ(table.templates().size(), templates.size());
    for (const auto& [id, counts] : templates) EXPECT_EQ(*table.template_entry(id), counts);
    ASSERT_EQ(table.attributes().size(), attributes.size());
    for (const auto& [token, counts] : attributes)
      EXPECT_EQ(*table.attribute_entry(table.attribute_key(0, 0, token)), counts);
    ASSERT_EQ(table.contexts().size(), contexts.size());
    for (const auto& [ids, counts] : contexts) EXPECT_EQ(*table.context_entry({ids}), counts);
  }
}

TEST(CountTable, ShardCountDoesNotMatter) {
  auto result = analyze(generate_synthetic(random_synthetic_spec(11, 3000, 0.2)).corpus, {});
  for (unsigned threads : {2u, 3u, 7u}) {
    auto table = build_count_table(result.corpus, result.forest.assignment, result.attributes,
                                   result.contexts, AttributeKeying::Global, threads);
    EXPECT_EQ(table.templates(), result.table.templates());
    EXPECT_EQ(table.attributes(), result.table.attributes());
    EXPECT_EQ(table.contexts(), result.table.contexts());
  }
}

TEST(CountTable, RejectsMismatchedInputs) {
  auto h = hand_table();
  h.attributes.pop_back();
  EXPECT_THROW(build_count_table(h.corpus, h.assignment, h.attributes, h.contexts), ConsistencyError);
}

TEST(ScoreCorpus, AllNormalGivesNothing) {
  auto result = analyze(make_corpus({{false, "a b"}, {false, "a c"}}), {});
  EXPECT_TRUE(result.scores.empty());
}

TEST(ScoreCorpus, IncludeNormalScoresEveryone) {
  PipelineConfig c;
  c.scoreNormal = true;
  auto result = analyze(make_corpus({{false, "a b"}, {true, "a c"}, {false, "x"}}), c);
  ASSERT_EQ(result.scores.size(), 3u);
  EXPECT_EQ(result.report.anomalousTotal, 1u);
}

TEST(ScoreCorpus, MatchesOracleOnSyntheticCorpora) {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    PipelineConfig c = bounds_config(seed % 5, seed % 3);
    auto result = analyze(generate_synthetic(random_synthetic_spec(seed, 1500, 0.1)).corpus, c);
    EXPECT_EQ(result.scores.size(), result.corpus.anomalous_count());
    EXPECT_EQ(compare_with_oracle(result.scores, oracle_scores(result, c.bounds)), "") << "seed " << seed;
  }
}

TEST(ScoreCorpus, AlphaDependsOnlyOnTemplate) {
  auto result = analyze(generate_synthetic(random_synthetic_spec(5, 2000, 0.3)).corpus, {});
  std::map<TemplateId, Fraction> alpha;
  for (const auto& m : result.scores) {
    auto [it, inserted] = alpha.emplace(m.templateId, m.scores.alpha);
    if (!inserted) EXPECT_TRUE(it->second.same_representation(m.scores.alpha));
  }
}

TEST(ScoresCsv, Format) {
  std::vector<ScoredMessage> scores(2);
  scores[0] = {3, 1, Label::Anomalous, {{2, 3}, std::nullopt, {1, 1}}};
  scores[1] = {7, 0, Label::Anomalous, {{1, 2}, Fraction{1, 8}, {0, 4}}};
  std::ostringstream os;
  write_scores_csv(os, scores);
  EXPECT_EQ(os.str(),
            "index,templateId,alpha,beta,gamma,alpha_num,alpha_den,beta_num,beta_den,gamma_num,gamma_den,label\n"
            "3,1,0.666667,,1.000000,2,3,,,1,1,anomalous\n"
            "7,0,0.500000,0.125000,0.000000,1,2,1,8,0,4,anomalous\n");
}

TEST(AttributeKeying, Parse) {
  EXPECT_EQ(parse_attribute_keying("global"), AttributeKeying::Global);
  EXPECT_EQ(parse_attribute_keying("per-slot"), AttributeKeying::PerSlot);
  EXPECT_THROW(parse_attribute_keying("positional"), ValidationError);
}

}  // namespace
}  // namespace logtax
