#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "logtax/error.hpp"
#include "logtax/templating.hpp"
#include "support/properties.hpp"
#include "support/test_util.hpp"

namespace logtax {
namespace {

using testing::make_corpus;

std::vector<std::string> toks(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

TemplateForest mine(LabeledCorpus& corpus, const MinerConfig& config = {}) {
  tokenize_corpus(corpus, config.maskRules);
  return mine_templates(corpus, config);
}

TEST(Tokenize, SplitsOnWhitespace) {
  auto rules = default_mask_rules();
  EXPECT_EQ(tokenize("Start mail service at node wally001", rules).tokens,
            toks({"Start", "mail", "service", "at", "node", "wally001"}));
  EXPECT_EQ(tokenize("  a\t\tb  c ", rules).tokens, toks({"a", "b", "c"}));
  EXPECT_TRUE(tokenize("", rules).empty());
  EXPECT_TRUE(tokenize(" \t ", rules).empty());
}

TEST(Tokenize, HexMaskKeepsKey) {
  auto rules = default_mask_rules();
  EXPECT_EQ(tokenize("status=c4", rules).tokens, toks({"status=<:HEX:>"}));
  EXPECT_EQ(tokenize("status=0x51 { }", rules).tokens, toks({"status=<:HEX:>", "{", "}"}));
  EXPECT_EQ(tokenize("addr 0x00544eb8 ok", rules).tokens, toks({"addr", "<:HEX:>", "ok"}));
}

TEST(Tokenize, DefaultMasks) {
  auto rules = default_mask_rules();
  EXPECT_EQ(tokenize("port 8080 from 10.1.2.3:22 pid=-17", rules).tokens,
            toks({"port", "<:NUM:>", "from", "<:IP:>", "pid=<:NUM:>"}));
  // plain words made of hex letters and mixed alphanumerics stay literal
  EXPECT_EQ(tokenize("add be face wally001 dn228", rules).tokens,
            toks({"add", "be", "face", "wally001", "dn228"}));
  // case is preserved
  EXPECT_EQ(tokenize("ERROR error", rules).tokens, toks({"ERROR", "error"}));
}

TEST(Tokenize, FirstMatchingRuleWins) {
  std::vector<MaskRule> rules = {MaskRule::regex("NODE", "^wally[0-9]+$"), MaskRule::builtin("HEX")};
  EXPECT_EQ(tokenize("wally001 c4", rules).tokens, toks({"<:NODE:>", "<:HEX:>"}));
  std::vector<MaskRule> none;
  EXPECT_EQ(tokenize("wally001 c4", none).tokens, toks({"wally001", "c4"}));
}

TEST(MaskRules, ParseJson) {
  auto rules = parse_mask_rules(R"([{"name": "HEX"}, {"name": "USER", "pattern": "user[0-9]+"}])");
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].replacement(), "<:HEX:>");
  EXPECT_EQ(*rules[1].apply("by=user42"), "by=<:USER:>");
  EXPECT_FALSE(rules[1].apply("root"));
  EXPECT_THROW(parse_mask_rules("{}"), ValidationError);
  EXPECT_THROW(parse_mask_rules(R"([{"name": "BOGUS"}])"), ValidationError);
  EXPECT_THROW(parse_mask_rules(R"([{"name": "X", "pattern": "("}])"), ValidationError);
}

TEST(MineTemplates, WorkedExample) {
  auto corpus = make_corpus({{false, "Start mail service at node wally001"},
                             {false, "Start printer service at node wally005"}});
  auto forest = mine(corpus);
  ASSERT_EQ(forest.templates.size(), 1u);
  EXPECT_EQ(forest.templates[0].text(), "Start * service at node *");
  EXPECT_EQ(forest.assignment, (std::vector<TemplateId>{0, 0}));

  EXPECT_EQ(extract_attributes(corpus.at(1), forest.templates[0]).attributes, toks({"mail", "wally001"}));
  EXPECT_EQ(extract_attributes(corpus.at(2), forest.templates[0]).attributes, toks({"printer", "wally005"}));
}

TEST(MineTemplates, SingleMessage) {
  auto corpus = make_corpus({{true, "disk failure on sda"}});
  auto forest = mine(corpus);
  ASSERT_EQ(forest.templates.size(), 1u);
  EXPECT_EQ(forest.templates[0].tokens, toks({"disk", "failure", "on", "sda"}));
  EXPECT_EQ(forest.templates[0].wildcard_count(), 0u);
  EXPECT_TRUE(extract_attributes(corpus.at(1), forest.templates[0]).empty());
}

TEST(MineTemplates, SeparatesDissimilarMessages) {
  auto corpus = make_corpus({{false, "session opened for user root"},
                             {false, "session closed for user root"},
                             {false, "kernel panic now"},
                             {false, "session opened for user alice"},
                             {false, ""},
                             {false, ""}});
  auto forest = mine(corpus);
  std::set<std::string> texts;
  for (const auto& t : forest.templates) texts.insert(t.text());
  EXPECT_EQ(texts, (std::set<std::string>{"session * for user *", "kernel panic now", ""}));
  EXPECT_EQ(forest.assignment[4], forest.assignment[5]);
}

TEST(MineTemplates, IdsDenseInCreationOrder) {
  auto corpus = make_corpus({{false, "alpha one"}, {false, "beta two"}, {false, "alpha one"}, {false, "gamma x y"}});
  auto forest = mine(corpus);
  ASSERT_EQ(forest.templates.size(), 3u);
  for (std::size_t x = 0; x < 3; ++x) EXPECT_EQ(forest.templates[x].id, x);
  EXPECT_EQ(forest.assignment, (std::vector<TemplateId>{0, 1, 0, 2}));
}

TEST(MineTemplates, ReassignsEarlyMessagesAfterFreeze) {
  // The first message is mined before its template gains a wildcard; after
  // the freeze both messages share the final template.
  auto corpus = make_corpus({{false, "job a finished ok"}, {false, "job b finished ok"}, {false, "job a finished ok"}});
  auto forest = mine(corpus);
  ASSERT_EQ(forest.templates.size(), 1u);
  EXPECT_EQ(forest.templates[0].text(), "job * finished ok");
}

TEST(MineTemplates, MaxChildrenRoutesToWildcard) {
  MinerConfig config;
  config.maxChildrenPerNode = 2;
  auto corpus = make_corpus({{false, "aa x y"}, {false, "bb x y"}, {false, "cc x y"}, {false, "dd x y"}});
  auto forest = mine(corpus, config);
  // "aa" gets its own child, the rest share the wildcard child and merge
  ASSERT_EQ(forest.templates.size(), 2u);
  EXPECT_EQ(forest.templates[0].text(), "aa x y");
  EXPECT_EQ(forest.templates[1].text(), "* x y");
}

TEST(MineTemplates, SimilarityThreshold) {
  auto lines = std::vector<std::pair<bool, std::string>>{{false, "a b c d e"}, {false, "a x y z w"}};
  MinerConfig loose;
  loose.similarityThreshold = 0.2;
  auto c1 = make_corpus(lines);
  EXPECT_EQ(mine(c1, loose).templates.size(), 1u);
  MinerConfig strict;
  strict.similarityThreshold = 0.4;
  auto c2 = make_corpus(lines);
  EXPECT_EQ(mine(c2, strict).templates.size(), 2u);
}

TEST(MinerConfig, Validation) {
  MinerConfig c;
  c.treeDepth = 1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.similarityThreshold = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c.similarityThreshold = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(ExtractAttributes, LengthMismatchIsConsistencyError) {
  LogRecord r;
  r.index = 1;
  r.tokens.tokens = toks({"a", "b"});
  Template t{0, toks({"a", "<*>", "c"})};
  EXPECT_THROW(extract_attributes(r, t), ConsistencyError);
}

TEST(TemplateIndex, PrefersMostSpecific) {
  std::vector<Template> templates = {{0, toks({"<*>", "service", "<*>"})},
                                     {1, toks({"start", "service", "<*>"})},
                                     {2, toks({"start", "service", "mail"})}};
  TemplateIndex index(templates);
  EXPECT_EQ(index.match({toks({"start", "service", "mail"})}), 2u);
  EXPECT_EQ(index.match({toks({"start", "service", "dns"})}), 1u);
  EXPECT_EQ(index.match({toks({"stop", "service", "dns"})}), 0u);
  EXPECT_FALSE(index.match({toks({"stop", "daemon", "dns"})}));
  EXPECT_FALSE(index.match({toks({"start", "service"})}));
}

TEST(ForestJson, RoundTripAndReuse) {
  auto corpus = make_corpus({{false, "Start mail service at node wally001"},
                             {true, "Start printer service at node wally005"},
                             {true, "disk failure"}});
  auto forest = mine(corpus);
  std::stringstream ss;
  write_forest_json(ss, forest, corpus);
  EXPECT_NE(ss.str().find("\"anomalousCount\""), std::string::npos);

  auto templates = read_templates_json(ss);
  ASSERT_EQ(templates.size(), forest.templates.size());
  for (std::size_t x = 0; x < templates.size(); ++x) EXPECT_EQ(templates[x].tokens, forest.templates[x].tokens);
  EXPECT_EQ(assign_templates(corpus, templates), forest.assignment);

  auto unseen = make_corpus({{false, "completely new message"}});
  tokenize_corpus(unseen, default_mask_rules());
  EXPECT_THROW(assign_templates(unseen, templates), ConsistencyError);
}

// Mining invariants on random corpora.
TEST(MineTemplatesProperty, LengthLiteralAgreementAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto c = testing::random_case(seed, 10, 300);
    auto corpus = c.corpus;
    tokenize_corpus(corpus, c.config.miner.maskRules);
    auto forest = mine_templates(corpus, c.config.miner);
    auto again = mine_templates(corpus, c.config.miner, 1 + static_cast<unsigned>(seed % 4));
    ASSERT_EQ(forest.assignment, again.assignment) << "seed " << seed;

    std::set<std::vector<std::string>> distinct;
    std::set<std::pair<std::size_t, std::string>> routes;
    for (const auto& t : forest.templates) {
      EXPECT_TRUE(distinct.insert(t.tokens).second) << "duplicate template, seed " << seed;
      if (t.length() > 1) EXPECT_GE(t.literal_count(), 1u) << t.text();
    }
    for (const auto& r : corpus.records()) {
      const auto& t = forest.template_of(r.index);
      ASSERT_EQ(t.length(), r.tokens.length()) << "seed " << seed;
      EXPECT_TRUE(t.matches(r.tokens)) << "seed " << seed;
      routes.emplace(r.tokens.length(), r.tokens.empty() ? "" : r.tokens.tokens[0]);
    }
    EXPECT_LE(forest.templates.size(), routes.size() * c.config.miner.maxChildrenPerNode);
  }
}

}  // namespace
}  // namespace logtax
