#include "logtax/templating.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "logtax/error.hpp"
#include "parallel.hpp"

namespace logtax {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex_digit(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

/// Length of a leading "key=" ([A-Za-z_][A-Za-z0-9_.-]*=), or 0.
std::size_t key_prefix(std::string_view tok) {
  if (tok.empty() || !(std::isalpha(static_cast<unsigned char>(tok[0])) || tok[0] == '_')) return 0;
  for (std::size_t i = 1; i < tok.size(); ++i) {
    char c = tok[i];
    if (c == '=') return i + 1;
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return 0;
  }
  return 0;
}

bool all_digits(std::string_view v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), is_digit);
}

bool looks_num(std::string_view v) {
  if (!v.empty() && (v[0] == '-' || v[0] == '+')) v.remove_prefix(1);
  return all_digits(v);
}

// dotted quad with an optional :port
bool looks_ip(std::string_view v) {
  if (auto colon = v.find(':'); colon != std::string_view::npos) {
    if (!all_digits(v.substr(colon + 1))) return false;
    v = v.substr(0, colon);
  }
  int groups = 0;
  while (true) {
    auto dot = v.find('.');
    auto part = v.substr(0, dot);
    if (part.empty() || part.size() > 3 || !all_digits(part)) return false;
    ++groups;
    if (dot == std::string_view::npos) break;
    v.remove_prefix(dot + 1);
  }
  return groups == 4;
}

// 0x-prefixed hex, or at least two hex digits including a decimal digit
// (the digit keeps plain words such as "add" or "be" unmasked).
bool looks_hex(std::string_view v) {
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X'))
    return std::all_of(v.begin() + 2, v.end(), is_hex_digit);
  return v.size() >= 2 && std::all_of(v.begin(), v.end(), is_hex_digit) &&
         std::any_of(v.begin(), v.end(), is_digit);
}

// Drain prefix tree node; a leaf holds cluster ids.
struct Node {
  std::unordered_map<std::string, std::unique_ptr<Node>> children;
  std::vector<std::size_t> clusters;
};

class DrainMiner {
 public:
  explicit DrainMiner(const MinerConfig& config)
      : routingDepth_(config.treeDepth >= 3 ? config.treeDepth - 3 : 0),
        similarity_(config.similarityThreshold),
        maxChildren_(config.maxChildrenPerNode) {}

  void add(const std::vector<std::string>& tokens) {
    if (const Node* leaf = route_for_search(tokens)) {
      if (auto found = best_match(*leaf, tokens)) {
        auto& tmpl = clusters_[*found];
        for (std::size_t p = 0; p < tmpl.size(); ++p)
          if (tmpl[p] != tokens[p]) tmpl[p] = std::string(kWildcard);
        return;
      }
    }
    route_for_insert(tokens).clusters.push_back(clusters_.size());
    clusters_.push_back(tokens);
  }

  const std::vector<std::vector<std::string>>& clusters() const { return clusters_; }

 private:
  static bool has_digit(const std::string& token) {
    return std::any_of(token.begin(), token.end(), is_digit);
  }

  std::size_t routing_tokens(const std::vector<std::string>& tokens) const {
    return tokens.empty() ? 0 : std::min(routingDepth_, tokens.size() - 1);
  }

  // Exact child first, then the wildcard child; nullptr when neither exists.
  const Node* route_for_search(const std::vector<std::string>& tokens) const {
    auto root = roots_.find(tokens.size());
    if (root == roots_.end()) return nullptr;
    const Node* node = &root->second;
    const std::string wildcard(kWildcard);
    for (std::size_t d = 0, depth = routing_tokens(tokens); d < depth; ++d) {
      auto it = node->children.find(tokens[d]);
      if (it == node->children.end()) it = node->children.find(wildcard);
      if (it == node->children.end()) return nullptr;
      node = it->second.get();
    }
    return node;
  }

  // Creates the path for a new cluster. Tokens containing digits, and
  // unseen tokens at a node that is full, go to the wildcard child.
  Node& route_for_insert(const std::vector<std::string>& tokens) {
    Node* node = &roots_[tokens.size()];
    const std::string wildcard(kWildcard);
    for (std::size_t d = 0, depth = routing_tokens(tokens); d < depth; ++d) {
      const std::string& token = tokens[d];
      auto& kids = node->children;
      if (auto it = kids.find(token); it != kids.end()) {
        node = it->second.get();
        continue;
      }
      const std::string* key = &wildcard;
      if (has_digit(token)) {
        key = &wildcard;
      } else if (kids.contains(wildcard)) {
        if (kids.size() < maxChildren_) key = &token;
      } else if (kids.size() + 1 < maxChildren_) {
        key = &token;
      }
      auto& child = kids[*key];
      if (!child) child = std::make_unique<Node>();
      node = child.get();
    }
    return *node;
  }

  // Most similar cluster in the leaf if its similarity reaches the
  // threshold; ties prefer more wildcards, then the earlier cluster.
  std::optional<std::size_t> best_match(const Node& leaf, const std::vector<std::string>& tokens) const {
    if (tokens.empty()) {
      if (leaf.clusters.empty()) return std::nullopt;
      return leaf.clusters.front();
    }
    std::optional<std::size_t> best;
    std::size_t best_sim = 0;
    std::size_t best_params = 0;
    for (auto id : leaf.clusters) {
      const auto& tmpl = clusters_[id];
      std::size_t sim = 0;
      std::size_t params = 0;
      for (std::size_t p = 0; p < tmpl.size(); ++p) {
        if (tmpl[p] == kWildcard)
          ++params;
        else if (tmpl[p] == tokens[p])
          ++sim;
      }
      if (!best || sim > best_sim || (sim == best_sim && params > best_params)) {
        best = id;
        best_sim = sim;
        best_params = params;
      }
    }
    if (best && static_cast<double>(best_sim) / static_cast<double>(tokens.size()) >= similarity_)
      return best;
    return std::nullopt;
  }

  std::size_t routingDepth_;
  double similarity_;
  std::size_t maxChildren_;
  std::unordered_map<std::size_t, Node> roots_;
  std::vector<std::vector<std::string>> clusters_;
};

}  // namespace

struct MaskRule::CompiledRegex {
  std::regex re;
};

MaskRule MaskRule::builtin(std::string_view name) {
  MaskRule rule;
  if (name == "IP") {
    rule.kind_ = Kind::Ip;
    rule.pattern_ = "[key=]d.d.d.d[:port]";
  } else if (name == "NUM") {
    rule.kind_ = Kind::Num;
    rule.pattern_ = "[key=][+-]digits";
  } else if (name == "HEX") {
    rule.kind_ = Kind::Hex;
    rule.pattern_ = "[key=](0x hexdigits | >=2 hexdigits with a decimal digit)";
  } else {
    throw ValidationError("unknown built-in mask rule '" + std::string(name) + "'");
  }
  rule.name_ = std::string(name);
  rule.replacement_ = "<:" + rule.name_ + ":>";
  return rule;
}

MaskRule MaskRule::regex(std::string name, std::string pattern) {
  if (name.empty()) throw ValidationError("mask rule needs a name");
  MaskRule rule;
  rule.kind_ = Kind::Regex;
  try {
    rule.regex_ = std::make_shared<const CompiledRegex>(
        CompiledRegex{std::regex(pattern, std::regex::ECMAScript | std::regex::optimize)});
  } catch (const std::regex_error& e) {
    throw ValidationError("mask rule '" + name + "': bad pattern: " + e.what());
  }
  rule.replacement_ = "<:" + name + ":>";
  rule.name_ = std::move(name);
  rule.pattern_ = std::move(pattern);
  return rule;
}

std::optional<std::string> MaskRule::apply(std::string_view token) const {
  if (kind_ == Kind::Regex) {
    std::string tok(token);
    if (!std::regex_search(tok, regex_->re)) return std::nullopt;
    return std::regex_replace(tok, regex_->re, replacement_);
  }

  const std::size_t prefix = key_prefix(token);
  const std::string_view value = token.substr(prefix);
  bool hit = false;
  switch (kind_) {
    case Kind::Ip: hit = looks_ip(value); break;
    case Kind::Num: hit = looks_num(value); break;
    case Kind::Hex: hit = looks_hex(value); break;
    case Kind::Regex: break;
  }
  if (!hit) return std::nullopt;
  std::string out(token.substr(0, prefix));
  out += replacement_;
  return out;
}

std::vector<MaskRule> default_mask_rules() {
  return {MaskRule::builtin("IP"), MaskRule::builtin("NUM"), MaskRule::builtin("HEX")};
}

std::vector<MaskRule> parse_mask_rules(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("mask rules: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("mask rules: expected a JSON array");
  std::vector<MaskRule> rules;
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
      throw ValidationError("mask rules: every entry needs a string \"name\"");
    auto name = entry["name"].get<std::string>();
    if (entry.contains("pattern"))
      rules.push_back(MaskRule::regex(name, entry["pattern"].get<std::string>()));
    else
      rules.push_back(MaskRule::builtin(name));
  }
  return rules;
}

std::vector<MaskRule> load_mask_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mask rules file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mask_rules(ss.str());
}

TokenSequence tokenize(std::string_view content, std::span<const MaskRule> rules) {
  TokenSequence seq;
  std::size_t pos = 0;
  while (pos < content.size()) {
    while (pos < content.size() && is_ws(content[pos])) ++pos;
    if (pos == content.size()) break;
    std::size_t end = pos;
    while (end < content.size() && !is_ws(content[end])) ++end;
    std::string_view token = content.substr(pos, end - pos);

    std::optional<std::string> masked;
    for (const auto& rule : rules)
      if ((masked = rule.apply(token))) break;
    seq.tokens.push_back(masked ? std::move(*masked) : std::string(token));
    pos = end;
  }
  return seq;
}

void tokenize_corpus(LabeledCorpus& corpus, std::span<const MaskRule> rules, unsigned threads) {
  auto records = corpus.mutable_records();
  detail::parallel_chunks(records.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) records[i].tokens = tokenize(records[i].content, rules);
  });
}

std::size_t Template::wildcard_count() const {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), kWildcard));
}

bool Template::matches(const TokenSequence& seq) const {
  if (seq.length() != tokens.size()) return false;
  for (std::size_t p = 0; p < tokens.size(); ++p)
    if (tokens[p] != kWildcard && tokens[p] != seq.tokens[p]) return false;
  return true;
}

std::string Template::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t == kWildcard ? std::string_view("*") : std::string_view(t);
  }
  return out;
}

void MinerConfig::validate() const {
  if (treeDepth < 2) throw ValidationError("miner tree depth must be >= 2");
  if (!(similarityThreshold > 0.0 && similarityThreshold <= 1.0))
    throw ValidationError("miner similarity threshold must be in (0, 1]");
  if (maxChildrenPerNode < 1) throw ValidationError("miner max children must be >= 1");
}

TemplateIndex::TemplateIndex(std::span<const Template> templates) : templates_(templates) {
  for (const auto& t : templates) {
    auto& bucket = buckets_[t.length()];
    if (t.length() == 0 || t.is_wildcard(0))
      bucket.wildcardFirst.push_back(t.id);
    else
      bucket.byFirstToken[t.tokens[0]].push_back(t.id);
  }
}

std::optional<TemplateId> TemplateIndex::match(const TokenSequence& seq) const {
  auto bucket = buckets_.find(seq.length());
  if (bucket == buckets_.end()) return std::nullopt;

  std::optional<TemplateId> best;
  std::size_t best_literals = 0;
  auto consider = [&](TemplateId id) {
    const Template& t = templates_[id];
    if (!t.matches(seq)) return;
    std::size_t literals = t.literal_count();
    if (!best || literals > best_literals || (literals == best_literals && id < *best)) {
      best = id;
      best_literals = literals;
    }
  };
  if (!seq.empty()) {
    if (auto it = bucket->second.byFirstToken.find(seq.tokens[0]);
        it != bucket->second.byFirstToken.end())
      for (auto id : it->second) consider(id);
  }
  for (auto id : bucket->second.wildcardFirst) consider(id);
  return best;
}

std::vector<TemplateId> assign_templates(const LabeledCorpus& corpus,
                                         std::span<const Template> templates, unsigned threads) {
  for (std::size_t x = 0; x < templates.size(); ++x)
    if (templates[x].id != x) throw ConsistencyError("template ids must be dense and ordered");

  TemplateIndex index(templates);
  auto records = corpus.records();
  std::vector<TemplateId> assignment(records.size());
  std::vector<std::size_t> unmatched(detail::chunk_count(records.size(), threads), 0);
  detail::parallel_chunks(records.size(), threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      auto id = index.match(records[i].tokens);
      if (!id) {
        if (unmatched[c] == 0) unmatched[c] = i + 1;
        continue;
      }
      assignment[i] = *id;
    }
  });
  for (auto first : unmatched)
    if (first != 0)
      throw ConsistencyError("record " + std::to_string(first) + " matches no template");
  return assignment;
}

TemplateForest mine_templates(const LabeledCorpus& corpus, const MinerConfig& config, unsigned threads) {
  config.validate();
  if (corpus.empty()) throw ValidationError("empty corpus");

  DrainMiner miner(config);
  for (const auto& r : corpus.records()) miner.add(r.tokens.tokens);

  // Freeze: identical token lists collapse onto the earliest cluster.
  std::vector<Template> frozen;
  std::map<std::vector<std::string>, TemplateId> seen;
  for (const auto& tokens : miner.clusters()) {
    if (seen.contains(tokens)) continue;
    auto id = static_cast<TemplateId>(frozen.size());
    seen.emplace(tokens, id);
    frozen.push_back({id, tokens});
  }

  auto assignment = assign_templates(corpus, frozen, threads);

  // Drop templates that ended up without members and renumber densely.
  std::vector<char> used(frozen.size(), 0);
  for (auto id : assignment) used[id] = 1;
  std::vector<TemplateId> remap(frozen.size(), 0);
  TemplateForest forest;
  for (std::size_t x = 0; x < frozen.size(); ++x) {
    if (!used[x]) continue;
    remap[x] = static_cast<TemplateId>(forest.templates.size());
    forest.templates.push_back({remap[x], std::move(frozen[x].tokens)});
  }
  for (auto& id : assignment) id = remap[id];
  forest.assignment = std::move(assignment);
  return forest;
}

AttributeSet extract_attributes(const LogRecord& record, const Template& tmpl) {
  if (record.tokens.length() != tmpl.length())
    throw ConsistencyError("record " + std::to_string(record.index) + " has " +
                           std::to_string(record.tokens.length()) + " tokens but template " +
                           std::to_string(tmpl.id) + " has " + std::to_string(tmpl.length()));
  AttributeSet out;
  for (std::size_t p = 0; p < tmpl.length(); ++p)
    if (tmpl.is_wildcard(p)) out.attributes.push_back(record.tokens.tokens[p]);
  return out;
}

std::vector<AttributeSet> extract_all_attributes(const LabeledCorpus& corpus,
                                                 const TemplateForest& forest) {
  std::vector<AttributeSet> out;
  out.reserve(corpus.size());
  for (const auto& r : corpus.records()) out.push_back(extract_attributes(r, forest.template_of(r.index)));
  return out;
}

void write_forest_json(std::ostream& os, const TemplateForest& forest, const LabeledCorpus& corpus) {
  std::vector<std::size_t> normal(forest.templates.size(), 0);
  std::vector<std::size_t> anomalous(forest.templates.size(), 0);
  for (const auto& r : corpus.records())
    ++(r.anomalous() ? anomalous : normal)[forest.assignment[r.index - 1]];

  nlohmann::json templates = nlohmann::json::array();
  for (const auto& t : forest.templates) {
    templates.push_back({{"id", t.id},
                         {"tokens", t.tokens},
                         {"text", t.text()},
                         {"normalCount", normal[t.id]},
                         {"anomalousCount", anomalous[t.id]}});
  }
  nlohmann::json doc = {{"schemaVersion", 1}, {"wildcard", kWildcard}, {"templates", templates}};
  os << doc.dump(2) << '\n';
}

std::vector<Template> read_templates_json(std::istream& is) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("template forest: ") + e.what());
  }
  if (!doc.contains("templates") || !doc["templates"].is_array())
    throw ValidationError("template forest: missing \"templates\" array");
  std::vector<Template> out;
  for (const auto& entry : doc["templates"]) {
    Template t;
    t.id = entry.at("id").get<TemplateId>();
    t.tokens = entry.at("tokens").get<std::vector<std::string>>();
    if (t.id != out.size()) throw ValidationError("template forest: ids must be dense and ordered");
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace logtax
