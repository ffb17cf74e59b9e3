#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "logtax/core_model.hpp"

namespace logtax {

/// Rewrites a volatile token (hex value, number, address) to a placeholder
/// of the form "<:NAME:>". A leading "key=" is kept, so "status=c4" becomes
/// "status=<:HEX:>".
class MaskRule {
 public:
  /// One of the built-in rules "IP", "NUM", "HEX".
  static MaskRule builtin(std::string_view name);
  /// Custom ECMAScript regex rule. A token matches when the regex is found
  /// anywhere in it; every match is then replaced by the mask token.
  static MaskRule regex(std::string name, std::string pattern);

  const std::string& name() const { return name_; }
  const std::string& pattern() const { return pattern_; }
  const std::string& replacement() const { return replacement_; }

  /// Masked token, or nullopt when the rule does not apply.
  std::optional<std::string> apply(std::string_view token) const;

 private:
  enum class Kind : std::uint8_t { Ip, Num, Hex, Regex };
  struct CompiledRegex;

  MaskRule() = default;

  Kind kind_ = Kind::Regex;
  std::string name_;
  std::string pattern_;
  std::string replacement_;
  std::shared_ptr<const CompiledRegex> regex_;
};

/// IP, NUM, HEX in that order.
std::vector<MaskRule> default_mask_rules();

/// JSON array of {"name": ..., "pattern": ...}. An entry without a pattern
/// names a built-in rule.
std::vector<MaskRule> load_mask_rules(const std::filesystem::path& path);
std::vector<MaskRule> parse_mask_rules(std::string_view json_text);

/// Splits on whitespace runs and rewrites each token with the first
/// matching rule.
TokenSequence tokenize(std::string_view content, std::span<const MaskRule> rules);

/// Tokenizes every record in place.
void tokenize_corpus(LabeledCorpus& corpus, std::span<const MaskRule> rules, unsigned threads = 1);

using TemplateId = std::uint32_t;

/// Wildcard marker inside Template::tokens.
inline constexpr std::string_view kWildcard = "<*>";

struct Template {
  TemplateId id = 0;
  std::vector<std::string> tokens;

  std::size_t length() const { return tokens.size(); }
  bool is_wildcard(std::size_t pos) const { return tokens[pos] == kWildcard; }
  std::size_t wildcard_count() const;
  std::size_t literal_count() const { return length() - wildcard_count(); }
  /// Whether every literal position equals the corresponding token.
  bool matches(const TokenSequence& seq) const;
  /// Space-joined with wildcards shown as "*", e.g. "Start * service at node *".
  std::string text() const;
};

struct AttributeSet {
  std::vector<std::string> attributes;

  std::size_t size() const { return attributes.size(); }
  bool empty() const { return attributes.empty(); }
  friend bool operator==(const AttributeSet&, const AttributeSet&) = default;
};

struct MinerConfig {
  std::size_t treeDepth = 4;
  double similarityThreshold = 0.4;
  std::size_t maxChildrenPerNode = 100;
  std::vector<MaskRule> maskRules = default_mask_rules();

  void validate() const;
};

/// Frozen templates plus the template of every record.
struct TemplateForest {
  std::vector<Template> templates;       // templates[x].id == x
  std::vector<TemplateId> assignment;    // record i -> assignment[i - 1]

  const Template& template_of(std::size_t index) const {
    return templates[assignment[index - 1]];
  }
};

/// Looks up the frozen template that a token sequence belongs to: among
/// templates of the same length whose literals all agree with the tokens,
/// the one with the most literal tokens wins, ties going to the lower id.
class TemplateIndex {
 public:
  explicit TemplateIndex(std::span<const Template> templates);

  std::optional<TemplateId> match(const TokenSequence& seq) const;

 private:
  struct LengthBucket {
    std::unordered_map<std::string, std::vector<TemplateId>> byFirstToken;
    std::vector<TemplateId> wildcardFirst;
  };

  std::span<const Template> templates_;
  std::unordered_map<std::size_t, LengthBucket> buckets_;
};

/// Drain-style mining over an already tokenized corpus. Pass one grows the
/// fixed-depth prefix tree in record order; the resulting templates are then
/// deduplicated, frozen, and every record is re-assigned against them.
/// Template ids are dense and ordered by first creation.
TemplateForest mine_templates(const LabeledCorpus& corpus, const MinerConfig& config,
                              unsigned threads = 1);

/// Assigns every record of a tokenized corpus against frozen templates.
/// Throws ConsistencyError if some record matches none of them.
std::vector<TemplateId> assign_templates(const LabeledCorpus& corpus,
                                         std::span<const Template> templates,
                                         unsigned threads = 1);

/// Tokens at the template's wildcard positions, in position order.
/// Throws ConsistencyError on a length mismatch.
AttributeSet extract_attributes(const LogRecord& record, const Template& tmpl);

std::vector<AttributeSet> extract_all_attributes(const LabeledCorpus& corpus,
                                                 const TemplateForest& forest);

/// {"schemaVersion", "templates": [{"id", "tokens", "text", "normalCount",
/// "anomalousCount"}]}; counts come from the assignment.
void write_forest_json(std::ostream& os, const TemplateForest& forest, const LabeledCorpus& corpus);

/// Reads the templates back from write_forest_json output.
std::vector<Template> read_templates_json(std::istream& is);

}  // namespace logtax
