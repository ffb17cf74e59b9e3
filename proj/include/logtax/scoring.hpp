#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "logtax/context.hpp"
#include "logtax/core_model.hpp"
#include "logtax/fraction.hpp"
#include "logtax/templating.hpp"

namespace logtax {

/// Occurrences of one key among anomalous and normal messages.
struct OccurrenceCounts {
  std::uint64_t anomalous = 0;
  std::uint64_t normal = 0;

  std::uint64_t total() const { return anomalous + normal; }
  void add(Label label, std::uint64_t n = 1) {
    (label == Label::Anomalous ? anomalous : normal) += n;
  }
  OccurrenceCounts& operator+=(const OccurrenceCounts& o) {
    anomalous += o.anomalous;
    normal += o.normal;
    return *this;
  }
  friend bool operator==(const OccurrenceCounts&, const OccurrenceCounts&) = default;
};

/// How attribute tokens are pooled when counting.
enum class AttributeKeying : std::uint8_t {
  Global,   // one bag of tokens across all templates and positions
  PerSlot,  // tokens counted separately per (template, wildcard slot)
};

std::string_view to_string(AttributeKeying keying);
AttributeKeying parse_attribute_keying(std::string_view text);

inline constexpr TemplateId kAnyTemplate = std::numeric_limits<TemplateId>::max();
inline constexpr std::uint32_t kAnySlot = std::numeric_limits<std::uint32_t>::max();

struct AttributeKey {
  TemplateId templateId = kAnyTemplate;
  std::uint32_t slot = kAnySlot;
  std::string token;

  friend bool operator==(const AttributeKey&, const AttributeKey&) = default;
};

struct AttributeKeyHash {
  std::size_t operator()(const AttributeKey& key) const noexcept;
};

/// Occurrence counts per template id, attribute token and context signature.
/// Each record adds one to its template and its context, and one per
/// attribute token it carries.
class CountTable {
 public:
  CountTable() = default;
  explicit CountTable(AttributeKeying keying) : keying_(keying) {}

  AttributeKeying keying() const { return keying_; }

  AttributeKey attribute_key(TemplateId tmpl, std::uint32_t slot, std::string token) const;

  const OccurrenceCounts* template_entry(TemplateId id) const;
  const OccurrenceCounts* attribute_entry(const AttributeKey& key) const;
  const OccurrenceCounts* context_entry(const ContextSignature& sig) const;

  const std::vector<OccurrenceCounts>& templates() const { return templates_; }
  const std::unordered_map<AttributeKey, OccurrenceCounts, AttributeKeyHash>& attributes() const {
    return attributes_;
  }
  const std::unordered_map<ContextSignature, OccurrenceCounts, ContextSignatureHash>& contexts()
      const {
    return contexts_;
  }

 private:
  friend CountTable build_count_table(const LabeledCorpus&, std::span<const TemplateId>,
                                      std::span<const AttributeSet>,
                                      std::span<const ContextSignature>, AttributeKeying,
                                      unsigned);
  void merge(CountTable&& shard);

  AttributeKeying keying_ = AttributeKeying::Global;
  std::vector<OccurrenceCounts> templates_;  // indexed by TemplateId
  std::unordered_map<AttributeKey, OccurrenceCounts, AttributeKeyHash> attributes_;
  std::unordered_map<ContextSignature, OccurrenceCounts, ContextSignatureHash> contexts_;
};

/// Counts are identical for any thread count.
CountTable build_count_table(const LabeledCorpus& corpus, std::span<const TemplateId> assignment,
                             std::span<const AttributeSet> attributes,
                             std::span<const ContextSignature> contexts,
                             AttributeKeying keying = AttributeKeying::Global,
                             unsigned threads = 1);

/// anomalous / (anomalous + normal) for one table entry.
Fraction anomaly_ratio(const OccurrenceCounts& counts);

/// Template score: share of the template's occurrences that are anomalous.
Fraction score_template(const OccurrenceCounts& entry);

/// Attribute score: the largest anomalous share among the message's
/// attribute tokens, or nullopt for a message without attributes.
/// `tmpl` is only consulted under AttributeKeying::PerSlot.
std::optional<Fraction> score_attribute(const AttributeSet& attrs, const CountTable& table,
                                        TemplateId tmpl = kAnyTemplate);

/// Context score: share of messages with this exact signature that are
/// anomalous. Throws ConsistencyError if the signature is not in the table.
Fraction score_context(const ContextSignature& sig, const CountTable& table);

struct ScoreTriple {
  Fraction alpha;
  std::optional<Fraction> beta;  // absent when the message has no attributes
  Fraction gamma;

  friend bool operator==(const ScoreTriple& a, const ScoreTriple& b) {
    auto same = [](const Fraction& x, const Fraction& y) { return x.same_representation(y); };
    if (a.beta.has_value() != b.beta.has_value()) return false;
    return same(a.alpha, b.alpha) && same(a.gamma, b.gamma) &&
           (!a.beta || same(*a.beta, *b.beta));
  }
};

struct ScoredMessage {
  std::size_t index = 0;
  TemplateId templateId = 0;
  Label label = Label::Anomalous;
  ScoreTriple scores;
};

/// Scores every anomalous message (and normal ones too when
/// `includeNormal`), in index order.
std::vector<ScoredMessage> score_corpus(const LabeledCorpus& corpus,
                                        std::span<const TemplateId> assignment,
                                        std::span<const AttributeSet> attributes,
                                        std::span<const ContextSignature> contexts,
                                        const CountTable& table, bool includeNormal = false);

/// CSV: index,templateId,label,alpha,beta,gamma followed by exact
/// numerator/denominator columns. beta columns are empty when absent.
void write_scores_csv(std::ostream& os, std::span<const ScoredMessage> scores);

}  // namespace logtax
