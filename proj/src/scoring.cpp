#include "logtax/scoring.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "logtax/error.hpp"
#include "parallel.hpp"

namespace logtax {

std::string_view to_string(AttributeKeying keying) {
  return keying == AttributeKeying::Global ? "global" : "per-slot";
}

AttributeKeying parse_attribute_keying(std::string_view text) {
  if (text == "global") return AttributeKeying::Global;
  if (text == "per-slot") return AttributeKeying::PerSlot;
  throw ValidationError("attribute keying must be 'global' or 'per-slot', got '" + std::string(text) + "'");
}

std::size_t AttributeKeyHash::operator()(const AttributeKey& key) const noexcept {
  std::size_t h = std::hash<std::string>{}(key.token);
  h ^= (static_cast<std::size_t>(key.templateId) * 0x9E3779B97F4A7C15ULL) + (h << 6) + (h >> 2);
  h ^= (static_cast<std::size_t>(key.slot) * 0xC2B2AE3D27D4EB4FULL) + (h << 6) + (h >> 2);
  return h;
}

AttributeKey CountTable::attribute_key(TemplateId tmpl, std::uint32_t slot, std::string token) const {
  if (keying_ == AttributeKeying::Global) return {kAnyTemplate, kAnySlot, std::move(token)};
  return {tmpl, slot, std::move(token)};
}

const OccurrenceCounts* CountTable::template_entry(TemplateId id) const {
  if (id >= templates_.size() || templates_[id].total() == 0) return nullptr;
  return &templates_[id];
}

const OccurrenceCounts* CountTable::attribute_entry(const AttributeKey& key) const {
  auto it = attributes_.find(key);
  return it == attributes_.end() ? nullptr : &it->second;
}

const OccurrenceCounts* CountTable::context_entry(const ContextSignature& sig) const {
  auto it = contexts_.find(sig);
  return it == contexts_.end() ? nullptr : &it->second;
}

void CountTable::merge(CountTable&& shard) {
  if (templates_.size() < shard.templates_.size()) templates_.resize(shard.templates_.size());
  for (std::size_t x = 0; x < shard.templates_.size(); ++x) templates_[x] += shard.templates_[x];
  for (auto& [key, counts] : shard.attributes_) attributes_[key] += counts;
  for (auto& [sig, counts] : shard.contexts_) contexts_[sig] += counts;
}

CountTable build_count_table(const LabeledCorpus& corpus, std::span<const TemplateId> assignment,
                             std::span<const AttributeSet> attributes,
                             std::span<const ContextSignature> contexts, AttributeKeying keying,
                             unsigned threads) {
  const std::size_t n = corpus.size();
  if (assignment.size() != n || attributes.size() != n || contexts.size() != n)
    throw ConsistencyError("count table inputs must cover every record");

  const std::size_t n_templates =
      assignment.empty() ? 0 : static_cast<std::size_t>(*std::max_element(assignment.begin(), assignment.end())) + 1;
  auto records = corpus.records();

  std::vector<CountTable> shards(detail::chunk_count(n, threads), CountTable(keying));
  detail::parallel_chunks(n, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    CountTable& t = shards[c];
    t.templates_.resize(n_templates);
    for (std::size_t i = b; i < e; ++i) {
      const Label label = records[i].label;
      const TemplateId tmpl = assignment[i];
      t.templates_[tmpl].add(label);
      const auto& attrs = attributes[i].attributes;
      for (std::size_t slot = 0; slot < attrs.size(); ++slot)
        t.attributes_[t.attribute_key(tmpl, static_cast<std::uint32_t>(slot), attrs[slot])].add(label);
      t.contexts_[contexts[i]].add(label);
    }
  });

  CountTable table(keying);
  table.templates_.resize(n_templates);
  for (auto& shard : shards) table.merge(std::move(shard));
  return table;
}

Fraction anomaly_ratio(const OccurrenceCounts& counts) {
  if (counts.total() == 0) throw ConsistencyError("score requested for a key with no occurrences");
  return {counts.anomalous, counts.total()};
}

Fraction score_template(const OccurrenceCounts& entry) { return anomaly_ratio(entry); }

std::optional<Fraction> score_attribute(const AttributeSet& attrs, const CountTable& table,
                                        TemplateId tmpl) {
  std::optional<Fraction> best;
  for (std::size_t slot = 0; slot < attrs.size(); ++slot) {
    const auto* entry =
        table.attribute_entry(table.attribute_key(tmpl, static_cast<std::uint32_t>(slot), attrs.attributes[slot]));
    if (!entry) throw ConsistencyError("attribute '" + attrs.attributes[slot] + "' missing from count table");
    Fraction s = anomaly_ratio(*entry);
    if (!best || s > *best) best = s;
  }
  return best;
}

Fraction score_context(const ContextSignature& sig, const CountTable& table) {
  const auto* entry = table.context_entry(sig);
  if (!entry) throw ConsistencyError("context signature missing from count table");
  return anomaly_ratio(*entry);
}

std::vector<ScoredMessage> score_corpus(const LabeledCorpus& corpus,
                                        std::span<const TemplateId> assignment,
                                        std::span<const AttributeSet> attributes,
                                        std::span<const ContextSignature> contexts,
                                        const CountTable& table, bool includeNormal) {
  std::vector<ScoredMessage> out;
  out.reserve(includeNormal ? corpus.size() : corpus.anomalous_count());
  for (const auto& r : corpus.records()) {
    if (!r.anomalous() && !includeNormal) continue;
    const std::size_t pos = r.index - 1;
    const TemplateId tmpl = assignment[pos];
    const auto* entry = table.template_entry(tmpl);
    if (!entry) throw ConsistencyError("template " + std::to_string(tmpl) + " missing from count table");

    ScoredMessage m;
    m.index = r.index;
    m.templateId = tmpl;
    m.label = r.label;
    m.scores.alpha = score_template(*entry);
    m.scores.beta = score_attribute(attributes[pos], table, tmpl);
    m.scores.gamma = score_context(contexts[pos], table);
    out.push_back(std::move(m));
  }
  return out;
}

void write_scores_csv(std::ostream& os, std::span<const ScoredMessage> scores) {
  os << "index,templateId,alpha,beta,gamma,alpha_num,alpha_den,beta_num,beta_den,gamma_num,gamma_den,label\n";
  for (const auto& m : scores) {
    const auto& s = m.scores;
    os << m.index << ',' << m.templateId << ',' << s.alpha.to_decimal() << ','
       << (s.beta ? s.beta->to_decimal() : std::string()) << ',' << s.gamma.to_decimal() << ','
       << s.alpha.num << ',' << s.alpha.den << ',';
    if (s.beta)
      os << s.beta->num << ',' << s.beta->den << ',';
    else
      os << ",,";
    os << s.gamma.num << ',' << s.gamma.den << ',' << to_string(m.label) << '\n';
  }
}

}  // namespace logtax
