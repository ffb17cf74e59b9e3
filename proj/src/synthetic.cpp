#include "logtax/synthetic.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include "logtax/error.hpp"

namespace logtax {

namespace {

// std distributions are implementation-defined; draws are derived from the
// raw engine output so corpora are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = engine_.max() - engine_.max() % n;
    std::uint64_t v = 0;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

// Index drawn proportionally to weight(item); nullopt if all weights are 0.
template <typename Weight>
std::optional<std::size_t> weighted_pick(Rng& rng, const std::vector<PoolToken>& pool,
                                         Weight weight) {
  double total = 0;
  for (const auto& t : pool) total += weight(t);
  if (total <= 0) return std::nullopt;
  double r = rng.unit() * total;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    double w = weight(pool[k]);
    if (w <= 0) continue;
    if (r < w) return k;
    r -= w;
  }
  for (std::size_t k = pool.size(); k-- > 0;)
    if (weight(pool[k]) > 0) return k;
  return std::nullopt;
}

double normal_weight(const PoolToken& t) { return 1.0 - t.anomalyBias; }
double anomalous_weight(const PoolToken& t) { return t.anomalyBias; }

bool has_anomalous_slot(const SyntheticTemplate& t) {
  return std::any_of(t.slotPools.begin(), t.slotPools.end(), [](const auto& pool) {
    return std::any_of(pool.begin(), pool.end(), [](const PoolToken& p) { return p.anomalyBias > 0; });
  });
}

std::vector<std::size_t> distinct_motif_templates(const SyntheticSpec& spec) {
  std::vector<std::size_t> out;
  for (const auto& motif : spec.sequencePatterns)
    for (auto t : motif) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class Generator {
 public:
  explicit Generator(const SyntheticSpec& spec)
      : spec_(spec), rng_(spec.seed), motifTemplates_(distinct_motif_templates(spec)) {
    for (std::size_t t = 0; t < spec.templates.size(); ++t)
      if (spec.templates[t].anomalyOnly) anomalyOnly_.push_back(t);
    motif_ = rng_.below(spec.sequencePatterns.size());
  }

  SyntheticCorpus run() {
    std::vector<LogRecord> records;
    std::vector<KindSet> truth;
    records.reserve(spec_.messageCount);
    truth.reserve(spec_.messageCount);

    for (std::size_t n = 0; n < spec_.messageCount; ++n) {
      const std::size_t expected = spec_.sequencePatterns[motif_][position_];
      LogRecord rec;
      KindSet kinds;

      std::optional<AnomalyKind> inject;
      if (spec_.anomalyRate > 0 && rng_.unit() < spec_.anomalyRate) inject = choose_kind(expected);

      if (!inject) {
        rec.content = render(expected, std::nullopt);
        advance();
      } else if (*inject == AnomalyKind::Template) {
        rec.content = render(rng_.pick(anomalyOnly_), std::nullopt);
      } else if (*inject == AnomalyKind::Attribute) {
        const auto& tmpl = spec_.templates[expected];
        std::vector<std::size_t> slots;
        for (std::size_t s = 0; s < tmpl.slotPools.size(); ++s) {
          const auto& pool = tmpl.slotPools[s];
          if (std::any_of(pool.begin(), pool.end(), [](const PoolToken& p) { return p.anomalyBias > 0; }))
            slots.push_back(s);
        }
        rec.content = render(expected, rng_.pick(slots));
        advance();
      } else {
        std::vector<std::size_t> others;
        for (auto t : motifTemplates_)
          if (t != expected) others.push_back(t);
        rec.content = render(rng_.pick(others), std::nullopt);
      }

      if (inject) {
        rec.label = Label::Anomalous;
        kinds.insert(*inject);
      }
      records.push_back(std::move(rec));
      truth.push_back(kinds);
    }
    return {split_corpus(std::move(records)), std::move(truth)};
  }

 private:
  std::optional<AnomalyKind> choose_kind(std::size_t expected) {
    std::vector<AnomalyKind> options;
    if (!anomalyOnly_.empty()) options.push_back(AnomalyKind::Template);
    if (has_anomalous_slot(spec_.templates[expected])) options.push_back(AnomalyKind::Attribute);
    if (spec_.contextualInterruptions && motifTemplates_.size() >= 2)
      options.push_back(AnomalyKind::Contextual);
    if (options.empty()) return std::nullopt;
    return rng_.pick(options);
  }

  void advance() {
    if (++position_ < spec_.sequencePatterns[motif_].size()) return;
    position_ = 0;
    motif_ = rng_.below(spec_.sequencePatterns.size());
  }

  // Fills the template's slots; `anomalousSlot` is drawn from the anomalous
  // side of its pool. Anomaly-only templates draw uniformly.
  std::string render(std::size_t t, std::optional<std::size_t> anomalousSlot) {
    const auto& tmpl = spec_.templates[t];
    std::string out;
    std::size_t slot = 0;
    for (const auto& token : tmpl.pattern) {
      if (!out.empty()) out += ' ';
      if (token != "*") {
        out += token;
        continue;
      }
      const auto& pool = tmpl.slotPools[slot];
      std::size_t k = 0;
      if (tmpl.anomalyOnly) {
        k = rng_.below(pool.size());
      } else if (anomalousSlot == slot) {
        k = *weighted_pick(rng_, pool, anomalous_weight);
      } else {
        k = *weighted_pick(rng_, pool, normal_weight);
      }
      out += pool[k].token;
      ++slot;
    }
    return out;
  }

  const SyntheticSpec& spec_;
  Rng rng_;
  std::vector<std::size_t> motifTemplates_;
  std::vector<std::size_t> anomalyOnly_;
  std::size_t motif_ = 0;
  std::size_t position_ = 0;
};

std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len) {
  static constexpr std::string_view kLetters = "ghijklmnopqrstuvwxyz";
  std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += kLetters[rng.below(kLetters.size())];
  return w;
}

}  // namespace

std::size_t SyntheticTemplate::slot_count() const {
  return static_cast<std::size_t>(std::count(pattern.begin(), pattern.end(), "*"));
}

void SyntheticSpec::validate() const {
  if (!(anomalyRate >= 0.0 && anomalyRate <= 1.0))
    throw ValidationError("anomalyRate must be in [0, 1]");
  if (messageCount == 0) throw ValidationError("messageCount must be positive");
  if (templates.empty()) throw ValidationError("synthetic spec has no templates");
  if (sequencePatterns.empty()) throw ValidationError("synthetic spec has no sequence patterns");

  for (std::size_t t = 0; t < templates.size(); ++t) {
    const auto& tmpl = templates[t];
    const std::string where = "template " + std::to_string(t);
    if (tmpl.pattern.empty()) throw ValidationError(where + " is empty");
    if (tmpl.slotPools.size() != tmpl.slot_count())
      throw ValidationError(where + ": one pool per '*' slot required");
    for (const auto& pool : tmpl.slotPools) {
      if (pool.empty()) throw ValidationError(where + " has an empty slot pool");
      for (const auto& p : pool)
        if (!(p.anomalyBias >= 0.0 && p.anomalyBias <= 1.0))
          throw ValidationError(where + ": anomalyBias must be in [0, 1]");
      if (!tmpl.anomalyOnly &&
          std::none_of(pool.begin(), pool.end(), [](const PoolToken& p) { return p.anomalyBias < 1.0; }))
        throw ValidationError(where + ": slot pool has no token for normal draws");
    }
  }

  for (const auto& motif : sequencePatterns) {
    if (motif.empty()) throw ValidationError("empty sequence pattern");
    for (auto t : motif) {
      if (t >= templates.size()) throw ValidationError("sequence pattern references unknown template");
      if (templates[t].anomalyOnly)
        throw ValidationError("sequence pattern references an anomaly-only template");
    }
  }

  if (anomalyRate > 0) {
    bool any_template = std::any_of(templates.begin(), templates.end(),
                                    [](const auto& t) { return t.anomalyOnly; });
    bool any_attribute = false;
    for (auto t : distinct_motif_templates(*this)) any_attribute |= has_anomalous_slot(templates[t]);
    bool any_context = contextualInterruptions && distinct_motif_templates(*this).size() >= 2;
    if (!any_template && !any_attribute && !any_context)
      throw ValidationError("anomalyRate > 0 but the spec has no way to generate anomalies");
  }
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  return Generator(spec).run();
}

SyntheticSpec random_synthetic_spec(std::uint64_t seed, std::size_t messageCount,
                                    double anomalyRate) {
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  SyntheticSpec spec;
  spec.seed = seed;
  spec.messageCount = messageCount;
  spec.anomalyRate = anomalyRate;
  spec.contextualInterruptions = rng.below(4) != 0;

  const std::size_t n_templates = 3 + rng.below(10);
  for (std::size_t t = 0; t < n_templates; ++t) {
    SyntheticTemplate tmpl;
    const std::size_t len = 1 + rng.below(8);
    for (std::size_t p = 0; p < len; ++p) {
      // never a slot in first position, and at most every other token
      bool slot = p > 0 && rng.below(3) == 0;
      if (slot) {
        tmpl.pattern.emplace_back("*");
        std::vector<PoolToken> pool;
        const std::size_t n_tokens = 1 + rng.below(5);
        for (std::size_t k = 0; k < n_tokens; ++k) {
          double bias = 0.0;
          switch (rng.below(4)) {
            case 0: bias = 1.0; break;
            case 1: bias = 0.5; break;
            default: break;
          }
          pool.push_back({random_word(rng, 2, 6), bias});
        }
        if (std::none_of(pool.begin(), pool.end(), [](const auto& p) { return p.anomalyBias < 1.0; }))
          pool.front().anomalyBias = 0.0;
        tmpl.slotPools.push_back(std::move(pool));
      } else {
        tmpl.pattern.push_back(random_word(rng, 3, 8));
      }
    }
    tmpl.anomalyOnly = t > 1 && rng.below(4) == 0;
    spec.templates.push_back(std::move(tmpl));
  }

  std::vector<std::size_t> normal;
  for (std::size_t t = 0; t < n_templates; ++t)
    if (!spec.templates[t].anomalyOnly) normal.push_back(t);

  const std::size_t n_motifs = 1 + rng.below(3);
  for (std::size_t m = 0; m < n_motifs; ++m) {
    std::vector<std::size_t> motif;
    const std::size_t len = 1 + rng.below(6);
    for (std::size_t k = 0; k < len; ++k) motif.push_back(rng.pick(normal));
    spec.sequencePatterns.push_back(std::move(motif));
  }

  if (anomalyRate > 0 && std::none_of(spec.templates.begin(), spec.templates.end(),
                                      [](const auto& t) { return t.anomalyOnly; })) {
    SyntheticTemplate extra;
    extra.pattern = {random_word(rng, 3, 8), random_word(rng, 3, 8)};
    extra.anomalyOnly = true;
    spec.templates.push_back(std::move(extra));
  }
  spec.validate();
  return spec;
}

void write_generic(std::ostream& os, const LabeledCorpus& corpus) {
  for (const auto& r : corpus.records()) {
    os << (r.anomalous() ? "ANOM" : "-");
    if (!r.content.empty()) os << ' ' << r.content;
    os << '\n';
  }
}

}  // namespace logtax
