#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "logtax/core_model.hpp"

namespace logtax {

/// A slot filler. Normal draws weight tokens by (1 - anomalyBias), attribute
/// anomaly draws weight them by anomalyBias.
struct PoolToken {
  std::string token;
  double anomalyBias = 0.0;
};

struct SyntheticTemplate {
  /// Literal tokens; "*" marks a slot.
  std::vector<std::string> pattern;
  /// One pool per slot, in slot order.
  std::vector<std::vector<PoolToken>> slotPools;
  /// Only ever emitted as an injected template anomaly.
  bool anomalyOnly = false;

  std::size_t slot_count() const;
};

struct SyntheticSpec {
  std::vector<SyntheticTemplate> templates;
  /// Repeating motifs of indices into `templates`. Normal traffic walks one
  /// motif to its end, then picks the next one at random.
  std::vector<std::vector<std::size_t>> sequencePatterns;
  /// Allow injecting an out-of-order template as a contextual anomaly.
  bool contextualInterruptions = true;
  double anomalyRate = 0.0;
  std::size_t messageCount = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticCorpus {
  LabeledCorpus corpus;
  /// Injected kind per record (index i at position i-1); empty for normal
  /// records.
  std::vector<KindSet> truth;
};

/// Deterministic for a fixed spec (including seed).
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// A randomly shaped but valid spec: 3-12 templates over a lowercase
/// vocabulary, a few motifs, optional anomaly-only templates.
SyntheticSpec random_synthetic_spec(std::uint64_t seed, std::size_t messageCount,
                                    double anomalyRate);

/// Writes the corpus in the "generic" format: label field ("-" or "ANOM")
/// followed by the content.
void write_generic(std::ostream& os, const LabeledCorpus& corpus);

}  // namespace logtax
