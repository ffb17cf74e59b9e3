#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace logtax {

enum class Label : std::uint8_t { Normal, Anomalous };

std::string_view to_string(Label label);

/// Content of one log message split into tokens, in original order.
struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t length() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

struct LogRecord {
  std::size_t index = 0;  // 1-based position in the log
  Label label = Label::Normal;
  std::string meta;     // header fields other than the label
  std::string content;  // free text following the header
  TokenSequence tokens;  // filled by tokenize()

  bool anomalous() const { return label == Label::Anomalous; }
};

/// All distinct tokens seen in a corpus.
class Vocabulary {
 public:
  void add(const TokenSequence& seq);
  bool contains(const std::string& token) const { return tokens_.contains(token); }
  std::size_t size() const { return tokens_.size(); }
  const std::unordered_set<std::string>& tokens() const { return tokens_; }

 private:
  std::unordered_set<std::string> tokens_;
};

/// Ordered log with per-class counts. Records are indexed 1..size() with
/// index i stored at position i-1.
class LabeledCorpus {
 public:
  LabeledCorpus() = default;

  std::span<const LogRecord> records() const { return records_; }
  std::span<LogRecord> mutable_records() { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Record with 1-based index i.
  const LogRecord& at(std::size_t i) const;

  std::size_t normal_count() const { return normal_; }
  std::size_t anomalous_count() const { return anomalous_; }

  Vocabulary vocabulary() const;

 private:
  friend LabeledCorpus split_corpus(std::vector<LogRecord> records);

  std::vector<LogRecord> records_;
  std::size_t normal_ = 0;
  std::size_t anomalous_ = 0;
};

/// Builds the corpus container, counting the normal and anomalous classes.
/// Records whose index is 0 are numbered by position; otherwise indices must
/// already be 1, 2, 3, ... in order. Throws ValidationError("empty corpus")
/// for empty input.
LabeledCorpus split_corpus(std::vector<LogRecord> records);

enum class AnomalyKind : std::uint8_t { Template = 0, Attribute = 1, Contextual = 2 };

inline constexpr AnomalyKind kAllKinds[] = {AnomalyKind::Template, AnomalyKind::Attribute,
                                            AnomalyKind::Contextual};

std::string_view to_string(AnomalyKind kind);

/// Subset of AnomalyKind. An empty set means the message falls outside the
/// taxonomy.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<AnomalyKind> kinds) {
    for (auto k : kinds) insert(k);
  }

  constexpr void insert(AnomalyKind k) { bits_ |= bit(k); }
  constexpr bool contains(AnomalyKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return ((bits_ >> 0) & 1u) + ((bits_ >> 1) & 1u) + ((bits_ >> 2) & 1u);
  }
  constexpr bool is_subset_of(KindSet other) const { return (bits_ & ~other.bits_) == 0; }

  friend constexpr bool operator==(KindSet, KindSet) = default;

 private:
  static constexpr std::uint8_t bit(AnomalyKind k) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
  }
  std::uint8_t bits_ = 0;
};

std::string to_string(KindSet kinds);

}  // namespace logtax
