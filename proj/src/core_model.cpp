#include "logtax/core_model.hpp"

#include <string>

#include "logtax/error.hpp"

namespace logtax {

std::string_view to_string(Label label) {
  return label == Label::Anomalous ? "anomalous" : "normal";
}

std::string_view to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::Template:
      return "template";
    case AnomalyKind::Attribute:
      return "attribute";
    case AnomalyKind::Contextual:
      return "contextual";
  }
  return "unknown";
}

std::string to_string(KindSet kinds) {
  std::string out = "{";
  for (auto k : kAllKinds) {
    if (!kinds.contains(k)) continue;
    if (out.size() > 1) out += ",";
    out += to_string(k);
  }
  return out + "}";
}

void Vocabulary::add(const TokenSequence& seq) {
  for (const auto& t : seq.tokens) tokens_.insert(t);
}

const LogRecord& LabeledCorpus::at(std::size_t i) const {
  if (i == 0 || i > records_.size())
    throw ValidationError("record index " + std::to_string(i) + " out of range");
  return records_[i - 1];
}

Vocabulary LabeledCorpus::vocabulary() const {
  Vocabulary v;
  for (const auto& r : records_) v.add(r.tokens);
  return v;
}

LabeledCorpus split_corpus(std::vector<LogRecord> records) {
  if (records.empty()) throw ValidationError("empty corpus");

  LabeledCorpus corpus;
  for (std::size_t pos = 0; pos < records.size(); ++pos) {
    auto& r = records[pos];
    if (r.index == 0) {
      r.index = pos + 1;
    } else if (r.index != pos + 1) {
      throw ValidationError("record indices must be contiguous from 1; found " +
                            std::to_string(r.index) + " at position " + std::to_string(pos + 1));
    }
    if (r.anomalous())
      ++corpus.anomalous_;
    else
      ++corpus.normal_;
  }
  corpus.records_ = std::move(records);
  return corpus;
}

}  // namespace logtax
