#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "logtax/templating.hpp"

namespace logtax {

/// Number of messages looked at before and after a message.
struct ContextBounds {
  std::size_t before = 10;
  std::size_t after = 0;
};

/// Set of template ids in a message's neighborhood, kept sorted and unique so
/// it can serve as a hash key directly.
struct ContextSignature {
  std::vector<TemplateId> templateIds;

  std::size_t size() const { return templateIds.size(); }
  bool empty() const { return templateIds.empty(); }
  friend bool operator==(const ContextSignature&, const ContextSignature&) = default;
};

struct ContextSignatureHash {
  std::size_t operator()(const ContextSignature& sig) const noexcept;
};

/// Templates of messages i-before .. i-1 and i+1 .. i+after (1-based), with
/// the window clipped to the log. Throws ValidationError when i is outside
/// [1, assignment.size()].
ContextSignature build_context(std::span<const TemplateId> assignment, std::size_t i,
                               ContextBounds bounds);

/// Signature of every message, position i-1 holding message i.
std::vector<ContextSignature> build_all_contexts(std::span<const TemplateId> assignment,
                                                 ContextBounds bounds, unsigned threads = 1);

/// CSV "index,templateIds" with ids separated by ';'.
void write_contexts_csv(std::ostream& os, std::span<const ContextSignature> contexts);

}  // namespace logtax
