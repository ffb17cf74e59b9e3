#include "logtax/context.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "logtax/error.hpp"
#include "parallel.hpp"

namespace logtax {

std::size_t ContextSignatureHash::operator()(const ContextSignature& sig) const noexcept {
  // FNV-1a over the ids
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto id : sig.templateIds) {
    h ^= id;
    h *= 0x100000001b3ULL;
  }
  h ^= sig.templateIds.size();
  return static_cast<std::size_t>(h);
}

ContextSignature build_context(std::span<const TemplateId> assignment, std::size_t i,
                               ContextBounds bounds) {
  const std::size_t n = assignment.size();
  if (i == 0 || i > n)
    throw ValidationError("context index " + std::to_string(i) + " outside [1, " + std::to_string(n) + "]");

  ContextSignature sig;
  const std::size_t first = i > bounds.before ? i - bounds.before : 1;
  const std::size_t last = std::min(n, i + std::min(bounds.after, n));
  sig.templateIds.reserve(last - first);
  for (std::size_t j = first; j <= last; ++j)
    if (j != i) sig.templateIds.push_back(assignment[j - 1]);

  std::sort(sig.templateIds.begin(), sig.templateIds.end());
  sig.templateIds.erase(std::unique(sig.templateIds.begin(), sig.templateIds.end()),
                        sig.templateIds.end());
  return sig;
}

std::vector<ContextSignature> build_all_contexts(std::span<const TemplateId> assignment,
                                                 ContextBounds bounds, unsigned threads) {
  std::vector<ContextSignature> out(assignment.size());
  detail::parallel_chunks(assignment.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = build_context(assignment, i + 1, bounds);
  });
  return out;
}

void write_contexts_csv(std::ostream& os, std::span<const ContextSignature> contexts) {
  os << "index,templateIds\n";
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    os << i + 1 << ',';
    const auto& ids = contexts[i].templateIds;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (k) os << ';';
      os << ids[k];
    }
    os << '\n';
  }
}

}  // namespace logtax
