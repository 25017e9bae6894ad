#include "lexvec/cooc.hpp"

#include <string>

#include "lexvec/error.hpp"

namespace lexvec {

ContextSpace::ContextSpace(std::size_t vocab_size, int window, bool positional)
    : vocab_size_(vocab_size), window_(window), positional_(positional) {
  if (window < 1) throw ConfigError("window must be >= 1");
  if (size() > std::size_t{0xffffffffu}) throw ConfigError("context space exceeds 32-bit ids");
}

std::size_t ContextSpace::size() const noexcept {
  return positional_ ? 2 * static_cast<std::size_t>(window_) * vocab_size_ : vocab_size_;
}

ContextId ContextSpace::encode(WordId word, int offset) const {
  if (offset == 0 || offset > window_ || offset < -window_) {
    throw ConfigError("invalid context offset " + std::to_string(offset));
  }
  if (word >= vocab_size_) throw ConfigError("context word id out of range");
  if (!positional_) return ContextId{word};
  const int slot = offset < 0 ? offset + window_ : offset + window_ - 1;
  return ContextId{static_cast<std::uint32_t>(word * (2 * window_) + slot)};
}

DecodedContext ContextSpace::decode(ContextId c) const {
  if (raw(c) >= size()) throw ConfigError("context id out of range");
  if (!positional_) return {raw(c), 0};
  const std::uint32_t span = 2 * static_cast<std::uint32_t>(window_);
  const auto word = raw(c) / span;
  const int slot = static_cast<int>(raw(c) % span);
  const int offset = slot < window_ ? slot - window_ : slot - window_ + 1;
  return {word, offset};
}

std::vector<WordContextPair> stream_pairs(std::span<const WordId> sentence,
                                          const ContextSpace& space) {
  std::vector<WordContextPair> out;
  for_each_window_pair(sentence, space, [&](WordId w, ContextId c) { out.emplace_back(w, c); });
  return out;
}

CoocStats::CoocStats(const ContextSpace& space)
    : space_(space), marginals_(space), targets_(space.vocab_size(), 0) {}

std::uint64_t CoocStats::count(WordId w, ContextId c) const {
  auto it = pairs_.find(key(w, c));
  return it == pairs_.end() ? 0 : it->second;
}

void CoocStats::add(WordId w, ContextId c, std::uint64_t n) {
  if (w >= space_.vocab_size() || raw(c) >= space_.size()) {
    throw ConfigError("pair outside the context space");
  }
  if (n == 0) return;
  pairs_[key(w, c)] += n;
  marginals_.add(w, c, n);
}

void CoocStats::merge(const CoocStats& other) {
  if (!(other.space_ == space_)) throw ConfigError("cannot merge stats over different spaces");
  for (const auto& [k, n] : other.pairs_) pairs_[k] += n;
  for (std::size_t i = 0; i < marginals_.word.size(); ++i) marginals_.word[i] += other.marginals_.word[i];
  for (std::size_t i = 0; i < marginals_.context.size(); ++i) {
    marginals_.context[i] += other.marginals_.context[i];
  }
  marginals_.total += other.marginals_.total;
  for (std::size_t i = 0; i < targets_.size(); ++i) targets_[i] += other.targets_[i];
  total_targets_ += other.total_targets_;
}

void CoocStats::check_consistency() const {
  Marginals recomputed(space_);
  for_each_pair([&](WordId w, ContextId c, std::uint64_t n) { recomputed.add(w, c, n); });
  if (!(recomputed == marginals_)) throw IntegrityError("co-occurrence marginals are inconsistent");
}

CoocStats count_pairs(std::span<const WordContextPair> pairs, const ContextSpace& space) {
  CoocStats stats(space);
  for (const auto& [w, c] : pairs) stats.add(w, c);
  return stats;
}

CoocStats count_corpus(SentenceSource& corpus, const ContextSpace& space) {
  CoocStats stats(space);
  corpus.rewind();
  Sentence s;
  while (corpus.next(s)) {
    for (WordId w : s) stats.add_target(w);
    for_each_window_pair(s, space, [&](WordId w, ContextId c) { stats.add(w, c); });
  }
  return stats;
}

Marginals count_marginals(SentenceSource& corpus, const ContextSpace& space) {
  Marginals m(space);
  corpus.rewind();
  Sentence s;
  while (corpus.next(s)) {
    for_each_window_pair(s, space, [&](WordId w, ContextId c) { m.add(w, c); });
  }
  return m;
}

}  // namespace lexvec
