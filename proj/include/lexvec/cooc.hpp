#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexvec/corpus.hpp"
#include "lexvec/vocab.hpp"

namespace lexvec {

// Index of a context row. Plain contexts are word ids; positional contexts
// pack (word, offset) word-major so all offsets of one word are contiguous.
enum class ContextId : std::uint32_t {};

constexpr std::uint32_t raw(ContextId c) noexcept { return static_cast<std::uint32_t>(c); }

struct DecodedContext {
  WordId word;
  int offset;  // 0 for plain contexts
  bool operator==(const DecodedContext&) const = default;
};

class ContextSpace {
 public:
  ContextSpace(std::size_t vocab_size, int window, bool positional);

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  int window() const noexcept { return window_; }
  bool positional() const noexcept { return positional_; }
  // |V| for plain, 2 * win * |V| for positional.
  std::size_t size() const noexcept;

  // Throws ConfigError for offset == 0 or |offset| > window, or word >= |V|.
  ContextId encode(WordId word, int offset) const;
  DecodedContext decode(ContextId c) const;

  bool operator==(const ContextSpace&) const = default;

 private:
  std::size_t vocab_size_;
  int window_;
  bool positional_;
};

using WordContextPair = std::pair<WordId, ContextId>;

// Fixed symmetric window, clipped at the sentence ends.
template <class F>
void for_each_window_pair(std::span<const WordId> sentence, const ContextSpace& space, F&& f) {
  const auto n = static_cast<std::ptrdiff_t>(sentence.size());
  const int win = space.window();
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    for (int o = -win; o <= win; ++o) {
      if (o == 0) continue;
      const std::ptrdiff_t q = p + o;
      if (q < 0 || q >= n) continue;
      f(sentence[p], space.encode(sentence[q], o));
    }
  }
}

std::vector<WordContextPair> stream_pairs(std::span<const WordId> sentence, const ContextSpace& space);

// Row and column sums of the co-occurrence matrix. O(|V| + |C_ctx|) storage.
struct Marginals {
  std::vector<std::uint64_t> word;     // M(w,*)
  std::vector<std::uint64_t> context;  // M(*,c)
  std::uint64_t total = 0;             // M(*,*)

  Marginals() = default;
  explicit Marginals(const ContextSpace& space)
      : word(space.vocab_size(), 0), context(space.size(), 0) {}

  void add(WordId w, ContextId c, std::uint64_t n = 1) {
    word[w] += n;
    context[raw(c)] += n;
    total += n;
  }
  bool operator==(const Marginals&) const = default;
};

// Sparse co-occurrence counts M(w,c) plus marginals.
class CoocStats {
 public:
  explicit CoocStats(const ContextSpace& space);

  const ContextSpace& space() const noexcept { return space_; }
  const Marginals& marginals() const noexcept { return marginals_; }

  std::uint64_t count(WordId w, ContextId c) const;
  void add(WordId w, ContextId c, std::uint64_t n = 1);
  std::size_t nonzero_pairs() const noexcept { return pairs_.size(); }

  // Occurrences of each word as a target; only filled by count_corpus.
  std::span<const std::uint64_t> target_counts() const noexcept { return targets_; }
  std::uint64_t total_targets() const noexcept { return total_targets_; }
  void add_target(WordId w, std::uint64_t n = 1) {
    targets_[w] += n;
    total_targets_ += n;
  }

  // Shard merge; associative and commutative.
  void merge(const CoocStats& other);

  template <class F>
  void for_each_pair(F&& f) const {
    for (const auto& [key, n] : pairs_) {
      f(static_cast<WordId>(key >> 32), ContextId{static_cast<std::uint32_t>(key)}, n);
    }
  }

  // Recomputes marginals from the pair map; throws IntegrityError on mismatch.
  void check_consistency() const;

 private:
  static std::uint64_t key(WordId w, ContextId c) {
    return (static_cast<std::uint64_t>(w) << 32) | raw(c);
  }

  ContextSpace space_;
  Marginals marginals_;
  std::unordered_map<std::uint64_t, std::uint64_t> pairs_;
  std::vector<std::uint64_t> targets_;
  std::uint64_t total_targets_ = 0;
};

CoocStats count_pairs(std::span<const WordContextPair> pairs, const ContextSpace& space);

// Counts every window pair of every sentence and records target occurrences.
CoocStats count_corpus(SentenceSource& corpus, const ContextSpace& space);

// Marginals only, without the pair map.
Marginals count_marginals(SentenceSource& corpus, const ContextSpace& space);

}  // namespace lexvec
