#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexvec/random.hpp"

namespace lexvec {

using WordId = std::uint32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

// Bidirectional word <-> id map with raw corpus frequencies. Ids are
// assigned by descending frequency, ties broken by first occurrence.
class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  std::optional<WordId> find(std::string_view word) const;
  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t freq(WordId id) const { return freq_.at(id); }
  std::span<const std::uint64_t> frequencies() const noexcept { return freq_; }
  std::span<const std::string> words() const noexcept { return words_; }

  // Occurrences of retained words.
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  // Occurrences of words dropped by min_count.
  std::uint64_t oov_tokens() const noexcept { return oov_tokens_; }

  double unigram_probability(WordId id) const {
    return static_cast<double>(freq(id)) / static_cast<double>(total_tokens_);
  }

  // One `word<TAB>freq` line per id, in id order.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  static Vocabulary from_entries(std::vector<std::string> words, std::vector<std::uint64_t> freq,
                                 std::uint64_t oov_tokens = 0);

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> freq_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> ids_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t oov_tokens_ = 0;
};

// Streaming counter behind build_vocab.
class VocabBuilder {
 public:
  void add(std::string_view token);
  std::uint64_t tokens_seen() const noexcept { return tokens_seen_; }
  // Throws EmptyVocabularyError when nothing reaches min_count.
  Vocabulary finish(std::uint64_t min_count) const;

 private:
  struct Entry {
    std::uint64_t count;
    std::uint64_t first_seen;
  };
  std::unordered_map<std::string, Entry, StringHash, std::equal_to<>> counts_;
  std::uint64_t tokens_seen_ = 0;
};

Vocabulary build_vocab(std::span<const std::string> tokens, std::uint64_t min_count);

// Whitespace-separated tokens; every line is one sentence.
Vocabulary build_vocab_from_file(const std::filesystem::path& corpus, std::uint64_t min_count);

// Dirty subsampling: an occurrence of a word with unigram probability f > t
// is dropped with probability 1 - sqrt(t / f). Removal happens before any
// windowing, so windows later span the gaps.
class Subsampler {
 public:
  Subsampler(const Vocabulary& vocab, double threshold);

  double keep_probability(WordId id) const { return keep_.at(id); }
  bool keep(WordId id, Rng& rng) const;

 private:
  std::vector<double> keep_;
};

std::vector<WordId> subsample_stream(std::span<const WordId> ids, const Vocabulary& vocab,
                                     double threshold, Rng& rng);

}  // namespace lexvec
