#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lexvec/random.hpp"
#include "lexvec/vocab.hpp"

namespace lexvec {

using Sentence = std::vector<WordId>;

// Splits on ASCII whitespace; empty tokens are never produced.
template <class F>
void for_each_token(std::string_view line, F&& f) {
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\f' ||
                     line[i] == '\v' || line[i] == '\n')) {
      ++i;
    }
    std::size_t j = i;
    while (j < n && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r' || line[j] == '\f' ||
                      line[j] == '\v' || line[j] == '\n')) {
      ++j;
    }
    if (j > i) f(line.substr(i, j - i));
    i = j;
  }
}

std::vector<std::string_view> split_tokens(std::string_view line);

// A replayable stream of sentences. rewind() must reproduce the exact same
// sequence, which is what lets counting and every training epoch see one
// identical (subsampled) corpus.
class SentenceSource {
 public:
  virtual ~SentenceSource() = default;
  virtual bool next(Sentence& out) = 0;
  virtual void rewind() = 0;
};

class InMemoryCorpus final : public SentenceSource {
 public:
  explicit InMemoryCorpus(std::vector<Sentence> sentences) : sentences_(std::move(sentences)) {}

  bool next(Sentence& out) override;
  void rewind() override { pos_ = 0; }

  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }

 private:
  std::vector<Sentence> sentences_;
  std::size_t pos_ = 0;
};

// Reads a tokenized text file, maps words through the vocabulary and drops
// out-of-vocabulary tokens. Empty sentences are still reported.
class TextCorpus final : public SentenceSource {
 public:
  TextCorpus(std::filesystem::path path, const Vocabulary& vocab);

  bool next(Sentence& out) override;
  void rewind() override;

 private:
  std::filesystem::path path_;
  const Vocabulary* vocab_;
  std::ifstream in_;
  std::string line_;
};

// Applies dirty subsampling on top of another source with a private RNG that
// is reseeded on rewind().
class SubsampledCorpus final : public SentenceSource {
 public:
  SubsampledCorpus(SentenceSource& inner, const Vocabulary& vocab, double threshold,
                   std::uint64_t seed);

  bool next(Sentence& out) override;
  void rewind() override;

 private:
  SentenceSource* inner_;
  Subsampler subsampler_;
  std::uint64_t seed_;
  Rng rng_;
  Sentence buffer_;
};

// Rewinds the source first.
std::vector<Sentence> read_all(SentenceSource& source);

}  // namespace lexvec
