#include "lexvec/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "lexvec/corpus.hpp"
#include "lexvec/error.hpp"

namespace lexvec {

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = ids_.find(word);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::from_entries(std::vector<std::string> words, std::vector<std::uint64_t> freq,
                                    std::uint64_t oov_tokens) {
  if (words.size() != freq.size()) throw ConfigError("vocabulary words/frequencies size mismatch");
  Vocabulary v;
  v.words_ = std::move(words);
  v.freq_ = std::move(freq);
  v.oov_tokens_ = oov_tokens;
  v.ids_.reserve(v.words_.size());
  for (std::size_t i = 0; i < v.words_.size(); ++i) {
    if (!v.ids_.emplace(v.words_[i], static_cast<WordId>(i)).second) {
      throw ConfigError("duplicate vocabulary entry '" + v.words_[i] + "'");
    }
  }
  v.total_tokens_ = std::accumulate(v.freq_.begin(), v.freq_.end(), std::uint64_t{0});
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write vocabulary " + path.string());
  for (std::size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << freq_[i] << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  std::vector<std::string> words;
  std::vector<std::uint64_t> freq;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(path.string(), lineno, "expected word<TAB>freq");
    }
    std::uint64_t f = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, f);
    if (ec != std::errc{} || ptr != last || first == last) {
      throw ParseError(path.string(), lineno, "bad frequency");
    }
    words.push_back(line.substr(0, tab));
    freq.push_back(f);
  }
  if (words.empty()) throw EmptyVocabularyError("empty vocabulary in " + path.string());
  return from_entries(std::move(words), std::move(freq));
}

void VocabBuilder::add(std::string_view token) {
  auto it = counts_.find(token);
  if (it == counts_.end()) it = counts_.emplace(std::string(token), Entry{0, tokens_seen_}).first;
  ++it->second.count;
  ++tokens_seen_;
}

Vocabulary VocabBuilder::finish(std::uint64_t min_count) const {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  struct Kept {
    const std::string* word;
    Entry entry;
  };
  std::vector<Kept> kept;
  std::uint64_t dropped = 0;
  for (const auto& [word, entry] : counts_) {
    if (entry.count >= min_count) {
      kept.push_back({&word, entry});
    } else {
      dropped += entry.count;
    }
  }
  if (kept.empty()) {
    throw EmptyVocabularyError(tokens_seen_ == 0 ? "empty vocabulary: corpus has no tokens"
                                                 : "empty vocabulary: no token reaches min_count");
  }
  std::sort(kept.begin(), kept.end(), [](const Kept& a, const Kept& b) {
    if (a.entry.count != b.entry.count) return a.entry.count > b.entry.count;
    return a.entry.first_seen < b.entry.first_seen;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> freq;
  words.reserve(kept.size());
  freq.reserve(kept.size());
  for (const auto& k : kept) {
    words.push_back(*k.word);
    freq.push_back(k.entry.count);
  }
  return Vocabulary::from_entries(std::move(words), std::move(freq), dropped);
}

Vocabulary build_vocab(std::span<const std::string> tokens, std::uint64_t min_count) {
  VocabBuilder builder;
  for (const auto& t : tokens) builder.add(t);
  return builder.finish(min_count);
}

Vocabulary build_vocab_from_file(const std::filesystem::path& corpus, std::uint64_t min_count) {
  std::ifstream in(corpus);
  if (!in) throw IoError("cannot open corpus " + corpus.string());
  VocabBuilder builder;
  std::string line;
  while (std::getline(in, line)) {
    for_each_token(line, [&](std::string_view tok) { builder.add(tok); });
  }
  if (in.bad()) throw IoError("read error in corpus " + corpus.string());
  return builder.finish(min_count);
}

Subsampler::Subsampler(const Vocabulary& vocab, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("subsample threshold must be in (0, 1]");
  }
  keep_.resize(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const double f = vocab.unigram_probability(static_cast<WordId>(i));
    keep_[i] = f > threshold ? std::sqrt(threshold / f) : 1.0;
  }
}

bool Subsampler::keep(WordId id, Rng& rng) const {
  const double p = keep_[id];
  if (p >= 1.0) return true;
  return uniform01(rng) < p;
}

std::vector<WordId> subsample_stream(std::span<const WordId> ids, const Vocabulary& vocab,
                                     double threshold, Rng& rng) {
  const Subsampler sub(vocab, threshold);
  std::vector<WordId> out;
  out.reserve(ids.size());
  for (WordId id : ids) {
    if (id >= vocab.size()) throw ConfigError("token id out of vocabulary range");
    if (sub.keep(id, rng)) out.push_back(id);
  }
  return out;
}

}  // namespace lexvec
