#include "lexvec/corpus.hpp"

#include "lexvec/error.hpp"

namespace lexvec {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  for_each_token(line, [&](std::string_view tok) { out.push_back(tok); });
  return out;
}

bool InMemoryCorpus::next(Sentence& out) {
  if (pos_ >= sentences_.size()) return false;
  out = sentences_[pos_++];
  return true;
}

TextCorpus::TextCorpus(std::filesystem::path path, const Vocabulary& vocab)
    : path_(std::move(path)), vocab_(&vocab) {
  rewind();
}

void TextCorpus::rewind() {
  in_.close();
  in_.clear();
  in_.open(path_);
  if (!in_) throw IoError("cannot open corpus " + path_.string());
}

bool TextCorpus::next(Sentence& out) {
  if (!std::getline(in_, line_)) {
    if (in_.bad()) throw IoError("read error in corpus " + path_.string());
    return false;
  }
  out.clear();
  for_each_token(line_, [&](std::string_view tok) {
    if (auto id = vocab_->find(tok)) out.push_back(*id);
  });
  return true;
}

SubsampledCorpus::SubsampledCorpus(SentenceSource& inner, const Vocabulary& vocab,
                                   double threshold, std::uint64_t seed)
    : inner_(&inner), subsampler_(vocab, threshold), seed_(seed), rng_(seed) {}

void SubsampledCorpus::rewind() {
  inner_->rewind();
  rng_.seed(seed_);
}

bool SubsampledCorpus::next(Sentence& out) {
  if (!inner_->next(buffer_)) return false;
  out.clear();
  for (WordId id : buffer_) {
    if (subsampler_.keep(id, rng_)) out.push_back(id);
  }
  return true;
}

std::vector<Sentence> read_all(SentenceSource& source) {
  std::vector<Sentence> out;
  Sentence s;
  source.rewind();
  while (source.next(s)) out.push_back(s);
  return out;
}

}  // namespace lexvec
