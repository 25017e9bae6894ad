#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lexvec/cooc.hpp"
#include "lexvec/corpus.hpp"
#include "lexvec/embedding.hpp"
#include "lexvec/negsampler.hpp"
#include "lexvec/trainer.hpp"

// External-memory WSNS. Every sampled pair is written to a raw pair file,
// which is sorted and collapsed into one tuple per (w, c):
//
//   raw:        <w> <c> <origin>               origin in {c, n}
//   collapsed:  <w> <c> <marker> <tot> <count> marker in {+, -}
//   marginals:  TOTAL <M(*,*)> header, then <context_id> <M(*,c)> lines
//
// Training then replays the collapsed file (MI) or its tot-fold expansion
// (SI) after a fresh shuffle each epoch. Only marginals and the embedding
// matrices live in memory.
namespace lexvec {

namespace fs = std::filesystem;

struct RawPairRecord {
  WordId word;
  ContextId context;
  PairOrigin origin;

  bool operator==(const RawPairRecord&) const = default;
};

struct PairTuple {
  WordId word;
  ContextId context;
  bool positive;  // '+' iff the pair occurs in the corpus
  std::uint64_t tot;
  std::uint64_t corpus_count;

  bool operator==(const PairTuple&) const = default;
};

// Line codecs. parse_* return nullopt on malformed input.
std::string format_raw(const RawPairRecord& r);
std::string format_tuple(const PairTuple& t);
std::optional<RawPairRecord> parse_raw(std::string_view line);
std::optional<PairTuple> parse_tuple(std::string_view line);

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const fs::path& parent = {});
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

struct PairFileSummary {
  std::uint64_t records = 0;
  std::uint64_t corpus_records = 0;
  std::uint64_t negative_records = 0;
  std::uint64_t targets = 0;
  Marginals marginals;
};

// Streams the corpus once, writing k negatives per target occurrence with the
// epoch-0 negative seed of `seed`. Accumulates marginals from corpus pairs.
PairFileSummary write_pairs(SentenceSource& corpus, const ContextSpace& space,
                            const NegativeSampler& sampler, int k, std::uint64_t seed,
                            const fs::path& out);

struct SortOptions {
  std::size_t chunk_records = 1 << 20;
  std::size_t max_fan_in = 64;
  fs::path temp_parent;  // empty: system temp directory
};

struct CollapseSummary {
  std::uint64_t tuples = 0;
  std::uint64_t total_tot = 0;
  std::uint64_t total_corpus = 0;
};

// External merge sort by (w, c) with groups collapsed into PairTuples.
// Also accepts tuple lines (e.g. an SI expansion): duplicates then add their
// tot and must agree on corpus_count. Malformed lines raise ParseError with
// the line number.
CollapseSummary sort_collapse(const fs::path& raw, const fs::path& out,
                              const SortOptions& options = {});

// Two-pass bucketed shuffle. With one bucket the result is an exact
// Fisher-Yates permutation. Returns the number of lines.
std::uint64_t shuffle_file(const fs::path& in, const fs::path& out, std::size_t num_buckets,
                           std::uint64_t seed, const fs::path& temp_parent = {});

// Writes every tuple tot times with tot = 1. Returns the number of lines.
std::uint64_t expand_si(const fs::path& collapsed, const fs::path& out);

void save_marginals(const Marginals& m, const fs::path& path);
// Column marginals come from the sidecar; word marginals are rebuilt by
// summing corpus counts of the collapsed file. Throws IntegrityError if the
// two disagree with the TOTAL header.
Marginals load_marginals(const fs::path& sidecar, const fs::path& collapsed,
                         const ContextSpace& space);

struct ExternalOptions {
  std::size_t buckets = 16;
  fs::path temp_parent;
};

// Multiple Iteration: per epoch shuffle the collapsed file, then apply each
// tuple's tot updates consecutively at the learning rate current when the
// tuple is reached. The schedule advances by tot per tuple.
EmbeddingPair train_mi(const fs::path& collapsed, const Marginals& marginals,
                       const ContextSpace& space, const TrainConfig& config,
                       const ExternalOptions& options = {}, const UpdateObserver& observer = {});

// Single Iteration: expand to tot = 1 lines once, then run the MI replay on
// the expansion.
EmbeddingPair train_si(const fs::path& collapsed, const Marginals& marginals,
                       const ContextSpace& space, const TrainConfig& config,
                       const ExternalOptions& options = {}, const UpdateObserver& observer = {});

}  // namespace lexvec
