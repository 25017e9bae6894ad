#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "lexvec/cooc.hpp"
#include "lexvec/corpus.hpp"
#include "lexvec/embedding.hpp"
#include "lexvec/negsampler.hpp"
#include "lexvec/ppmi.hpp"
#include "lexvec/random.hpp"

namespace lexvec {

struct TrainConfig {
  std::size_t dim = 300;
  int window = 2;
  int iterations = 5;
  int negatives = 5;
  double lr = 0.025;
  double subsample = 1e-5;
  double cds_alpha = 0.75;
  bool positional = false;
  std::uint64_t seed = 1;
  int threads = 1;
  // Standard mode only: redraw negatives every epoch instead of replaying the
  // same seeded draws (which is what the external-memory paths see).
  bool fresh_negatives = false;

  void validate() const;
};

// Linear decay from lr0 at step 0 to lr0 * 1e-4 at the last scheduled step.
class LearningRate {
 public:
  static constexpr double kFloorFraction = 1e-4;

  LearningRate(double lr0, std::uint64_t total_steps) : lr0_(lr0), total_(total_steps) {}

  double at(std::uint64_t step) const {
    if (total_ == 0 || step >= total_) return lr0_ * kFloorFraction;
    const double frac = static_cast<double>(step) / static_cast<double>(total_);
    return lr0_ * (1.0 - (1.0 - kFloorFraction) * frac);
  }
  std::uint64_t total_steps() const noexcept { return total_; }

 private:
  double lr0_;
  std::uint64_t total_;
};

enum class PairOrigin : char { corpus = 'c', negative = 'n' };

// One applied update, reported to an optional observer.
struct UpdateRecord {
  int epoch;
  WordId word;
  ContextId context;
  double target;
};
using UpdateObserver = std::function<void(const UpdateRecord&)>;

// Seed of the negative-sample stream for an epoch. Shared by in-memory
// training and the pair-file writer so both draw identical negatives.
std::uint64_t negative_seed(std::uint64_t master, int epoch);
std::uint64_t subsample_seed(std::uint64_t master);
std::uint64_t init_seed(std::uint64_t master);

// Window sampling plus negative sampling in corpus order: at every target
// occurrence, its in-window pairs followed by k sampled contexts.
// on_pair(w, c, origin) sees every pair; on_target(w) sees every occurrence.
template <class F, class G>
void for_each_scheduled_pair(SentenceSource& corpus, const ContextSpace& space,
                             const NegativeSampler& sampler, int k, Rng& rng, F&& on_pair,
                             G&& on_target) {
  corpus.rewind();
  Sentence s;
  const int win = space.window();
  while (corpus.next(s)) {
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    for (std::ptrdiff_t p = 0; p < n; ++p) {
      const WordId w = s[p];
      on_target(w);
      for (int o = -win; o <= win; ++o) {
        if (o == 0 || p + o < 0 || p + o >= n) continue;
        on_pair(w, space.encode(s[p + o], o), PairOrigin::corpus);
      }
      for (int i = 0; i < k; ++i) on_pair(w, sampler.sample(rng), PairOrigin::negative);
    }
  }
}

template <class F>
void for_each_scheduled_pair(SentenceSource& corpus, const ContextSpace& space,
                             const NegativeSampler& sampler, int k, Rng& rng, F&& on_pair) {
  for_each_scheduled_pair(corpus, space, sampler, k, rng, std::forward<F>(on_pair), [](WordId) {});
}

// In-memory ("standard") stochastic WSNS. `corpus` must replay the stream
// `stats` was counted from.
EmbeddingPair train_standard(SentenceSource& corpus, const CoocStats& stats,
                             const NegativeSampler& sampler, const TrainConfig& config,
                             const UpdateObserver& observer = {});

// Exact expected global loss: window term weighted by M(w,c) plus the
// negative term weighted by target counts and P_n. Dense sweep over
// |V| x |C_ctx|; refuses instances larger than max_cells.
double global_loss(const EmbeddingPair& emb, const CoocStats& stats, const Ppmi& ppmi,
                   const NegativeSampler& sampler, int k, std::size_t max_cells = 50'000'000);

}  // namespace lexvec
