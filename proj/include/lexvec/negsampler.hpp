#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lexvec/cooc.hpp"
#include "lexvec/random.hpp"
#include "lexvec/vocab.hpp"

namespace lexvec {

// Negative-sampling distribution P(c) = count(c)^alpha / sum count^alpha,
// drawn by binary search over the normalized cumulative table.
class NegativeSampler {
 public:
  // Throws ConfigError when every count is zero or alpha is outside (0, 1].
  static NegativeSampler from_counts(std::span<const std::uint64_t> counts, double alpha = 0.75);

  // Plain contexts: corpus unigram counts #(w).
  static NegativeSampler from_unigrams(const Vocabulary& vocab, double alpha = 0.75);
  // Positional contexts: column marginals M(*, c).
  static NegativeSampler from_context_marginals(const Marginals& marginals, double alpha = 0.75);
  // Picks the constructor matching the context space.
  static NegativeSampler for_space(const ContextSpace& space, const Vocabulary& vocab,
                                   const Marginals& marginals, double alpha = 0.75);

  ContextId sample(Rng& rng) const;

  std::size_t size() const noexcept { return cumulative_.size(); }
  double alpha() const noexcept { return alpha_; }
  double probability(ContextId c) const;
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> cumulative() const noexcept { return cumulative_; }

 private:
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double weight_total_ = 0.0;
  double alpha_ = 0.75;
};

}  // namespace lexvec
