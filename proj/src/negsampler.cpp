#include "lexvec/negsampler.hpp"

#include <algorithm>
#include <cmath>

#include "lexvec/error.hpp"

namespace lexvec {

NegativeSampler NegativeSampler::from_counts(std::span<const std::uint64_t> counts, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("sampling exponent must be in (0, 1]");
  NegativeSampler s;
  s.alpha_ = alpha;
  s.weights_.resize(counts.size());
  s.cumulative_.resize(counts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double w = counts[i] == 0 ? 0.0 : std::pow(static_cast<double>(counts[i]), alpha);
    s.weights_[i] = w;
    acc += w;
    s.cumulative_[i] = acc;
  }
  if (!(acc > 0.0)) throw ConfigError("negative sampler needs at least one positive count");
  s.weight_total_ = acc;
  for (auto& x : s.cumulative_) x /= acc;
  // Pin the tail at exactly 1 so a draw in [0, 1) always lands on a positive
  // weight, including any zero-weight suffix.
  std::size_t last = counts.size();
  while (last > 0 && s.weights_[last - 1] == 0.0) --last;
  for (std::size_t i = last - 1; i < counts.size(); ++i) s.cumulative_[i] = 1.0;
  return s;
}

NegativeSampler NegativeSampler::from_unigrams(const Vocabulary& vocab, double alpha) {
  return from_counts(vocab.frequencies(), alpha);
}

NegativeSampler NegativeSampler::from_context_marginals(const Marginals& marginals, double alpha) {
  return from_counts(marginals.context, alpha);
}

NegativeSampler NegativeSampler::for_space(const ContextSpace& space, const Vocabulary& vocab,
                                           const Marginals& marginals, double alpha) {
  if (space.positional()) return from_context_marginals(marginals, alpha);
  if (vocab.size() != space.size()) throw ConfigError("vocabulary does not match the context space");
  return from_unigrams(vocab, alpha);
}

ContextId NegativeSampler::sample(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return ContextId{static_cast<std::uint32_t>(it - cumulative_.begin())};
}

double NegativeSampler::probability(ContextId c) const {
  return weights_.at(raw(c)) / weight_total_;
}

}  // namespace lexvec
