#include "lexvec/embedding.hpp"

#include <atomic>

#include "lexvec/error.hpp"
#include "lexvec/random.hpp"

namespace lexvec {
namespace {

// Uniform in the open interval (0, 1).
double open_unit(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace

EmbeddingPair init_embeddings(std::size_t vocab_size, std::size_t context_size, std::size_t dim,
                              std::uint64_t seed) {
  if (vocab_size == 0 || context_size == 0 || dim == 0) {
    throw ConfigError("embedding dimensions must be positive");
  }
  EmbeddingPair emb{Matrix(vocab_size, dim), Matrix(context_size, dim)};
  const double scale = 1.0 / static_cast<double>(dim);
  Rng word_rng(derive_seed(seed, "init/words"));
  for (double& x : emb.words.data()) x = (open_unit(word_rng) - 0.5) * scale;
  Rng ctx_rng(derive_seed(seed, "init/contexts"));
  for (double& x : emb.contexts.data()) x = (open_unit(ctx_rng) - 0.5) * scale;
  return emb;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sgd_update(EmbeddingPair& emb, WordId w, ContextId c, double target, double lr) {
  auto wr = emb.words.row(w);
  auto cr = emb.contexts.row(raw(c));
  const double err = dot(wr, cr) - target;
  if (err == 0.0) return 0.0;
  const double g = lr * err;
  for (std::size_t i = 0; i < wr.size(); ++i) {
    const double wi = wr[i];
    wr[i] -= g * cr[i];
    cr[i] -= g * wi;
  }
  return 0.5 * err * err;
}

double sgd_update_relaxed(EmbeddingPair& emb, WordId w, ContextId c, double target, double lr) {
  auto wr = emb.words.row(w);
  auto cr = emb.contexts.row(raw(c));
  double d = 0.0;
  for (std::size_t i = 0; i < wr.size(); ++i) {
    d += std::atomic_ref<double>(wr[i]).load(std::memory_order_relaxed) *
         std::atomic_ref<double>(cr[i]).load(std::memory_order_relaxed);
  }
  const double err = d - target;
  const double g = lr * err;
  for (std::size_t i = 0; i < wr.size(); ++i) {
    std::atomic_ref<double> wi(wr[i]);
    std::atomic_ref<double> ci(cr[i]);
    const double wv = wi.load(std::memory_order_relaxed);
    const double cv = ci.load(std::memory_order_relaxed);
    wi.store(wv - g * cv, std::memory_order_relaxed);
    ci.store(cv - g * wv, std::memory_order_relaxed);
  }
  return 0.5 * err * err;
}

}  // namespace lexvec
