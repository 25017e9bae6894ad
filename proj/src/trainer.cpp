#include "lexvec/trainer.hpp"

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "lexvec/error.hpp"

namespace lexvec {

void TrainConfig::validate() const {
  if (dim == 0) throw ConfigError("dim must be positive");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (negatives < 0) throw ConfigError("negatives must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("subsample must be in (0, 1]");
  if (!(cds_alpha > 0.0 && cds_alpha <= 1.0)) throw ConfigError("cds must be in (0, 1]");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::uint64_t negative_seed(std::uint64_t master, int epoch) {
  return derive_seed(master, "negatives", static_cast<std::uint64_t>(epoch));
}

std::uint64_t subsample_seed(std::uint64_t master) { return derive_seed(master, "subsample"); }

std::uint64_t init_seed(std::uint64_t master) { return derive_seed(master, "init"); }

namespace {

double pair_target(const CoocStats& stats, const Ppmi& ppmi, WordId w, ContextId c,
                   PairOrigin origin) {
  const std::uint64_t n = stats.count(w, c);
  if (origin == PairOrigin::corpus && n == 0) {
    throw IntegrityError("window pair (" + std::to_string(w) + ", " + std::to_string(raw(c)) +
                         ") has no co-occurrence count");
  }
  return ppmi.value(w, c, n);
}

void train_parallel(SentenceSource& corpus, const CoocStats& stats, const Ppmi& ppmi,
                    const NegativeSampler& sampler, const TrainConfig& config,
                    const LearningRate& schedule, EmbeddingPair& emb) {
  const auto sentences = read_all(corpus);
  const auto& space = stats.space();
  const int k = config.negatives;
  std::atomic<std::uint64_t> progress{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.threads));

  for (int epoch = 0; epoch < config.iterations; ++epoch) {
    std::vector<std::thread> workers;
    for (int t = 0; t < config.threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          Rng rng(derive_seed(config.seed, "negatives/worker",
                              static_cast<std::uint64_t>(epoch) * 1000003u + t));
          std::uint64_t local = 0;
          auto apply = [&](WordId w, ContextId c, PairOrigin origin) {
            const double lr = schedule.at(progress.load(std::memory_order_relaxed) + local);
            sgd_update_relaxed(emb, w, c, pair_target(stats, ppmi, w, c, origin), lr);
            ++local;
          };
          for (std::size_t i = static_cast<std::size_t>(t); i < sentences.size();
               i += static_cast<std::size_t>(config.threads)) {
            InMemoryCorpus one({sentences[i]});
            for_each_scheduled_pair(one, space, sampler, k, rng, apply);
            progress.fetch_add(local, std::memory_order_relaxed);
            local = 0;
          }
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  if (progress.load() != schedule.total_steps()) {
    throw IntegrityError("corpus replay does not match the counted statistics");
  }
}

}  // namespace

EmbeddingPair train_standard(SentenceSource& corpus, const CoocStats& stats,
                             const NegativeSampler& sampler, const TrainConfig& config,
                             const UpdateObserver& observer) {
  config.validate();
  const auto& space = stats.space();
  if (sampler.size() != space.size()) throw ConfigError("sampler does not match the context space");
  const Ppmi ppmi(stats.marginals(), config.cds_alpha);
  const std::uint64_t per_epoch =
      stats.marginals().total + static_cast<std::uint64_t>(config.negatives) * stats.total_targets();
  const LearningRate schedule(config.lr, per_epoch * static_cast<std::uint64_t>(config.iterations));

  EmbeddingPair emb =
      init_embeddings(space.vocab_size(), space.size(), config.dim, init_seed(config.seed));

  if (config.threads > 1) {
    train_parallel(corpus, stats, ppmi, sampler, config, schedule, emb);
    return emb;
  }

  std::uint64_t step = 0;
  for (int epoch = 0; epoch < config.iterations; ++epoch) {
    Rng rng(negative_seed(config.seed, config.fresh_negatives ? epoch : 0));
    for_each_scheduled_pair(corpus, space, sampler, config.negatives, rng,
                            [&](WordId w, ContextId c, PairOrigin origin) {
                              const double target = pair_target(stats, ppmi, w, c, origin);
                              if (observer) observer({epoch, w, c, target});
                              sgd_update(emb, w, c, target, schedule.at(step++));
                            });
  }
  if (step != schedule.total_steps()) {
    throw IntegrityError("corpus replay does not match the counted statistics");
  }
  return emb;
}

double global_loss(const EmbeddingPair& emb, const CoocStats& stats, const Ppmi& ppmi,
                   const NegativeSampler& sampler, int k, std::size_t max_cells) {
  const auto& space = stats.space();
  const std::size_t cells = space.vocab_size() * space.size();
  if (cells > max_cells) {
    throw ConfigError("global_loss: " + std::to_string(cells) + " cells exceed the limit of " +
                      std::to_string(max_cells));
  }
  auto half_sq = [&](WordId w, ContextId c, std::uint64_t n) {
    const double e = dot(emb.words.row(w), emb.contexts.row(raw(c))) - ppmi.value(w, c, n);
    return 0.5 * e * e;
  };

  double window_term = 0.0;
  stats.for_each_pair([&](WordId w, ContextId c, std::uint64_t n) {
    window_term += static_cast<double>(n) * half_sq(w, c, n);
  });

  double negative_term = 0.0;
  if (k > 0) {
    const auto targets = stats.target_counts();
    for (std::size_t w = 0; w < space.vocab_size(); ++w) {
      if (targets[w] == 0) continue;
      double expected = 0.0;
      for (std::size_t c = 0; c < space.size(); ++c) {
        const ContextId ctx{static_cast<std::uint32_t>(c)};
        const double p = sampler.probability(ctx);
        if (p == 0.0) continue;
        const auto wid = static_cast<WordId>(w);
        expected += p * half_sq(wid, ctx, stats.count(wid, ctx));
      }
      negative_term += static_cast<double>(targets[w]) * static_cast<double>(k) * expected;
    }
  }
  return window_term + negative_term;
}

}  // namespace lexvec
