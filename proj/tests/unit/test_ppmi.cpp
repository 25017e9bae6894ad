#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "lexvec/error.hpp"
#include "lexvec/ppmi.hpp"

using namespace lexvec;

namespace {

// Marginals with M(w,*) = M(*,c) = 4, M(*,*) = 16 for w = c = 0.
Marginals four_by_four() {
  const ContextSpace space(4, 1, false);
  Marginals m(space);
  m.word = {4, 4, 4, 4};
  m.context = {4, 4, 4, 4};
  m.total = 16;
  return m;
}

}  // namespace

TEST_CASE("unsmoothed example is log 2") {
  const Ppmi p(four_by_four(), 1.0);
  CHECK(p.value(0, ContextId{0}, 2) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("zero count gives exactly zero") {
  const Ppmi p(four_by_four(), 0.75);
  CHECK(p.value(0, ContextId{1}, 0) == 0.0);
}

TEST_CASE("independent uniform grid gives zero everywhere") {
  const std::size_t v = 5;
  const ContextSpace space(v, 1, false);
  CoocStats stats(space);
  for (WordId w = 0; w < v; ++w) {
    for (WordId c = 0; c < v; ++c) stats.add(w, ContextId{c}, 3);
  }
  const Ppmi p(stats.marginals(), 1.0);
  for (WordId w = 0; w < v; ++w) {
    for (WordId c = 0; c < v; ++c) CHECK(ppmi_value(stats, p, w, ContextId{c}) == 0.0);
  }
}

TEST_CASE("counts inconsistent with marginals are an integrity error") {
  const Ppmi p(four_by_four(), 1.0);
  CHECK_THROWS_AS(p.value(0, ContextId{0}, 5), IntegrityError);
  const ContextSpace space(2, 1, false);
  Marginals m(space);
  m.word = {3, 0};
  m.context = {3, 0};
  m.total = 3;
  const Ppmi q(m, 0.75);
  CHECK_THROWS_AS(q.value(1, ContextId{0}, 1), IntegrityError);
}

TEST_CASE("smoothing only touches the context marginal") {
  const Marginals m = four_by_four();
  const Ppmi p(m, 0.5);
  CHECK(p.smoothed_total() == doctest::Approx(8.0));
  CHECK(p.smoothed_context(ContextId{2}) == doctest::Approx(2.0));
  // Uniform context marginals make smoothing a no-op.
  const Ppmi q(m, 1.0);
  CHECK(p.value(1, ContextId{1}, 3) == doctest::Approx(q.value(1, ContextId{1}, 3)).epsilon(1e-14));
}

TEST_CASE("non-negative and monotone in the pair count") {
  const ContextSpace space(3, 1, false);
  Marginals m(space);
  m.word = {40, 30, 30};
  m.context = {50, 25, 25};
  m.total = 100;
  for (double alpha : {1.0, 0.75, 0.3}) {
    const Ppmi p(m, alpha);
    double prev = 0.0;
    for (std::uint64_t n = 0; n <= 25; ++n) {
      const double x = p.value(0, ContextId{1}, n);
      CHECK(x >= 0.0);
      CHECK(x >= prev);
      prev = x;
    }
  }
}

TEST_CASE("matches the dense long-double oracle") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t v = 8 + trial * 3;
    const int win = 1 + trial % 2;
    const bool positional = trial % 3 == 0;
    const auto sentences = oracle::random_sentences(rng, v, 1500);
    std::vector<Sentence> ss(sentences.begin(), sentences.end());
    InMemoryCorpus corpus(ss);
    const ContextSpace space(v, win, positional);
    const CoocStats stats = count_corpus(corpus, space);
    const auto dense = oracle::counts(sentences, v, win, positional);
    for (double alpha : {1.0, 0.75}) {
      const Ppmi p(stats.marginals(), alpha);
      const auto expected = oracle::ppmi(dense, alpha);
      for (std::size_t w = 0; w < v; ++w) {
        for (std::size_t c = 0; c < space.size(); ++c) {
          const double got =
              ppmi_value(stats, p, static_cast<WordId>(w), ContextId{static_cast<std::uint32_t>(c)});
          REQUIRE(oracle::close_rel(got, expected[w][c], 1e-12L, 1e-15L));
        }
      }
    }
  }
}
