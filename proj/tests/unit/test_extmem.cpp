#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "../oracles.hpp"
#include "lexvec/error.hpp"
#include "lexvec/extmem.hpp"

using namespace lexvec;

namespace {

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

struct Fixture {
  std::vector<Sentence> sentences;
  Vocabulary vocab;
};

Fixture fixture(std::uint64_t seed, std::size_t v, std::size_t tokens) {
  std::mt19937_64 rng(seed);
  Fixture f;
  auto s = oracle::random_sentences(rng, v, tokens);
  f.sentences.assign(s.begin(), s.end());
  std::vector<std::uint64_t> freq(v, 0);
  for (const auto& x : f.sentences) {
    for (auto w : x) ++freq[w];
  }
  std::vector<std::string> words;
  for (std::size_t i = 0; i < v; ++i) words.push_back("w" + std::to_string(i));
  f.vocab = Vocabulary::from_entries(words, freq);
  return f;
}

}  // namespace

TEST_CASE("line codecs") {
  CHECK(format_raw({3, ContextId{7}, PairOrigin::corpus}) == "3 7 c");
  CHECK(format_tuple({3, ContextId{7}, true, 3, 2}) == "3 7 + 3 2");
  CHECK(*parse_raw("12 0 n") == RawPairRecord{12, ContextId{0}, PairOrigin::negative});
  CHECK(*parse_tuple("3 7 - 1 0") == PairTuple{3, ContextId{7}, false, 1, 0});
  CHECK_FALSE(parse_raw("3 7 x").has_value());
  CHECK_FALSE(parse_raw("3 7").has_value());
  CHECK_FALSE(parse_raw("3 -7 c").has_value());
  CHECK_FALSE(parse_tuple("3 7 + 0 0").has_value());
  CHECK_FALSE(parse_tuple("3 7 + 2 0").has_value());
  CHECK_FALSE(parse_tuple("3 7 - 2 1").has_value());
  CHECK_FALSE(parse_tuple("3 7 * 1 0").has_value());
}

TEST_CASE("collapse examples") {
  TempDir dir;
  write_text(dir.path() / "raw", "3 7 c\n3 7 n\n3 7 c\n");
  const auto s = sort_collapse(dir.path() / "raw", dir.path() / "out");
  CHECK(read_text(dir.path() / "out") == "3 7 + 3 2\n");
  CHECK(s.tuples == 1);
  CHECK(s.total_tot == 3);
  CHECK(s.total_corpus == 2);

  write_text(dir.path() / "raw", "3 7 n\n");
  sort_collapse(dir.path() / "raw", dir.path() / "out");
  CHECK(read_text(dir.path() / "out") == "3 7 - 1 0\n");
}

TEST_CASE("collapsed output is sorted numerically, not lexically") {
  TempDir dir;
  write_text(dir.path() / "raw", "10 2 c\n9 11 n\n9 2 c\n10 2 n\n2 100 c\n");
  SortOptions opt;
  opt.chunk_records = 2;
  opt.max_fan_in = 2;
  sort_collapse(dir.path() / "raw", dir.path() / "out", opt);
  CHECK(read_text(dir.path() / "out") == "2 100 + 1 1\n9 2 + 1 1\n9 11 - 1 0\n10 2 + 2 1\n");
}

TEST_CASE("malformed raw line reports its line number") {
  TempDir dir;
  write_text(dir.path() / "raw", "1 2 c\n1 2 n\n1 two c\n");
  try {
    sort_collapse(dir.path() / "raw", dir.path() / "out");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("sort_collapse matches the in-memory oracle with small chunks") {
  TempDir dir;
  std::mt19937_64 rng(99);
  std::vector<oracle::Raw> records;
  std::string text;
  for (int i = 0; i < 20000; ++i) {
    oracle::Raw r{static_cast<std::uint32_t>(rng() % 40), static_cast<std::uint32_t>(rng() % 60),
                  rng() % 3 == 0};
    records.push_back(r);
    text += std::to_string(r.w) + " " + std::to_string(r.c) + (r.corpus ? " c\n" : " n\n");
  }
  write_text(dir.path() / "raw", text);
  for (std::size_t fan_in : {2, 3, 64}) {
    SortOptions opt;
    opt.chunk_records = 333;
    opt.max_fan_in = fan_in;
    opt.temp_parent = dir.path();
    sort_collapse(dir.path() / "raw", dir.path() / "out", opt);
    CHECK(read_text(dir.path() / "out") == oracle::collapse(records));
  }
}

TEST_CASE("expand_si examples and round trip") {
  TempDir dir;
  write_text(dir.path() / "f", "3 7 + 3 2\n");
  CHECK(expand_si(dir.path() / "f", dir.path() / "x") == 3);
  CHECK(read_text(dir.path() / "x") == "3 7 + 1 2\n3 7 + 1 2\n3 7 + 1 2\n");

  write_text(dir.path() / "f", "4 1 - 1 0\n");
  expand_si(dir.path() / "f", dir.path() / "x");
  CHECK(read_text(dir.path() / "x") == "4 1 - 1 0\n");

  const std::string collapsed = "0 1 + 2 1\n0 5 - 4 0\n2 0 + 1 1\n2 3 + 7 7\n";
  write_text(dir.path() / "f", collapsed);
  CHECK(expand_si(dir.path() / "f", dir.path() / "x") == 14);
  shuffle_file(dir.path() / "x", dir.path() / "xs", 4, 5);
  sort_collapse(dir.path() / "xs", dir.path() / "back");
  CHECK(read_text(dir.path() / "back") == collapsed);
}

TEST_CASE("collapsing tuples with disagreeing corpus counts is an integrity error") {
  TempDir dir;
  write_text(dir.path() / "x", "1 1 + 1 2\n1 1 + 1 3\n");
  CHECK_THROWS_AS(sort_collapse(dir.path() / "x", dir.path() / "out"), IntegrityError);
}

TEST_CASE("shuffle is a deterministic permutation") {
  TempDir dir;
  std::string text;
  for (int i = 0; i < 100000; ++i) text += std::to_string(i) + " x\n";
  write_text(dir.path() / "in", text);
  for (std::size_t buckets : {1, 16}) {
    CHECK(shuffle_file(dir.path() / "in", dir.path() / "a", buckets, 3) == 100000);
    shuffle_file(dir.path() / "in", dir.path() / "b", buckets, 3);
    const auto a = read_text(dir.path() / "a");
    CHECK(a == read_text(dir.path() / "b"));
    CHECK(a != text);
    CHECK(sorted(lines_of(a)) == sorted(lines_of(text)));
  }
  shuffle_file(dir.path() / "in", dir.path() / "c", 16, 4);
  CHECK(read_text(dir.path() / "c") != read_text(dir.path() / "a"));
}

namespace {

std::vector<int> first_line_counts(const TempDir& dir, std::size_t buckets, int trials,
                                   std::string_view label) {
  write_text(dir.path() / "in", "0\n1\n2\n3\n4\n5\n6\n7\n8\n9\n");
  std::vector<int> first(10, 0);
  for (int trial = 0; trial < trials; ++trial) {
    shuffle_file(dir.path() / "in", dir.path() / "out", buckets,
                 derive_seed(1, label, static_cast<std::uint64_t>(trial)), dir.path());
    first[std::stoi(lines_of(read_text(dir.path() / "out")).front())]++;
  }
  return first;
}

}  // namespace

// Each count is Binomial(1000, 0.1) with sd 0.0095, so the +-0.02 band is
// about 2.1 sd per line; across 10 lines roughly a third of seeds miss it.
TEST_CASE("shuffle puts each line first with frequency 0.1 +- 0.02") {
  TempDir dir;
  for (std::size_t buckets : {1, 16}) {
    const auto first = first_line_counts(dir, buckets, 1000, "t");
    for (int n : first) CHECK_MESSAGE(std::fabs(n / 1000.0 - 0.1) <= 0.02, "buckets ", buckets);
  }
}

TEST_CASE("shuffle first-line distribution passes a chi-square test") {
  TempDir dir;
  const int trials = 10000;
  for (std::size_t buckets : {1, 16}) {
    const auto first = first_line_counts(dir, buckets, trials, "chi2");
    double chi2 = 0;
    for (int n : first) chi2 += (n - trials / 10.0) * (n - trials / 10.0) / (trials / 10.0);
    // 9 degrees of freedom, p = 0.001.
    CHECK_MESSAGE(chi2 < 27.88, "buckets ", buckets);
  }
}

TEST_CASE("shuffling an empty file") {
  TempDir dir;
  write_text(dir.path() / "in", "");
  CHECK(shuffle_file(dir.path() / "in", dir.path() / "out", 4, 1) == 0);
  CHECK(read_text(dir.path() / "out").empty());
}

TEST_CASE("write_pairs record accounting") {
  TempDir dir;
  const ContextSpace space(2, 1, false);
  const auto vocab = Vocabulary::from_entries({"a", "b"}, {1, 1});
  const auto sampler = NegativeSampler::from_unigrams(vocab);
  InMemoryCorpus ab({{0, 1}});
  const auto s = write_pairs(ab, space, sampler, 0, 1, dir.path() / "raw");
  CHECK(s.records == 2);
  CHECK(s.corpus_records == 2);
  CHECK(read_text(dir.path() / "raw") == "0 1 c\n1 0 c\n");

  const auto f = fixture(21, 10, 900);
  for (bool positional : {false, true}) {
    const ContextSpace sp(10, 2, positional);
    InMemoryCorpus corpus(f.sentences);
    const auto stats = count_corpus(corpus, sp);
    const auto smp = NegativeSampler::for_space(sp, f.vocab, stats.marginals());
    const auto sum = write_pairs(corpus, sp, smp, 5, 8, dir.path() / "raw");
    CHECK(sum.targets == 900);
    CHECK(sum.negative_records == 5 * 900);
    CHECK(sum.corpus_records == stats.marginals().total);
    CHECK(sum.marginals == stats.marginals());

    std::vector<std::string> from_file;
    for (const auto& line : lines_of(read_text(dir.path() / "raw"))) {
      if (line.back() == 'c') from_file.push_back(line);
    }
    std::vector<std::string> expected;
    for (const auto& sentence : f.sentences) {
      for (auto [w, c] : stream_pairs(sentence, sp)) {
        expected.push_back(format_raw({w, c, PairOrigin::corpus}));
      }
    }
    CHECK(sorted(from_file) == sorted(expected));

    const auto cs = sort_collapse(dir.path() / "raw", dir.path() / "col");
    CHECK(cs.total_corpus == stats.marginals().total);
    CHECK(cs.total_tot == stats.marginals().total + 5 * 900);
  }
}

TEST_CASE("marginals sidecar round trip and integrity") {
  TempDir dir;
  const auto f = fixture(5, 8, 400);
  const ContextSpace space(8, 2, true);
  InMemoryCorpus corpus(f.sentences);
  const auto stats = count_corpus(corpus, space);
  const auto smp = NegativeSampler::for_space(space, f.vocab, stats.marginals());
  const auto sum = write_pairs(corpus, space, smp, 2, 1, dir.path() / "raw");
  sort_collapse(dir.path() / "raw", dir.path() / "col");
  save_marginals(sum.marginals, dir.path() / "m");
  CHECK(load_marginals(dir.path() / "m", dir.path() / "col", space) == stats.marginals());
  CHECK(lines_of(read_text(dir.path() / "m")).size() == space.size() + 1);

  Marginals wrong = sum.marginals;
  wrong.total += 1;
  save_marginals(wrong, dir.path() / "bad");
  CHECK_THROWS_AS(load_marginals(dir.path() / "bad", dir.path() / "col", space), IntegrityError);
}

TEST_CASE("MI on a single '+' tuple is one sgd_update toward its PPMI") {
  TempDir dir;
  const ContextSpace space(3, 1, false);
  Marginals m(space);
  m.word = {3, 2, 1};
  m.context = {1, 4, 1};
  m.total = 6;
  write_text(dir.path() / "f", "0 1 + 1 2\n");
  TrainConfig c;
  c.dim = 4;
  c.iterations = 1;
  std::vector<UpdateRecord> log;
  const auto got = train_mi(dir.path() / "f", m, space, c, {},
                            [&](const UpdateRecord& r) { log.push_back(r); });
  auto want = init_embeddings(3, 3, 4, init_seed(c.seed));
  const double target = Ppmi(m, c.cds_alpha).value(0, ContextId{1}, 2);
  sgd_update(want, 0, ContextId{1}, target, c.lr);
  CHECK(got == want);
  REQUIRE(log.size() == 1);
  CHECK(log[0].target == target);
  CHECK(train_si(dir.path() / "f", m, space, c) == got);
}

TEST_CASE("MI applies tot updates toward 0 for '-' tuples") {
  TempDir dir;
  const ContextSpace space(2, 1, false);
  Marginals m(space);
  m.word = {1, 1};
  m.context = {1, 1};
  m.total = 2;
  write_text(dir.path() / "f", "0 1 + 1 1\n1 1 - 4 0\n");
  TrainConfig c;
  c.dim = 3;
  c.iterations = 2;
  std::map<int, std::vector<std::pair<std::uint32_t, double>>> log;
  train_mi(dir.path() / "f", m, space, c, {},
           [&](const UpdateRecord& r) { log[r.epoch].emplace_back(r.word, r.target); });
  for (auto& [epoch, updates] : log) {
    CHECK(updates.size() == 5);
    CHECK(std::count(updates.begin(), updates.end(), std::make_pair(1u, 0.0)) == 4);
    // The four updates of one tuple are consecutive.
    auto first = std::find(updates.begin(), updates.end(), std::make_pair(1u, 0.0));
    CHECK(std::all_of(first, first + 4, [](auto u) { return u.first == 1u; }));
  }
}

TEST_CASE("MI and SI apply the same update multiset every epoch") {
  TempDir dir;
  const auto f = fixture(31, 12, 1500);
  const ContextSpace space(12, 2, false);
  InMemoryCorpus corpus(f.sentences);
  const auto smp = NegativeSampler::from_unigrams(f.vocab);
  const auto sum = write_pairs(corpus, space, smp, 3, 4, dir.path() / "raw");
  sort_collapse(dir.path() / "raw", dir.path() / "col");
  TrainConfig c;
  c.dim = 5;
  c.iterations = 3;
  using Key = std::tuple<WordId, std::uint32_t, double>;
  std::map<int, std::vector<Key>> mi, si;
  auto logger = [](auto& into) {
    return [&into](const UpdateRecord& r) {
      into[r.epoch].emplace_back(r.word, raw(r.context), r.target);
    };
  };
  const auto a = train_mi(dir.path() / "col", sum.marginals, space, c, {}, logger(mi));
  const auto b = train_si(dir.path() / "col", sum.marginals, space, c, {}, logger(si));
  REQUIRE(mi.size() == 3);
  for (int e = 0; e < 3; ++e) {
    CHECK(mi[e].size() == sum.records);
    std::sort(mi[e].begin(), mi[e].end());
    std::sort(si[e].begin(), si[e].end());
    CHECK(mi[e] == si[e]);
  }
  CHECK_FALSE(a == b);
}

TEST_CASE("external training rejects inconsistent inputs") {
  TempDir dir;
  const ContextSpace space(2, 1, false);
  Marginals m(space);
  m.word = {1, 1};
  m.context = {1, 1};
  m.total = 2;
  TrainConfig c;
  c.dim = 2;
  c.iterations = 1;
  write_text(dir.path() / "f", "0 1 + 3 3\n");
  CHECK_THROWS_AS(train_mi(dir.path() / "f", m, space, c), IntegrityError);
  write_text(dir.path() / "f", "0 9 + 1 1\n");
  CHECK_THROWS_AS(train_mi(dir.path() / "f", m, space, c), IntegrityError);
  write_text(dir.path() / "f", "0 1 + 1\n");
  CHECK_THROWS_AS(train_mi(dir.path() / "f", m, space, c), ParseError);
}

TEST_CASE("parallel external replay stays finite") {
  TempDir dir;
  const auto f = fixture(8, 10, 3000);
  const ContextSpace space(10, 2, false);
  InMemoryCorpus corpus(f.sentences);
  const auto smp = NegativeSampler::from_unigrams(f.vocab);
  const auto sum = write_pairs(corpus, space, smp, 2, 1, dir.path() / "raw");
  sort_collapse(dir.path() / "raw", dir.path() / "col");
  TrainConfig c;
  c.dim = 6;
  c.iterations = 2;
  c.threads = 3;
  const auto e = train_si(dir.path() / "col", sum.marginals, space, c);
  for (double x : e.words.data()) REQUIRE(std::isfinite(x));
}
