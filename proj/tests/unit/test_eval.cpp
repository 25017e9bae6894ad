#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "../oracles.hpp"
#include "lexvec/error.hpp"
#include "lexvec/eval.hpp"
#include "lexvec/extmem.hpp"

using namespace lexvec;

namespace {

VectorSet make_set(const std::vector<std::vector<double>>& rows, std::vector<std::string> words = {}) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  if (words.empty()) {
    for (std::size_t i = 0; i < rows.size(); ++i) words.push_back("w" + std::to_string(i));
  }
  return VectorSet(std::move(words), std::move(m));
}

std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows) {
    for (double& x : r) x = g(rng);
  }
  return rows;
}

}  // namespace

TEST_CASE("combo names") {
  CHECK(parse_combo("W") == Combo::W);
  CHECK(parse_combo("W+Wc") == Combo::WPlusContext);
  CHECK(parse_combo("W+Wpos") == Combo::WPlusPositional);
  CHECK(to_string(Combo::WPlusPositional) == "W+Wpos");
  CHECK_THROWS_AS(parse_combo("C"), ConfigError);
}

TEST_CASE("combine W, W+Wc and W+Wpos") {
  const auto vocab = Vocabulary::from_entries({"a", "b"}, {2, 1});
  const ContextSpace plain(2, 2, false);
  auto emb = init_embeddings(2, 2, 3, 1);
  const auto w = combine(emb, vocab, Combo::W, plain);
  CHECK(w.matrix() == emb.words);
  CHECK(w.word(1) == "b");
  const auto wc = combine(emb, vocab, Combo::WPlusContext, plain);
  for (std::size_t i = 0; i < 3; ++i) CHECK(wc.vector(1)[i] == emb.words(1, i) + emb.contexts(1, i));
  CHECK_THROWS_AS(combine(emb, vocab, Combo::WPlusPositional, plain), ConfigError);

  const ContextSpace pos(2, 2, true);
  auto pe = init_embeddings(2, pos.size(), 4, 2);
  for (double& x : pe.contexts.data()) x = 0.0;
  const int offsets[] = {-2, -1, 1, 2};
  for (int i = 0; i < 4; ++i) pe.contexts(raw(pos.encode(1, offsets[i])), i) = 1.0;
  const auto wp = combine(pe, vocab, Combo::WPlusPositional, pos);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(wp.vector(1)[i] == pe.words(1, i) + 1.0);
    CHECK(wp.vector(0)[i] == pe.words(0, i));
  }
  CHECK_THROWS_AS(combine(pe, vocab, Combo::WPlusContext, pos), ConfigError);
}

TEST_CASE("spearman basics and errors") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> rev{5, 4, 3, 2, 1};
  CHECK(spearman(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(x, rev) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> flat{2, 2, 2, 2, 2};
  CHECK_THROWS_AS(spearman(x, flat), UndefinedCorrelationError);
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), UndefinedCorrelationError);
  CHECK_THROWS_AS(spearman(x, std::vector<double>{1, 2}), ConfigError);
}

TEST_CASE("average ranks share ties") {
  const std::vector<double> x{10, 20, 20, 5};
  CHECK(average_ranks(x) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("tied example matches the rank-then-Pearson oracle") {
  const std::vector<double> x{1, 2, 2, 4};
  const std::vector<double> y{1, 3, 2, 4};
  CHECK(oracle::close_rel(spearman(x, y), oracle::spearman(x, y), 1e-12L));
}

TEST_CASE("spearman is invariant under increasing transforms") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::vector<double> x(40), y(40);
  for (int i = 0; i < 40; ++i) {
    x[i] = u(rng);
    y[i] = i % 7 == 0 ? 1.0 : u(rng);
  }
  std::vector<double> tx, ty;
  for (double v : x) tx.push_back(std::exp(3 * v) + 1);
  for (double v : y) ty.push_back(std::log(v));
  CHECK(spearman(x, y) == doctest::Approx(spearman(tx, ty)).epsilon(1e-14));
}

TEST_CASE("similarity: perfect order, coverage, OOV and zero vectors") {
  const auto vs = make_set({{1, 0}, {1, 0.1}, {0, 1}, {-1, 0}, {0, 0}},
                           {"a", "b", "c", "d", "z"});
  std::vector<SimilarityItem> data{{"a", "b", 9}, {"a", "c", 5}, {"A", "D", 1}, {"a", "q", 3}};
  const auto r = eval_similarity(vs, data);
  CHECK(r.rho == doctest::Approx(1.0));
  CHECK(r.covered == 3);
  CHECK(r.coverage == doctest::Approx(0.75));

  EvalOptions exact;
  exact.lowercase = false;
  const auto r2 = eval_similarity(vs, std::vector<SimilarityItem>(data.begin(), data.begin() + 3), exact);
  CHECK(r2.covered == 2);

  std::vector<SimilarityItem> zero{{"a", "b", 1}, {"a", "c", 2}, {"z", "a", 3}, {"b", "d", 0}};
  const auto r3 = eval_similarity(vs, zero);
  CHECK(r3.zero_norm == 1);
  CHECK(r3.covered == 3);

  std::vector<SimilarityItem> oov{{"x", "y", 1}, {"p", "q", 2}};
  CHECK_THROWS_AS(eval_similarity(vs, oov), Error);
}

TEST_CASE("similarity on random pairs matches the composed oracles") {
  std::mt19937_64 rng(10);
  const auto rows = random_rows(rng, 30, 8);
  const auto vs = make_set(rows);
  std::uniform_int_distribution<int> pick(0, 29);
  std::uniform_real_distribution<double> score(0, 10);
  std::vector<SimilarityItem> data;
  std::vector<double> cos, human;
  for (int i = 0; i < 50; ++i) {
    // Distinct words: a self-pair's cosine is 1 only up to rounding, which
    // would turn exact ties in the oracle into near-ties here.
    const int a = pick(rng);
    int b = pick(rng);
    while (b == a) b = pick(rng);
    const double s = std::round(score(rng));  // rounded, so ties occur
    data.push_back({"w" + std::to_string(a), "w" + std::to_string(b), s});
    cos.push_back(static_cast<double>(oracle::cosine(rows[a], rows[b])));
    human.push_back(s);
  }
  const auto r = eval_similarity(vs, data);
  CHECK(oracle::close_rel(r.rho, oracle::spearman(cos, human), 1e-12L));
}

TEST_CASE("3CosAdd finds the constructed answer") {
  const double s = std::sqrt(3.0);
  const auto vs = make_set({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1},
                            {-1 / s, 1 / s, 1 / s, 0}});
  const AnalogySolver solver(vs);
  CHECK(solver.solve(0, 1, 2, AnalogyMethod::CosAdd) == 4);
}

TEST_CASE("a* = a reduces 3CosAdd to the nearest neighbour of b") {
  std::mt19937_64 rng(3);
  const auto rows = random_rows(rng, 20, 5);
  const AnalogySolver solver(make_set(rows));
  for (std::size_t b = 1; b < 20; ++b) {
    std::size_t best = 20;
    long double best_cos = 0;
    for (std::size_t x = 0; x < 20; ++x) {
      if (x == 0 || x == b) continue;
      const auto c = oracle::cosine(rows[x], rows[b]);
      if (best == 20 || c > best_cos) {
        best = x;
        best_cos = c;
      }
    }
    CHECK(solver.solve(0, 0, static_cast<WordId>(b), AnalogyMethod::CosAdd) == best);
  }
}

TEST_CASE("ties go to the lowest id and query words are excluded") {
  const auto vs = make_set({{1, 0}, {0, 1}, {1, 1}, {1, 1}, {1, 1}});
  const AnalogySolver solver(vs);
  for (auto m : {AnalogyMethod::CosAdd, AnalogyMethod::CosMul}) {
    CHECK(solver.solve(0, 1, 2, m) == 3);
    CHECK(solver.solve(0, 1, 3, m) == 2);
  }
}

TEST_CASE("analogy matches the exhaustive oracle and ignores rescaling") {
  std::mt19937_64 rng(77);
  const auto rows = random_rows(rng, 30, 10);
  auto scaled = rows;
  std::uniform_real_distribution<double> factor(0.01, 100.0);
  for (auto& r : scaled) {
    const double f = factor(rng);
    for (double& x : r) x *= f;
  }
  const AnalogySolver solver(make_set(rows));
  const AnalogySolver solver_scaled(make_set(scaled));
  std::uniform_int_distribution<WordId> pick(0, 29);
  for (int q = 0; q < 100; ++q) {
    const WordId a = pick(rng), as = pick(rng), b = pick(rng);
    for (bool mul : {false, true}) {
      const auto m = mul ? AnalogyMethod::CosMul : AnalogyMethod::CosAdd;
      const WordId got = solver.solve(a, as, b, m);
      CHECK(got == oracle::analogy(rows, a, as, b, mul));
      CHECK(got != a);
      CHECK(got != as);
      CHECK(got != b);
      CHECK(solver_scaled.solve(a, as, b, m) == got);
    }
  }
}

TEST_CASE("eval_analogy accuracy, sections and coverage") {
  std::mt19937_64 rng(5);
  const auto rows = random_rows(rng, 12, 6);
  const auto vs = make_set(rows);
  const AnalogySolver solver(vs);
  std::vector<AnalogyQuestion> qs;
  std::size_t expected_correct = 0;
  for (int i = 0; i < 24; ++i) {
    const WordId a = i % 12, as = (i * 5 + 1) % 12, b = (i * 7 + 3) % 12;
    if (a == as || a == b || as == b) continue;
    const auto answer = oracle::analogy(rows, a, as, b, false);
    // Every third question gets a wrong expected answer.
    const WordId bs = i % 3 == 0 ? static_cast<WordId>((answer + 1) % 12) : static_cast<WordId>(answer);
    expected_correct += bs == answer;
    qs.push_back({i < 12 ? "first" : "second", vs.word(a), vs.word(as), vs.word(b), vs.word(bs)});
  }
  const std::size_t in_vocab = qs.size();
  qs.push_back({"second", "w0", "w1", "w2", "missing"});
  const auto r = eval_analogy(vs, qs, AnalogyMethod::CosAdd);
  CHECK(r.overall.correct == expected_correct);
  CHECK(r.overall.covered == in_vocab);
  CHECK(r.overall.total == in_vocab + 1);
  CHECK(r.section_order == std::vector<std::string>{"first", "second"});
  CHECK(r.sections.at("first").total + r.sections.at("second").total == r.overall.total);

  EvalOptions strict;
  strict.strict_oov = true;
  const auto rs = eval_analogy(vs, qs, AnalogyMethod::CosAdd, strict);
  CHECK(rs.overall.covered == in_vocab + 1);
  CHECK(rs.overall.correct == expected_correct);

  std::vector<AnalogyQuestion> oov{{"s", "x", "y", "z", "q"}};
  CHECK_THROWS_AS(eval_analogy(vs, oov, AnalogyMethod::CosMul), Error);
}

TEST_CASE("constructed answers give accuracy 1") {
  std::mt19937_64 rng(6);
  const auto rows = random_rows(rng, 15, 4);
  const auto vs = make_set(rows);
  std::vector<AnalogyQuestion> qs;
  for (WordId a = 0; a < 5; ++a) {
    const WordId as = a + 5, b = a + 10;
    for (bool mul : {false, true}) {
      const auto bs = oracle::analogy(rows, a, as, b, mul);
      qs.push_back({mul ? "mul" : "add", vs.word(a), vs.word(as), vs.word(b), vs.word(bs)});
    }
  }
  std::vector<AnalogyQuestion> add(qs.begin(), qs.end()), mul;
  std::erase_if(add, [](const auto& q) { return q.section == "mul"; });
  for (const auto& q : qs) {
    if (q.section == "mul") mul.push_back(q);
  }
  CHECK(eval_analogy(vs, add, AnalogyMethod::CosAdd).accuracy() == 1.0);
  CHECK(eval_analogy(vs, mul, AnalogyMethod::CosMul).accuracy() == 1.0);
}

TEST_CASE("dataset loaders") {
  TempDir dir;
  {
    std::ofstream out(dir.path() / "sim.txt");
    out << "# comment\nking queen 9.5\n\nCat dog\t7\n";
  }
  const auto sim = load_similarity_dataset(dir.path() / "sim.txt");
  REQUIRE(sim.size() == 2);
  CHECK(sim[1].word1 == "Cat");
  CHECK(sim[1].score == 7.0);
  {
    std::ofstream out(dir.path() / "bad.txt");
    out << "a b 1\na b\n";
  }
  try {
    load_similarity_dataset(dir.path() / "bad.txt");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  {
    std::ofstream out(dir.path() / "an.txt");
    out << "a b c d\n: capital-common-countries\nathens greece baghdad iraq\n: family\nboy girl brother sister\n";
  }
  const auto an = load_analogy_dataset(dir.path() / "an.txt");
  REQUIRE(an.size() == 3);
  CHECK(an[0].section == "default");
  CHECK(an[1].section == "capital-common-countries");
  CHECK(an[2].b_star == "sister");
}

TEST_CASE("report formats") {
  CHECK(report_line("ws353", "spearman", 0.5, 1.0) == "ws353\tspearman\t0.500000\t1.000000");
  const std::vector<ReportRow> rows{{"ws353", "spearman", 0.61, 0.98}, {"google", "3CosAdd", 0.4, 1}};
  const auto t = format_table(rows);
  CHECK(t.find("ws353") != std::string::npos);
  CHECK(t.find("3CosAdd") != std::string::npos);
}
