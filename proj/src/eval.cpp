#include "lexvec/eval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "lexvec/corpus.hpp"
#include "lexvec/error.hpp"

namespace lexvec {
namespace {

std::string lowered(std::string_view s, bool lowercase) {
  std::string out(s);
  if (lowercase) {
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return out;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

std::string_view to_string(Combo combo) {
  switch (combo) {
    case Combo::W:
      return "W";
    case Combo::WPlusContext:
      return "W+Wc";
    case Combo::WPlusPositional:
      return "W+Wpos";
  }
  return "?";
}

Combo parse_combo(std::string_view s) {
  if (s == "W") return Combo::W;
  if (s == "W+Wc") return Combo::WPlusContext;
  if (s == "W+Wpos") return Combo::WPlusPositional;
  throw ConfigError("unknown combo '" + std::string(s) + "' (expected W, W+Wc or W+Wpos)");
}

std::string_view to_string(AnalogyMethod method) {
  return method == AnalogyMethod::CosAdd ? "3CosAdd" : "3CosMul";
}

VectorSet::VectorSet(std::vector<std::string> words, Matrix vectors, Combo combo)
    : words_(std::move(words)), vectors_(std::move(vectors)), combo_(combo) {
  if (words_.size() != vectors_.rows()) throw ConfigError("word list and vector rows differ");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    index_.emplace(words_[i], static_cast<WordId>(i));
  }
}

std::optional<WordId> VectorSet::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VectorSet combine(const EmbeddingPair& emb, const Vocabulary& vocab, Combo combo,
                  const ContextSpace& space) {
  if (emb.words.rows() != vocab.size() || space.vocab_size() != vocab.size()) {
    throw ConfigError("embeddings do not match the vocabulary");
  }
  if (emb.contexts.rows() != space.size()) {
    throw ConfigError("context matrix does not match the context space");
  }
  std::vector<std::string> words(vocab.words().begin(), vocab.words().end());
  Matrix out = emb.words;
  switch (combo) {
    case Combo::W:
      break;
    case Combo::WPlusContext:
      if (space.positional()) {
        throw ConfigError("W+Wc needs plain contexts; positional contexts make the shapes "
                          "incompatible (use W+Wpos)");
      }
      for (std::size_t w = 0; w < out.rows(); ++w) {
        auto dst = out.row(w);
        const auto src = emb.contexts.row(w);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      }
      break;
    case Combo::WPlusPositional:
      if (!space.positional()) throw ConfigError("W+Wpos needs positional contexts");
      for (std::size_t w = 0; w < out.rows(); ++w) {
        auto dst = out.row(w);
        for (int o = -space.window(); o <= space.window(); ++o) {
          if (o == 0) continue;
          const auto src = emb.contexts.row(raw(space.encode(static_cast<WordId>(w), o)));
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
      }
      break;
  }
  return VectorSet(std::move(words), std::move(out), combo);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  return dot(a, b) / (norm(a) * norm(b));
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double mean = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mean;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("spearman: inputs differ in length");
  if (x.size() < 2) throw UndefinedCorrelationError("spearman: need at least two observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  // Average ranks always have mean (n+1)/2.
  const double mean = 0.5 * (n + 1.0);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("spearman: zero rank variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

SimilarityResult eval_similarity(const VectorSet& vs, std::span<const SimilarityItem> dataset,
                                 const EvalOptions& options) {
  SimilarityResult result;
  result.total = dataset.size();
  std::vector<double> model;
  std::vector<double> human;
  for (const auto& item : dataset) {
    const auto a = vs.find(lowered(item.word1, options.lowercase));
    const auto b = vs.find(lowered(item.word2, options.lowercase));
    if (!a || !b) continue;
    const auto va = vs.vector(*a);
    const auto vb = vs.vector(*b);
    const double na = norm(va);
    const double nb = norm(vb);
    if (na == 0.0 || nb == 0.0) {
      ++result.zero_norm;
      continue;
    }
    model.push_back(dot(va, vb) / (na * nb));
    human.push_back(item.score);
  }
  result.covered = model.size();
  result.coverage = result.total == 0 ? 0.0 : static_cast<double>(result.covered) / result.total;
  if (result.covered == 0) throw Error("similarity: no pair is covered by the vocabulary");
  result.rho = spearman(model, human);
  return result;
}

AnalogySolver::AnalogySolver(const VectorSet& vs) : unit_(vs.matrix()) {
  for (std::size_t r = 0; r < unit_.rows(); ++r) {
    auto row = unit_.row(r);
    const double n = norm(row);
    if (n == 0.0) continue;
    for (double& x : row) x /= n;
  }
}

WordId AnalogySolver::solve(WordId a, WordId a_star, WordId b, AnalogyMethod method) const {
  const auto va = unit_.row(a);
  const auto vas = unit_.row(a_star);
  const auto vb = unit_.row(b);
  bool found = false;
  WordId best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < unit_.rows(); ++i) {
    const auto id = static_cast<WordId>(i);
    if (id == a || id == a_star || id == b) continue;
    const auto x = unit_.row(i);
    const double cos_as = dot(x, vas);
    const double cos_a = dot(x, va);
    const double cos_b = dot(x, vb);
    double score;
    if (method == AnalogyMethod::CosAdd) {
      score = cos_as - cos_a + cos_b;
    } else {
      score = ((cos_as + 1.0) / 2.0) * ((cos_b + 1.0) / 2.0) /
              ((cos_a + 1.0) / 2.0 + kCosMulEpsilon);
    }
    if (!found || score > best_score) {
      found = true;
      best = id;
      best_score = score;
    }
  }
  if (!found) throw ConfigError("analogy: vocabulary has no candidate besides the query words");
  return best;
}

AnalogyResult eval_analogy(const VectorSet& vs, std::span<const AnalogyQuestion> dataset,
                           AnalogyMethod method, const EvalOptions& options) {
  AnalogyResult result;
  const AnalogySolver solver(vs);
  for (const auto& q : dataset) {
    auto [it, inserted] = result.sections.try_emplace(q.section);
    if (inserted) result.section_order.push_back(q.section);
    AnalogyScore& section = it->second;
    ++section.total;
    ++result.overall.total;

    const auto a = vs.find(lowered(q.a, options.lowercase));
    const auto as = vs.find(lowered(q.a_star, options.lowercase));
    const auto b = vs.find(lowered(q.b, options.lowercase));
    const auto bs = vs.find(lowered(q.b_star, options.lowercase));
    if (!a || !as || !b || !bs) {
      if (options.strict_oov) {
        // Counted as answered and wrong.
        ++section.covered;
        ++result.overall.covered;
      }
      continue;
    }
    ++section.covered;
    ++result.overall.covered;
    if (solver.solve(*a, *as, *b, method) == *bs) {
      ++section.correct;
      ++result.overall.correct;
    }
  }
  if (result.overall.covered == 0) throw Error("analogy: no question is covered by the vocabulary");
  return result;
}

std::vector<SimilarityItem> load_similarity_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open similarity dataset " + path.string());
  std::vector<SimilarityItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    if (tokens.size() != 3) throw ParseError(path.string(), lineno, "expected `word1 word2 score`");
    double score = 0.0;
    const auto s = tokens[2];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError(path.string(), lineno, "bad score '" + std::string(s) + "'");
    }
    items.push_back({std::string(tokens[0]), std::string(tokens[1]), score});
  }
  return items;
}

std::vector<AnalogyQuestion> load_analogy_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open analogy dataset " + path.string());
  std::vector<AnalogyQuestion> questions;
  std::string section = "default";
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.front() == ":" || tokens.front().starts_with(':')) {
      std::string name(tokens.front() == ":" ? "" : tokens.front().substr(1));
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (!name.empty()) name += ' ';
        name += tokens[i];
      }
      section = name.empty() ? "default" : name;
      continue;
    }
    if (tokens.size() != 4) throw ParseError(path.string(), lineno, "expected `a a* b b*`");
    questions.push_back({section, std::string(tokens[0]), std::string(tokens[1]),
                         std::string(tokens[2]), std::string(tokens[3])});
  }
  return questions;
}

std::string report_line(std::string_view dataset, std::string_view metric, double value,
                        double coverage) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f", value, coverage);
  std::string out(dataset);
  out += '\t';
  out += metric;
  out += buf;
  return out;
}

std::string format_table(std::span<const ReportRow> rows) {
  std::size_t w_dataset = 7;
  std::size_t w_metric = 6;
  for (const auto& r : rows) {
    w_dataset = std::max(w_dataset, r.dataset.size());
    w_metric = std::max(w_metric, r.metric.size());
  }
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %-*s  %8s  %8s\n", static_cast<int>(w_dataset), "dataset",
                static_cast<int>(w_metric), "metric", "value", "coverage");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-*s  %8.4f  %8.4f\n", static_cast<int>(w_dataset),
                  r.dataset.c_str(), static_cast<int>(w_metric), r.metric.c_str(), r.value,
                  r.coverage);
    out += buf;
  }
  return out;
}

}  // namespace lexvec
