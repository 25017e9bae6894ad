#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexvec/cooc.hpp"
#include "lexvec/embedding.hpp"
#include "lexvec/vocab.hpp"

namespace lexvec {

enum class Combo { W, WPlusContext, WPlusPositional };

std::string_view to_string(Combo combo);
// Accepts W, W+Wc, W+Wpos.
Combo parse_combo(std::string_view s);

// One vector per vocabulary word.
class VectorSet {
 public:
  VectorSet() = default;
  VectorSet(std::vector<std::string> words, Matrix vectors, Combo combo = Combo::W);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  Combo combo() const noexcept { return combo_; }

  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::span<const std::string> words() const noexcept { return words_; }
  std::span<const double> vector(std::size_t i) const { return vectors_.row(i); }
  const Matrix& matrix() const noexcept { return vectors_; }
  std::optional<WordId> find(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  Combo combo_ = Combo::W;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> index_;
};

// W, W + C (plain contexts) or W + sum of a word's positional context rows.
// Throws ConfigError when the combo does not fit the context space.
VectorSet combine(const EmbeddingPair& emb, const Vocabulary& vocab, Combo combo,
                  const ContextSpace& space);

double cosine(std::span<const double> a, std::span<const double> b);

// Ranks starting at 1; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> x);

// Tie-corrected Spearman correlation (Pearson correlation of average ranks).
// Throws UndefinedCorrelationError if either input has constant ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct SimilarityItem {
  std::string word1;
  std::string word2;
  double score;
};

struct SimilarityResult {
  double rho = 0.0;
  double coverage = 0.0;
  std::size_t covered = 0;
  std::size_t total = 0;
  std::size_t zero_norm = 0;  // in-vocabulary pairs skipped for undefined cosine
};

struct EvalOptions {
  bool lowercase = true;
  // Score out-of-vocabulary items as wrong (analogy) instead of skipping.
  bool strict_oov = false;
};

// Throws Error when no pair is covered.
SimilarityResult eval_similarity(const VectorSet& vs, std::span<const SimilarityItem> dataset,
                                 const EvalOptions& options = {});

enum class AnalogyMethod { CosAdd, CosMul };

std::string_view to_string(AnalogyMethod method);

// Holds unit-normalized copies of the vectors. Query words are excluded from
// the answer; ties go to the lowest id.
class AnalogySolver {
 public:
  static constexpr double kCosMulEpsilon = 0.001;

  explicit AnalogySolver(const VectorSet& vs);

  // a : a_star :: b : ?
  WordId solve(WordId a, WordId a_star, WordId b, AnalogyMethod method) const;

 private:
  Matrix unit_;
};

struct AnalogyQuestion {
  std::string section;
  std::string a;
  std::string a_star;
  std::string b;
  std::string b_star;
};

struct AnalogyScore {
  std::size_t correct = 0;
  std::size_t covered = 0;
  std::size_t total = 0;

  double accuracy() const { return covered == 0 ? 0.0 : static_cast<double>(correct) / covered; }
  double coverage() const { return total == 0 ? 0.0 : static_cast<double>(covered) / total; }
};

struct AnalogyResult {
  AnalogyScore overall;
  std::map<std::string, AnalogyScore> sections;  // sorted by name
  std::vector<std::string> section_order;        // file order

  double accuracy() const { return overall.accuracy(); }
  double coverage() const { return overall.coverage(); }
};

// Throws Error when no question is covered.
AnalogyResult eval_analogy(const VectorSet& vs, std::span<const AnalogyQuestion> dataset,
                           AnalogyMethod method, const EvalOptions& options = {});

// `word1 word2 score` lines; '#' comments and blank lines ignored.
std::vector<SimilarityItem> load_similarity_dataset(const std::filesystem::path& path);
// Google format: `: section` headers and `a a* b b*` lines.
std::vector<AnalogyQuestion> load_analogy_dataset(const std::filesystem::path& path);

// `dataset<TAB>metric<TAB>value<TAB>coverage`
std::string report_line(std::string_view dataset, std::string_view metric, double value,
                        double coverage);

struct ReportRow {
  std::string dataset;
  std::string metric;
  double value;
  double coverage;
};

// Aligned human-readable table.
std::string format_table(std::span<const ReportRow> rows);

}  // namespace lexvec
