// lexvec: PPMI factorization word embeddings with window sampling and
// negative sampling, positional contexts and external-memory training.
//
//   lexvec vocab        --corpus text.txt --output vocab.txt
//   lexvec pairs        --corpus text.txt --vocab vocab.txt --work-dir work/
//   lexvec train        --corpus text.txt --output vectors.txt [--mode standard|mi|si]
//   lexvec train        --from-manifest vectors.txt.manifest --output again.txt
//   lexvec eval-sim     --vectors vectors.txt --dataset ws353.txt
//   lexvec eval-analogy --vectors vectors.txt --dataset questions-words.txt
//
// Every training flag can also be set through an environment variable named
// LEXVEC_<FLAG> (e.g. LEXVEC_DIM=100); explicit flags win.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lexvec/cooc.hpp"
#include "lexvec/corpus.hpp"
#include "lexvec/error.hpp"
#include "lexvec/eval.hpp"
#include "lexvec/extmem.hpp"
#include "lexvec/manifest.hpp"
#include "lexvec/negsampler.hpp"
#include "lexvec/trainer.hpp"
#include "lexvec/vectors_io.hpp"
#include "lexvec/vocab.hpp"

namespace fs = std::filesystem;
using namespace lexvec;

namespace {

struct CommonOptions {
  TrainConfig config;
  std::uint64_t min_count = 5;
  std::string corpus;
  std::string vocab;
  std::size_t buckets = 16;
  std::size_t chunk_size = 1 << 20;
  std::string temp_dir;
};

void add_training_flags(CLI::App& cmd, CommonOptions& o) {
  auto& c = o.config;
  cmd.add_option("--dim", c.dim, "Embedding dimension")->envname("LEXVEC_DIM")->capture_default_str();
  cmd.add_option("--window", c.window, "Symmetric window size")
      ->envname("LEXVEC_WINDOW")
      ->capture_default_str();
  cmd.add_option("--iterations", c.iterations, "Training epochs")
      ->envname("LEXVEC_ITERATIONS")
      ->capture_default_str();
  cmd.add_option("--negatives", c.negatives, "Negative samples per target occurrence")
      ->envname("LEXVEC_NEGATIVES")
      ->capture_default_str();
  cmd.add_option("--lr", c.lr, "Initial learning rate")->envname("LEXVEC_LR")->capture_default_str();
  cmd.add_option("--subsample", c.subsample, "Dirty subsampling threshold t")
      ->envname("LEXVEC_SUBSAMPLE")
      ->capture_default_str();
  cmd.add_option("--cds", c.cds_alpha, "Context distribution smoothing exponent")
      ->envname("LEXVEC_CDS")
      ->capture_default_str();
  cmd.add_option("--min-count", o.min_count, "Minimum word count")
      ->envname("LEXVEC_MIN_COUNT")
      ->capture_default_str();
  cmd.add_flag("--positional", c.positional, "Use positional contexts")->envname("LEXVEC_POSITIONAL");
  cmd.add_option("--seed", c.seed, "Master random seed")->envname("LEXVEC_SEED")->capture_default_str();
  cmd.add_option("--threads", c.threads, "Worker threads (1 = deterministic)")
      ->envname("LEXVEC_THREADS")
      ->capture_default_str();
  cmd.add_option("--buckets", o.buckets, "External shuffle buckets")
      ->envname("LEXVEC_BUCKETS")
      ->capture_default_str();
  cmd.add_option("--chunk-size", o.chunk_size, "Records per in-memory sort chunk")
      ->envname("LEXVEC_CHUNK_SIZE")
      ->capture_default_str();
  cmd.add_option("--temp-dir", o.temp_dir, "Scratch directory")->envname("LEXVEC_TEMP_DIR");
  cmd.add_option("--corpus", o.corpus, "Tokenized corpus, one sentence per line")
      ->check(CLI::ExistingFile);
  cmd.add_option("--vocab", o.vocab, "Existing vocabulary file (word<TAB>freq)")
      ->check(CLI::ExistingFile);
}

Vocabulary obtain_vocab(const CommonOptions& o, const fs::path& save_to) {
  if (!o.vocab.empty()) return Vocabulary::load(o.vocab);
  Vocabulary v = build_vocab_from_file(o.corpus, o.min_count);
  v.save(save_to);
  return v;
}

struct PairFiles {
  fs::path raw;
  fs::path collapsed;
  fs::path marginals;
};

PairFiles pair_files(const fs::path& dir) {
  return {dir / "pairs.raw", dir / "pairs.collapsed", dir / "marginals.txt"};
}

// Subsampled corpus -> raw pairs -> sorted/collapsed tuples + marginals.
PairFiles build_pair_files(const CommonOptions& o, const Vocabulary& vocab, const fs::path& dir) {
  const auto& c = o.config;
  fs::create_directories(dir);
  const ContextSpace space(vocab.size(), c.window, c.positional);
  TextCorpus text(o.corpus, vocab);
  SubsampledCorpus corpus(text, vocab, c.subsample, subsample_seed(c.seed));
  const NegativeSampler sampler =
      space.positional()
          ? NegativeSampler::from_context_marginals(count_marginals(corpus, space), c.cds_alpha)
          : NegativeSampler::from_unigrams(vocab, c.cds_alpha);

  const PairFiles files = pair_files(dir);
  const PairFileSummary summary = write_pairs(corpus, space, sampler, c.negatives, c.seed, files.raw);
  SortOptions sort;
  sort.chunk_records = o.chunk_size;
  sort.temp_parent = o.temp_dir;
  const CollapseSummary collapsed = sort_collapse(files.raw, files.collapsed, sort);
  if (collapsed.total_corpus != summary.marginals.total ||
      collapsed.total_tot != summary.records) {
    throw IntegrityError("collapsed pair file does not account for every written record");
  }
  save_marginals(summary.marginals, files.marginals);
  std::cerr << "pairs: " << summary.records << " records (" << summary.corpus_records
            << " corpus, " << summary.negative_records << " negative) over " << summary.targets
            << " targets; " << collapsed.tuples << " distinct pairs\n";
  return files;
}

int cmd_vocab(const std::string& corpus, const std::string& output, std::uint64_t min_count) {
  const Vocabulary v = build_vocab_from_file(corpus, min_count);
  v.save(output);
  std::cerr << "vocab: " << v.size() << " words, " << v.total_tokens() << " tokens kept, "
            << v.oov_tokens() << " dropped\n";
  return 0;
}

int cmd_pairs(const CommonOptions& o, const std::string& work_dir) {
  if (o.corpus.empty()) throw ConfigError("--corpus is required");
  o.config.validate();
  fs::create_directories(work_dir);
  const Vocabulary vocab = obtain_vocab(o, fs::path(work_dir) / "vocab.txt");
  build_pair_files(o, vocab, work_dir);
  return 0;
}

int cmd_train(const CommonOptions& o, const std::string& mode_name, const std::string& combo_name,
              const std::string& output, std::string manifest_path, std::string work_dir,
              const std::string& pairs_dir) {
  const auto& c = o.config;
  c.validate();
  const TrainMode mode = parse_mode(mode_name);
  const Combo combo = parse_combo(combo_name);
  if (combo == Combo::WPlusContext && c.positional) {
    throw ConfigError("--combo W+Wc is incompatible with --positional (use W+Wpos)");
  }
  if (combo == Combo::WPlusPositional && !c.positional) {
    throw ConfigError("--combo W+Wpos requires --positional");
  }
  if (mode == TrainMode::Standard && !pairs_dir.empty()) {
    throw ConfigError("--pairs-dir only applies to --mode mi or si");
  }
  if (manifest_path.empty()) manifest_path = output + ".manifest";
  if (work_dir.empty()) work_dir = output + ".work";

  RunManifest manifest;
  manifest.config = c;
  manifest.mode = mode;
  manifest.min_count = o.min_count;
  manifest.combo = std::string(to_string(combo));
  manifest.buckets = o.buckets;
  manifest.corpus = o.corpus;
  manifest.vocab_input = o.vocab;

  fs::path vocab_path = o.vocab.empty() ? fs::path(output + ".vocab") : fs::path(o.vocab);
  const Vocabulary vocab = obtain_vocab(o, vocab_path);
  manifest.files["vocab"] = vocab_path;
  const ContextSpace space(vocab.size(), c.window, c.positional);

  EmbeddingPair emb;
  if (mode == TrainMode::Standard) {
    TextCorpus text(o.corpus, vocab);
    SubsampledCorpus corpus(text, vocab, c.subsample, subsample_seed(c.seed));
    const CoocStats stats = count_corpus(corpus, space);
    const NegativeSampler sampler =
        NegativeSampler::for_space(space, vocab, stats.marginals(), c.cds_alpha);
    emb = train_standard(corpus, stats, sampler, c);
  } else {
    PairFiles files;
    if (pairs_dir.empty()) {
      files = build_pair_files(o, vocab, work_dir);
    } else {
      files = pair_files(pairs_dir);
    }
    manifest.files["pairs"] = files.collapsed;
    manifest.files["marginals"] = files.marginals;
    if (fs::exists(files.raw)) manifest.files["raw_pairs"] = files.raw;
    const Marginals marginals = load_marginals(files.marginals, files.collapsed, space);
    ExternalOptions ext;
    ext.buckets = o.buckets;
    ext.temp_parent = o.temp_dir;
    emb = mode == TrainMode::MultipleIteration ? train_mi(files.collapsed, marginals, space, c, ext)
                                               : train_si(files.collapsed, marginals, space, c, ext);
  }

  save_vectors(combine(emb, vocab, combo, space), output);
  manifest.files["vectors"] = output;
  manifest.save(manifest_path);
  std::cerr << "train: wrote " << vocab.size() << " x " << c.dim << " vectors (" << to_string(combo)
            << ") to " << output << "\n";
  return 0;
}

std::string dataset_name(const std::string& path) { return fs::path(path).stem().string(); }

int cmd_eval_sim(const std::string& vectors, const std::vector<std::string>& datasets,
                 const EvalOptions& options) {
  const VectorSet vs = load_vectors(vectors);
  std::vector<ReportRow> rows;
  for (const auto& path : datasets) {
    const auto items = load_similarity_dataset(path);
    const auto r = eval_similarity(vs, items, options);
    rows.push_back({dataset_name(path), "spearman", r.rho, r.coverage});
    if (r.zero_norm > 0) {
      std::cerr << "warning: " << path << ": " << r.zero_norm << " pairs skipped (zero vector)\n";
    }
  }
  std::cout << format_table(rows) << '\n';
  for (const auto& r : rows) std::cout << report_line(r.dataset, r.metric, r.value, r.coverage) << '\n';
  return 0;
}

int cmd_eval_analogy(const std::string& vectors, const std::vector<std::string>& datasets,
                     const std::string& method_name, bool per_section, const EvalOptions& options) {
  std::vector<AnalogyMethod> methods;
  if (method_name == "3CosAdd" || method_name == "both") methods.push_back(AnalogyMethod::CosAdd);
  if (method_name == "3CosMul" || method_name == "both") methods.push_back(AnalogyMethod::CosMul);
  if (methods.empty()) throw ConfigError("unknown method '" + method_name + "'");

  const VectorSet vs = load_vectors(vectors);
  std::vector<ReportRow> rows;
  for (const auto& path : datasets) {
    const auto questions = load_analogy_dataset(path);
    const std::string name = dataset_name(path);
    for (const auto method : methods) {
      const auto r = eval_analogy(vs, questions, method, options);
      const std::string metric(to_string(method));
      if (per_section) {
        for (const auto& section : r.section_order) {
          const auto& s = r.sections.at(section);
          rows.push_back({name + "/" + section, metric, s.accuracy(), s.coverage()});
        }
      }
      rows.push_back({name, metric, r.accuracy(), r.coverage()});
    }
  }
  std::cout << format_table(rows) << '\n';
  for (const auto& r : rows) std::cout << report_line(r.dataset, r.metric, r.value, r.coverage) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PPMI-factorization word embeddings (window + negative sampling)"};
  app.require_subcommand(1);

  // vocab
  std::string vocab_corpus;
  std::string vocab_output;
  std::uint64_t vocab_min_count = 5;
  auto* vocab_cmd = app.add_subcommand("vocab", "Build the vocabulary of a corpus");
  vocab_cmd->add_option("--corpus", vocab_corpus, "Tokenized corpus")->required()->check(CLI::ExistingFile);
  vocab_cmd->add_option("--output", vocab_output, "Vocabulary file to write")->required();
  vocab_cmd->add_option("--min-count", vocab_min_count, "Minimum word count")
      ->envname("LEXVEC_MIN_COUNT")
      ->capture_default_str();

  // pairs
  CommonOptions pairs_opts;
  std::string pairs_work_dir;
  auto* pairs_cmd = app.add_subcommand("pairs", "Write, sort and collapse the external pair file");
  add_training_flags(*pairs_cmd, pairs_opts);
  pairs_cmd->add_option("--work-dir", pairs_work_dir, "Output directory for pair files")->required();

  // train
  CommonOptions train_opts;
  std::string mode = "standard";
  std::string combo = "W";
  std::string output;
  std::string manifest;
  std::string work_dir;
  std::string pairs_dir;
  auto* train_cmd = app.add_subcommand("train", "Train embeddings");
  add_training_flags(*train_cmd, train_opts);
  train_cmd->add_option("--mode", mode, "standard | mi | si")
      ->envname("LEXVEC_MODE")
      ->check(CLI::IsMember({"standard", "mi", "si"}))
      ->capture_default_str();
  train_cmd->add_option("--combo", combo, "Vectors to write: W | W+Wc | W+Wpos")
      ->envname("LEXVEC_COMBO")
      ->check(CLI::IsMember({"W", "W+Wc", "W+Wpos"}))
      ->capture_default_str();
  train_cmd->add_option("--output", output, "Vector file to write")->required();
  train_cmd->add_option("--manifest", manifest, "Run manifest (default: <output>.manifest)");
  train_cmd->add_option("--work-dir", work_dir, "Pair files for mi/si (default: <output>.work)");
  train_cmd->add_option("--pairs-dir", pairs_dir, "Reuse pair files written by `lexvec pairs`")
      ->check(CLI::ExistingDirectory);
  train_cmd->add_flag("--fresh-negatives", train_opts.config.fresh_negatives,
                      "Standard mode: redraw negatives every epoch");
  std::string from_manifest;
  train_cmd->add_option("--from-manifest", from_manifest,
                        "Repeat the run recorded in a manifest (other training flags ignored)")
      ->check(CLI::ExistingFile);

  // eval-sim
  std::string sim_vectors;
  std::vector<std::string> sim_datasets;
  bool sim_no_lower = false;
  auto* sim_cmd = app.add_subcommand("eval-sim", "Word similarity (cosine, Spearman)");
  sim_cmd->add_option("--vectors", sim_vectors, "Vector file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--dataset", sim_datasets, "`word1 word2 score` files")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_flag("--no-lowercase", sim_no_lower, "Match dataset words case-sensitively");

  // eval-analogy
  std::string an_vectors;
  std::vector<std::string> an_datasets;
  std::string an_method = "both";
  bool an_no_lower = false;
  bool an_strict = false;
  bool an_sections = false;
  auto* an_cmd = app.add_subcommand("eval-analogy", "Word analogies (3CosAdd / 3CosMul)");
  an_cmd->add_option("--vectors", an_vectors, "Vector file")->required()->check(CLI::ExistingFile);
  an_cmd->add_option("--dataset", an_datasets, "Google-format analogy files")
      ->required()
      ->check(CLI::ExistingFile);
  an_cmd->add_option("--method", an_method, "3CosAdd | 3CosMul | both")
      ->check(CLI::IsMember({"3CosAdd", "3CosMul", "both"}))
      ->capture_default_str();
  an_cmd->add_flag("--no-lowercase", an_no_lower, "Match dataset words case-sensitively");
  an_cmd->add_flag("--strict-oov", an_strict, "Score out-of-vocabulary questions as wrong");
  an_cmd->add_flag("--sections", an_sections, "Also report per-section accuracy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vocab_cmd) return cmd_vocab(vocab_corpus, vocab_output, vocab_min_count);
    if (*pairs_cmd) return cmd_pairs(pairs_opts, pairs_work_dir);
    if (*train_cmd) {
      if (!from_manifest.empty()) {
        const RunManifest m = RunManifest::load(from_manifest);
        train_opts.config = m.config;
        train_opts.min_count = m.min_count;
        train_opts.buckets = m.buckets;
        train_opts.corpus = m.corpus.string();
        train_opts.vocab = m.vocab_input.string();
        mode = std::string(to_string(m.mode));
        combo = m.combo;
      }
      if (train_opts.corpus.empty()) throw ConfigError("--corpus is required");
      return cmd_train(train_opts, mode, combo, output, manifest, work_dir, pairs_dir);
    }
    if (*sim_cmd) return cmd_eval_sim(sim_vectors, sim_datasets, {!sim_no_lower, false});
    if (*an_cmd) {
      return cmd_eval_analogy(an_vectors, an_datasets, an_method, an_sections,
                              {!an_no_lower, an_strict});
    }
  } catch (const std::exception& e) {
    std::cerr << "lexvec: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
