#include "lexvec/extmem.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <queue>
#include <thread>
#include <vector>

#include "lexvec/error.hpp"
#include "lexvec/ppmi.hpp"

namespace lexvec {
namespace {

constexpr std::size_t kFlushBytes = 1 << 20;

class LineWriter {
 public:
  explicit LineWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    buffer_.reserve(kFlushBytes + 256);
  }
  ~LineWriter() {
    // Errors on this path are reported by close(); best effort here.
    if (out_.is_open()) out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  }

  void append(std::string_view s) {
    buffer_.append(s);
    if (buffer_.size() >= kFlushBytes) flush();
  }
  void append(char c) { buffer_.push_back(c); }
  void append_uint(std::uint64_t v) {
    char tmp[24];
    auto [end, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    buffer_.append(tmp, end);
  }
  void end_line() {
    buffer_.push_back('\n');
    if (buffer_.size() >= kFlushBytes) flush();
  }

  void close() {
    flush();
    out_.close();
    if (!out_) throw IoError("write failed for " + path_.string());
  }

 private:
  void flush() {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out_) throw IoError("write failed for " + path_.string());
    buffer_.clear();
  }

  fs::path path_;
  std::ofstream out_;
  std::string buffer_;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

template <class F>
void for_each_line(const fs::path& path, F&& f) {
  auto in = open_input(path);
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) f(std::string_view(line), ++lineno);
  if (in.bad()) throw IoError("read error in " + path.string());
}

void write_tuple(LineWriter& out, const PairTuple& t) {
  out.append_uint(t.word);
  out.append(' ');
  out.append_uint(raw(t.context));
  out.append(' ');
  out.append(t.positive ? '+' : '-');
  out.append(' ');
  out.append_uint(t.tot);
  out.append(' ');
  out.append_uint(t.corpus_count);
  out.end_line();
}

// Reads an unsigned field followed by `sep` (or end of input when sep == 0).
template <class T>
bool take_uint(std::string_view& s, T& value, char sep) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == s.data()) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  if (sep == 0) return s.empty();
  if (s.empty() || s.front() != sep) return false;
  s.remove_prefix(1);
  return true;
}

bool key_less(WordId aw, ContextId ac, WordId bw, ContextId bc) {
  return aw != bw ? aw < bw : raw(ac) < raw(bc);
}

PairTuple parse_own_tuple(std::string_view line, const fs::path& path, std::uint64_t lineno) {
  auto t = parse_tuple(line);
  if (!t) throw ParseError(path.string(), lineno, "malformed pair tuple");
  return *t;
}

class TupleReader {
 public:
  explicit TupleReader(const fs::path& path) : path_(path), in_(open_input(path)) {}

  bool next(PairTuple& t) {
    if (!std::getline(in_, line_)) {
      if (in_.bad()) throw IoError("read error in " + path_.string());
      return false;
    }
    t = parse_own_tuple(line_, path_, ++lineno_);
    return true;
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::string line_;
  std::uint64_t lineno_ = 0;
};

// How corpus counts combine when equal keys meet. Partial runs built from
// raw records hold partial counts that add up; tuple-format input (collapsed
// or SI-expanded files) carries the pair's full M(w,c) on every line.
enum class CountMerge { sum, same };

// Emits tuples in key order, combining adjacent equal keys.
class CollapsingWriter {
 public:
  CollapsingWriter(const fs::path& path, CountMerge merge) : out_(path), merge_(merge) {}

  void add(const PairTuple& t) {
    if (pending_ && pending_->word == t.word && pending_->context == t.context) {
      pending_->tot += t.tot;
      if (merge_ == CountMerge::sum) {
        pending_->corpus_count += t.corpus_count;
        pending_->positive = pending_->corpus_count > 0;
      } else if (pending_->corpus_count != t.corpus_count) {
        throw IntegrityError("pair (" + std::to_string(t.word) + ", " +
                             std::to_string(raw(t.context)) +
                             ") appears with different corpus counts");
      }
      return;
    }
    emit();
    pending_ = t;
  }

  CollapseSummary close() {
    emit();
    out_.close();
    return summary_;
  }

 private:
  void emit() {
    if (!pending_) return;
    write_tuple(out_, *pending_);
    ++summary_.tuples;
    summary_.total_tot += pending_->tot;
    summary_.total_corpus += pending_->corpus_count;
    pending_.reset();
  }

  LineWriter out_;
  CountMerge merge_;
  std::optional<PairTuple> pending_;
  CollapseSummary summary_;
};

CollapseSummary merge_runs(const std::vector<fs::path>& runs, const fs::path& out,
                           CountMerge merge) {
  struct Head {
    PairTuple tuple;
    std::size_t run;
  };
  auto greater = [](const Head& a, const Head& b) {
    if (a.tuple.word != b.tuple.word || a.tuple.context != b.tuple.context) {
      return key_less(b.tuple.word, b.tuple.context, a.tuple.word, a.tuple.context);
    }
    return a.run > b.run;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(greater)> heap(greater);
  std::vector<std::unique_ptr<TupleReader>> readers;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    readers.push_back(std::make_unique<TupleReader>(runs[i]));
    PairTuple t;
    if (readers.back()->next(t)) heap.push({t, i});
  }
  CollapsingWriter writer(out, merge);
  while (!heap.empty()) {
    Head h = heap.top();
    heap.pop();
    writer.add(h.tuple);
    PairTuple t;
    if (readers[h.run]->next(t)) heap.push({t, h.run});
  }
  return writer.close();
}

std::uint64_t replay_epoch_serial(const fs::path& file, const Ppmi& ppmi, int epoch,
                                  const LearningRate& schedule, std::uint64_t step,
                                  EmbeddingPair& emb, const UpdateObserver& observer) {
  for_each_line(file, [&](std::string_view line, std::uint64_t lineno) {
    const PairTuple t = parse_own_tuple(line, file, lineno);
    const double target = t.positive ? ppmi.value(t.word, t.context, t.corpus_count) : 0.0;
    // All tot updates of a tuple use the rate current when it is reached.
    const double lr = schedule.at(step);
    for (std::uint64_t i = 0; i < t.tot; ++i) {
      if (observer) observer({epoch, t.word, t.context, target});
      sgd_update(emb, t.word, t.context, target, lr);
    }
    step += t.tot;
  });
  return step;
}

void replay_epoch_parallel(const fs::path& file, const Ppmi& ppmi, int threads,
                           const LearningRate& schedule, std::uint64_t step0,
                           EmbeddingPair& emb) {
  std::atomic<std::uint64_t> progress{step0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for_each_line(file, [&](std::string_view line, std::uint64_t lineno) {
          if ((lineno - 1) % static_cast<std::uint64_t>(threads) != static_cast<std::uint64_t>(w)) {
            return;
          }
          const PairTuple t = parse_own_tuple(line, file, lineno);
          const double target = t.positive ? ppmi.value(t.word, t.context, t.corpus_count) : 0.0;
          const double lr = schedule.at(progress.fetch_add(t.tot, std::memory_order_relaxed));
          for (std::uint64_t i = 0; i < t.tot; ++i) {
            sgd_update_relaxed(emb, t.word, t.context, target, lr);
          }
        });
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

EmbeddingPair replay(const fs::path& file, const Marginals& marginals, const ContextSpace& space,
                     const TrainConfig& config, const ExternalOptions& options,
                     const UpdateObserver& observer) {
  config.validate();
  if (marginals.word.size() != space.vocab_size() || marginals.context.size() != space.size()) {
    throw ConfigError("marginals do not match the context space");
  }
  const Ppmi ppmi(marginals, config.cds_alpha);

  // Validate the file and size the learning-rate schedule.
  std::uint64_t per_epoch = 0;
  for_each_line(file, [&](std::string_view line, std::uint64_t lineno) {
    const PairTuple t = parse_own_tuple(line, file, lineno);
    if (t.word >= space.vocab_size() || raw(t.context) >= space.size()) {
      throw IntegrityError(file.string() + ":" + std::to_string(lineno) +
                           ": pair outside the context space");
    }
    if (t.positive) ppmi.value(t.word, t.context, t.corpus_count);
    per_epoch += t.tot;
  });
  const LearningRate schedule(config.lr, per_epoch * static_cast<std::uint64_t>(config.iterations));

  EmbeddingPair emb =
      init_embeddings(space.vocab_size(), space.size(), config.dim, init_seed(config.seed));
  TempDir tmp(options.temp_parent);
  const fs::path shuffled = tmp.path() / "epoch.pairs";
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < config.iterations; ++epoch) {
    shuffle_file(file, shuffled, options.buckets,
                 derive_seed(config.seed, "shuffle", static_cast<std::uint64_t>(epoch)), tmp.path());
    if (config.threads > 1) {
      replay_epoch_parallel(shuffled, ppmi, config.threads, schedule, step, emb);
      step += per_epoch;
    } else {
      step = replay_epoch_serial(shuffled, ppmi, epoch, schedule, step, emb, observer);
    }
  }
  return emb;
}

}  // namespace

std::string format_raw(const RawPairRecord& r) {
  return std::to_string(r.word) + ' ' + std::to_string(raw(r.context)) + ' ' +
         static_cast<char>(r.origin);
}

std::string format_tuple(const PairTuple& t) {
  return std::to_string(t.word) + ' ' + std::to_string(raw(t.context)) + ' ' +
         (t.positive ? '+' : '-') + ' ' + std::to_string(t.tot) + ' ' +
         std::to_string(t.corpus_count);
}

std::optional<RawPairRecord> parse_raw(std::string_view line) {
  std::uint32_t w = 0;
  std::uint32_t c = 0;
  if (!take_uint(line, w, ' ') || !take_uint(line, c, ' ')) return std::nullopt;
  if (line.size() != 1) return std::nullopt;
  if (line[0] == 'c') return RawPairRecord{w, ContextId{c}, PairOrigin::corpus};
  if (line[0] == 'n') return RawPairRecord{w, ContextId{c}, PairOrigin::negative};
  return std::nullopt;
}

std::optional<PairTuple> parse_tuple(std::string_view line) {
  std::uint32_t w = 0;
  std::uint32_t c = 0;
  if (!take_uint(line, w, ' ') || !take_uint(line, c, ' ')) return std::nullopt;
  if (line.size() < 2 || (line[0] != '+' && line[0] != '-') || line[1] != ' ') return std::nullopt;
  const bool positive = line[0] == '+';
  line.remove_prefix(2);
  std::uint64_t tot = 0;
  std::uint64_t count = 0;
  if (!take_uint(line, tot, ' ') || !take_uint(line, count, 0)) return std::nullopt;
  if (tot == 0 || positive != (count > 0)) return std::nullopt;
  return PairTuple{w, ContextId{c}, positive, tot, count};
}

TempDir::TempDir(const fs::path& parent) {
  const fs::path base = parent.empty() ? fs::temp_directory_path() : parent;
  fs::create_directories(base);
  std::string tmpl = (base / "lexvec-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    throw IoError("cannot create temporary directory under " + base.string());
  }
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

PairFileSummary write_pairs(SentenceSource& corpus, const ContextSpace& space,
                            const NegativeSampler& sampler, int k, std::uint64_t seed,
                            const fs::path& out) {
  if (k < 0) throw ConfigError("negatives must be >= 0");
  if (sampler.size() != space.size()) throw ConfigError("sampler does not match the context space");
  PairFileSummary summary;
  summary.marginals = Marginals(space);
  LineWriter writer(out);
  Rng rng(negative_seed(seed, 0));
  for_each_scheduled_pair(
      corpus, space, sampler, k, rng,
      [&](WordId w, ContextId c, PairOrigin origin) {
        writer.append_uint(w);
        writer.append(' ');
        writer.append_uint(raw(c));
        writer.append(' ');
        writer.append(static_cast<char>(origin));
        writer.end_line();
        ++summary.records;
        if (origin == PairOrigin::corpus) {
          ++summary.corpus_records;
          summary.marginals.add(w, c);
        } else {
          ++summary.negative_records;
        }
      },
      [&](WordId) { ++summary.targets; });
  writer.close();
  return summary;
}

CollapseSummary sort_collapse(const fs::path& raw_path, const fs::path& out,
                              const SortOptions& options) {
  if (options.chunk_records == 0) throw ConfigError("chunk size must be positive");
  if (options.max_fan_in < 2) throw ConfigError("merge fan-in must be >= 2");
  TempDir tmp(options.temp_parent);
  std::vector<fs::path> runs;
  std::vector<PairTuple> chunk;
  chunk.reserve(options.chunk_records);

  // Raw records (`w c origin`) are the normal input; tuple lines are accepted
  // too so that collapsing an SI expansion restores the collapsed file. The
  // first line decides the format.
  std::optional<CountMerge> merge;

  auto flush_run = [&] {
    std::stable_sort(chunk.begin(), chunk.end(), [](const PairTuple& a, const PairTuple& b) {
      return key_less(a.word, a.context, b.word, b.context);
    });
    const fs::path run = tmp.path() / ("run-" + std::to_string(runs.size()));
    CollapsingWriter writer(run, *merge);
    for (const auto& t : chunk) writer.add(t);
    writer.close();
    runs.push_back(run);
    chunk.clear();
  };

  for_each_line(raw_path, [&](std::string_view line, std::uint64_t lineno) {
    if (!merge) merge = parse_raw(line) ? CountMerge::sum : CountMerge::same;
    if (*merge == CountMerge::sum) {
      auto rec = parse_raw(line);
      if (!rec) throw ParseError(raw_path.string(), lineno, "malformed pair record");
      const bool in_corpus = rec->origin == PairOrigin::corpus;
      chunk.push_back({rec->word, rec->context, in_corpus, 1, in_corpus ? 1u : 0u});
    } else {
      auto t = parse_tuple(line);
      if (!t) throw ParseError(raw_path.string(), lineno, "malformed pair record");
      chunk.push_back(*t);
    }
    if (chunk.size() >= options.chunk_records) flush_run();
  });
  if (!merge) merge = CountMerge::sum;
  if (!chunk.empty()) flush_run();

  // Reduce to at most max_fan_in runs, then merge into the output.
  std::size_t generation = 0;
  while (runs.size() > options.max_fan_in) {
    std::vector<fs::path> next;
    for (std::size_t i = 0; i < runs.size(); i += options.max_fan_in) {
      const std::size_t end = std::min(runs.size(), i + options.max_fan_in);
      std::vector<fs::path> group(runs.begin() + static_cast<std::ptrdiff_t>(i),
                                  runs.begin() + static_cast<std::ptrdiff_t>(end));
      const fs::path merged =
          tmp.path() / ("merge-" + std::to_string(generation) + "-" + std::to_string(next.size()));
      merge_runs(group, merged, *merge);
      for (const auto& p : group) fs::remove(p);
      next.push_back(merged);
    }
    runs = std::move(next);
    ++generation;
  }
  return merge_runs(runs, out, *merge);
}

std::uint64_t shuffle_file(const fs::path& in, const fs::path& out, std::size_t num_buckets,
                           std::uint64_t seed, const fs::path& temp_parent) {
  if (num_buckets < 1) throw ConfigError("shuffle needs at least one bucket");
  TempDir tmp(temp_parent);
  Rng rng(seed);
  std::uint64_t lines = 0;
  {
    std::vector<std::unique_ptr<LineWriter>> buckets;
    for (std::size_t b = 0; b < num_buckets; ++b) {
      buckets.push_back(
          std::make_unique<LineWriter>(tmp.path() / ("bucket-" + std::to_string(b))));
    }
    for_each_line(in, [&](std::string_view line, std::uint64_t) {
      auto& bucket = *buckets[uniform_index(rng, num_buckets)];
      bucket.append(line);
      bucket.end_line();
      ++lines;
    });
    for (auto& b : buckets) b->close();
  }

  LineWriter writer(out);
  std::vector<std::string> items;
  for (std::size_t b = 0; b < num_buckets; ++b) {
    const fs::path path = tmp.path() / ("bucket-" + std::to_string(b));
    items.clear();
    for_each_line(path, [&](std::string_view line, std::uint64_t) { items.emplace_back(line); });
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(rng, i)]);
    }
    for (const auto& line : items) {
      writer.append(line);
      writer.end_line();
    }
    fs::remove(path);
  }
  writer.close();
  return lines;
}

std::uint64_t expand_si(const fs::path& collapsed, const fs::path& out) {
  LineWriter writer(out);
  std::uint64_t lines = 0;
  for_each_line(collapsed, [&](std::string_view line, std::uint64_t lineno) {
    PairTuple t = parse_own_tuple(line, collapsed, lineno);
    const std::uint64_t times = t.tot;
    t.tot = 1;
    for (std::uint64_t i = 0; i < times; ++i) write_tuple(writer, t);
    lines += times;
  });
  writer.close();
  return lines;
}

void save_marginals(const Marginals& m, const fs::path& path) {
  LineWriter out(path);
  out.append("TOTAL ");
  out.append_uint(m.total);
  out.end_line();
  for (std::size_t c = 0; c < m.context.size(); ++c) {
    out.append_uint(c);
    out.append(' ');
    out.append_uint(m.context[c]);
    out.end_line();
  }
  out.close();
}

Marginals load_marginals(const fs::path& sidecar, const fs::path& collapsed,
                         const ContextSpace& space) {
  Marginals m(space);
  bool have_total = false;
  std::uint64_t col_sum = 0;
  for_each_line(sidecar, [&](std::string_view line, std::uint64_t lineno) {
    if (lineno == 1) {
      constexpr std::string_view kHeader = "TOTAL ";
      if (!line.starts_with(kHeader)) throw ParseError(sidecar.string(), 1, "missing TOTAL header");
      line.remove_prefix(kHeader.size());
      if (!take_uint(line, m.total, 0)) throw ParseError(sidecar.string(), 1, "bad TOTAL value");
      have_total = true;
      return;
    }
    std::uint64_t c = 0;
    std::uint64_t n = 0;
    if (!take_uint(line, c, ' ') || !take_uint(line, n, 0)) {
      throw ParseError(sidecar.string(), lineno, "expected <context_id> <count>");
    }
    if (c >= m.context.size()) {
      throw ParseError(sidecar.string(), lineno, "context id outside the context space");
    }
    m.context[c] = n;
    col_sum += n;
  });
  if (!have_total) throw ParseError(sidecar.string(), 1, "missing TOTAL header");

  std::uint64_t row_sum = 0;
  for_each_line(collapsed, [&](std::string_view line, std::uint64_t lineno) {
    const PairTuple t = parse_own_tuple(line, collapsed, lineno);
    if (t.word >= m.word.size()) {
      throw IntegrityError(collapsed.string() + ":" + std::to_string(lineno) +
                           ": word id outside the vocabulary");
    }
    m.word[t.word] += t.corpus_count;
    row_sum += t.corpus_count;
  });
  if (col_sum != m.total || row_sum != m.total) {
    throw IntegrityError("marginals disagree with TOTAL " + std::to_string(m.total) +
                         " (contexts " + std::to_string(col_sum) + ", pairs " +
                         std::to_string(row_sum) + ")");
  }
  return m;
}

EmbeddingPair train_mi(const fs::path& collapsed, const Marginals& marginals,
                       const ContextSpace& space, const TrainConfig& config,
                       const ExternalOptions& options, const UpdateObserver& observer) {
  return replay(collapsed, marginals, space, config, options, observer);
}

EmbeddingPair train_si(const fs::path& collapsed, const Marginals& marginals,
                       const ContextSpace& space, const TrainConfig& config,
                       const ExternalOptions& options, const UpdateObserver& observer) {
  TempDir tmp(options.temp_parent);
  const fs::path expanded = tmp.path() / "expanded.pairs";
  expand_si(collapsed, expanded);
  return replay(expanded, marginals, space, config, options, observer);
}

}  // namespace lexvec
