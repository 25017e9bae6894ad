#include "lexvec/manifest.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "lexvec/error.hpp"

namespace lexvec {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const std::string& s, const std::string& source, std::size_t lineno) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(source, lineno, "bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::Standard:
      return "standard";
    case TrainMode::MultipleIteration:
      return "mi";
    case TrainMode::SingleIteration:
      return "si";
  }
  return "?";
}

TrainMode parse_mode(std::string_view s) {
  if (s == "standard") return TrainMode::Standard;
  if (s == "mi") return TrainMode::MultipleIteration;
  if (s == "si") return TrainMode::SingleIteration;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected standard, mi or si)");
}

void RunManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << "mode = " << to_string(mode) << '\n'
      << "corpus = " << corpus.string() << '\n'
      << "vocab_input = " << vocab_input.string() << '\n'
      << "dim = " << config.dim << '\n'
      << "window = " << config.window << '\n'
      << "iterations = " << config.iterations << '\n'
      << "negatives = " << config.negatives << '\n'
      << "lr = " << format_double(config.lr) << '\n'
      << "subsample = " << format_double(config.subsample) << '\n'
      << "cds = " << format_double(config.cds_alpha) << '\n'
      << "positional = " << (config.positional ? "true" : "false") << '\n'
      << "seed = " << config.seed << '\n'
      << "threads = " << config.threads << '\n'
      << "fresh_negatives = " << (config.fresh_negatives ? "true" : "false") << '\n'
      << "buckets = " << buckets << '\n'
      << "min_count = " << min_count << '\n'
      << "combo = " << combo << '\n';
  for (const auto& [role, p] : files) out << "file." << role << " = " << p.string() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const std::string source = path.string();
  RunManifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected `key = value`");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "mode") m.mode = parse_mode(value);
    else if (key == "corpus") m.corpus = value;
    else if (key == "vocab_input") m.vocab_input = value;
    else if (key == "dim") m.config.dim = parse_number<std::size_t>(value, source, lineno);
    else if (key == "window") m.config.window = parse_number<int>(value, source, lineno);
    else if (key == "iterations") m.config.iterations = parse_number<int>(value, source, lineno);
    else if (key == "negatives") m.config.negatives = parse_number<int>(value, source, lineno);
    else if (key == "lr") m.config.lr = parse_number<double>(value, source, lineno);
    else if (key == "subsample") m.config.subsample = parse_number<double>(value, source, lineno);
    else if (key == "cds") m.config.cds_alpha = parse_number<double>(value, source, lineno);
    else if (key == "positional") m.config.positional = value == "true";
    else if (key == "seed") m.config.seed = parse_number<std::uint64_t>(value, source, lineno);
    else if (key == "threads") m.config.threads = parse_number<int>(value, source, lineno);
    else if (key == "fresh_negatives") m.config.fresh_negatives = value == "true";
    else if (key == "buckets") m.buckets = parse_number<std::size_t>(value, source, lineno);
    else if (key == "min_count") m.min_count = parse_number<std::uint64_t>(value, source, lineno);
    else if (key == "combo") m.combo = value;
    else if (key.starts_with("file.")) m.files[key.substr(5)] = value;
    else throw ParseError(source, lineno, "unknown key '" + key + "'");
  }
  return m;
}

}  // namespace lexvec
