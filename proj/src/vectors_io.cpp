#include "lexvec/vectors_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>

#include "lexvec/corpus.hpp"
#include "lexvec/error.hpp"

namespace lexvec {

void save_vectors(const VectorSet& vs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vectors " + path.string());
  out << vs.size() << ' ' << vs.dim() << '\n';
  std::string line;
  char buf[32];
  for (std::size_t i = 0; i < vs.size(); ++i) {
    line = vs.word(i);
    for (double x : vs.vector(i)) {
      std::snprintf(buf, sizeof buf, " %.6g", x);
      line += buf;
    }
    line += '\n';
    out << line;
  }
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

VectorSet load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vectors " + path.string());
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing `<count> <dim>` header");

  auto parse_size = [&](std::string_view s, std::size_t lineno) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError(source, lineno, "bad header field '" + std::string(s) + "'");
    }
    return v;
  };
  const auto header = split_tokens(line);
  if (header.size() != 2) throw ParseError(source, 1, "expected `<count> <dim>` header");
  const std::size_t rows = parse_size(header[0], 1);
  const std::size_t dim = parse_size(header[1], 1);
  if (dim == 0) throw ParseError(source, 1, "dimension must be positive");

  std::vector<std::string> words;
  words.reserve(rows);
  Matrix m(rows, dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (words.size() == rows) throw ParseError(source, lineno, "more rows than the header declares");
    if (tokens.size() != dim + 1) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(dim) + " values, got " +
                           std::to_string(tokens.size() - 1));
    }
    auto row = m.row(words.size());
    for (std::size_t i = 0; i < dim; ++i) {
      const auto t = tokens[i + 1];
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), row[i]);
      if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ParseError(source, lineno, "bad value '" + std::string(t) + "'");
      }
    }
    words.emplace_back(tokens[0]);
  }
  if (words.size() != rows) {
    throw ParseError(source, lineno,
                     "header declares " + std::to_string(rows) + " rows, found " +
                         std::to_string(words.size()));
  }
  return VectorSet(std::move(words), std::move(m));
}

}  // namespace lexvec
