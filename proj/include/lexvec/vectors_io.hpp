#pragma once

#include <filesystem>

#include "lexvec/eval.hpp"

namespace lexvec {

// word2vec text format: a `<|V|> <d>` header, then `word v1 ... vd` per line
// with 6 significant digits.
void save_vectors(const VectorSet& vs, const std::filesystem::path& path);

// Throws ParseError (with line number) on header/row mismatches.
VectorSet load_vectors(const std::filesystem::path& path);

}  // namespace lexvec
