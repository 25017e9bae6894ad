#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lexvec/trainer.hpp"

namespace lexvec {

enum class TrainMode { Standard, MultipleIteration, SingleIteration };

std::string_view to_string(TrainMode mode);
TrainMode parse_mode(std::string_view s);

// Everything needed to reproduce a run, serialized as `key = value` lines.
struct RunManifest {
  TrainConfig config;
  TrainMode mode = TrainMode::Standard;
  std::uint64_t min_count = 5;
  std::string combo = "W";
  std::size_t buckets = 16;
  std::filesystem::path corpus;
  std::filesystem::path vocab_input;  // empty: vocabulary built from the corpus
  std::map<std::string, std::filesystem::path> files;  // role -> produced path

  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

}  // namespace lexvec
