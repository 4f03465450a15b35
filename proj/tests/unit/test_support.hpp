#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "morpheus/resources.hpp"

namespace morpheus::test {

/// Bundled lexicon and tagger, loaded once per test binary.
inline const Resources& resources() {
  static const Resources res = Resources::load(MORPHEUS_DATA_DIR);
  return res;
}

inline const Lexicon& lexicon() { return *resources().lexicon; }
inline const BuiltinTagger& tagger() { return *resources().tagger; }

inline std::filesystem::path test_dir() { return MORPHEUS_TEST_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("morpheus-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string tags_of(const TaggedSentence& s) {
  std::string out;
  for (const auto& t : s.tokens) {
    if (!out.empty()) out += ' ';
    out += std::string(to_string(t.tag));
  }
  return out;
}

}  // namespace morpheus::test
