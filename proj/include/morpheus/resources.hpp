#pragma once

// Bundled data files: the inflection lexicon and the tag table.

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "morpheus/lexicon.hpp"
#include "morpheus/tagger.hpp"

#ifndef MORPHEUS_DATA_DIR
#define MORPHEUS_DATA_DIR "data"
#endif

namespace morpheus {

/// $MORPHEUS_DATA_DIR if set, else the directory baked in at build time.
inline std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("MORPHEUS_DATA_DIR"); env && *env) return env;
  return MORPHEUS_DATA_DIR;
}

/// $MORPHEUS_LEXICON if set, else lexicon.tsv in the data directory.
inline std::filesystem::path default_lexicon_path(const std::filesystem::path& data_dir) {
  if (const char* env = std::getenv("MORPHEUS_LEXICON"); env && *env) return env;
  return data_dir / "lexicon.tsv";
}

struct Resources {
  std::unique_ptr<Lexicon> lexicon;
  std::unique_ptr<BuiltinTagger> tagger;
  std::filesystem::path lexicon_path;

  static Resources load(const std::filesystem::path& data_dir,
                        std::optional<std::filesystem::path> lexicon_path = std::nullopt,
                        bool adverbs_eligible = false) {
    Resources r;
    r.lexicon_path = lexicon_path.value_or(default_lexicon_path(data_dir));
    r.lexicon = std::make_unique<Lexicon>(Lexicon::load(r.lexicon_path));
    r.tagger = std::make_unique<BuiltinTagger>(*r.lexicon, TagTable::load(data_dir / "tagger.tsv"),
                                               adverbs_eligible);
    return r;
  }

  static Resources load_default(bool adverbs_eligible = false) {
    return load(default_data_dir(), std::nullopt, adverbs_eligible);
  }
};

}  // namespace morpheus
