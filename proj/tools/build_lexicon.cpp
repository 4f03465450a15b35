// Expands the base vocabulary and exception list into the bundled lexicon.
//
//   morpheus-build-lexicon data/base_words.tsv data/irregular.tsv > data/lexicon.tsv

#include <fstream>
#include <iostream>

#include "morpheus/lexicon.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: " << argv[0] << " BASE_WORDS EXCEPTIONS\n";
    return 1;
  }
  try {
    std::ifstream base_in(argv[1]);
    std::ifstream exc_in(argv[2]);
    if (!base_in || !exc_in) {
      std::cerr << "cannot open input files\n";
      return 1;
    }
    const auto base = morpheus::parse_base_words(base_in);
    std::vector<morpheus::LexiconEntry> exceptions;
    std::string line;
    while (std::getline(exc_in, line)) {
      if (line.empty() || line.front() == '#') continue;
      exceptions.push_back(morpheus::parse_lexicon_line(line));
    }
    morpheus::Lexicon lex;
    for (auto& e : morpheus::build_entries(base, exceptions)) lex.add(std::move(e));
    for (const auto& c : lex.conflicts()) std::cerr << "conflict: " << c << '\n';
    if (!lex.conflicts().empty()) return 2;
    lex.write(std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
