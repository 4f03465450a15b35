// Prints four weighted random inflections of a sentence.

#include <iostream>

#include "morpheus/augment.hpp"
#include "morpheus/resources.hpp"

int main(int argc, char** argv) {
  const std::string text = argc > 1 ? argv[1] : "The children were playing in the old gardens.";
  auto res = morpheus::Resources::load_default();

  morpheus::InflectionDistribution dist;
  dist.add(morpheus::PtbTag::VBG, 3);
  dist.add(morpheus::PtbTag::NNS, 2);
  dist.add(morpheus::PtbTag::VBZ, 1);

  morpheus::Rng rng(morpheus::derive_seed(1, text));
  const auto sent = morpheus::analyze(text, *res.tagger);
  for (const auto& v : morpheus::random_inflect(sent, 4, dist, *res.lexicon, false, rng)) {
    std::cout << v.text << '\n';
  }
}
