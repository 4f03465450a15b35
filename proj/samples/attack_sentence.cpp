// Attacks one sentence with the additive toy oracle and prints the result.
//
//   sample_attack_sentence "The settler arrive at the harbour."

#include <iostream>

#include "morpheus/resources.hpp"
#include "morpheus/search.hpp"

int main(int argc, char** argv) {
  const std::string text = argc > 1 ? argv[1] : "When is the suspended team scheduled to return?";
  auto res = morpheus::Resources::load_default();

  // loss counts gerunds and plural nouns
  morpheus::BagOfTagsOracle oracle(*res.tagger, {{morpheus::PtbTag::VBG, 1.0}, {morpheus::PtbTag::NNS, 1.0}});
  morpheus::AttackConfig cfg;
  cfg.rng_seed = 7;

  const auto result = morpheus::attack(text, {}, oracle, cfg, *res.lexicon, *res.tagger);
  std::cout << morpheus::to_json(result).dump(2) << '\n';
}
