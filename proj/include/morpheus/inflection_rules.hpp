#pragma once

// Regular English inflection. Used to expand a base vocabulary into full
// lexicon entries; irregular forms come from the exception lexicon instead.

#include <string>
#include <string_view>
#include <vector>

#include "morpheus/pos.hpp"

namespace morpheus {

struct Form {
  std::string surface;
  PtbTag tag = PtbTag::OTHER;

  friend bool operator==(const Form&, const Form&) = default;
  friend auto operator<=>(const Form&, const Form&) = default;
};

struct RuleFlags {
  bool force_double = false;    // dbl: control -> controlled
  bool never_double = false;    // nodbl
  bool comparable = false;      // comp: force -er/-est on a long adjective
  bool not_comparable = false;  // nocomp
  bool no_plural = false;       // nopl: mass nouns
};

namespace rules {

inline bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

/// Rough syllable count: vowel groups, 'y' counted as a vowel after a
/// consonant, a final silent 'e' dropped.
inline int syllables(std::string_view w) {
  int groups = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const char c = w[i];
    const bool v = is_vowel(c) || (c == 'y' && i > 0 && !is_vowel(w[i - 1]));
    if (v && !prev_vowel) ++groups;
    prev_vowel = v;
  }
  if (w.size() > 2 && w.back() == 'e' && !is_vowel(w[w.size() - 2]) && !ends_with(w, "le") &&
      groups > 1) {
    --groups;
  }
  return groups < 1 ? 1 : groups;
}

inline bool consonant_y(std::string_view w) {
  return w.size() >= 2 && w.back() == 'y' && !is_vowel(w[w.size() - 2]);
}

/// Consonant-vowel-consonant ending on a one-syllable word (stop, big, plan).
inline bool should_double(std::string_view w, const RuleFlags& f) {
  if (f.never_double || w.size() < 2) return false;
  const char last = w.back();
  if (is_vowel(last) || last == 'w' || last == 'x' || last == 'y') return false;
  const char mid = w[w.size() - 2];
  if (!is_vowel(mid)) return false;
  if (w.size() >= 3) {
    const char before = w[w.size() - 3];
    // "qu" acts as a consonant cluster: quit -> quitting
    if (is_vowel(before) && !(before == 'u' && w.size() >= 4 && w[w.size() - 4] == 'q')) {
      return false;
    }
  }
  return f.force_double || syllables(w) == 1;
}

inline bool sibilant(std::string_view w) {
  return ends_with(w, "s") || ends_with(w, "x") || ends_with(w, "z") || ends_with(w, "ch") ||
         ends_with(w, "sh");
}

inline std::string plural(std::string_view w) {
  std::string s(w);
  if (sibilant(w)) return s + "es";
  if (consonant_y(w)) return s.substr(0, s.size() - 1) + "ies";
  return s + "s";
}

inline std::string third_person(std::string_view w) {
  std::string s(w);
  if (sibilant(w) || (ends_with(w, "o") && w.size() >= 2 && !is_vowel(w[w.size() - 2]))) {
    return s + "es";
  }
  if (consonant_y(w)) return s.substr(0, s.size() - 1) + "ies";
  return s + "s";
}

inline std::string past(std::string_view w, const RuleFlags& f) {
  std::string s(w);
  if (ends_with(w, "e")) return s + "d";
  if (consonant_y(w)) return s.substr(0, s.size() - 1) + "ied";
  if (should_double(w, f)) return s + s.back() + "ed";
  return s + "ed";
}

inline std::string gerund(std::string_view w, const RuleFlags& f) {
  std::string s(w);
  if (ends_with(w, "ie")) return s.substr(0, s.size() - 2) + "ying";
  if (ends_with(w, "e") && !ends_with(w, "ee") && !ends_with(w, "oe") && !ends_with(w, "ye") &&
      w.size() > 2) {
    return s.substr(0, s.size() - 1) + "ing";
  }
  if (should_double(w, f)) return s + s.back() + "ing";
  return s + "ing";
}

/// suffix is "er" or "est"
inline std::string degree(std::string_view w, std::string_view suffix, const RuleFlags& f) {
  std::string s(w);
  if (ends_with(w, "e")) return s + std::string(suffix.substr(1));
  if (consonant_y(w)) return s.substr(0, s.size() - 1) + "i" + std::string(suffix);
  if (should_double(w, f)) return s + s.back() + std::string(suffix);
  return s + std::string(suffix);
}

inline bool takes_degree(std::string_view w, const RuleFlags& f) {
  if (f.not_comparable) return false;
  if (f.comparable) return true;
  const int n = syllables(w);
  return n == 1 || (n == 2 && w.back() == 'y');
}

}  // namespace rules

/// All regular forms of `lemma`, base form first.
inline std::vector<Form> inflect_regular(std::string_view lemma, UPos upos,
                                         const RuleFlags& flags = {}) {
  const std::string base(lemma);
  switch (upos) {
    case UPos::NOUN:
      if (flags.no_plural) return {{base, PtbTag::NN}};
      return {{base, PtbTag::NN}, {rules::plural(lemma), PtbTag::NNS}};
    case UPos::VERB: {
      const std::string ed = rules::past(lemma, flags);
      return {{base, PtbTag::VB},  {base, PtbTag::VBP},
              {rules::third_person(lemma), PtbTag::VBZ},
              {ed, PtbTag::VBD},   {ed, PtbTag::VBN},
              {rules::gerund(lemma, flags), PtbTag::VBG}};
    }
    case UPos::ADJ:
    case UPos::ADV: {
      const bool adj = upos == UPos::ADJ;
      std::vector<Form> out{{base, adj ? PtbTag::JJ : PtbTag::RB}};
      if (rules::takes_degree(lemma, flags)) {
        out.push_back({rules::degree(lemma, "er", flags), adj ? PtbTag::JJR : PtbTag::RBR});
        out.push_back({rules::degree(lemma, "est", flags), adj ? PtbTag::JJS : PtbTag::RBS});
      }
      return out;
    }
    case UPos::OTHER:
      break;
  }
  return {{base, PtbTag::OTHER}};
}

}  // namespace morpheus
