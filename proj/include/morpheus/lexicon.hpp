#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morpheus/error.hpp"
#include "morpheus/inflection_rules.hpp"
#include "morpheus/pos.hpp"
#include "morpheus/text_case.hpp"

namespace morpheus {

struct LexiconEntry {
  std::string lemma;
  UPos upos = UPos::OTHER;
  std::vector<Form> forms;
};

struct InflectionCandidate {
  std::string surface;
  PtbTag tag = PtbTag::OTHER;
  UPos upos = UPos::OTHER;

  friend bool operator==(const InflectionCandidate&, const InflectionCandidate&) = default;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

/// Tag order used when writing entries: base form first, then inflections.
inline int tag_rank(PtbTag t) {
  switch (t) {
    case PtbTag::NN: return 0;
    case PtbTag::NNS: return 1;
    case PtbTag::VB: return 0;
    case PtbTag::VBP: return 1;
    case PtbTag::VBZ: return 2;
    case PtbTag::VBD: return 3;
    case PtbTag::VBN: return 4;
    case PtbTag::VBG: return 5;
    case PtbTag::JJ: case PtbTag::RB: return 0;
    case PtbTag::JJR: case PtbTag::RBR: return 1;
    case PtbTag::JJS: case PtbTag::RBS: return 2;
    default: return 9;
  }
}

inline bool is_base_tag(PtbTag t) {
  return t == PtbTag::NN || t == PtbTag::VB || t == PtbTag::JJ || t == PtbTag::RB;
}

}  // namespace detail

/// Parses one `lemma<TAB>upos<TAB>surface:tag,...` line. Throws FormatError.
inline LexiconEntry parse_lexicon_line(std::string_view line) {
  const auto cols = detail::split(detail::trim(line), '\t');
  if (cols.size() != 3) throw FormatError("expected 3 tab-separated columns");
  LexiconEntry e;
  e.lemma = std::string(cols[0]);
  const auto upos = parse_upos(cols[1]);
  if (!upos) throw FormatError("unknown UPOS '" + std::string(cols[1]) + "'");
  e.upos = *upos;
  for (auto item : detail::split(cols[2], ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw FormatError("bad form '" + std::string(item) + "'");
    }
    const auto tag = parse_ptb_tag(item.substr(colon + 1));
    if (!tag) throw FormatError("unknown tag in '" + std::string(item) + "'");
    e.forms.push_back({std::string(item.substr(0, colon)), *tag});
  }
  return e;
}

inline std::string format_lexicon_line(const LexiconEntry& e) {
  std::string out = e.lemma + '\t' + std::string(to_string(e.upos)) + '\t';
  for (std::size_t i = 0; i < e.forms.size(); ++i) {
    if (i) out += ',';
    out += e.forms[i].surface + ':' + std::string(to_string(e.forms[i].tag));
  }
  return out;
}

/// English inflectional lexicon. Immutable once loaded; const member
/// functions are safe to call from many threads.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::istream& in, const std::string& source = "<stream>") {
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      try {
        lex.add(parse_lexicon_line(t));
      } catch (const FormatError& e) {
        throw FormatError(source + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return lex;
  }

  static Lexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon file " + path.string());
    return parse(in, path.string());
  }

  /// Adds an entry after checking its invariants. Surfaces are stored
  /// lowercase. A (surface, UPOS) pair already claimed by another lemma is
  /// recorded as a conflict; the base-form reading wins, otherwise the first.
  void add(LexiconEntry e) {
    if (e.lemma.empty()) throw FormatError("empty lemma");
    if (!is_perturbable(e.upos)) throw FormatError("entry '" + e.lemma + "' has ineligible UPOS");
    if (e.forms.empty()) throw FormatError("entry '" + e.lemma + "' has no forms");
    e.lemma = to_lower(e.lemma);
    std::set<std::pair<std::string, PtbTag>> seen;
    bool has_base = false;
    for (auto& f : e.forms) {
      f.surface = to_lower(f.surface);
      if (f.surface.empty() || f.surface.find_first_of(" \t") != std::string::npos) {
        throw FormatError("entry '" + e.lemma + "' has a malformed surface");
      }
      if (tag_family(f.tag) != e.upos) {
        throw FormatError("form " + f.surface + ":" + std::string(to_string(f.tag)) +
                          " does not belong to " + std::string(to_string(e.upos)) + " entry '" +
                          e.lemma + "'");
      }
      if (!seen.emplace(f.surface, f.tag).second) {
        throw FormatError("duplicate form " + f.surface + ":" + std::string(to_string(f.tag)) +
                          " in entry '" + e.lemma + "'");
      }
      has_base = has_base || (f.surface == e.lemma && detail::is_base_tag(f.tag));
    }
    if (!has_base) throw FormatError("entry '" + e.lemma + "' lacks its base form");
    const Key entry_key{e.lemma, e.upos};
    if (by_lemma_upos_.count(entry_key)) {
      throw FormatError("duplicate entry '" + e.lemma + "' " + std::string(to_string(e.upos)));
    }

    const std::size_t idx = entries_.size();
    by_lemma_upos_[entry_key] = idx;
    by_lemma_[e.lemma].push_back(idx);
    for (const auto& f : e.forms) {
      auto& tags = surface_tags_[f.surface];
      if (std::find(tags.begin(), tags.end(), f.tag) == tags.end()) tags.push_back(f.tag);
      const Key form_key{f.surface, e.upos};
      auto it = lemma_of_.find(form_key);
      if (it == lemma_of_.end()) {
        lemma_of_.emplace(form_key, e.lemma);
      } else if (it->second != e.lemma) {
        conflicts_.push_back(f.surface + " (" + std::string(to_string(e.upos)) + "): " +
                             it->second + " vs " + e.lemma);
        if (f.surface == e.lemma) it->second = e.lemma;
      }
    }
    entries_.push_back(std::move(e));
  }

  void write(std::ostream& out) const {
    for (const auto& e : entries_) out << format_lexicon_line(e) << '\n';
  }

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Surfaces analysed as two different lemmas under one UPOS.
  const std::vector<std::string>& conflicts() const { return conflicts_; }

  /// Lemmas whose forms are never offered as alternatives (e.g. auxiliaries).
  void set_exclusions(std::set<std::string> lemmas) {
    exclusions_.clear();
    for (const auto& l : lemmas) exclusions_.insert(to_lower(l));
  }
  const std::set<std::string>& exclusions() const { return exclusions_; }

  /// True when `surface` has an analysis under `upos`.
  bool knows(std::string_view surface, UPos upos) const {
    return lemma_of_.count(Key{to_lower(surface), upos}) != 0;
  }

  /// Citation form of `surface` read as `upos`; unknown words come back
  /// unchanged.
  std::string lemmatize(std::string_view surface, UPos upos) const {
    auto it = lemma_of_.find(Key{to_lower(surface), upos});
    if (it == lemma_of_.end()) return std::string(surface);
    return it->second;
  }

  const LexiconEntry* find(std::string_view lemma, UPos upos) const {
    auto it = by_lemma_upos_.find(Key{std::string(lemma), upos});
    return it == by_lemma_upos_.end() ? nullptr : &entries_[it->second];
  }

  /// Every tag any lexicon entry gives this (lowercased) surface.
  std::vector<PtbTag> tags_of(std::string_view surface) const {
    auto it = surface_tags_.find(to_lower(surface));
    if (it == surface_tags_.end()) return {};
    return it->second;
  }

  /// Inflected alternatives for `token`, in lexicographic (surface, tag)
  /// order. Candidates carry the token's capitalisation; the token itself is
  /// always present. With `constrain`, only forms of the same UPOS are
  /// returned; otherwise forms of every entry sharing the lemma.
  std::vector<InflectionCandidate> get_inflections(std::string_view token, UPos upos,
                                                   bool constrain) const {
    std::vector<InflectionCandidate> out;
    const std::string lower = to_lower(token);
    auto lemma_it = lemma_of_.find(Key{lower, upos});
    if (lemma_it == lemma_of_.end()) {
      out.push_back({std::string(token), PtbTag::OTHER, upos});
      return out;
    }
    const std::string& lemma = lemma_it->second;
    const CasePattern pattern = case_pattern(token);

    std::vector<const LexiconEntry*> sources;
    if (constrain) {
      sources.push_back(&entries_[by_lemma_upos_.at(Key{lemma, upos})]);
    } else {
      for (auto idx : by_lemma_.at(lemma)) sources.push_back(&entries_[idx]);
    }

    std::set<std::pair<std::string, PtbTag>> seen;
    const bool excluded = exclusions_.count(lemma) != 0;
    for (const auto* e : sources) {
      for (const auto& f : e->forms) {
        if (constrain && tag_family(f.tag) != upos) continue;
        if (excluded && f.surface != lower) continue;
        std::string surface = f.surface == lower ? std::string(token) : apply_case(f.surface, pattern);
        if (!seen.emplace(surface, f.tag).second) continue;
        out.push_back({std::move(surface), f.tag, tag_family(f.tag)});
      }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.surface, a.tag) < std::tie(b.surface, b.tag);
    });
    return out;
  }

  /// Shuffled variant: a uniformly random permutation of the sorted list.
  template <class URBG>
  std::vector<InflectionCandidate> get_inflections(std::string_view token, UPos upos,
                                                   bool constrain, bool shuffle,
                                                   URBG& rng) const {
    auto out = get_inflections(token, upos, constrain);
    if (shuffle) std::shuffle(out.begin(), out.end(), rng);
    return out;
  }

 private:
  struct Key {
    std::string text;
    UPos upos;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::string>{}(k.text) * 31u + static_cast<std::size_t>(k.upos);
    }
  };

  std::vector<LexiconEntry> entries_;
  std::unordered_map<Key, std::size_t, KeyHash> by_lemma_upos_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_lemma_;
  std::unordered_map<Key, std::string, KeyHash> lemma_of_;
  std::unordered_map<std::string, std::vector<PtbTag>> surface_tags_;
  std::vector<std::string> conflicts_;
  std::set<std::string> exclusions_;
};

/// Unique surfaces of a candidate list, first occurrence wins.
inline std::vector<InflectionCandidate> unique_surfaces(std::vector<InflectionCandidate> cands) {
  std::vector<InflectionCandidate> out;
  std::set<std::string> seen;
  for (auto& c : cands) {
    if (seen.insert(c.surface).second) out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Building the bundled lexicon from a base vocabulary plus exceptions.

struct BaseWord {
  std::string lemma;
  UPos upos = UPos::OTHER;
  RuleFlags flags;
};

inline std::vector<BaseWord> parse_base_words(std::istream& in) {
  std::vector<BaseWord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cols = detail::split(t, '\t');
    const auto upos = cols.size() >= 2 ? parse_upos(cols[1]) : std::nullopt;
    if (!upos) throw FormatError("base words line " + std::to_string(lineno) + ": bad UPOS");
    BaseWord w{std::string(cols[0]), *upos, {}};
    if (cols.size() >= 3) {
      for (auto flag : detail::split(cols[2], ',')) {
        if (flag == "dbl") w.flags.force_double = true;
        else if (flag == "nodbl") w.flags.never_double = true;
        else if (flag == "comp") w.flags.comparable = true;
        else if (flag == "nocomp") w.flags.not_comparable = true;
        else if (flag == "nopl") w.flags.no_plural = true;
        else throw FormatError("base words line " + std::to_string(lineno) + ": unknown flag");
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

/// Exception lines use the lexicon line format; each tag they list replaces
/// the rule-generated forms for that tag.
inline std::vector<LexiconEntry> build_entries(const std::vector<BaseWord>& base,
                                               const std::vector<LexiconEntry>& exceptions) {
  std::map<std::pair<std::string, UPos>, const LexiconEntry*> exc;
  for (const auto& e : exceptions) exc[{e.lemma, e.upos}] = &e;

  std::map<std::pair<std::string, UPos>, LexiconEntry> built;
  auto expand = [&](const std::string& lemma, UPos upos, const RuleFlags& flags) {
    std::vector<Form> forms = inflect_regular(lemma, upos, flags);
    if (auto it = exc.find({lemma, upos}); it != exc.end()) {
      std::set<PtbTag> overridden;
      for (const auto& f : it->second->forms) overridden.insert(f.tag);
      std::erase_if(forms, [&](const Form& f) { return overridden.count(f.tag) != 0; });
      for (const auto& f : it->second->forms) forms.push_back(f);
    }
    std::stable_sort(forms.begin(), forms.end(), [](const Form& a, const Form& b) {
      return detail::tag_rank(a.tag) < detail::tag_rank(b.tag);
    });
    std::vector<Form> unique;
    for (auto& f : forms) {
      if (std::find(unique.begin(), unique.end(), f) == unique.end()) unique.push_back(f);
    }
    built[{lemma, upos}] = LexiconEntry{lemma, upos, std::move(unique)};
  };
  for (const auto& w : base) expand(w.lemma, w.upos, w.flags);
  for (const auto& e : exceptions) {
    if (!built.count({e.lemma, e.upos})) expand(e.lemma, e.upos, {});
  }
  std::vector<LexiconEntry> out;
  for (auto& [key, entry] : built) out.push_back(std::move(entry));
  return out;
}

}  // namespace morpheus
