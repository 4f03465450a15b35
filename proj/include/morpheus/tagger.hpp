#pragma once

// Part-of-speech tagging. The builtin tagger picks each word's most frequent
// tag (bundled table, then the morphology lexicon, then suffix/shape rules)
// and repairs the common ambiguities with a few left-context rules.

#include <algorithm>
#include <charconv>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "morpheus/error.hpp"
#include "morpheus/lexicon.hpp"
#include "morpheus/pos.hpp"
#include "morpheus/text_case.hpp"
#include "morpheus/tokenizer.hpp"

namespace morpheus {

using TagPrior = std::vector<std::pair<PtbTag, double>>;

/// word -> tag counts, keys lowercased.
class TagTable {
 public:
  static TagTable parse(std::istream& in, const std::string& source = "<stream>") {
    TagTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto cols = detail::split(t, '\t');
      if (cols.size() != 2) {
        throw FormatError(source + ":" + std::to_string(lineno) + ": expected word<TAB>tags");
      }
      TagPrior prior;
      for (auto item : detail::split(cols[1], ',')) {
        const auto colon = item.rfind(':');
        const auto tag = colon == std::string_view::npos ? std::nullopt
                                                         : parse_ptb_tag(item.substr(0, colon));
        if (!tag) throw FormatError(source + ":" + std::to_string(lineno) + ": bad tag entry");
        const auto num = item.substr(colon + 1);
        double count = 0.0;
        const auto [end, ec] = std::from_chars(num.data(), num.data() + num.size(), count);
        if (ec != std::errc() || end != num.data() + num.size()) {
          throw FormatError(source + ":" + std::to_string(lineno) + ": bad count in '" + std::string(item) + "'");
        }
        prior.emplace_back(*tag, count);
      }
      std::stable_sort(prior.begin(), prior.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      table.entries_[to_lower(cols[0])] = std::move(prior);
    }
    return table;
  }

  static TagTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tag table " + path.string());
    return parse(in, path.string());
  }

  const TagPrior* find(std::string_view word) const {
    auto it = entries_.find(to_lower(word));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, TagPrior> entries_;
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  /// Assigns tag and upos to every token of `sent`.
  virtual void tag(TaggedSentence& sent) const = 0;
  virtual std::string name() const = 0;
};

namespace detail {

inline std::optional<PtbTag> punctuation_tag(std::string_view w) {
  if (w == "." || w == "!" || w == "?") return PtbTag::PERIOD;
  if (w == ",") return PtbTag::COMMA;
  if (w == ":" || w == ";" || w == "-" || w == "--" || w == "..." || w == "…" || w == "—" ||
      w == "–") {
    return PtbTag::COLON;
  }
  if (w == "``" || w == "“" || w == "‘" || w == "`" || w == "«") return PtbTag::LQUOTE;
  if (w == "''" || w == "”" || w == "’" || w == "»") return PtbTag::RQUOTE;
  if (w == "(" || w == "[" || w == "{") return PtbTag::LRB;
  if (w == ")" || w == "]" || w == "}") return PtbTag::RRB;
  if (w == "#") return PtbTag::HASH;
  if (w == "$") return PtbTag::DOLLAR;
  if (w == "%" || w == "&" || w == "/" || w == "*" || w == "+" || w == "=" || w == "<" ||
      w == ">" || w == "@") {
    return PtbTag::SYM;
  }
  return std::nullopt;
}

inline bool is_number(std::string_view w) {
  bool digit = false;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != ',' && c != '.' && c != '-' && c != '/' && c != ':') {
      return false;
    }
  }
  return digit;
}

inline bool ends_with_ci(std::string_view w, std::string_view suffix) {
  return w.size() > suffix.size() + 1 && to_lower(w.substr(w.size() - suffix.size())) == suffix;
}

/// Suffix and shape guesses for words nobody knows.
inline TagPrior guess_unknown(std::string_view w) {
  if (is_number(w)) return {{PtbTag::CD, 1}};
  const CasePattern cp = case_pattern(w);
  if (cp == CasePattern::Title || cp == CasePattern::Upper) return {{PtbTag::NNP, 1}};
  if (w.find('-') != std::string_view::npos) return {{PtbTag::JJ, 1}, {PtbTag::NN, 0.5}};
  if (ends_with_ci(w, "ing")) return {{PtbTag::VBG, 1}, {PtbTag::NN, 0.5}};
  if (ends_with_ci(w, "ed")) return {{PtbTag::VBN, 1}, {PtbTag::VBD, 0.8}, {PtbTag::JJ, 0.5}};
  if (ends_with_ci(w, "ly")) return {{PtbTag::RB, 1}};
  for (auto s : {"tion", "sion", "ment", "ness", "ity", "ism", "ist", "ance", "ence", "ship"}) {
    if (ends_with_ci(w, s)) return {{PtbTag::NN, 1}};
  }
  for (auto s : {"able", "ible", "ous", "ful", "ive", "al", "ic", "less", "ish", "ian"}) {
    if (ends_with_ci(w, s)) return {{PtbTag::JJ, 1}, {PtbTag::NN, 0.5}};
  }
  if (ends_with_ci(w, "est")) return {{PtbTag::JJS, 1}};
  if (ends_with_ci(w, "s") && !ends_with_ci(w, "ss") && !ends_with_ci(w, "us") &&
      !ends_with_ci(w, "is")) {
    return {{PtbTag::NNS, 1}, {PtbTag::VBZ, 0.5}};
  }
  return {{PtbTag::NN, 1}};
}

/// Preference among lexicon readings when the table has no counts.
inline double default_prior(PtbTag t) {
  switch (t) {
    case PtbTag::NN: return 10;
    case PtbTag::NNS: return 9;
    case PtbTag::JJ: return 8;
    case PtbTag::VBG: return 7;
    case PtbTag::VBD: return 7;
    case PtbTag::VBN: return 6;
    case PtbTag::VBZ: return 6;
    case PtbTag::JJR: return 6;
    case PtbTag::JJS: return 6;
    case PtbTag::VB: return 5;
    case PtbTag::VBP: return 4;
    default: return 3;
  }
}

inline bool is_noun(PtbTag t) {
  return t == PtbTag::NN || t == PtbTag::NNS || t == PtbTag::NNP || t == PtbTag::NNPS;
}

inline bool is_prenominal(PtbTag t) {
  return t == PtbTag::DT || t == PtbTag::PRP_S || t == PtbTag::POS || t == PtbTag::JJ ||
         t == PtbTag::JJR || t == PtbTag::JJS || t == PtbTag::CD || t == PtbTag::WP_S ||
         t == PtbTag::PDT;
}

inline bool is_finite_verb(PtbTag t) {
  return t == PtbTag::VBD || t == PtbTag::VBZ || t == PtbTag::VBP || t == PtbTag::MD;
}

inline bool is_auxiliary(std::string_view lower) {
  static constexpr std::array<std::string_view, 16> kAux = {
      "is", "are", "was", "were", "be", "been", "being", "am", "'s", "'re",
      "has", "have", "had", "'ve", "having", "get"};
  return std::find(kAux.begin(), kAux.end(), lower) != kAux.end();
}

inline bool is_plural_pronoun(std::string_view lower) {
  return lower == "i" || lower == "we" || lower == "you" || lower == "they";
}

inline bool is_singular_pronoun(std::string_view lower) {
  return lower == "he" || lower == "she" || lower == "it";
}

inline bool has_tag(const TagPrior& prior, PtbTag t) {
  return std::any_of(prior.begin(), prior.end(), [t](const auto& p) { return p.first == t; });
}

inline std::optional<PtbTag> best_noun(const TagPrior& prior) {
  for (const auto& [t, w] : prior) {
    if (is_noun(t)) return t;
  }
  return std::nullopt;
}

}  // namespace detail

class BuiltinTagger : public Tagger {
 public:
  BuiltinTagger(const Lexicon& lexicon, TagTable table, bool adverbs_eligible = false)
      : lexicon_(&lexicon), table_(std::move(table)), adverbs_eligible_(adverbs_eligible) {}

  std::string name() const override { return "builtin"; }
  bool adverbs_eligible() const { return adverbs_eligible_; }

  /// All readings of `word` with their prior weight, best first.
  TagPrior readings(std::string_view word) const {
    if (auto p = detail::punctuation_tag(word)) return {{*p, 1}};
    if (word == "\"" || word == "'") return {{PtbTag::RQUOTE, 1}, {PtbTag::LQUOTE, 0.5}};
    if (const auto* prior = table_.find(word)) return *prior;
    TagPrior out;
    for (auto t : lexicon_->tags_of(word)) out.emplace_back(t, detail::default_prior(t));
    if (out.empty()) return detail::guess_unknown(word);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
  }

  /// Context-free tag: the best reading, with title-case nouns promoted to
  /// proper nouns.
  PtbTag lexical_tag(std::string_view word) const {
    const auto r = readings(word);
    return promote_proper(word, r.front().first);
  }

  void tag(TaggedSentence& sent) const override {
    auto& toks = sent.tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const std::string lower = to_lower(toks[i].surface);
      const TagPrior r = readings(toks[i].surface);
      PtbTag t = r.front().first;
      const std::optional<PtbTag> prev =
          i > 0 ? std::optional<PtbTag>(toks[i - 1].tag) : std::nullopt;
      const std::string prev_word = i > 0 ? to_lower(toks[i - 1].surface) : std::string();
      auto has = [&](PtbTag x) { return detail::has_tag(r, x); };

      if (prev && (*prev == PtbTag::TO || *prev == PtbTag::MD) && has(PtbTag::VB)) {
        t = PtbTag::VB;
      } else if (prev && detail::is_prenominal(*prev)) {
        if (t == PtbTag::JJ && nominal_follows(sent, i)) {
          // "the original settlers": an adjective in front of its noun
        } else if (auto n = detail::best_noun(r)) {
          t = *n;
        } else if (t == PtbTag::VBD && has(PtbTag::VBN)) {
          t = PtbTag::VBN;
        }
      } else if ((t == PtbTag::VBD || t == PtbTag::VBN) && has(PtbTag::VBD) && has(PtbTag::VBN)) {
        t = auxiliary_before(sent, i) ? PtbTag::VBN : PtbTag::VBD;
      } else if (prev && detail::is_noun(t)) {
        const bool plural_subject = *prev == PtbTag::NNS || *prev == PtbTag::NNPS ||
                                    detail::is_plural_pronoun(prev_word);
        const bool singular_subject = *prev == PtbTag::NN || *prev == PtbTag::NNP ||
                                      detail::is_singular_pronoun(prev_word);
        if (plural_subject && has(PtbTag::VBP)) {
          t = PtbTag::VBP;
        } else if (singular_subject && t == PtbTag::NNS && has(PtbTag::VBZ)) {
          t = PtbTag::VBZ;
        }
      } else if (prev && t == PtbTag::VB && has(PtbTag::VBP) && !modal_before(sent, i)) {
        if (*prev == PtbTag::NNS || *prev == PtbTag::NNPS || detail::is_plural_pronoun(prev_word)) {
          t = PtbTag::VBP;
        }
      }
      if (i > 0 && !opens_sentence(toks[i - 1].tag)) t = promote_proper(toks[i].surface, t);

      toks[i].tag = t;
      toks[i].upos = ptb_to_upos(t, adverbs_eligible_);
    }
    sent.tagged = true;
  }

 private:
  static bool opens_sentence(PtbTag prev) {
    return prev == PtbTag::PERIOD || prev == PtbTag::LQUOTE || prev == PtbTag::COLON;
  }

  bool nominal_follows(const TaggedSentence& sent, std::size_t i) const {
    if (i + 1 >= sent.tokens.size()) return false;
    const auto& next = sent.tokens[i + 1].surface;
    const PtbTag t = promote_proper(next, readings(next).front().first);
    return detail::is_noun(t) || t == PtbTag::JJ;
  }

  static PtbTag promote_proper(std::string_view word, PtbTag t) {
    if (case_pattern(word) != CasePattern::Title) return t;
    if (t == PtbTag::NN) return PtbTag::NNP;
    if (t == PtbTag::NNS) return PtbTag::NNPS;
    return t;
  }

  /// A form of be/have earlier in the clause, with no other finite verb
  /// in between.
  static bool auxiliary_before(const TaggedSentence& sent, std::size_t i) {
    for (std::size_t j = i; j-- > 0;) {
      const auto& tok = sent.tokens[j];
      if (detail::is_auxiliary(to_lower(tok.surface))) return true;
      if (detail::is_finite_verb(tok.tag) || tok.tag == PtbTag::PERIOD) return false;
    }
    return false;
  }

  static bool modal_before(const TaggedSentence& sent, std::size_t i) {
    for (std::size_t j = i; j-- > 0;) {
      const auto& tok = sent.tokens[j];
      const std::string w = to_lower(tok.surface);
      if (tok.tag == PtbTag::MD || w == "do" || w == "does" || w == "did") return true;
      if (tok.tag == PtbTag::PERIOD) return false;
    }
    return false;
  }

  const Lexicon* lexicon_;
  TagTable table_;
  bool adverbs_eligible_;
};

/// Builds a tagged sentence from externally supplied tokens and tags. When
/// `text` tokenizes to exactly `tokens`, its whitespace is kept; otherwise
/// tokens are joined with single spaces. Tags are trusted verbatim.
inline TaggedSentence pretagged_sentence(const std::vector<std::string>& tokens,
                                         const std::vector<std::string>& tags,
                                         const std::optional<std::string>& text,
                                         bool adverbs_eligible = false) {
  if (tokens.size() != tags.size()) {
    throw FormatError("pretagged input: tokens and tags differ in length");
  }
  TaggedSentence sent;
  bool aligned = false;
  if (text) {
    sent = tokenize(*text);
    aligned = sent.tokens.size() == tokens.size();
    for (std::size_t i = 0; aligned && i < tokens.size(); ++i) {
      aligned = sent.tokens[i].surface == tokens[i];
    }
  }
  if (!aligned) {
    sent = TaggedSentence{};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      Token tok;
      tok.surface = tokens[i];
      tok.index = i;
      tok.whitespace_before = i == 0 ? "" : " ";
      sent.tokens.push_back(std::move(tok));
    }
    sent.original = detokenize(sent);
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    sent.tokens[i].tag = ptb_tag_or_other(tags[i]);
    sent.tokens[i].upos = ptb_to_upos(sent.tokens[i].tag, adverbs_eligible);
  }
  sent.tagged = true;
  return sent;
}

/// Tokenizes and tags in one step.
inline TaggedSentence analyze(std::string_view text, const Tagger& tagger) {
  TaggedSentence sent = tokenize(text);
  tagger.tag(sent);
  return sent;
}

}  // namespace morpheus
