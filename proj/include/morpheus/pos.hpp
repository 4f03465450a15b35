#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace morpheus {

/// Coarse universal part of speech. Only NOUN, VERB and ADJ are perturbed by
/// default; ADV is produced only when adverb inflection is switched on.
enum class UPos { NOUN, VERB, ADJ, ADV, OTHER };

/// Penn Treebank tag set. OTHER is the catch-all for anything unrecognised.
enum class PtbTag {
  CC, CD, DT, EX, FW, IN, JJ, JJR, JJS, LS, MD, NN, NNS, NNP, NNPS, PDT, POS,
  PRP, PRP_S, RB, RBR, RBS, RP, SYM, TO, UH, VB, VBD, VBG, VBN, VBP, VBZ, WDT,
  WP, WP_S, WRB, PERIOD, COMMA, COLON, LQUOTE, RQUOTE, LRB, RRB, HASH, DOLLAR,
  OTHER
};

inline constexpr std::size_t kPtbTagCount = static_cast<std::size_t>(PtbTag::OTHER) + 1;

namespace detail {
inline constexpr std::array<std::string_view, kPtbTagCount> kTagNames = {
    "CC",  "CD",  "DT",  "EX",   "FW",  "IN",  "JJ",    "JJR", "JJS", "LS",
    "MD",  "NN",  "NNS", "NNP",  "NNPS", "PDT", "POS",  "PRP", "PRP$", "RB",
    "RBR", "RBS", "RP",  "SYM",  "TO",  "UH",  "VB",    "VBD", "VBG", "VBN",
    "VBP", "VBZ", "WDT", "WP",   "WP$", "WRB", ".",     ",",   ":",   "``",
    "''",  "-LRB-", "-RRB-", "#", "$",  "OTHER"};
}  // namespace detail

inline std::string_view to_string(PtbTag tag) {
  return detail::kTagNames[static_cast<std::size_t>(tag)];
}

inline std::optional<PtbTag> parse_ptb_tag(std::string_view name) {
  for (std::size_t i = 0; i < kPtbTagCount; ++i) {
    if (detail::kTagNames[i] == name) return static_cast<PtbTag>(i);
  }
  // common aliases emitted by other taggers
  if (name == "(") return PtbTag::LRB;
  if (name == ")") return PtbTag::RRB;
  if (name == "\"") return PtbTag::RQUOTE;
  return std::nullopt;
}

/// Lenient variant: anything unknown becomes OTHER.
inline PtbTag ptb_tag_or_other(std::string_view name) {
  return parse_ptb_tag(name).value_or(PtbTag::OTHER);
}

inline std::string_view to_string(UPos upos) {
  switch (upos) {
    case UPos::NOUN: return "NOUN";
    case UPos::VERB: return "VERB";
    case UPos::ADJ: return "ADJ";
    case UPos::ADV: return "ADV";
    case UPos::OTHER: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<UPos> parse_upos(std::string_view name) {
  if (name == "NOUN") return UPos::NOUN;
  if (name == "VERB") return UPos::VERB;
  if (name == "ADJ") return UPos::ADJ;
  if (name == "ADV") return UPos::ADV;
  if (name == "OTHER") return UPos::OTHER;
  return std::nullopt;
}

/// Fixed PTB -> UPOS table. RB/RBR/RBS fall into OTHER unless
/// `adverbs_eligible` is set, in which case they become ADV.
constexpr UPos ptb_to_upos(PtbTag tag, bool adverbs_eligible = false) {
  switch (tag) {
    case PtbTag::NN:
    case PtbTag::NNS:
    case PtbTag::NNP:
    case PtbTag::NNPS:
      return UPos::NOUN;
    case PtbTag::VB:
    case PtbTag::VBD:
    case PtbTag::VBG:
    case PtbTag::VBN:
    case PtbTag::VBP:
    case PtbTag::VBZ:
      return UPos::VERB;
    case PtbTag::JJ:
    case PtbTag::JJR:
    case PtbTag::JJS:
      return UPos::ADJ;
    case PtbTag::RB:
    case PtbTag::RBR:
    case PtbTag::RBS:
      return adverbs_eligible ? UPos::ADV : UPos::OTHER;
    default:
      return UPos::OTHER;
  }
}

/// Lexicon-side mapping: the UPOS family a lexicon form's tag belongs to,
/// independent of any eligibility switch.
constexpr UPos tag_family(PtbTag tag) { return ptb_to_upos(tag, true); }

constexpr bool is_perturbable(UPos upos) {
  return upos == UPos::NOUN || upos == UPos::VERB || upos == UPos::ADJ || upos == UPos::ADV;
}

/// Tags that only ever label inflected content words.
constexpr bool is_content_tag(PtbTag tag) { return tag_family(tag) != UPos::OTHER; }

constexpr bool is_proper_noun(PtbTag tag) { return tag == PtbTag::NNP || tag == PtbTag::NNPS; }

}  // namespace morpheus
