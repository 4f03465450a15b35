#pragma once

// Moses-style word tokenizer that remembers the exact whitespace in front of
// every token, so detokenize(tokenize(s)) == s for any input.

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "morpheus/pos.hpp"
#include "morpheus/text_case.hpp"

namespace morpheus {

struct Token {
  std::string surface;
  std::size_t index = 0;
  PtbTag tag = PtbTag::OTHER;
  UPos upos = UPos::OTHER;
  std::string whitespace_before;

  bool space_before() const { return !whitespace_before.empty(); }
};

struct TaggedSentence {
  std::vector<Token> tokens;
  std::string original;
  std::string trailing_whitespace;
  bool tagged = false;
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline constexpr std::array<std::string_view, 8> kLeadingMultibyte = {
    "“", "‘", "«", "„", "¿", "¡", "—", "–"};
inline constexpr std::array<std::string_view, 6> kTrailingMultibyte = {
    "”", "’", "»", "…", "—", "–"};

inline constexpr std::string_view kLeadingAscii = "([{\"'`<$#";
inline constexpr std::string_view kTrailingAscii = ")]}\"'>,;:!?%";

inline constexpr std::array<std::string_view, 26> kNonbreakingPrefixes = {
    "mr",  "mrs", "ms",  "dr",  "st",   "jr",  "sr",  "prof", "inc", "ltd", "co",   "corp", "vs",
    "etc", "e.g", "i.e", "u.s", "u.k", "no", "jan", "feb", "aug", "sept", "oct", "nov", "dec"};

inline std::size_t leading_punct(std::string_view s) {
  if (s.empty()) return 0;
  if (kLeadingAscii.find(s.front()) != std::string_view::npos) return 1;
  for (auto p : kLeadingMultibyte) {
    if (s.substr(0, p.size()) == p) return p.size();
  }
  return 0;
}

inline std::size_t trailing_punct(std::string_view s) {
  if (s.empty()) return 0;
  if (kTrailingAscii.find(s.back()) != std::string_view::npos) return 1;
  for (auto p : kTrailingMultibyte) {
    if (s.size() >= p.size() && s.substr(s.size() - p.size()) == p) return p.size();
  }
  return 0;
}

inline bool is_abbreviation(std::string_view word) {
  if (word.empty()) return false;
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) return true;
  const std::string lower = to_lower(word);
  if (std::find(kNonbreakingPrefixes.begin(), kNonbreakingPrefixes.end(), lower) !=
      kNonbreakingPrefixes.end()) {
    return true;
  }
  // acronyms like U.S or e.g: letters separated by single periods
  bool has_dot = false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    const char c = word[i];
    if (c == '.') {
      if (i == 0 || word[i - 1] == '.') return false;
      has_dot = true;
    } else if (!std::isalpha(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return has_dot;
}

inline bool ci_ends_with(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  return to_lower(s.substr(s.size() - suffix.size())) == suffix;
}

inline bool has_alpha(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
  });
}

/// Splits English clitics off a word core: don't -> do n't, it's -> it 's.
inline void split_clitics(std::string_view core, std::vector<std::string>& out) {
  static constexpr std::array<std::string_view, 2> kNegations = {"n't", "n’t"};
  static constexpr std::array<std::string_view, 12> kClitics = {
      "'s", "'re", "'ve", "'ll", "'d", "'m",
      "’s", "’re", "’ve", "’ll", "’d", "’m"};
  for (auto neg : kNegations) {
    if (core.size() > neg.size() && ci_ends_with(core, neg)) {
      const auto stem = core.substr(0, core.size() - neg.size());
      if (has_alpha(stem)) {
        out.emplace_back(stem);
        out.emplace_back(core.substr(stem.size()));
        return;
      }
    }
  }
  for (auto cl : kClitics) {
    if (core.size() > cl.size() && ci_ends_with(core, cl)) {
      const auto stem = core.substr(0, core.size() - cl.size());
      if (has_alpha(stem)) {
        out.emplace_back(stem);
        out.emplace_back(core.substr(stem.size()));
        return;
      }
    }
  }
  out.emplace_back(core);
}

/// Separators inside a word: brackets and sentence punctuation, plus commas
/// and colons that are not between digits.
inline bool internal_split_at(std::string_view core, std::size_t i) {
  const char c = core[i];
  if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == '!' ||
      c == '?' || c == ';' || c == '"') {
    return true;
  }
  if (c == ',' || c == ':') {
    const bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(core[i - 1]));
    const bool digit_after =
        i + 1 < core.size() && std::isdigit(static_cast<unsigned char>(core[i + 1]));
    if (digit_before && digit_after) return false;
    if (c == ':' && core.substr(i, 3) == "://") return false;
    return true;
  }
  return false;
}

inline void split_core(std::string_view core, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < core.size(); ++i) {
    if (internal_split_at(core, i)) {
      if (i > start) split_clitics(core.substr(start, i - start), out);
      out.emplace_back(core.substr(i, 1));
      start = i + 1;
    }
  }
  if (start < core.size()) split_clitics(core.substr(start), out);
}

inline bool is_bare_clitic(std::string_view chunk) {
  static constexpr std::array<std::string_view, 8> kBare = {"'s", "'re", "'ve", "'ll",
                                                            "'d", "'m", "n't", "'t"};
  const std::string lower = to_lower(chunk);
  return std::find(kBare.begin(), kBare.end(), lower) != kBare.end();
}

inline std::vector<std::string> split_chunk(std::string_view chunk) {
  if (is_bare_clitic(chunk)) return {std::string(chunk)};
  std::vector<std::string> head;
  std::deque<std::string> tail;
  while (auto n = leading_punct(chunk)) {
    if (n == chunk.size()) break;
    head.emplace_back(chunk.substr(0, n));
    chunk.remove_prefix(n);
  }
  while (!chunk.empty()) {
    if (chunk.back() == '.') {
      std::size_t dots = 0;
      while (dots < chunk.size() && chunk[chunk.size() - 1 - dots] == '.') ++dots;
      const auto rest = chunk.substr(0, chunk.size() - dots);
      if (rest.empty()) break;
      if (dots == 1 && is_abbreviation(rest)) break;
      tail.emplace_front(chunk.substr(rest.size()));
      chunk = rest;
      continue;
    }
    const auto n = trailing_punct(chunk);
    if (n == 0 || n == chunk.size()) break;
    tail.emplace_front(chunk.substr(chunk.size() - n));
    chunk.remove_suffix(n);
  }
  std::vector<std::string> out = std::move(head);
  if (!chunk.empty()) split_core(chunk, out);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace detail

/// Splits text into tokens; the sentence comes back untagged.
inline TaggedSentence tokenize(std::string_view text) {
  TaggedSentence sent;
  sent.original = std::string(text);
  std::size_t i = 0;
  std::string pending_ws;
  while (i < text.size()) {
    if (detail::is_space(text[i])) {
      pending_ws.push_back(text[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !detail::is_space(text[j])) ++j;
    bool first = true;
    for (auto& piece : detail::split_chunk(text.substr(i, j - i))) {
      Token tok;
      tok.surface = std::move(piece);
      tok.index = sent.tokens.size();
      if (first) tok.whitespace_before = std::move(pending_ws);
      pending_ws.clear();
      first = false;
      sent.tokens.push_back(std::move(tok));
    }
    i = j;
  }
  sent.trailing_whitespace = std::move(pending_ws);
  return sent;
}

inline std::string detokenize(const TaggedSentence& sent) {
  std::string out;
  for (const auto& tok : sent.tokens) {
    out += tok.whitespace_before;
    out += tok.surface;
  }
  out += sent.trailing_whitespace;
  return out;
}

/// Detokenizes with `surfaces[i]` standing in for token i.
inline std::string detokenize_with(const TaggedSentence& sent,
                                   const std::vector<std::string>& surfaces) {
  std::string out;
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    out += sent.tokens[i].whitespace_before;
    out += surfaces[i];
  }
  out += sent.trailing_whitespace;
  return out;
}

inline std::vector<std::string> surfaces_of(const TaggedSentence& sent) {
  std::vector<std::string> out;
  out.reserve(sent.tokens.size());
  for (const auto& t : sent.tokens) out.push_back(t.surface);
  return out;
}

}  // namespace morpheus
