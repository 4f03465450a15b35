#pragma once

// Task metrics: SQuAD exact match / F1, corpus BLEU (13a tokenization),
// chrF, and relative decrease.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morpheus/error.hpp"
#include "morpheus/text_case.hpp"

namespace morpheus {

enum class Metric { F1, EM, BLEU, CHRF, SCORE };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::F1: return "F1";
    case Metric::EM: return "EM";
    case Metric::BLEU: return "BLEU";
    case Metric::CHRF: return "CHRF";
    case Metric::SCORE: return "SCORE";
  }
  return "SCORE";
}

inline std::optional<Metric> parse_metric(std::string_view s) {
  const std::string u = to_upper(s);
  if (u == "F1") return Metric::F1;
  if (u == "EM") return Metric::EM;
  if (u == "BLEU") return Metric::BLEU;
  if (u == "CHRF") return Metric::CHRF;
  if (u == "SCORE" || u == "LOSS") return Metric::SCORE;
  return std::nullopt;
}

struct QaScore {
  double exact_match = 0.0;
  double f1 = 0.0;
};

struct CorpusScore {
  Metric metric = Metric::F1;
  double value = 0.0;
  std::size_t n_examples = 0;
};

// ---------------------------------------------------------------------------
// SQuAD

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace. Mirrors the official evaluation script.
inline std::string normalize_answer(std::string_view s) {
  std::string no_punct;
  no_punct.reserve(s.size());
  for (char c : to_lower(s)) {
    if (!std::ispunct(static_cast<unsigned char>(c))) no_punct.push_back(c);
  }
  std::istringstream words(no_punct);
  std::string w, out;
  while (words >> w) {
    if (w == "a" || w == "an" || w == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

inline std::vector<std::string> answer_tokens(std::string_view s) {
  std::istringstream in(normalize_answer(s));
  std::vector<std::string> toks;
  std::string w;
  while (in >> w) toks.push_back(w);
  return toks;
}

namespace detail {

inline double token_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) return pred == gold ? 1.0 : 0.0;
  std::unordered_map<std::string, int> counts;
  for (const auto& g : gold) ++counts[g];
  int same = 0;
  for (const auto& p : pred) {
    auto it = counts.find(p);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return 0.0;
  const double precision = static_cast<double>(same) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(same) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace detail

/// Best EM and F1 of `prediction` over the gold answers. Golds that normalize
/// to nothing are dropped; with none left the question counts as
/// unanswerable and only an empty prediction scores.
inline QaScore qa_score(std::string_view prediction, std::span<const std::string> gold_answers) {
  std::vector<std::string> golds;
  for (const auto& g : gold_answers) {
    if (!normalize_answer(g).empty()) golds.push_back(g);
  }
  if (golds.empty()) golds.emplace_back();
  const std::string pred_norm = normalize_answer(prediction);
  const auto pred_toks = answer_tokens(prediction);
  QaScore best;
  for (const auto& g : golds) {
    best.exact_match = std::max(best.exact_match, pred_norm == normalize_answer(g) ? 1.0 : 0.0);
    best.f1 = std::max(best.f1, detail::token_f1(pred_toks, answer_tokens(g)));
  }
  return best;
}

inline QaScore qa_score(std::string_view prediction, std::initializer_list<std::string> golds) {
  const std::vector<std::string> v(golds);
  return qa_score(prediction, std::span<const std::string>(v));
}

// ---------------------------------------------------------------------------
// BLEU

/// mteval-v13a tokenization as used by WMT scoring.
inline std::string tokenize_13a(std::string_view line) {
  std::string s(line);
  auto replace_all = [&s](std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
      s.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("<skipped>", "");
  replace_all("-\n", "");
  replace_all("\n", " ");
  if (s.find('&') != std::string::npos) {
    replace_all("&quot;", "\"");
    replace_all("&amp;", "&");
    replace_all("&lt;", "<");
    replace_all("&gt;", ">");
  }
  s = " " + s + " ";
  static const std::regex kPunct(R"(([\{-\~\[-\` -\&\(-\+\:-\@\/]))");
  static const std::regex kPeriodCommaAfterNonDigit(R"(([^0-9])([\.,]))");
  static const std::regex kPeriodCommaBeforeNonDigit(R"(([\.,])([^0-9]))");
  static const std::regex kDashAfterDigit(R"(([0-9])(-))");
  s = std::regex_replace(s, kPunct, " $1 ");
  s = std::regex_replace(s, kPeriodCommaAfterNonDigit, "$1 $2 ");
  s = std::regex_replace(s, kPeriodCommaBeforeNonDigit, " $1 $2");
  s = std::regex_replace(s, kDashAfterDigit, "$1 $2 ");
  std::istringstream in(s);
  std::string w, out;
  while (in >> w) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

enum class BleuSmoothing { None, Floor };

/// Sufficient statistics for corpus BLEU-4.
struct BleuStats {
  std::size_t sys_len = 0;
  std::size_t ref_len = 0;
  std::array<std::size_t, 4> correct{};
  std::array<std::size_t, 4> total{};

  BleuStats& operator+=(const BleuStats& o) {
    sys_len += o.sys_len;
    ref_len += o.ref_len;
    for (std::size_t n = 0; n < 4; ++n) {
      correct[n] += o.correct[n];
      total[n] += o.total[n];
    }
    return *this;
  }
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline std::map<std::vector<std::string>, std::size_t> word_ngrams(
    const std::vector<std::string>& toks, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                   toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

inline std::string rstrip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace detail

inline BleuStats bleu_stats(std::string_view candidate, std::string_view reference) {
  const auto hyp = detail::split_ws(tokenize_13a(detail::rstrip(candidate)));
  const auto ref = detail::split_ws(tokenize_13a(detail::rstrip(reference)));
  BleuStats st;
  st.sys_len = hyp.size();
  st.ref_len = ref.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto h = detail::word_ngrams(hyp, n);
    const auto r = detail::word_ngrams(ref, n);
    for (const auto& [gram, count] : h) {
      st.total[n - 1] += count;
      if (auto it = r.find(gram); it != r.end()) st.correct[n - 1] += std::min(count, it->second);
    }
  }
  return st;
}

/// BLEU in [0,100] from aggregated statistics. With `effective_order`, orders
/// the hypothesis cannot reach are left out (sentence-level use).
inline double bleu_from_stats(const BleuStats& st, BleuSmoothing smoothing = BleuSmoothing::None,
                              double floor_value = 0.1, bool effective_order = false) {
  double bp = 1.0;
  if (st.sys_len < st.ref_len) {
    bp = st.sys_len > 0 ? std::exp(1.0 - static_cast<double>(st.ref_len) /
                                             static_cast<double>(st.sys_len))
                        : 0.0;
  }
  if (std::all_of(st.correct.begin(), st.correct.end(), [](auto c) { return c == 0; })) return 0.0;
  std::array<double, 4> precisions{};
  std::size_t eff_order = 4;
  for (std::size_t n = 0; n < 4; ++n) {
    if (st.total[n] == 0) break;
    if (effective_order) eff_order = n + 1;
    if (st.correct[n] == 0) {
      if (smoothing == BleuSmoothing::Floor) {
        precisions[n] = 100.0 * floor_value / static_cast<double>(st.total[n]);
      }
    } else {
      precisions[n] = 100.0 * static_cast<double>(st.correct[n]) / static_cast<double>(st.total[n]);
    }
  }
  double log_sum = 0.0;
  for (std::size_t n = 0; n < eff_order; ++n) {
    log_sum += precisions[n] > 0.0 ? std::log(precisions[n]) : -9999999999.0;
  }
  return bp * std::exp(log_sum / static_cast<double>(eff_order));
}

/// Corpus-level BLEU-4 with one reference per candidate, in [0,100].
inline double bleu(std::span<const std::string> candidates, std::span<const std::string> references,
                   BleuSmoothing smoothing = BleuSmoothing::None) {
  if (candidates.empty()) throw std::invalid_argument("bleu: empty corpus");
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("bleu: candidate and reference counts differ");
  }
  BleuStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) total += bleu_stats(candidates[i], references[i]);
  return bleu_from_stats(total, smoothing);
}

/// Floor-smoothed sentence BLEU with effective order; usable as a
/// per-candidate objective.
inline double sentence_bleu(std::string_view candidate, std::string_view reference) {
  return bleu_from_stats(bleu_stats(candidate, reference), BleuSmoothing::Floor, 0.1, true);
}

// ---------------------------------------------------------------------------
// chrF

/// Per-order [hyp, ref, match] character n-gram counts, n = 1..6.
struct ChrfStats {
  static constexpr std::size_t kOrder = 6;
  std::array<std::size_t, 3 * kOrder> counts{};

  ChrfStats& operator+=(const ChrfStats& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    return *this;
  }
};

namespace detail {

/// Code points of `s` with all whitespace removed.
inline std::u32string chrf_chars(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    char32_t cp = c;
    std::size_t len = 1;
    if (c >= 0xF0 && i + 3 < s.size()) {
      cp = ((c & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
           ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
      len = 4;
    } else if (c >= 0xE0 && i + 2 < s.size()) {
      cp = ((c & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
      len = 3;
    } else if (c >= 0xC0 && i + 1 < s.size()) {
      cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
      len = 2;
    }
    i += len;
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' || cp == U'\f' ||
        cp == 0x85 || cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
        cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000 ||
        (cp >= 0x1C && cp <= 0x1F)) {
      continue;
    }
    out.push_back(cp);
  }
  return out;
}

inline std::map<std::u32string, std::size_t> char_ngrams(const std::u32string& s, std::size_t n) {
  std::map<std::u32string, std::size_t> out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[s.substr(i, n)];
  return out;
}

}  // namespace detail

inline ChrfStats chrf_stats(std::string_view candidate, std::string_view reference) {
  const auto hyp = detail::chrf_chars(candidate);
  const auto ref = detail::chrf_chars(reference);
  ChrfStats st;
  for (std::size_t n = 1; n <= ChrfStats::kOrder; ++n) {
    const auto h = detail::char_ngrams(hyp, n);
    const auto r = detail::char_ngrams(ref, n);
    std::size_t hyp_count = 0, ref_count = 0, match = 0;
    for (const auto& [g, c] : h) {
      hyp_count += c;
      if (auto it = r.find(g); it != r.end()) match += std::min(c, it->second);
    }
    for (const auto& [g, c] : r) ref_count += c;
    auto* slot = &st.counts[3 * (n - 1)];
    slot[0] = r.empty() ? 0 : hyp_count;  // no hits credited without a reference n-gram
    slot[1] = ref_count;
    slot[2] = match;
  }
  return st;
}

/// chrF (beta = 2) in [0,100]: precision and recall averaged over the
/// n-gram orders both sides actually have.
inline double chrf_from_stats(const ChrfStats& st, double beta = 2.0) {
  constexpr double eps = 1e-16;
  const double factor = beta * beta;
  double avg_prec = 0.0, avg_rec = 0.0;
  std::size_t effective = 0;
  for (std::size_t n = 0; n < ChrfStats::kOrder; ++n) {
    const auto hyp = st.counts[3 * n], ref = st.counts[3 * n + 1], match = st.counts[3 * n + 2];
    const double prec = hyp > 0 ? static_cast<double>(match) / static_cast<double>(hyp) : eps;
    const double rec = ref > 0 ? static_cast<double>(match) / static_cast<double>(ref) : eps;
    if (hyp > 0 && ref > 0) {
      avg_prec += prec;
      avg_rec += rec;
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  avg_prec /= static_cast<double>(effective);
  avg_rec /= static_cast<double>(effective);
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100.0 * (1 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec);
}

inline double chrf(std::span<const std::string> candidates, std::span<const std::string> references) {
  if (candidates.empty()) throw std::invalid_argument("chrf: empty corpus");
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("chrf: candidate and reference counts differ");
  }
  ChrfStats total;
  for (std::size_t i = 0; i < candidates.size(); ++i) total += chrf_stats(candidates[i], references[i]);
  return chrf_from_stats(total);
}

inline double sentence_chrf(std::string_view candidate, std::string_view reference) {
  return chrf_from_stats(chrf_stats(candidate, reference));
}

// ---------------------------------------------------------------------------

/// (original - adversarial) / original. Undefined for a zero original score.
inline double relative_decrease(double score_original, double score_adversarial) {
  if (score_original == 0.0) {
    throw std::domain_error("relative_decrease: original score is zero");
  }
  return (score_original - score_adversarial) / score_original;
}

}  // namespace morpheus
