#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace morpheus {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

enum class CasePattern { Lower, Title, Upper, Mixed };

/// Classifies ASCII letters only; bytes of multi-byte characters are ignored.
inline CasePattern case_pattern(std::string_view s) {
  int letters = 0, upper = 0;
  bool first_upper = false, rest_lower = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (!std::isalpha(c)) continue;
    const bool up = std::isupper(c) != 0;
    if (letters == 0) {
      first_upper = up;
    } else if (up) {
      rest_lower = false;
    }
    ++letters;
    upper += up ? 1 : 0;
  }
  if (upper == 0) return CasePattern::Lower;
  if (letters > 1 && upper == letters) return CasePattern::Upper;
  if (first_upper && rest_lower) return CasePattern::Title;
  return CasePattern::Mixed;
}

inline std::string apply_case(std::string_view lower, CasePattern pattern) {
  switch (pattern) {
    case CasePattern::Lower:
    case CasePattern::Mixed:
      return std::string(lower);
    case CasePattern::Upper:
      return to_upper(lower);
    case CasePattern::Title: {
      std::string out(lower);
      for (auto& ch : out) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalpha(c)) {
          ch = static_cast<char>(std::toupper(c));
          break;
        }
      }
      return out;
    }
  }
  return std::string(lower);
}

}  // namespace morpheus
