#ifndef NEWTON_MODULI_PARSE_HPP
#define NEWTON_MODULI_PARSE_HPP

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>

#include "core.hpp"

namespace newton_moduli {

namespace detail {

inline double parse_real(std::string_view s, const std::string& whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw domain_error("cannot parse complex number '" + whole + "' (expected a+bi)");
  return v;
}

}  // namespace detail

// accepts a, bi, a+bi, a-bi, i, -i
inline cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw domain_error("empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {detail::parse_real(s, text), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  else if (im == "-") im = "-1";
  return {re.empty() ? 0.0 : detail::parse_real(re, text), detail::parse_real(im, text)};
}

}  // namespace newton_moduli

#endif  // NEWTON_MODULI_PARSE_HPP
