#pragma once

#include <boost/rational.hpp>

#include <charconv>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "tropbn/error.hpp"

namespace tropbn {

using Rational = boost::rational<std::int64_t>;

namespace detail {

inline std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw Error(ErrorCode::Parse, "malformed rational \"" + std::string(whole) + "\"");
  }
  return value;
}

}  // namespace detail

/// Parses "p/q" or a bare integer "p".
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(detail::parse_int(text, text));
  const std::int64_t num = detail::parse_int(text.substr(0, slash), text);
  const std::int64_t den = detail::parse_int(text.substr(slash + 1), text);
  if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in \"" + std::string(text) + "\"");
  return Rational(num, den);
}

/// Integers print without a denominator, everything else as "p/q".
inline std::string to_string(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

inline bool is_integer(const Rational& value) { return value.denominator() == 1; }

inline std::int64_t lcm_accumulate(std::int64_t acc, const Rational& value) {
  return std::lcm(acc, value.denominator());
}

}  // namespace tropbn
