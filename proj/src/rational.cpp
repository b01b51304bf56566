#include "sps/rational.hpp"

#include "sps/errors.hpp"

#include <cctype>
#include <charconv>

namespace sps {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// GMP reads a leading zero as an octal prefix.
Integer decimal_integer(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  return first == std::string_view::npos ? Integer(0) : Integer{std::string(digits.substr(first))};
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ParseError("not a number: \"" + std::string(whole) + "\"");
  const Integer value = decimal_integer(s);
  return negative ? Integer(-value) : value;
}

Integer pow10(long exponent) {
  Integer result = 1;
  for (long k = 0; k < exponent; ++k) result *= 10;
  return result;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || exp_text.empty())
      throw ParseError("bad exponent in \"" + std::string(whole) + "\"");
    s = s.substr(0, e);
  }

  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw ParseError("empty number: \"" + std::string(whole) + "\"");
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
    throw ParseError("not a number: \"" + std::string(whole) + "\"");

  std::string digits = std::string(int_part) + std::string(frac_part);
  const Integer numerator = decimal_integer(digits);
  long scale = static_cast<long>(frac_part.size()) - exponent;
  Rational value = scale >= 0 ? Rational(numerator, pow10(scale)) : Rational(numerator * pow10(-scale));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty entry");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer p = parse_integer(s.substr(0, slash), text);
    Integer q = parse_integer(s.substr(slash + 1), text);
    if (q == 0) throw ParseError("zero denominator in \"" + std::string(text) + "\"");
    return Rational(p, q);
  }
  return parse_decimal(s, text);
}

std::string to_string(const Rational& value) {
  return value.str();
}

}  // namespace sps
