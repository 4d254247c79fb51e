#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace crn {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;
using RationalVector = std::vector<Rational>;

inline bool is_integer(const Rational& q) {
    return boost::multiprecision::denominator(q) == 1;
}

/// "p/q", or "p" when q == 1.
inline std::string to_fraction_string(const Rational& q) {
    if (is_integer(q)) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" +
           boost::multiprecision::denominator(q).str();
}

namespace detail {

inline bool terminates_in_decimal(Integer den) {
    while (den % 2 == 0) den /= 2;
    while (den % 5 == 0) den /= 5;
    return den == 1;
}

/// Decimal expansion of |q| truncated after `max_frac` fractional digits.
inline std::string decimal_digits(const Rational& q, std::size_t max_frac) {
    Integer num = boost::multiprecision::numerator(q);
    const Integer den = boost::multiprecision::denominator(q);
    std::string out;
    if (num < 0) {
        out.push_back('-');
        num = -num;
    }
    Integer whole = num / den;
    Integer rem = num % den;
    out += whole.str();
    if (rem == 0) return out;
    out.push_back('.');
    for (std::size_t i = 0; i < max_frac && rem != 0; ++i) {
        rem *= 10;
        out.push_back(static_cast<char>('0' + static_cast<int>(rem / den)));
        rem %= den;
    }
    return out;
}

}  // namespace detail

/// Exact decimal text when the expansion terminates, otherwise nullopt.
inline std::optional<std::string> to_exact_decimal(const Rational& q) {
    if (!detail::terminates_in_decimal(boost::multiprecision::denominator(q))) return std::nullopt;
    return detail::decimal_digits(q, std::numeric_limits<std::size_t>::max());
}

/// Canonical text: exact decimal if it terminates, "p/q" otherwise.
inline std::string to_string(const Rational& q) {
    if (auto dec = to_exact_decimal(q)) return *dec;
    return to_fraction_string(q);
}

/// Deterministic conversion. Terminating values go through the exact
/// decimal text and std::from_chars, so they are correctly rounded.
inline double to_double(const Rational& q) {
    std::string text;
    if (auto dec = to_exact_decimal(q)) {
        text = std::move(*dec);
    } else {
        // 40 significant digits is well past double precision.
        text = detail::decimal_digits(q, 60);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range) {
        return static_cast<double>(q.convert_to<long double>());
    }
    return value;
}

/// Parses "12", "0.25", "1.5e-3", "3/4" exactly. Leading sign allowed when
/// `allow_sign`. Returns nullopt on malformed text.
inline std::optional<Rational> parse_rational(std::string_view text, bool allow_sign = true) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '+' || text[0] == '-') {
        if (!allow_sign) return std::nullopt;
        negative = text[0] == '-';
        pos = 1;
    }
    // cpp_int reads a leading 0 as an octal prefix.
    auto integer = [](std::string_view digits) {
        const auto nz = digits.find_first_not_of('0');
        return nz == std::string_view::npos ? Integer(0) : Integer(std::string(digits.substr(nz)));
    };
    auto digits_at = [&](std::size_t from) {
        std::size_t end = from;
        while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
        return end;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::size_t num_end = digits_at(pos);
        if (num_end == pos || num_end != slash) return std::nullopt;
        std::size_t den_end = digits_at(slash + 1);
        if (den_end == slash + 1 || den_end != text.size()) return std::nullopt;
        Integer num = integer(text.substr(pos, num_end - pos));
        Integer den = integer(text.substr(slash + 1, den_end - slash - 1));
        if (den == 0) return std::nullopt;
        Rational q(num, den);
        return negative ? Rational(-q) : q;
    }

    std::size_t int_end = digits_at(pos);
    std::string mantissa(text.substr(pos, int_end - pos));
    std::size_t frac_digits = 0;
    std::size_t cursor = int_end;
    if (cursor < text.size() && text[cursor] == '.') {
        std::size_t frac_end = digits_at(cursor + 1);
        frac_digits = frac_end - cursor - 1;
        mantissa += std::string(text.substr(cursor + 1, frac_digits));
        cursor = frac_end;
    }
    if (mantissa.empty()) return std::nullopt;
    long exponent = 0;
    if (cursor < text.size() && (text[cursor] == 'e' || text[cursor] == 'E')) {
        ++cursor;
        bool exp_negative = false;
        if (cursor < text.size() && (text[cursor] == '+' || text[cursor] == '-')) {
            exp_negative = text[cursor] == '-';
            ++cursor;
        }
        std::size_t exp_end = digits_at(cursor);
        if (exp_end == cursor || exp_end - cursor > 6) return std::nullopt;
        exponent = std::stol(std::string(text.substr(cursor, exp_end - cursor)));
        if (exp_negative) exponent = -exponent;
        cursor = exp_end;
    }
    if (cursor != text.size()) return std::nullopt;

    exponent -= static_cast<long>(frac_digits);
    Rational q(integer(mantissa));
    if (exponent > 0) {
        q *= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exponent)));
    } else if (exponent < 0) {
        q /= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(-exponent)));
    }
    return negative ? Rational(-q) : q;
}

/// Exact rational value of the shortest decimal that round-trips `x`.
inline Rational rational_from_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return *parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    Rational sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0 && b[i] != 0) sum += a[i] * b[i];
    }
    return sum;
}

inline RationalVector operator-(const RationalVector& a, const RationalVector& b) {
    RationalVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline Rational l1_norm(const RationalVector& v) {
    Rational sum = 0;
    for (const auto& x : v) sum += abs(x);
    return sum;
}

inline bool is_zero(const RationalVector& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

}  // namespace crn
