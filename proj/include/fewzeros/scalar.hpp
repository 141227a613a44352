#pragma once

// Scalar support shared by the exact (rational) and float code paths.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fewzeros {

using Rational = boost::multiprecision::mpq_rational;

template <class T>
using Vec = std::vector<T>;

enum class GeometryMode { exact, floating };

inline const char* to_string(GeometryMode mode) {
    return mode == GeometryMode::exact ? "exact" : "float";
}

/// Per-scalar tolerances used by the simplex and by vertex decisions.
/// The rational specialisation is exact: every tolerance is zero.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static double pivot_eps() { return 1e-11; }
    static double vertex_tol() { return 1e-9; }
    static double from_rational(const Rational& q) { return q.convert_to<double>(); }
    static double from_double(double x) { return x; }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static Rational pivot_eps() { return Rational(0); }
    static Rational vertex_tol() { return Rational(0); }
    static Rational from_rational(const Rational& q) { return q; }
    // Every finite double is a dyadic rational; the conversion is exact.
    static Rational from_double(double x) {
        if (!std::isfinite(x)) throw std::domain_error("non-finite value cannot be made rational");
        return Rational(x);
    }
};

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Base-10 integer with optional sign; rejects anything else (mpz alone would
/// accept "0x1f" and read "010" as octal).
inline bool parse_decimal_integer(std::string_view text, boost::multiprecision::mpz_int& out) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    if (i == text.size()) return false;
    for (std::size_t j = i; j < text.size(); ++j)
        if (text[j] < '0' || text[j] > '9') return false;
    while (i + 1 < text.size() && text[i] == '0') ++i;
    out = boost::multiprecision::mpz_int(std::string(text.substr(i)));
    if (negative) out = -out;
    return true;
}

/// Parses "p/q", an integer, or a plain decimal ("-0.125", "3e-2") into an exact rational.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    auto trim = [](std::string& v) {
        const auto b = v.find_first_not_of(" \t");
        const auto e = v.find_last_not_of(" \t");
        v = (b == std::string::npos) ? std::string() : v.substr(b, e - b + 1);
    };
    trim(s);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    if (const auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        trim(num);
        trim(den);
        boost::multiprecision::mpz_int p, q;
        if (!parse_decimal_integer(num, p) || !parse_decimal_integer(den, q))
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        if (q == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return Rational(p, q);
    }

    // decimal: [sign] digits [. digits] [e|E [sign] digits]
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
    std::string digits;
    int scale = 0;
    bool seen_point = false, any_digit = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
        const char c = s[i];
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) --scale;
        } else {
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        }
    }
    if (!any_digit) throw std::invalid_argument("malformed rational literal '" + s + "'");
    if (i < s.size()) {
        const std::string exp_part = s.substr(i + 1);
        try {
            std::size_t used = 0;
            scale += std::stoi(exp_part, &used);
            if (used != exp_part.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed exponent in '" + s + "'");
        }
    }
    // no leading zeros: mpz would read "075" as octal
    const auto nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    boost::multiprecision::mpz_int mantissa(digits);
    if (negative) mantissa = -mantissa;
    boost::multiprecision::mpz_int ten_pow = boost::multiprecision::pow(
        boost::multiprecision::mpz_int(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
    return scale < 0 ? Rational(mantissa, ten_pow) : Rational(mantissa * ten_pow);
}

/// Canonical text: "p" for integers, "p/q" otherwise.
inline std::string format_rational(const Rational& q) {
    if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

}  // namespace fewzeros
