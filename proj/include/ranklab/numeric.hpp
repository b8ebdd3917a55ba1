#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "ranklab/error.hpp"

namespace ranklab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

inline std::string to_string(const BigInt& v) { return v.str(); }

/// "p/q" in lowest terms, or "p" when the denominator is one.
inline std::string to_string(const Rational& v) {
    const BigInt& den = boost::multiprecision::denominator(v);
    if (den == 1) return boost::multiprecision::numerator(v).str();
    return boost::multiprecision::numerator(v).str() + "/" + den.str();
}

inline BigInt parse_bigint(std::string_view text) {
    std::string s(text);
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start) throw Error(ErrorCode::invalid_spec, "empty integer");
    for (std::size_t i = start; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9')
            throw Error(ErrorCode::invalid_spec, "malformed integer '" + s + "'");
    return BigInt(s);
}

/// Accepts "p", "p/q" and terminating decimals such as "0.25"; all exact.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt num = parse_bigint(s.substr(0, slash));
        BigInt den = parse_bigint(s.substr(slash + 1));
        if (den == 0) throw Error(ErrorCode::invalid_spec, "zero denominator in '" + s + "'");
        return Rational(num, den);
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        if (whole.empty() || whole == "-" || whole == "+") whole += "0";
        if (frac.empty()) throw Error(ErrorCode::invalid_spec, "malformed rational '" + s + "'");
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
        BigInt w = parse_bigint(whole);
        BigInt f = parse_bigint(frac);
        BigInt num = (w < 0 ? -w : w) * scale + f;
        if (negative) num = -num;
        return Rational(num, scale);
    }
    return Rational(parse_bigint(s));
}

inline BigInt ipow(const BigInt& base, std::uint64_t exp) {
    BigInt result = 1;
    BigInt b = base;
    while (exp) {
        if (exp & 1) result *= b;
        exp >>= 1;
        if (exp) b *= b;
    }
    return result;
}

/// Largest x with x^n <= value, for value >= 0 and n >= 1.
inline BigInt floor_root(const BigInt& value, std::uint64_t n) {
    if (value < 0) throw Error(ErrorCode::invalid_spec, "root of a negative integer");
    if (n == 1 || value < 2) return value;
    // Binary search between 2^(floor(bits/n)) and 2^(floor(bits/n)+1).
    std::size_t bits = boost::multiprecision::msb(value) + 1;
    BigInt lo = BigInt(1) << ((bits - 1) / n);
    BigInt hi = BigInt(1) << ((bits - 1) / n + 1);
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) >> 1;
        if (ipow(mid, n) <= value)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// floor(base^exponent) for base >= 1 and a nonnegative rational exponent.
inline BigInt floor_pow(const BigInt& base, const Rational& exponent) {
    if (exponent < 0) throw Error(ErrorCode::invalid_spec, "negative exponent in floor_pow");
    const BigInt& p = boost::multiprecision::numerator(exponent);
    const BigInt& q = boost::multiprecision::denominator(exponent);
    if (p > BigInt(1u << 20) || q > BigInt(1u << 20))
        throw Error(ErrorCode::too_large, "exponent " + to_string(exponent) + " too large for exact evaluation");
    return floor_root(ipow(base, static_cast<std::uint64_t>(p)), static_cast<std::uint64_t>(q));
}

inline BigInt factorial(std::uint64_t n) {
    BigInt r = 1;
    for (std::uint64_t i = 2; i <= n; ++i) r *= i;
    return r;
}

inline std::uint64_t to_u64(const BigInt& v, const char* what) {
    if (v < 0 || v > BigInt(std::numeric_limits<std::uint64_t>::max()))
        throw Error(ErrorCode::too_large, std::string(what) + " does not fit in 64 bits");
    return static_cast<std::uint64_t>(v);
}

}  // namespace ranklab
