#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mdlnn {

// Signed fraction sign * num / den. This is the genotype's parameter type:
// num/den are kept exactly as written (2/4 and 1/2 are different genotypes
// with different encoding costs), so no gcd reduction happens on storage.
// Arithmetic helpers (used by the exact reference-net evaluator) do reduce
// their results.
struct Rational {
    int sign = +1;       // +1 or -1; canonically +1 when num == 0
    uint64_t num = 0;
    uint64_t den = 1;

    Rational() = default;
    Rational(int s, uint64_t n, uint64_t d) : sign(s), num(n), den(d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (s != 1 && s != -1) throw std::invalid_argument("Rational: sign must be +1 or -1");
        if (num == 0) sign = +1;
    }

    static Rational of(int64_t n, int64_t d = 1) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        int s = +1;
        if (n < 0) { s = -s; n = -n; }
        if (d < 0) { s = -s; d = -d; }
        return Rational(s, static_cast<uint64_t>(n), static_cast<uint64_t>(d));
    }

    double value() const {
        return static_cast<double>(sign) * static_cast<double>(num) / static_cast<double>(den);
    }

    bool is_zero() const { return num == 0; }

    Rational reduced() const {
        uint64_t g = std::gcd(num, den);
        if (g == 0) g = 1;
        return Rational(sign, num / g, den / g);
    }

    Rational negated() const { return num == 0 ? *this : Rational(-sign, num, den); }

    // Field-wise equality: the genotype distinguishes 1/2 from 2/4.
    bool operator==(const Rational& o) const {
        return sign == o.sign && num == o.num && den == o.den;
    }
    bool operator!=(const Rational& o) const { return !(*this == o); }

    std::string str() const {
        return std::string(sign < 0 ? "-" : "+") + std::to_string(num) + "/" + std::to_string(den);
    }

    // Parses "+n/d", "-n/d", "n/d", or a bare integer.
    static Rational parse(const std::string& text) {
        if (text.empty()) throw std::invalid_argument("Rational::parse: empty string");
        size_t pos = 0;
        int s = +1;
        if (text[pos] == '+') ++pos;
        else if (text[pos] == '-') { s = -1; ++pos; }
        size_t slash = text.find('/', pos);
        uint64_t n = 0, d = 1;
        try {
            if (slash == std::string::npos) {
                n = std::stoull(text.substr(pos));
            } else {
                n = std::stoull(text.substr(pos, slash - pos));
                d = std::stoull(text.substr(slash + 1));
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("Rational::parse: malformed fraction \"" + text + "\"");
        }
        if (d == 0) throw std::invalid_argument("Rational::parse: zero denominator in \"" + text + "\"");
        return Rational(s, n, d);
    }
};

// Exact arithmetic on reduced values. Intermediate products go through
// __int128 so small-fraction chains (all the reference nets) cannot overflow.
namespace ratops {

inline Rational make_reduced(__int128 n, __int128 d) {
    if (d == 0) throw std::overflow_error("rational: zero denominator");
    int sign = +1;
    if (n < 0) { sign = -sign; n = -n; }
    if (d < 0) { sign = -sign; d = -d; }
    __int128 a = n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }  // gcd
    if (a == 0) a = 1;
    n /= a; d /= a;
    if (n > UINT64_MAX || d > UINT64_MAX)
        throw std::overflow_error("rational: value exceeds 64-bit range");
    return Rational(sign, static_cast<uint64_t>(n), static_cast<uint64_t>(d));
}

inline Rational add(const Rational& x, const Rational& y) {
    __int128 xn = static_cast<__int128>(x.num) * x.sign;
    __int128 yn = static_cast<__int128>(y.num) * y.sign;
    return make_reduced(xn * static_cast<__int128>(y.den) + yn * static_cast<__int128>(x.den),
                        static_cast<__int128>(x.den) * y.den);
}

inline Rational mul(const Rational& x, const Rational& y) {
    __int128 n = static_cast<__int128>(x.num) * y.num * (x.sign * y.sign);
    return make_reduced(n, static_cast<__int128>(x.den) * y.den);
}

inline int cmp(const Rational& x, const Rational& y) {
    __int128 lhs = static_cast<__int128>(x.num) * x.sign * y.den;
    __int128 rhs = static_cast<__int128>(y.num) * y.sign * x.den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

// Largest integer <= x, as a rational.
inline Rational floor(const Rational& x) {
    __int128 n = static_cast<__int128>(x.num) * x.sign;
    __int128 d = x.den;
    __int128 q = n / d;
    if (n % d != 0 && n < 0) --q;
    return make_reduced(q, 1);
}

}  // namespace ratops
}  // namespace mdlnn
