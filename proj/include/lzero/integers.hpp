#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <tuple>

#include "lzero/errors.hpp"

namespace lzero {

/// Arbitrary-precision signed integer. All arithmetic in the library is
/// exact; fixed-width types are never used for matrix entries because
/// Smith-form pivoting grows entries exponentially.
using Int = boost::multiprecision::cpp_int;

inline Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

inline Int gcd_int(const Int& a, const Int& b) {
    return boost::multiprecision::gcd(a, b);
}

inline Int lcm_int(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::lcm(a, b);
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0.
inline std::tuple<Int, Int, Int> xgcd(Int a, Int b) {
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
        tmp = old_t - q * t; old_t = t; t = tmp;
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    return {old_r, old_s, old_t};
}

inline Int pow_int(const Int& base, long long e) {
    if (e < 0) throw internal_error("pow_int: negative exponent");
    Int r = 1, b = base;
    long long n = e;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

/// p-adic valuation of x; requires x != 0 and p >= 2.
inline long long valuation(Int x, const Int& p) {
    if (x == 0) throw internal_error("valuation of zero");
    long long v = 0;
    x = abs_int(x);
    while (x % p == 0) { x /= p; ++v; }
    return v;
}

/// Trial-division primality test; inputs here are small presentation primes.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (Int d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline std::string to_string(const Int& x) { return x.str(); }

}  // namespace lzero
