#pragma once
// Independent test oracles. Everything here is deliberately naive --
// cofactor-free Bareiss determinants, bounded brute-force searches,
// element-by-element enumeration -- so that it shares no code path with
// the Smith-form machinery it is used to check.
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lzero/int_matrix.hpp"

namespace oracle {

using lzero::Int;
using lzero::IntMatrix;

// Fraction-free Gaussian elimination (Bareiss). Exact determinant.
inline Int det_bareiss(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw std::logic_error("det of non-square");
    long long n = a.rows();
    if (n == 0) return 1;
    IntMatrix m = a;
    Int prev = 1;
    Int sign = 1;
    for (long long k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            long long piv = -1;
            for (long long i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) { piv = i; break; }
            if (piv < 0) return 0;
            for (long long j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            sign = -sign;
        }
        for (long long i = k + 1; i < n; ++i)
            for (long long j = k + 1; j < n; ++j)
                m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

// gcd of all entries; this is d1 of the Smith form when nonzero.
inline Int entry_gcd(const IntMatrix& a) {
    Int g = 0;
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j) g = lzero::gcd_int(g, a.at(i, j));
    return g;
}

// Exhaustive search for an integer solution of A*x = b inside a box.
inline std::optional<std::vector<Int>> brute_solve(const IntMatrix& a, const std::vector<Int>& b,
                                                   long long box) {
    long long n = a.cols();
    std::vector<long long> x(static_cast<size_t>(n), -box);
    if (n == 0) {
        for (long long i = 0; i < a.rows(); ++i)
            if (b[static_cast<size_t>(i)] != 0) return std::nullopt;
        return std::vector<Int>{};
    }
    for (;;) {
        std::vector<Int> xv(x.begin(), x.end());
        if (mat_vec(a, xv) == b) return xv;
        long long k = 0;
        while (k < n && x[static_cast<size_t>(k)] == box) { x[static_cast<size_t>(k)] = -box; ++k; }
        if (k == n) return std::nullopt;
        ++x[static_cast<size_t>(k)];
    }
}

// All nonzero kernel vectors of A inside a box.
inline std::vector<std::vector<Int>> brute_kernel_vectors(const IntMatrix& a, long long box) {
    std::vector<std::vector<Int>> out;
    long long n = a.cols();
    if (n == 0) return out;
    std::vector<long long> x(static_cast<size_t>(n), -box);
    for (;;) {
        std::vector<Int> xv(x.begin(), x.end());
        bool nonzero = false;
        for (const Int& v : xv)
            if (v != 0) { nonzero = true; break; }
        if (nonzero) {
            std::vector<Int> img = mat_vec(a, xv);
            bool zero = true;
            for (const Int& v : img)
                if (v != 0) { zero = false; break; }
            if (zero) out.push_back(xv);
        }
        long long k = 0;
        while (k < n && x[static_cast<size_t>(k)] == box) { x[static_cast<size_t>(k)] = -box; ++k; }
        if (k == n) break;
        ++x[static_cast<size_t>(k)];
    }
    return out;
}

// Deterministic RNG for test reproducibility.
struct TestRng {
    std::mt19937_64 eng;
    explicit TestRng(uint64_t seed) : eng(seed) {}
    long long uniform(long long lo, long long hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo + 1);
        uint64_t lim = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % span;
        uint64_t r;
        do { r = eng(); } while (r >= lim);
        return lo + static_cast<long long>(r % span);
    }
};

inline IntMatrix random_matrix(TestRng& rng, long long rows, long long cols, long long bound) {
    IntMatrix m(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long j = 0; j < cols; ++j) m.at(i, j) = rng.uniform(-bound, bound);
    return m;
}

}  // namespace oracle
