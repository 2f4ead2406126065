#pragma once
#include <cstdint>
#include <limits>
#include <random>

#include "lzero/fpmod.hpp"

namespace lzero {

/// Deterministic RNG wrapper. All sampled checks in the library and CLI
/// draw through this, so a fixed seed fixes every report byte.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}

    uint64_t next() { return eng(); }

    /// Uniform on [lo, hi], rejection-sampled so results do not depend on
    /// the standard library's distribution implementation.
    long long uniform(long long lo, long long hi) {
        if (lo > hi) throw internal_error("Rng::uniform: empty range");
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<long long>(next());
        uint64_t lim = std::numeric_limits<uint64_t>::max() -
                       std::numeric_limits<uint64_t>::max() % span;
        uint64_t r;
        do { r = next(); } while (r >= lim);
        return lo + static_cast<long long>(r % span);
    }
};

inline IntMatrix random_int_matrix(Rng& rng, long long rows, long long cols, long long bound) {
    IntMatrix m(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long j = 0; j < cols; ++j) m.at(i, j) = rng.uniform(-bound, bound);
    return m;
}

/// Product of random elementary row/column operations.
inline IntMatrix random_unimodular(Rng& rng, long long n, int ops = 12) {
    IntMatrix u = IntMatrix::identity(n);
    if (n < 1) return u;
    for (int t = 0; t < ops; ++t) {
        long long i = rng.uniform(0, n - 1), j = rng.uniform(0, n - 1);
        switch (rng.uniform(0, 2)) {
            case 0:
                if (i != j) detail::row_axpy(u, i, j, Int(rng.uniform(-2, 2)));
                break;
            case 1:
                if (i != j) detail::row_swap(u, i, j);
                break;
            default:
                detail::row_negate(u, i);
        }
    }
    return u;
}

inline FpModule random_module(Rng& rng, const Ring& ring, long long max_gens, long long max_rels,
                              long long bound) {
    long long g = rng.uniform(0, max_gens);
    long long k = rng.uniform(0, max_rels);
    return FpModule(ring, g, random_int_matrix(rng, g, k, bound));
}

/// Random finite abelian p-group presented over Z as diag(p^{a_1},...),
/// exponents ascending, 1 <= a_i <= max_exp.
inline FpModule random_p_group(Rng& rng, const Int& p, long long max_exp, long long max_gens) {
    long long g = rng.uniform(0, max_gens);
    std::vector<long long> exps(static_cast<size_t>(g));
    for (auto& e : exps) e = rng.uniform(1, max_exp);
    std::sort(exps.begin(), exps.end());
    std::vector<Int> diag;
    diag.reserve(exps.size());
    for (long long e : exps) diag.push_back(pow_int(p, e));
    return FpModule::diagonal(Ring::integers(), diag);
}

/// Uniform-ish well-defined morphism M -> N, drawn in the diagonalized
/// coordinates where the hom-set structure is explicit.
inline FpMorphism random_morphism(Rng& rng, const FpModule& m, const FpModule& n,
                                  long long free_bound = 3) {
    HomStructure h = hom_structure(m, n);
    IntMatrix canon(n.gens, m.gens);
    for (long long j = 0; j < n.gens; ++j)
        for (long long i = 0; i < m.gens; ++i) {
            const Int& mod = h.modulus.at(j, i);
            if (mod == 0) {
                canon.at(j, i) = rng.uniform(-free_bound, free_bound);
            } else if (mod > 1) {
                long long cap = mod.convert_to<long long>();
                canon.at(j, i) = Int(rng.uniform(0, cap - 1)) * h.step.at(j, i);
            }
        }
    return FpMorphism(m, n, h.dn.U_inv * canon * h.dm.U);
}

}  // namespace lzero
