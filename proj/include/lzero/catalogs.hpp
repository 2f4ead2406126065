#pragma once
#include <functional>
#include <vector>

#include "lzero/fpmod.hpp"

namespace lzero {

/// Ascending invariant-factor chains d1 | d2 | ... with product n; one
/// chain per isomorphism class of abelian groups of order n.
inline void invariant_chains(const Int& n, const Int& prev, std::vector<Int>& cur,
                             std::vector<std::vector<Int>>& out) {
    if (n == 1) {
        out.push_back(cur);
        return;
    }
    for (Int d = 2; d <= n; ++d) {
        if (n % d != 0) continue;
        if (prev > 1 && d % prev != 0) continue;
        if (d < prev) continue;
        cur.push_back(d);
        invariant_chains(n / d, d, cur, out);
        cur.pop_back();
    }
}

/// Every isomorphism class of finite abelian groups of order <= max_order,
/// presented diagonally over the given ring (entries must be valid over
/// that ring; callers restrict max_order accordingly).
inline std::vector<FpModule> abelian_catalog(const Ring& ring, long long max_order) {
    std::vector<FpModule> out;
    out.push_back(FpModule::zero(ring));
    for (long long n = 2; n <= max_order; ++n) {
        std::vector<std::vector<Int>> chains;
        std::vector<Int> cur;
        invariant_chains(Int(n), 1, cur, chains);
        for (auto& c : chains) {
            if (ring.kind == RingKind::ModPrimePower) {
                bool valid = true;
                Int full = pow_int(ring.p, ring.n);
                for (const Int& d : c)
                    if (full % d != 0) valid = false;
                if (!valid) continue;
            }
            out.push_back(FpModule::diagonal(ring, c));
        }
    }
    return out;
}

/// Every abelian p-group of order <= max_order (over Z, diagonal
/// presentations with ascending p-power factors).
inline std::vector<FpModule> p_group_catalog(const Int& p, long long max_order) {
    std::vector<FpModule> out;
    out.push_back(FpModule::zero(Ring::integers()));
    std::vector<std::vector<long long>> shapes;
    std::vector<long long> cur;
    // ascending exponent tuples with p^(sum) <= max_order
    long long budget = 0;
    Int power = 1;
    while (power * p <= max_order) { power *= p; ++budget; }
    std::function<void(long long, long long)> rec = [&](long long minexp, long long left) {
        for (long long e = minexp; e <= left; ++e) {
            cur.push_back(e);
            shapes.push_back(cur);
            rec(e, left - e);
            cur.pop_back();
        }
    };
    rec(1, budget);
    for (const auto& sh : shapes) {
        std::vector<Int> diag;
        for (long long e : sh) diag.push_back(pow_int(p, e));
        out.push_back(FpModule::diagonal(Ring::integers(), diag));
    }
    return out;
}

}  // namespace lzero
