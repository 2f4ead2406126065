#pragma once
#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "lzero/int_matrix.hpp"

namespace lzero {

enum class RingKind { Integers, ModPrimePower, PAdic };

/// Base ring of a module category: Z, Z/p^N, or the p-adic integers
/// (symbolically: finitely generated Z_p-modules are finite data).
struct Ring {
    RingKind kind = RingKind::Integers;
    Int p = 0;
    long long n = 0;  // exponent N for Z/p^N

    static Ring integers() { return Ring{}; }

    static Ring mod_prime_power(Int p, long long n) {
        if (!is_prime(p)) throw malformed_input("Z/p^N requires prime p, got " + p.str());
        if (n < 1) throw malformed_input("Z/p^N requires N >= 1");
        return Ring{RingKind::ModPrimePower, std::move(p), n};
    }

    static Ring p_adic(Int p) {
        if (!is_prime(p)) throw malformed_input("Z_p requires prime p, got " + p.str());
        return Ring{RingKind::PAdic, std::move(p), 0};
    }

    bool operator==(const Ring& o) const { return kind == o.kind && p == o.p && n == o.n; }
    bool operator!=(const Ring& o) const { return !(*this == o); }

    std::string str() const {
        switch (kind) {
            case RingKind::Integers: return "Z";
            case RingKind::ModPrimePower: return "Z/" + p.str() + "^" + std::to_string(n);
            case RingKind::PAdic: return "Z_" + p.str();
        }
        return "?";
    }
};

/// Finitely presented module: generators and a relation matrix whose
/// columns are relation vectors. Over Z/p^N the relations p^N e_i are
/// implicit and never materialized. Modules over Z_p are kept in canonical
/// form: free generators first, then torsion generators with ascending
/// p-power exponents and a diagonal relation matrix.
struct FpModule {
    Ring ring;
    long long gens = 0;
    IntMatrix rels;  // gens rows; one column per relation

    FpModule() : rels(0, 0) {}
    FpModule(Ring r, long long g, IntMatrix relations)
        : ring(std::move(r)), gens(g), rels(std::move(relations)) {
        if (gens < 0) throw malformed_input("negative generator count");
        if (rels.rows() != gens) throw malformed_input("relation matrix must have one row per generator");
        if (ring.kind == RingKind::PAdic) check_padic_canonical();
    }

    static FpModule zero(Ring r) { return FpModule(std::move(r), 0, IntMatrix(0, 0)); }

    static FpModule free_module(Ring r, long long rank) {
        return FpModule(std::move(r), rank, IntMatrix(rank, 0));
    }

    /// Cyclic module Z/n (n = 0 gives Z) over the integers, or the
    /// analogous one-generator module over another base ring.
    static FpModule cyclic(Ring r, const Int& n) {
        if (n == 0) return free_module(std::move(r), 1);
        IntMatrix rel(1, 1);
        rel.at(0, 0) = n;
        return FpModule(std::move(r), 1, std::move(rel));
    }

    /// Direct sum of cyclics diag(d1, ..., dk); di = 0 stands for Z.
    static FpModule diagonal(Ring r, const std::vector<Int>& d) {
        long long g = static_cast<long long>(d.size());
        long long k = 0;
        for (const Int& x : d)
            if (x != 0) ++k;
        IntMatrix rel(g, k);
        long long c = 0;
        for (long long i = 0; i < g; ++i)
            if (d[static_cast<size_t>(i)] != 0) rel.at(i, c++) = d[static_cast<size_t>(i)];
        return FpModule(std::move(r), g, std::move(rel));
    }

    /// Canonical Z_p-module with the given free rank and ascending torsion
    /// exponents (each >= 1).
    static FpModule padic(const Int& p, long long free_rank, const std::vector<long long>& exponents) {
        Ring r = Ring::p_adic(p);
        long long k = static_cast<long long>(exponents.size());
        IntMatrix rel(free_rank + k, k);
        for (long long i = 0; i < k; ++i) {
            long long e = exponents[static_cast<size_t>(i)];
            if (e < 1) throw malformed_input("Z_p torsion exponent must be >= 1");
            if (i > 0 && e < exponents[static_cast<size_t>(i - 1)])
                throw malformed_input("Z_p torsion exponents must be ascending");
            rel.at(free_rank + i, i) = pow_int(p, e);
        }
        return FpModule(std::move(r), free_rank + k, std::move(rel));
    }

    bool operator==(const FpModule& o) const {
        return ring == o.ring && gens == o.gens && rels == o.rels;
    }
    bool operator!=(const FpModule& o) const { return !(*this == o); }

    long long padic_free_rank() const { return gens - rels.cols(); }

  private:
    void check_padic_canonical() const {
        long long k = rels.cols(), r = gens - k;
        if (r < 0) throw malformed_input("Z_p module is not in canonical form");
        Int prev = 0;
        for (long long j = 0; j < k; ++j) {
            for (long long i = 0; i < gens; ++i) {
                const Int& x = rels.at(i, j);
                if (i == r + j) {
                    if (x <= 1 || x % ring.p != 0 || pow_int(ring.p, valuation(x, ring.p)) != x)
                        throw malformed_input("Z_p relations must be p-power diagonal");
                    if (prev != 0 && x < prev) throw malformed_input("Z_p exponents must ascend");
                    prev = x;
                } else if (x != 0) {
                    throw malformed_input("Z_p module is not in canonical form");
                }
            }
        }
    }
};

/// Relation columns including the base ring's implicit ones. For canonical
/// Z_p presentations, integer column-span membership agrees with
/// Z_p-span membership, so all span tests below stay exact.
inline IntMatrix effective_relations(const FpModule& m) {
    if (m.ring.kind != RingKind::ModPrimePower) return m.rels;
    IntMatrix ring_rels = IntMatrix::identity(m.gens).scaled(pow_int(m.ring.p, m.ring.n));
    return hstack(m.rels, ring_rels);
}

/// Complete isomorphism invariant over a principal base ring: free rank
/// plus the ascending chain of invariant factors (> 1, each dividing the
/// next).
struct NormalForm {
    long long free_rank = 0;
    std::vector<Int> invariant_factors;

    bool operator==(const NormalForm& o) const {
        return free_rank == o.free_rank && invariant_factors == o.invariant_factors;
    }
    bool operator!=(const NormalForm& o) const { return !(*this == o); }

    bool is_zero() const { return free_rank == 0 && invariant_factors.empty(); }

    std::string str() const {
        std::string s = "free^" + std::to_string(free_rank) + " [";
        for (size_t i = 0; i < invariant_factors.size(); ++i)
            s += (i ? "," : "") + invariant_factors[i].str();
        return s + "]";
    }
};

/// Diagonalized view of a module: U maps generator coordinates to
/// coordinates in which the module is a direct sum of cyclics of the
/// given orders (0 = infinite cyclic).
struct Decomposition {
    IntMatrix U, U_inv;
    std::vector<Int> orders;  // one per generator, in U-coordinates
};

inline Decomposition decompose(const FpModule& m) {
    SmithForm f = smith_normal_form(effective_relations(m));
    Decomposition d{f.U, unimodular_inverse(f.U), {}};
    d.orders.resize(static_cast<size_t>(m.gens));
    for (long long i = 0; i < m.gens; ++i)
        d.orders[static_cast<size_t>(i)] =
            i < static_cast<long long>(f.diagonal.size()) ? f.diagonal[static_cast<size_t>(i)] : Int(0);
    return d;
}

inline NormalForm normal_form(const FpModule& m) {
    if (m.ring.kind == RingKind::PAdic) {
        NormalForm nf;
        nf.free_rank = m.padic_free_rank();
        for (long long j = 0; j < m.rels.cols(); ++j)
            nf.invariant_factors.push_back(m.rels.at(nf.free_rank + j, j));
        return nf;
    }
    SmithForm f = smith_normal_form(effective_relations(m));
    NormalForm nf;
    nf.free_rank = m.gens - f.rank();
    for (const Int& d : f.diagonal)
        if (d > 1) nf.invariant_factors.push_back(d);
    return nf;
}

inline bool is_zero_module(const FpModule& m) { return normal_form(m).is_zero(); }

inline bool isomorphic(const FpModule& a, const FpModule& b) {
    return normal_form(a) == normal_form(b);
}

/// |M| as an exact integer, or nullopt when infinite.
inline std::optional<Int> module_order(const FpModule& m) {
    NormalForm nf = normal_form(m);
    if (nf.free_rank > 0) return std::nullopt;
    Int o = 1;
    for (const Int& d : nf.invariant_factors) o *= d;
    return o;
}

namespace detail {

inline bool rings_compatible(const Ring& src, const Ring& dst) {
    if (src == dst) return true;
    // Scalar extension along Z -> Z_p carries eta for the completion functor.
    return src.kind == RingKind::Integers && dst.kind == RingKind::PAdic;
}

}  // namespace detail

struct unchecked_t {};
inline constexpr unchecked_t unchecked{};

/// Morphism of finitely presented modules, represented on generators.
/// matrix is target.gens x source.gens; column j is the image of source
/// generator j. Equality of morphisms is always modulo target relations.
struct FpMorphism {
    FpModule source, target;
    IntMatrix matrix;

    FpMorphism() : matrix(0, 0) {}

    FpMorphism(FpModule src, FpModule dst, IntMatrix m)
        : source(std::move(src)), target(std::move(dst)), matrix(std::move(m)) {
        validate_shape();
        if (!well_defined()) throw contract_violation("morphism is not well-defined on relations");
    }

    FpMorphism(unchecked_t, FpModule src, FpModule dst, IntMatrix m)
        : source(std::move(src)), target(std::move(dst)), matrix(std::move(m)) {
        validate_shape();
    }

    static FpMorphism identity(const FpModule& m) {
        return FpMorphism(unchecked, m, m, IntMatrix::identity(m.gens));
    }

    static FpMorphism zero(const FpModule& src, const FpModule& dst) {
        if (!detail::rings_compatible(src.ring, dst.ring))
            throw malformed_input("zero morphism: incompatible rings");
        return FpMorphism(unchecked, src, dst, IntMatrix(dst.gens, src.gens));
    }

    bool well_defined() const {
        SolveContext ctx(effective_relations(target));
        return ctx.columns_in_span(matrix * source.rels);
    }

  private:
    void validate_shape() const {
        if (!detail::rings_compatible(source.ring, target.ring))
            throw malformed_input("morphism rings are incompatible (" + source.ring.str() + " -> " +
                                  target.ring.str() + ")");
        if (matrix.rows() != target.gens || matrix.cols() != source.gens)
            throw malformed_input("morphism matrix shape must be target.gens x source.gens");
    }
};

inline FpMorphism compose(const FpMorphism& g, const FpMorphism& f) {
    if (f.target != g.source) throw contract_violation("compose: endpoints do not match");
    return FpMorphism(unchecked, f.source, g.target, g.matrix * f.matrix);
}

inline FpMorphism add(const FpMorphism& f, const FpMorphism& g) {
    if (f.source != g.source || f.target != g.target)
        throw contract_violation("add: endpoints do not match");
    return FpMorphism(unchecked, f.source, f.target, f.matrix + g.matrix);
}

inline FpMorphism negate(const FpMorphism& f) {
    return FpMorphism(unchecked, f.source, f.target, -f.matrix);
}

inline bool morphism_equal(const FpMorphism& f, const FpMorphism& g) {
    if (f.source != g.source || f.target != g.target)
        throw contract_violation("morphism_equal: endpoints do not match");
    SolveContext ctx(effective_relations(f.target));
    return ctx.columns_in_span(f.matrix - g.matrix);
}

inline bool is_zero_morphism(const FpMorphism& f) {
    SolveContext ctx(effective_relations(f.target));
    return ctx.columns_in_span(f.matrix);
}

// ---------------------------------------------------------------------------
// Z_p canonicalization

struct PadicCanonicalization {
    FpModule module;
    IntMatrix to_canon;    // module.gens x original gens
    IntMatrix from_canon;  // original gens x module.gens
};

/// Rewrites an arbitrary presentation, read with Z_p semantics, into the
/// canonical form (free part, then ascending p-power torsion). Prime-to-p
/// invariant factors are units over Z_p and their generators are dropped.
inline PadicCanonicalization padic_canonicalize(const Int& p, long long gens, const IntMatrix& rels) {
    SmithForm f = smith_normal_form(rels);
    IntMatrix u_inv = unimodular_inverse(f.U);
    std::vector<long long> kept_free, kept_tors;
    std::vector<long long> exps;
    for (long long i = 0; i < gens; ++i) {
        Int d = i < static_cast<long long>(f.diagonal.size()) ? f.diagonal[static_cast<size_t>(i)] : Int(0);
        if (d == 0) {
            kept_free.push_back(i);
        } else {
            long long e = valuation(d, p);
            if (e > 0) { kept_tors.push_back(i); exps.push_back(e); }
        }
    }
    std::vector<long long> kept = kept_free;
    kept.insert(kept.end(), kept_tors.begin(), kept_tors.end());
    long long g2 = static_cast<long long>(kept.size());
    IntMatrix to_canon(g2, gens), from_canon(gens, g2);
    for (long long i = 0; i < g2; ++i) {
        for (long long j = 0; j < gens; ++j) {
            to_canon.at(i, j) = f.U.at(kept[static_cast<size_t>(i)], j);
            from_canon.at(j, i) = u_inv.at(j, kept[static_cast<size_t>(i)]);
        }
    }
    PadicCanonicalization out{
        FpModule::padic(p, static_cast<long long>(kept_free.size()), exps),
        std::move(to_canon), std::move(from_canon)};
    return out;
}

namespace detail {

/// Wraps a raw presentation over the target ring into a module value,
/// canonicalizing when the ring demands it; `proj` maps raw generators to
/// the returned module's generators.
struct WrapResult {
    FpModule module;
    IntMatrix proj;
    IntMatrix section;  // proj * section = identity on module generators
};

inline WrapResult wrap_presentation(const Ring& ring, long long gens, IntMatrix rels) {
    if (ring.kind == RingKind::PAdic) {
        auto c = padic_canonicalize(ring.p, gens, rels);
        return {std::move(c.module), std::move(c.to_canon), std::move(c.from_canon)};
    }
    return {FpModule(ring, gens, std::move(rels)), IntMatrix::identity(gens),
            IntMatrix::identity(gens)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kernels, cokernels, biproducts

struct KernelResult {
    FpModule module;
    FpMorphism incl;  // monic, into source(f)
};

/// Kernel computed from Smith data: generators are a basis of the lattice
/// {x : f(x) = 0 mod target relations}, relations are the coefficient
/// vectors landing in the source relations. Deterministic.
inline KernelResult kernel(const FpMorphism& f) {
    IntMatrix rn = effective_relations(f.target);
    IntMatrix rm = effective_relations(f.source);
    IntMatrix x = kernel_basis(hstack(f.matrix, rn)).top_rows(f.source.gens);
    long long s = x.cols();
    IntMatrix krels = kernel_basis(hstack(x, rm)).top_rows(s);
    if (f.source.ring.kind == RingKind::PAdic) {
        auto c = padic_canonicalize(f.source.ring.p, s, krels);
        return {c.module, FpMorphism(c.module, f.source, x * c.from_canon)};
    }
    FpModule k(f.source.ring, s, std::move(krels));
    return {k, FpMorphism(k, f.source, std::move(x))};
}

struct CokernelResult {
    FpModule module;
    FpMorphism proj;    // epic, from target(f)
    IntMatrix section;  // generator lifts: proj.matrix * section = identity
};

/// Cokernel: the target with the morphism's columns adjoined as relations.
inline CokernelResult cokernel(const FpMorphism& f) {
    auto w = detail::wrap_presentation(f.target.ring, f.target.gens, hstack(f.target.rels, f.matrix));
    FpMorphism pi(unchecked, f.target, w.module, std::move(w.proj));
    return {w.module, std::move(pi), std::move(w.section)};
}

struct BiproductResult {
    FpModule module;
    FpMorphism inj1, inj2, proj1, proj2;
};

inline BiproductResult biproduct(const FpModule& m, const FpModule& n) {
    if (m.ring != n.ring) throw malformed_input("biproduct: ring mismatch");
    long long g = m.gens + n.gens;
    IntMatrix rels(g, m.rels.cols() + n.rels.cols());
    for (long long j = 0; j < m.rels.cols(); ++j)
        for (long long i = 0; i < m.gens; ++i) rels.at(i, j) = m.rels.at(i, j);
    for (long long j = 0; j < n.rels.cols(); ++j)
        for (long long i = 0; i < n.gens; ++i) rels.at(m.gens + i, m.rels.cols() + j) = n.rels.at(i, j);

    if (m.ring.kind == RingKind::PAdic) {
        auto c = padic_canonicalize(m.ring.p, g, rels);
        IntMatrix i1(g, m.gens), i2(g, n.gens), p1(m.gens, g), p2(n.gens, g);
        for (long long i = 0; i < m.gens; ++i) { i1.at(i, i) = 1; p1.at(i, i) = 1; }
        for (long long i = 0; i < n.gens; ++i) { i2.at(m.gens + i, i) = 1; p2.at(i, m.gens + i) = 1; }
        return {c.module,
                FpMorphism(m, c.module, c.to_canon * i1),
                FpMorphism(n, c.module, c.to_canon * i2),
                FpMorphism(c.module, m, p1 * c.from_canon),
                FpMorphism(c.module, n, p2 * c.from_canon)};
    }

    FpModule sum(m.ring, g, std::move(rels));
    IntMatrix i1(g, m.gens), i2(g, n.gens), p1(m.gens, g), p2(n.gens, g);
    for (long long i = 0; i < m.gens; ++i) { i1.at(i, i) = 1; p1.at(i, i) = 1; }
    for (long long i = 0; i < n.gens; ++i) { i2.at(m.gens + i, i) = 1; p2.at(i, m.gens + i) = 1; }
    return {sum,
            FpMorphism(unchecked, m, sum, std::move(i1)),
            FpMorphism(unchecked, n, sum, std::move(i2)),
            FpMorphism(unchecked, sum, m, std::move(p1)),
            FpMorphism(unchecked, sum, n, std::move(p2))};
}

// ---------------------------------------------------------------------------
// Tensor product

/// Generator (i, j) of M (x) N sits at index i * N.gens + j.
inline FpModule tensor(const FpModule& m, const FpModule& n) {
    if (m.ring != n.ring) throw malformed_input("tensor: ring mismatch");
    long long g = m.gens * n.gens;
    long long k = m.rels.cols() * n.gens + m.gens * n.rels.cols();
    IntMatrix rels(g, k);
    long long c = 0;
    for (long long r = 0; r < m.rels.cols(); ++r)
        for (long long j = 0; j < n.gens; ++j, ++c)
            for (long long i = 0; i < m.gens; ++i) rels.at(i * n.gens + j, c) = m.rels.at(i, r);
    for (long long i = 0; i < m.gens; ++i)
        for (long long s = 0; s < n.rels.cols(); ++s, ++c)
            for (long long j = 0; j < n.gens; ++j) rels.at(i * n.gens + j, c) = n.rels.at(j, s);
    if (m.ring.kind == RingKind::PAdic)
        return padic_canonicalize(m.ring.p, g, rels).module;
    return FpModule(m.ring, g, std::move(rels));
}

inline IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (long long i = 0; i < a.rows(); ++i)
        for (long long j = 0; j < a.cols(); ++j) {
            if (a.at(i, j) == 0) continue;
            for (long long k = 0; k < b.rows(); ++k)
                for (long long l = 0; l < b.cols(); ++l)
                    r.at(i * b.rows() + k, j * b.cols() + l) = a.at(i, j) * b.at(k, l);
        }
    return r;
}

/// Functorial action of the tensor product on a pair of morphisms.
inline FpMorphism tensor_morphisms(const FpMorphism& f, const FpMorphism& g) {
    FpModule src = tensor(f.source, g.source);
    FpModule dst = tensor(f.target, g.target);
    if (src.ring.kind == RingKind::PAdic)
        throw unsupported_input("tensor_morphisms over Z_p requires canonical tracking; not needed");
    return FpMorphism(unchecked, src, dst, kronecker(f.matrix, g.matrix));
}

// ---------------------------------------------------------------------------
// Hom

struct HomModule {
    FpModule module;
    std::vector<IntMatrix> basis;  // generator i of `module` is the morphism matrix basis[i]
    IntMatrix lattice;  // vectorized basis columns (target.gens * source.gens rows)
    IntMatrix trivial;  // vectorized generators of the zero-morphism lattice

    /// Coordinates of a morphism matrix in this presentation of Hom.
    std::optional<std::vector<Int>> coords(const IntMatrix& t) const {
        long long rows = lattice.rows();
        std::vector<Int> v(static_cast<size_t>(rows));
        long long gm = t.cols();
        for (long long a = 0; a < t.rows(); ++a)
            for (long long b = 0; b < gm; ++b) v[static_cast<size_t>(a * gm + b)] = t.at(a, b);
        auto sol = solve_integer(hstack(lattice, trivial), v);
        if (!sol) return std::nullopt;
        return std::vector<Int>(sol->begin(), sol->begin() + static_cast<size_t>(lattice.cols()));
    }
};

/// Presents Hom(M, N) as a module: the lattice of matrices carrying the
/// source relations into the target relation span, modulo the matrices
/// whose columns already lie in that span.
inline HomModule hom_module(const FpModule& m, const FpModule& n) {
    if (m.ring != n.ring) throw malformed_input("hom_module: ring mismatch");
    IntMatrix rm = effective_relations(m);
    IntMatrix rn = effective_relations(n);
    const long long gm = m.gens, gn = n.gens, km = rm.cols(), kn = rn.cols();

    // Unknowns: T entries (a, b) at a*gm + b, then slack y at gn*gm + j*km + c.
    IntMatrix big(gn * km, gn * gm + kn * km);
    for (long long a = 0; a < gn; ++a)
        for (long long c = 0; c < km; ++c) {
            long long row = a * km + c;
            for (long long b = 0; b < gm; ++b) big.at(row, a * gm + b) = rm.at(b, c);
            for (long long j = 0; j < kn; ++j) big.at(row, gn * gm + j * km + c) = -rn.at(a, j);
        }
    IntMatrix lattice = kernel_basis(big).top_rows(gn * gm);
    const long long s = lattice.cols();

    // Matrices that are zero as morphisms: target relation j placed in column b.
    IntMatrix trivial(gn * gm, kn * gm);
    for (long long j = 0; j < kn; ++j)
        for (long long b = 0; b < gm; ++b)
            for (long long a = 0; a < gn; ++a) trivial.at(a * gm + b, j * gm + b) = rn.at(a, j);

    IntMatrix hrels = kernel_basis(hstack(lattice, trivial)).top_rows(s);
    std::vector<IntMatrix> basis;
    basis.reserve(static_cast<size_t>(s));
    for (long long c = 0; c < s; ++c) {
        IntMatrix t(gn, gm);
        for (long long a = 0; a < gn; ++a)
            for (long long b = 0; b < gm; ++b) t.at(a, b) = lattice.at(a * gm + b, c);
        basis.push_back(std::move(t));
    }
    if (m.ring.kind == RingKind::PAdic) {
        auto canon = padic_canonicalize(m.ring.p, s, hrels);
        std::vector<IntMatrix> cbasis;
        IntMatrix clattice(gn * gm, canon.module.gens);
        for (long long i = 0; i < canon.module.gens; ++i) {
            IntMatrix t(gn, gm);
            for (long long c = 0; c < s; ++c) {
                const Int& w = canon.from_canon.at(c, i);
                if (w == 0) continue;
                for (long long a = 0; a < gn; ++a)
                    for (long long b = 0; b < gm; ++b) t.at(a, b) += w * basis[static_cast<size_t>(c)].at(a, b);
            }
            for (long long a = 0; a < gn; ++a)
                for (long long b = 0; b < gm; ++b) clattice.at(a * gm + b, i) = t.at(a, b);
            cbasis.push_back(std::move(t));
        }
        return {canon.module, std::move(cbasis), std::move(clattice), std::move(trivial)};
    }
    return {FpModule(m.ring, s, std::move(hrels)), std::move(basis), std::move(lattice),
            std::move(trivial)};
}

/// Structure constants of Hom between diagonalized modules: the (i, j)
/// entry lists the modulus g = gcd(d_i, e_j) and step e_j / g.
struct HomStructure {
    Decomposition dm, dn;
    IntMatrix step;     // n.gens x m.gens
    IntMatrix modulus;  // n.gens x m.gens; 0 means a free Z entry
};

inline HomStructure hom_structure(const FpModule& m, const FpModule& n) {
    HomStructure h{decompose(m), decompose(n), IntMatrix(n.gens, m.gens), IntMatrix(n.gens, m.gens)};
    for (long long j = 0; j < n.gens; ++j)
        for (long long i = 0; i < m.gens; ++i) {
            const Int& d = h.dm.orders[static_cast<size_t>(i)];
            const Int& e = h.dn.orders[static_cast<size_t>(j)];
            if (d == 0 && e == 0) { h.step.at(j, i) = 1; h.modulus.at(j, i) = 0; }
            else if (d == 0) { h.step.at(j, i) = 1; h.modulus.at(j, i) = e; }
            else if (e == 0) { h.step.at(j, i) = 1; h.modulus.at(j, i) = 1; }
            else {
                Int g = gcd_int(d, e);
                h.step.at(j, i) = e / g;
                h.modulus.at(j, i) = g;
            }
        }
    return h;
}

/// Every morphism M -> N, without repetition, for finite M and N.
inline std::vector<FpMorphism> hom_enumerate(const FpModule& m, const FpModule& n) {
    auto om = module_order(m), on = module_order(n);
    if (!om || !on) throw unsupported_input("hom_enumerate requires finite modules");
    HomStructure h = hom_structure(m, n);
    std::vector<std::pair<long long, long long>> slots;  // (j, i) with modulus > 1
    Int count = 1;
    for (long long j = 0; j < n.gens; ++j)
        for (long long i = 0; i < m.gens; ++i)
            if (h.modulus.at(j, i) > 1) { slots.emplace_back(j, i); count *= h.modulus.at(j, i); }
    if (count > 2000000) throw unsupported_input("hom_enumerate: hom-set too large (" + count.str() + ")");

    std::vector<FpMorphism> out;
    out.reserve(static_cast<size_t>(count));
    std::vector<Int> idx(slots.size(), 0);
    for (;;) {
        IntMatrix canon(n.gens, m.gens);
        for (size_t s = 0; s < slots.size(); ++s)
            canon.at(slots[s].first, slots[s].second) = idx[s] * h.step.at(slots[s].first, slots[s].second);
        out.emplace_back(unchecked, m, n, h.dn.U_inv * canon * h.dm.U);
        size_t k = 0;
        while (k < slots.size() && idx[k] + 1 == h.modulus.at(slots[k].first, slots[k].second)) {
            idx[k] = 0;
            ++k;
        }
        if (k == slots.size()) break;
        ++idx[k];
    }
    return out;
}

/// |Hom(M, N)| for finite modules, from the structure constants.
inline Int hom_count(const FpModule& m, const FpModule& n) {
    auto om = module_order(m), on = module_order(n);
    if (!om || !on) throw unsupported_input("hom_count requires finite modules");
    HomStructure h = hom_structure(m, n);
    Int count = 1;
    for (long long j = 0; j < n.gens; ++j)
        for (long long i = 0; i < m.gens; ++i)
            if (h.modulus.at(j, i) > 1) count *= h.modulus.at(j, i);
    return count;
}

// ---------------------------------------------------------------------------
// Monos, epis, inverses

inline bool is_monic(const FpMorphism& f) { return is_zero_module(kernel(f).module); }

inline bool is_epic(const FpMorphism& f) {
    // A finitely generated Z-module never surjects onto Z_p^r with r > 0;
    // the base-changed cokernel alone cannot witness that.
    if (f.source.ring.kind == RingKind::Integers && f.target.ring.kind == RingKind::PAdic &&
        f.target.padic_free_rank() > 0)
        return false;
    return is_zero_module(cokernel(f).module);
}
inline bool is_isomorphism(const FpMorphism& f) { return is_monic(f) && is_epic(f); }

/// Two-sided inverse of an isomorphism, found by solving for generator
/// preimages. Throws if f is not invertible.
inline FpMorphism invert_iso(const FpMorphism& f) {
    SolveContext ctx(hstack(f.matrix, effective_relations(f.target)));
    IntMatrix g(f.source.gens, f.target.gens);
    std::vector<Int> e(static_cast<size_t>(f.target.gens));
    for (long long j = 0; j < f.target.gens; ++j) {
        e.assign(static_cast<size_t>(f.target.gens), 0);
        e[static_cast<size_t>(j)] = 1;
        auto sol = ctx.solve(e);
        if (!sol) throw contract_violation("invert_iso: morphism is not epic");
        for (long long i = 0; i < f.source.gens; ++i) g.at(i, j) = (*sol)[static_cast<size_t>(i)];
    }
    FpMorphism inv(f.target, f.source, std::move(g));
    if (!morphism_equal(compose(inv, f), FpMorphism::identity(f.source)) ||
        !morphism_equal(compose(f, inv), FpMorphism::identity(f.target)))
        throw contract_violation("invert_iso: morphism is not an isomorphism");
    return inv;
}

/// Factor g through a monomorphism iota (same target): the unique h with
/// iota . h = g, when it exists.
inline std::optional<FpMorphism> factor_through_monic(const FpMorphism& g, const FpMorphism& iota) {
    if (g.target != iota.target) throw contract_violation("factor_through_monic: targets differ");
    SolveContext ctx(hstack(iota.matrix, effective_relations(iota.target)));
    IntMatrix h(iota.source.gens, g.source.gens);
    for (long long j = 0; j < g.source.gens; ++j) {
        auto sol = ctx.solve(g.matrix.column(j));
        if (!sol) return std::nullopt;
        for (long long i = 0; i < iota.source.gens; ++i) h.at(i, j) = (*sol)[static_cast<size_t>(i)];
    }
    return FpMorphism(g.source, iota.source, std::move(h));
}

// ---------------------------------------------------------------------------
// Image, coimage

struct ImageCoimage {
    FpModule image;
    FpMorphism image_incl;   // image -> target
    FpModule coimage;
    FpMorphism coimage_proj;  // source -> coimage
    FpMorphism comparison;    // coimage -> image, an isomorphism in an abelian category
};

inline ImageCoimage image_coimage(const FpMorphism& f) {
    KernelResult kr = kernel(f);
    CokernelResult ck = cokernel(f);
    KernelResult img = kernel(ck.proj);
    CokernelResult coim = cokernel(kr.incl);

    // comparison: pick generator preimages along the coimage projection,
    // push through f, express in the image.
    SolveContext qctx(hstack(coim.proj.matrix, effective_relations(coim.module)));
    SolveContext ictx(hstack(img.incl.matrix, effective_relations(f.target)));
    IntMatrix w(img.module.gens, coim.module.gens);
    std::vector<Int> e(static_cast<size_t>(coim.module.gens));
    for (long long j = 0; j < coim.module.gens; ++j) {
        e.assign(static_cast<size_t>(coim.module.gens), 0);
        e[static_cast<size_t>(j)] = 1;
        auto mpre = qctx.solve(e);
        if (!mpre) throw internal_error("image_coimage: coimage projection not epic");
        std::vector<Int> mvec(mpre->begin(), mpre->begin() + f.source.gens);
        auto wcol = ictx.solve(mat_vec(f.matrix, mvec));
        if (!wcol) throw internal_error("image_coimage: f does not land in its image");
        for (long long i = 0; i < img.module.gens; ++i) w.at(i, j) = (*wcol)[static_cast<size_t>(i)];
    }
    FpMorphism comparison(coim.module, img.module, std::move(w));
    return {img.module, img.incl, coim.module, coim.proj, std::move(comparison)};
}

// ---------------------------------------------------------------------------
// Finitely generated p-adic completion

struct CompletionResult {
    FpModule module;   // over Z_p, canonical
    IntMatrix unit;    // module.gens x M.gens: the map M -> M^_p on generators
    IntMatrix section; // M.gens x module.gens: generator lifts, unit * section = identity
};

/// Completion of a finitely generated Z-module at p: free rank is kept,
/// p-primary invariant factors are kept, prime-to-p torsion dies.
inline CompletionResult complete_fg_with_unit(const FpModule& m, const Int& p) {
    if (m.ring.kind != RingKind::Integers)
        throw contract_violation("complete_fg expects a module over Z");
    if (!is_prime(p)) throw malformed_input("complete_fg: p must be prime");
    auto c = padic_canonicalize(p, m.gens, m.rels);
    return {std::move(c.module), std::move(c.to_canon), std::move(c.from_canon)};
}

inline FpModule complete_fg(const FpModule& m, const Int& p) {
    return complete_fg_with_unit(m, p).module;
}

// ---------------------------------------------------------------------------
// Elements of finite modules (enumeration oracles and hom-set work)

/// Element bookkeeping for a finite module: canonical coordinates are
/// tuples modulo the cyclic orders of the decomposition.
struct ElementTable {
    FpModule module;
    Decomposition dec;
    std::vector<std::vector<Int>> elems;  // canonical coordinates

    explicit ElementTable(FpModule m) : module(std::move(m)), dec(decompose(module)) {
        auto o = module_order(module);
        if (!o) throw unsupported_input("element enumeration requires a finite module");
        if (*o > 1000000) throw unsupported_input("module too large to enumerate");
        std::vector<Int> cur(dec.orders.size(), 0);
        for (;;) {
            elems.push_back(cur);
            size_t k = 0;
            while (k < cur.size() && (dec.orders[k] <= 1 || cur[k] + 1 == dec.orders[k])) {
                cur[k] = 0;
                ++k;
            }
            if (k == cur.size()) break;
            ++cur[k];
        }
    }

    /// Normalize a generator-coordinate vector to canonical coordinates.
    std::vector<Int> canonical(const std::vector<Int>& gen_coords) const {
        std::vector<Int> c = mat_vec(dec.U, gen_coords);
        for (size_t i = 0; i < c.size(); ++i) {
            if (dec.orders[i] > 0) {
                c[i] %= dec.orders[i];
                if (c[i] < 0) c[i] += dec.orders[i];
            }
            if (dec.orders[i] == 1) c[i] = 0;
        }
        return c;
    }

    std::vector<Int> generator_coords(const std::vector<Int>& canonical_coords) const {
        return mat_vec(dec.U_inv, canonical_coords);
    }

    bool is_zero(const std::vector<Int>& canonical_coords) const {
        for (const Int& x : canonical_coords)
            if (x != 0) return false;
        return true;
    }
};

/// Image of an element (in canonical coordinates of the source table)
/// under f, in canonical coordinates of the target table.
inline std::vector<Int> apply_on_elements(const FpMorphism& f, const ElementTable& src,
                                          const ElementTable& dst, const std::vector<Int>& x) {
    return dst.canonical(mat_vec(f.matrix, src.generator_coords(x)));
}

// ---------------------------------------------------------------------------
// Presentation reduction (diagonal form, dead generators dropped)

struct ReducedPresentation {
    FpModule module;
    FpMorphism to_reduced;    // original -> reduced (iso)
    FpMorphism from_reduced;  // reduced -> original (iso)
};

inline ReducedPresentation reduce_presentation(const FpModule& m) {
    if (m.ring.kind == RingKind::PAdic)
        return {m, FpMorphism::identity(m), FpMorphism::identity(m)};
    Decomposition d = decompose(m);
    std::vector<long long> kept;
    std::vector<Int> diag;
    for (long long i = 0; i < m.gens; ++i) {
        const Int& o = d.orders[static_cast<size_t>(i)];
        if (o == 1) continue;
        kept.push_back(i);
        diag.push_back(o);
    }
    // Over Z/p^N the full-order columns are implicit; drop them.
    if (m.ring.kind == RingKind::ModPrimePower) {
        Int full = pow_int(m.ring.p, m.ring.n);
        for (Int& o : diag)
            if (o == full) o = 0;
    }
    FpModule small = FpModule::diagonal(m.ring, diag);
    long long g2 = static_cast<long long>(kept.size());
    IntMatrix to(g2, m.gens), from(m.gens, g2);
    for (long long i = 0; i < g2; ++i)
        for (long long j = 0; j < m.gens; ++j) {
            to.at(i, j) = d.U.at(kept[static_cast<size_t>(i)], j);
            from.at(j, i) = d.U_inv.at(j, kept[static_cast<size_t>(i)]);
        }
    return {small, FpMorphism(unchecked, m, small, std::move(to)),
            FpMorphism(unchecked, small, m, std::move(from))};
}

}  // namespace lzero
