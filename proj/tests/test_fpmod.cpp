#include <catch2/catch_amalgamated.hpp>
#include <numeric>
#include <set>

#include "lzero/fpmod.hpp"
#include "lzero/sampling.hpp"

using namespace lzero;

namespace {

FpModule z_mod(long long n) { return FpModule::cyclic(Ring::integers(), Int(n)); }
FpModule z_free(long long r) { return FpModule::free_module(Ring::integers(), r); }

FpMorphism mult(const FpModule& m, long long c) {
    return FpMorphism(m, m, IntMatrix::identity(m.gens).scaled(Int(c)));
}

NormalForm nf(long long free_rank, std::vector<long long> factors) {
    NormalForm n;
    n.free_rank = free_rank;
    n.invariant_factors.assign(factors.begin(), factors.end());
    return n;
}

// Hand-rolled oracle: order of {x in Z/m : c*x == 0 (mod m)}.
long long cyclic_kernel_order(long long m, long long c) {
    long long count = 0;
    for (long long x = 0; x < m; ++x)
        if ((c * x) % m == 0) ++count;
    return count;
}

// Hand-rolled oracle: order of (Z/m) / <c>.
long long cyclic_cokernel_order(long long m, long long c) {
    std::set<long long> image;
    for (long long x = 0; x < m; ++x) image.insert((c * x) % m);
    return m / static_cast<long long>(image.size());
}

}  // namespace

TEST_CASE("normal_form pinned examples") {
    IntMatrix rel(2, 2);
    rel.at(0, 0) = 2;
    rel.at(1, 1) = 3;
    FpModule m(Ring::integers(), 2, rel);
    REQUIRE(normal_form(m) == nf(0, {6}));

    REQUIRE(normal_form(z_free(1)) == nf(1, {}));
    REQUIRE(normal_form(FpModule::zero(Ring::integers())) == nf(0, {}));
    REQUIRE(is_zero_module(FpModule::zero(Ring::integers())));
}

TEST_CASE("normal_form is an isomorphism invariant", "[property]") {
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
        FpModule m = random_module(rng, Ring::integers(), 4, 4, 8);
        NormalForm base = normal_form(m);
        IntMatrix u = random_unimodular(rng, m.gens);
        IntMatrix w = random_unimodular(rng, m.rels.cols());
        FpModule changed(m.ring, m.gens, u * m.rels * w);
        REQUIRE(normal_form(changed) == base);
    }
}

TEST_CASE("well-definedness is enforced") {
    // Z/2 -> Z/3 by 1 is not a morphism: 2*1 = 2 is not 0 mod 3.
    IntMatrix one = IntMatrix::identity(1);
    REQUIRE_THROWS_AS(FpMorphism(z_mod(2), z_mod(3), one), contract_violation);
    REQUIRE_NOTHROW(FpMorphism(z_mod(2), z_mod(4), one.scaled(Int(2))));
    REQUIRE_THROWS_AS(FpMorphism(z_mod(2), z_mod(4), one), contract_violation);
}

TEST_CASE("kernel pinned examples") {
    // x2 on Z/4: kernel {0, 2}, i.e. Z/2 (enumeration oracle at p = 2).
    REQUIRE(cyclic_kernel_order(4, 2) == 2);
    auto k = kernel(mult(z_mod(4), 2));
    REQUIRE(normal_form(k.module) == nf(0, {2}));
    REQUIRE(is_zero_morphism(compose(mult(z_mod(4), 2), k.incl)));
    REQUIRE(is_monic(k.incl));

    REQUIRE(is_zero_module(kernel(FpMorphism::identity(z_mod(12))).module));

    auto kz = kernel(FpMorphism::zero(z_mod(6), z_mod(4)));
    REQUIRE(normal_form(kz.module) == nf(0, {6}));
    REQUIRE(is_isomorphism(kz.incl));
}

TEST_CASE("cokernel pinned examples") {
    auto c1 = cokernel(mult(z_free(1), 5));
    REQUIRE(normal_form(c1.module) == nf(0, {5}));

    REQUIRE(is_zero_module(cokernel(FpMorphism::identity(z_mod(9))).module));

    REQUIRE(cyclic_cokernel_order(4, 2) == 2);  // enumeration oracle
    auto c2 = cokernel(mult(z_mod(4), 2));
    REQUIRE(normal_form(c2.module) == nf(0, {2}));
    REQUIRE(is_epic(c2.proj));
}

TEST_CASE("kernel universal property on elements") {
    // Any g with f.g = 0 factors uniquely through the kernel inclusion.
    FpMorphism f = mult(z_mod(8), 4);
    auto k = kernel(f);
    for (const auto& g : hom_enumerate(z_mod(4), z_mod(8))) {
        bool kills = is_zero_morphism(compose(f, g));
        auto h = factor_through_monic(g, k.incl);
        if (kills) {
            REQUIRE(h.has_value());
            REQUIRE(morphism_equal(compose(k.incl, *h), g));
        } else {
            REQUIRE(!h.has_value());
        }
    }
}

TEST_CASE("biproduct pinned examples and identities") {
    auto b = biproduct(z_mod(2), z_mod(3));
    REQUIRE(normal_form(b.module) == nf(0, {6}));

    auto b2 = biproduct(z_mod(7), FpModule::zero(Ring::integers()));
    REQUIRE(normal_form(b2.module) == nf(0, {7}));

    auto b3 = biproduct(z_free(1), z_free(1));
    REQUIRE(normal_form(b3.module) == nf(2, {}));

    // Biproduct identities as exact matrix equations.
    auto bb = biproduct(z_mod(4), z_mod(6));
    REQUIRE(compose(bb.proj1, bb.inj1).matrix == IntMatrix::identity(1));
    REQUIRE(compose(bb.proj2, bb.inj2).matrix == IntMatrix::identity(1));
    REQUIRE(compose(bb.proj1, bb.inj2).matrix.is_zero());
    REQUIRE(compose(bb.proj2, bb.inj1).matrix.is_zero());
    IntMatrix sum = compose(bb.inj1, bb.proj1).matrix + compose(bb.inj2, bb.proj2).matrix;
    REQUIRE(sum == IntMatrix::identity(2));
}

TEST_CASE("ring mismatch rejected") {
    REQUIRE_THROWS_AS(biproduct(z_mod(2), FpModule::cyclic(Ring::mod_prime_power(2, 2), 2)),
                      malformed_input);
    REQUIRE_THROWS_AS(tensor(z_mod(2), FpModule::cyclic(Ring::mod_prime_power(2, 2), 2)),
                      malformed_input);
}

TEST_CASE("tensor pinned examples") {
    REQUIRE(std::gcd(4, 6) == 2);  // oracle for cyclic tensor
    REQUIRE(normal_form(tensor(z_mod(4), z_mod(6))) == nf(0, {2}));
    REQUIRE(normal_form(tensor(z_free(1), z_mod(12))) == nf(0, {12}));  // unit law
    REQUIRE(is_zero_module(tensor(z_mod(2), z_mod(3))));
}

TEST_CASE("tensor functoriality", "[property]") {
    Rng rng(7);
    for (int t = 0; t < 60; ++t) {
        FpModule a = random_module(rng, Ring::integers(), 2, 2, 6);
        FpModule b = random_module(rng, Ring::integers(), 2, 2, 6);
        FpModule c = random_module(rng, Ring::integers(), 2, 2, 6);
        FpModule x = random_module(rng, Ring::integers(), 2, 2, 6);
        FpMorphism f = random_morphism(rng, a, b);
        FpMorphism g = random_morphism(rng, b, c);
        FpMorphism h = random_morphism(rng, x, x);
        // Bifunctor identity: (g (x) id) . (f (x) h) = (g.f) (x) h.
        FpMorphism lhs = tensor_morphisms(compose(g, f), h);
        FpMorphism rhs = compose(tensor_morphisms(g, FpMorphism::identity(x)),
                                 tensor_morphisms(f, h));
        REQUIRE(morphism_equal(lhs, rhs));
    }
}

TEST_CASE("hom pinned examples") {
    auto h1 = hom_module(z_mod(2), z_mod(4));
    REQUIRE(normal_form(h1.module) == nf(0, {2}));
    REQUIRE(hom_enumerate(z_mod(2), z_mod(4)).size() == 2);

    auto h2 = hom_module(z_free(1), z_mod(12));
    REQUIRE(normal_form(h2.module) == nf(0, {12}));  // Hom(Z, M) = M

    REQUIRE(is_zero_module(hom_module(z_mod(2), z_mod(3)).module));
    REQUIRE_THROWS_AS(hom_enumerate(z_free(1), z_mod(2)), unsupported_input);
}

TEST_CASE("hom_enumerate count equals |hom_module| and morphisms are distinct", "[property]") {
    Rng rng(11);
    for (int t = 0; t < 40; ++t) {
        FpModule m = random_p_group(rng, 2, 3, 2);
        FpModule n = random_p_group(rng, 2, 3, 2);
        auto all = hom_enumerate(m, n);
        REQUIRE(Int(all.size()) == hom_count(m, n));
        auto hm = module_order(hom_module(m, n).module);
        REQUIRE(hm.has_value());
        REQUIRE(Int(all.size()) == *hm);
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = i + 1; j < all.size(); ++j)
                REQUIRE(!morphism_equal(all[i], all[j]));
    }
}

TEST_CASE("hom_module basis matrices are morphisms") {
    auto h = hom_module(z_mod(4), z_mod(8));
    REQUIRE(normal_form(h.module) == nf(0, {4}));
    for (const auto& b : h.basis)
        REQUIRE_NOTHROW(FpMorphism(z_mod(4), z_mod(8), b));
}

TEST_CASE("image and coimage pinned examples") {
    auto ic = image_coimage(mult(z_mod(4), 2));
    REQUIRE(normal_form(ic.image) == nf(0, {2}));
    REQUIRE(normal_form(ic.coimage) == nf(0, {2}));
    REQUIRE(is_isomorphism(ic.comparison));

    // Monomorphism: coimage is the source.
    FpMorphism mono(z_mod(2), z_mod(4), IntMatrix::identity(1).scaled(Int(2)));
    auto ic2 = image_coimage(mono);
    REQUIRE(normal_form(ic2.coimage) == normal_form(mono.source));

    auto ic3 = image_coimage(FpMorphism::zero(z_mod(6), z_mod(10)));
    REQUIRE(is_zero_module(ic3.image));
    REQUIRE(is_zero_module(ic3.coimage));
}

TEST_CASE("abelian axioms on random morphisms", "[property]") {
    Rng rng(2024);
    for (int t = 0; t < 150; ++t) {
        Ring ring = (t % 3 == 0) ? Ring::mod_prime_power(2, 2) : Ring::integers();
        FpModule m = random_module(rng, ring, 3, 3, 12);
        FpModule n = random_module(rng, ring, 3, 3, 12);
        FpMorphism f = random_morphism(rng, m, n);
        auto k = kernel(f);
        REQUIRE(is_monic(k.incl));
        REQUIRE(is_zero_morphism(compose(f, k.incl)));
        auto c = cokernel(f);
        REQUIRE(is_epic(c.proj));
        REQUIRE(is_zero_morphism(compose(c.proj, f)));
        auto ic = image_coimage(f);
        REQUIRE(is_isomorphism(ic.comparison));
        // f factors: image_incl . comparison . coimage_proj == f
        FpMorphism back = compose(ic.image_incl, compose(ic.comparison, ic.coimage_proj));
        REQUIRE(morphism_equal(back, f));
    }
}

TEST_CASE("morphism equality is modulo target relations") {
    FpModule m = z_mod(4);
    FpMorphism a(m, m, IntMatrix::identity(1));
    FpMorphism b(m, m, IntMatrix::identity(1).scaled(Int(5)));
    REQUIRE(a.matrix != b.matrix);
    REQUIRE(morphism_equal(a, b));
}

TEST_CASE("complete_fg pinned examples") {
    auto c1 = complete_fg(z_free(1), 2);
    REQUIRE(c1.ring == Ring::p_adic(2));
    REQUIRE(normal_form(c1) == nf(1, {}));

    auto c2 = complete_fg(z_mod(4), 2);
    REQUIRE(normal_form(c2) == nf(0, {4}));

    // Z/6 at p=2 -> Z/2; truncation tower stabilization oracle: M/2^k M
    // stabilizes at Z/2 from k = 1 on.
    for (long long k = 1; k <= 4; ++k) {
        IntMatrix rels(1, 2);
        rels.at(0, 0) = 6;
        rels.at(0, 1) = pow_int(2, k);
        REQUIRE(normal_form(FpModule(Ring::integers(), 1, rels)) == nf(0, {2}));
    }
    auto c3 = complete_fg(z_mod(6), 2);
    REQUIRE(normal_form(c3) == nf(0, {2}));
}

TEST_CASE("completion units behave") {
    // eta is epic but not monic when prime-to-p torsion dies.
    auto cm = complete_fg_with_unit(z_mod(6), 2);
    FpMorphism eta(z_mod(6), cm.module, cm.unit);
    REQUIRE(!is_monic(eta));
    REQUIRE(is_epic(eta));

    auto cz = complete_fg_with_unit(z_free(1), 2);
    FpMorphism etaz(z_free(1), cz.module, cz.unit);
    REQUIRE(is_monic(etaz));
    REQUIRE(!is_epic(etaz));  // Z never surjects onto Z_2
}

TEST_CASE("padic module arithmetic stays canonical") {
    FpModule a = FpModule::padic(2, 1, {1, 3});
    FpModule b = FpModule::padic(2, 0, {2});
    auto t = tensor(a, b);
    REQUIRE(t.ring == Ring::p_adic(2));
    REQUIRE(normal_form(t) == nf(0, {2, 4, 4}));  // (Zp + Z/2 + Z/8) (x) Z/4

    auto s = biproduct(a, b);
    REQUIRE(normal_form(s.module) == nf(1, {2, 4, 8}));
    REQUIRE(morphism_equal(compose(s.proj1, s.inj1), FpMorphism::identity(a)));

    FpMorphism f(b, b, IntMatrix::identity(1).scaled(Int(2)));
    REQUIRE(normal_form(kernel(f).module) == nf(0, {2}));
    REQUIRE(normal_form(cokernel(f).module) == nf(0, {2}));
}

TEST_CASE("element tables enumerate finite modules") {
    ElementTable t(z_mod(6));
    REQUIRE(t.elems.size() == 6);
    ElementTable t2(FpModule::diagonal(Ring::integers(), {Int(2), Int(4)}));
    REQUIRE(t2.elems.size() == 8);
    REQUIRE_THROWS_AS(ElementTable(z_free(1)), unsupported_input);
}

TEST_CASE("reduce_presentation preserves isomorphism class") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        FpModule m = random_module(rng, Ring::integers(), 4, 5, 10);
        auto r = reduce_presentation(m);
        REQUIRE(normal_form(r.module) == normal_form(m));
        REQUIRE(morphism_equal(compose(r.to_reduced, r.from_reduced), FpMorphism::identity(r.module)));
        REQUIRE(morphism_equal(compose(r.from_reduced, r.to_reduced), FpMorphism::identity(m)));
    }
}

TEST_CASE("invert_iso") {
    // Multiplication by 3 is invertible on Z/8 (3 * 3 = 9 = 1).
    FpMorphism f = mult(z_mod(8), 3);
    FpMorphism g = invert_iso(f);
    REQUIRE(morphism_equal(compose(g, f), FpMorphism::identity(z_mod(8))));
    REQUIRE_THROWS_AS(invert_iso(mult(z_mod(8), 2)), contract_violation);
}
