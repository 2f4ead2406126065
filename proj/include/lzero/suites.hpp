#pragma once
#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "lzero/catalogs.hpp"
#include "lzero/monoidal.hpp"
#include "lzero/sampling.hpp"

namespace lzero {

// Sampled and exhaustive property suites shared by the command-line tool
// and the acceptance harness. Each returns a plain result struct; all
// randomness flows through a caller-supplied seed.

// ---------------------------------------------------------------------------
// Base-category axioms, verified against element-level enumeration oracles

struct AbelianSuiteResult {
    long long pairs = 0;
    long long skipped_pairs = 0;  // hom-set larger than the cap
    long long morphisms = 0;
    long long failures = 0;
    std::string first_failure;
};

namespace detail {

inline std::set<std::vector<Int>> element_image(const FpMorphism& f, const ElementTable& src,
                                                const ElementTable& dst) {
    std::set<std::vector<Int>> out;
    for (const auto& x : src.elems) out.insert(apply_on_elements(f, src, dst, x));
    return out;
}

}  // namespace detail

/// Kernel, cokernel, and image/coimage data of every morphism between
/// catalog modules, checked element by element against enumeration.
inline AbelianSuiteResult run_abelian_suite(const Ring& ring, long long max_order,
                                            long long hom_cap) {
    AbelianSuiteResult res;
    auto catalog = abelian_catalog(ring, max_order);
    std::vector<ElementTable> tables;
    tables.reserve(catalog.size());
    for (const auto& m : catalog) tables.emplace_back(m);

    auto fail = [&](const std::string& what) {
        ++res.failures;
        if (res.first_failure.empty()) res.first_failure = what;
    };

    for (size_t i = 0; i < catalog.size(); ++i) {
        for (size_t j = 0; j < catalog.size(); ++j) {
            if (hom_count(catalog[i], catalog[j]) > hom_cap) {
                ++res.skipped_pairs;
                continue;
            }
            ++res.pairs;
            const ElementTable& tm = tables[i];
            const ElementTable& tn = tables[j];
            for (const auto& f : hom_enumerate(catalog[i], catalog[j])) {
                ++res.morphisms;
                KernelResult kr = kernel(f);
                CokernelResult ck = cokernel(f);
                ImageCoimage ic = image_coimage(f);

                // oracle: the set kernel is {x : f(x) = 0}
                std::set<std::vector<Int>> zero_set;
                for (const auto& x : tm.elems)
                    if (tn.is_zero(apply_on_elements(f, tm, tn, x))) zero_set.insert(x);
                ElementTable tk(kr.module);
                auto incl_image = detail::element_image(kr.incl, tk, tm);
                if (incl_image.size() != tk.elems.size()) fail("kernel inclusion not injective");
                if (incl_image != zero_set) fail("kernel does not match the vanishing set");

                // oracle: cokernel identifies exactly the image
                ElementTable tc(ck.module);
                auto proj_image = detail::element_image(ck.proj, tn, tc);
                if (proj_image.size() != tc.elems.size()) fail("cokernel projection not surjective");
                auto f_image = detail::element_image(f, tm, tn);
                std::set<std::vector<Int>> proj_kernel;
                for (const auto& x : tn.elems)
                    if (tc.is_zero(apply_on_elements(ck.proj, tn, tc, x))) proj_kernel.insert(x);
                if (proj_kernel != f_image) fail("cokernel kernel differs from the image");

                // image ~ coimage comparison is bijective on elements
                ElementTable ti(ic.image);
                ElementTable tco(ic.coimage);
                if (ti.elems.size() != tco.elems.size() ||
                    detail::element_image(ic.comparison, tco, ti).size() != ti.elems.size())
                    fail("image/coimage comparison not bijective");
                if (!is_isomorphism(ic.comparison)) fail("comparison not an isomorphism");
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// The abelian-subcategory criterion plus kernel/cokernel transport

struct CriterionSuiteResult {
    long long objects = 0;
    long long pairs = 0;
    long long exhaustive_morphisms = 0;
    long long sampled_morphisms = 0;
    long long nonmonic = 0;
    long long transport_mismatches = 0;
    std::string first_failure;
    bool ok() const { return nonmonic == 0 && transport_mismatches == 0; }
};

/// All morphisms between subcategory objects of order <= exhaustive_order,
/// plus `samples` random larger ones: the comparison map must be monic,
/// and transported kernels/cokernels must match the native category over
/// Z/p^N when the reflector is a mod-p^N reduction.
inline CriterionSuiteResult run_criterion_suite(const std::string& functor, long long exhaustive_order,
                                                long long samples, uint64_t seed,
                                                long long hom_cap = 70000) {
    Reflector f = reflector_from_name(functor);
    bool mod_reduction = functor.rfind("mod:", 0) == 0;
    Int p = 2;
    long long nn = 1;
    std::optional<Ring> native;
    if (mod_reduction) {
        auto c1 = functor.find(':'), c2 = functor.rfind(':');
        p = Int(functor.substr(c1 + 1, c2 - c1 - 1));
        nn = std::stoll(functor.substr(c2 + 1));
        native = Ring::mod_prime_power(p, nn);
    }

    CriterionSuiteResult res;
    auto fail = [&](const std::string& what) {
        if (res.first_failure.empty()) res.first_failure = what;
    };

    auto native_matches = [&](const FpMorphism& g) {
        KernelResult kd = kernel_in_subcategory(f, g);
        CokernelResult cd = cokernel_in_subcategory(f, g);
        if (!native) return true;
        FpModule ns(*native, g.source.gens, g.source.rels);
        FpModule nt(*native, g.target.gens, g.target.rels);
        FpMorphism ng(ns, nt, g.matrix);
        return normal_form(kd.module) == normal_form(kernel(ng).module) &&
               normal_form(cd.module) == normal_form(cokernel(ng).module);
    };

    // exhaustive layer
    std::vector<FpModule> objects;
    for (const auto& m : p_group_catalog(p, exhaustive_order))
        if (is_l0_complete(f, m)) objects.push_back(m);
    res.objects = static_cast<long long>(objects.size());
    for (const auto& a : objects)
        for (const auto& b : objects) {
            if (hom_count(a, b) > hom_cap) continue;
            ++res.pairs;
            for (const auto& g : hom_enumerate(a, b)) {
                ++res.exhaustive_morphisms;
                CriterionVerdict v = criterion_check(f, g);
                if (!v.monic) { ++res.nonmonic; fail("non-monic comparison map"); }
                if (!native_matches(g)) { ++res.transport_mismatches; fail("transport mismatch"); }
            }
        }

    // sampled layer: larger subcategory objects
    Rng rng(seed);
    for (long long t = 0; t < samples; ++t) {
        FpModule a = random_p_group(rng, p, mod_reduction ? nn : 3, 4);
        FpModule b = random_p_group(rng, p, mod_reduction ? nn : 3, 4);
        if (!is_l0_complete(f, a) || !is_l0_complete(f, b)) continue;
        FpMorphism g = random_morphism(rng, a, b);
        ++res.sampled_morphisms;
        CriterionVerdict v = criterion_check(f, g);
        if (!v.monic) { ++res.nonmonic; fail("non-monic comparison map (sampled)"); }
        if (!native_matches(g)) { ++res.transport_mismatches; fail("transport mismatch (sampled)"); }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Adjunction round trips

struct AdjunctionSuiteResult {
    long long pairs = 0;
    long long failures = 0;
    std::string first_failure;
    bool ok() const { return failures == 0; }
};

/// Hom_C(X, Y) <-> Hom_D(L0F X, Y) for every X in the finite catalog and
/// every subcategory object Y.
inline AdjunctionSuiteResult run_adjunction_suite(const std::string& functor, long long max_order,
                                                  long long hom_cap = 8192) {
    Reflector f = reflector_from_name(functor);
    AdjunctionSuiteResult res;
    auto xs = abelian_catalog(Ring::integers(), max_order);
    std::vector<FpModule> ys;
    for (const auto& m : xs)
        if (is_l0_complete(f, m)) ys.push_back(m);
    for (const auto& x : xs)
        for (const auto& y : ys) {
            if (hom_count(x, y) > hom_cap) continue;
            ++res.pairs;
            if (!adjunction_roundtrip(f, x, y)) {
                ++res.failures;
                if (res.first_failure.empty())
                    res.first_failure = "roundtrip failed for |X|-class " + normal_form(x).str();
            }
        }
    return res;
}

// ---------------------------------------------------------------------------
// Unit factorization, derived idempotence, projectives

struct ReflectorLawsResult {
    long long modules = 0;
    long long eta_failures = 0;
    long long idempotence_failures = 0;
    bool ok() const { return eta_failures == 0 && idempotence_failures == 0; }
};

inline ReflectorLawsResult run_reflector_laws(const std::string& functor, long long samples,
                                              uint64_t seed) {
    Reflector f = reflector_from_name(functor);
    ReflectorLawsResult res;
    Rng rng(seed);
    for (long long t = 0; t < samples; ++t) {
        FpModule m = random_module(rng, Ring::integers(), 4, 4, 20);
        ++res.modules;
        if (!eta_factorization_check(f, m)) ++res.eta_failures;
        if (!derived_idempotence_check(f, m)) ++res.idempotence_failures;
    }
    return res;
}

struct ProjectiveSuiteResult {
    long long epis = 0;
    long long lift_failures = 0;
    long long cover_failures = 0;
    bool ok() const { return lift_failures == 0 && cover_failures == 0; }
};

/// Lifting of L0F(free) against catalog epis, and enough-projectives
/// covers for every catalog object of the subcategory.
inline ProjectiveSuiteResult run_projective_suite(const std::string& functor, long long max_order,
                                                  long long max_epis = 200, long long hom_cap = 256) {
    Reflector f = reflector_from_name(functor);
    ProjectiveSuiteResult res;
    Int p = 2;
    if (auto pos = functor.find(':'); pos != std::string::npos) {
        auto rest = functor.substr(pos + 1);
        p = Int(rest.substr(0, rest.find(':')));
    }
    std::vector<FpModule> objects;
    for (const auto& m : p_group_catalog(p, max_order))
        if (is_l0_complete(f, m)) objects.push_back(m);

    FpModule free1 = FpModule::free_module(Ring::integers(), 1);
    for (const auto& a : objects) {
        for (const auto& b : objects) {
            if (res.epis >= max_epis) break;
            if (hom_count(a, b) > hom_cap) continue;
            for (const auto& g : hom_enumerate(a, b)) {
                if (res.epis >= max_epis) break;
                if (!is_epic(g)) continue;
                ++res.epis;
                if (!projective_lifting_check(f, free1, g)) ++res.lift_failures;
            }
        }
    }
    for (const auto& x : objects) {
        FpMorphism cover = enough_projectives_epi(f, x);
        if (!is_epic(cover)) ++res.cover_failures;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Monoidal coherence

struct MonoidalSuiteResult {
    long long exhaustive_tuples = 0;
    long long sampled_tuples = 0;
    long long coherence_failures = 0;
    long long tensor_mismatches = 0;
    long long hom_not_complete = 0;
    std::string failed_kind;
    std::vector<FpModule> failed_objects;
    std::optional<CoherenceOutcome> counterexample;
    bool ok() const {
        return coherence_failures == 0 && tensor_mismatches == 0 && hom_not_complete == 0;
    }
};

/// All five coherence diagrams on exhaustive cyclic tuples and random
/// larger tuples, native-tensor agreement, and internal-hom completeness.
inline MonoidalSuiteResult run_monoidal_suite(const std::string& functor, long long cyclic_order,
                                              long long samples, uint64_t seed,
                                              long long tensor_pairs = 200) {
    Reflector f = reflector_from_name(functor);
    MonoidalContext ctx(f);
    MonoidalSuiteResult res;
    bool mod_reduction = functor.rfind("mod:", 0) == 0;
    Int p = 2;
    long long nn = 1;
    std::optional<Ring> native;
    if (mod_reduction) {
        auto c1 = functor.find(':'), c2 = functor.rfind(':');
        p = Int(functor.substr(c1 + 1, c2 - c1 - 1));
        nn = std::stoll(functor.substr(c2 + 1));
        native = Ring::mod_prime_power(p, nn);
    }

    auto record_failure = [&](CoherenceKind kind, const std::vector<FpModule>& objs,
                              const CoherenceOutcome& out) {
        ++res.coherence_failures;
        if (!res.counterexample) {
            res.failed_kind = coherence_name(kind);
            res.failed_objects = objs;
            res.counterexample = out;
        }
    };

    // cyclic objects in the subcategory with order <= cyclic_order
    std::vector<FpModule> cyclics = {FpModule::zero(Ring::integers())};
    for (Int side = p; side <= cyclic_order; side *= p) {
        FpModule c = FpModule::cyclic(Ring::integers(), side);
        if (is_l0_complete(f, c)) cyclics.push_back(c);
    }

    auto run_kind = [&](CoherenceKind kind, const std::vector<FpModule>& objs) {
        CoherenceOutcome out = coherence_check(ctx, kind, objs);
        if (!out.ok) record_failure(kind, objs, out);
    };

    const auto kinds2 = {CoherenceKind::Triangle, CoherenceKind::Symmetry};
    const auto kinds3 = {CoherenceKind::Hexagon1, CoherenceKind::Hexagon2};
    for (const auto& x : cyclics)
        for (const auto& y : cyclics) {
            for (auto k : kinds2) run_kind(k, {x, y});
            ++res.exhaustive_tuples;
            for (const auto& z : cyclics) {
                for (auto k : kinds3) run_kind(k, {x, y, z});
                ++res.exhaustive_tuples;
                for (const auto& w : cyclics) {
                    run_kind(CoherenceKind::Pentagon, {x, y, z, w});
                    ++res.exhaustive_tuples;
                }
            }
        }

    // random larger tuples, all five kinds
    Rng rng(seed);
    auto random_member = [&]() {
        for (;;) {
            FpModule m = random_p_group(rng, p, mod_reduction ? nn : 2, 2);
            if (is_l0_complete(f, m)) return m;
        }
    };
    for (long long t = 0; t < samples; ++t) {
        std::vector<FpModule> tuple = {random_member(), random_member(), random_member(),
                                       random_member()};
        ++res.sampled_tuples;
        run_kind(CoherenceKind::Pentagon, tuple);
        run_kind(CoherenceKind::Triangle, {tuple[0], tuple[1]});
        run_kind(CoherenceKind::Symmetry, {tuple[0], tuple[1]});
        run_kind(CoherenceKind::Hexagon1, {tuple[0], tuple[1], tuple[2]});
        run_kind(CoherenceKind::Hexagon2, {tuple[0], tuple[1], tuple[2]});
    }

    // strong monoidality made concrete: the transported tensor agrees with
    // the native one
    if (native) {
        for (long long t = 0; t < tensor_pairs; ++t) {
            FpModule x = random_member();
            FpModule y = random_member();
            FpModule nx(*native, x.gens, x.rels);
            FpModule ny(*native, y.gens, y.rels);
            if (!(normal_form(ctx.tensor_obj(x, y)) == normal_form(tensor(nx, ny))))
                ++res.tensor_mismatches;
            if (!is_l0_complete(f, internal_hom(ctx, x, y).module)) ++res.hom_not_complete;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Best-approximation membership

struct BestApproxSuiteResult {
    long long checks = 0;
    long long failures = 0;
    bool ok() const { return failures == 0; }
};

inline BestApproxSuiteResult run_best_approx_suite(const std::string& inner,
                                                   const std::string& outer, long long samples,
                                                   uint64_t seed) {
    Reflector fi = reflector_from_name(inner);
    Reflector fo = reflector_from_name(outer);
    BestApproxSuiteResult res;
    Rng rng(seed);
    for (long long t = 0; t < samples; ++t) {
        FpModule m = random_module(rng, Ring::integers(), 4, 4, 16);
        ++res.checks;
        if (!best_approx_membership(fi, fo, m)) ++res.failures;
    }
    return res;
}

}  // namespace lzero
