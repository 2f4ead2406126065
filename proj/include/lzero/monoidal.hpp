#pragma once
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "lzero/reflection.hpp"

namespace lzero {

/// Symmetric monoidal structure transported onto the subcategory of
/// L0F-complete objects: X (x) Y is L0F of the ambient tensor, and every
/// structure map is assembled from the ambient one, the unit maps, and
/// their inverses.
class MonoidalContext {
  public:
    explicit MonoidalContext(Reflector f)
        : f_(std::move(f)),
          unit_object_(l0(f_, FpModule::free_module(f_.ring, 1))),
          cache_(std::make_shared<Cache>()) {
        if (unit_object_.ring != f_.ring)
            throw unsupported_input(
                "monoidal transport needs a reflector staying in its base ring; completion "
                "reflectors are handled at the tower level");
        if (!is_l0_complete(f_, unit_object_))
            throw internal_error("monoidal unit is not L0F-complete");
    }

    const Reflector& functor() const { return f_; }
    const FpModule& unit_object() const { return unit_object_; }

    void require_member(const FpModule& x, const char* who) const {
        if (!is_l0_complete(f_, x))
            throw contract_violation(std::string(who) + ": object is not L0F-complete");
    }

    FpModule tensor_obj(const FpModule& x, const FpModule& y) const {
        require_member(x, "tensor");
        require_member(y, "tensor");
        return l0(f_, tensor(x, y));
    }

    FpMorphism tensor_mor(const FpMorphism& a, const FpMorphism& b) const {
        return l0_on_morphism(f_, tensor_morphisms(a, b));
    }

    /// chi: X (x) Y -> Y (x) X, reflected from the ambient swap.
    FpMorphism braiding(const FpModule& x, const FpModule& y) const {
        require_member(x, "braiding");
        require_member(y, "braiding");
        FpModule txy = tensor(x, y), tyx = tensor(y, x);
        IntMatrix swap(tyx.gens, txy.gens);
        for (long long i = 0; i < x.gens; ++i)
            for (long long j = 0; j < y.gens; ++j) swap.at(j * x.gens + i, i * y.gens + j) = 1;
        FpMorphism ambient(unchecked, txy, tyx, std::move(swap));
        return l0_on_morphism(f_, ambient);
    }

    /// Associator (X (x) Y) (x) Z -> X (x) (Y (x) Z) as the composite of
    /// collapse isomorphisms and the reflected ambient associator.
    FpMorphism associator(const FpModule& x, const FpModule& y, const FpModule& z) const {
        require_member(x, "associator");
        require_member(y, "associator");
        require_member(z, "associator");
        FpModule txy = tensor(x, y);
        FpModule tyz = tensor(y, z);
        // Ambient associator is the identity on flattened indices.
        FpModule t_l = tensor(txy, z), t_r = tensor(x, tyz);
        FpMorphism ambient(unchecked, t_l, t_r, IntMatrix::identity(t_l.gens));
        FpMorphism mid = l0_on_morphism(f_, ambient);
        FpMorphism left_expand = expand_left(txy, z);    // l0(T(T(X,Y),Z)) -> l0(T(DXY, Z))
        FpMorphism right_expand = expand_right(x, tyz);  // l0(T(X,T(Y,Z))) -> l0(T(X, DYZ))
        return compose(right_expand, compose(mid, inverse(left_expand)));
    }

    /// rho: X (x) 1 -> X.
    FpMorphism right_unitor(const FpModule& x) const {
        require_member(x, "right_unitor");
        FpModule r1 = FpModule::free_module(f_.ring, 1);
        FpModule txr = tensor(x, r1);
        FpMorphism ambient(unchecked, txr, x, IntMatrix::identity(x.gens));
        FpMorphism down = l0_on_morphism(f_, ambient);          // l0(T(X,R1)) -> l0(X)
        FpMorphism e = expand_right(x, r1);                     // l0(T(X,R1)) -> X (x) 1
        FpMorphism unit_inv = inverse(l0_with_unit(f_, x).unit);
        return compose(unit_inv, compose(down, inverse(e)));
    }

    /// lambda: 1 (x) X -> X, mirror of the right unitor.
    FpMorphism left_unitor(const FpModule& x) const {
        require_member(x, "left_unitor");
        FpModule r1 = FpModule::free_module(f_.ring, 1);
        FpModule trx = tensor(r1, x);
        FpMorphism ambient(unchecked, trx, x, IntMatrix::identity(x.gens));
        FpMorphism down = l0_on_morphism(f_, ambient);
        FpMorphism e = expand_left(r1, x);  // l0(T(R1,X)) -> 1 (x) X
        FpMorphism unit_inv = inverse(l0_with_unit(f_, x).unit);
        return compose(unit_inv, compose(down, inverse(e)));
    }

    /// Cached isomorphism inversion; these maps recur in every composite.
    FpMorphism inverse(const FpMorphism& iso) const {
        std::string key = morphism_key(iso);
        {
            std::lock_guard<std::mutex> lock(cache_->mutex);
            auto it = cache_->inverses.find(key);
            if (it != cache_->inverses.end()) return it->second;
        }
        FpMorphism inv = invert_iso(iso);
        std::lock_guard<std::mutex> lock(cache_->mutex);
        cache_->inverses.emplace(std::move(key), inv);
        return inv;
    }

    /// l0(T(W, Z)) -> l0(T(L0F W, Z)): reflect (unit_W (x) id_Z). An
    /// isomorphism because the reflector is strong monoidal.
    FpMorphism expand_left(const FpModule& w, const FpModule& z) const {
        return l0_on_morphism(f_, tensor_morphisms(l0_with_unit(f_, w).unit,
                                                   FpMorphism::identity(z)));
    }

    FpMorphism expand_right(const FpModule& x, const FpModule& w) const {
        return l0_on_morphism(f_, tensor_morphisms(FpMorphism::identity(x),
                                                   l0_with_unit(f_, w).unit));
    }

  private:
    static std::string morphism_key(const FpMorphism& m) {
        return m.source.ring.str() + "/" + std::to_string(m.source.gens) + m.source.rels.str() +
               "->" + m.target.ring.str() + "/" + std::to_string(m.target.gens) +
               m.target.rels.str() + "#" + m.matrix.str();
    }

    Reflector f_;
    FpModule unit_object_;
    struct Cache {
        std::mutex mutex;
        std::map<std::string, FpMorphism> inverses;
    };
    std::shared_ptr<Cache> cache_;
};

enum class CoherenceKind { Pentagon, Triangle, Hexagon1, Hexagon2, Symmetry };

inline const char* coherence_name(CoherenceKind k) {
    switch (k) {
        case CoherenceKind::Pentagon: return "pentagon";
        case CoherenceKind::Triangle: return "triangle";
        case CoherenceKind::Hexagon1: return "hexagon1";
        case CoherenceKind::Hexagon2: return "hexagon2";
        case CoherenceKind::Symmetry: return "symmetry";
    }
    return "?";
}

inline CoherenceKind coherence_from_name(const std::string& s) {
    if (s == "pentagon") return CoherenceKind::Pentagon;
    if (s == "triangle") return CoherenceKind::Triangle;
    if (s == "hexagon1") return CoherenceKind::Hexagon1;
    if (s == "hexagon2") return CoherenceKind::Hexagon2;
    if (s == "symmetry") return CoherenceKind::Symmetry;
    throw malformed_input("unknown coherence diagram '" + s + "'");
}

inline long long coherence_arity(CoherenceKind k) {
    switch (k) {
        case CoherenceKind::Pentagon: return 4;
        case CoherenceKind::Triangle: return 2;
        case CoherenceKind::Hexagon1:
        case CoherenceKind::Hexagon2: return 3;
        case CoherenceKind::Symmetry: return 2;
    }
    return 0;
}

/// Both composite paths of a coherence diagram; `ok` when they agree
/// modulo target relations. Failures keep the two paths as the serialized
/// counterexample.
struct CoherenceOutcome {
    bool ok = false;
    FpMorphism path1, path2;
};

inline CoherenceOutcome coherence_check(const MonoidalContext& ctx, CoherenceKind kind,
                                        const std::vector<FpModule>& objects) {
    if (static_cast<long long>(objects.size()) != coherence_arity(kind))
        throw malformed_input(std::string("coherence diagram '") + coherence_name(kind) +
                              "' needs " + std::to_string(coherence_arity(kind)) + " objects");
    auto id = [](const FpModule& m) { return FpMorphism::identity(m); };
    switch (kind) {
        case CoherenceKind::Pentagon: {
            const FpModule &w = objects[0], &x = objects[1], &y = objects[2], &z = objects[3];
            FpModule wx = ctx.tensor_obj(w, x);
            FpModule yz = ctx.tensor_obj(y, z);
            FpModule xy = ctx.tensor_obj(x, y);
            FpMorphism top = compose(ctx.associator(w, x, yz), ctx.associator(wx, y, z));
            FpMorphism bottom = compose(ctx.tensor_mor(id(w), ctx.associator(x, y, z)),
                                        compose(ctx.associator(w, xy, z),
                                                ctx.tensor_mor(ctx.associator(w, x, y), id(z))));
            return {morphism_equal(top, bottom), top, bottom};
        }
        case CoherenceKind::Triangle: {
            const FpModule &x = objects[0], &y = objects[1];
            FpMorphism via_assoc = compose(ctx.tensor_mor(id(x), ctx.left_unitor(y)),
                                           ctx.associator(x, ctx.unit_object(), y));
            FpMorphism direct = ctx.tensor_mor(ctx.right_unitor(x), id(y));
            return {morphism_equal(via_assoc, direct), via_assoc, direct};
        }
        case CoherenceKind::Hexagon1: {
            const FpModule &x = objects[0], &y = objects[1], &z = objects[2];
            FpModule yz = ctx.tensor_obj(y, z);
            FpMorphism p1 = compose(ctx.associator(y, z, x),
                                    compose(ctx.braiding(x, yz), ctx.associator(x, y, z)));
            FpMorphism p2 = compose(ctx.tensor_mor(id(y), ctx.braiding(x, z)),
                                    compose(ctx.associator(y, x, z),
                                            ctx.tensor_mor(ctx.braiding(x, y), id(z))));
            return {morphism_equal(p1, p2), p1, p2};
        }
        case CoherenceKind::Hexagon2: {
            const FpModule &x = objects[0], &y = objects[1], &z = objects[2];
            FpModule xy = ctx.tensor_obj(x, y);
            FpMorphism p1 = compose(ctx.inverse(ctx.associator(z, x, y)),
                                    compose(ctx.braiding(xy, z),
                                            ctx.inverse(ctx.associator(x, y, z))));
            FpMorphism p2 = compose(ctx.tensor_mor(ctx.braiding(x, z), id(y)),
                                    compose(ctx.inverse(ctx.associator(x, z, y)),
                                            ctx.tensor_mor(id(x), ctx.braiding(y, z))));
            return {morphism_equal(p1, p2), p1, p2};
        }
        case CoherenceKind::Symmetry: {
            const FpModule &x = objects[0], &y = objects[1];
            FpMorphism roundtrip = compose(ctx.braiding(y, x), ctx.braiding(x, y));
            FpMorphism ident = FpMorphism::identity(ctx.tensor_obj(x, y));
            return {morphism_equal(roundtrip, ident), roundtrip, ident};
        }
    }
    throw internal_error("coherence_check: unhandled kind");
}

/// Internal hom in the subcategory agrees with the ambient one; the
/// result is itself L0F-complete, which is asserted here.
inline HomModule internal_hom(const MonoidalContext& ctx, const FpModule& x, const FpModule& y) {
    ctx.require_member(x, "internal_hom");
    ctx.require_member(y, "internal_hom");
    HomModule h = hom_module(x, y);
    if (!is_l0_complete(ctx.functor(), h.module))
        throw internal_error("internal hom left the subcategory");
    return h;
}

/// Currying bijection Hom(Y (x) X, Z) <-> Hom(Y, [X, Z]) realized on
/// enumerated hom-sets.
inline bool closedness_check(const MonoidalContext& ctx, const FpModule& x, const FpModule& y,
                             const FpModule& z) {
    ctx.require_member(x, "closedness_check");
    ctx.require_member(y, "closedness_check");
    ctx.require_member(z, "closedness_check");
    HomModule hom_xz = internal_hom(ctx, x, z);
    FpModule yx_ambient = tensor(y, x);
    L0Result ld = l0_with_unit(ctx.functor(), yx_ambient);
    FpModule yx = ld.module;  // Y (x) X in the subcategory

    auto curry = [&](const FpMorphism& g) {
        FpMorphism ambient = compose(g, ld.unit);  // T(Y,X) -> Z
        IntMatrix curried(hom_xz.module.gens, y.gens);
        for (long long b = 0; b < y.gens; ++b) {
            IntMatrix slice(z.gens, x.gens);
            for (long long c = 0; c < z.gens; ++c)
                for (long long a = 0; a < x.gens; ++a)
                    slice.at(c, a) = ambient.matrix.at(c, b * x.gens + a);
            auto coords = hom_xz.coords(slice);
            if (!coords) throw internal_error("closedness_check: curry left the hom lattice");
            for (long long i = 0; i < hom_xz.module.gens; ++i)
                curried.at(i, b) = (*coords)[static_cast<size_t>(i)];
        }
        return FpMorphism(y, hom_xz.module, std::move(curried));
    };

    auto uncurry = [&](const FpMorphism& g) {
        IntMatrix ambient(z.gens, yx_ambient.gens);
        for (long long b = 0; b < y.gens; ++b) {
            IntMatrix slice(z.gens, x.gens);
            for (long long i = 0; i < hom_xz.module.gens; ++i) {
                const Int& w = g.matrix.at(i, b);
                if (w == 0) continue;
                for (long long c = 0; c < z.gens; ++c)
                    for (long long a = 0; a < x.gens; ++a)
                        slice.at(c, a) += w * hom_xz.basis[static_cast<size_t>(i)].at(c, a);
            }
            for (long long c = 0; c < z.gens; ++c)
                for (long long a = 0; a < x.gens; ++a) ambient.at(c, b * x.gens + a) = slice.at(c, a);
        }
        return FpMorphism(yx, z, ambient * ld.section);
    };

    auto maps_tensor = hom_enumerate(yx, z);
    auto maps_curried = hom_enumerate(y, hom_xz.module);
    if (maps_tensor.size() != maps_curried.size()) return false;
    for (const auto& g : maps_tensor)
        if (!morphism_equal(uncurry(curry(g)), g)) return false;
    for (const auto& g : maps_curried)
        if (!morphism_equal(curry(uncurry(g)), g)) return false;
    return true;
}

}  // namespace lzero
