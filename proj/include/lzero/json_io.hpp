#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "lzero/graded_towers.hpp"
#include "lzero/reflection.hpp"

namespace lzero::io {

// Input documents are validated strictly: unknown fields and shape
// mismatches are rejected with the offending JSON path, and integers
// round-trip exactly (values beyond 64 bits travel as decimal strings).

using json = nlohmann::ordered_json;

inline json int_to_json(const Int& x) {
    if (x >= std::numeric_limits<long long>::min() && x <= std::numeric_limits<long long>::max())
        return x.convert_to<long long>();
    return x.str();
}

inline Int int_from_json(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_string()) {
        try {
            return Int(j.get<std::string>());
        } catch (const std::exception&) {
            throw malformed_input(path + ": not an integer literal");
        }
    }
    throw malformed_input(path + ": expected an integer (number or decimal string)");
}

inline void reject_unknown_fields(const json& j, const std::vector<std::string>& allowed,
                                  const std::string& path) {
    if (!j.is_object()) throw malformed_input(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw malformed_input(path + ": unknown field '" + it.key() + "'");
    }
}

inline const json& expect_field(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw malformed_input(path + ": missing field '" + key + "'");
    return *it;
}

inline long long ll_from_json(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw malformed_input(path + ": expected an integer");
    return j.get<long long>();
}

// ---------------------------------------------------------------------------
// Rings and modules

inline json ring_to_json(const Ring& r) {
    json j;
    switch (r.kind) {
        case RingKind::Integers: j["base"] = "Z"; break;
        case RingKind::ModPrimePower:
            j["base"] = "Z/p^N";
            j["p"] = int_to_json(r.p);
            j["N"] = r.n;
            break;
        case RingKind::PAdic:
            j["base"] = "Zp";
            j["p"] = int_to_json(r.p);
            break;
    }
    return j;
}

inline Ring ring_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw malformed_input(path + ": expected a ring object");
    std::string base = expect_field(j, "base", path).get<std::string>();
    if (base == "Z") {
        reject_unknown_fields(j, {"base"}, path);
        return Ring::integers();
    }
    if (base == "Z/p^N") {
        reject_unknown_fields(j, {"base", "p", "N"}, path);
        return Ring::mod_prime_power(int_from_json(expect_field(j, "p", path), path + ".p"),
                                     ll_from_json(expect_field(j, "N", path), path + ".N"));
    }
    if (base == "Zp") {
        reject_unknown_fields(j, {"base", "p"}, path);
        return Ring::p_adic(int_from_json(expect_field(j, "p", path), path + ".p"));
    }
    throw malformed_input(path + ".base: expected one of \"Z\", \"Z/p^N\", \"Zp\"");
}

/// Relations travel column-wise: one array per relation vector.
inline json relations_to_json(const IntMatrix& rels) {
    json cols = json::array();
    for (long long c = 0; c < rels.cols(); ++c) {
        json col = json::array();
        for (long long r = 0; r < rels.rows(); ++r) col.push_back(int_to_json(rels.at(r, c)));
        cols.push_back(std::move(col));
    }
    return cols;
}

inline IntMatrix relations_from_json(const json& j, long long gens, const std::string& path) {
    if (!j.is_array()) throw malformed_input(path + ": expected an array of relation columns");
    IntMatrix rels(gens, static_cast<long long>(j.size()));
    for (size_t c = 0; c < j.size(); ++c) {
        const json& col = j[c];
        std::string cpath = path + "[" + std::to_string(c) + "]";
        if (!col.is_array() || static_cast<long long>(col.size()) != gens)
            throw malformed_input(cpath + ": relation must list one entry per generator");
        for (size_t r = 0; r < col.size(); ++r)
            rels.at(static_cast<long long>(r), static_cast<long long>(c)) =
                int_from_json(col[r], cpath + "[" + std::to_string(r) + "]");
    }
    return rels;
}

/// Morphism matrices travel row-wise (one array per target generator).
inline json matrix_to_json(const IntMatrix& m) {
    json rows = json::array();
    for (long long r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (long long c = 0; c < m.cols(); ++c) row.push_back(int_to_json(m.at(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline IntMatrix matrix_from_json(const json& j, long long rows, long long cols,
                                  const std::string& path) {
    if (!j.is_array() || static_cast<long long>(j.size()) != rows)
        throw malformed_input(path + ": expected " + std::to_string(rows) + " matrix rows");
    IntMatrix m(rows, cols);
    for (size_t r = 0; r < j.size(); ++r) {
        const json& row = j[r];
        std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<long long>(row.size()) != cols)
            throw malformed_input(rpath + ": expected " + std::to_string(cols) + " entries");
        for (size_t c = 0; c < row.size(); ++c)
            m.at(static_cast<long long>(r), static_cast<long long>(c)) =
                int_from_json(row[c], rpath + "[" + std::to_string(c) + "]");
    }
    return m;
}

inline json module_to_json(const FpModule& m) {
    json j;
    j["ring"] = ring_to_json(m.ring);
    j["generators"] = m.gens;
    j["relations"] = relations_to_json(m.rels);
    return j;
}

inline FpModule module_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"ring", "generators", "relations"}, path);
    Ring ring = ring_from_json(expect_field(j, "ring", path), path + ".ring");
    long long gens = ll_from_json(expect_field(j, "generators", path), path + ".generators");
    if (gens < 0) throw malformed_input(path + ".generators: must be nonnegative");
    IntMatrix rels = relations_from_json(expect_field(j, "relations", path), gens, path + ".relations");
    try {
        return FpModule(ring, gens, std::move(rels));
    } catch (const malformed_input& e) {
        throw malformed_input(path + ": " + e.what());
    }
}

inline json morphism_to_json(const FpMorphism& f) {
    json j;
    j["source"] = module_to_json(f.source);
    j["target"] = module_to_json(f.target);
    j["matrix"] = matrix_to_json(f.matrix);
    return j;
}

inline FpMorphism morphism_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"source", "target", "matrix"}, path);
    FpModule src = module_from_json(expect_field(j, "source", path), path + ".source");
    FpModule dst = module_from_json(expect_field(j, "target", path), path + ".target");
    IntMatrix mat = matrix_from_json(expect_field(j, "matrix", path), dst.gens, src.gens,
                                     path + ".matrix");
    try {
        return FpMorphism(std::move(src), std::move(dst), std::move(mat));
    } catch (const contract_violation& e) {
        throw malformed_input(path + ".matrix: " + e.what());
    }
}

inline json normal_form_to_json(const NormalForm& nf) {
    json j;
    j["free_rank"] = nf.free_rank;
    json factors = json::array();
    for (const Int& d : nf.invariant_factors) factors.push_back(int_to_json(d));
    j["invariant_factors"] = std::move(factors);
    return j;
}

// ---------------------------------------------------------------------------
// Rules, graded modules, towers, elements

inline json rule_to_json(const ExpRule& r) {
    json j;
    j["a"] = r.a;
    j["b"] = r.b;
    if (r.q != 1) j["q"] = r.q;
    if (r.cap) j["cap"] = *r.cap;
    return j;
}

inline ExpRule rule_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"a", "b", "q", "cap"}, path);
    long long a = ll_from_json(expect_field(j, "a", path), path + ".a");
    long long b = ll_from_json(expect_field(j, "b", path), path + ".b");
    long long q = j.contains("q") ? ll_from_json(j["q"], path + ".q") : 1;
    std::optional<long long> cap;
    if (j.contains("cap")) cap = ll_from_json(j["cap"], path + ".cap");
    try {
        return ExpRule(a, b, cap, q);
    } catch (const malformed_input& e) {
        throw malformed_input(path + ": " + e.what());
    }
}

inline json graded_to_json(const GradedModule& m) {
    json j;
    j["p"] = int_to_json(m.p);
    json comps = json::array();
    for (const auto& s : m.segs) {
        json c;
        c["from"] = s.from;
        c["kind"] = s.free ? "free" : "cyclic";
        if (!s.free) c["exp"] = rule_to_json(s.exp);
        comps.push_back(std::move(c));
    }
    j["components"] = std::move(comps);
    return j;
}

inline GradedModule graded_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"p", "components"}, path);
    Int p = int_from_json(expect_field(j, "p", path), path + ".p");
    const json& comps = expect_field(j, "components", path);
    if (!comps.is_array() || comps.empty())
        throw malformed_input(path + ".components: expected a non-empty array");
    std::vector<GradedSegment> segs;
    for (size_t i = 0; i < comps.size(); ++i) {
        std::string cpath = path + ".components[" + std::to_string(i) + "]";
        reject_unknown_fields(comps[i], {"from", "kind", "exp"}, cpath);
        GradedSegment s;
        s.from = ll_from_json(expect_field(comps[i], "from", cpath), cpath + ".from");
        std::string kind = expect_field(comps[i], "kind", cpath).get<std::string>();
        if (kind == "free") {
            s.free = true;
            if (comps[i].contains("exp"))
                throw malformed_input(cpath + ": free components take no exponent rule");
        } else if (kind == "cyclic") {
            s.free = false;
            s.exp = rule_from_json(expect_field(comps[i], "exp", cpath), cpath + ".exp");
        } else {
            throw malformed_input(cpath + ".kind: expected \"cyclic\" or \"free\"");
        }
        segs.push_back(s);
    }
    try {
        return GradedModule(std::move(p), std::move(segs));
    } catch (const malformed_input& e) {
        throw malformed_input(path + ": " + e.what());
    }
}

inline json element_to_json(const SymbolicElement& x) {
    json j;
    j["parent"] = graded_to_json(x.parent);
    json segs = json::array();
    for (const auto& s : x.segs) {
        json e;
        e["from"] = s.from;
        if (s.zero) {
            e["zero"] = true;
        } else {
            e["unit"] = int_to_json(s.unit);
            e["val"] = rule_to_json(s.val);
        }
        segs.push_back(std::move(e));
    }
    j["segments"] = std::move(segs);
    return j;
}

inline SymbolicElement element_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"parent", "segments"}, path);
    GradedModule parent = graded_from_json(expect_field(j, "parent", path), path + ".parent");
    const json& segs = expect_field(j, "segments", path);
    if (!segs.is_array()) throw malformed_input(path + ".segments: expected an array");
    std::vector<ElementSegment> out;
    for (size_t i = 0; i < segs.size(); ++i) {
        std::string spath = path + ".segments[" + std::to_string(i) + "]";
        reject_unknown_fields(segs[i], {"from", "zero", "unit", "val"}, spath);
        ElementSegment s;
        s.from = ll_from_json(expect_field(segs[i], "from", spath), spath + ".from");
        if (segs[i].contains("zero") && segs[i]["zero"].get<bool>()) {
            s.zero = true;
        } else {
            s.zero = false;
            s.unit = int_from_json(expect_field(segs[i], "unit", spath), spath + ".unit");
            s.val = rule_from_json(expect_field(segs[i], "val", spath), spath + ".val");
        }
        out.push_back(s);
    }
    try {
        return SymbolicElement(std::move(parent), std::move(out));
    } catch (const malformed_input& e) {
        throw malformed_input(path + ": " + e.what());
    }
}

inline const char* tower_kind_name(TowerSegmentKind k) {
    switch (k) {
        case TowerSegmentKind::CompletedCyclic: return "completed-cyclic";
        case TowerSegmentKind::CompletedFree: return "completed-free";
        case TowerSegmentKind::HomCyclic: return "hom-cyclic";
        case TowerSegmentKind::Zero: return "zero";
    }
    return "?";
}

inline json tower_to_json(const Tower& t) {
    json j;
    j["p"] = int_to_json(t.p);
    json segs = json::array();
    for (const auto& s : t.segs) {
        json e;
        e["from"] = s.from;
        e["kind"] = tower_kind_name(s.kind);
        if (s.kind == TowerSegmentKind::CompletedCyclic || s.kind == TowerSegmentKind::HomCyclic)
            e["exp"] = rule_to_json(s.exp);
        segs.push_back(std::move(e));
    }
    j["segments"] = std::move(segs);
    return j;
}

inline Tower tower_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j, {"p", "segments"}, path);
    Int p = int_from_json(expect_field(j, "p", path), path + ".p");
    const json& segs = expect_field(j, "segments", path);
    if (!segs.is_array()) throw malformed_input(path + ".segments: expected an array");
    std::vector<TowerSegment> out;
    for (size_t i = 0; i < segs.size(); ++i) {
        std::string spath = path + ".segments[" + std::to_string(i) + "]";
        reject_unknown_fields(segs[i], {"from", "kind", "exp"}, spath);
        TowerSegment s;
        s.from = ll_from_json(expect_field(segs[i], "from", spath), spath + ".from");
        std::string kind = expect_field(segs[i], "kind", spath).get<std::string>();
        if (kind == "completed-cyclic") s.kind = TowerSegmentKind::CompletedCyclic;
        else if (kind == "completed-free") s.kind = TowerSegmentKind::CompletedFree;
        else if (kind == "hom-cyclic") s.kind = TowerSegmentKind::HomCyclic;
        else if (kind == "zero") s.kind = TowerSegmentKind::Zero;
        else throw malformed_input(spath + ".kind: unknown tower segment kind '" + kind + "'");
        if (s.kind == TowerSegmentKind::CompletedCyclic || s.kind == TowerSegmentKind::HomCyclic)
            s.exp = rule_from_json(expect_field(segs[i], "exp", spath), spath + ".exp");
        out.push_back(s);
    }
    try {
        return Tower(std::move(p), std::move(out));
    } catch (const malformed_input& e) {
        throw malformed_input(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Certificates

inline json certificate_to_json(const Certificate& c) {
    json j;
    j["kind"] = cert_kind_name(c.kind);
    j["p"] = int_to_json(c.p);
    j["window"] = c.window;
    if (c.tower) j["tower"] = tower_to_json(*c.tower);
    if (c.module) j["module"] = graded_to_json(*c.module);
    if (c.stabilization_offset) j["stabilization_offset"] = *c.stabilization_offset;
    if (!c.descents.empty()) {
        j["level"] = c.ml_level;
        json ds = json::array();
        for (const auto& d : c.descents) {
            json e;
            e["grade"] = d.grade;
            e["from_level"] = d.from_level;
            e["to_level"] = d.to_level;
            e["exp_before"] = d.exp_before;
            e["exp_after"] = d.exp_after;
            e["at_level"] = d.at_level;
            ds.push_back(std::move(e));
        }
        j["descents"] = std::move(ds);
    }
    if (c.map_rule) j["map_rule"] = rule_to_json(*c.map_rule);
    if (c.x_elem) j["x"] = element_to_json(*c.x_elem);
    if (c.y_elem) j["y"] = element_to_json(*c.y_elem);
    if (c.kind == CertKind::IdempotenceHolds) j["rule_level"] = c.rule_level;
    j["trace"] = c.trace;
    return j;
}

inline Certificate certificate_from_json(const json& j, const std::string& path) {
    reject_unknown_fields(j,
                          {"kind", "p", "window", "tower", "module", "stabilization_offset",
                           "level", "descents", "map_rule", "x", "y", "rule_level", "trace"},
                          path);
    Certificate c;
    std::string kind = expect_field(j, "kind", path).get<std::string>();
    if (kind == "MLFailure") c.kind = CertKind::MLFailure;
    else if (kind == "MLStabilized") c.kind = CertKind::MLStabilized;
    else if (kind == "MiddleExactnessFailure") c.kind = CertKind::MiddleExactnessFailure;
    else if (kind == "IdempotenceHolds") c.kind = CertKind::IdempotenceHolds;
    else throw malformed_input(path + ".kind: unknown certificate kind '" + kind + "'");
    c.p = int_from_json(expect_field(j, "p", path), path + ".p");
    c.window = ll_from_json(expect_field(j, "window", path), path + ".window");
    if (j.contains("tower")) c.tower = tower_from_json(j["tower"], path + ".tower");
    if (j.contains("module")) c.module = graded_from_json(j["module"], path + ".module");
    if (j.contains("stabilization_offset"))
        c.stabilization_offset = ll_from_json(j["stabilization_offset"], path + ".stabilization_offset");
    if (j.contains("level")) c.ml_level = ll_from_json(j["level"], path + ".level");
    if (j.contains("descents")) {
        for (size_t i = 0; i < j["descents"].size(); ++i) {
            const json& e = j["descents"][i];
            std::string dpath = path + ".descents[" + std::to_string(i) + "]";
            reject_unknown_fields(
                e, {"grade", "from_level", "to_level", "exp_before", "exp_after", "at_level"}, dpath);
            MlDescent d;
            d.grade = ll_from_json(expect_field(e, "grade", dpath), dpath + ".grade");
            d.from_level = ll_from_json(expect_field(e, "from_level", dpath), dpath + ".from_level");
            d.to_level = ll_from_json(expect_field(e, "to_level", dpath), dpath + ".to_level");
            d.exp_before = ll_from_json(expect_field(e, "exp_before", dpath), dpath + ".exp_before");
            d.exp_after = ll_from_json(expect_field(e, "exp_after", dpath), dpath + ".exp_after");
            d.at_level = ll_from_json(expect_field(e, "at_level", dpath), dpath + ".at_level");
            c.descents.push_back(d);
        }
    }
    if (j.contains("map_rule")) c.map_rule = rule_from_json(j["map_rule"], path + ".map_rule");
    if (j.contains("x")) c.x_elem = element_from_json(j["x"], path + ".x");
    if (j.contains("y")) c.y_elem = element_from_json(j["y"], path + ".y");
    if (j.contains("rule_level")) c.rule_level = j["rule_level"].get<bool>();
    if (j.contains("trace"))
        for (const auto& line : j["trace"]) c.trace.push_back(line.get<std::string>());
    return c;
}

}  // namespace lzero::io
