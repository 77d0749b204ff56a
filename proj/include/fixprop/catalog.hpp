#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "classify.hpp"
#include "group_stats.hpp"
#include "nucleus.hpp"

namespace fixprop {

// Bundled wreath recursions paired with the rational maps they belong to in
// the literature.  The recursions are shipped data, accepted only because
// they pass the validation battery below; the classification expectations
// are re-derived at load time, never trusted.
struct CatalogEntry {
    std::string name;
    Automaton automaton;
    std::string map_expr;
    std::string field_spec;
    bool expect_exceptional = false;
    bool expect_lattes = false;
    bool expect_chebyshev = false;
    std::string provenance;

    // filled by validation
    NucleusResult nucleus_result;
    Classifier::Verdict derived_exceptional = Classifier::Verdict::unknown;
    bool n1_has_finite_ends = false;
    bool consistent = false;
};

namespace catalogdetail {

inline const std::vector<std::pair<const char*, const char*>>& builtin_entries() {
    static const std::vector<std::pair<const char*, const char*>> entries = {
        {"odometer", R"json({
  "name": "odometer",
  "automaton": {
    "name": "odometer", "alphabet_size": 2,
    "states": {"a": {"perm": [1, 0], "rest": ["id", "a"]}},
    "generators": ["a"]
  },
  "map": "x^2",
  "field": "GF(3)",
  "expect": {"exceptional": false, "lattes": false, "chebyshev_conjugate": false},
  "provenance": "binary adding machine; the standard recursion for the squaring map"
})json"},
        {"chebyshev2", R"json({
  "name": "chebyshev2",
  "automaton": {
    "name": "chebyshev2", "alphabet_size": 2,
    "states": {
      "a": {"perm": [1, 0], "rest": ["id", "id"]},
      "b": {"perm": [0, 1], "rest": ["a", "b"]}
    },
    "generators": ["a", "b"]
  },
  "map": "x^2-2",
  "field": "GF(3)",
  "expect": {"exceptional": true, "lattes": false, "chebyshev_conjugate": true},
  "provenance": "infinite dihedral recursion attached to the degree-2 Chebyshev polynomial"
})json"},
        {"basilica", R"json({
  "name": "basilica",
  "automaton": {
    "name": "basilica", "alphabet_size": 2,
    "states": {
      "a": {"perm": [1, 0], "rest": ["b", "id"]},
      "b": {"perm": [0, 1], "rest": ["a", "id"]}
    },
    "generators": ["a", "b"]
  },
  "map": "x^2-1",
  "field": "GF(3)",
  "expect": {"exceptional": false, "lattes": false, "chebyshev_conjugate": false},
  "provenance": "basilica group recursion for the map with a superattracting 2-cycle"
})json"},
        {"z2plusi", R"json({
  "name": "z2plusi",
  "automaton": {
    "name": "z2plusi", "alphabet_size": 2,
    "states": {
      "a": {"perm": [1, 0], "rest": ["id", "id"]},
      "b": {"perm": [0, 1], "rest": ["a", "c"]},
      "c": {"perm": [0, 1], "rest": ["b", "id"]}
    },
    "generators": ["a", "b", "c"]
  },
  "map": "x^2+t",
  "field": "GF(3^2)",
  "expect": {"exceptional": false, "lattes": false, "chebyshev_conjugate": false},
  "provenance": "recursion for the quadratic with strictly preperiodic finite critical point (t^2 = -1)"
})json"},
    };
    return entries;
}

inline std::string data_dir() {
    if (const char* env = std::getenv("FIXPROP_DATA_DIR"); env && *env) return env;
#ifdef FIXPROP_DEFAULT_DATA_DIR
    return FIXPROP_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

} // namespace catalogdetail

inline std::vector<std::string> catalog_names() {
    std::vector<std::string> names;
    for (auto& [n, text] : catalogdetail::builtin_entries()) names.push_back(n);
    return names;
}

// Consistency between the tree side and the map side: the paired map is
// dynamically exceptional iff some nontrivial N_1 element of the nucleus
// fixes only finitely many ends.
inline bool exceptionality_consistency(CatalogEntry& entry) {
    FieldCtx base = parse_field_spec(entry.field_spec);
    Classifier cls(parse_map_expr(entry.map_expr), base);
    auto verdict = cls.is_dynamically_exceptional();
    entry.derived_exceptional = verdict.verdict;

    entry.n1_has_finite_ends = false;
    const Automaton& nuc = entry.nucleus_result.automaton;
    for (const auto& elt : n1_elements(nuc)) {
        if (elt.trivial) continue;
        auto cls_ends = ends_fixed_class(nuc, elt.state);
        if (cls_ends.kind != EndsClass::infinite) entry.n1_has_finite_ends = true;
    }
    bool exceptional = verdict.verdict == Classifier::Verdict::yes;
    entry.consistent = (verdict.verdict != Classifier::Verdict::unknown) &&
                       (exceptional == entry.n1_has_finite_ends);
    return entry.consistent;
}

inline CatalogEntry parse_entry(const nlohmann::json& j) {
    if (!j.contains("automaton") || !j.contains("map") || !j.contains("field"))
        raise(errc::schema_error, "catalog entry needs automaton, map, field");
    CatalogEntry e;
    e.name = j.value("name", "");
    e.automaton = Automaton::from_json(j.at("automaton"));
    e.map_expr = j.at("map").get<std::string>();
    e.field_spec = j.at("field").get<std::string>();
    if (j.contains("expect")) {
        const auto& ex = j.at("expect");
        e.expect_exceptional = ex.value("exceptional", false);
        e.expect_lattes = ex.value("lattes", false);
        e.expect_chebyshev = ex.value("chebyshev_conjugate", false);
    }
    e.provenance = j.value("provenance", "");
    return e;
}

// Full validation battery: self-similarity and minimization are structural
// after from_json; on top of that every entry must be level-transitive to
// level 8, have a terminating nucleus, and pass the exceptionality
// consistency check against the re-derived classification of its map.
inline void validate_entry(CatalogEntry& entry, int transitivity_levels = 8) {
    for (int n = 1; n <= transitivity_levels; ++n)
        if (!LevelQuotient::build(entry.automaton, n).transitive_on_level(n))
            raise(errc::validation_error,
                  entry.name + ": not level-transitive at level " + std::to_string(n));
    entry.nucleus_result = nucleus(entry.automaton);
    if (!entry.nucleus_result.complete)
        raise(errc::validation_error, entry.name + ": nucleus closure did not terminate");
    if (!exceptionality_consistency(entry))
        raise(errc::validation_error,
              entry.name + ": exceptionality consistency check failed");

    // re-derive the classification expectations
    FieldCtx base = parse_field_spec(entry.field_spec);
    Classifier cls(parse_map_expr(entry.map_expr), base);
    bool lattes = cls.is_lattes_quadratic().lattes;
    bool cheb = cls.is_chebyshev_conjugate();
    bool exceptional = entry.derived_exceptional == Classifier::Verdict::yes;
    if (lattes != entry.expect_lattes || cheb != entry.expect_chebyshev ||
        exceptional != entry.expect_exceptional)
        raise(errc::validation_error, entry.name + ": stored expectations disagree with classify");

    // entry-specific relations
    if (entry.name == "chebyshev2") {
        const Automaton& a = entry.automaton;
        int sa = a.resolve("a"), sb = a.resolve("b");
        if (!a.is_trivial({sa, sa}) || !a.is_trivial({sb, sb}))
            raise(errc::validation_error, "chebyshev2: generators must be involutions");
    }
    if (entry.name == "odometer") {
        // the level-n action must be a full cycle: order 2^n with FPP 2^-n
        LevelQuotient q = LevelQuotient::build(entry.automaton, 6);
        if (q.order() != BigInt(64))
            raise(errc::validation_error, "odometer: level-6 action is not a 64-cycle");
    }
}

inline CatalogEntry load_entry(const std::string& name_or_path, bool validate = true) {
    std::optional<nlohmann::json> parsed;
    // file path?
    {
        std::ifstream in(name_or_path);
        if (in) {
            try {
                parsed = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                raise(errc::schema_error, std::string("invalid JSON: ") + e.what());
            }
        }
    }
    if (!parsed) {
        std::string path = catalogdetail::data_dir() + "/" + name_or_path + ".json";
        std::ifstream in(path);
        if (in) {
            try {
                parsed = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                raise(errc::schema_error, std::string("invalid JSON in ") + path + ": " + e.what());
            }
        }
    }
    if (!parsed) {
        for (auto& [n, text] : catalogdetail::builtin_entries())
            if (name_or_path == n) parsed = nlohmann::json::parse(text);
    }
    if (!parsed)
        raise(errc::schema_error, "no catalog entry or file named '" + name_or_path + "'");
    // a bare automaton is accepted for the group-only commands
    nlohmann::json j = *parsed;
    if (!j.contains("automaton") && j.contains("states")) {
        CatalogEntry e;
        e.name = j.value("name", name_or_path);
        e.automaton = Automaton::from_json(j);
        return e;
    }
    CatalogEntry e = parse_entry(j);
    if (validate) validate_entry(e);
    return e;
}

} // namespace fixprop
