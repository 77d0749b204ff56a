// Command-line frontend: periodic-point proportions of rational maps over
// finite fields, quadratic map classification, and fixed-point statistics of
// self-similar groups given by wreath recursion.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fixprop/catalog.hpp"
#include "fixprop/classify.hpp"
#include "fixprop/dynamics.hpp"
#include "fixprop/group_stats.hpp"
#include "fixprop/lattes.hpp"
#include "fixprop/nucleus.hpp"

using namespace fixprop;
using nlohmann::ordered_json;

namespace {

std::string point_str(const ProjPoint& pt) {
    return pt.infinite ? "inf" : Classifier::elem_to_string(pt.x);
}

ordered_json rat_json(const Rat64& r) {
    ordered_json j;
    j["exact"] = r.to_string();
    j["display"] = decimal3(r);
    return j;
}

ordered_json letters_json(const Automaton::Letters& w) {
    std::string s;
    for (int x : w) s += char('0' + x);
    return s;
}

struct Options {
    std::string format = "json";
    int jobs = 1;
    std::uint64_t seed = 1;
};

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_per_table(const std::string& map_expr, const std::string& field_spec, int nmax,
                  const Options& opt) {
    RationalMapZ m = parse_map_expr(map_expr);
    FieldCtx base = parse_field_spec(field_spec);
    ProportionTable table = vertical_scan(m, base.p(), base.n(), nmax, opt.jobs);
    if (opt.format == "csv") {
        std::cout << "n,periodic,total,proportion\n";
        for (const auto& row : table.rows)
            std::cout << row.n << "," << row.periodic << "," << row.total << ","
                      << row.proportion.to_string() << "\n";
        return 0;
    }
    ordered_json j;
    j["map"] = map_expr;
    j["field"] = field_spec;
    j["rows"] = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json r;
        r["n"] = row.n;
        r["periodic"] = row.periodic;
        r["total"] = row.total;
        r["proportion"] = rat_json(row.proportion);
        j["rows"].push_back(r);
    }
    emit(j);
    return 0;
}

int cmd_scan_horizontal(const std::string& map_expr, std::uint64_t pmin, std::uint64_t pmax,
                        const Options& opt) {
    RationalMapZ m = parse_map_expr(map_expr);
    HorizontalScan scan = horizontal_scan(m, pmin, pmax, opt.jobs);
    if (opt.format == "csv") {
        std::cout << "p,status,periodic,total,proportion\n";
        for (const auto& row : scan.rows) {
            if (row.good)
                std::cout << row.p << ",good," << row.periodic << "," << row.total << ","
                          << row.proportion.to_string() << "\n";
            else
                std::cout << row.p << ",bad-reduction,,,\n";
        }
        return 0;
    }
    ordered_json j;
    j["map"] = map_expr;
    j["rows"] = ordered_json::array();
    for (const auto& row : scan.rows) {
        ordered_json r;
        r["p"] = row.p;
        r["good_reduction"] = row.good;
        if (row.good) {
            r["periodic"] = row.periodic;
            r["total"] = row.total;
            r["proportion"] = rat_json(row.proportion);
        }
        j["rows"].push_back(r);
    }
    j["running_min"] = rat_json(scan.running_min);
    emit(j);
    return 0;
}

ordered_json portrait_json(Classifier::PortraitData& pd) {
    ordered_json j;
    j["canonical"] = pd.portrait.canonical();
    j["vertices"] = ordered_json::array();
    for (size_t v = 0; v < pd.points.size(); ++v) {
        ordered_json vj;
        vj["point"] = point_str(pd.points[v]);
        vj["critical"] = pd.portrait.vertices[v].critical;
        vj["ramification_index"] = pd.portrait.vertices[v].label;
        vj["extension_degree"] = pd.portrait.vertices[v].ext_degree;
        vj["maps_to"] = pd.portrait.succ[v];
        j["vertices"].push_back(vj);
    }
    j["field"] = pd.ctx->describe();
    return j;
}

int cmd_classify(const std::string& map_expr, const std::string& field_spec, int ext_bound,
                 bool portrait_only) {
    RationalMapZ m = parse_map_expr(map_expr);
    FieldCtx base = parse_field_spec(field_spec);
    Classifier cls(m, base, ext_bound);
    ordered_json j;
    j["map"] = map_expr;
    j["field"] = field_spec;
    auto pd = cls.ramification_portrait();
    j["portrait"] = portrait_json(pd);
    if (portrait_only) {
        emit(j);
        return 0;
    }
    if (cls.degree() == 2 && base.p() != 2) {
        auto lat = cls.is_lattes_quadratic();
        j["lattes"] = ordered_json{{"verdict", lat.lattes}, {"type", lat.type}};
        if (lat.lattes) {
            auto cert = cls.lattes_r_certificate();
            ordered_json weights = ordered_json::array();
            for (auto& [pt, r] : cert.weights)
                weights.push_back(ordered_json{{"point", point_str(pt)}, {"weight", r}});
            j["lattes"]["weights"] = weights;
        }
        j["chebyshev_conjugate"] = cls.is_chebyshev_conjugate();
        auto nf = cls.quad_normal_form();
        if (nf.power) {
            j["normal_form"] = ordered_json{{"power", true}, {"exponent", nf.power_exponent}};
        } else {
            j["normal_form"] =
                ordered_json{{"power", false},
                             {"a", Classifier::elem_to_string(nf.a)},
                             {"b", Classifier::elem_to_string(nf.b)},
                             {"field", nf.ctx->describe()}};
            if (nf.other)
                j["normal_form"]["second_representative"] =
                    ordered_json{{"a", Classifier::elem_to_string(nf.other->first)},
                                 {"b", Classifier::elem_to_string(nf.other->second)}};
        }
    }
    auto exc = cls.is_dynamically_exceptional();
    const char* verdict = exc.verdict == Classifier::Verdict::yes
                              ? "yes"
                              : exc.verdict == Classifier::Verdict::no ? "no" : "unknown";
    j["exceptional"] = ordered_json{{"verdict", verdict}, {"tag", exc.tag}};
    if (!exc.witness.empty()) {
        ordered_json w = ordered_json::array();
        for (auto& pt : exc.witness) w.push_back(point_str(pt));
        j["exceptional"]["witness"] = w;
    }
    emit(j);
    return 0;
}

int cmd_census(std::uint64_t p) {
    auto res = lattes_class_census(p);
    ordered_json j;
    j["p"] = p;
    j["field"] = res.ctx->describe();
    j["classes"] = ordered_json::array();
    for (auto& c : res.classes)
        j["classes"].push_back(ordered_json{{"a", Classifier::elem_to_string(c.a)},
                                            {"b", Classifier::elem_to_string(c.b)},
                                            {"family", c.family},
                                            {"portrait", c.lattes_type}});
    j["count"] = res.classes.size();
    emit(j);
    return 0;
}

std::string entry_label(const CatalogEntry& e, const std::string& fallback) {
    if (!e.name.empty()) return e.name;
    if (!e.automaton.name().empty()) return e.automaton.name();
    return fallback;
}

int cmd_fpp(const std::string& aut_name, int nmax, std::uint64_t samples, const Options& opt) {
    CatalogEntry e = load_entry(aut_name, /*validate=*/false);
    FppReport rep = fpp_report(e.automaton, nmax, samples, opt.seed);
    if (opt.format == "csv") {
        std::cout << "level,kind,value,sigma,samples,order\n";
        for (const auto& row : rep.rows) {
            if (row.exact)
                std::cout << row.level << ",exact," << row.value.to_string() << ",,,"
                          << row.order.str() << "\n";
            else
                std::cout << row.level << ",sampled," << row.estimate << "," << row.sigma << ","
                          << row.samples << "," << row.order.str() << "\n";
        }
        return 0;
    }
    ordered_json j;
    j["automaton"] = entry_label(e, aut_name);
    j["seed"] = rep.seed;
    j["rows"] = ordered_json::array();
    for (const auto& row : rep.rows) {
        ordered_json r;
        r["level"] = row.level;
        r["order"] = row.order.str();
        if (row.exact) {
            r["kind"] = "exact";
            r["value"] = rat_json(row.value);
        } else {
            r["kind"] = "sampled";
            r["estimate"] = row.estimate;
            r["sigma"] = row.sigma;
            r["hoeffding99"] = row.hoeffding99;
            r["samples"] = row.samples;
        }
        j["rows"].push_back(r);
    }
    emit(j);
    return 0;
}

int cmd_martingale(const std::string& aut_name, int nmax) {
    CatalogEntry e = load_entry(aut_name, /*validate=*/false);
    auto rows = martingale_check(e.automaton, nmax);
    ordered_json j;
    j["automaton"] = entry_label(e, aut_name);
    j["rows"] = ordered_json::array();
    bool all = true;
    for (auto& row : rows) {
        j["rows"].push_back(ordered_json{{"level", row.level},
                                         {"passes", row.passes},
                                         {"equal_orbits", row.equal_orbits},
                                         {"orbit_size", row.orbit_size}});
        all = all && row.passes;
    }
    j["martingale"] = all;
    emit(j);
    return all ? 0 : 1;
}

int cmd_nucleus(const std::string& aut_name, int rounds) {
    CatalogEntry e = load_entry(aut_name, /*validate=*/false);
    NucleusResult res = nucleus(e.automaton, rounds);
    ordered_json j;
    j["automaton"] = entry_label(e, aut_name);
    j["complete"] = res.complete;
    j["rounds"] = res.rounds;
    j["state_count"] = res.automaton.state_count();
    j["states"] = res.automaton.to_json()["states"];
    emit(j);
    return 0;
}

int cmd_n1(const std::string& aut_name) {
    CatalogEntry e = load_entry(aut_name, /*validate=*/false);
    NucleusResult res = nucleus(e.automaton);
    ordered_json j;
    j["automaton"] = entry_label(e, aut_name);
    j["nucleus_complete"] = res.complete;
    j["elements"] = ordered_json::array();
    for (auto& elt : n1_elements(res.automaton)) {
        j["elements"].push_back(ordered_json{{"state", res.automaton.state(elt.state).name},
                                             {"witness", letters_json(elt.witness)},
                                             {"trivial", elt.trivial}});
    }
    emit(j);
    return 0;
}

int cmd_ends(const std::string& aut_name, const std::string& state_name) {
    CatalogEntry e = load_entry(aut_name, /*validate=*/false);
    NucleusResult res = nucleus(e.automaton);
    int s = res.automaton.resolve(state_name);
    EndsClass cls = ends_fixed_class(res.automaton, s);
    ordered_json j;
    j["automaton"] = entry_label(e, aut_name);
    j["state"] = state_name;
    j["class"] = cls.kind == EndsClass::none ? "none"
                 : cls.kind == EndsClass::finite ? "finite" : "infinite";
    if (cls.kind == EndsClass::finite) {
        j["count"] = cls.ends.size();
        j["ends"] = ordered_json::array();
        for (auto& [pre, per] : cls.ends)
            j["ends"].push_back(
                ordered_json{{"preperiod", letters_json(pre)}, {"period", letters_json(per)}});
    }
    emit(j);
    return 0;
}

int cmd_lattes(std::uint64_t p, int nmax) {
    LattesReport rep = lattes_audit(p, nmax);
    ordered_json j;
    j["p"] = p;
    j["curve_points"] = rep.curve_points;
    j["trace"] = rep.trace;
    j["pi"] = rep.pi.to_string();
    j["k_rank"] = rep.k_rank;
    j["levels"] = ordered_json::array();
    for (auto& l : rep.levels) {
        ordered_json lj;
        lj["n"] = l.n;
        lj["total"] = l.total;
        lj["size_a"] = l.size_a;
        lj["size_b"] = l.size_b;
        lj["sqrt2_in_field"] = l.sqrt2_in_field;
        lj["v_minus"] = l.v_minus;
        lj["v_plus"] = l.v_plus;
        lj["periodic_a"] = l.periodic_a;
        lj["periodic_b"] = l.periodic_b;
        lj["proportion"] = rat_json(l.proportion);
        lj["invariance_ok"] = l.invariance_ok;
        lj["tree_audit_ok"] = l.tree_audit_ok;
        lj["proportion_ge_1_8"] = l.proportion_ok;
        lj["side_proportion_ge_1_4"] = l.side_proportion_ok;
        lj["hasse_ok"] = l.hasse_ok;
        if (!l.tree_audit_note.empty()) lj["tree_audit_note"] = l.tree_audit_note;
        j["levels"].push_back(lj);
    }
    j["all_ok"] = rep.all_ok;
    emit(j);
    return rep.all_ok ? 0 : 1;
}

int cmd_catalog() {
    ordered_json j = ordered_json::array();
    bool all_ok = true;
    for (const std::string& name : catalog_names()) {
        ordered_json entry;
        entry["name"] = name;
        try {
            CatalogEntry e = load_entry(name);
            entry["map"] = e.map_expr;
            entry["field"] = e.field_spec;
            entry["provenance"] = e.provenance;
            entry["consistent"] = e.consistent;
            all_ok = all_ok && e.consistent;
        } catch (const error& err) {
            entry["error"] = err.what();
            all_ok = false;
        }
        j.push_back(entry);
    }
    emit(j);
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic points of rational maps over finite fields and "
                 "fixed-point statistics of self-similar groups"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--format", opt.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs", opt.jobs, "worker threads for row scans");
    app.add_option("--seed", opt.seed, "seed for sampled statistics");

    std::string map_expr, field_spec = "GF(3)", aut_name, state_name;
    int nmax = 8;
    std::uint64_t pmin = 2, pmax = 50, prime = 5;
    int ext_bound = budgets::extension_bound();
    std::uint64_t samples = 2000;
    int rounds = 24;

    auto* per = app.add_subcommand("per-table", "periodic proportions up a field tower");
    per->add_option("--map", map_expr)->required();
    per->add_option("--field", field_spec);
    per->add_option("--nmax", nmax);

    auto* hor = app.add_subcommand("scan-horizontal", "periodic proportions across primes");
    hor->add_option("--map", map_expr)->required();
    hor->add_option("--pmin", pmin);
    hor->add_option("--pmax", pmax);

    auto* cl = app.add_subcommand("classify", "portrait, Lattes, Chebyshev, exceptionality");
    cl->add_option("--map", map_expr)->required();
    cl->add_option("--field", field_spec);
    cl->add_option("--ext-bound", ext_bound);

    auto* por = app.add_subcommand("portrait", "ramification portrait only");
    por->add_option("--map", map_expr)->required();
    por->add_option("--field", field_spec);
    por->add_option("--ext-bound", ext_bound);

    auto* cen = app.add_subcommand("lattes-census", "quadratic Lattes conjugacy classes mod p");
    cen->add_option("--p", prime)->required();

    auto* fp = app.add_subcommand("fpp", "fixed-point proportion per level");
    fp->add_option("--aut", aut_name)->required();
    fp->add_option("--nmax", nmax);
    fp->add_option("--samples", samples);

    auto* mart = app.add_subcommand("martingale", "kernel transitivity on sibling blocks");
    mart->add_option("--aut", aut_name)->required();
    mart->add_option("--nmax", nmax);

    auto* nuc = app.add_subcommand("nucleus", "nucleus closure of the automaton group");
    nuc->add_option("--aut", aut_name)->required();
    nuc->add_option("--rounds", rounds);

    auto* n1c = app.add_subcommand("n1", "self-replicating fixed states of the nucleus");
    n1c->add_option("--aut", aut_name)->required();

    auto* end = app.add_subcommand("ends", "fixed-end classification of a nucleus state");
    end->add_option("--aut", aut_name)->required();
    end->add_option("--state", state_name)->required();

    auto* lat = app.add_subcommand("lattes", "elliptic-curve verifier for k(x+1/x)");
    lat->add_option("--p", prime)->required();
    lat->add_option("--nmax", nmax);

    app.add_subcommand("catalog", "list and validate the bundled recursions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (per->parsed()) return cmd_per_table(map_expr, field_spec, nmax, opt);
        if (hor->parsed()) return cmd_scan_horizontal(map_expr, pmin, pmax, opt);
        if (cl->parsed()) return cmd_classify(map_expr, field_spec, ext_bound, false);
        if (por->parsed()) return cmd_classify(map_expr, field_spec, ext_bound, true);
        if (cen->parsed()) return cmd_census(prime);
        if (fp->parsed()) return cmd_fpp(aut_name, nmax, samples, opt);
        if (mart->parsed()) return cmd_martingale(aut_name, nmax);
        if (nuc->parsed()) return cmd_nucleus(aut_name, rounds);
        if (n1c->parsed()) return cmd_n1(aut_name);
        if (end->parsed()) return cmd_ends(aut_name, state_name);
        if (lat->parsed()) return cmd_lattes(prime, nmax);
        return cmd_catalog();
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
        case errc::validation_error:
        case errc::no_certificate:
            return 1;
        default:
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
