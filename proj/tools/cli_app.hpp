#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blocklie.hpp"

namespace blocklie::cli {

struct Options {
    std::string format = "table";
    std::string out;
    bool strict = false;
    std::string config;

    // bracket
    std::string variant = "B";
    std::string x, y;

    // axioms
    std::int64_t degree_bound = 5;
    int level_lo = 0;
    int level_hi = 3;
    std::int64_t vir_bound = 10;

    // module
    std::string family = "Aab";
    std::string a = "0", b = "0";
    std::string target_a, target_b;
    std::string range = "-8:8";
    int level_cap = 2;
    std::int64_t module_degree_bound = 4;
    std::string grid_a, grid_b;
    std::string module_action = "axioms";

    // verma
    int n = 1;
    std::int64_t depth = 3;
    std::string lambda;
    std::string c = "0";
    std::string weight_file;
    std::string verma_action = "dims";

    // classify
    std::string module_file;
};

namespace detail {

inline nlohmann::json read_json_file(const std::string& path, const std::string& field)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(field, "cannot open \"" + path + "\"");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(field, std::string("invalid JSON: ") + e.what());
    }
}

inline nlohmann::json parse_json_arg(const std::string& text, const std::string& field)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(field, std::string("invalid JSON: ") + e.what());
    }
}

/// Fills options that were not given on the command line from a JSON config object.
/// Top-level keys address global options, a nested object under a subcommand name
/// addresses that subcommand's options.
inline void apply_config(CLI::App& app, const nlohmann::json& cfg, const std::string& where)
{
    if (!cfg.is_object())
        throw ParseError(where, "expected object");
    for (const auto& [key, value] : cfg.items()) {
        if (value.is_object()) {
            CLI::App* sub = nullptr;
            try {
                sub = app.get_subcommand(key);
            } catch (const CLI::OptionNotFound&) {
                throw ParseError(where + "." + key, "unknown subcommand");
            }
            if (sub->parsed())
                apply_config(*sub, value, where + "." + key);
            continue;
        }
        CLI::Option* opt = app.get_option_no_throw("--" + key);
        if (!opt)
            opt = app.get_option_no_throw(key);
        if (!opt)
            throw ParseError(where + "." + key, "unknown option");
        if (opt->count() > 0)
            continue;
        auto as_text = [&](const nlohmann::json& v) {
            if (v.is_string())
                return v.get<std::string>();
            if (v.is_boolean())
                return std::string(v.get<bool>() ? "true" : "false");
            if (v.is_number())
                return v.dump();
            throw ParseError(where + "." + key, "expected string, number or boolean");
        };
        if (value.is_array()) {
            std::string joined;
            for (const auto& v : value)
                joined += (joined.empty() ? "" : ",") + as_text(v);
            opt->add_result(joined);
        } else {
            opt->add_result(as_text(value));
        }
        opt->run_callback();
    }
}

inline std::vector<Rational> rationals(const std::string& csv, const std::string& field)
{
    std::vector<std::string> xs;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');)
        xs.push_back(item);
    std::vector<Rational> out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out.push_back(parse_rational(xs[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

inline IntermediateSpec spec_from(const std::string& family, const std::string& a, const std::string& b)
{
    const Family f = parse_family(family);
    const Rational ra = parse_rational(a, "a");
    if (f == Family::Aab)
        return IntermediateSpec::aab(ra, parse_rational(b, "b"));
    return f == Family::Aa ? IntermediateSpec::aa(ra) : IntermediateSpec::ba(ra);
}

inline nlohmann::json spec_json(const IntermediateSpec& s)
{
    nlohmann::json j{{"family", family_name(s.family)}, {"a", to_string(s.a)}};
    if (s.family == Family::Aab)
        j["b"] = to_string(s.b);
    return j;
}

inline nlohmann::json axiom_json(const AxiomReport& r)
{
    auto v = nlohmann::json::array();
    for (const auto& x : r.violations) {
        auto keys = nlohmann::json::array();
        for (const auto& k : x.keys)
            keys.push_back(key_to_string(r.variant, k));
        v.push_back({{"law", x.law}, {"keys", keys}, {"residual", x.residual.to_string()}});
    }
    return {{"pairs_checked", r.pairs_checked}, {"triples_checked", r.triples_checked}, {"violations", v}};
}

inline nlohmann::json module_axiom_json(const WindowedModule& m, const ModuleAxiomReport& r)
{
    auto v = nlohmann::json::array();
    for (const auto& x : r.violations)
        v.push_back({{"x", key_to_string(m.variant(), x.x)},
                     {"y", key_to_string(m.variant(), x.y)},
                     {"k", x.k},
                     {"bad_entries", x.bad_entries}});
    return {{"checks", r.checks}, {"skipped_pairs", r.skipped_pairs}, {"violation_count", r.violation_count}, {"violations", v}};
}

inline nlohmann::json classification_json(const Classification& c)
{
    nlohmann::json j{{"kind", to_string(c.kind)}};
    if (c.spec)
        j["module"] = spec_json(*c.spec);
    if (c.raw_a)
        j["raw_a"] = to_string(*c.raw_a);
    if (c.extreme)
        j["extreme_index"] = *c.extreme;
    return j;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

inline Report run_bracket(const Options& o)
{
    if (o.x.empty() || o.y.empty())
        throw UsageError("bracket needs --x and --y");
    const auto v = AlgebraVariant::parse(o.variant);
    const auto x = element_from_json(parse_json_arg(o.x, "x"), v, "x");
    const auto y = element_from_json(parse_json_arg(o.y, "y"), v, "y");
    const auto z = bracket(x, y);
    Report r{"bracket", {{"variant", v.name()}}, {}};
    r.checks.push_back({"bracket", true, false, z.to_string(), {{"x", to_json(x)}, {"y", to_json(y)}, {"result", to_json(z)}}});
    return r;
}

inline Report run_axioms(const Options& o)
{
    const auto v = AlgebraVariant::parse(o.variant);
    const AlgebraWindow w{o.degree_bound, o.level_lo, o.level_hi};
    Report r{"axioms",
             {{"variant", v.name()},
              {"degree_bound", w.degree_bound},
              {"level_lo", w.level_lo},
              {"level_hi", w.level_hi},
              {"vir_bound", o.vir_bound}},
             {}};
    const auto ax = verify_algebra_axioms(v, w);
    r.checks.push_back({"axioms:" + v.name(), ax.ok(), false,
                        std::to_string(ax.triples_checked) + " triples, " + std::to_string(ax.violations.size()) +
                            " violations",
                        axiom_json(ax)});
    const auto vc = vir_consistency(o.vir_bound);
    const bool ok = vc.homomorphism && vc.unique && vc.quotient_matches;
    nlohmann::json problems = vc.problems;
    r.checks.push_back({"vir_consistency", ok, false, vc.c0 ? "c0 = " + to_string(*vc.c0) : "no c0",
                        {{"c0", vc.c0 ? nlohmann::json(to_string(*vc.c0)) : nlohmann::json()},
                         {"unique", vc.unique},
                         {"quotient_matches", vc.quotient_matches},
                         {"pairs_checked", vc.pairs_checked},
                         {"problems", problems}}});
    return r;
}

inline Report run_module(const Options& o)
{
    const auto spec = spec_from(o.family, o.a, o.b);
    const auto range = IndexRange::parse(o.range);
    Report r{"module", {{"module", spec_json(spec)}, {"range", {range.lo, range.hi}}, {"action", o.module_action}}, {}};
    const auto mod = build_window(spec, range);
    const std::string& act = o.module_action;
    if (act == "build") {
        r.checks.push_back({"build", true, false, spec.to_string(), to_json(mod)});
    } else if (act == "axioms") {
        r.config["degree_bound"] = o.module_degree_bound;
        r.config["level_cap"] = o.level_cap;
        const auto vr = check_module_axioms(mod, o.module_degree_bound, 0);
        r.checks.push_back({"module_axioms", vr.ok(), false, std::to_string(vr.checks) + " instances",
                            module_axiom_json(mod, vr)});
        const auto ext = extend_trivially(mod, o.level_cap);
        const auto er = check_module_axioms(ext, o.module_degree_bound, o.level_cap);
        r.checks.push_back({"extended_axioms", er.ok(), false, std::to_string(er.checks) + " instances",
                            module_axiom_json(ext, er)});
    } else if (act == "irreducible") {
        const auto v = irreducible_verdict(spec, range);
        r.checks.push_back({"irreducible", v.agree(), false,
                            std::string("bruteforce ") + (v.bruteforce ? "true" : "false") + ", criterion " +
                                (v.criterion ? "true" : "false"),
                            {{"bruteforce", v.bruteforce}, {"criterion", v.criterion}, {"non_generating", v.non_generating}}});
    } else if (act == "grid") {
        const auto as = rationals(o.grid_a.empty() ? "0,1,1/2,-3/2" : o.grid_a, "grid-a");
        const auto bs = rationals(o.grid_b.empty() ? "0,1/2,1,2" : o.grid_b, "grid-b");
        std::vector<IntermediateSpec> specs;
        for (const auto& a : as)
            for (const auto& b : bs)
                specs.push_back(IntermediateSpec::aab(a, b));
        const auto verdicts = parallel_map<IrreducibilityVerdict>(
            specs.size(), [&](std::size_t i) { return irreducible_verdict(specs[i], range); });
        for (std::size_t i = 0; i < specs.size(); ++i)
            r.checks.push_back({"irreducible:" + specs[i].to_string(), verdicts[i].agree(), false,
                                std::string(verdicts[i].bruteforce ? "irreducible" : "reducible"),
                                {{"bruteforce", verdicts[i].bruteforce}, {"criterion", verdicts[i].criterion}}});
    } else if (act == "intertwiner") {
        const auto target = spec_from(o.family, o.target_a.empty() ? o.a : o.target_a, o.target_b.empty() ? o.b : o.target_b);
        const auto res = find_intertwiner(mod, build_window(target, range));
        nlohmann::json maps = nlohmann::json::object();
        if (res.isomorphism)
            for (const auto& [k, m] : *res.isomorphism)
                maps[std::to_string(k)] = to_json(m);
        r.config["target"] = spec_json(target);
        r.checks.push_back({"intertwiner", true, false,
                            res.isomorphism ? "invertible map found" : "no invertible map",
                            {{"solution_dim", res.solution_dim}, {"found", res.isomorphism.has_value()}, {"maps", maps}}});
    } else if (act == "extension") {
        r.config["level_cap"] = o.level_cap;
        r.config["degree_bound"] = o.module_degree_bound;
        const auto e = extension_space(mod, o.level_cap, o.module_degree_bound);
        auto levels = nlohmann::json::array();
        for (const auto& l : e.levels)
            levels.push_back({{"level", l.level},
                              {"unknowns", l.unknowns},
                              {"equations", l.equations},
                              {"linear_dim", l.linear_dim},
                              {"forced_zero", l.forced_zero},
                              {"witness", l.witness}});
        const bool expect_trivial = spec.family == Family::Aab && irreducibility_criterion(spec);
        r.checks.push_back({"extension_space", !expect_trivial || e.status == ExtensionStatus::trivial, false,
                            to_string(e.status) + ", dimension " + std::to_string(e.dimension),
                            {{"status", to_string(e.status)}, {"dimension", e.dimension}, {"levels", levels}}});
    } else if (act == "spanning") {
        const auto s = spanning_check_M(mod);
        r.checks.push_back({"spanning_M", s.holds, false, s.holds ? "spanned" : "not spanned", {{"failing", s.failing}}});
    } else if (act == "classify") {
        const auto c = classify_window(extend_trivially(mod, o.level_cap));
        r.checks.push_back({"classify", true, false, to_string(c.kind), classification_json(c)});
    } else {
        throw UsageError("unknown module action \"" + act + "\"");
    }
    return r;
}

inline WeightFunctional weight_from(const Options& o)
{
    if (!o.weight_file.empty())
        return weight_from_json(read_json_file(o.weight_file, "weight"), "weight");
    WeightFunctional w;
    if (o.lambda.empty())
        w.lambda.assign(static_cast<std::size_t>(o.n) + 1, Rational(0));
    else
        w.lambda = rationals(o.lambda, "lambda");
    w.c = parse_rational(o.c, "c");
    if (!o.lambda.empty() && w.level_cap() != o.n)
        throw ParseError("lambda", "expected " + std::to_string(o.n + 1) + " values for n = " + std::to_string(o.n));
    return w;
}

inline Report run_verma(const Options& o)
{
    Report r{"verma", {{"n", o.n}, {"depth", o.depth}, {"action", o.verma_action}}, {}};
    if (o.verma_action == "dims") {
        const auto q = quasifinite_report(o.n, o.depth);
        std::vector<std::size_t> positive(q.dims.begin() + 1, q.dims.end());
        std::string s;
        for (std::size_t i = 0; i < positive.size(); ++i)
            s += (i ? ", " : "") + std::to_string(positive[i]);
        r.checks.push_back({"dims", true, false, s, {{"dims", q.dims}}});
        return r;
    }
    const auto w = weight_from(o);
    r.config["weight"] = to_json(w);
    if (o.verma_action == "singular") {
        for (std::int64_t d = 1; d <= o.depth; ++d) {
            const auto s = singular_vectors(w, d);
            auto vecs = nlohmann::json::array();
            for (const auto& v : s.vectors)
                vecs.push_back(to_json_pbw(v));
            r.checks.push_back({"singular:depth" + std::to_string(d), s.validated && s.generators_span_positive_part, false,
                                std::to_string(s.vectors.size()) + " vectors",
                                {{"vectors", vecs},
                                 {"validated", s.validated},
                                 {"validation_degree", s.validation_degree},
                                 {"generators_span_positive_part", s.generators_span_positive_part}}});
        }
    } else if (o.verma_action == "window") {
        const auto m = verma_window(w, o.depth);
        const auto ax = check_module_axioms(m, o.depth, o.n);
        r.checks.push_back({"verma_axioms", ax.ok(), false, std::to_string(ax.checks) + " instances", module_axiom_json(m, ax)});
        r.checks.push_back({"verma_window", true, false, to_string(classify_window(m).kind), to_json(m)});
    } else {
        throw UsageError("unknown verma action \"" + o.verma_action + "\"");
    }
    return r;
}

inline Report run_lemmas(const Options&)
{
    Report r{"lemmas", nlohmann::json::object(), {}};
    for (const auto& l : lemma_suite())
        r.checks.push_back(check_from_lemma(l));
    return r;
}

inline Report run_classify(const Options& o)
{
    if (o.module_file.empty())
        throw UsageError("classify needs --module FILE");
    auto j = read_json_file(o.module_file, "module");
    // accept the report written by `module ... build` as well as a bare module
    if (j.is_object() && j.contains("command") && j.contains("checks") && j["checks"].is_array() && !j["checks"].empty())
        j = j["checks"][0].value("detail", nlohmann::json());
    const auto m = module_from_json(j, "module");
    Report r{"classify", {{"module_file", o.module_file}}, {}};
    std::int64_t width = m.range().empty() ? 0 : m.range().hi - m.range().lo;
    int top = 0;
    for (const auto& g : m.generators())
        top = std::max(top, g.level);
    const auto ax = check_module_axioms(m, width, top);
    r.checks.push_back({"module_axioms", ax.ok(), false, std::to_string(ax.checks) + " instances", module_axiom_json(m, ax)});
    const auto c = classify_window(m);
    r.checks.push_back({"classify", true, false, to_string(c.kind), classification_json(c)});
    return r;
}

} // namespace detail

/// Runs the command line; returns the process exit code.
/// 0: all checks passed; 1: a check failed (or a discrepancy under --strict); 2: bad input.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Exact computations for Block type Lie algebras and their modules", "blocklie"};
    app.require_subcommand(1);
    app.add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    app.add_option("--out", o.out, "write the report to this file");
    app.add_flag("--strict", o.strict, "fail on recorded discrepancies");
    app.add_option("--config", o.config, "JSON config; command-line flags win");

    auto* br = app.add_subcommand("bracket", "bracket of two elements given as JSON");
    br->add_option("--variant", o.variant, "Vir, B, Bbar, W1inf, Winf or Bq(m,n)");
    br->add_option("--x", o.x, "JSON element or key");
    br->add_option("--y", o.y, "JSON element or key");

    auto* ax = app.add_subcommand("axioms", "antisymmetry/Jacobi sweep and Virasoro consistency");
    ax->add_option("--variant", o.variant);
    ax->add_option("--degree-bound", o.degree_bound);
    ax->add_option("--level-lo", o.level_lo);
    ax->add_option("--level-hi", o.level_hi);
    ax->add_option("--vir-bound", o.vir_bound);

    auto* mo = app.add_subcommand("module", "intermediate-series windows");
    mo->add_option("action", o.module_action, "axioms, irreducible, grid, intertwiner, extension, spanning, classify, build")
        ->check(CLI::IsMember({"axioms", "irreducible", "grid", "intertwiner", "extension", "spanning", "classify", "build"}));
    mo->add_option("--family", o.family, "Aab, Aa or Ba");
    mo->add_option("--a", o.a);
    mo->add_option("--b", o.b);
    mo->add_option("--target-a", o.target_a);
    mo->add_option("--target-b", o.target_b);
    mo->add_option("--range", o.range, "lo:hi");
    mo->add_option("--level-cap", o.level_cap);
    mo->add_option("--degree-bound", o.module_degree_bound);
    mo->add_option("--grid-a", o.grid_a);
    mo->add_option("--grid-b", o.grid_b);

    auto* ve = app.add_subcommand("verma", "highest-weight modules over B~_{0,n}");
    ve->add_option("action", o.verma_action, "dims, singular or window")->check(CLI::IsMember({"dims", "singular", "window"}));
    ve->add_option("--n", o.n)->check(CLI::NonNegativeNumber);
    ve->add_option("--depth", o.depth)->check(CLI::NonNegativeNumber);
    ve->add_option("--lambda", o.lambda, "lambda_0..lambda_n");
    ve->add_option("--c", o.c);
    ve->add_option("--weight", o.weight_file, "JSON {\"lambda\": [...], \"c\": ...}");

    app.add_subcommand("lemmas", "run the verification lab");

    auto* cl = app.add_subcommand("classify", "classify a module window from a JSON file");
    cl->add_option("--module", o.module_file);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (!o.config.empty())
            detail::apply_config(app, detail::read_json_file(o.config, "config"), "config");
        const Format fmt = parse_format(o.format);
        Report r;
        if (br->parsed())
            r = detail::run_bracket(o);
        else if (ax->parsed())
            r = detail::run_axioms(o);
        else if (mo->parsed())
            r = detail::run_module(o);
        else if (ve->parsed())
            r = detail::run_verma(o);
        else if (cl->parsed())
            r = detail::run_classify(o);
        else
            r = detail::run_lemmas(o);
        r.config["strict"] = o.strict;
        emit_report(r, fmt, o.out, out);
        return r.ok(o.strict) ? 0 : 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::Error& e) {
        err << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace blocklie::cli
