#include <chrono>
#include <cstdlib>
#include <functional>
#include <random>
#include <iostream>
#include <sstream>

#include "cli_app.hpp"

using namespace blocklie;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            pass = false;
            note += (note.empty() ? "" : "; ") + what;
        }
    }
};

const std::vector<Rational> grid_a{0, 1, rat(1, 2), rat(-3, 2)};
const std::vector<Rational> grid_b{0, rat(1, 2), 1, 2};

// p(n) with `colors` colors per part size, via n p(n) = sum_k colors sigma(k) p(n-k).
std::vector<std::size_t> colored_partitions(int colors, int max_depth)
{
    std::vector<std::size_t> p(static_cast<std::size_t>(max_depth) + 1, 0);
    p[0] = 1;
    for (int n = 1; n <= max_depth; ++n) {
        std::size_t s = 0;
        for (int k = 1; k <= n; ++k) {
            std::size_t sigma = 0;
            for (int d = 1; d <= k; ++d)
                if (k % d == 0)
                    sigma += static_cast<std::size_t>(d);
            s += static_cast<std::size_t>(colors) * sigma * p[static_cast<std::size_t>(n - k)];
        }
        p[static_cast<std::size_t>(n)] = s / static_cast<std::size_t>(n);
    }
    return p;
}

Outcome algebra_axioms()
{
    Outcome o;
    const std::vector<std::pair<AlgebraVariant, AlgebraWindow>> runs{
        {AlgebraVariant::block_b(), {5, 0, 3}},
        {AlgebraVariant::block_bbar(), {5, -1, 3}},
        {AlgebraVariant::virasoro(), {8, 0, 0}},
        {AlgebraVariant::w1inf(), {4, 0, 3}},
        {AlgebraVariant::quotient(0, 0), {5, 0, 0}},
        {AlgebraVariant::quotient(0, 1), {5, 0, 1}},
        {AlgebraVariant::quotient(0, 2), {5, 0, 2}},
        {AlgebraVariant::quotient(0, 3), {5, 0, 3}},
    };
    for (const auto& [v, w] : runs) {
        const auto r = verify_algebra_axioms(v, w);
        o.require(r.ok() && r.triples_checked > 0,
                  r.variant.name() + ": " + std::to_string(r.violations.size()) + " violations");
    }
    return o;
}

Outcome virasoro_consistency()
{
    Outcome o;
    const auto r = vir_consistency(10);
    o.require(r.homomorphism, "not a homomorphism");
    o.require(r.unique && r.c0.has_value(), "central rescaling not unique");
    o.require(r.quotient_matches, "level-0 quotient differs from Virasoro");
    return o;
}

Outcome realization()
{
    Outcome o;
    const auto r = realization_check(5, 4);
    o.require(r.ok() && r.pairs_checked > 0, std::to_string(r.mismatches.size()) + " mismatches");
    const auto B = AlgebraVariant::block_b();
    const LaurentOp x2{2, {{1, 1}}, 0}, xm2{-2, {{1, 1}}, 0};
    const auto got = laurent_to_element(laurent_bracket(x2, xm2));
    o.require(got == AlgebraElement::basis(B, BasisKey::gen(0, 0), -4) + AlgebraElement::basis(B, BasisKey::c()),
              "x^2 t, x^-2 t gave " + got.to_string());
    return o;
}

Outcome associated_graded()
{
    Outcome o;
    const auto r = associated_graded_check(4, 3);
    o.require(r.ok() && r.pairs_checked > 0, std::to_string(r.mismatches.size()) + " mismatches");
    return o;
}

Outcome intermediate_series()
{
    Outcome o;
    std::vector<IntermediateSpec> specs;
    for (const auto& a : {Rational(0), rat(1, 2), rat(-3, 2)}) {
        for (const auto& b : grid_b)
            specs.push_back(IntermediateSpec::aab(a, b));
        specs.push_back(IntermediateSpec::aa(a));
        specs.push_back(IntermediateSpec::ba(a));
    }
    const IndexRange range{-12, 12};
    const auto results = parallel_map<std::pair<ModuleAxiomReport, ModuleAxiomReport>>(specs.size(), [&](std::size_t i) {
        const auto m = build_window(specs[i], range);
        return std::make_pair(check_module_axioms(m, 4, 0), check_module_axioms(extend_trivially(m, 2), 4, 2));
    });
    for (std::size_t i = 0; i < specs.size(); ++i) {
        o.require(results[i].first.ok(), specs[i].to_string() + " fails");
        o.require(results[i].second.ok(), specs[i].to_string() + " extended fails");
    }
    return o;
}

std::vector<IntermediateSpec> aab_grid()
{
    std::vector<IntermediateSpec> specs;
    for (const auto& a : grid_a)
        for (const auto& b : grid_b)
            specs.push_back(IntermediateSpec::aab(a, b));
    return specs;
}

Outcome irreducibility()
{
    Outcome o;
    const auto specs = aab_grid();
    const auto verdicts = parallel_map<IrreducibilityVerdict>(
        specs.size(), [&](std::size_t i) { return irreducible_verdict(specs[i], {-8, 8}); });
    for (std::size_t i = 0; i < specs.size(); ++i)
        o.require(verdicts[i].agree(), specs[i].to_string() + " verdicts disagree");
    return o;
}

Outcome isomorphism()
{
    Outcome o;
    const IndexRange range{-8, 8};
    const auto yes = find_intertwiner(build_window(IntermediateSpec::aab(rat(1, 2), 1), range),
                                      build_window(IntermediateSpec::aab(rat(1, 2), 0), range));
    o.require(yes.isomorphism.has_value(), "no isomorphism A(1/2,1) -> A(1/2,0)");
    const auto no = find_intertwiner(build_window(IntermediateSpec::aab(0, 1), range),
                                     build_window(IntermediateSpec::aab(0, 0), range));
    o.require(!no.isomorphism.has_value(), "isomorphism found A(0,1) -> A(0,0)");
    return o;
}

Outcome trivial_extensions()
{
    Outcome o;
    std::vector<IntermediateSpec> specs;
    for (const auto& s : aab_grid())
        if (irreducible_verdict(s, {-8, 8}).bruteforce)
            specs.push_back(s);
    o.require(!specs.empty(), "no irreducible grid points");
    const auto results = parallel_map<ExtensionResult>(
        specs.size(), [&](std::size_t i) { return extension_space(build_window(specs[i], {-12, 12}), 2, 4); });
    for (std::size_t i = 0; i < specs.size(); ++i)
        o.require(results[i].status == ExtensionStatus::trivial && results[i].dimension == 0,
                  specs[i].to_string() + ": " + to_string(results[i].status) + ", dimension " +
                      std::to_string(results[i].dimension));
    return o;
}

Outcome coupling_machinery()
{
    Outcome o;
    const auto dbl = verify_double_bracket_identity();
    o.require(dbl.status == MatchStatus::exact && dbl.holds, "double bracket identity not exact");
    const auto sys = coupling_system();
    o.require(sys.delta.degree("i") <= 6, "determinant has i-degree " + std::to_string(sys.delta.degree("i")));
    const auto i6 = coupling_i6_report(sys);
    const bool matched = i6.status == MatchStatus::exact || i6.status == MatchStatus::normalized;
    const auto& grid = i6.details["grid"];
    bool all_nonzero = grid.size() == 27;
    for (const auto& g : grid)
        all_nonzero = all_nonzero && g["nonzero"].get<bool>();
    o.require(matched || (i6.status == MatchStatus::discrepancy && all_nonzero),
              "i^6 coefficient neither matches nor has a nonvanishing witness grid");
    if (o.pass && !matched)
        o.note = "i^6 coefficient recorded as discrepancy; determinant nonzero at all 27 grid points";
    return o;
}

Outcome shift_machinery()
{
    Outcome o;
    for (int n : {1, 2}) {
        const auto ad = adjoint_window(0, n, {-4, 4});
        for (const auto& g : {lambda_poly({0, 1}), lambda_poly({0, 0, 1}), lambda_poly({0, 0, 0, 1})})
            for (std::int64_t alpha : {1, 2}) {
                const auto r = polynomial_shift_identity(ad, g, alpha, n);
                o.require(r.holds, "shift identity fails for n=" + std::to_string(n) + ", g=" + g.to_string() +
                                       ", alpha=" + std::to_string(alpha));
            }
        const auto nil = nilpotency_chain_check(ad, n);
        o.require(nil.holds, "nilpotency chain violated for n=" + std::to_string(n));
    }
    const auto span = spanning_report(aab_grid(), {-8, 8});
    o.require(span.holds, "spanning fails: " + span.computed["failing"].dump());
    return o;
}

Outcome verma()
{
    Outcome o;
    for (int n : {1, 0}) {
        const auto oracle = colored_partitions(n + 1, 6);
        const auto dims = quasifinite_report(n, 6).dims;
        o.require(dims == oracle, "dimension table for n=" + std::to_string(n) + " differs from the oracle");
    }
    o.require(colored_partitions(2, 3) == std::vector<std::size_t>{1, 2, 5, 10}, "oracle n=1 head");
    o.require(colored_partitions(1, 3) == std::vector<std::size_t>{1, 1, 2, 3}, "oracle n=0 head");

    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> num(-20, 20), den(1, 11);
    for (int trial = 0; trial < 3; ++trial) {
        WeightFunctional w;
        w.lambda = {rat(num(rng), den(rng)), rat(num(rng), den(rng))};
        w.c = rat(num(rng), den(rng));
        for (std::int64_t d = 1; d <= 3; ++d) {
            const auto s = singular_vectors(w, d);
            o.require(s.vectors.empty() && s.validated, "generic weight has singular vectors at depth " + std::to_string(d));
        }
    }
    const auto zero = singular_vectors(WeightFunctional{{0, 0}, 0}, 1);
    bool nonzero = !zero.vectors.empty();
    for (const auto& v : zero.vectors)
        nonzero = nonzero && !v.empty();
    o.require(nonzero && zero.validated, "zero weight has no singular vector at depth 1");
    return o;
}

std::string cli_json(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return std::to_string(code) + "\n" + out.str();
}

Outcome determinism()
{
    Outcome o;
    const auto render_suite = [](std::size_t workers) {
        Report r{"lemmas", nlohmann::json::object(), {}};
        for (const auto& l : lemma_suite(workers))
            r.checks.push_back(check_from_lemma(l));
        return render(r, Format::json);
    };
    const auto base = render_suite(1);
    o.require(base == render_suite(1), "lemma suite differs between reruns");
    o.require(base == render_suite(4), "lemma suite differs between worker counts");

    const std::vector<std::vector<std::string>> commands{
        {"--format", "json", "lemmas"},
        {"--format", "json", "module", "--range", "-8:8", "grid"},
        {"--format", "json", "axioms", "--degree-bound", "3"},
        {"--format", "json", "verma", "--n", "1", "--depth", "2", "--lambda", "0,0", "singular"},
    };
    const char* saved = std::getenv("BLOCKLIE_WORKERS");
    const std::string keep = saved ? saved : "";
    for (const auto& cmd : commands) {
        ::setenv("BLOCKLIE_WORKERS", "1", 1);
        const auto one = cli_json(cmd);
        ::setenv("BLOCKLIE_WORKERS", "3", 1);
        const auto three = cli_json(cmd);
        const auto again = cli_json(cmd);
        o.require(one == three && three == again, "nondeterministic output for " + cmd[2]);
    }
    if (saved)
        ::setenv("BLOCKLIE_WORKERS", keep.c_str(), 1);
    else
        ::unsetenv("BLOCKLIE_WORKERS");
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"algebra axioms", algebra_axioms},
        {"Virasoro consistency", virasoro_consistency},
        {"Laurent realization", realization},
        {"associated graded", associated_graded},
        {"intermediate series module axioms", intermediate_series},
        {"irreducibility verdicts agree", irreducibility},
        {"intertwiners", isomorphism},
        {"trivial extensions over irreducible windows", trivial_extensions},
        {"coupling determinant", coupling_machinery},
        {"shift identity, spanning, nilpotency", shift_machinery},
        {"Verma dimensions and singular vectors", verma},
        {"deterministic reports", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first;
        std::cout.precision(2);
        std::cout << std::fixed << " (" << secs << "s)";
        if (!out.note.empty())
            std::cout << "  " << out.note;
        std::cout << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
