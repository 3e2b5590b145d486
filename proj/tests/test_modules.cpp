#include <random>

#include <catch_amalgamated.hpp>

#include "blocklie/module.hpp"
#include "blocklie/module_analysis.hpp"

using namespace blocklie;

namespace {

const std::vector<Rational> grid_a{0, 1, rat(1, 2), rat(-3, 2)};
const std::vector<Rational> grid_b{0, rat(1, 2), 1, 2};

Rational entry(const WindowedModule& m, std::int64_t deg, std::int64_t k, int level = 0)
{
    const auto a = m.action(BasisKey::gen(deg, level), k);
    REQUIRE(a);
    return a->at(0, 0);
}

WindowedModule small_tensor(std::int64_t half_width)
{
    return tensor(build_window(IntermediateSpec::aab(rat(1, 3), 0), {0, 1}),
                  build_window(IntermediateSpec::aab(rat(1, 4), 1), {-half_width, half_width}));
}

} // namespace

TEST_CASE("intermediate series coefficients")
{
    const auto a = act_intermediate(IntermediateSpec::aab(rat(1, 2), 2), BasisKey::gen(2), 3);
    CHECK(a.coeff == rat(15, 2));
    CHECK(a.target == 5);
    const auto b = act_intermediate(IntermediateSpec::aa(rat(1, 3)), BasisKey::gen(3), 0);
    CHECK(b.coeff == 10);
    CHECK(b.target == 3);
    const auto c = act_intermediate(IntermediateSpec::ba(rat(1, 3)), BasisKey::gen(3), -3);
    CHECK(c.coeff == -10);
    CHECK(c.target == 0);
    for (const auto& s : {IntermediateSpec::aab(rat(1, 2), 2), IntermediateSpec::aa(1), IntermediateSpec::ba(rat(-3, 2))})
        for (std::int64_t k = -4; k <= 4; ++k) {
            CHECK(act_intermediate(s, BasisKey::gen(1, 1), k).coeff == 0);
            CHECK(act_intermediate(s, BasisKey::c(), k).coeff == 0);
        }
    // away from the exceptional rows, A(a) and B(a) agree with A_{0,1} and A_{0,0}
    CHECK(act_intermediate(IntermediateSpec::aa(rat(1, 3)), BasisKey::gen(2), 1).coeff ==
          act_intermediate(IntermediateSpec::aab(0, 1), BasisKey::gen(2), 1).coeff);
    CHECK(act_intermediate(IntermediateSpec::ba(rat(1, 3)), BasisKey::gen(2), 1).coeff ==
          act_intermediate(IntermediateSpec::aab(0, 0), BasisKey::gen(2), 1).coeff);
}

TEST_CASE("built windows")
{
    CHECK(entry(build_window(IntermediateSpec::aab(0, 0), {-3, 3}), 1, 0) == 0);
    CHECK(entry(build_window(IntermediateSpec::aab(rat(1, 2), 0), {-3, 3}), 0, 2) == rat(5, 2));
    CHECK(entry(build_window(IntermediateSpec::ba(0), {-3, 3}), 1, -1) == -1);

    const auto m = build_window(IntermediateSpec::aab(1, 2), {-3, 3});
    CHECK_FALSE(m.action(BasisKey::gen(2), 2).has_value());
    CHECK_THROWS_AS(m.action(BasisKey::gen(1, 1), 0), UsageError);
    CHECK(m.action(BasisKey::c(), 0)->is_zero());

    CHECK(intermediate_offset(IntermediateSpec::aab(rat(1, 2), 2)) == rat(1, 2));
    CHECK(intermediate_offset(IntermediateSpec::aa(rat(1, 2))) == 0);
    for (const auto& a : grid_a)
        for (const auto& s : {IntermediateSpec::aab(a, rat(1, 2)), IntermediateSpec::aa(a), IntermediateSpec::ba(a)}) {
            const auto w = build_window(s, {-5, 5});
            for (std::int64_t k = -5; k <= 5; ++k)
                CHECK(entry(w, 0, k) == intermediate_offset(s) + rat(k));
        }
}

TEST_CASE("module axioms on built, extended and corrupted windows")
{
    const auto m = build_window(IntermediateSpec::aab(rat(1, 2), 2), {-10, 10});
    const auto r = check_module_axioms(m, 3, 0);
    CHECK(r.ok());
    CHECK(r.checks > 0);

    for (const auto& s : {IntermediateSpec::aab(rat(1, 2), 2), IntermediateSpec::aab(0, 0), IntermediateSpec::aa(0),
                          IntermediateSpec::ba(rat(-3, 2))}) {
        const auto ext = extend_trivially(build_window(s, {-8, 8}), 2);
        CHECK(ext.variant() == AlgebraVariant::block_b());
        CHECK(ext.acts(BasisKey::gen(3, 1)));
        CHECK(ext.acts(BasisKey::gen(0, 7)));
        const auto er = check_module_axioms(ext, 3, 2);
        CHECK(er.ok());
        CHECK(er.skipped_pairs == 0);
    }

    auto bad = build_window(IntermediateSpec::aab(rat(1, 2), 2), {-6, 6});
    RationalMatrix wrong(1, 1);
    wrong.set(0, 0, 99);
    bad.set_action(BasisKey::gen(2), 1, wrong);
    const auto br = check_module_axioms(bad, 3, 0);
    CHECK_FALSE(br.ok());
    REQUIRE_FALSE(br.violations.empty());
    bool names_l2 = false;
    for (const auto& v : br.violations)
        names_l2 = names_l2 || v.x == BasisKey::gen(2) || v.y == BasisKey::gen(2) ||
                   std::abs(v.x.degree + v.y.degree) == 2;
    CHECK(names_l2);
    CHECK_FALSE(check_module_axioms(extend_trivially(bad, 2), 3, 2).ok());
}

TEST_CASE("module shapes and validation")
{
    WindowedModule m(AlgebraVariant::virasoro(), 0, {-2, 2});
    m.set_dim(0, 2);
    m.set_dim(1, 1);
    CHECK_THROWS_AS(m.set_dim(3, 1), UsageError);
    CHECK_THROWS_AS(m.set_action(BasisKey::gen(1), 0, RationalMatrix(2, 2)), UsageError);
    CHECK_THROWS_AS(m.set_action(BasisKey::gen(3), 0, RationalMatrix(0, 2)), UsageError);
    CHECK_THROWS_AS(m.declare(BasisKey::c()), UsageError);
    CHECK_NOTHROW(m.set_action(BasisKey::gen(1), 0, RationalMatrix(1, 2)));
    CHECK(IndexRange::parse("-8:8").size() == 17);
    CHECK_THROWS_AS(IndexRange::parse("8"), ParseError);
    CHECK(IndexRange::parse("3:1").empty());
    CHECK_THROWS_AS(IndexRange::parse("a:1"), ParseError);
}

TEST_CASE("submodule closure")
{
    const auto zero = build_window(IntermediateSpec::aab(0, 0), {-8, 8});
    const auto from_x0 = submodule_closure(zero, {{0, unit_vector(1, 0)}});
    CHECK(from_x0.total() == 1);
    CHECK(from_x0.dim(0) == 1);

    // L_{-1} x_1 = x_0 in A_{0,0}; in A_{0,1} nothing maps onto x_0
    CHECK(submodule_closure(zero, {{1, unit_vector(1, 0)}}).total() == zero.total_dim());
    const auto one = build_window(IntermediateSpec::aab(0, 1), {-8, 8});
    const auto from_x1 = submodule_closure(one, {{1, unit_vector(1, 0)}});
    for (std::int64_t k = -8; k <= 8; ++k)
        CHECK(from_x1.dim(k) == (k == 0 ? 0u : 1u));

    const auto generic = build_window(IntermediateSpec::aab(rat(1, 2), 2), {-8, 8});
    for (std::int64_t seed = -8; seed <= 8; ++seed) {
        const auto c = submodule_closure(generic, {{seed, unit_vector(1, 0)}});
        CHECK(c.total() == generic.total_dim());
        for (std::size_t n = 1; n < c.history.size(); ++n)
            CHECK(c.history[n - 1] <= c.history[n]);
        CHECK(c.rounds <= generic.total_dim());
    }
}

TEST_CASE("irreducibility verdicts agree with the criterion")
{
    auto v = irreducible_verdict(IntermediateSpec::aab(rat(1, 2), 1), {-8, 8});
    CHECK((v.bruteforce && v.criterion));
    v = irreducible_verdict(IntermediateSpec::aab(0, 1), {-8, 8});
    CHECK((!v.bruteforce && !v.criterion));
    v = irreducible_verdict(IntermediateSpec::aab(0, 2), {-8, 8});
    CHECK((v.bruteforce && v.criterion));
    for (const auto& a : grid_a)
        for (const auto& b : grid_b) {
            const auto s = IntermediateSpec::aab(a, b);
            INFO(s.to_string());
            const auto verdict = irreducible_verdict(s, {-8, 8});
            CHECK(verdict.agree());
            CHECK(verdict.criterion == (!is_integer(a) || (b != 0 && b != 1)));
        }
}

TEST_CASE("intertwiners")
{
    const IndexRange r{-8, 8};
    const auto a1 = build_window(IntermediateSpec::aab(rat(1, 2), 1), r);
    const auto a0 = build_window(IntermediateSpec::aab(rat(1, 2), 0), r);
    const auto iso = find_intertwiner(a1, a0);
    REQUIRE(iso.isomorphism);
    CHECK(iso.solution_dim == 1);
    const auto& phi = *iso.isomorphism;
    // (a+k) phi_k is constant along the window
    const Rational ref = phi.at(0).at(0, 0) * rat(1, 2);
    for (std::int64_t k = r.lo; k <= r.hi; ++k)
        CHECK(phi.at(k).at(0, 0) * (rat(1, 2) + rat(k)) == ref);

    CHECK_FALSE(find_intertwiner(build_window(IntermediateSpec::aab(0, 1), r), build_window(IntermediateSpec::aab(0, 0), r))
                    .isomorphism);
    CHECK_FALSE(find_intertwiner(build_window(IntermediateSpec::aab(rat(1, 2), 2), r), a0).isomorphism);

    std::mt19937 rng(4);
    for (int trial = 0; trial < 6; ++trial) {
        const auto s = IntermediateSpec::aab(grid_a[rng() % 4], grid_b[rng() % 4]);
        const auto m = build_window(s, {-5, 5});
        const auto self = find_intertwiner(m, m);
        CHECK(self.isomorphism.has_value());
        CHECK(self.solution_dim >= 1);
    }
    const auto t = small_tensor(3);
    CHECK(find_intertwiner(t, t).isomorphism.has_value());
}

TEST_CASE("tensor windows")
{
    const auto t = small_tensor(6);
    CHECK(t.range().lo == -6);
    CHECK(t.range().hi == 7);
    for (std::int64_t k = -5; k <= 6; ++k)
        CHECK(t.dim(k) == 2);
    CHECK(t.offset() == rat(1, 3) + rat(1, 4));
    CHECK(check_module_axioms(t, 3, 0).ok());
    CHECK(check_module_axioms(extend_trivially(t, 2), 3, 2).ok());

    const auto wide = tensor(build_window(IntermediateSpec::aab(0, 0), {-3, 3}), build_window(IntermediateSpec::aab(0, 1), {-3, 3}));
    CHECK(wide.dim(0) == 7);
    CHECK(check_module_axioms(wide, 2, 0).ok());

    const auto empty = tensor(build_window(IntermediateSpec::aab(0, 0), {0, -1}), build_window(IntermediateSpec::aab(0, 1), {-3, 3}));
    CHECK(empty.total_dim() == 0);

    const auto sum = direct_sum(build_window(IntermediateSpec::aab(rat(1, 2), 1), {-5, 5}),
                                build_window(IntermediateSpec::aab(rat(1, 2), 2), {-5, 5}));
    CHECK(sum.dim(0) == 2);
    CHECK(check_module_axioms(sum, 3, 0).ok());
}

TEST_CASE("adjoint windows")
{
    const auto ad = adjoint_window(0, 1, {-4, 4});
    for (std::int64_t k = -4; k <= 4; ++k)
        CHECK(ad.dim(k) == (k == 0 ? 3u : 2u));
    // basis of V_a is L_{a,0}, L_{a,1}, then C at a = 0
    const auto l11 = ad.action(BasisKey::gen(1, 1), 1);
    REQUIRE(l11);
    CHECK(l11->at(1, 0) == 1);
    CHECK(l11->at(0, 0) == 0);
    CHECK(check_module_axioms(ad, 3, 2).ok());
    CHECK(check_module_axioms(adjoint_window(0, 2, {-4, 4}), 3, 3).ok());

    const auto shifted = adjoint_window(1, 2, {-3, 3});
    CHECK(shifted.dim(0) == 2);
    CHECK(check_module_axioms(shifted, 3, 3).ok());
}

TEST_CASE("extension space of level-one actions")
{
    const auto r = extension_space(build_window(IntermediateSpec::aab(rat(1, 2), 2), {-12, 12}), 2);
    CHECK(r.status == ExtensionStatus::trivial);
    CHECK(r.dimension == 0);
    REQUIRE(r.levels.size() == 2);
    for (const auto& l : r.levels) {
        CHECK(l.unknowns > 0);
        CHECK(l.forced_zero);
    }

    const auto t = extension_space(small_tensor(10), 2);
    CHECK(t.status == ExtensionStatus::trivial);
    CHECK(t.dimension == 0);

    WindowedModule zero(AlgebraVariant::virasoro(), 0, {0, -1});
    CHECK(extension_space(zero, 2).status == ExtensionStatus::inconclusive);
}

TEST_CASE("spanning by M and the Virasoro action")
{
    CHECK(spanning_check_M(build_window(IntermediateSpec::aab(rat(1, 2), 2), {-8, 8})).holds);
    CHECK(spanning_check_M(build_window(IntermediateSpec::aab(0, 0), {-8, 8})).holds);

    auto cut = build_window(IntermediateSpec::aab(rat(1, 2), 2), {-8, 8});
    for (std::int64_t k = -2; k <= 2; ++k)
        cut.set_action(BasisKey::gen(6 - k), k, RationalMatrix(1, 1));
    const auto r = spanning_check_M(cut);
    CHECK_FALSE(r.holds);
    CHECK(r.failing == std::vector<std::int64_t>{6});
}

TEST_CASE("classification of windows")
{
    const auto c = classify_window(extend_trivially(build_window(IntermediateSpec::aab(rat(1, 2), 2), {-8, 8})));
    CHECK(c.kind == ModuleKind::intermediate_series);
    REQUIRE(c.spec);
    CHECK(c.spec->family == Family::Aab);
    CHECK(c.spec->a == rat(1, 2));
    CHECK(c.spec->b == 2);

    for (const auto& a : grid_a)
        for (const auto& b : grid_b) {
            if (!irreducibility_criterion(IntermediateSpec::aab(a, b)))
                continue;
            const auto got = classify_window(extend_trivially(build_window(IntermediateSpec::aab(a, b), {-8, 8})));
            INFO(to_string(a) << " " << to_string(b));
            REQUIRE(got.spec);
            CHECK(got.spec->a == (is_integer(a) ? Rational(0) : a));
            CHECK(got.spec->b == b);
            CHECK(*got.raw_a == a);
        }

    const auto shifted = classify_window(build_window(IntermediateSpec::aab(3, 2), {-8, 8}));
    REQUIRE(shifted.spec);
    CHECK(shifted.spec->a == 0);
    CHECK(*shifted.raw_a == 3);

    CHECK(classify_window(small_tensor(6)).kind == ModuleKind::unknown);
    CHECK(classify_window(adjoint_window(0, 1, {-4, 4})).kind == ModuleKind::unknown);
}

TEST_CASE("module JSON")
{
    const auto m = extend_trivially(build_window(IntermediateSpec::aa(rat(1, 3)), {-3, 3}), 1);
    const auto j = to_json(m);
    const auto back = module_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(check_module_axioms(back, 2, 1).ok());

    const auto t = small_tensor(2);
    CHECK(to_json(module_from_json(to_json(t))) == to_json(t));

    auto broken = j;
    broken["actions"][0]["matrix"]["rows"] = 5;
    try {
        (void)module_from_json(broken);
        FAIL("accepted a mis-shaped action");
    } catch (const ParseError& e) {
        CHECK(std::string(e.field()).rfind("module.actions[0]", 0) == 0);
    }
    auto bad_key = j;
    bad_key["generators"].push_back({{"alpha", 1}, {"level", -1}});
    CHECK_THROWS_AS(module_from_json(bad_key), ParseError);
}
