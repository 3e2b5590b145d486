#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blocklie/algebra.hpp"
#include "blocklie/laurent.hpp"
#include "blocklie/matrix.hpp"

namespace blocklie {

/// Finite slice of a variant's basis: |degree| <= degree_bound, level_lo <= level <= level_hi
/// (intersected with the variant's own level band).
struct AlgebraWindow {
    std::int64_t degree_bound = 0;
    int level_lo = 0;
    int level_hi = 0;
};

inline std::vector<BasisKey> window_keys(const AlgebraVariant& v, const AlgebraWindow& w, bool with_central)
{
    std::vector<BasisKey> keys;
    int lo = std::max(w.level_lo, v.min_level());
    int hi = w.level_hi;
    if (auto top = v.max_level())
        hi = std::min(hi, *top);
    for (std::int64_t a = -w.degree_bound; a <= w.degree_bound; ++a)
        for (int l = lo; l <= hi; ++l)
            keys.push_back(BasisKey::gen(a, l));
    if (with_central && v.has_central())
        keys.push_back(BasisKey::c());
    return keys;
}

struct AxiomViolation {
    std::string law; // "antisymmetry" or "jacobi"
    std::vector<BasisKey> keys;
    AlgebraElement residual;
};

struct AxiomReport {
    AlgebraVariant variant;
    AlgebraWindow window;
    std::size_t pairs_checked = 0;
    std::size_t triples_checked = 0;
    std::vector<AxiomViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Antisymmetry on all window pairs and Jacobi on all window triples, exactly.
/// `key_bracket` supplies the structure constants so corrupted tables can be tested.
template <class KeyBracket>
AxiomReport verify_algebra_axioms_with(const AlgebraVariant& v, const AlgebraWindow& w, const KeyBracket& key_bracket,
                                       std::size_t max_reported = 20)
{
    AxiomReport rep{v, w, 0, 0, {}};
    const auto keys = window_keys(v, w, true);
    auto record = [&](const char* law, std::vector<BasisKey> ks, AlgebraElement r) {
        if (rep.violations.size() < max_reported)
            rep.violations.push_back({law, std::move(ks), std::move(r)});
        else if (rep.violations.size() == max_reported)
            rep.violations.push_back({"truncated", {}, AlgebraElement(v)});
    };
    auto br = [&](const AlgebraElement& x, const AlgebraElement& y) { return bracket_with(key_bracket, x, y); };

    for (std::size_t p = 0; p < keys.size(); ++p)
        for (std::size_t q = p; q < keys.size(); ++q) {
            ++rep.pairs_checked;
            AlgebraElement s = key_bracket(keys[p], keys[q]) + key_bracket(keys[q], keys[p]);
            if (!s.is_zero())
                record("antisymmetry", {keys[p], keys[q]}, s);
        }

    // Jacobi is symmetric under cyclic rotation, so p <= q, p <= r covers every orbit.
    for (std::size_t p = 0; p < keys.size(); ++p) {
        const auto x = AlgebraElement::basis(v, keys[p]);
        for (std::size_t q = p; q < keys.size(); ++q) {
            const auto y = AlgebraElement::basis(v, keys[q]);
            const AlgebraElement xy = key_bracket(keys[p], keys[q]);
            for (std::size_t r = p; r < keys.size(); ++r) {
                ++rep.triples_checked;
                const auto z = AlgebraElement::basis(v, keys[r]);
                AlgebraElement j = br(x, key_bracket(keys[q], keys[r]));
                j += br(y, key_bracket(keys[r], keys[p]));
                j += br(z, xy);
                if (!j.is_zero())
                    record("jacobi", {keys[p], keys[q], keys[r]}, j);
            }
        }
    }
    return rep;
}

inline AxiomReport verify_algebra_axioms(const AlgebraVariant& v, const AlgebraWindow& w)
{
    return verify_algebra_axioms_with(v, w, [&v](const BasisKey& a, const BasisKey& b) { return bracket_keys(v, a, b); });
}

// ---------------------------------------------------------------------------

struct VirConsistencyReport {
    std::int64_t sweep_bound = 0;
    bool homomorphism = false;
    bool unique = false;
    std::optional<Rational> c0; // C_B -> c0 * C_Vir
    std::size_t pairs_checked = 0;
    bool quotient_matches = false; // B~_{0,0} agrees with Vir under the same c0
    std::vector<std::string> problems;
};

/// Finds the c0 for which L_{a,0} -> L_a, C -> c0 C_Vir is a homomorphism on |a|,|b| <= bound.
inline VirConsistencyReport vir_consistency(std::int64_t bound)
{
    if (bound < 2)
        throw UsageError("vir_consistency needs a sweep bound >= 2");
    VirConsistencyReport rep;
    rep.sweep_bound = bound;
    const auto B = AlgebraVariant::block_b();
    const auto V = AlgebraVariant::virasoro();
    // Collect c0 * u = w equations from the central parts.
    std::vector<Rational> us, ws;
    bool generator_parts_match = true;
    for (std::int64_t a = -bound; a <= bound; ++a)
        for (std::int64_t b = -bound; b <= bound; ++b) {
            ++rep.pairs_checked;
            auto xb = bracket_keys(B, BasisKey::gen(a, 0), BasisKey::gen(b, 0));
            auto xv = bracket_keys(V, BasisKey::gen(a, 0), BasisKey::gen(b, 0));
            for (const auto& [k, c] : xb.terms())
                if (!k.central && c != xv.coeff(k))
                    generator_parts_match = false;
            for (const auto& [k, c] : xv.terms())
                if (!k.central && c != xb.coeff(k))
                    generator_parts_match = false;
            us.push_back(xb.central());
            ws.push_back(xv.central());
        }
    if (!generator_parts_match)
        rep.problems.push_back("generator parts differ");
    RationalMatrix m(us.size(), 1);
    for (std::size_t r = 0; r < us.size(); ++r)
        m.set(r, 0, us[r]);
    auto sol = mat_solve(m, ws);
    if (!sol) {
        rep.problems.push_back("no rescaling of C is consistent");
    } else {
        rep.c0 = (*sol)[0];
        rep.unique = mat_rank(m) == 1;
        if (!rep.unique)
            rep.problems.push_back("central rescaling not determined by this window");
    }
    rep.homomorphism = generator_parts_match && rep.c0.has_value();

    if (rep.c0) {
        const auto Q = AlgebraVariant::quotient(0, 0);
        bool ok = true;
        for (std::int64_t a = -bound; a <= bound; ++a)
            for (std::int64_t b = -bound; b <= bound; ++b) {
                auto xq = bracket_keys(Q, BasisKey::gen(a, 0), BasisKey::gen(b, 0));
                auto xv = bracket_keys(V, BasisKey::gen(a, 0), BasisKey::gen(b, 0));
                AlgebraElement mapped(V);
                for (const auto& [k, c] : xq.terms())
                    mapped.add(k, k.central ? c * *rep.c0 : c);
                if (!(mapped == xv))
                    ok = false;
            }
        rep.quotient_matches = ok;
        if (!ok)
            rep.problems.push_back("B~_{0,0} disagrees with Vir");
    }
    return rep;
}

/// The rescaling factor C_B -> c0 C_Vir, discovered by vir_consistency.
inline Rational virasoro_central_rescaling()
{
    static const Rational c0 = [] {
        auto rep = vir_consistency(4);
        if (!rep.c0 || !rep.unique)
            throw std::logic_error("Virasoro central rescaling not determined");
        return *rep.c0;
    }();
    return c0;
}

// ---------------------------------------------------------------------------

struct PairMismatch {
    BasisKey x, y;
    std::string detail;
};

struct PairCheckReport {
    std::size_t pairs_checked = 0;
    std::vector<PairMismatch> mismatches;
    bool ok() const { return mismatches.empty(); }
};

/// Top filtration component of [x^a D^{i+1}, x^b D^{j+1}] in W_inf against the B constant
/// ((i+1)b - (j+1)a) for every window pair.
inline PairCheckReport associated_graded_check(std::int64_t degree_bound, int level_cap)
{
    PairCheckReport rep;
    const auto W = AlgebraVariant::winf();
    for (std::int64_t a = -degree_bound; a <= degree_bound; ++a)
        for (int i = 0; i <= level_cap; ++i)
            for (std::int64_t b = -degree_bound; b <= degree_bound; ++b)
                for (int j = 0; j <= level_cap; ++j) {
                    ++rep.pairs_checked;
                    auto w = bracket_keys(W, BasisKey::gen(a, i + 1), BasisKey::gen(b, j + 1));
                    const int top = i + j + 1;
                    Rational expected = Rational(static_cast<long>((i + 1) * b - (j + 1) * a));
                    Rational got = w.coeff(BasisKey::gen(a + b, top));
                    bool above = false;
                    for (const auto& [k, c] : w.terms())
                        if (!k.central && k.level > top)
                            above = true;
                    if (got != expected || above)
                        rep.mismatches.push_back({BasisKey::gen(a, i), BasisKey::gen(b, j),
                                                  "top coefficient " + to_string(got) + " vs " + to_string(expected) +
                                                      (above ? " (terms above filtration degree)" : "")});
                }
    return rep;
}

/// laurent_bracket against bracket in B under L_{a,i} <-> x^a t^{i+1}, central terms included.
inline PairCheckReport realization_check(std::int64_t degree_bound, int level_cap)
{
    PairCheckReport rep;
    const auto B = AlgebraVariant::block_b();
    for (std::int64_t a = -degree_bound; a <= degree_bound; ++a)
        for (int i = 0; i <= level_cap; ++i)
            for (std::int64_t b = -degree_bound; b <= degree_bound; ++b)
                for (int j = 0; j <= level_cap; ++j) {
                    ++rep.pairs_checked;
                    LaurentOp x{a, {{i + 1, Rational(1)}}, 0};
                    LaurentOp y{b, {{j + 1, Rational(1)}}, 0};
                    auto via_laurent = laurent_to_element(laurent_bracket(x, y));
                    auto direct = bracket_keys(B, BasisKey::gen(a, i), BasisKey::gen(b, j));
                    if (!(via_laurent == direct))
                        rep.mismatches.push_back({BasisKey::gen(a, i), BasisKey::gen(b, j),
                                                  via_laurent.to_string() + " vs " + direct.to_string()});
                }
    return rep;
}

/// Bracket-then-project equals project-then-bracket for inputs with levels in [m, n].
inline PairCheckReport quotient_soundness_check(int m, int n, std::int64_t degree_bound)
{
    PairCheckReport rep;
    const auto B = AlgebraVariant::block_b();
    const auto Q = AlgebraVariant::quotient(m, n);
    for (std::int64_t a = -degree_bound; a <= degree_bound; ++a)
        for (int i = m; i <= n; ++i)
            for (std::int64_t b = -degree_bound; b <= degree_bound; ++b)
                for (int j = m; j <= n; ++j) {
                    ++rep.pairs_checked;
                    auto lhs = project_to_quotient(bracket_keys(B, BasisKey::gen(a, i), BasisKey::gen(b, j)), m, n);
                    auto rhs = bracket_keys(Q, BasisKey::gen(a, i), BasisKey::gen(b, j));
                    if (!(lhs == rhs))
                        rep.mismatches.push_back({BasisKey::gen(a, i), BasisKey::gen(b, j),
                                                  lhs.to_string() + " vs " + rhs.to_string()});
                }
    return rep;
}

// ---------------------------------------------------------------------------

enum class ClosureMode {
    subalgebra, ///< bracket reached elements among themselves
    ideal,      ///< bracket reached elements with every window basis element
};

struct GenerationReport {
    std::set<BasisKey> reached;
    std::size_t rounds = 0;
};

/// Keys of the window spanned by iterated brackets starting from `seeds`. Brackets of
/// basis keys are single keys plus a central part, so the span is always spanned by keys.
inline GenerationReport generation_closure(const std::vector<BasisKey>& seeds, const AlgebraVariant& v,
                                           const AlgebraWindow& w, ClosureMode mode)
{
    const auto window = window_keys(v, w, true);
    const std::set<BasisKey> in_window(window.begin(), window.end());
    GenerationReport rep;
    for (const auto& s : seeds) {
        require_key(v, s);
        if (in_window.count(s))
            rep.reached.insert(s);
    }
    for (bool grew = true; grew;) {
        grew = false;
        ++rep.rounds;
        std::vector<BasisKey> current(rep.reached.begin(), rep.reached.end());
        const std::vector<BasisKey>& partners = mode == ClosureMode::ideal ? window : current;
        for (const auto& x : current)
            for (const auto& y : partners) {
                const AlgebraElement xy = bracket_keys(v, x, y);
                for (const auto& [k, c] : xy.terms())
                    if (in_window.count(k) && rep.reached.insert(k).second)
                        grew = true;
            }
    }
    return rep;
}

} // namespace blocklie
