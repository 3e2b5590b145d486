#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "blocklie/algebra.hpp"
#include "blocklie/error.hpp"
#include "blocklie/matrix.hpp"
#include "blocklie/module.hpp"
#include "blocklie/rational.hpp"

namespace blocklie {

// ---------------------------------------------------------------------------
// Module axioms
// ---------------------------------------------------------------------------

struct ModuleViolation {
    BasisKey x, y;
    std::int64_t k;
    std::size_t bad_entries;
};

struct ModuleAxiomReport {
    std::size_t checks = 0;        ///< (x, y, k) instances compared
    std::size_t skipped_pairs = 0; ///< pairs whose bracket involves an undeclared generator
    std::size_t violation_count = 0;
    std::vector<ModuleViolation> violations; ///< first few only
    bool ok() const { return violation_count == 0; }
};

namespace detail {

/// Columns of V_k for which [x, y] can be compared without factor truncation.
inline std::vector<bool> comparable_columns(const WindowedModule& m, std::int64_t k, std::int64_t a, std::int64_t b)
{
    std::vector<bool> ok(m.dim(k), true);
    const auto& f = m.factors();
    if (!f)
        return ok;
    auto inside = [&](const IndexRange& r, std::int64_t p) {
        return r.contains(p) && r.contains(p + a) && r.contains(p + b) && r.contains(p + a + b);
    };
    for (const auto& blk : f->blocks(k)) {
        const bool good = inside(f->first, blk.p) && inside(f->second, blk.q);
        for (std::size_t c = 0; c < blk.dim_first * blk.dim_second; ++c)
            ok[blk.offset + c] = good;
    }
    return ok;
}

inline std::optional<RationalMatrix> act_element(const WindowedModule& m, const AlgebraElement& z, std::int64_t k,
                                                 std::int64_t degree)
{
    RationalMatrix out(m.dim(k + degree), m.dim(k));
    for (const auto& [key, c] : z.terms()) {
        if (!m.acts(key))
            return std::nullopt;
        auto a = m.action(key, k);
        if (!a)
            return std::nullopt;
        out += *a * c;
    }
    return out;
}

} // namespace detail

/// Compares x y - y x with [x, y] on every V_k where all four weights stay in the window,
/// for declared generators with |degree| <= degree_bound and level <= level_cap (and C).
inline ModuleAxiomReport check_module_axioms(const WindowedModule& m, std::int64_t degree_bound, int level_cap,
                                             std::size_t max_reported = 20)
{
    ModuleAxiomReport rep;
    std::vector<BasisKey> keys;
    for (const auto& g : m.generators())
        if ((g.degree >= -degree_bound && g.degree <= degree_bound) && g.level <= level_cap)
            keys.push_back(g);
    if (m.variant().has_central())
        keys.push_back(BasisKey::c());
    const auto& r = m.range();
    for (std::size_t p = 0; p < keys.size(); ++p)
        for (std::size_t q = p + 1; q < keys.size(); ++q) {
            const auto& x = keys[p];
            const auto& y = keys[q];
            const AlgebraElement xy = bracket_keys(m.variant(), x, y);
            bool declared = true;
            for (const auto& [key, c] : xy.terms())
                declared = declared && m.acts(key);
            if (!declared) {
                ++rep.skipped_pairs;
                continue;
            }
            const std::int64_t a = x.central ? 0 : x.degree;
            const std::int64_t b = y.central ? 0 : y.degree;
            for (std::int64_t k = r.lo; k <= r.hi; ++k) {
                if (!r.contains(k + a) || !r.contains(k + b) || !r.contains(k + a + b))
                    continue;
                const RationalMatrix lhs = *m.action(x, k + b) * *m.action(y, k) - *m.action(y, k + a) * *m.action(x, k);
                const RationalMatrix rhs = *detail::act_element(m, xy, k, a + b);
                const RationalMatrix diff = lhs - rhs;
                ++rep.checks;
                if (diff.is_zero())
                    continue;
                const auto cols = detail::comparable_columns(m, k, a, b);
                std::size_t bad = 0;
                for (const auto& [idx, v] : diff.entries())
                    if (cols[idx.second])
                        ++bad;
                if (bad == 0)
                    continue;
                ++rep.violation_count;
                if (rep.violations.size() < max_reported)
                    rep.violations.push_back({x, y, k, bad});
            }
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Submodules
// ---------------------------------------------------------------------------

struct ClosureResult {
    std::map<std::int64_t, Subspace> spaces;
    std::vector<std::size_t> history; ///< total dimension after each round, starting with the seeds
    std::size_t rounds = 0;

    std::size_t dim(std::int64_t k) const
    {
        auto it = spaces.find(k);
        return it == spaces.end() ? 0 : it->second.dim();
    }
    std::size_t total() const { return history.empty() ? 0 : history.back(); }
};

/// Smallest subspace of the window containing the seeds and stable under the declared
/// generators, as far as their images stay inside the window.
inline ClosureResult submodule_closure(const WindowedModule& m,
                                       const std::vector<std::pair<std::int64_t, RationalVector>>& seeds)
{
    ClosureResult res;
    for (std::int64_t k = m.range().lo; k <= m.range().hi; ++k)
        res.spaces.emplace(k, Subspace(m.dim(k)));
    std::vector<std::pair<std::int64_t, RationalVector>> frontier;
    std::size_t total = 0;
    for (const auto& [k, v] : seeds) {
        if (!m.range().contains(k))
            throw UsageError("submodule_closure: seed index " + std::to_string(k) + " outside module range");
        if (v.size() != m.dim(k))
            throw UsageError("submodule_closure: seed at " + std::to_string(k) + " has length " +
                             std::to_string(v.size()) + ", expected " + std::to_string(m.dim(k)));
        if (res.spaces.at(k).insert(v)) {
            frontier.emplace_back(k, v);
            ++total;
        }
    }
    res.history.push_back(total);
    const std::vector<BasisKey> gens(m.generators().begin(), m.generators().end());
    while (!frontier.empty()) {
        std::vector<std::pair<std::int64_t, RationalVector>> next;
        for (const auto& [k, v] : frontier)
            for (const auto& g : gens) {
                auto a = m.action(g, k);
                if (!a || a->is_zero())
                    continue;
                const std::int64_t t = k + g.degree;
                RationalVector w = a->apply(v);
                if (res.spaces.at(t).insert(w)) {
                    next.emplace_back(t, std::move(w));
                    ++total;
                }
            }
        ++res.rounds;
        res.history.push_back(total);
        frontier = std::move(next);
    }
    return res;
}

inline RationalVector unit_vector(std::size_t n, std::size_t i)
{
    RationalVector v(n);
    v.at(i) = 1;
    return v;
}

struct IrreducibilityVerdict {
    bool bruteforce = false; ///< every x_k generates the whole window
    bool criterion = false;  ///< closed-form classification
    std::vector<std::int64_t> non_generating; ///< seeds whose closure is proper
    bool agree() const { return bruteforce == criterion; }
};

/// A_{a,b} is irreducible iff a is not an integer or b is not 0 or 1; A(a) and B(a)
/// always contain a proper submodule.
inline bool irreducibility_criterion(const IntermediateSpec& spec)
{
    if (spec.family != Family::Aab)
        return false;
    return !is_integer(spec.a) || (spec.b != 0 && spec.b != 1);
}

inline IrreducibilityVerdict irreducible_verdict(const IntermediateSpec& spec, IndexRange range)
{
    const auto m = build_window(spec, range);
    IrreducibilityVerdict v;
    v.criterion = irreducibility_criterion(spec);
    for (std::int64_t k = range.lo; k <= range.hi; ++k) {
        const auto c = submodule_closure(m, {{k, unit_vector(1, 0)}});
        if (c.total() != m.total_dim())
            v.non_generating.push_back(k);
    }
    v.bruteforce = !range.empty() && v.non_generating.empty();
    return v;
}

// ---------------------------------------------------------------------------
// Intertwiners
// ---------------------------------------------------------------------------

struct IntertwinerResult {
    std::size_t solution_dim = 0; ///< dimension of the space of weight-preserving module maps
    std::optional<std::map<std::int64_t, RationalMatrix>> isomorphism;
};

namespace detail {

struct BlockLayout {
    std::map<std::int64_t, std::size_t> offset;
    std::map<std::int64_t, std::pair<std::size_t, std::size_t>> shape;
    std::size_t total = 0;

    void add(std::int64_t k, std::size_t rows, std::size_t cols)
    {
        offset[k] = total;
        shape[k] = {rows, cols};
        total += rows * cols;
    }
    std::size_t var(std::int64_t k, std::size_t r, std::size_t c) const
    {
        return offset.at(k) + r * shape.at(k).second + c;
    }
    std::map<std::int64_t, RationalMatrix> unpack(const RationalVector& x) const
    {
        std::map<std::int64_t, RationalMatrix> out;
        for (const auto& [k, sh] : shape) {
            RationalMatrix m(sh.first, sh.second);
            for (std::size_t r = 0; r < sh.first; ++r)
                for (std::size_t c = 0; c < sh.second; ++c)
                    m.set(r, c, x[var(k, r, c)]);
            out.emplace(k, std::move(m));
        }
        return out;
    }
};

/// Accumulates coef * L * T_m * R into the equation rows starting at `row0`.
inline void add_sandwich(RationalMatrix& sys, std::size_t row0, std::size_t out_cols, const BlockLayout& lay,
                         std::int64_t m, const Rational& coef, const RationalMatrix& left, const RationalMatrix& right)
{
    if (blocklie::is_zero(coef))
        return;
    for (const auto& [lr, lv] : left.entries())
        for (const auto& [rr, rv] : right.entries())
            sys.add(row0 + lr.first * out_cols + rr.second, lay.var(m, lr.second, rr.first), coef * lv * rv);
}

} // namespace detail

/// Solves rho_B(g) phi_k = phi_{k+deg g} rho_A(g) for weight-preserving phi and looks for an
/// invertible solution among the kernel basis and deterministic random combinations.
inline IntertwinerResult find_intertwiner(const WindowedModule& a, const WindowedModule& b, std::size_t tries = 16)
{
    if (!(a.variant() == b.variant()) || !(a.range() == b.range()))
        throw UsageError("find_intertwiner needs modules over the same variant and range");
    IntertwinerResult res;
    const auto& r = a.range();
    detail::BlockLayout lay;
    bool same_dims = true;
    for (std::int64_t k = r.lo; k <= r.hi; ++k) {
        lay.add(k, b.dim(k), a.dim(k));
        same_dims = same_dims && a.dim(k) == b.dim(k);
    }
    std::vector<BasisKey> gens;
    for (const auto& g : a.generators())
        if (b.acts(g))
            gens.push_back(g);
    if (a.variant().has_central())
        gens.push_back(BasisKey::c());
    std::size_t rows = 0;
    for (const auto& g : gens)
        for (std::int64_t k = r.lo; k <= r.hi; ++k)
            if (r.contains(k + (g.central ? 0 : g.degree)))
                rows += b.dim(k + (g.central ? 0 : g.degree)) * a.dim(k);
    RationalMatrix sys(rows, lay.total);
    std::size_t row0 = 0;
    for (const auto& g : gens)
        for (std::int64_t k = r.lo; k <= r.hi; ++k) {
            const std::int64_t t = k + (g.central ? 0 : g.degree);
            if (!r.contains(t))
                continue;
            detail::add_sandwich(sys, row0, a.dim(k), lay, k, 1, *b.action(g, k), RationalMatrix::identity(a.dim(k)));
            detail::add_sandwich(sys, row0, a.dim(k), lay, t, -1, RationalMatrix::identity(b.dim(t)),
                                 *a.action(g, k));
            row0 += b.dim(t) * a.dim(k);
        }
    const auto red = mat_reduce(sys);
    res.solution_dim = red.kernel_basis.size();
    if (!same_dims || red.kernel_basis.empty())
        return res;

    auto invertible = [&](const RationalVector& x) {
        auto maps = lay.unpack(x);
        for (const auto& [k, m] : maps)
            if (mat_rank(m) != m.rows())
                return std::optional<std::map<std::int64_t, RationalMatrix>>{};
        return std::optional<std::map<std::int64_t, RationalMatrix>>{std::move(maps)};
    };
    for (const auto& v : red.kernel_basis)
        if (auto iso = invertible(v)) {
            res.isomorphism = std::move(iso);
            return res;
        }
    std::mt19937 rng(20240611u);
    std::uniform_int_distribution<int> coeff(-97, 97);
    for (std::size_t t = 0; t < tries; ++t) {
        RationalVector x(lay.total);
        for (const auto& v : red.kernel_basis) {
            const Rational c = coeff(rng);
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] += c * v[i];
        }
        if (auto iso = invertible(x)) {
            res.isomorphism = std::move(iso);
            return res;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Extensions of Virasoro modules to B
// ---------------------------------------------------------------------------

enum class ExtensionStatus { trivial, nontrivial, unresolved, inconclusive };

inline std::string to_string(ExtensionStatus s)
{
    switch (s) {
    case ExtensionStatus::trivial: return "trivial";
    case ExtensionStatus::nontrivial: return "nontrivial";
    case ExtensionStatus::unresolved: return "unresolved";
    case ExtensionStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct ExtensionLevel {
    int level = 0;
    std::size_t unknowns = 0;
    std::size_t equations = 0;
    std::size_t linear_dim = 0;
    bool forced_zero = false;
    std::string witness;
    std::vector<std::map<std::int64_t, RationalMatrix>> basis; ///< surviving candidates for L_{1,level}
};

struct ExtensionResult {
    ExtensionStatus status = ExtensionStatus::inconclusive;
    std::size_t dimension = 0;
    std::vector<ExtensionLevel> levels;
};

namespace detail {

using OperatorFamily = std::map<std::int64_t, RationalMatrix>; // V_k -> V_{k+shift}

/// [L_g, X] / scale for X of degree `shift`, as far as the window allows.
inline OperatorFamily bracket_with_vir(const WindowedModule& m, std::int64_t g, const OperatorFamily& x,
                                       std::int64_t shift, const Rational& scale)
{
    OperatorFamily out;
    const auto key = BasisKey::gen(g, 0);
    if (!m.acts(key))
        return out;
    for (const auto& [k, xk] : x) {
        auto up = x.find(k + g);
        auto a_src = m.action(key, k);
        auto a_dst = m.action(key, k + shift);
        if (up == x.end() || !a_src || !a_dst)
            continue;
        out.emplace(k, (*a_dst * xk - up->second * *a_src) * (1 / scale));
    }
    return out;
}

/// First k at which X_{k+sy} Y_k - Y_{k+sx} X_k is nonzero.
inline std::optional<std::int64_t> commutator_witness(const OperatorFamily& x, std::int64_t sx,
                                                      const OperatorFamily& y, std::int64_t sy)
{
    for (const auto& [k, yk] : y) {
        auto xk = x.find(k);
        auto xs = x.find(k + sy);
        auto ys = y.find(k + sx);
        if (xk == x.end() || xs == x.end() || ys == y.end())
            continue;
        if (!(xs->second * yk - ys->second * xk->second).is_zero())
            return k;
    }
    return std::nullopt;
}

} // namespace detail

/// Extensions of a Virasoro module window to B with level >= 1 generators of degree 1
/// as unknowns T_k : V_k -> V_{k+1}. Linear constraints come from the double-commutator
/// identity for [L_alpha, [L_beta, L_{1,i}]] with |alpha|, |beta| <= degree_bound; a
/// one-dimensional candidate space at level j is then tested against
/// [L_{1,j}, L_{2,j}] = (j+1) L_{3,2j}, whose right side vanishes once higher levels are
/// eliminated. Levels above level_cap act by zero.
inline ExtensionResult extension_space(const WindowedModule& vir, int level_cap = 2, std::int64_t degree_bound = 4)
{
    if (vir.variant().kind() != AlgebraKind::virasoro)
        throw UsageError("extension_space expects a Virasoro module, got " + vir.variant().name());
    if (level_cap < 1)
        throw UsageError("extension_space: level_cap must be at least 1");
    const auto& r = vir.range();
    ExtensionResult res;
    detail::BlockLayout lay;
    for (std::int64_t k = r.lo; k + 1 <= r.hi; ++k)
        lay.add(k, vir.dim(k + 1), vir.dim(k));

    auto A = [&](std::int64_t g, std::int64_t k) { return *vir.action(BasisKey::gen(g, 0), k); };
    auto I = [&](std::int64_t k) { return RationalMatrix::identity(vir.dim(k)); };

    struct Instance {
        std::int64_t alpha, beta, k;
    };
    std::vector<Instance> instances;
    for (std::int64_t al = -degree_bound; al <= degree_bound; ++al)
        for (std::int64_t be = -degree_bound; be <= degree_bound; ++be) {
            if (!vir.acts(BasisKey::gen(al, 0)) || !vir.acts(BasisKey::gen(be, 0)) ||
                !vir.acts(BasisKey::gen(al + be, 0)))
                continue;
            for (std::int64_t k = r.lo; k <= r.hi; ++k) {
                bool inside = true;
                for (std::int64_t s : {std::int64_t{0}, al, be, al + be})
                    inside = inside && r.contains(k + s) && r.contains(k + s + 1);
                if (inside)
                    instances.push_back({al, be, k});
            }
        }

    for (int i = level_cap; i >= 1; --i) {
        ExtensionLevel lvl;
        lvl.level = i;
        lvl.unknowns = lay.total;
        std::size_t rows = 0;
        for (const auto& in : instances)
            rows += vir.dim(in.k + in.alpha + in.beta + 1) * vir.dim(in.k);
        RationalMatrix sys(rows, lay.total);
        std::size_t row0 = 0;
        const Rational ip1 = i + 1;
        for (const auto& [al, be, k] : instances) {
            const Rational p = 1 - ip1 * rat(al + be);
            const Rational q = (1 - ip1 * rat(be)) * (1 + rat(be) - ip1 * rat(al));
            const std::size_t oc = vir.dim(k);
            detail::add_sandwich(sys, row0, oc, lay, k, p, A(al, k + be + 1) * A(be, k + 1), I(k));
            detail::add_sandwich(sys, row0, oc, lay, k + be, -p, A(al, k + be + 1), A(be, k));
            detail::add_sandwich(sys, row0, oc, lay, k + al, -p, A(be, k + al + 1), A(al, k));
            detail::add_sandwich(sys, row0, oc, lay, k + al + be, p, I(k + al + be + 1), A(be, k + al) * A(al, k));
            detail::add_sandwich(sys, row0, oc, lay, k, -q, A(al + be, k + 1), I(k));
            detail::add_sandwich(sys, row0, oc, lay, k + al + be, q, I(k + al + be + 1), A(al + be, k));
            row0 += vir.dim(k + al + be + 1) * oc;
        }
        lvl.equations = rows;
        const auto red = mat_reduce(sys);
        lvl.linear_dim = red.kernel_basis.size();
        for (const auto& v : red.kernel_basis)
            lvl.basis.push_back(lay.unpack(v));
        if (lvl.linear_dim == 0) {
            lvl.forced_zero = true;
            lvl.witness = "linear";
        } else if (lvl.linear_dim == 1) {
            bool higher_clear = 2 * i > level_cap;
            for (const auto& done : res.levels)
                if (done.level == 2 * i)
                    higher_clear = done.forced_zero;
            if (!higher_clear) {
                lvl.witness = "level " + std::to_string(2 * i) + " not eliminated";
            } else {
                const auto& x1 = lvl.basis.front();
                const auto x2 = detail::bracket_with_vir(vir, 1, x1, 1, 1 - ip1);
                const auto x3 = detail::bracket_with_vir(vir, 2, x1, 1, 1 - 2 * ip1);
                const std::pair<const detail::OperatorFamily*, std::int64_t> ops[] = {{&x1, 1}, {&x2, 2}, {&x3, 3}};
                for (std::size_t u = 0; u < 3 && !lvl.forced_zero; ++u)
                    for (std::size_t w = u + 1; w < 3 && !lvl.forced_zero; ++w)
                        if (auto k = detail::commutator_witness(*ops[u].first, ops[u].second, *ops[w].first,
                                                                ops[w].second)) {
                            lvl.forced_zero = true;
                            lvl.witness = "[X_" + std::to_string(ops[u].second) + ",X_" +
                                          std::to_string(ops[w].second) + "] != 0 at " + std::to_string(*k);
                        }
                if (!lvl.forced_zero)
                    lvl.witness = "quadratic relations vanish";
            }
        } else {
            lvl.witness = "candidate space of dimension " + std::to_string(lvl.linear_dim);
        }
        if (lvl.forced_zero)
            lvl.basis.clear();
        res.levels.push_back(std::move(lvl));
    }
    std::reverse(res.levels.begin(), res.levels.end());

    bool any_equations = false, any_unresolved = false, any_open = false;
    for (const auto& l : res.levels) {
        any_equations = any_equations || l.equations > 0;
        if (!l.forced_zero) {
            any_open = true;
            res.dimension += l.linear_dim;
            any_unresolved = any_unresolved || l.linear_dim > 1 || l.witness != "quadratic relations vanish";
        }
    }
    if (!any_equations)
        res.status = ExtensionStatus::inconclusive;
    else if (!any_open)
        res.status = ExtensionStatus::trivial;
    else
        res.status = any_unresolved ? ExtensionStatus::unresolved : ExtensionStatus::nontrivial;
    return res;
}

// ---------------------------------------------------------------------------
// Spanning and classification
// ---------------------------------------------------------------------------

struct SpanningReport {
    bool holds = true;
    std::vector<std::int64_t> failing;
};

/// Checks that every V_k in the window is spanned by the images of M = V_{-2} + ... + V_2
/// under level-0 generators.
inline SpanningReport spanning_check_M(const WindowedModule& m)
{
    SpanningReport rep;
    for (std::int64_t k = m.range().lo; k <= m.range().hi; ++k) {
        Subspace s(m.dim(k));
        for (std::int64_t i = -2; i <= 2; ++i) {
            if (!m.range().contains(i))
                continue;
            if (i == k) {
                for (std::size_t c = 0; c < m.dim(k); ++c)
                    s.insert(unit_vector(m.dim(k), c));
                continue;
            }
            const auto g = BasisKey::gen(k - i, 0);
            if (!m.acts(g))
                continue;
            const auto a = *m.action(g, i);
            for (std::size_t c = 0; c < a.cols(); ++c)
                s.insert(a.column(c));
        }
        if (!s.full()) {
            rep.holds = false;
            rep.failing.push_back(k);
        }
    }
    return rep;
}

enum class ModuleKind { intermediate_series, highest_weight_like, lowest_weight_like, unknown };

inline std::string to_string(ModuleKind k)
{
    switch (k) {
    case ModuleKind::intermediate_series: return "intermediate-series";
    case ModuleKind::highest_weight_like: return "highest-weight-like";
    case ModuleKind::lowest_weight_like: return "lowest-weight-like";
    case ModuleKind::unknown: return "unknown";
    }
    return "?";
}

struct Classification {
    ModuleKind kind = ModuleKind::unknown;
    std::optional<IntermediateSpec> spec; ///< for intermediate series; integral a is normalized to 0
    std::optional<Rational> raw_a;        ///< fitted a before normalization
    std::optional<std::int64_t> extreme;  ///< top or bottom index for HW/LW-like windows
};

namespace detail {

inline std::optional<IntermediateSpec> fit_intermediate(const WindowedModule& m)
{
    const auto& r = m.range();
    if (r.size() < 2)
        return std::nullopt;
    for (std::int64_t k = r.lo; k <= r.hi; ++k)
        if (m.dim(k) != 1)
            return std::nullopt;
    std::vector<BasisKey> level0;
    for (const auto& g : m.generators()) {
        if (g.level == 0) {
            level0.push_back(g);
            continue;
        }
        for (std::int64_t k = r.lo; k <= r.hi; ++k)
            if (auto a = m.action(g, k); a && !a->is_zero())
                return std::nullopt;
    }
    auto coeff = [&](std::int64_t i, std::int64_t k) -> std::optional<Rational> {
        const auto g = BasisKey::gen(i, 0);
        if (!m.acts(g))
            return std::nullopt;
        auto a = m.action(g, k);
        if (!a)
            return std::nullopt;
        return a->at(0, 0);
    };
    auto matches = [&](const IntermediateSpec& s) {
        for (const auto& g : level0)
            for (std::int64_t k = r.lo; k <= r.hi; ++k)
                if (auto c = coeff(g.degree, k); c && *c != act_intermediate(s, g, k).coeff)
                    return false;
        return true;
    };
    std::vector<IntermediateSpec> candidates;
    if (auto c0 = coeff(0, r.lo), c1 = coeff(1, r.lo); c0 && c1) {
        const Rational a = *c0 - rat(r.lo);
        candidates.push_back(IntermediateSpec::aab(a, *c1 - a - rat(r.lo)));
    }
    if (auto c = coeff(1, 0))
        candidates.push_back(IntermediateSpec::aa(*c - 1));
    if (auto c = coeff(1, -1))
        candidates.push_back(IntermediateSpec::ba(-*c - 1));
    for (const auto& s : candidates)
        if (matches(s))
            return s;
    return std::nullopt;
}

inline bool generated_by(const WindowedModule& m, std::int64_t k)
{
    std::vector<std::pair<std::int64_t, RationalVector>> seeds;
    for (std::size_t c = 0; c < m.dim(k); ++c)
        seeds.emplace_back(k, unit_vector(m.dim(k), c));
    return submodule_closure(m, seeds).total() == m.total_dim();
}

} // namespace detail

/// Intermediate series when the window is a one-dimensional-weight module matching one of
/// the three families; HW-like (LW-like) when the support ends strictly inside the window
/// from above (below) and the extreme weight space generates the window.
inline Classification classify_window(const WindowedModule& m)
{
    Classification out;
    if (auto s = detail::fit_intermediate(m)) {
        out.kind = ModuleKind::intermediate_series;
        out.raw_a = s->a;
        if (s->family == Family::Aab && is_integer(s->a))
            s->a = 0;
        out.spec = s;
        return out;
    }
    const auto& r = m.range();
    std::optional<std::int64_t> top, bottom;
    for (std::int64_t k = r.lo; k <= r.hi; ++k)
        if (m.dim(k) > 0) {
            if (!bottom)
                bottom = k;
            top = k;
        }
    if (!top)
        return out;
    if (*top < r.hi && detail::generated_by(m, *top)) {
        out.kind = ModuleKind::highest_weight_like;
        out.extreme = top;
    } else if (*bottom > r.lo && detail::generated_by(m, *bottom)) {
        out.kind = ModuleKind::lowest_weight_like;
        out.extreme = bottom;
    }
    return out;
}

} // namespace blocklie
