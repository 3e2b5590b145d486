#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "blocklie/algebra.hpp"
#include "blocklie/algebra_checks.hpp"
#include "blocklie/error.hpp"
#include "blocklie/matrix.hpp"
#include "blocklie/module.hpp"
#include "blocklie/rational.hpp"

namespace blocklie {

struct WeightFunctional {
    std::vector<Rational> lambda; ///< lambda[i] = value on L_{0,i}
    Rational c = 0;

    int level_cap() const { return static_cast<int>(lambda.size()) - 1; }
};

inline WeightFunctional weight_from_json(const nlohmann::json& j, const std::string& field = "weight")
{
    if (!j.is_object() || !j.contains("lambda"))
        throw ParseError(field, "expected {\"lambda\": [...], \"c\": \"p/q\"}");
    if (!j["lambda"].is_array() || j["lambda"].empty())
        throw ParseError(field + ".lambda", "expected nonempty array of \"p/q\" strings");
    WeightFunctional w;
    for (std::size_t i = 0; i < j["lambda"].size(); ++i) {
        const std::string f = field + ".lambda[" + std::to_string(i) + "]";
        if (!j["lambda"][i].is_string())
            throw ParseError(f, "expected \"p/q\" string");
        w.lambda.push_back(parse_rational(j["lambda"][i].get<std::string>(), f));
    }
    if (j.contains("c")) {
        if (!j["c"].is_string())
            throw ParseError(field + ".c", "expected \"p/q\" string");
        w.c = parse_rational(j["c"].get<std::string>(), field + ".c");
    }
    return w;
}

inline nlohmann::json to_json(const WeightFunctional& w)
{
    auto l = nlohmann::json::array();
    for (const auto& x : w.lambda)
        l.push_back(to_string(x));
    return {{"lambda", l}, {"c", to_string(w.c)}};
}

/// Negative generator L_{-alpha, level}.
struct NegFactor {
    std::int64_t alpha;
    int level;
    friend auto operator<=>(const NegFactor&, const NegFactor&) = default;
    BasisKey key() const { return BasisKey::gen(-alpha, level); }
};

/// Factors from left to right, nonincreasing in (alpha, level).
using PBWMonomial = std::vector<NegFactor>;
using PBWVector = std::map<PBWMonomial, Rational>;

inline std::int64_t depth(const PBWMonomial& m)
{
    std::int64_t d = 0;
    for (const auto& f : m)
        d += f.alpha;
    return d;
}

inline bool is_canonical(const PBWMonomial& m)
{
    return std::is_sorted(m.begin(), m.end(), std::greater<>{});
}

inline std::string monomial_to_string(const PBWMonomial& m)
{
    std::string s;
    for (const auto& f : m)
        s += "L_{" + std::to_string(-f.alpha) + "," + std::to_string(f.level) + "}";
    return s + "v";
}

inline void pbw_add(PBWVector& into, const PBWMonomial& m, const Rational& c)
{
    if (blocklie::is_zero(c))
        return;
    auto [it, fresh] = into.try_emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (blocklie::is_zero(it->second))
            into.erase(it);
    }
}

inline void pbw_axpy(PBWVector& into, const Rational& s, const PBWVector& x)
{
    for (const auto& [m, c] : x)
        pbw_add(into, m, s * c);
}

/// All canonical monomials of the given depth over levels 0..n, in lexicographic order.
inline std::vector<PBWMonomial> verma_basis(int n, std::int64_t d)
{
    if (n < 0 || d < 0)
        throw UsageError("verma_basis needs n >= 0 and depth >= 0");
    std::vector<PBWMonomial> out;
    PBWMonomial cur;
    std::function<void(std::int64_t, NegFactor)> rec = [&](std::int64_t left, NegFactor bound) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (std::int64_t a = std::min(left, bound.alpha); a >= 1; --a)
            for (int i = (a == bound.alpha ? bound.level : n); i >= 0; --i) {
                cur.push_back({a, i});
                rec(left - a, {a, i});
                cur.pop_back();
            }
    };
    rec(d, {d, n});
    std::sort(out.begin(), out.end());
    return out;
}

/// Highest-weight module over B~_{0,n} generated by v with B_+ v = 0 and L_{0,i} v = lambda_i v.
class VermaModule {
public:
    explicit VermaModule(WeightFunctional w) : w_(std::move(w)), alg_(AlgebraVariant::quotient(0, level_cap_of(w_))) {}

    const WeightFunctional& weight() const noexcept { return w_; }
    int level_cap() const { return w_.level_cap(); }
    const AlgebraVariant& algebra() const noexcept { return alg_; }

    PBWVector act(const BasisKey& g, const PBWVector& x) const
    {
        require_key(alg_, g);
        PBWVector out;
        for (const auto& [m, c] : x)
            pbw_axpy(out, c, act_monomial(g, m));
        return out;
    }

    PBWVector act(const AlgebraElement& z, const PBWVector& x) const
    {
        PBWVector out;
        for (const auto& [k, c] : z.terms())
            pbw_axpy(out, c, act(k, x));
        return out;
    }

    /// Matrix of g from depth d to depth d - deg(g) in the verma_basis orderings.
    RationalMatrix action_matrix(const BasisKey& g, std::int64_t d) const
    {
        const auto src = verma_basis(level_cap(), d);
        const std::int64_t td = d - (g.central ? 0 : g.degree);
        const auto dst = td < 0 ? std::vector<PBWMonomial>{} : verma_basis(level_cap(), td);
        std::map<PBWMonomial, std::size_t> pos;
        for (std::size_t r = 0; r < dst.size(); ++r)
            pos.emplace(dst[r], r);
        RationalMatrix mat(dst.size(), src.size());
        for (std::size_t c = 0; c < src.size(); ++c)
            for (const auto& [m, v] : act_monomial(g, src[c]))
                mat.set(pos.at(m), c, v);
        return mat;
    }

private:
    static int level_cap_of(const WeightFunctional& w)
    {
        if (w.lambda.empty())
            throw UsageError("weight functional needs at least lambda_0");
        return w.level_cap();
    }

    const PBWVector& act_monomial(const BasisKey& g, const PBWMonomial& m) const
    {
        const auto memo_key = std::make_pair(g, m);
        if (auto it = memo_.find(memo_key); it != memo_.end())
            return it->second;
        PBWVector out;
        if (g.central) {
            pbw_add(out, m, w_.c);
        } else if (m.empty()) {
            if (g.degree < 0)
                pbw_add(out, PBWMonomial{{-g.degree, g.level}}, 1);
            else if (g.degree == 0)
                pbw_add(out, m, w_.lambda.at(static_cast<std::size_t>(g.level)));
        } else if (g.degree < 0 && NegFactor{-g.degree, g.level} >= m.front()) {
            PBWMonomial mm;
            mm.reserve(m.size() + 1);
            mm.push_back({-g.degree, g.level});
            mm.insert(mm.end(), m.begin(), m.end());
            pbw_add(out, mm, 1);
        } else {
            // g y rest = y (g rest) + [g, y] rest
            const NegFactor y = m.front();
            const PBWMonomial rest(m.begin() + 1, m.end());
            const PBWVector g_rest = act_monomial(g, rest);
            for (const auto& [mm, c] : g_rest)
                pbw_axpy(out, c, act_monomial(y.key(), mm));
            const AlgebraElement gy = bracket_keys(alg_, g, y.key());
            for (const auto& [k, c] : gy.terms())
                pbw_axpy(out, c, act_monomial(k, rest));
        }
        return memo_.emplace(memo_key, std::move(out)).first->second;
    }

    WeightFunctional w_;
    AlgebraVariant alg_;
    mutable std::map<std::pair<BasisKey, PBWMonomial>, PBWVector> memo_;
};

inline PBWVector act_verma(const BasisKey& g, const PBWVector& x, const WeightFunctional& w)
{
    return VermaModule(w).act(g, x);
}

// ---------------------------------------------------------------------------
// Straightening by local swaps
// ---------------------------------------------------------------------------

enum class Straighten { leftmost, rightmost, random };

/// Rewrites word * v into canonical form using only adjacent swaps x y = y x + [x, y],
/// scalar evaluation of B_0 and C on v, and B_+ v = 0.
inline PBWVector normal_order(const std::vector<BasisKey>& word, const WeightFunctional& w,
                              Straighten strategy = Straighten::leftmost, unsigned seed = 1)
{
    const auto alg = AlgebraVariant::quotient(0, w.level_cap());
    for (const auto& g : word)
        require_key(alg, g);
    // order rank: negative generators by (alpha, level) descending, then everything else
    auto out_of_order = [](const BasisKey& x, const BasisKey& y) {
        const bool xn = !x.central && x.degree < 0, yn = !y.central && y.degree < 0;
        if (xn && yn)
            return NegFactor{-x.degree, x.level} < NegFactor{-y.degree, y.level};
        return !xn && yn;
    };
    std::mt19937 rng(seed);
    PBWVector result;
    std::vector<std::pair<std::vector<BasisKey>, Rational>> todo{{word, 1}};
    while (!todo.empty()) {
        auto [wd, coef] = std::move(todo.back());
        todo.pop_back();
        if (blocklie::is_zero(coef))
            continue;
        if (auto it = std::find_if(wd.begin(), wd.end(), [](const BasisKey& k) { return k.central; }); it != wd.end()) {
            coef *= w.c;
            wd.erase(it);
            todo.emplace_back(std::move(wd), coef);
            continue;
        }
        if (!wd.empty() && wd.back().degree >= 0) {
            if (wd.back().degree > 0)
                continue;
            coef *= w.lambda.at(static_cast<std::size_t>(wd.back().level));
            wd.pop_back();
            todo.emplace_back(std::move(wd), coef);
            continue;
        }
        std::vector<std::size_t> bad;
        for (std::size_t p = 0; p + 1 < wd.size(); ++p)
            if (out_of_order(wd[p], wd[p + 1]))
                bad.push_back(p);
        if (bad.empty()) {
            PBWMonomial m;
            for (const auto& k : wd)
                m.push_back({-k.degree, k.level});
            pbw_add(result, m, coef);
            continue;
        }
        std::size_t p = bad.front();
        if (strategy == Straighten::rightmost)
            p = bad.back();
        else if (strategy == Straighten::random)
            p = bad[std::uniform_int_distribution<std::size_t>(0, bad.size() - 1)(rng)];
        const BasisKey x = wd[p], y = wd[p + 1];
        std::vector<BasisKey> swapped = wd;
        std::swap(swapped[p], swapped[p + 1]);
        todo.emplace_back(std::move(swapped), coef);
        const AlgebraElement xy = bracket_keys(alg, x, y);
        for (const auto& [k, c] : xy.terms()) {
            std::vector<BasisKey> shorter(wd.begin(), wd.begin() + static_cast<std::ptrdiff_t>(p));
            shorter.push_back(k);
            shorter.insert(shorter.end(), wd.begin() + static_cast<std::ptrdiff_t>(p) + 2, wd.end());
            todo.emplace_back(std::move(shorter), coef * c);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Singular vectors and dimensions
// ---------------------------------------------------------------------------

struct SingularReport {
    std::int64_t depth = 0;
    std::vector<PBWVector> vectors;
    std::int64_t validation_degree = 0; ///< every L_{alpha,i} with 1 <= alpha <= this was checked
    bool validated = true;
    bool generators_span_positive_part = false; ///< generation_closure check of the generator set
};

/// Positive-part keys of B~_{0,n} reached from {L_{1,i}} and L_{2,0} by brackets within |alpha| <= bound.
inline bool positive_generators_suffice(int n, std::int64_t bound)
{
    const auto alg = AlgebraVariant::quotient(0, n);
    std::vector<BasisKey> seeds;
    for (int i = 0; i <= n; ++i)
        seeds.push_back(BasisKey::gen(1, i));
    seeds.push_back(BasisKey::gen(2, 0));
    const auto rep = generation_closure(seeds, alg, {bound, 0, n}, ClosureMode::subalgebra);
    for (std::int64_t a = 1; a <= bound; ++a)
        for (int i = 0; i <= n; ++i)
            if (!rep.reached.count(BasisKey::gen(a, i)))
                return false;
    return true;
}

inline SingularReport singular_vectors(const WeightFunctional& w, std::int64_t d)
{
    if (d < 0)
        throw UsageError("singular_vectors needs depth >= 0");
    const int n = w.level_cap();
    const VermaModule V(w);
    SingularReport rep;
    rep.depth = d;
    rep.validation_degree = std::max<std::int64_t>(d, 2);
    rep.generators_span_positive_part = positive_generators_suffice(n, rep.validation_degree);
    const auto basis = verma_basis(n, d);
    if (d == 0) {
        rep.vectors.push_back({{PBWMonomial{}, 1}});
        return rep;
    }
    std::vector<BasisKey> gens;
    for (int i = 0; i <= n; ++i)
        gens.push_back(BasisKey::gen(1, i));
    gens.push_back(BasisKey::gen(2, 0));
    std::size_t rows = 0;
    std::vector<RationalMatrix> blocks;
    for (const auto& g : gens) {
        blocks.push_back(V.action_matrix(g, d));
        rows += blocks.back().rows();
    }
    RationalMatrix stacked(rows, basis.size());
    std::size_t r0 = 0;
    for (const auto& b : blocks) {
        for (const auto& [idx, v] : b.entries())
            stacked.set(r0 + idx.first, idx.second, v);
        r0 += b.rows();
    }
    for (const auto& k : mat_reduce(stacked).kernel_basis) {
        PBWVector vec;
        for (std::size_t i = 0; i < k.size(); ++i)
            pbw_add(vec, basis[i], k[i]);
        rep.vectors.push_back(std::move(vec));
    }
    for (const auto& vec : rep.vectors)
        for (std::int64_t a = 1; a <= rep.validation_degree; ++a)
            for (int i = 0; i <= n; ++i)
                if (!V.act(BasisKey::gen(a, i), vec).empty())
                    rep.validated = false;
    return rep;
}

/// Number of partitions of d with parts colored by `colors` colors.
inline std::vector<Integer> colored_partition_counts(int colors, std::int64_t max_depth)
{
    std::vector<Integer> p(static_cast<std::size_t>(max_depth) + 1, 0);
    p[0] = 1;
    for (std::int64_t part = 1; part <= max_depth; ++part)
        for (int c = 0; c < colors; ++c)
            for (std::int64_t s = part; s <= max_depth; ++s)
                p[static_cast<std::size_t>(s)] += p[static_cast<std::size_t>(s - part)];
    return p;
}

struct QuasifiniteReport {
    int n = 0;
    std::vector<std::size_t> dims; ///< dims[d] = dim of depth-d weight space
};

inline QuasifiniteReport quasifinite_report(int n, std::int64_t depth_cap)
{
    if (n < 0 || depth_cap < 0)
        throw UsageError("quasifinite_report needs n >= 0 and depth cap >= 0");
    QuasifiniteReport rep;
    rep.n = n;
    for (std::int64_t d = 0; d <= depth_cap; ++d)
        rep.dims.push_back(verma_basis(n, d).size());
    return rep;
}

/// Depth-0..d part of the Verma module as a windowed B~_{0,n} module: index -depth,
/// weight offset lambda_0. Index 1 is kept as an empty weight space above v.
inline WindowedModule verma_window(const WeightFunctional& w, std::int64_t d)
{
    const int n = w.level_cap();
    const VermaModule V(w);
    WindowedModule m(V.algebra(), w.lambda.front(), {-d, 1});
    for (std::int64_t k = -d; k <= 0; ++k)
        m.set_dim(k, verma_basis(n, -k).size());
    m.set_central_scalar(w.c);
    for (std::int64_t a = -d - 1; a <= d + 1; ++a)
        for (int i = 0; i <= n; ++i) {
            const auto g = BasisKey::gen(a, i);
            m.declare(g);
            for (std::int64_t k = -d; k <= 0; ++k)
                if (k + a >= -d && k + a <= 0)
                    m.set_action(g, k, V.action_matrix(g, -k));
        }
    return m;
}

inline nlohmann::json to_json_pbw(const PBWVector& x)
{
    auto arr = nlohmann::json::array();
    for (const auto& [m, c] : x) {
        auto factors = nlohmann::json::array();
        for (const auto& f : m)
            factors.push_back({-f.alpha, f.level});
        arr.push_back({{"monomial", factors}, {"coeff", to_string(c)}});
    }
    return arr;
}

} // namespace blocklie
