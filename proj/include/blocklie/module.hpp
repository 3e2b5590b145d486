#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "blocklie/algebra.hpp"
#include "blocklie/algebra_checks.hpp"
#include "blocklie/error.hpp"
#include "blocklie/matrix.hpp"
#include "blocklie/rational.hpp"

namespace blocklie {

/// Closed integer interval [lo, hi]; empty when lo > hi.
struct IndexRange {
    std::int64_t lo = 0;
    std::int64_t hi = -1;

    bool contains(std::int64_t k) const noexcept { return lo <= k && k <= hi; }
    bool empty() const noexcept { return lo > hi; }
    std::size_t size() const noexcept { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }

    friend bool operator==(const IndexRange&, const IndexRange&) = default;

    /// "lo:hi"
    static IndexRange parse(const std::string& s)
    {
        auto colon = s.find(':', s.empty() ? 0 : 1);
        if (colon == std::string::npos)
            throw ParseError("range", "expected lo:hi, got \"" + s + "\"");
        try {
            std::size_t used = 0;
            IndexRange r{std::stoll(s.substr(0, colon), &used), 0};
            if (used != colon)
                throw std::invalid_argument("lo");
            std::string rest = s.substr(colon + 1);
            r.hi = std::stoll(rest, &used);
            if (used != rest.size())
                throw std::invalid_argument("hi");
            return r;
        } catch (const std::logic_error&) {
            throw ParseError("range", "expected lo:hi, got \"" + s + "\"");
        }
    }
};

/// Component structure of a tensor-product window: weight k carries the blocks
/// A_p (x) B_q with p + q = k, ordered by p.
struct TensorFactors {
    IndexRange first, second;
    std::map<std::int64_t, std::size_t> first_dims, second_dims;

    struct Block {
        std::int64_t p, q;
        std::size_t offset, dim_first, dim_second;
    };

    std::vector<Block> blocks(std::int64_t k) const
    {
        std::vector<Block> out;
        std::size_t offset = 0;
        for (std::int64_t p = first.lo; p <= first.hi; ++p) {
            const std::int64_t q = k - p;
            if (!second.contains(q))
                continue;
            const std::size_t da = first_dims.at(p), db = second_dims.at(q);
            if (da * db == 0)
                continue;
            out.push_back({p, q, offset, da, db});
            offset += da * db;
        }
        return out;
    }
};

/// Finite range of weight spaces V_k (weight offset + k) with explicit action matrices
/// of a declared generator set. Declared generators without a stored matrix act by zero.
class WindowedModule {
public:
    WindowedModule(AlgebraVariant variant, Rational offset, IndexRange range)
        : variant_(variant), offset_(std::move(offset)), range_(range)
    {
        for (std::int64_t k = range.lo; k <= range.hi; ++k)
            dims_[k] = 0;
    }

    const AlgebraVariant& variant() const noexcept { return variant_; }
    const Rational& offset() const noexcept { return offset_; }
    const IndexRange& range() const noexcept { return range_; }
    const std::set<BasisKey>& generators() const noexcept { return generators_; }
    const Rational& central_scalar() const noexcept { return central_; }
    std::optional<int> trivial_above_level() const noexcept { return trivial_above_; }
    const std::optional<TensorFactors>& factors() const noexcept { return factors_; }
    const std::map<std::pair<BasisKey, std::int64_t>, RationalMatrix>& stored_actions() const noexcept
    {
        return actions_;
    }

    std::size_t dim(std::int64_t k) const
    {
        auto it = dims_.find(k);
        return it == dims_.end() ? 0 : it->second;
    }

    std::size_t total_dim() const
    {
        std::size_t s = 0;
        for (const auto& [k, d] : dims_)
            s += d;
        return s;
    }

    void set_dim(std::int64_t k, std::size_t d)
    {
        if (!range_.contains(k))
            throw UsageError("set_dim: index " + std::to_string(k) + " outside module range");
        dims_[k] = d;
    }

    void set_central_scalar(const Rational& c) { central_ = c; }
    void set_trivial_above_level(std::optional<int> level) { trivial_above_ = level; }
    void set_factors(TensorFactors f) { factors_ = std::move(f); }

    void declare(const BasisKey& g)
    {
        if (g.central)
            throw UsageError("C is not declared as a generator; it acts by the central scalar");
        require_key(variant_, g);
        generators_.insert(g);
    }

    void set_action(const BasisKey& g, std::int64_t k, RationalMatrix m)
    {
        declare(g);
        const std::int64_t t = k + g.degree;
        if (!range_.contains(k) || !range_.contains(t))
            throw UsageError("set_action: " + key_to_string(variant_, g) + " at " + std::to_string(k) +
                             " leaves the window");
        if (m.rows() != dim(t) || m.cols() != dim(k))
            throw UsageError("set_action: " + key_to_string(variant_, g) + " at " + std::to_string(k) +
                             " expects shape " + std::to_string(dim(t)) + "x" + std::to_string(dim(k)) +
                             ", got " + m.shape());
        if (m.is_zero())
            actions_.erase({g, k});
        else
            actions_[{g, k}] = std::move(m);
    }

    /// True if the action of g is known: declared, central, or above the trivial level.
    bool acts(const BasisKey& g) const
    {
        if (g.central)
            return true;
        if (generators_.count(g))
            return true;
        return trivial_above_ && g.level > *trivial_above_ && key_valid(variant_, g);
    }

    /// Matrix of g on V_k, or nullopt when k or k + deg(g) leaves the window.
    std::optional<RationalMatrix> action(const BasisKey& g, std::int64_t k) const
    {
        const std::int64_t t = k + (g.central ? 0 : g.degree);
        if (!range_.contains(k) || !range_.contains(t))
            return std::nullopt;
        if (g.central)
            return RationalMatrix::scalar(dim(k), central_);
        if (!acts(g))
            throw UsageError("generator " + key_to_string(variant_, g) + " is not declared on this module");
        auto it = actions_.find({g, k});
        if (it != actions_.end())
            return it->second;
        return RationalMatrix(dim(t), dim(k));
    }

private:
    AlgebraVariant variant_;
    Rational offset_;
    IndexRange range_;
    std::map<std::int64_t, std::size_t> dims_;
    std::set<BasisKey> generators_;
    std::map<std::pair<BasisKey, std::int64_t>, RationalMatrix> actions_;
    Rational central_ = 0;
    std::optional<int> trivial_above_;
    std::optional<TensorFactors> factors_;
};

// ---------------------------------------------------------------------------
// Intermediate series
// ---------------------------------------------------------------------------

enum class Family { Aab, Aa, Ba };

inline std::string family_name(Family f)
{
    switch (f) {
    case Family::Aab: return "Aab";
    case Family::Aa: return "Aa";
    case Family::Ba: return "Ba";
    }
    return "?";
}

inline Family parse_family(const std::string& s)
{
    if (s == "Aab")
        return Family::Aab;
    if (s == "Aa")
        return Family::Aa;
    if (s == "Ba")
        return Family::Ba;
    throw ParseError("family", "expected Aab, Aa or Ba, got \"" + s + "\"");
}

struct IntermediateSpec {
    Family family = Family::Aab;
    Rational a = 0;
    Rational b = 0; // used by Aab only

    static IntermediateSpec aab(Rational a, Rational b) { return {Family::Aab, std::move(a), std::move(b)}; }
    static IntermediateSpec aa(Rational a) { return {Family::Aa, std::move(a), 0}; }
    static IntermediateSpec ba(Rational a) { return {Family::Ba, std::move(a), 0}; }

    std::string to_string() const
    {
        if (family == Family::Aab)
            return "A(" + blocklie::to_string(a) + "," + blocklie::to_string(b) + ")";
        return family_name(family) + "(" + blocklie::to_string(a) + ")";
    }
};

struct ActionResult {
    Rational coeff;
    std::int64_t target;
};

/// Coefficient of g x_k on x_{k + deg g}. Level >= 1 generators and C act by zero.
inline ActionResult act_intermediate(const IntermediateSpec& spec, const BasisKey& g, std::int64_t k)
{
    if (g.central)
        return {0, k};
    const std::int64_t i = g.degree;
    ActionResult r{0, k + i};
    if (g.level != 0)
        return r;
    const Rational ri = rat(i), rk = rat(k);
    switch (spec.family) {
    case Family::Aab:
        r.coeff = spec.a + rk + spec.b * ri;
        break;
    case Family::Aa:
        r.coeff = k != 0 ? Rational(ri + rk) : Rational(ri * (ri + spec.a));
        break;
    case Family::Ba:
        r.coeff = k != -i ? rk : Rational(-ri * (ri + spec.a));
        break;
    }
    return r;
}

/// Weight offset: A_{a,b} has L_0 x_k = (a+k) x_k; A(a) and B(a) have L_0 x_k = k x_k.
inline Rational intermediate_offset(const IntermediateSpec& spec)
{
    return spec.family == Family::Aab ? spec.a : Rational(0);
}

/// Virasoro window of an intermediate-series module; generators L_i for every i
/// whose action stays inside the range.
inline WindowedModule build_window(const IntermediateSpec& spec, IndexRange range)
{
    WindowedModule m(AlgebraVariant::virasoro(), intermediate_offset(spec), range);
    for (std::int64_t k = range.lo; k <= range.hi; ++k)
        m.set_dim(k, 1);
    const std::int64_t width = range.empty() ? 0 : range.hi - range.lo;
    for (std::int64_t i = -width; i <= width; ++i) {
        const auto g = BasisKey::gen(i, 0);
        m.declare(g);
        for (std::int64_t k = range.lo; k <= range.hi; ++k) {
            if (!range.contains(k + i))
                continue;
            RationalMatrix a(1, 1);
            a.set(0, 0, act_intermediate(spec, g, k).coeff);
            m.set_action(g, k, std::move(a));
        }
    }
    return m;
}

/// Vir module on C^N (x) Q[x^{+-1}] with L_i acting as (a+k) I + i * B on the weight-k copy.
/// Any square B gives a module; an upper-triangular B gives triangular blocks
/// with diagonals (a+k) + b_p i.
inline WindowedModule matrix_density_window(const Rational& a, const RationalMatrix& b, IndexRange range)
{
    if (b.rows() != b.cols())
        throw UsageError("matrix_density_window: B must be square");
    const std::size_t n = b.rows();
    WindowedModule m(AlgebraVariant::virasoro(), a, range);
    for (std::int64_t k = range.lo; k <= range.hi; ++k)
        m.set_dim(k, n);
    const std::int64_t width = range.empty() ? 0 : range.hi - range.lo;
    for (std::int64_t i = -width; i <= width; ++i) {
        const auto g = BasisKey::gen(i, 0);
        m.declare(g);
        for (std::int64_t k = range.lo; k <= range.hi; ++k)
            if (range.contains(k + i))
                m.set_action(g, k, RationalMatrix::scalar(n, a + rat(k)) + b * rat(i));
    }
    return m;
}

/// Pull back a Virasoro module to B along B -> B~_{0,0} = Vir: level >= 1 acts by zero
/// (explicit zero matrices up to `level_cap`), C_B acts by c0 times the Vir central scalar.
inline WindowedModule extend_trivially(const WindowedModule& vir, int level_cap = 2)
{
    if (vir.variant().kind() != AlgebraKind::virasoro)
        throw UsageError("extend_trivially expects a Virasoro module, got " + vir.variant().name());
    WindowedModule m(AlgebraVariant::block_b(), vir.offset(), vir.range());
    for (std::int64_t k = vir.range().lo; k <= vir.range().hi; ++k)
        m.set_dim(k, vir.dim(k));
    for (const auto& g : vir.generators())
        m.declare(g);
    for (const auto& [gk, mat] : vir.stored_actions())
        m.set_action(gk.first, gk.second, mat);
    for (const auto& g : vir.generators())
        for (int l = 1; l <= level_cap; ++l)
            m.declare(BasisKey::gen(g.degree, l));
    m.set_central_scalar(virasoro_central_rescaling() * vir.central_scalar());
    m.set_trivial_above_level(0);
    if (vir.factors())
        m.set_factors(*vir.factors());
    return m;
}

/// Block-diagonal direct sum of two modules over the same variant, offset and range.
inline WindowedModule direct_sum(const WindowedModule& x, const WindowedModule& y)
{
    if (!(x.variant() == y.variant()) || x.offset() != y.offset() || !(x.range() == y.range()))
        throw UsageError("direct_sum needs equal variant, offset and range");
    if (x.central_scalar() != y.central_scalar())
        throw UsageError("direct_sum needs equal central scalars");
    WindowedModule m(x.variant(), x.offset(), x.range());
    for (std::int64_t k = x.range().lo; k <= x.range().hi; ++k)
        m.set_dim(k, x.dim(k) + y.dim(k));
    m.set_central_scalar(x.central_scalar());
    if (x.trivial_above_level() && y.trivial_above_level())
        m.set_trivial_above_level(std::max(*x.trivial_above_level(), *y.trivial_above_level()));
    std::set<BasisKey> gens;
    for (const auto& g : x.generators())
        if (y.acts(g))
            gens.insert(g);
    for (const auto& g : y.generators())
        if (x.acts(g))
            gens.insert(g);
    for (const auto& g : gens) {
        m.declare(g);
        for (std::int64_t k = x.range().lo; k <= x.range().hi; ++k) {
            auto ax = x.action(g, k);
            if (!ax)
                continue;
            auto ay = *y.action(g, k);
            const std::int64_t t = k + g.degree;
            RationalMatrix blk(m.dim(t), m.dim(k));
            for (const auto& [idx, v] : ax->entries())
                blk.set(idx.first, idx.second, v);
            for (const auto& [idx, v] : ay.entries())
                blk.set(x.dim(t) + idx.first, x.dim(k) + idx.second, v);
            m.set_action(g, k, std::move(blk));
        }
    }
    return m;
}

/// Windowed tensor product: weight k is the sum of A_p (x) B_q over p + q = k inside the
/// factor ranges; generators act by the Leibniz rule, dropping components that leave a
/// factor window. The factor structure is recorded so axiom checks can restrict to
/// components whose intermediate factor weights stay in range.
inline WindowedModule tensor(const WindowedModule& x, const WindowedModule& y)
{
    if (!(x.variant() == y.variant()))
        throw UsageError("tensor needs modules over the same variant: " + x.variant().name() + " vs " +
                         y.variant().name());
    if (x.factors() || y.factors())
        throw UsageError("tensor of tensor windows is not supported");
    IndexRange out_range = (x.range().empty() || y.range().empty())
                               ? IndexRange{0, -1}
                               : IndexRange{x.range().lo + y.range().lo, x.range().hi + y.range().hi};
    WindowedModule m(x.variant(), x.offset() + y.offset(), out_range);
    TensorFactors tf;
    tf.first = x.range();
    tf.second = y.range();
    for (std::int64_t p = x.range().lo; p <= x.range().hi; ++p)
        tf.first_dims[p] = x.dim(p);
    for (std::int64_t q = y.range().lo; q <= y.range().hi; ++q)
        tf.second_dims[q] = y.dim(q);
    for (std::int64_t k = out_range.lo; k <= out_range.hi; ++k) {
        std::size_t d = 0;
        for (const auto& blk : tf.blocks(k))
            d += blk.dim_first * blk.dim_second;
        m.set_dim(k, d);
    }
    m.set_central_scalar(x.central_scalar() + y.central_scalar());
    if (x.trivial_above_level() && y.trivial_above_level())
        m.set_trivial_above_level(std::max(*x.trivial_above_level(), *y.trivial_above_level()));

    std::set<BasisKey> gens;
    for (const auto& g : x.generators())
        if (y.acts(g))
            gens.insert(g);
    for (const auto& g : y.generators())
        if (x.acts(g))
            gens.insert(g);

    for (const auto& g : gens) {
        m.declare(g);
        const std::int64_t deg = g.degree;
        for (std::int64_t k = out_range.lo; k <= out_range.hi; ++k) {
            const std::int64_t t = k + deg;
            if (!out_range.contains(t))
                continue;
            RationalMatrix mat(m.dim(t), m.dim(k));
            const auto target_blocks = tf.blocks(t);
            auto find_block = [&](std::int64_t p) -> const TensorFactors::Block* {
                for (const auto& b : target_blocks)
                    if (b.p == p)
                        return &b;
                return nullptr;
            };
            for (const auto& src : tf.blocks(k)) {
                // g acting on the first factor: (rho_A(g) (x) 1)
                if (auto ax = x.action(g, src.p)) {
                    if (const auto* dst = find_block(src.p + deg))
                        for (const auto& [idx, v] : ax->entries())
                            for (std::size_t s = 0; s < src.dim_second; ++s)
                                mat.add(dst->offset + idx.first * dst->dim_second + s,
                                        src.offset + idx.second * src.dim_second + s, v);
                }
                // and on the second factor: (1 (x) rho_B(g))
                if (auto ay = y.action(g, src.q)) {
                    if (const auto* dst = find_block(src.p))
                        for (std::size_t f = 0; f < src.dim_first; ++f)
                            for (const auto& [idx, v] : ay->entries())
                                mat.add(dst->offset + f * dst->dim_second + idx.first,
                                        src.offset + f * src.dim_second + idx.second, v);
                }
            }
            m.set_action(g, k, std::move(mat));
        }
    }
    m.set_factors(std::move(tf));
    return m;
}

/// Adjoint action of B on B~_{m,n} = B_m / B_{n+1}: weight a carries L_{a,m..n}
/// (plus C at weight 0 when m = 0). Generators of B with levels 0..n-m are declared;
/// higher levels act by zero.
inline WindowedModule adjoint_window(int m, int n, IndexRange range)
{
    const auto Q = AlgebraVariant::quotient(m, n);
    const auto B = AlgebraVariant::block_b();
    WindowedModule mod(B, 0, range);
    auto basis_at = [&](std::int64_t a) {
        std::vector<BasisKey> keys;
        for (int i = m; i <= n; ++i)
            keys.push_back(BasisKey::gen(a, i));
        if (a == 0 && Q.has_central())
            keys.push_back(BasisKey::c());
        return keys;
    };
    for (std::int64_t a = range.lo; a <= range.hi; ++a)
        mod.set_dim(a, basis_at(a).size());
    mod.set_trivial_above_level(n - m);
    const std::int64_t width = range.empty() ? 0 : range.hi - range.lo;
    for (std::int64_t g_deg = -width; g_deg <= width; ++g_deg)
        for (int l = 0; l <= n - m; ++l) {
            const auto g = BasisKey::gen(g_deg, l);
            mod.declare(g);
            for (std::int64_t a = range.lo; a <= range.hi; ++a) {
                if (!range.contains(a + g_deg))
                    continue;
                const auto src = basis_at(a);
                const auto dst = basis_at(a + g_deg);
                RationalMatrix mat(dst.size(), src.size());
                for (std::size_t c = 0; c < src.size(); ++c) {
                    if (src[c].central)
                        continue;
                    auto img = project_to_quotient(bracket_keys(B, g, src[c]), m, n);
                    for (const auto& [k, v] : img.terms()) {
                        auto pos = std::find(dst.begin(), dst.end(), k);
                        if (pos == dst.end())
                            throw std::logic_error("adjoint_window: image key outside weight space");
                        mat.set(static_cast<std::size_t>(pos - dst.begin()), c, v);
                    }
                }
                mod.set_action(g, a, std::move(mat));
            }
        }
    return mod;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json key_to_json(const BasisKey& k)
{
    if (k.central)
        return "C";
    return {{"alpha", k.degree}, {"level", k.level}};
}

inline nlohmann::json to_json(const WindowedModule& m)
{
    nlohmann::json j;
    j["variant"] = m.variant().name();
    j["offset"] = to_string(m.offset());
    j["range"] = {m.range().lo, m.range().hi};
    auto dims = nlohmann::json::array();
    for (std::int64_t k = m.range().lo; k <= m.range().hi; ++k)
        dims.push_back(m.dim(k));
    j["dims"] = std::move(dims);
    j["central"] = to_string(m.central_scalar());
    j["trivial_above_level"] = m.trivial_above_level() ? nlohmann::json(*m.trivial_above_level()) : nlohmann::json();
    auto gens = nlohmann::json::array();
    for (const auto& g : m.generators())
        gens.push_back(key_to_json(g));
    j["generators"] = std::move(gens);
    auto actions = nlohmann::json::array();
    for (const auto& [gk, mat] : m.stored_actions())
        actions.push_back({{"generator", key_to_json(gk.first)}, {"source", gk.second}, {"matrix", to_json(mat)}});
    j["actions"] = std::move(actions);
    if (const auto& f = m.factors()) {
        auto dims_of = [](const std::map<std::int64_t, std::size_t>& d) {
            auto a = nlohmann::json::array();
            for (const auto& [k, v] : d)
                a.push_back(v);
            return a;
        };
        j["factors"] = {{"first_range", {f->first.lo, f->first.hi}},
                        {"second_range", {f->second.lo, f->second.hi}},
                        {"first_dims", dims_of(f->first_dims)},
                        {"second_dims", dims_of(f->second_dims)}};
    }
    return j;
}

namespace detail {

inline IndexRange range_from_json(const nlohmann::json& j, const std::string& field)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ParseError(field, "expected [lo, hi]");
    return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

inline std::vector<std::size_t> dims_from_json(const nlohmann::json& j, std::size_t n, const std::string& field)
{
    if (!j.is_array() || j.size() != n)
        throw ParseError(field, "expected array of " + std::to_string(n) + " dimensions");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_number_integer() || j[i].get<long>() < 0)
            throw ParseError(field + "[" + std::to_string(i) + "]", "expected nonnegative integer");
        out.push_back(j[i].get<std::size_t>());
    }
    return out;
}

} // namespace detail

inline WindowedModule module_from_json(const nlohmann::json& j, const std::string& field = "module")
{
    if (!j.is_object())
        throw ParseError(field, "expected object");
    for (const char* req : {"variant", "offset", "range", "dims", "actions"})
        if (!j.contains(req))
            throw ParseError(field + "." + req, "missing");
    if (!j["variant"].is_string())
        throw ParseError(field + ".variant", "expected string");
    AlgebraVariant v = AlgebraVariant::block_b();
    try {
        v = AlgebraVariant::parse(j["variant"].get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(field + ".variant", e.what());
    }
    if (!j["offset"].is_string())
        throw ParseError(field + ".offset", "expected \"p/q\" string");
    const Rational offset = parse_rational(j["offset"].get<std::string>(), field + ".offset");
    const IndexRange range = detail::range_from_json(j["range"], field + ".range");
    const auto dims = detail::dims_from_json(j["dims"], range.size(), field + ".dims");
    WindowedModule m(v, offset, range);
    for (std::size_t i = 0; i < dims.size(); ++i)
        m.set_dim(range.lo + static_cast<std::int64_t>(i), dims[i]);
    if (j.contains("central")) {
        if (!j["central"].is_string())
            throw ParseError(field + ".central", "expected \"p/q\" string");
        m.set_central_scalar(parse_rational(j["central"].get<std::string>(), field + ".central"));
    }
    if (j.contains("trivial_above_level") && !j["trivial_above_level"].is_null()) {
        if (!j["trivial_above_level"].is_number_integer())
            throw ParseError(field + ".trivial_above_level", "expected integer or null");
        m.set_trivial_above_level(j["trivial_above_level"].get<int>());
    }
    auto declare_checked = [&](const BasisKey& g, const std::string& f) {
        if (g.central)
            throw ParseError(f, "C cannot be declared as a generator");
        if (!key_valid(v, g))
            throw ParseError(f, "key " + key_to_string(v, g) + " is not in variant " + v.name());
        m.declare(g);
    };
    if (j.contains("generators")) {
        if (!j["generators"].is_array())
            throw ParseError(field + ".generators", "expected array");
        for (std::size_t n = 0; n < j["generators"].size(); ++n) {
            const std::string f = field + ".generators[" + std::to_string(n) + "]";
            declare_checked(key_from_json(j["generators"][n], f), f);
        }
    }
    if (!j["actions"].is_array())
        throw ParseError(field + ".actions", "expected array");
    for (std::size_t n = 0; n < j["actions"].size(); ++n) {
        const std::string f = field + ".actions[" + std::to_string(n) + "]";
        const auto& a = j["actions"][n];
        if (!a.is_object() || !a.contains("generator") || !a.contains("source") || !a.contains("matrix"))
            throw ParseError(f, "expected {generator, source, matrix}");
        const BasisKey g = key_from_json(a["generator"], f + ".generator");
        declare_checked(g, f + ".generator");
        if (!a["source"].is_number_integer())
            throw ParseError(f + ".source", "expected integer");
        const auto k = a["source"].get<std::int64_t>();
        auto mat = matrix_from_json(a["matrix"], f + ".matrix");
        try {
            m.set_action(g, k, std::move(mat));
        } catch (const UsageError& e) {
            throw ParseError(f, e.what());
        }
    }
    if (j.contains("factors")) {
        const auto& fj = j["factors"];
        const std::string f = field + ".factors";
        if (!fj.is_object())
            throw ParseError(f, "expected object");
        TensorFactors tf;
        tf.first = detail::range_from_json(fj.value("first_range", nlohmann::json()), f + ".first_range");
        tf.second = detail::range_from_json(fj.value("second_range", nlohmann::json()), f + ".second_range");
        auto d1 = detail::dims_from_json(fj.value("first_dims", nlohmann::json()), tf.first.size(), f + ".first_dims");
        auto d2 =
            detail::dims_from_json(fj.value("second_dims", nlohmann::json()), tf.second.size(), f + ".second_dims");
        for (std::size_t i = 0; i < d1.size(); ++i)
            tf.first_dims[tf.first.lo + static_cast<std::int64_t>(i)] = d1[i];
        for (std::size_t i = 0; i < d2.size(); ++i)
            tf.second_dims[tf.second.lo + static_cast<std::int64_t>(i)] = d2[i];
        m.set_factors(std::move(tf));
    }
    return m;
}

} // namespace blocklie
