#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "blocklie/algebra.hpp"
#include "blocklie/error.hpp"
#include "blocklie/rational.hpp"

namespace blocklie {

/// Laurent polynomial in t: exponent -> coefficient, zeros never stored.
using LaurentPoly = std::map<int, Rational>;

/// x^degree f(t) + central * C with f in t Q[t]. L_{a,i} corresponds to x^a t^(i+1).
struct LaurentOp {
    std::int64_t degree = 0;
    LaurentPoly f;
    Rational central = 0;

    friend bool operator==(const LaurentOp&, const LaurentOp&) = default;
};

namespace detail {

inline void laurent_add(LaurentPoly& p, int e, const Rational& c)
{
    if (is_zero(c))
        return;
    auto [it, inserted] = p.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (is_zero(it->second))
            p.erase(it);
    }
}

inline LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b)
{
    LaurentPoly out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b)
            laurent_add(out, ea + eb, ca * cb);
    return out;
}

inline LaurentPoly laurent_derive(const LaurentPoly& a)
{
    LaurentPoly out;
    for (const auto& [e, c] : a)
        laurent_add(out, e - 1, c * static_cast<long>(e));
    return out;
}

inline void require_positive_support(const LaurentOp& op)
{
    for (const auto& [e, c] : op.f)
        if (e < 1)
            throw UsageError("LaurentOp f must lie in tQ[t]; found exponent " + std::to_string(e));
}

} // namespace detail

/// Coefficient of t^{-1}.
inline Rational residue(const LaurentPoly& p)
{
    auto it = p.find(-1);
    return it == p.end() ? Rational(0) : it->second;
}

/// [x^a f, x^b g] = x^{a+b}(b f' g - a f g') + delta_{a+b,0} (a^3-a)/6 Res_t(t^-3 f g) C.
inline LaurentOp laurent_bracket(const LaurentOp& x, const LaurentOp& y)
{
    detail::require_positive_support(x);
    detail::require_positive_support(y);
    const std::int64_t a = x.degree, b = y.degree;
    LaurentOp out;
    out.degree = a + b;
    for (const auto& [e, c] : detail::laurent_mul(detail::laurent_derive(x.f), y.f))
        detail::laurent_add(out.f, e, c * static_cast<long>(b));
    for (const auto& [e, c] : detail::laurent_mul(x.f, detail::laurent_derive(y.f)))
        detail::laurent_add(out.f, e, -c * static_cast<long>(a));
    if (a + b == 0) {
        LaurentPoly shifted;
        for (const auto& [e, c] : detail::laurent_mul(x.f, y.f))
            shifted.emplace(e - 3, c);
        out.central = rat(a * a * a - a, 6) * residue(shifted);
    }
    return out;
}

inline AlgebraElement laurent_to_element(const LaurentOp& op)
{
    detail::require_positive_support(op);
    AlgebraElement out(AlgebraVariant::block_b());
    for (const auto& [e, c] : op.f)
        out.add(BasisKey::gen(op.degree, e - 1), c);
    out.add(BasisKey::c(), op.central);
    return out;
}

/// Splits a B element into one LaurentOp per degree; C goes with degree 0.
inline std::vector<LaurentOp> element_to_laurent(const AlgebraElement& x)
{
    if (x.variant().kind() != AlgebraKind::block_b)
        throw UsageError("element_to_laurent expects an element of B, got " + x.variant().name());
    std::map<std::int64_t, LaurentOp> by_degree;
    for (const auto& [k, c] : x.terms()) {
        if (k.central) {
            auto& op = by_degree[0];
            op.degree = 0;
            op.central += c;
        } else {
            auto& op = by_degree[k.degree];
            op.degree = k.degree;
            detail::laurent_add(op.f, k.level + 1, c);
        }
    }
    std::vector<LaurentOp> out;
    for (auto& [d, op] : by_degree)
        out.push_back(std::move(op));
    return out;
}

} // namespace blocklie
