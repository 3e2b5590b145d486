#pragma once

#include <compare>
#include <cstdio>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blocklie/error.hpp"
#include "blocklie/rational.hpp"

namespace blocklie {

enum class AlgebraKind { virasoro, block_b, block_bbar, w1inf, winf, quotient };

/// Which Lie algebra a key or element lives in. Quotient(m, n) is B_m / B_{n+1}.
class AlgebraVariant {
public:
    static AlgebraVariant virasoro() { return AlgebraVariant(AlgebraKind::virasoro); }
    static AlgebraVariant block_b() { return AlgebraVariant(AlgebraKind::block_b); }
    static AlgebraVariant block_bbar() { return AlgebraVariant(AlgebraKind::block_bbar); }
    static AlgebraVariant w1inf() { return AlgebraVariant(AlgebraKind::w1inf); }
    static AlgebraVariant winf() { return AlgebraVariant(AlgebraKind::winf); }

    static AlgebraVariant quotient(int low, int high)
    {
        if (low < 0 || high < low)
            throw UsageError("quotient B~_{m,n} needs 0 <= m <= n, got m=" + std::to_string(low) +
                             " n=" + std::to_string(high));
        AlgebraVariant v(AlgebraKind::quotient);
        v.low_ = low;
        v.high_ = high;
        return v;
    }

    AlgebraKind kind() const noexcept { return kind_; }
    int quotient_low() const noexcept { return low_; }
    int quotient_high() const noexcept { return high_; }

    int min_level() const noexcept
    {
        switch (kind_) {
        case AlgebraKind::block_bbar: return -1;
        case AlgebraKind::winf: return 1;
        case AlgebraKind::quotient: return low_;
        default: return 0;
        }
    }

    std::optional<int> max_level() const noexcept
    {
        if (kind_ == AlgebraKind::virasoro)
            return 0;
        if (kind_ == AlgebraKind::quotient)
            return high_;
        return std::nullopt;
    }

    /// C is a basis element of every variant except quotients with m >= 1.
    bool has_central() const noexcept { return kind_ != AlgebraKind::quotient || low_ == 0; }

    bool is_w() const noexcept { return kind_ == AlgebraKind::w1inf || kind_ == AlgebraKind::winf; }

    std::string name() const
    {
        switch (kind_) {
        case AlgebraKind::virasoro: return "Vir";
        case AlgebraKind::block_b: return "B";
        case AlgebraKind::block_bbar: return "Bbar";
        case AlgebraKind::w1inf: return "W1inf";
        case AlgebraKind::winf: return "Winf";
        case AlgebraKind::quotient:
            return "Bq(" + std::to_string(low_) + "," + std::to_string(high_) + ")";
        }
        return "?";
    }

    static AlgebraVariant parse(const std::string& s)
    {
        if (s == "Vir" || s == "Virasoro")
            return virasoro();
        if (s == "B")
            return block_b();
        if (s == "Bbar")
            return block_bbar();
        if (s == "W1inf")
            return w1inf();
        if (s == "Winf")
            return winf();
        int m = 0, n = 0;
        char tail = 0;
        if (std::sscanf(s.c_str(), "Bq(%d,%d)%c", &m, &n, &tail) == 2)
            return quotient(m, n);
        throw ParseError("variant", "unknown algebra variant \"" + s + "\"");
    }

    friend bool operator==(const AlgebraVariant&, const AlgebraVariant&) = default;

private:
    explicit AlgebraVariant(AlgebraKind k) : kind_(k) {}

    AlgebraKind kind_;
    int low_ = 0;
    int high_ = 0;
};

/// L_{degree,level}, or the central element C. For Vir the level is always 0;
/// for the W variants (degree, level) means x^degree D^level.
struct BasisKey {
    std::int64_t degree = 0;
    int level = 0;
    bool central = false;

    static BasisKey gen(std::int64_t degree, int level = 0) { return {degree, level, false}; }
    static BasisKey c() { return {0, 0, true}; }

    // Generators ordered by (degree, level); C sorts last.
    friend std::strong_ordering operator<=>(const BasisKey& a, const BasisKey& b)
    {
        if (a.central != b.central)
            return a.central ? std::strong_ordering::greater : std::strong_ordering::less;
        if (a.central)
            return std::strong_ordering::equal;
        if (auto c = a.degree <=> b.degree; c != 0)
            return c;
        return a.level <=> b.level;
    }
    friend bool operator==(const BasisKey& a, const BasisKey& b) { return (a <=> b) == 0; }
};

inline bool key_valid(const AlgebraVariant& v, const BasisKey& k)
{
    if (k.central)
        return v.has_central();
    if (k.level < v.min_level())
        return false;
    auto hi = v.max_level();
    return !hi || k.level <= *hi;
}

inline std::string key_to_string(const AlgebraVariant& v, const BasisKey& k)
{
    if (k.central)
        return "C";
    std::ostringstream os;
    if (v.kind() == AlgebraKind::virasoro)
        os << "L_" << (k.degree < 0 ? "{" + std::to_string(k.degree) + "}" : std::to_string(k.degree));
    else if (v.is_w())
        os << "x^" << k.degree << " D^" << k.level;
    else
        os << "L_{" << k.degree << "," << k.level << "}";
    return os.str();
}

inline void require_key(const AlgebraVariant& v, const BasisKey& k)
{
    if (!key_valid(v, k))
        throw UsageError("key " + key_to_string(v, k) + " (degree " + std::to_string(k.degree) + ", level " +
                         std::to_string(k.level) + ") is not a basis element of " + v.name());
}

/// Sparse exact combination of basis keys of one variant.
class AlgebraElement {
public:
    explicit AlgebraElement(AlgebraVariant v) : variant_(v) {}

    static AlgebraElement basis(AlgebraVariant v, const BasisKey& k, const Rational& c = Rational(1))
    {
        AlgebraElement e(v);
        e.add(k, c);
        return e;
    }

    const AlgebraVariant& variant() const noexcept { return variant_; }
    const std::map<BasisKey, Rational>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    Rational coeff(const BasisKey& k) const
    {
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational central() const { return coeff(BasisKey::c()); }

    void add(const BasisKey& k, const Rational& c)
    {
        if (blocklie::is_zero(c))
            return;
        require_key(variant_, k);
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (blocklie::is_zero(it->second))
                terms_.erase(it);
        }
    }

    AlgebraElement& operator+=(const AlgebraElement& o)
    {
        same_variant(o);
        for (const auto& [k, c] : o.terms_)
            add(k, c);
        return *this;
    }

    AlgebraElement& operator-=(const AlgebraElement& o)
    {
        same_variant(o);
        for (const auto& [k, c] : o.terms_)
            add(k, -c);
        return *this;
    }

    AlgebraElement& operator*=(const Rational& s)
    {
        if (blocklie::is_zero(s))
            terms_.clear();
        else
            for (auto& [k, c] : terms_)
                c *= s;
        return *this;
    }

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(const Rational& s, AlgebraElement a) { return a *= s; }

    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b)
    {
        return a.variant_ == b.variant_ && a.terms_ == b.terms_;
    }

    /// "-4*L_{0,0} + C"; "0" for the zero element.
    std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            const bool neg = sgn(c) < 0;
            Rational mag = abs(c);
            os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
            first = false;
            if (mag != 1)
                os << blocklie::to_string(mag) << "*";
            os << key_to_string(variant_, k);
        }
        return os.str();
    }

    void same_variant(const AlgebraElement& o) const
    {
        if (!(variant_ == o.variant_))
            throw UsageError("mixed algebra variants: " + variant_.name() + " vs " + o.variant_.name());
    }

private:
    AlgebraVariant variant_;
    std::map<BasisKey, Rational> terms_;
};

// ---------------------------------------------------------------------------
// Structure constants
// ---------------------------------------------------------------------------

namespace detail {

inline Rational binomial(long n, long k)
{
    if (k < 0 || k > n)
        return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(r);
}

inline Rational ipow(std::int64_t base, long e)
{
    mpz_class r;
    mpz_class b(static_cast<long>(base));
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
    return Rational(r);
}

inline Rational factorial(long n)
{
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(r);
}

/// Generalized binomial x(x-1)...(x-m+1)/m! for integer x of any sign.
inline Rational general_binomial(std::int64_t x, long m)
{
    if (m < 0)
        return 0;
    Rational r = 1;
    for (long t = 0; t < m; ++t)
        r *= Rational(static_cast<long>(x - t));
    return r / factorial(m);
}

} // namespace detail

/// Central coefficient of [x^a D^i, x^b D^j] in W_{1+inf}:
/// sum_{m=-a}^{-1} m^i (m+a)^j for a > 0, extended antisymmetrically.
inline Rational w_central_term(std::int64_t a, int i, std::int64_t b, int j)
{
    if (a + b != 0 || a == 0)
        return 0;
    if (a < 0)
        return -w_central_term(b, j, a, i);
    Rational s = 0;
    for (std::int64_t m = -a; m <= -1; ++m)
        s += detail::ipow(m, i) * detail::ipow(m + a, j);
    return s;
}

/// Closed-form binomial central term (-1)^i i! j! binom(a+i, i+j+1). It agrees
/// with w_central_term on low orders but is not a 2-cocycle in general; kept for
/// fault-injection tests of the axiom sweep.
inline Rational w_central_term_binomial(std::int64_t a, int i, std::int64_t b, int j)
{
    if (a + b != 0)
        return 0;
    Rational sign = (i % 2 == 0) ? 1 : -1;
    return sign * detail::factorial(i) * detail::factorial(j) * detail::general_binomial(a + i, i + j + 1);
}

namespace detail {

inline AlgebraElement w_bracket(const AlgebraVariant& v, const BasisKey& x, const BasisKey& y,
                                Rational (*central)(std::int64_t, int, std::int64_t, int))
{
    AlgebraElement out(v);
    const auto a = x.degree, b = y.degree;
    const int i = x.level, j = y.level;
    // (D+b)^i D^j = sum_k C(i,k) b^(i-k) D^(k+j)
    for (int k = 0; k <= i; ++k)
        out.add(BasisKey::gen(a + b, k + j), binomial(i, k) * ipow(b, i - k));
    // D^i (D+a)^j = sum_k C(j,k) a^(j-k) D^(i+k)
    for (int k = 0; k <= j; ++k)
        out.add(BasisKey::gen(a + b, i + k), -binomial(j, k) * ipow(a, j - k));
    out.add(BasisKey::c(), central(a, i, b, j));
    return out;
}

} // namespace detail

/// Bracket of two basis keys of a variant.
inline AlgebraElement bracket_keys(const AlgebraVariant& v, const BasisKey& x, const BasisKey& y)
{
    require_key(v, x);
    require_key(v, y);
    AlgebraElement out(v);
    if (x.central || y.central)
        return out;
    const std::int64_t a = x.degree, b = y.degree;
    const int i = x.level, j = y.level;
    switch (v.kind()) {
    case AlgebraKind::virasoro:
        out.add(BasisKey::gen(a + b, 0), Rational(static_cast<long>(b - a)));
        if (a + b == 0)
            out.add(BasisKey::c(), rat(a * a * a - a, 12));
        return out;
    case AlgebraKind::block_b:
    case AlgebraKind::block_bbar:
    case AlgebraKind::quotient: {
        const std::int64_t c = static_cast<std::int64_t>(i + 1) * b - static_cast<std::int64_t>(j + 1) * a;
        const auto hi = v.max_level();
        if (c != 0 && (!hi || i + j <= *hi))
            out.add(BasisKey::gen(a + b, i + j), Rational(static_cast<long>(c)));
        if (a + b == 0) {
            if (v.kind() == AlgebraKind::block_bbar) {
                if (i + j == -2)
                    out.add(BasisKey::c(), Rational(static_cast<long>(a)));
            } else if (i + j == 0) {
                out.add(BasisKey::c(), rat(a * a * a - a, 6));
            }
        }
        return out;
    }
    case AlgebraKind::w1inf:
    case AlgebraKind::winf:
        return detail::w_bracket(v, x, y, &w_central_term);
    }
    return out;
}

/// W_{1+inf} bracket using the closed-form binomial central term.
inline AlgebraElement bracket_keys_w_binomial(const AlgebraVariant& v, const BasisKey& x, const BasisKey& y)
{
    require_key(v, x);
    require_key(v, y);
    if (!v.is_w())
        throw UsageError("bracket_keys_w_binomial: W variant required, got " + v.name());
    if (x.central || y.central)
        return AlgebraElement(v);
    return detail::w_bracket(v, x, y, &w_central_term_binomial);
}

/// Bilinear extension of a key-level bracket.
template <class KeyBracket>
AlgebraElement bracket_with(const KeyBracket& key_bracket, const AlgebraElement& x, const AlgebraElement& y)
{
    x.same_variant(y);
    AlgebraElement out(x.variant());
    for (const auto& [kx, cx] : x.terms())
        for (const auto& [ky, cy] : y.terms()) {
            AlgebraElement t = key_bracket(kx, ky);
            t *= cx * cy;
            out += t;
        }
    return out;
}

inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y)
{
    const auto v = x.variant();
    return bracket_with([&v](const BasisKey& a, const BasisKey& b) { return bracket_keys(v, a, b); }, x, y);
}

/// Projection of a B element onto B~_{m,n}: levels outside [m, n] dropped, C kept only when m = 0.
inline AlgebraElement project_to_quotient(const AlgebraElement& x, int m, int n)
{
    if (x.variant().kind() != AlgebraKind::block_b)
        throw UsageError("project_to_quotient expects an element of B, got " + x.variant().name());
    AlgebraElement out(AlgebraVariant::quotient(m, n));
    for (const auto& [k, c] : x.terms()) {
        if (k.central ? m == 0 : (k.level >= m && k.level <= n))
            out.add(k, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const AlgebraElement& x)
{
    auto terms = nlohmann::json::array();
    for (const auto& [k, c] : x.terms())
        if (!k.central)
            terms.push_back({{"alpha", k.degree}, {"level", k.level}, {"coeff", to_string(c)}});
    return {{"variant", x.variant().name()}, {"terms", std::move(terms)}, {"central", to_string(x.central())}};
}

inline BasisKey key_from_json(const nlohmann::json& j, const std::string& field)
{
    if (j.is_string() && j.get<std::string>() == "C")
        return BasisKey::c();
    if (!j.is_object() || !j.contains("alpha"))
        throw ParseError(field, "expected {\"alpha\": int, \"level\": int} or \"C\"");
    if (!j["alpha"].is_number_integer())
        throw ParseError(field + ".alpha", "expected integer");
    int level = 0;
    if (j.contains("level")) {
        if (!j["level"].is_number_integer())
            throw ParseError(field + ".level", "expected integer");
        level = j["level"].get<int>();
    }
    return BasisKey::gen(j["alpha"].get<std::int64_t>(), level);
}

/// Accepts a full element {"terms": [...], "central": "p/q"} or a single key {"alpha", "level"}.
inline AlgebraElement element_from_json(const nlohmann::json& j, const AlgebraVariant& v, const std::string& field)
{
    AlgebraElement out(v);
    auto add_checked = [&](const BasisKey& k, const Rational& c, const std::string& f) {
        if (!key_valid(v, k))
            throw ParseError(f, "key " + key_to_string(v, k) + " is not in variant " + v.name());
        out.add(k, c);
    };
    if (j.is_object() && j.contains("terms")) {
        if (j.contains("variant")) {
            if (!j["variant"].is_string())
                throw ParseError(field + ".variant", "expected string");
            if (!(AlgebraVariant::parse(j["variant"].get<std::string>()) == v))
                throw ParseError(field + ".variant", "element variant does not match " + v.name());
        }
        const auto& terms = j["terms"];
        if (!terms.is_array())
            throw ParseError(field + ".terms", "expected array");
        for (std::size_t n = 0; n < terms.size(); ++n) {
            const std::string f = field + ".terms[" + std::to_string(n) + "]";
            BasisKey k = key_from_json(terms[n], f);
            Rational c = 1;
            if (terms[n].contains("coeff")) {
                if (!terms[n]["coeff"].is_string())
                    throw ParseError(f + ".coeff", "expected \"p/q\" string");
                c = parse_rational(terms[n]["coeff"].get<std::string>(), f + ".coeff");
            }
            add_checked(k, c, f);
        }
        if (j.contains("central")) {
            if (!j["central"].is_string())
                throw ParseError(field + ".central", "expected \"p/q\" string");
            add_checked(BasisKey::c(), parse_rational(j["central"].get<std::string>(), field + ".central"),
                        field + ".central");
        }
        return out;
    }
    Rational c = 1;
    if (j.is_object() && j.contains("coeff")) {
        if (!j["coeff"].is_string())
            throw ParseError(field + ".coeff", "expected \"p/q\" string");
        c = parse_rational(j["coeff"].get<std::string>(), field + ".coeff");
    }
    add_checked(key_from_json(j, field), c, field);
    return out;
}

} // namespace blocklie
