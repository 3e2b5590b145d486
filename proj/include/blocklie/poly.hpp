#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "blocklie/error.hpp"
#include "blocklie/matrix.hpp"
#include "blocklie/rational.hpp"

namespace blocklie {

using Exponents = std::vector<unsigned>;
using Alphabet = std::vector<std::string>;

/// Sparse multivariate polynomial over Q in a fixed, ordered symbol alphabet.
class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

    static MultiPoly constant(Alphabet alphabet, const Rational& c)
    {
        MultiPoly p(std::move(alphabet));
        p.add_term(Exponents(p.alphabet_.size(), 0), c);
        return p;
    }

    static MultiPoly variable(Alphabet alphabet, const std::string& name)
    {
        MultiPoly p(std::move(alphabet));
        Exponents e(p.alphabet_.size(), 0);
        e[p.index_of(name)] = 1;
        p.add_term(e, Rational(1));
        return p;
    }

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const std::map<Exponents, Rational>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    std::size_t index_of(const std::string& symbol) const
    {
        auto it = std::find(alphabet_.begin(), alphabet_.end(), symbol);
        if (it == alphabet_.end())
            throw UsageError("symbol '" + symbol + "' not in alphabet");
        return static_cast<std::size_t>(it - alphabet_.begin());
    }

    void add_term(const Exponents& e, const Rational& c)
    {
        if (e.size() != alphabet_.size())
            throw UsageError("exponent vector length " + std::to_string(e.size()) +
                             " != alphabet length " + std::to_string(alphabet_.size()));
        if (blocklie::is_zero(c))
            return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (blocklie::is_zero(it->second))
                terms_.erase(it);
        }
    }

    /// Constant term if the polynomial is constant.
    std::optional<Rational> as_constant() const
    {
        if (terms_.empty())
            return Rational(0);
        if (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(),
                                              [](unsigned x) { return x == 0; }))
            return terms_.begin()->second;
        return std::nullopt;
    }

    /// Degree in one symbol; -1 for the zero polynomial.
    int degree(const std::string& symbol) const
    {
        const std::size_t s = index_of(symbol);
        int d = -1;
        for (const auto& [e, c] : terms_)
            d = std::max(d, static_cast<int>(e[s]));
        return d;
    }

    int total_degree() const
    {
        int d = -1;
        for (const auto& [e, c] : terms_) {
            int t = 0;
            for (auto x : e)
                t += static_cast<int>(x);
            d = std::max(d, t);
        }
        return d;
    }

    MultiPoly& operator+=(const MultiPoly& o)
    {
        check_alphabet(o);
        for (const auto& [e, c] : o.terms_)
            add_term(e, c);
        return *this;
    }

    MultiPoly& operator-=(const MultiPoly& o)
    {
        check_alphabet(o);
        for (const auto& [e, c] : o.terms_)
            add_term(e, -c);
        return *this;
    }

    MultiPoly& operator*=(const Rational& s)
    {
        if (blocklie::is_zero(s))
            terms_.clear();
        else
            for (auto& [e, c] : terms_)
                c *= s;
        return *this;
    }

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator-(MultiPoly a) { return a *= Rational(-1); }
    friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
    friend MultiPoly operator*(const Rational& s, MultiPoly a) { return a *= s; }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b)
    {
        a.check_alphabet(b);
        MultiPoly out(a.alphabet_);
        Exponents e(a.alphabet_.size());
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i)
                    e[i] = ea[i] + eb[i];
                out.add_term(e, ca * cb);
            }
        return out;
    }

    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

    friend bool operator==(const MultiPoly& a, const MultiPoly& b)
    {
        return a.alphabet_ == b.alphabet_ && a.terms_ == b.terms_;
    }

    MultiPoly pow(unsigned n) const
    {
        MultiPoly out = constant(alphabet_, Rational(1));
        MultiPoly base = *this;
        while (n) {
            if (n & 1u)
                out *= base;
            n >>= 1u;
            if (n)
                base *= base;
        }
        return out;
    }

    /// The polynomial in the remaining symbols multiplying symbol^degree.
    MultiPoly coeff(const std::string& symbol, unsigned degree) const
    {
        const std::size_t s = index_of(symbol);
        MultiPoly out(alphabet_);
        for (const auto& [e, c] : terms_)
            if (e[s] == degree) {
                Exponents f = e;
                f[s] = 0;
                out.add_term(f, c);
            }
        return out;
    }

    MultiPoly derive(const std::string& symbol) const
    {
        const std::size_t s = index_of(symbol);
        MultiPoly out(alphabet_);
        for (const auto& [e, c] : terms_)
            if (e[s] > 0) {
                Exponents f = e;
                --f[s];
                out.add_term(f, c * static_cast<long>(e[s]));
            }
        return out;
    }

    /// Replaces one symbol by a polynomial over the same alphabet.
    MultiPoly substitute(const std::string& symbol, const MultiPoly& value) const
    {
        check_alphabet(value);
        const std::size_t s = index_of(symbol);
        std::map<unsigned, MultiPoly> powers;
        MultiPoly out(alphabet_);
        for (const auto& [e, c] : terms_) {
            Exponents f = e;
            f[s] = 0;
            MultiPoly mono(alphabet_);
            mono.add_term(f, c);
            auto it = powers.find(e[s]);
            if (it == powers.end())
                it = powers.emplace(e[s], value.pow(e[s])).first;
            out += mono * it->second;
        }
        return out;
    }

    MultiPoly substitute(const std::string& symbol, const Rational& value) const
    {
        return substitute(symbol, constant(alphabet_, value));
    }

    /// Evaluates with every symbol that occurs assigned; unassigned symbols with
    /// nonzero exponent are a usage error.
    Rational eval(const std::map<std::string, Rational>& assignment) const
    {
        std::vector<std::optional<Rational>> values(alphabet_.size());
        for (const auto& [name, v] : assignment)
            values[index_of(name)] = v;
        Rational total = 0;
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0)
                    continue;
                if (!values[i])
                    throw UsageError("eval: symbol '" + alphabet_[i] + "' unassigned");
                Rational p;
                mpz_class num, den;
                mpz_pow_ui(num.get_mpz_t(), values[i]->get_num_mpz_t(), e[i]);
                mpz_pow_ui(den.get_mpz_t(), values[i]->get_den_mpz_t(), e[i]);
                p = Rational(num, den);
                p.canonicalize();
                t *= p;
            }
            total += t;
        }
        return total;
    }

    /// Largest monomial dividing every term, returned as an exponent vector.
    Exponents monomial_content() const
    {
        Exponents out(alphabet_.size(), 0);
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (first) {
                out = e;
                first = false;
            } else {
                for (std::size_t i = 0; i < e.size(); ++i)
                    out[i] = std::min(out[i], e[i]);
            }
        }
        return out;
    }

    /// Exact division by a monomial that divides every term.
    MultiPoly divide_monomial(const Exponents& m) const
    {
        MultiPoly out(alphabet_);
        for (const auto& [e, c] : terms_) {
            Exponents f = e;
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (f[i] < m[i])
                    throw UsageError("divide_monomial: monomial does not divide term");
                f[i] -= m[i];
            }
            out.add_term(f, c);
        }
        return out;
    }

    /// Human-readable form, highest terms first: "2*alpha^2*kt - 1".
    std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            Rational mag = abs(c);
            const bool neg = sgn(c) < 0;
            if (first)
                os << (neg ? "-" : "");
            else
                os << (neg ? " - " : " + ");
            first = false;
            bool is_const = std::all_of(e.begin(), e.end(), [](unsigned x) { return x == 0; });
            bool wrote = false;
            if (is_const || mag != 1) {
                os << blocklie::to_string(mag);
                wrote = true;
            }
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0)
                    continue;
                os << (wrote ? "*" : "") << alphabet_[i];
                if (e[i] > 1)
                    os << "^" << e[i];
                wrote = true;
            }
        }
        return os.str();
    }

private:
    void check_alphabet(const MultiPoly& o) const
    {
        if (alphabet_ != o.alphabet_)
            throw UsageError("polynomial alphabet mismatch");
    }

    Alphabet alphabet_;
    std::map<Exponents, Rational> terms_;
};

// Named forms of the ring operations.
enum class PolyOpKind { add, mul };

inline MultiPoly poly_op(const MultiPoly& a, const MultiPoly& b, PolyOpKind kind)
{
    return kind == PolyOpKind::add ? a + b : a * b;
}

inline MultiPoly poly_coeff(const MultiPoly& p, const std::string& symbol, unsigned degree)
{
    return p.coeff(symbol, degree);
}

inline Rational poly_eval(const MultiPoly& p, const std::map<std::string, Rational>& assignment)
{
    return p.eval(assignment);
}

inline MultiPoly poly_derive(const MultiPoly& p, const std::string& symbol) { return p.derive(symbol); }

// ---------------------------------------------------------------------------
// Univariate helpers on square matrices
// ---------------------------------------------------------------------------

/// g(m) for a polynomial g in a single symbol (any alphabet whose other symbols do not occur).
inline RationalMatrix poly_apply(const MultiPoly& g, const std::string& symbol, const RationalMatrix& m)
{
    if (m.rows() != m.cols())
        throw UsageError("poly_apply: matrix must be square, got " + m.shape());
    const int deg = g.degree(symbol);
    RationalMatrix out(m.rows(), m.cols());
    // Horner from the top coefficient down.
    for (int d = deg; d >= 0; --d) {
        auto c = g.coeff(symbol, static_cast<unsigned>(d)).as_constant();
        if (!c)
            throw UsageError("poly_apply: coefficient depends on other symbols");
        out = out * m + RationalMatrix::scalar(m.rows(), *c);
    }
    return out;
}

/// det(lambda*I - m) via Faddeev-LeVerrier.
inline MultiPoly characteristic_polynomial(const RationalMatrix& m, const std::string& symbol = "lambda")
{
    if (m.rows() != m.cols())
        throw UsageError("characteristic_polynomial: matrix must be square, got " + m.shape());
    const std::size_t n = m.rows();
    Alphabet alpha{symbol};
    MultiPoly p(alpha);
    std::vector<Rational> c(n + 1);
    c[n] = 1;
    RationalMatrix mk(n, n); // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        mk = m * mk + RationalMatrix::scalar(n, c[n - k + 1]);
        RationalMatrix amk = m * mk;
        Rational tr = 0;
        for (const auto& [idx, v] : amk.entries())
            if (idx.first == idx.second)
                tr += v;
        c[n - k] = -tr / static_cast<long>(k);
    }
    for (std::size_t d = 0; d <= n; ++d)
        p.add_term(Exponents{static_cast<unsigned>(d)}, c[d]);
    return p;
}

inline nlohmann::json to_json(const MultiPoly& p)
{
    auto terms = nlohmann::json::array();
    for (const auto& [e, c] : p.terms())
        terms.push_back({{"exponents", e}, {"coeff", to_string(c)}});
    return {{"alphabet", p.alphabet()}, {"terms", std::move(terms)}, {"text", p.to_string()}};
}

inline MultiPoly poly_from_json(const nlohmann::json& j, const std::string& field)
{
    if (!j.is_object() || !j.contains("alphabet") || !j.contains("terms"))
        throw ParseError(field, "polynomial needs alphabet and terms");
    Alphabet alphabet;
    try {
        alphabet = j["alphabet"].get<Alphabet>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(field + ".alphabet", "expected array of strings");
    }
    MultiPoly p(alphabet);
    const auto& terms = j["terms"];
    if (!terms.is_array())
        throw ParseError(field + ".terms", "expected array");
    for (std::size_t n = 0; n < terms.size(); ++n) {
        const std::string f = field + ".terms[" + std::to_string(n) + "]";
        const auto& t = terms[n];
        if (!t.is_object() || !t.contains("exponents") || !t.contains("coeff") || !t["coeff"].is_string())
            throw ParseError(f, "expected {exponents, coeff}");
        Exponents e;
        try {
            e = t["exponents"].get<Exponents>();
        } catch (const nlohmann::json::exception&) {
            throw ParseError(f + ".exponents", "expected array of nonnegative integers");
        }
        if (e.size() != alphabet.size())
            throw ParseError(f + ".exponents", "length does not match alphabet");
        p.add_term(e, parse_rational(t["coeff"].get<std::string>(), f + ".coeff"));
    }
    return p;
}

} // namespace blocklie
