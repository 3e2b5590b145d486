#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "blocklie/error.hpp"
#include "blocklie/rational.hpp"

namespace blocklie {

using RationalVector = std::vector<Rational>;

/// Sparse exact-rational matrix. Entries are kept in lexicographic (row, col)
/// order and zero entries are never stored.
class RationalMatrix {
public:
    using Index = std::pair<std::size_t, std::size_t>;

    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    static RationalMatrix identity(std::size_t n)
    {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m.entries_.emplace(Index{i, i}, Rational(1));
        return m;
    }

    static RationalMatrix scalar(std::size_t n, const Rational& s)
    {
        RationalMatrix m(n, n);
        if (!blocklie::is_zero(s))
            for (std::size_t i = 0; i < n; ++i)
                m.entries_.emplace(Index{i, i}, s);
        return m;
    }

    static RationalMatrix from_rows(const std::vector<RationalVector>& rows)
    {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        RationalMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols)
                throw UsageError("from_rows: ragged row " + std::to_string(r));
            for (std::size_t c = 0; c < cols; ++c)
                m.set(r, c, rows[r][c]);
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const std::map<Index, Rational>& entries() const noexcept { return entries_; }
    bool is_zero() const noexcept { return entries_.empty(); }

    Rational at(std::size_t r, std::size_t c) const
    {
        check_index(r, c);
        auto it = entries_.find({r, c});
        return it == entries_.end() ? Rational(0) : it->second;
    }

    void set(std::size_t r, std::size_t c, const Rational& v)
    {
        check_index(r, c);
        if (blocklie::is_zero(v))
            entries_.erase({r, c});
        else
            entries_[{r, c}] = v;
    }

    void add(std::size_t r, std::size_t c, const Rational& v)
    {
        check_index(r, c);
        if (blocklie::is_zero(v))
            return;
        auto [it, inserted] = entries_.try_emplace({r, c}, v);
        if (!inserted) {
            it->second += v;
            if (blocklie::is_zero(it->second))
                entries_.erase(it);
        }
    }

    RationalVector column(std::size_t c) const
    {
        RationalVector out(rows_);
        for (const auto& [idx, v] : entries_)
            if (idx.second == c)
                out[idx.first] = v;
        return out;
    }

    RationalVector apply(std::span<const Rational> x) const
    {
        if (x.size() != cols_)
            throw UsageError("apply: vector length " + std::to_string(x.size()) + " != cols " +
                             std::to_string(cols_));
        RationalVector out(rows_);
        for (const auto& [idx, v] : entries_)
            out[idx.first] += v * x[idx.second];
        return out;
    }

    RationalMatrix transpose() const
    {
        RationalMatrix t(cols_, rows_);
        for (const auto& [idx, v] : entries_)
            t.entries_.emplace(Index{idx.second, idx.first}, v);
        return t;
    }

    RationalMatrix& operator+=(const RationalMatrix& o)
    {
        same_shape(o, "+");
        for (const auto& [idx, v] : o.entries_)
            add(idx.first, idx.second, v);
        return *this;
    }

    RationalMatrix& operator-=(const RationalMatrix& o)
    {
        same_shape(o, "-");
        for (const auto& [idx, v] : o.entries_)
            add(idx.first, idx.second, -v);
        return *this;
    }

    RationalMatrix& operator*=(const Rational& s)
    {
        if (blocklie::is_zero(s)) {
            entries_.clear();
        } else {
            for (auto& [idx, v] : entries_)
                v *= s;
        }
        return *this;
    }

    friend RationalMatrix operator+(RationalMatrix a, const RationalMatrix& b) { return a += b; }
    friend RationalMatrix operator-(RationalMatrix a, const RationalMatrix& b) { return a -= b; }
    friend RationalMatrix operator*(RationalMatrix a, const Rational& s) { return a *= s; }
    friend RationalMatrix operator*(const Rational& s, RationalMatrix a) { return a *= s; }

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b)
    {
        if (a.cols_ != b.rows_)
            throw UsageError("matrix product shape mismatch: " + a.shape() + " * " + b.shape());
        // Row-bucket b so each entry of a scans only one row of b.
        std::vector<std::vector<std::pair<std::size_t, const Rational*>>> brow(b.rows_);
        for (const auto& [idx, v] : b.entries_)
            brow[idx.first].emplace_back(idx.second, &v);
        std::map<Index, Rational> acc;
        for (const auto& [idx, av] : a.entries_)
            for (const auto& [c, bv] : brow[idx.second])
                acc[{idx.first, c}] += av * *bv;
        RationalMatrix out(a.rows_, b.cols_);
        for (auto& [idx, v] : acc)
            if (!blocklie::is_zero(v))
                out.entries_.emplace(idx, std::move(v));
        return out;
    }

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void check_index(std::size_t r, std::size_t c) const
    {
        if (r >= rows_ || c >= cols_)
            throw UsageError("matrix index (" + std::to_string(r) + "," + std::to_string(c) +
                             ") out of bounds for " + shape());
    }

    void same_shape(const RationalMatrix& o, const char* op) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw UsageError(std::string("matrix ") + op + " shape mismatch: " + shape() + " vs " +
                             o.shape());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::map<Index, Rational> entries_;
};

struct Reduction {
    RationalMatrix rref;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_columns;
    std::vector<RationalVector> kernel_basis;
};

namespace detail {

using SparseRow = std::map<std::size_t, Rational>;

inline std::vector<SparseRow> to_rows(const RationalMatrix& m)
{
    std::vector<SparseRow> rows(m.rows());
    for (const auto& [idx, v] : m.entries())
        rows[idx.first].emplace(idx.second, v);
    return rows;
}

// row_target -= factor * row_source
inline void axpy(SparseRow& target, const Rational& factor, const SparseRow& source)
{
    for (const auto& [c, v] : source) {
        auto [it, inserted] = target.try_emplace(c, 0);
        it->second -= factor * v;
        if (is_zero(it->second))
            target.erase(it);
    }
}

/// Gauss-Jordan elimination over the first `ncols` columns; returns pivot rows in
/// order of increasing pivot column, each normalized to leading coefficient 1.
inline std::vector<SparseRow> gauss_jordan(std::vector<SparseRow> rows, std::size_t ncols,
                                           std::vector<std::size_t>& pivots)
{
    std::vector<SparseRow> done;
    pivots.clear();
    // Drop empty rows up front.
    std::erase_if(rows, [](const SparseRow& r) { return r.empty(); });
    for (std::size_t col = 0; col < ncols && !rows.empty(); ++col) {
        // Sparsest row with a nonzero in this column keeps fill-in low.
        std::size_t best = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto it = rows[r].begin();
            if (it->first == col && (best == rows.size() || rows[r].size() < rows[best].size()))
                best = r;
        }
        if (best == rows.size())
            continue;
        SparseRow pivot = std::move(rows[best]);
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
        const Rational inv = 1 / pivot.begin()->second;
        for (auto& [c, v] : pivot)
            v *= inv;
        for (auto& r : rows) {
            auto it = r.find(col);
            if (it != r.end()) {
                Rational f = it->second;
                axpy(r, f, pivot);
            }
        }
        std::erase_if(rows, [](const SparseRow& r) { return r.empty(); });
        for (auto& r : done) {
            auto it = r.find(col);
            if (it != r.end()) {
                Rational f = it->second;
                axpy(r, f, pivot);
            }
        }
        done.push_back(std::move(pivot));
        pivots.push_back(col);
    }
    return done;
}

} // namespace detail

/// Reduced row-echelon form, rank and a kernel basis (one vector per free column,
/// with a 1 in that column).
inline Reduction mat_reduce(const RationalMatrix& m)
{
    Reduction out;
    auto pivot_rows = detail::gauss_jordan(detail::to_rows(m), m.cols(), out.pivot_columns);
    out.rank = pivot_rows.size();
    out.rref = RationalMatrix(m.rows(), m.cols());
    for (std::size_t r = 0; r < pivot_rows.size(); ++r)
        for (const auto& [c, v] : pivot_rows[r])
            out.rref.set(r, c, v);

    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : out.pivot_columns)
        is_pivot[c] = true;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free])
            continue;
        RationalVector v(m.cols());
        v[free] = 1;
        for (std::size_t r = 0; r < pivot_rows.size(); ++r) {
            auto it = pivot_rows[r].find(free);
            if (it != pivot_rows[r].end())
                v[out.pivot_columns[r]] = -it->second;
        }
        out.kernel_basis.push_back(std::move(v));
    }
    return out;
}

inline std::size_t mat_rank(const RationalMatrix& m)
{
    std::vector<std::size_t> pivots;
    return detail::gauss_jordan(detail::to_rows(m), m.cols(), pivots).size();
}

/// Some x with m x = rhs, or nullopt when the system is inconsistent.
inline std::optional<RationalVector> mat_solve(const RationalMatrix& m, std::span<const Rational> rhs)
{
    if (rhs.size() != m.rows())
        throw UsageError("mat_solve: rhs length " + std::to_string(rhs.size()) + " != rows " +
                         std::to_string(m.rows()));
    auto rows = detail::to_rows(m);
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (!is_zero(rhs[r]))
            rows[r].emplace(m.cols(), rhs[r]);
    std::vector<std::size_t> pivots;
    auto reduced = detail::gauss_jordan(std::move(rows), m.cols() + 1, pivots);
    RationalVector x(m.cols());
    for (std::size_t r = 0; r < reduced.size(); ++r) {
        if (pivots[r] == m.cols())
            return std::nullopt;
        auto it = reduced[r].find(m.cols());
        if (it != reduced[r].end())
            x[pivots[r]] = it->second;
    }
    return x;
}

/// Incrementally grown subspace of Q^n, kept as a reduced echelon basis.
class Subspace {
public:
    explicit Subspace(std::size_t ambient = 0) : ambient_(ambient) {}

    std::size_t ambient() const noexcept { return ambient_; }
    std::size_t dim() const noexcept { return basis_.size(); }
    bool full() const noexcept { return basis_.size() == ambient_; }

    /// Adds v; returns true if the dimension grew.
    bool insert(std::span<const Rational> v)
    {
        if (v.size() != ambient_)
            throw UsageError("Subspace::insert: length mismatch");
        detail::SparseRow row;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!is_zero(v[i]))
                row.emplace(i, v[i]);
        reduce(row);
        if (row.empty())
            return false;
        const Rational inv = 1 / row.begin()->second;
        for (auto& [c, x] : row)
            x *= inv;
        const std::size_t lead = row.begin()->first;
        for (auto& b : basis_) {
            auto it = b.find(lead);
            if (it != b.end()) {
                Rational f = it->second;
                detail::axpy(b, f, row);
            }
        }
        auto pos = std::lower_bound(basis_.begin(), basis_.end(), lead,
                                    [](const detail::SparseRow& r, std::size_t c) { return r.begin()->first < c; });
        basis_.insert(pos, std::move(row));
        return true;
    }

    bool contains(std::span<const Rational> v) const
    {
        detail::SparseRow row;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!is_zero(v[i]))
                row.emplace(i, v[i]);
        reduce(row);
        return row.empty();
    }

    std::vector<RationalVector> basis() const
    {
        std::vector<RationalVector> out;
        for (const auto& b : basis_) {
            RationalVector v(ambient_);
            for (const auto& [c, x] : b)
                v[c] = x;
            out.push_back(std::move(v));
        }
        return out;
    }

private:
    void reduce(detail::SparseRow& row) const
    {
        for (const auto& b : basis_) {
            auto it = row.find(b.begin()->first);
            if (it != row.end()) {
                Rational f = it->second;
                detail::axpy(row, f, b);
            }
        }
    }

    std::size_t ambient_;
    std::vector<detail::SparseRow> basis_;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json vector_to_json(std::span<const Rational> v)
{
    auto out = nlohmann::json::array();
    for (const auto& x : v)
        out.push_back(to_string(x));
    return out;
}

inline nlohmann::json to_json(const RationalMatrix& m)
{
    auto entries = nlohmann::json::array();
    for (const auto& [idx, v] : m.entries())
        entries.push_back({idx.first, idx.second, to_string(v)});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline RationalMatrix matrix_from_json(const nlohmann::json& j, const std::string& field)
{
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw ParseError(field, "matrix needs rows, cols, entries");
    if (!j["rows"].is_number_unsigned() && !(j["rows"].is_number_integer() && j["rows"].get<long>() >= 0))
        throw ParseError(field + ".rows", "expected nonnegative integer");
    if (!j["cols"].is_number_unsigned() && !(j["cols"].is_number_integer() && j["cols"].get<long>() >= 0))
        throw ParseError(field + ".cols", "expected nonnegative integer");
    RationalMatrix m(j["rows"].get<std::size_t>(), j["cols"].get<std::size_t>());
    const auto& entries = j["entries"];
    if (!entries.is_array())
        throw ParseError(field + ".entries", "expected array");
    for (std::size_t n = 0; n < entries.size(); ++n) {
        const std::string f = field + ".entries[" + std::to_string(n) + "]";
        const auto& e = entries[n];
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            !e[2].is_string())
            throw ParseError(f, "expected [row, col, \"p/q\"]");
        const long r = e[0].get<long>(), c = e[1].get<long>();
        if (r < 0 || c < 0 || static_cast<std::size_t>(r) >= m.rows() ||
            static_cast<std::size_t>(c) >= m.cols())
            throw ParseError(f, "index out of bounds");
        m.set(static_cast<std::size_t>(r), static_cast<std::size_t>(c),
              parse_rational(e[2].get<std::string>(), f));
    }
    return m;
}

} // namespace blocklie
