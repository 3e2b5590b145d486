#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "blocklie/error.hpp"
#include "blocklie/lemma_lab.hpp"
#include "blocklie/module.hpp"

namespace blocklie {

/// Worker count from BLOCKLIE_WORKERS, defaulting to the hardware concurrency.
inline std::size_t worker_count()
{
    if (const char* env = std::getenv("BLOCKLIE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw UsageError(std::string("BLOCKLIE_WORKERS must be a positive integer, got \"") + env + "\"");
        return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs job(0..n-1) on a pool and returns results in index order. The first exception
/// thrown by any job is rethrown after all workers stop.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& job, std::size_t workers = worker_count())
{
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t w = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < w; ++t)
        pool.emplace_back(run);
    run();
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

/// Every report of the verification lab, in a fixed claim order.
inline std::vector<LemmaReport> lemma_suite(std::size_t workers = worker_count())
{
    const CouplingSystem sys = coupling_system();
    std::vector<std::function<std::vector<LemmaReport>()>> jobs{
        [] { return std::vector<LemmaReport>{verify_double_bracket_identity()}; },
        [&] { return std::vector<LemmaReport>{coupling_degree_report(sys), coupling_middle_row_report(sys),
                                              coupling_i6_report(sys)}; },
        [] { return std::vector<LemmaReport>{coupling_i2_report()}; },
        [] { return std::vector<LemmaReport>{pq_report()}; },
        [] {
            std::vector<LemmaReport> out;
            for (int n : {1, 2}) {
                const auto ad = adjoint_window(0, n, {-4, 4});
                for (int d : {1, 2, 3})
                    for (std::int64_t a : {1, 2}) {
                        std::vector<Rational> c(static_cast<std::size_t>(d) + 1, 0);
                        c.back() = 1;
                        auto r = polynomial_shift_identity(ad, lambda_poly(c), a, n);
                        r.details["module"] = "adjoint(0," + std::to_string(n) + ")";
                        out.push_back(std::move(r));
                    }
                auto r = nilpotency_chain_check(ad, n);
                r.details["module"] = "adjoint(0," + std::to_string(n) + ")";
                out.push_back(std::move(r));
            }
            return out;
        },
        [] {
            std::vector<IntermediateSpec> specs;
            for (const auto& a : {rat(0), rat(1), rat(1, 2), rat(-3, 2)})
                for (const auto& b : {rat(0), rat(1, 2), rat(1), rat(2)})
                    specs.push_back(IntermediateSpec::aab(a, b));
            return std::vector<LemmaReport>{spanning_report(specs, {-8, 8})};
        },
    };
    const auto parts = parallel_map<std::vector<LemmaReport>>(
        jobs.size(), [&](std::size_t i) { return jobs[i](); }, workers);
    std::vector<LemmaReport> out;
    for (const auto& p : parts)
        out.insert(out.end(), p.begin(), p.end());
    return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool passed = true;
    bool discrepancy = false; ///< recorded mismatch with a stated value; fails only in strict mode
    std::string summary;
    nlohmann::json detail = nlohmann::json::object();
};

inline CheckResult check_from_lemma(const LemmaReport& r)
{
    CheckResult c;
    c.name = r.claim;
    if (r.details.is_object() && r.details.contains("module")) {
        c.name += "[" + r.details["module"].get<std::string>();
        if (r.details.contains("g"))
            c.name += ",g=" + r.details["g"].get<std::string>();
        if (r.details.contains("alpha"))
            c.name += ",alpha=" + r.details["alpha"].dump();
        c.name += "]";
    }
    c.passed = r.holds;
    c.discrepancy = r.status == MatchStatus::discrepancy;
    c.summary = to_string(r.status) + (r.holds ? "" : ", violated");
    c.detail = to_json(r);
    return c;
}

struct Report {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::vector<CheckResult> checks;

    std::size_t violations() const
    {
        return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
    }
    std::size_t discrepancies() const
    {
        return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.discrepancy; }));
    }
    bool ok(bool strict) const { return violations() == 0 && (!strict || discrepancies() == 0); }
};

inline nlohmann::json to_json(const Report& r)
{
    auto checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"discrepancy", c.discrepancy},
                          {"summary", c.summary},
                          {"detail", c.detail}});
    return {{"command", r.command},
            {"config", r.config},
            {"checks", std::move(checks)},
            {"violations", r.violations()},
            {"discrepancies", r.discrepancies()}};
}

inline std::string to_table(const Report& r)
{
    std::size_t w = 5;
    for (const auto& c : r.checks)
        w = std::max(w, c.name.size());
    std::ostringstream os;
    os << "# " << r.command << "  " << r.config.dump() << "\n";
    os << std::left << std::setw(static_cast<int>(w)) << "check" << "  " << std::setw(11) << "status" << "  summary\n";
    for (const auto& c : r.checks) {
        const char* status = !c.passed ? "FAIL" : c.discrepancy ? "DISCREPANCY" : "ok";
        os << std::left << std::setw(static_cast<int>(w)) << c.name << "  " << std::setw(11) << status << "  " << c.summary
           << "\n";
    }
    os << r.checks.size() << " checks, " << r.violations() << " violations, " << r.discrepancies() << " discrepancies\n";
    return os.str();
}

enum class Format { json, table };

inline Format parse_format(const std::string& s)
{
    if (s == "json")
        return Format::json;
    if (s == "table")
        return Format::table;
    throw ParseError("format", "expected json or table, got \"" + s + "\"");
}

inline std::string render(const Report& r, Format f)
{
    return f == Format::json ? to_json(r).dump(2) + "\n" : to_table(r);
}

/// Writes to `path`, or to `fallback` when the path is empty.
inline void emit_report(const Report& r, Format f, const std::string& path, std::ostream& fallback)
{
    const std::string text = render(r, f);
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open output file \"" + path + "\"");
    out << text;
    if (!out)
        throw std::runtime_error("failed writing output file \"" + path + "\"");
}

} // namespace blocklie
