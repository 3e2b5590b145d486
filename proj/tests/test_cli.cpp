#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "cli_app.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = blocklie::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("blocklie_cli_" + std::to_string(std::random_device{}())))
    {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("bracket example")
{
    const auto r = run({"bracket", "--variant", "B", "--x", R"({"alpha":2,"level":0})", "--y", R"({"alpha":-2,"level":0})"});
    CHECK(r.code == 0);
    CHECK(r.out.find("-4*L_{0,0} + C") != std::string::npos);

    const auto j = run({"--format", "json", "bracket", "--x", R"({"alpha":1,"level":1})", "--y", R"({"alpha":1,"level":0})"});
    REQUIRE(j.code == 0);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["command"] == "bracket");
    CHECK(doc["checks"].size() == 1);
}

TEST_CASE("verma dims example")
{
    const auto r = run({"verma", "--n", "1", "--depth", "3", "dims"});
    CHECK(r.code == 0);
    CHECK(r.out.find("2, 5, 10") != std::string::npos);
    CHECK(run({"verma", "--n", "0", "--depth", "4", "dims"}).out.find("1, 2, 3, 5") != std::string::npos);
}

TEST_CASE("module irreducibility example")
{
    const auto r = run({"--format", "json", "module", "--family", "Aab", "--a", "0", "--b", "1", "--range", "-8:8", "irreducible"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    const auto& d = doc["checks"][0]["detail"];
    CHECK(d["bruteforce"] == false);
    CHECK(d["criterion"] == false);

    const auto irr = nlohmann::json::parse(
        run({"--format", "json", "module", "--a", "1/2", "--b", "1", "--range", "-6:6", "irreducible"}).out);
    CHECK(irr["checks"][0]["detail"]["bruteforce"] == true);
}

TEST_CASE("module subcommands run")
{
    for (const char* act : {"axioms", "grid", "extension", "spanning", "classify", "build"}) {
        INFO(act);
        CHECK(run({"module", "--a", "1/2", "--b", "2", "--range", "-5:5", "--grid-a", "0,1/2", act}).code == 0);
    }
    const auto iso = nlohmann::json::parse(run({"--format", "json", "module", "--a", "1/2", "--b", "1", "--target-b", "0",
                                                "--range", "-4:4", "intertwiner"})
                                               .out);
    CHECK(iso["checks"][0]["detail"]["found"] == true);
    CHECK(run({"module", "--family", "Ba", "--a", "1/2", "--range", "-4:4", "axioms"}).code == 0);
}

TEST_CASE("verma singular and window")
{
    const auto zero = nlohmann::json::parse(run({"--format", "json", "verma", "--n", "1", "--depth", "1", "singular"}).out);
    CHECK(zero["checks"][0]["detail"]["vectors"].size() == 2);
    const auto generic = run({"--format", "json", "verma", "--n", "1", "--depth", "2", "--lambda", "1/3,-2/5", "--c", "7", "singular"});
    CHECK(generic.code == 0);
    for (const auto& c : nlohmann::json::parse(generic.out)["checks"])
        CHECK(c["detail"]["vectors"].empty());
    CHECK(run({"verma", "--n", "1", "--depth", "2", "--lambda", "1,2", "window"}).code == 0);

    TempDir tmp;
    const auto w = tmp.write("w.json", R"({"lambda": ["1/2", "3"], "c": "1"})");
    CHECK(run({"verma", "--n", "1", "--depth", "1", "--weight", w.string(), "singular"}).code == 0);
}

TEST_CASE("malformed input names the field")
{
    auto bad = run({"bracket", "--x", R"({"alpha":"two","level":0})", "--y", R"({"alpha":1,"level":0})"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("x.alpha") != std::string::npos);

    bad = run({"bracket", "--x", "{not json", "--y", R"({"alpha":1,"level":0})"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("error: x") != std::string::npos);

    // level 2 is outside the level-1 quotient
    bad = run({"bracket", "--variant", "Bq(0,1)", "--x", R"({"alpha":1,"level":2})", "--y", R"({"alpha":1,"level":0})"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("x") != std::string::npos);

    bad = run({"verma", "--n", "1", "--lambda", "1,2,3", "singular"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("lambda") != std::string::npos);

    bad = run({"verma", "--n", "1", "--lambda", "1,x", "singular"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("lambda[1]") != std::string::npos);

    TempDir tmp;
    const auto w = tmp.write("w.json", R"({"lambda": ["1/2", 3]})");
    bad = run({"verma", "--weight", w.string(), "singular"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("weight.lambda[1]") != std::string::npos);

    const auto m = tmp.write("m.json", R"({"offset": "0", "range": [0, 1]})");
    bad = run({"classify", "--module", m.string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("module") != std::string::npos);

    CHECK(run({"classify", "--module", (tmp.path / "missing.json").string()}).code == 2);
    CHECK(run({"module", "--range", "a:b", "irreducible"}).code == 2);
    CHECK(run({"module", "--a", "1/0", "irreducible"}).code == 2);
    CHECK(run({"module", "frobnicate"}).code == 2);
    CHECK(run({"--format", "xml", "lemmas"}).code == 2);
    CHECK(run({"nosuch"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("config file with flag overrides")
{
    TempDir tmp;
    const auto cfg = tmp.write("cfg.json", R"({"format": "json", "verma": {"n": 0, "depth": 4}})");
    const auto from_cfg = nlohmann::json::parse(run({"--config", cfg.string(), "verma", "dims"}).out);
    CHECK(from_cfg["checks"][0]["summary"] == "1, 2, 3, 5");

    const auto flag_wins = nlohmann::json::parse(run({"--config", cfg.string(), "verma", "--depth", "2", "dims"}).out);
    CHECK(flag_wins["checks"][0]["summary"] == "1, 2");

    const auto table = run({"--config", cfg.string(), "--format", "table", "verma", "dims"});
    CHECK_THROWS(nlohmann::json::parse(table.out));

    const auto arrays = tmp.write("arr.json", R"({"format": "json", "module": {"grid-a": ["0", "1/2"], "grid-b": [1], "range": "-4:4"}})");
    const auto grid = nlohmann::json::parse(run({"--config", arrays.string(), "module", "grid"}).out);
    CHECK(grid["checks"].size() == 2);

    const auto unknown = tmp.write("bad.json", R"({"verma": {"colour": 3}})");
    const auto bad = run({"--config", unknown.string(), "verma", "dims"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("config.verma.colour") != std::string::npos);

    const auto badfmt = tmp.write("badfmt.json", R"({"format": "xml"})");
    CHECK(run({"--config", badfmt.string(), "lemmas"}).code == 2);
    CHECK(run({"--config", tmp.write("broken.json", "{").string(), "lemmas"}).code == 2);
}

TEST_CASE("strict mode and exit codes")
{
    const auto lax = run({"--format", "json", "lemmas"});
    CHECK(lax.code == 0);
    const auto doc = nlohmann::json::parse(lax.out);
    std::set<std::string> names;
    std::size_t discrepancies = 0;
    for (const auto& c : doc["checks"]) {
        names.insert(c["name"].get<std::string>());
        discrepancies += c["discrepancy"].get<bool>();
    }
    CHECK(names.size() == doc["checks"].size());
    CHECK(discrepancies == 1);
    CHECK(run({"--strict", "lemmas"}).code == 1);
    CHECK(run({"--strict", "verma", "dims"}).code == 0);
}

TEST_CASE("output files and determinism")
{
    TempDir tmp;
    const auto a = tmp.path / "a.json", b = tmp.path / "b.json";
    REQUIRE(run({"--format", "json", "--out", a.string(), "lemmas"}).code == 0);
    CHECK(run({"--format", "json", "--out", b.string(), "lemmas"}).code == 0);
    CHECK_FALSE(slurp(a).empty());
    CHECK(slurp(a) == slurp(b));

    const char* saved = std::getenv("BLOCKLIE_WORKERS");
    const std::string keep = saved ? saved : "";
    ::setenv("BLOCKLIE_WORKERS", "1", 1);
    const auto one = run({"--format", "json", "module", "--range", "-6:6", "grid"}).out;
    ::setenv("BLOCKLIE_WORKERS", "5", 1);
    const auto five = run({"--format", "json", "module", "--range", "-6:6", "grid"}).out;
    CHECK(one == five);
    CHECK(run({"--format", "json", "lemmas"}).out == slurp(a));
    ::setenv("BLOCKLIE_WORKERS", "zero", 1);
    CHECK(run({"module", "grid"}).code != 0);
    if (saved)
        ::setenv("BLOCKLIE_WORKERS", keep.c_str(), 1);
    else
        ::unsetenv("BLOCKLIE_WORKERS");

    const auto unwritable = (tmp.path / "no" / "such" / "dir" / "r.json").string();
    const auto r = run({"--out", unwritable, "verma", "dims"});
    CHECK(r.code != 0);
    CHECK(r.err.find("cannot open") != std::string::npos);
}

TEST_CASE("module build output feeds classify")
{
    TempDir tmp;
    const auto built = tmp.path / "m.json";
    REQUIRE(run({"--format", "json", "--out", built.string(), "module", "--a", "1/2", "--b", "1", "--range", "-4:4", "build"}).code == 0);
    const auto r = run({"--format", "json", "classify", "--module", built.string()});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["checks"][1]["summary"] == "intermediate-series");
}

TEST_CASE("empty report is ok")
{
    const blocklie::Report r{"empty", nlohmann::json::object(), {}};
    CHECK(r.ok(true));
    CHECK(nlohmann::json::parse(blocklie::render(r, blocklie::Format::json))["checks"].empty());
}
