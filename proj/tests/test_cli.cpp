#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "ipdsaw/thermo.hpp"

using namespace ipdsaw;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "ipdsaw");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("ipdsaw_cli_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("constants report") {
    const auto r = run({"constants", "--beta", "2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["beta"] == 2.0);
    CHECK(j["phase"] == "collapsed");
    CHECK(j["c_beta"].get<double>() == doctest::Approx(2.16395).epsilon(1e-5));
    CHECK(j.contains("rho"));
    CHECK(j["collapsed"].contains("a_beta"));
    CHECK(j["crit_constants"].contains("c_tail"));
    const auto e = json::parse(run({"constants", "--beta", "0.8"}).out);
    CHECK(e["phase"] == "extended");
    CHECK(e["extended"]["f_tilde"].get<double>() > 0.0);
    // full precision output
    CHECK(json::parse(run({"constants"}).out)["beta_c"].get<double>() == ipdsaw::beta_c());
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::usage);
    CHECK(run({"bogus"}).code == cli::usage);
    CHECK(run({"constants", "--beta", "-1"}).code == cli::usage);
    CHECK(run({"sample", "warp"}).code == cli::usage);
    CHECK(run({"experiment", "nope"}).code == cli::usage);
    CHECK(run({"zpartition", "--L", "5000"}).code == cli::usage);
    const auto b = run({"sample", "perfect", "--L", "2000", "--budget", "1"});
    CHECK(b.code == cli::budget);
    CHECK(json::parse(b.err)["error"] == "budget");
    CHECK(run({"sample", "lifetime", "--beta", "3", "--L", "200", "--budget", "1"}).code == cli::budget);
    CHECK(run({"--help"}).code == cli::ok);
}

TEST_CASE("samples are reproducible") {
    const auto a = run({"sample", "perfect", "--L", "100", "--replicas", "50", "--seed", "7", "--threads", "1"});
    const auto b = run({"sample", "perfect", "--L", "100", "--replicas", "50", "--seed", "7", "--threads", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    std::istringstream lines(a.out);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        const auto j = json::parse(line);
        CHECK(j["L"] == 100);
        CHECK(j["trials"].get<int>() >= 1);
        CHECK(ipdsaw::path_from_json(line, 100).total_length() == 100);
        ++count;
    }
    CHECK(count == 50);
    CHECK(run({"sample", "perfect", "--L", "100", "--replicas", "50", "--seed", "8"}).out != a.out);
    for (const char* kind : {"exact", "lifetime", "tilted", "mixture"}) {
        const auto r = run({"sample", kind, "--beta", "2", "--L", "30", "--n", "40", "--replicas", "5"});
        CHECK(r.code == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
    }
}

TEST_CASE("output directory, config and cache") {
    const auto dir = scratch("out");
    const auto cache = scratch("cache");
    const auto r = run({"sample", "exact", "--beta", "1.5", "--L", "40", "--replicas", "20", "--out", dir.string(),
                        "--cache", cache.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "samples_exact.jsonl"));
    CHECK(fs::exists(dir / "sample_exact.config.json"));
    CHECK(fs::exists(dir / "sample_exact.meta.json"));
    CHECK(!fs::is_empty(cache));
    const auto first = slurp(dir / "samples_exact.jsonl");

    // rerun from the saved config into another directory; flags override the config
    const auto dir2 = scratch("out2");
    const auto again = run({"sample", "exact", "--config", (dir / "sample_exact.config.json").string(), "--out",
                            dir2.string()});
    REQUIRE(again.code == 0);
    CHECK(slurp(dir2 / "samples_exact.jsonl") == first);
    const auto cfg = json::parse(slurp(dir2 / "sample_exact.config.json"));
    CHECK(cfg["beta"] == 1.5);
    CHECK(cfg["out"] == dir2.string());
    CHECK_FALSE(cfg.contains("finished_unix"));

    const auto dir3 = scratch("out3");
    REQUIRE(run({"shape", "--beta", "2", "--q", "0.5", "--n", "100", "--out", dir3.string()}).code == 0);
    const auto shape = slurp(dir3 / "shape.csv");
    CHECK(shape.rfind("x,y,yerr\n", 0) == 0);
    CHECK(std::count(shape.begin(), shape.end(), '\n') == 102);
    CHECK(fs::exists(dir3 / "shape_envelope.csv"));
    for (const auto& d : {dir, dir2, dir3, cache}) fs::remove_all(d);
}

TEST_CASE("tables") {
    const auto z = run({"zpartition", "--beta", "2", "--L", "30"});
    REQUIRE(z.code == 0);
    CHECK(z.out.rfind("x,y,yerr\n1,", 0) == 0);
    CHECK(std::count(z.out.begin(), z.out.end(), '\n') == 31);
    const auto e = run({"extension", "--beta", "2", "--L", "10", "20"});
    REQUIRE(e.code == 0);
    CHECK(e.out.find("L,beta,N,prob,log_contrib") != std::string::npos);
    const auto x = run({"excursions", "--replicas", "100", "--seed", "3"});
    REQUIRE(x.code == 0);
    CHECK(x.out.rfind("k,ext,area,vtau\n1,", 0) == 0);
    CHECK(std::count(x.out.begin(), x.out.end(), '\n') == 101);
}

TEST_CASE("run config round trip") {
    cli::RunConfig c;
    c.command = "experiment";
    c.target = "wulff_shape";
    c.beta = 2.5;
    c.L = {10, 20};
    c.q = 0.3;
    c.n = 7;
    c.replicas = 9;
    c.seed = 11;
    c.threads = 2;
    c.out = "o";
    c.cache = "c";
    c.budget = 5;
    c.quick = true;
    const auto j = cli::to_json(c);
    CHECK(cli::to_json(cli::config_from_json(j)) == j);
}
