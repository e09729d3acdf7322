#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace {
struct RunResult {
    int code = -1;
    std::string out;
};

std::string cli_path() {
    const char* p = std::getenv("DYADICA_CLI");
    REQUIRE_MESSAGE(p != nullptr, "DYADICA_CLI must point at the built binary");
    return p;
}

RunResult run(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    int st = pclose(pipe);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) { return "/tmp/dyadica_cli_test_" + name; }
}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run("--help").code == 0);
    CHECK(run("no-such-verb").code == 2);
    // seed is mandatory for randomized routines
    CHECK(run("square --kind haar --depth 4 --trials 2").code == 2);
}

TEST_CASE("malformed input files exit with the usage code") {
    std::ofstream(tmp("bad.json")) << "{\"not\": \"a measure\"}";
    auto r = run("corona --measure " + tmp("bad.json"));
    CHECK(r.code == 2);
}

TEST_CASE("measure generation is seed-deterministic") {
    auto a = run("measure gen --kind cascade --depth 4 --beta 0.3 --seed 7 -o " + tmp("m1.json"));
    auto b = run("measure gen --kind cascade --depth 4 --beta 0.3 --seed 7 -o " + tmp("m2.json"));
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    json ja = json::parse(slurp(tmp("m1.json")));
    json jb = json::parse(slurp(tmp("m2.json")));
    CHECK(ja.contains("content_hash"));
    CHECK(ja["content_hash"] == jb["content_hash"]);
    CHECK(ja["config"]["seed"] == 7);

    auto c = run("measure gen --kind cascade --depth 4 --beta 0.3 --seed 8 -o " + tmp("m3.json"));
    REQUIRE(c.code == 0);
    CHECK(json::parse(slurp(tmp("m3.json")))["content_hash"] != ja["content_hash"]);
}

TEST_CASE("corona check passes on a generated instance") {
    REQUIRE(run("measure gen --kind cascade --depth 5 --beta 0.3 --seed 3 -o " + tmp("mc.json")).code == 0);
    auto r = run("corona --measure " + tmp("mc.json") + " --gamma 2 --report " + tmp("corona.json"));
    CHECK(r.code == 0);
    json j = json::parse(slurp(tmp("corona.json")));
    CHECK(j["pass"] == true);
    CHECK(j.contains("config"));
    CHECK(j.contains("content_hash"));
}

TEST_CASE("form splittings close to machine precision") {
    auto r = run("forms --identity all --depth 4 --kappa 1 --rho 2 --tau 2 --eps 0.8 --gamma 1.5 --seed 5 --report " +
                 tmp("forms.json"));
    CHECK(r.code == 0);
    json j = json::parse(slurp(tmp("forms.json")));
    CHECK(j["pass"] == true);
    for (const char* key : {"size", "canonical", "farbelow", "ntv"}) {
        REQUIRE(j.contains(key));
        CHECK(double(j[key]["identity_residual"]) <= 1e-8);
    }
}

TEST_CASE("counterexample report carries config and hash comments") {
    auto r = run("counterexample --p 1.5 --alpha 1 --eps 0.1 --nmax 1000 --report " + tmp("cx.csv"));
    CHECK(r.code == 0);
    std::string body = slurp(tmp("cx.csv"));
    CHECK(body.rfind("# config ", 0) == 0);
    CHECK(body.find("# content_hash ") != std::string::npos);
    CHECK(body.find("local_ap") != std::string::npos);
}
