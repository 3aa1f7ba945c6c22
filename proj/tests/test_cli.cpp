#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "lps/io.hpp"

namespace {

namespace fs = std::filesystem;

const fs::path& workdir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "lps_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = "cd " + workdir().string() + " && " + LPSLAB_PATH + " " + args + " > last.log 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string last_log() { return lps::read_file((workdir() / "last.log").string()); }

nlohmann::json load(const std::string& name) { return nlohmann::json::parse(lps::read_file((workdir() / name).string())); }

}  // namespace

TEST_CASE("synth writes the named inputs") {
    REQUIRE(run("synth cos --domain torus --N 8 --out cos8.json") == 0);
    const auto c = load("cos8.json");
    for (int j = 0; j < 8; ++j) CHECK(c["values"][j][0].get<double>() == std::cos(2 * M_PI * j / 8));
    REQUIRE(run("synth haar --depth 3 --out haar.json") == 0);
    const auto h = load("haar.json");
    REQUIRE(h["values"].size() == 8);
    for (int j = 0; j < 8; ++j) CHECK(h["values"][j][0].get<double>() == (j < 4 ? 1.0 : -1.0));
    REQUIRE(run("synth lacunary --M 4 --r 4 --N 64 --out lac.json") == 0);
    CHECK(load("lac.json")["values"][0].size() == 4);
    CHECK(run("synth nope --out x.json") == 2);
}

TEST_CASE("gfun of cos on the torus") {
    REQUIRE(run("synth cos --domain torus --N 1024 --out cos.json") == 0);
    REQUIRE(run("gfun --domain torus --N 1024 --q 2 --variant time --input cos.json --out g.json") == 0);
    const auto g = load("g.json"), c = load("cos.json");
    double err = 0.0;
    for (std::size_t j = 0; j < 1024; ++j)
        err = std::max(err, std::abs(g["values"][j][0].get<double>() - 0.5 * std::abs(c["values"][j][0].get<double>())));
    CHECK(err <= 1e-4);
    CHECK(run("gfun --domain line --input cos.json") == 2);
}

TEST_CASE("norm-estimate reruns are byte-identical") {
    REQUIRE(run("norm-estimate --op gfun-torus --p 2 --q 2 --seed 7 --budget 200 --out a.json") == 0);
    REQUIRE(run("norm-estimate --op gfun-torus --p 2 --q 2 --seed 7 --budget 200 --out b.json") == 0);
    CHECK(lps::read_file((workdir() / "a.json").string()) == lps::read_file((workdir() / "b.json").string()));
    const auto a = load("a.json");
    for (const char* key : {"operator", "p", "q", "r", "M", "estimate", "seed", "trace", "config"}) CHECK(a.contains(key));
    CHECK(a["estimate"].get<double>() <= 0.5001);
}

TEST_CASE("config files and flag precedence") {
    lps::write_atomic((workdir() / "run.cfg").string(), "q = 3\nseed = 7\nbudget = 20\nrestarts = 1\n");
    REQUIRE(run("--config run.cfg norm-estimate --q 2 --out c.json") == 0);
    const auto j = load("c.json");
    CHECK(j["q"] == 2.0);
    CHECK(j["seed"] == 7);
    CHECK(j["config"]["budget"] == 20);
}

TEST_CASE("exit codes") {
    CHECK(run("") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(last_log().find("Usage") != std::string::npos);
    CHECK(run("gfun") == 2);
    CHECK(run("norm-estimate --p 0.5") == 2);
    CHECK(run("norm-estimate --budget abc") == 2);
    CHECK(run("verify --suite 99") == 2);
    CHECK(run("verify --suite 3,4") == 0);
    CHECK(last_log().find("PASS   3") != std::string::npos);
    CHECK(run("verify --suite 3 --tol 1e-30") == 1);
    CHECK(last_log().find("FAIL   3") != std::string::npos);
}

TEST_CASE("report commands") {
    CHECK(run("martingale --trials 3 --depth 5 --out m.csv") == 0);
    CHECK(lps::read_file((workdir() / "m.csv").string()).rfind("trial,depth,q,p,statistic,value\n", 0) == 0);
    CHECK(run("kernel-profile --n 2 --radii 0.5,1,2 --out k.csv") == 0);
    CHECK(lps::read_file((workdir() / "k.csv").string()).rfind("scale,size-bound,gradient-bound\n0.5,", 0) == 0);
    CHECK(run("duality-check --N 512 --out d.json") == 0);
    CHECK(load("d.json")["relative_error"].get<double>() < 1e-3);
    CHECK(run("equiv-check --out e.json") == 0);
    CHECK(load("e.json")["ratio"].get<double>() > 0.1);
    CHECK(run("weak-type --out w.json") == 0);
    CHECK(load("w.json")["value"].get<double>() > 0.0);
    CHECK(run("synth bump --N 128 --L 4 --out bump.json") == 0);
    CHECK(run("area --input bump.json --out area.json") == 0);
    CHECK(run("projection-check --input bump.json") == 0);
    CHECK(run("synth hermite2 --N 256 --L 7 --out h2.json") == 0);
    CHECK(run("ou-gfun --input h2.json --out oug.csv") == 0);
    CHECK(run("cotype-sweep --r 4 --Ms 4,8 --budget 2 --restarts 1 --out cs.json") == 0);
    CHECK(load("cs.json")["rows"].size() == 2);
}
