#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "lps/io.hpp"
#include "lps/synth.hpp"
#include "support/generators.hpp"

using namespace lps;

namespace {

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / ("lps_io_" + name)).string(); }

}  // namespace

TEST_CASE("GridFunction JSON round trip is bit-exact") {
    auto g = lps::testing::rng(3);
    const Domain domains[] = {Domain::torus(64), Domain::line(32, 3.7), Domain::plane(8, 2.0), Domain::gauss_line(16, 5.0),
                              Domain::gauss_plane(8, 4.0)};
    for (const Domain& d : domains)
        for (int M : {1, 3}) {
            GridFunction f = lps::testing::random_field(d, M, M == 1 ? 2.0 : kInf, g);
            f(0, 0) = 1e-310;
            f(1, 0) = -0.1;
            const std::string path = temp_path("rt.json");
            save_grid_function(path, f);
            const GridFunction back = load_grid_function(path);
            CHECK(back.domain().kind() == d.kind());
            CHECK(back.domain().N() == d.N());
            CHECK(back.domain().L() == d.L());
            CHECK(back.M() == M);
            CHECK(back.r() == f.r());
            CHECK(back.values() == f.values());
            std::filesystem::remove(path);
        }
}

TEST_CASE("malformed GridFunction files are rejected") {
    CHECK_THROWS_AS(grid_function_from_json(json::parse(R"({"domain":{"kind":"torus","N":4},"r":2,"values":[[1],[2]]})")),
                    InvalidArgument);
    CHECK_THROWS_AS(grid_function_from_json(json::parse(R"({"domain":{"kind":"disc","N":4},"r":2,"values":[]})")),
                    InvalidArgument);
    CHECK_THROWS_AS(grid_function_from_json(json::parse(R"({"r":2})")), InvalidArgument);
    const std::string path = temp_path("bad.json");
    write_atomic(path, "{not json");
    CHECK_THROWS_AS(load_grid_function(path), InvalidArgument);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_grid_function(temp_path("does_not_exist.json")), InvalidArgument);
}

TEST_CASE("atomic writes replace the target and leave no temp file") {
    const std::string path = temp_path("atomic.txt");
    write_atomic(path, "first");
    write_atomic(path, "second");
    CHECK(read_file(path) == "second");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_atomic("/nonexistent_dir/x.txt", "x"), InvalidArgument);
}

TEST_CASE("CSV export") {
    const GridFunction f = synth("cos", SynthParams{DomainKind::torus, 8});
    const std::string csv = to_csv(f);
    CHECK(csv.rfind("x1,c1\n0,1\n", 0) == 0);
    GridFunction p(Domain::plane(8, 1.0), 2, 2.0);
    p(0, 1) = 0.1;
    const std::string pc = to_csv(p);
    CHECK(pc.rfind("x1,x2,c1,c2\n", 0) == 0);
    CHECK(pc.find("\n-0.875,-0.875,0,0.10000000000000001\n") != std::string::npos);
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("synth examples") {
    const GridFunction c = synth("cos", SynthParams{DomainKind::torus, 8});
    for (int j = 0; j < 8; ++j) CHECK(c(j, 0) == std::cos(2 * std::numbers::pi * j / 8));

    SynthParams hp;
    hp.depth = 3;
    const GridFunction h = synth("haar", hp);
    REQUIRE(h.cells() == 8);
    for (int j = 0; j < 8; ++j) CHECK(h(j, 0) == (j < 4 ? 1.0 : -1.0));

    SynthParams lp;
    lp.M = 4;
    lp.r = 4.0;
    lp.N = 64;
    const GridFunction l = synth("lacunary", lp);
    CHECK(l.M() == 4);
    CHECK(l.r() == 4.0);
    for (std::size_t j = 0; j < l.cells(); ++j)
        for (int k = 1; k <= 4; ++k)
            CHECK(l(j, k - 1) == doctest::Approx(std::cos(std::ldexp(1.0, k) * l.domain().point(j)[0])).epsilon(1e-13));

    SynthParams dp;
    dp.kind = DomainKind::line;
    dp.N = 4096;
    dp.L = 2.0;
    for (double w : {0.5, 0.1}) {
        dp.width = w;
        const GridFunction d = synth("dirac-col", dp);
        double mass = 0.0;
        for (std::size_t j = 0; j < d.cells(); ++j) mass += d(j, 0) * d.domain().weight(j);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
    dp.kind = DomainKind::gauss_line;
    const GridFunction h2 = synth("hermite2", dp);
    CHECK(h2(0, 0) == doctest::Approx(4 * std::pow(h2.domain().point(0)[0], 2) - 2));

    CHECK_THROWS_AS(synth("nope", SynthParams{}), InvalidArgument);
    CHECK_THROWS_AS(synth("hermite2", SynthParams{}), InvalidArgument);
    CHECK_THROWS_AS(synth("bump", SynthParams{}), InvalidArgument);
    CHECK(synth_names().size() == 6);
}

TEST_CASE("norm estimate and martingale reports") {
    NormEstimate e;
    e.op = "gfun-torus";
    e.estimate = 0.25;
    e.seed = 9;
    e.trace = {{0, 0.1}, {4, 0.25}};
    const json j = to_json(e);
    for (const char* key : {"operator", "p", "q", "r", "M", "estimate", "seed", "trace"}) CHECK(j.contains(key));
    CHECK(j["trace"][1][0] == 4);
    CHECK(j["estimate"] == 0.25);

    MartingaleTrialSpec s;
    s.depth = 4;
    const std::string csv = martingale_csv(s, {{0, "parseval_defect", 1e-17}});
    CHECK(csv == "trial,depth,q,p,statistic,value\n0,4,2,2,parseval_defect,1.0000000000000001e-17\n");
}
