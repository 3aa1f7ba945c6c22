#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lps/gfun.hpp"
#include "support/generators.hpp"

using namespace lps;
using lps::testing::bump;
using lps::testing::rng;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction cos_torus(int N) {
    return GridFunction::scalar(Domain::torus(N), [](Point x) { return std::cos(x[0]); });
}

double max_abs(const GridFunction& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

GridFunction trig_field(const Domain& d, const lps::testing::TrigPoly& p) {
    return GridFunction::scalar(d, [&](Point x) { return p(x[0]); });
}

GSpec sub_spec(double q = 2.0, GVariant v = GVariant::time) { return GSpec{subordinated(heat_torus()), q, v, TimeGrid{}, {}}; }

}  // namespace

TEST_CASE("g-function eigenline values") {
    const GridFunction c = cos_torus(256);
    const GridFunction g = gfunction(c, sub_spec());
    for (std::size_t i = 0; i < c.cells(); ++i) CHECK(std::abs(g(i, 0) - 0.5 * std::abs(c(i, 0))) <= 1e-4);

    GridFunction cs(Domain::torus(256), 2, 2.0);
    for (std::size_t i = 0; i < cs.cells(); ++i) {
        const double th = cs.domain().point(i)[0];
        cs(i, 0) = std::cos(th);
        cs(i, 1) = std::sin(th);
    }
    const GridFunction gv = gfunction(cs, sub_spec());
    for (double v : gv.values()) CHECK(std::abs(v - 0.5) <= 1e-4);

    // Space variant: |t d/dtheta e^{-t} cos| = t e^{-t} |sin|; full combines to t e^{-t}.
    const GridFunction gs = gfunction(c, sub_spec(2.0, GVariant::space));
    const GridFunction gf = gfunction(c, sub_spec(2.0, GVariant::full));
    for (std::size_t i = 0; i < c.cells(); ++i) {
        CHECK(std::abs(gs(i, 0) - 0.5 * std::abs(std::sin(c.domain().point(i)[0]))) <= 1e-4);
        CHECK(std::abs(gf(i, 0) - 0.5) <= 1e-4);
    }
}

TEST_CASE("constants have vanishing g-functions") {
    for (const Domain& d : {Domain::torus(64), Domain::gauss_line(128, 6.0)}) {
        GridFunction k(d, 3, 2.0);
        for (std::size_t c = 0; c < k.cells(); ++c)
            for (int j = 0; j < 3; ++j) k(c, j) = 1.5 - j;
        const ActionPtr a = d.is_torus() ? subordinated(heat_torus()) : subordinated(ou_action());
        CHECK(max_abs(gfunction(k, GSpec{a, 2.0, GVariant::time, TimeGrid{}, {}})) <= 1e-8);
    }
    const Domain l = Domain::line(128, 8.0);
    GridFunction zero(l, 1, 1.0);
    CHECK(max_abs(area_function(zero, AreaSpec{})) == 0.0);
    CHECK(max_abs(ou_gfunction(GridFunction::scalar(Domain::gauss_line(128, 6.0), [](Point) { return 2.0; }), 2.0,
                               GVariant::time)) <= 1e-8);
}

TEST_CASE("tail diagnostics and windows") {
    const GridFunction c = cos_torus(128);
    const GResult r = gfunction_report(c, sub_spec());
    CHECK(r.head == doctest::Approx(1e-3 * std::exp(-1e-3)).epsilon(1e-6));
    CHECK(r.tail < 1e-19);
    // A time window keeps only the part of the integral inside it.
    GSpec w = sub_spec();
    w.window = GWindow{1.0, kInf, kInf};
    const GridFunction g = gfunction(c, w);
    // int_1^inf t e^{-2t} dt = 3 e^{-2} / 4.
    const double expect = std::sqrt(0.75 * std::exp(-2.0));
    for (std::size_t i = 0; i < c.cells(); ++i) CHECK(std::abs(g(i, 0) - expect * std::abs(c(i, 0))) < 1e-4);
    w.window = GWindow{2.0, 1.0, kInf};
    CHECK_THROWS_AS(gfunction(c, w), InvalidArgument);
    CHECK_THROWS_AS(gfunction(GridFunction::scalar(Domain::line(32, 2.0), [](Point) { return 0.0; }), sub_spec()),
                    InvalidArgument);
}

TEST_CASE("radial torus g-functions") {
    const GridFunction c = cos_torus(256);
    const GridFunction gr = g_torus_radial(c, 2.0, RadialVariant::radial);
    const GridFunction gf = g_torus_radial(c, 2.0, RadialVariant::full);
    const GridFunction g3 = g_torus_radial(c, 3.0, RadialVariant::radial);
    for (std::size_t i = 0; i < c.cells(); ++i) {
        CHECK(std::abs(gr(i, 0) - std::sqrt(0.5) * std::abs(c(i, 0))) <= 1e-4);
        CHECK(std::abs(gf(i, 0) - std::sqrt(0.5)) <= 1e-4);
        CHECK(std::abs(g3(i, 0) - std::cbrt(1.0 / 3.0) * std::abs(c(i, 0))) <= 1e-4);
    }
    // Higher modes: |d/dr r^k| = k r^{k-1}; int_0^1 (1-r) k^2 r^{2k-2} dr = k^2 / ((2k-1) 2k).
    const int k = 9;
    const GridFunction ck = GridFunction::scalar(Domain::torus(256), [](Point x) { return std::cos(9 * x[0]); });
    const GridFunction gk = g_torus_radial(ck, 2.0, RadialVariant::radial);
    const double expect = std::sqrt(k * k / ((2.0 * k - 1) * 2.0 * k));
    for (std::size_t i = 0; i < ck.cells(); ++i) CHECK(std::abs(gk(i, 0) - expect * std::abs(ck(i, 0))) <= 1e-6);
    // r-window near one: int_{r0}^1 (1-r) dr = (1-r0)^2 / 2.
    const GridFunction gw = g_torus_radial(c, 2.0, RadialVariant::radial, RadialWindow{0.8, 1.0, kInf});
    CHECK(gw(0, 0) == doctest::Approx(std::sqrt(0.02)).epsilon(1e-6));
    CHECK_THROWS_AS(g_torus_radial(GridFunction::scalar(Domain::line(16, 1.0), [](Point) { return 0.0; }), 2.0,
                                   RadialVariant::radial),
                    InvalidArgument);
}

TEST_CASE("area function against a direct cone integral") {
    const Domain d = Domain::line(4096, 40.0);
    const GridFunction f = GridFunction::scalar(d, [](Point x) { return bump(x[0]); });
    const TimeGrid tg(1e-3, 10.0, 200);
    const AreaResult res = area_function_report(f, AreaSpec{2.0, 1.0, tg});
    // Cones reaching past |x| = L: the fraction t_k / L of the cells at node k.
    double frac = 0.0;
    for (double t : tg.nodes()) frac += t / 40.0;
    CHECK(res.clipped == doctest::Approx(frac / tg.size()).epsilon(1e-2));
    const std::size_t i0 = 2048;
    const double x = d.point(i0)[0];

    // Oracle: with u = t tan(theta) the Poisson derivatives become smooth:
    //   d_t P_t f(y) = -(1/(pi t)) int cos(2 theta) f(y - t tan theta) d theta,
    //   d_y P_t f(y) = -(1/(pi t)) int sin(2 theta) f(y - t tan theta) d theta.
    const int nt = 500, ny = 120, nth = 1500;
    const double a = std::log(1e-3), b = std::log(10.0), dl = (b - a) / nt;
    double total = 0.0;
    for (int it = 0; it < nt; ++it) {
        const double t = std::exp(a + (it + 0.5) * dl);
        double inner = 0.0;
        for (int iy = 0; iy < ny; ++iy) {
            const double y = x - t + (iy + 0.5) * 2 * t / ny;
            double pt = 0.0, py = 0.0;
            for (int k = 0; k < nth; ++k) {
                const double th = -kPi / 2 + (k + 0.5) * kPi / nth;
                const double v = bump(y - t * std::tan(th));
                pt += std::cos(2 * th) * v;
                py += std::sin(2 * th) * v;
            }
            pt *= -1.0 / (kPi * t) * kPi / nth;
            py *= -1.0 / (kPi * t) * kPi / nth;
            inner += (pt * pt + py * py) * 2 * t / ny;
        }
        total += inner * t * dl;  // t^2 |grad|^2 dy dt / t^2, dt = t dl
    }
    CHECK(std::abs(res.A(i0, 0) - std::sqrt(total)) <= 1e-3 * std::sqrt(total));
}

TEST_CASE("area function: translation equivariance and clipping") {
    const Domain d = Domain::line(512, 20.0);
    const TimeGrid tg(1e-3, 2.0, 100);
    const GridFunction f = GridFunction::scalar(d, [](Point x) { return bump(x[0], -1.0, 1.5); });
    const int s = 37;
    const double shift = s * d.spacing();
    const GridFunction fs = GridFunction::scalar(d, [&](Point x) { return bump(x[0] - shift, -1.0, 1.5); });
    const GridFunction A = area_function(f, AreaSpec{2.0, 1.0, tg}), As = area_function(fs, AreaSpec{2.0, 1.0, tg});
    for (int i = 0; i < 512; ++i) {
        const double x = d.axis_coord(i);
        if (std::abs(x) < 10.0) CHECK(std::abs(As(i + s, 0) - A(i, 0)) <= 1e-10 * max_abs(A));
    }
    CHECK(area_function_report(f, AreaSpec{2.0, 1.0, TimeGrid{}}).clipped > 0.0);
    CHECK_THROWS_AS(area_function(f, AreaSpec{2.0, 1.0, TimeGrid(50.0, 60.0, 20)}), InvalidArgument);
    CHECK_THROWS_AS(area_function(f, AreaSpec{2.0, 0.0, tg}), InvalidArgument);
}

TEST_CASE("area function on the plane: disc coverage") {
    const Domain p = Domain::plane(32, 4.0);
    GridFunction f = GridFunction::scalar(p, [](Point x) { return bump(std::hypot(x[0], x[1]), 0.0, 2.0); });
    const AreaResult r = area_function_report(f, AreaSpec{2.0, 1.0, TimeGrid(1e-3, 1.0, 40)});
    CHECK(r.clipped > 0.0);
    // Radial symmetry of the input carries over to the 8 grid symmetries.
    const auto at = [&](int i, int j) { return r.A(static_cast<std::size_t>(i) * 32 + j, 0); };
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            CHECK(at(i, j) == doctest::Approx(at(j, i)).epsilon(1e-10));
            CHECK(at(i, j) == doctest::Approx(at(31 - i, j)).epsilon(1e-10));
        }
}

TEST_CASE("OU g-functions") {
    const Domain g = Domain::gauss_line(1024, 7.0);
    const GridFunction x = GridFunction::scalar(g, [](Point p) { return p[0]; });
    const GridFunction gx = ou_gfunction(x, 2.0, GVariant::time);
    // The subordinated OU action has eigenvalue sqrt(2) on H_2: int 2 t^2 e^{-2 sqrt(2) t} dt / t = 1/4.
    const GridFunction h2 = GridFunction::scalar(g, [](Point p) { return 4 * p[0] * p[0] - 2; });
    const GridFunction gh = ou_gfunction(h2, 2.0, GVariant::time);
    const GridFunction gs = ou_gfunction(x, 2.0, GVariant::space);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        if (std::abs(x(i, 0)) > 3) continue;
        CHECK(std::abs(gx(i, 0) - 0.5 * std::abs(x(i, 0))) <= 1e-3);
        CHECK(std::abs(gh(i, 0) - 0.5 * std::abs(h2(i, 0))) <= 1e-3);
        CHECK(std::abs(gs(i, 0) - 0.5) <= 1e-3);
    }
    CHECK_THROWS_AS(ou_gfunction(GridFunction::scalar(Domain::line(16, 1.0), [](Point) { return 0.0; }), 2.0, GVariant::time),
                    InvalidArgument);
}

TEST_CASE("local/global cutoff") {
    CHECK(local_global_split({0, 0}, {0, 0}, 1).first == 1.0);
    CHECK(local_global_split({0, 0}, {10, 0}, 1).first == 0.0);
    auto g = rng(5);
    for (int n : {1, 2}) {
        for (int trial = 0; trial < 2000; ++trial) {
            Point x{lps::testing::uniform(g, -6, 6), n == 2 ? lps::testing::uniform(g, -6, 6) : 0.0};
            Point y{lps::testing::uniform(g, -6, 6), n == 2 ? lps::testing::uniform(g, -6, 6) : 0.0};
            const auto [phi, rest] = local_global_split(x, y, n);
            CHECK(phi + rest == 1.0);
            CHECK(phi >= 0.0);
            CHECK(phi <= 1.0);
            const double nx = std::hypot(x[0], x[1]), ny = std::hypot(y[0], y[1]);
            const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
            if (dist < n * (n + 3) / (1 + nx + ny)) CHECK(phi == 1.0);
            if (dist > 2 * n * (n + 3) / (1 + nx + ny)) CHECK(phi == 0.0);
            // |grad_y phi| <= C / |x - y| with C from the step profile.
            const double h = 1e-6;
            Point yp = y;
            yp[0] += h;
            const double dphi = std::abs(local_global_split(x, yp, n).first - phi) / h;
            if (dist > 1e-3) CHECK(dphi * dist <= 20.0);
        }
    }
}

TEST_CASE("pointwise domination by the Cesaro g-function") {
    // Eigenline: g^P = 1/2 and g^M^2 = int (e^{-t} - (1 - e^{-t})/t)^2 dt/t.
    const GridFunction c = cos_torus(128);
    const DominationReport rep = pointwise_domination_check(c, 2.0, heat_torus(), TimeGrid(1e-4, 200.0, 400));
    const double K = rep.K;
    CHECK(K == doctest::Approx(1.1418316262804377).epsilon(1e-10));
    CHECK(rep.constant == doctest::Approx(std::sqrt(2.0) * K).epsilon(1e-14));
    double gm2 = 0.0;
    const TimeGrid fine(1e-6, 1e4, 4000);
    for (int k = 0; k < fine.size(); ++k) {
        const double t = fine.nodes()[k], v = std::exp(-t) + std::expm1(-t) / t;
        gm2 += fine.weights()[k] * v * v;
    }
    const double expect = 0.5 / (rep.constant * std::sqrt(gm2));
    CHECK(rep.max_ratio == doctest::Approx(expect).epsilon(1e-3));
    CHECK(rep.max_ratio <= 1.0 + 1e-6);
    const DominationReport zero = pointwise_domination_check(GridFunction::scalar(Domain::torus(64), [](Point) { return 3.0; }),
                                                             2.0, heat_torus());
    CHECK(zero.max_ratio == 0.0);
}

TEST_CASE("g-function properties on random inputs") {
    auto g = rng(2024);
    const Domain d = Domain::torus(128);
    const GSpec spec = sub_spec();
    for (int trial = 0; trial < 6; ++trial) {
        const GridFunction f = trig_field(d, lps::testing::random_trig(8, g, false));
        const GridFunction h = trig_field(d, lps::testing::random_trig(8, g, false));
        const GridFunction gf = gfunction(f, spec), gh = gfunction(h, spec);
        const double c = lps::testing::uniform(g, -3, 3);
        const GridFunction gc = gfunction(c * f, spec);
        for (std::size_t i = 0; i < d.cells(); ++i) CHECK(std::abs(gc(i, 0) - std::abs(c) * gf(i, 0)) <= 1e-12 * std::abs(c) * max_abs(gf));
        const GridFunction gsum = gfunction(f + h, spec);
        for (std::size_t i = 0; i < d.cells(); ++i) CHECK(gsum(i, 0) <= gf(i, 0) + gh(i, 0) + 1e-10);
        // Torus shift equivariance.
        const int s = 1 + trial * 7;
        const GridFunction gshift = gfunction(torus_shift(f, s), spec), sg = torus_shift(gf, s);
        CHECK(max_abs_diff(gshift, sg) <= 1e-12 * max_abs(gf));
        // Embedding a scalar as one coordinate of l^r_M.
        const GridFunction ge = gfunction(embed_coordinate(f, trial % 3, 3, 1.0 + trial), spec);
        CHECK(max_abs_diff(ge, gf) <= 1e-12 * max_abs(gf));
        // Fixpoints, and only fixpoints, have vanishing g-functions.
        const GridFunction F = spec.action->fixpoint(f);
        CHECK(max_abs(gfunction(F, spec)) <= 1e-8);
        CHECK(max_abs(gf) > 1e-3);
        // Parseval: ||G_2 f||_2^2 = ||f - F f||_2^2 / 4.
        const double lhs = std::pow(lp_norm(gf, 2), 2), rhs = 0.25 * std::pow(lp_norm(f - F, 2), 2);
        CHECK(std::abs(lhs - rhs) <= 1e-3 * rhs);
    }
}

TEST_CASE("serial and parallel g-functions agree bitwise") {
    auto g = rng(9);
    const GridFunction f = trig_field(Domain::torus(128), lps::testing::random_trig(6, g, false));
    const GridFunction a = gfunction(f, sub_spec(3.0, GVariant::full), loops::Exec::serial);
    const GridFunction b = gfunction(f, sub_spec(3.0, GVariant::full), loops::Exec::parallel);
    CHECK(a.values() == b.values());
}
