#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lps/error.hpp"
#include "lps/quadrature.hpp"

using namespace lps;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const QuadratureRule q = gauss_legendre(10, 0.0, 2.0);
    for (int k = 0; k <= 19; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
        CHECK(s == doctest::Approx(std::pow(2.0, k + 1) / (k + 1)).epsilon(1e-13));
    }
}

TEST_CASE("generalized Gauss-Laguerre moments") {
    const double alpha = -0.5;
    const QuadratureRule q = gauss_laguerre(20, alpha);
    for (int k = 0; k <= 30; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
        CHECK(s == doctest::Approx(std::tgamma(k + alpha + 1)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(gauss_laguerre(8, -1.0), InvalidArgument);
}

TEST_CASE("composite rule") {
    const QuadratureRule q = composite_gauss_legendre(0.0, std::numbers::pi, 7, 6);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::sin(q.nodes[i]);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("TimeGrid invariants") {
    const TimeGrid g;
    CHECK(g.size() == 200);
    double s = 0.0;
    for (double w : g.weights()) s += w;
    CHECK(std::abs(s - std::log(50.0 / 1e-3)) < 1e-12);
    CHECK(g.nodes().front() == 1e-3);
    CHECK(g.nodes().back() == 50.0);
    // int_0^inf t^2 e^{-2t} dt / t = 1/4 up to truncation.
    double m = 0.0;
    for (int k = 0; k < g.size(); ++k) m += g.weights()[k] * g.nodes()[k] * g.nodes()[k] * std::exp(-2 * g.nodes()[k]);
    CHECK(std::abs(m - 0.25) < 1e-6);
    CHECK_THROWS_AS(TimeGrid(1.0, 0.5, 100), InvalidArgument);
    CHECK_THROWS_AS(TimeGrid(1e-3, 50, 15), InvalidArgument);
}

TEST_CASE("log-trapezoid subordination reproduces exp(-sqrt(lambda) t)") {
    const SubordinationRule rule = SubordinationRule::log_trapezoid();
    double worst = 0.0, worst_d = 0.0;
    for (double t : {1e-3, 1e-2, 0.1, 0.25, 1.0, 4.0, 10.0, 50.0}) {
        double mass = 0.0;
        for (double w : rule.weights(t)) mass += w;
        CHECK(std::abs(mass - 1.0) < 1e-13);
        for (double lam : {1e-2, 1.0, 3.0, 100.0, 1e4, 1e6}) {
            const double s = std::sqrt(lam);
            const double v = rule.apply([lam](double u) { return std::exp(-lam * u); }, t);
            const double d = rule.apply_derivative([lam](double u) { return std::exp(-lam * u); }, t);
            worst = std::max(worst, std::abs(v - std::exp(-s * t)));
            worst_d = std::max(worst_d, std::abs(d + s * std::exp(-s * t)) / std::max(1.0, s));
        }
    }
    CHECK(worst < 1e-12);
    CHECK(worst_d < 1e-10);
}

TEST_CASE("Gauss-Laguerre subordination is exact at the extremes and coarse in between") {
    const SubordinationRule gl = SubordinationRule::gauss_laguerre(64);
    double s = 0.0;
    for (double w : gl.laguerre_weights()) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    const double v = gl.apply([](double u) { return std::exp(-u); }, 0.25);
    CHECK(std::abs(v - std::exp(-0.25)) > 1e-3);
    CHECK(std::abs(gl.apply([](double u) { return std::exp(-u); }, 1e-4) - std::exp(-1e-4)) < 1e-3);
}

TEST_CASE("subordinator density and the moment K") {
    // phi integrates to one and phi' changes sign at s = 1/6.
    const double phi6 = subordinator_density(1.0 / 6.0);
    CHECK(std::abs(subordinator_density_derivative(1.0 / 6.0)) < 1e-14);
    CHECK(subordinator_density_derivative(0.1) > 0);
    CHECK(subordinator_density_derivative(0.2) < 0);
    // Closed form: K = 1 + 2 (phi(1/6)/6 - erfc(sqrt(6)/2)).
    const double oracle = 1.0 + 2.0 * (phi6 / 6.0 - std::erfc(std::sqrt(6.0) / 2.0));
    const double K = subordinator_moment_K();
    CHECK(std::abs(K - oracle) < 1e-10);
    CHECK(std::abs(subordinator_moment_K(80) - K) < 1e-6);
}

TEST_CASE("rule names") {
    CHECK(subordination_kind_from_string("log-trapezoid") == SubordinationKind::log_trapezoid);
    CHECK(to_string(SubordinationKind::gauss_laguerre) == "gauss-laguerre");
    CHECK_THROWS_AS(subordination_kind_from_string("simpson"), InvalidArgument);
}
