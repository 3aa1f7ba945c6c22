#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lps/kernelcheck.hpp"
#include "support/generators.hpp"

using namespace lps;

namespace {

constexpr double kPi = std::numbers::pi;

const TimeGrid& fiber_grid() {
    static const TimeGrid g(std::ldexp(1.0, -16), std::ldexp(1.0, 16), 321);
    return g;
}

double variation(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("Hilbert and zero kernels") {
    const auto hilbert = OperatorKernel::scalar(1, [](const Point& x, const Point& y) { return 1.0 / (x[0] - y[0]); });
    const auto prof = cz_bound_profile(hilbert, {0.01, 0.3, 1.0, 17.0}, {Point{0.0, 0.0}, Point{2.5, 0.0}});
    for (const auto& r : prof.rows) {
        CHECK(r.size == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.gradient == doctest::Approx(1.0).epsilon(1e-7));
    }
    const auto zero = OperatorKernel::scalar(2, [](const Point&, const Point&) { return 0.0; });
    const auto z = cz_bound_profile(zero, {0.5, 2.0});
    CHECK(z.max_size == 0.0);
    CHECK(z.max_gradient == 0.0);
    CHECK_THROWS_AS(cz_bound_profile(hilbert, {0.0}), InvalidArgument);
}

TEST_CASE("fiber norm oracle on a diagonal multiplier") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A.diagonal() << 0.5, -2.0, 1.0, 1.9;
    CHECK(fiber_norm(A, std::nullopt) == doctest::Approx(2.0).epsilon(1e-2));
    Eigen::MatrixXd B(2, 2);
    B << 1, 2, 3, 4;
    CHECK(fiber_norm(B, std::nullopt) == doctest::Approx(5.4649857042).epsilon(1e-9));
}

TEST_CASE("Poisson fiber kernel: scale invariance and refinement") {
    for (int n : {1, 2}) {
        const auto K = OperatorKernel::poisson_fiber(n, 0, fiber_grid());
        const auto prof = cz_bound_profile(K, {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
        for (std::size_t k = 1; k < prof.rows.size(); ++k) {
            CHECK(prof.rows[k].size == doctest::Approx(prof.rows[0].size).epsilon(1e-6));
            CHECK(prof.rows[k].gradient == doctest::Approx(prof.rows[0].gradient).epsilon(1e-6));
        }
        CHECK(std::isfinite(prof.max_size));
        CHECK(std::isfinite(prof.max_gradient));

        const TimeGrid fine(fiber_grid().t_min(), fiber_grid().t_max(), 641);
        const auto K2 = OperatorKernel::poisson_fiber(n, 0, fine);
        const auto fine_prof = cz_bound_profile(K2, {0.125, 0.177, 0.25, 0.354, 0.5, 0.707, 1.0, 1.41, 2.0, 2.83, 4.0, 5.66, 8.0});
        CHECK(variation(prof.max_size, fine_prof.max_size) < 0.2);
        CHECK(variation(prof.max_gradient, fine_prof.max_gradient) < 0.2);
    }
    // On the line rho |Phi_t(rho)| = 2 s^2 / (pi (1 + s^2)^2) with s = t / rho, largest at s = 1.
    const auto K = OperatorKernel::poisson_fiber(1, 0, fiber_grid());
    CHECK(cz_bound_profile(K, {1.0}).max_size == doctest::Approx(1.0 / (2 * kPi)).epsilon(2e-2));
}

TEST_CASE("torus kernel decomposition") {
    for (double t : {0.01, 0.1, 0.3}) {
        CHECK(torus_kernel_model(t, t) == 0.0);
        CHECK(torus_kernel_model(t, 0.0) == doctest::Approx(2.0 / (t * t)).epsilon(1e-15));
        const double a = -std::expm1(-t);
        CHECK(torus_kernel(t, 0.0) == doctest::Approx(2.0 / (a * a)).epsilon(1e-14));
    }
    const auto v = torus_kernel_decompose(0.1, 0.05, 0.3);
    CHECK(v.residual == doctest::Approx(v.k - v.k0));
    CHECK_THROWS_AS(torus_kernel_decompose(0.5, 0.0, 0.3), InvalidArgument);
    CHECK_THROWS_AS(torus_kernel_decompose(0.1, 0.31, 0.3), InvalidArgument);
    CHECK_THROWS_AS(torus_kernel_decompose(0.0, 0.0, 0.3), InvalidArgument);

    const double coarse = torus_residual_bound(0.3, 200, 200), fine = torus_residual_bound(0.3, 400, 400);
    CHECK(std::isfinite(coarse));
    CHECK(variation(coarse, fine) < 0.2);
}

TEST_CASE("projection kernel k_st") {
    CHECK(projection_kernel_kst(1.0, 1.0, {0.0, 0.0}, 1) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-14));
    CHECK(std::abs(projection_kernel_kst(1.0, 1.0, {0.0, 0.0}, 1) - 1.0 / (4 * kPi)) <= 1e-12);
    for (double s : {0.5, 2.0})
        for (double t : {1e-2, 1.5}) {
            CHECK(projection_kernel_kst(s, t, {0.0, 0.0}, 1) == doctest::Approx(2 * s * t / (kPi * std::pow(s + t, 3))));
            for (int n : {1, 2}) {
                const Point x{0.7, -0.3};
                CHECK(projection_kernel_kst(s, t, x, n) == projection_kernel_kst(t, s, x, n));
            }
        }
    for (int n : {1, 2}) {
        const double a = kst_bound_ratio(n, 1e-3, 1e3, 5), b = kst_bound_ratio(n, 1e-3, 1e3, 10);
        CHECK(std::isfinite(a));
        CHECK(variation(a, b) < 0.2);
    }
    CHECK_THROWS_AS(projection_kernel_kst(0.0, 1.0, {0.0, 0.0}, 1), InvalidArgument);
}

TEST_CASE("BMO norm") {
    GridFunction c(Domain::line(64, 1.0), 2, 2.0);
    for (double& v : c.values()) v = 3.0;
    CHECK(bmo_norm(c) == 0.0);

    const auto chi = GridFunction::scalar(Domain::torus(256), [](Point x) { return x[0] < kPi ? 1.0 : 0.0; });
    CHECK(bmo_norm(chi) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bmo_norm(chi, 0) == doctest::Approx(0.5).epsilon(1e-15));

    double prev = 0.0;
    for (int N : {256, 512, 1024, 2048}) {
        const double b = bmo_norm(GridFunction::scalar(Domain::line(N, 1.0), [](Point x) { return std::log(std::abs(x[0])); }));
        CHECK(std::isfinite(b));
        if (prev > 0.0) CHECK(b < prev * 1.05);
        prev = b;
    }

    auto g = lps::testing::rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const Domain d = trial % 2 ? Domain::plane(32, 2.0) : Domain::line(128, 3.0);
        const auto f = lps::testing::random_field(d, 2, 1.0 + trial, g);
        GridFunction shifted = f;
        for (std::size_t cell = 0; cell < f.cells(); ++cell)
            for (int k = 0; k < 2; ++k) shifted(cell, k) += k ? -1.5 : 4.0;
        const double b = bmo_norm(f);
        CHECK(bmo_norm(shifted) == doctest::Approx(b).epsilon(1e-12));
        CHECK(bmo_norm(-2.5 * f) == doctest::Approx(2.5 * b).epsilon(1e-12));
        CHECK(b <= 2.0 * lp_norm(f, kInf));
    }
    CHECK_THROWS_AS(bmo_norm(GridFunction(Domain::line(24, 1.0), 1, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(bmo_norm(GridFunction(Domain::gauss_line(32, 1.0), 1, 1.0)), InvalidArgument);
}
