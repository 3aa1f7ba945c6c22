#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lps/loops.hpp"
#include "lps/martingale.hpp"
#include "support/generators.hpp"

using namespace lps;

namespace {

constexpr double kPi = std::numbers::pi;

double haar(double x) { return x < 0.5 ? 1.0 : -1.0; }

// Rademacher r_k: sign of sin(2^k pi x), constant on level-k cells.
double rademacher(int k, double x) { return (static_cast<long>(std::floor(x * std::ldexp(1.0, k))) % 2) ? -1.0 : 1.0; }

double max_abs_diff(const DyadicFunction& a, const DyadicFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

DyadicFunction constant(int depth, int M, double c) {
    DyadicFunction f(DyadicFiltration(depth), M, 2.0);
    for (double& v : f.values()) v = c;
    return f;
}

}  // namespace

TEST_CASE("conditional expectation examples") {
    const auto c = constant(6, 2, 1.75);
    CHECK(max_abs_diff(cond_expect(c, 3), c) == 0.0);

    const auto chi = DyadicFunction::scalar(8, [](double x) { return x < 0.5 ? 1.0 : 0.0; });
    const auto e0 = cond_expect(chi, 0);
    for (double v : e0.values()) CHECK(v == 0.5);

    const auto f = random_dyadic(10, 3, 2.0, 7, 0);
    const auto e2 = cond_expect(f, 2);
    CHECK(cond_expect(cond_expect(f, 5), 2).values() == e2.values());
    CHECK(cond_expect(cond_expect(f, 2), 5).values() == e2.values());
    CHECK(cond_expect(e2, 2).values() == e2.values());
    CHECK(cond_expect(f, 11).values() == f.values());
    CHECK_THROWS_AS(cond_expect(f, -1), InvalidArgument);
}

TEST_CASE("conditional expectations contract every L^p") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_dyadic(8, 2, 1.5, 11, trial);
        for (int n = 0; n <= 8; ++n)
            for (double p : {1.0, 2.0, kInf}) CHECK(lp_norm(cond_expect(f, n), p) <= lp_norm(f, p) * (1 + 1e-14));
    }
}

TEST_CASE("square function examples") {
    const auto s0 = square_function(constant(6, 1, 3.0), 2.0);
    for (double v : s0.values()) CHECK(v == 0.0);
    const auto h = DyadicFunction::scalar(7, haar);
    for (double q : {1.0, 2.0, 3.5}) {
        const auto sq = square_function(h, q);
        for (double v : sq.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    }

    const double a[4] = {0.3, -1.2, 2.0, 0.7};
    const auto rs = DyadicFunction::scalar(8, [&](double x) {
        double s = 0.0;
        for (int k = 1; k <= 4; ++k) s += a[k - 1] * rademacher(k, x);
        return s;
    });
    const double expect = std::sqrt(0.09 + 1.44 + 4.0 + 0.49);
    const auto srs = square_function(rs, 2.0);
    for (double v : srs.values()) CHECK(v == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("Cesaro means") {
    const auto c = constant(5, 1, 2.0);
    for (int n = 1; n <= 6; ++n) {
        const auto sg = cesaro_sigma(c, n), ds = delta_sigma(c, n);
        for (double v : sg.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-15));
        for (double v : ds.values()) CHECK(std::abs(v) < 1e-15);
    }
    const auto h = DyadicFunction::scalar(6, haar);
    for (int n = 1; n <= 12; ++n) {
        const auto ds = delta_sigma(h, n);
        for (std::size_t i = 0; i < h.samples(); ++i)
            CHECK(ds(i, 0) == doctest::Approx(h(i, 0) / (n * (n + 1.0))).epsilon(1e-13));
    }
    double series = 0.0;
    for (int n = 1; n <= 20; ++n) series += n / std::pow(n * (n + 1.0), 2);
    const auto cs = cesaro_square_function(h, 2.0, 20);
    for (double v : cs.values()) CHECK(v == doctest::Approx(std::sqrt(series)).epsilon(1e-12));
    CHECK(std::sqrt(series) == doctest::Approx(0.594937).epsilon(1e-6));
    CHECK_THROWS_AS(delta_sigma(h, 0), InvalidArgument);
}

TEST_CASE("product of Cesaro differences") {
    const auto h = DyadicFunction::scalar(5, haar);
    const auto p11 = delta_sigma_product(h, 1, 1);
    const auto p21 = delta_sigma_product(h, 2, 1);
    for (std::size_t i = 0; i < h.samples(); ++i) {
        CHECK(p11.direct(i, 0) == doctest::Approx(h(i, 0) / 4).epsilon(1e-14));
        CHECK(p11.formula(i, 0) == doctest::Approx(h(i, 0) / 4).epsilon(1e-14));
        CHECK(p21.direct(i, 0) == doctest::Approx(h(i, 0) / 12).epsilon(1e-14));
        CHECK(p21.formula(i, 0) == doctest::Approx(h(i, 0) / 12).epsilon(1e-14));
    }
    for (int trial = 0; trial < 3; ++trial) {
        const auto f = random_dyadic(6, 2, 2.0, 19, trial);
        double worst = 0.0;
        for (int m = 1; m <= 32; ++m)
            for (int n = 1; n <= 32; ++n) worst = std::max(worst, delta_sigma_product(f, m, n).discrepancy);
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("discrete Parseval on 1000 random martingales") {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto f = random_dyadic(10, 1, 2.0, 23, trial);
        double rhs = std::pow(lp_norm(cond_expect(f, 0), 2.0), 2);
        for (const auto& d : differences(f)) rhs += std::pow(lp_norm(d, 2.0), 2);
        const double lhs = std::pow(lp_norm(cond_expect(f, 10), 2.0), 2);
        worst = std::max(worst, std::abs(lhs - rhs) / lhs);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("martingale transforms") {
    const auto f = random_dyadic(7, 3, 3.0, 31, 0);
    const auto id = martingale_transform(f, MultiplyingSequence::identity(7, 3, 3.0));
    const DyadicFunction centred = f - cond_expect(f, 0);
    for (std::size_t k = 0; k < centred.values().size(); ++k) CHECK(std::abs(id.partial.back()[k] - centred.values()[k]) < 1e-13);

    for (double q : {1.0, 2.0, 2.5, 4.0}) {
        const auto Q = MultiplyingSequence::q_embedding(7, 3, 3.0, q);
        CHECK(Q.sup_norm() == 1.0);
        const auto T = martingale_transform(f, Q);
        const auto S = square_function(f, q);
        for (std::size_t i = 0; i < f.samples(); ++i) CHECK(T.maximal[i] == S(i, 0));
    }

    const auto g = random_dyadic(9, 1, 2.0, 37, 0);
    const auto sg = MultiplyingSequence::signs(9, 1, 2.0);
    CHECK(sg.sup_norm() == doctest::Approx(1.0).epsilon(1e-15));
    const auto T = martingale_transform(g, sg);
    const DyadicFunction TD(g.filtration(), 1, 2.0, T.partial.back());
    CHECK(lp_norm(TD, 2.0) == doctest::Approx(lp_norm(g - cond_expect(g, 0), 2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(martingale_transform(f, MultiplyingSequence::identity(7, 2, 3.0)), InvalidArgument);
    CHECK_THROWS_AS(martingale_transform(f, MultiplyingSequence::identity(3, 3, 3.0)), InvalidArgument);
}

TEST_CASE("operator norms of multiplying maps") {
    auto g = lps::testing::rng(41);
    Eigen::MatrixXd A(4, 3);
    for (long i = 0; i < A.size(); ++i) A.data()[i] = lps::testing::gauss(g);
    // Power iteration on A^T A as the l^2 oracle.
    Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
    for (int it = 0; it < 500; ++it) x = (A.transpose() * (A * x)).normalized();
    CHECK(operator_norm(A, MixedNorm::plain(3, 2.0), MixedNorm::plain(4, 2.0)) ==
          doctest::Approx((A * x).norm()).epsilon(1e-10));
    CHECK(operator_norm(A, MixedNorm::plain(3, 1.0), MixedNorm::plain(4, 1.0)) ==
          doctest::Approx(A.cwiseAbs().colwise().sum().maxCoeff()));
    // A sampled estimate is a lower bound of the l^2 norm by Riesz-Thorin between 1 and inf.
    const double n3 = operator_norm(A, MixedNorm::plain(3, 3.0), MixedNorm::plain(4, 3.0));
    const double n1 = A.cwiseAbs().colwise().sum().maxCoeff(), ninf = A.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(n3 > 0.0);
    CHECK(n3 <= std::pow(n1, 1.0 / 3) * std::pow(ninf, 2.0 / 3) * (1 + 1e-12));
}

TEST_CASE("discrete projection R") {
    const auto f = random_dyadic(6, 2, 2.0, 43, 0);
    const DyadicFunction zero(f.filtration(), 2, 2.0);
    std::vector<DyadicFunction> h{f};
    for (int n = 1; n < 5; ++n) h.push_back(zero);
    const auto d1 = differences(f)[0];
    const auto R1 = discrete_projection_R(h);
    for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(R1.Rh.values()[k] == doctest::Approx(0.5 * d1.values()[k]).epsilon(1e-13));

    std::vector<DyadicFunction> same(9, f);
    const auto R2 = discrete_projection_R(same);
    CHECK(max_abs_diff(R2.Rh, cesaro_sigma(f, 9) - cond_expect(f, 0)) < 1e-13);
    CHECK(R2.composite.size() == 9);
}

TEST_CASE("projection composite ratio over 10^4 random trials") {
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<DyadicFunction> h;
        for (int n = 0; n < 8; ++n) h.push_back(random_dyadic(6, 1, 2.0, 47, trial * 8 + n));
        const auto R = discrete_projection_R(h);
        worst = std::max(worst, weighted_lq_lp_norm(R.composite, 2.0, 2.0) / weighted_lq_lp_norm(h, 2.0, 2.0));
    }
    INFO("worst ratio " << worst);
    CHECK(worst <= 4.0);
}

TEST_CASE("projection multiplier norms") {
    CHECK(projection_multiplier_norm(1, 2.0) == doctest::Approx(2.0 - kPi * kPi / 6).epsilon(1e-9));
    // Brute-force series with a crude integral tail as the oracle.
    auto brute = [](int j, double q) {
        double s = 0.0;
        const int X = 2000000;
        for (int m = X - 1; m >= j; --m) s += 1.0 / (m * std::pow(m + 1.0, q));
        return std::pow(s + std::pow(X + 0.5, -q) / q, 1.0 / q);
    };
    for (auto [j, q] : {std::pair{1, 3.0}, {5, 1.5}, {40, 4.0}}) {
        const double qp = q / (q - 1);
        CHECK(projection_multiplier_norm(j, q) == doctest::Approx(j * j * brute(j, q) * brute(j, qp)).epsilon(1e-8));
    }
    for (double q : {1.25, 2.0, 3.0, 6.0}) CHECK(projection_multiplier_norm(7, q) == doctest::Approx(projection_multiplier_norm(7, q / (q - 1))).epsilon(1e-12));
    CHECK(projection_multiplier_norm(3, 1.0) == doctest::Approx(0.75));
    CHECK(projection_multiplier_norm(3, kInf) == doctest::Approx(0.75));

    const auto prof = projection_multiplier_profile(10000, 2.0);
    double mx = 0.0;
    for (double v : prof) {
        CHECK(std::isfinite(v));
        mx = std::max(mx, v);
    }
    // Large-j limit (1/sqrt(2))^2 = 1/2 for q = 2.
    CHECK(mx < 0.5);
    CHECK(prof.back() == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("Doob weak-type profile") {
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_dyadic(9, 2, 1.0 + trial % 4, 53, trial);
        for (const auto& row : doob_profile(f)) CHECK(row.lhs <= row.rhs + 1e-14);
    }
    const auto h = DyadicFunction::scalar(6, haar);
    const auto rows = doob_profile(h, {0.5});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].lhs == doctest::Approx(0.5));
    CHECK(rows[0].rhs == doctest::Approx(1.0));
}

TEST_CASE("trial runner is deterministic and thread-independent") {
    MartingaleTrialSpec spec;
    spec.depth = 6;
    spec.trials = 12;
    spec.M = 2;
    spec.r = 3.0;
    spec.q = 2.5;
    spec.p = 3.0;
    spec.projection_terms = 6;
    const auto a = martingale_trials(spec);
    const int before = loops::thread_count();
    loops::set_thread_count(1);
    const auto b = martingale_trials(spec);
    loops::set_thread_count(before);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == 12u * 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].trial == b[i].trial);
        CHECK(a[i].statistic == b[i].statistic);
        CHECK(a[i].value == b[i].value);
        if (a[i].statistic == "qq_max_minus_sq") CHECK(a[i].value == 0.0);
        if (a[i].statistic == "product_defect") CHECK(a[i].value <= 1e-12);
        if (a[i].statistic == "doob_margin") CHECK(a[i].value >= -1e-14);
    }
    spec.seed = 2;
    CHECK(martingale_trials(spec)[0].value != a[0].value);
}
