#include "lps/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "lps/gfun.hpp"
#include "lps/kernelcheck.hpp"
#include "lps/martingale.hpp"
#include "lps/normlab.hpp"
#include "lps/rng.hpp"

namespace lps {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double gauss(std::mt19937_64& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }
double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

double variation(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

GridFunction random_trig(const Domain& d, int degree, std::mt19937_64& g, bool mean_zero = false) {
    std::vector<double> a(degree + 1), b(degree + 1);
    for (int k = 0; k <= degree; ++k) {
        a[k] = gauss(g);
        b[k] = k == 0 ? 0.0 : gauss(g);
    }
    if (mean_zero) a[0] = 0.0;
    GridFunction f(d, 1, 2.0);
    for (std::size_t c = 0; c < d.cells(); ++c) {
        double s = 0.0;
        for (int k = 0; k <= degree; ++k) {
            const double th = 2.0 * kPi * static_cast<double>((static_cast<long>(k) * static_cast<long>(c)) % d.N()) / d.N();
            s += a[k] * std::cos(th) + b[k] * std::sin(th);
        }
        f(c, 0) = s;
    }
    return f;
}

double bump(double x, double c = 0.0, double w = 1.0) {
    const double y = (x - c) / w;
    return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0;
}

CriterionResult parseval(double tol, std::uint64_t seed) {
    const Domain d = Domain::torus(2048);
    const TimeGrid grid(1e-5, 50.0, 200);
    auto g = stream_rng(seed, 1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int degree = 1 + static_cast<int>(g() % 16);
        const GridFunction f = random_trig(d, degree, g);
        worst = std::max(worst, duality_pairing_check(f, f, grid).relative_error);
    }
    const double lim = 1e-3 * tol;
    return {1, "", worst <= lim, "max rel err " + fmt("%.3e", worst) + " <= " + fmt("%.0e", lim)};
}

CriterionResult eigenline(double tol, std::uint64_t) {
    const GridFunction c = GridFunction::scalar(Domain::torus(1024), [](Point x) { return std::cos(x[0]); });
    const GridFunction g = gfunction(c, GSpec{subordinated(heat_torus()), 2.0, GVariant::time, TimeGrid{}, {}});
    const GridFunction gr = g_torus_radial(c, 2.0, RadialVariant::radial);
    const GridFunction gf = g_torus_radial(c, 2.0, RadialVariant::full);
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0;
    for (std::size_t i = 0; i < c.cells(); ++i) {
        const double a = std::abs(c(i, 0));
        e1 = std::max(e1, std::abs(g(i, 0) - 0.5 * a));
        e2 = std::max(e2, std::abs(gr(i, 0) - a / std::sqrt(2.0)));
        e3 = std::max(e3, std::abs(gf(i, 0) - 1.0 / std::sqrt(2.0)));
    }
    const Domain gd = Domain::gauss_line(1024, 7.0);
    const GridFunction x = GridFunction::scalar(gd, [](Point p) { return p[0]; });
    const GridFunction gx = ou_gfunction(x, 2.0, GVariant::time);
    for (std::size_t i = 0; i < gd.cells(); ++i)
        if (std::abs(x(i, 0)) <= 3.0) e4 = std::max(e4, std::abs(gx(i, 0) - 0.5 * std::abs(x(i, 0))));
    const bool pass = e1 <= 1e-4 * tol && e2 <= 1e-4 * tol && e3 <= 1e-4 * tol && e4 <= 1e-3 * tol;
    return {2, "", pass,
            "time " + fmt("%.2e", e1) + ", radial " + fmt("%.2e", e2) + ", full " + fmt("%.2e", e3) + " (<= 1e-4); OU " +
                fmt("%.2e", e4) + " (<= 1e-3)"};
}

CriterionResult subordination(double tol, std::uint64_t) {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double t = 0.1 * std::pow(100.0, i / 4.0);
        for (int j = 0; j < 5; ++j) {
            const double x = -10.0 + 5.0 * j;
            const double closed = poisson_kernel_euclid(t, {x, 0.0}, 1);
            worst = std::max(worst, std::abs(subordinated_heat_kernel(t, {x, 0.0}, 1) - closed) / closed);
        }
    }
    const double lim = 1e-4 * tol;
    return {3, "", worst <= lim, "max rel err " + fmt("%.3e", worst) + " over 25 (t, x) <= " + fmt("%.0e", lim)};
}

CriterionResult cesaro_product(double tol, std::uint64_t seed) {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const DyadicFunction f = random_dyadic(6, 1, 2.0, seed, 400 + trial);
        for (int m = 1; m <= 32; ++m)
            for (int n = 1; n <= 32; ++n) worst = std::max(worst, delta_sigma_product(f, m, n).discrepancy);
    }
    const double lim = 1e-12 * tol;
    return {4, "", worst <= lim, "max discrepancy " + fmt("%.3e", worst) + " <= " + fmt("%.0e", lim)};
}

CriterionResult martingale_parseval(double tol, std::uint64_t seed) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const DyadicFunction f = random_dyadic(10, 1, 2.0, seed, 2000 + trial);
        double rhs = std::pow(lp_norm(cond_expect(f, 0), 2.0), 2);
        for (const auto& d : differences(f)) rhs += std::pow(lp_norm(d, 2.0), 2);
        const double lhs = std::pow(lp_norm(cond_expect(f, 10), 2.0), 2);
        worst = std::max(worst, std::abs(lhs - rhs) / lhs);
    }
    std::size_t mismatches = 0;
    for (double q : {1.0, 2.0, 3.0, 4.0}) {
        const DyadicFunction f = random_dyadic(8, 3, 3.0, seed, 5000 + static_cast<int>(q));
        const TransformResult T = martingale_transform(f, MultiplyingSequence::q_embedding(8, 3, 3.0, q));
        const DyadicFunction S = square_function(f, q);
        for (std::size_t i = 0; i < f.samples(); ++i) mismatches += T.maximal[i] != S(i, 0);
    }
    const double lim = 1e-12 * tol;
    return {5, "", worst <= lim && mismatches == 0,
            "Parseval max rel err " + fmt("%.3e", worst) + " <= " + fmt("%.0e", lim) + "; (Q_q f)* != S_q f at " +
                std::to_string(mismatches) + " points"};
}

CriterionResult cotype(double tol, std::uint64_t seed) {
    CotypeSpec s;
    s.budget = 50;
    s.restarts = 2;
    s.seed = seed;
    s.r = 2.0;
    s.M_list = {4, 8, 16};
    const auto flat = cotype_sweep(s);
    double lo = kInf, hi = 0.0;
    for (const auto& row : flat) {
        lo = std::min(lo, row.estimate.estimate);
        hi = std::max(hi, row.estimate.estimate);
    }
    const double spread = hi / lo - 1.0;
    s.r = 4.0;
    s.M_list = {8, 16, 32};
    const auto grow = cotype_sweep(s);
    const double threshold = 1.0704;
    const double g1 = grow[1].growth, g2 = grow[2].growth;
    const bool pass = spread < 0.1 * tol && g1 >= threshold && g2 >= threshold;
    return {6, "", pass,
            "r=2 spread " + fmt("%.2f%%", 100 * spread) + " < 10%; r=4 growth " + fmt("%.4f", g1) + ", " + fmt("%.4f", g2) +
                " >= " + fmt("%.4f", threshold) + " (lacunary oracle)"};
}

CriterionResult equivalence(double tol, std::uint64_t seed) {
    const Domain d = Domain::line(512, 8.0);
    auto g = stream_rng(seed, 7);
    double rlo = kInf, rhi = 0.0, err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        double a[3], c[3], w[3];
        for (int i = 0; i < 3; ++i) {
            a[i] = gauss(g);
            c[i] = uniform(g, -1.5, 1.5);
            w[i] = uniform(g, 0.0, 3.0);
        }
        const GridFunction f = GridFunction::scalar(d, [&](Point x) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i) s += a[i] * std::exp(-0.5 * (x[0] - c[i]) * (x[0] - c[i])) * std::cos(w[i] * x[0]);
            return s;
        });
        for (double q : {2.0, 3.0, 4.0}) {
            const EquivalenceResult r = time_space_equivalence_check(f, q, 2.0);
            rlo = std::min(rlo, r.ratio);
            rhi = std::max(rhi, r.ratio);
            err = std::max(err, r.identity_error);
        }
    }
    const double lim = 1e-5 * tol;
    return {7, "", rlo >= 0.1 && rhi <= 10.0 && err <= lim,
            "ratio in [" + fmt("%.4f", rlo) + ", " + fmt("%.4f", rhi) + "] within [0.1, 10]; identity err " + fmt("%.2e", err) +
                " <= " + fmt("%.0e", lim)};
}

CriterionResult kernels(double tol, std::uint64_t) {
    const TimeGrid coarse(std::ldexp(1.0, -16), std::ldexp(1.0, 16), 321), fine(coarse.t_min(), coarse.t_max(), 641);
    const std::vector<double> radii{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    const std::vector<double> radii_fine{0.125, 0.177, 0.25, 0.354, 0.5, 0.707, 1.0, 1.41, 2.0, 2.83, 4.0, 5.66, 8.0};
    double worst = 0.0;
    bool finite = true;
    for (int n : {1, 2}) {
        const CzProfile a = cz_bound_profile(OperatorKernel::poisson_fiber(n, 0, coarse), radii);
        const CzProfile b = cz_bound_profile(OperatorKernel::poisson_fiber(n, 0, fine), radii_fine);
        finite = finite && std::isfinite(a.max_size) && std::isfinite(a.max_gradient);
        worst = std::max({worst, variation(a.max_size, b.max_size), variation(a.max_gradient, b.max_gradient)});
        const double ka = kst_bound_ratio(n, 1e-3, 1e3, 5), kb = kst_bound_ratio(n, 1e-3, 1e3, 10);
        finite = finite && std::isfinite(ka);
        worst = std::max(worst, variation(ka, kb));
    }
    const double k0 = projection_kernel_kst(1.0, 1.0, {0.0, 0.0}, 1), k0err = std::abs(k0 - 1.0 / (4.0 * kPi));
    const bool pass = finite && worst < 0.2 && k0err <= 1e-12 * tol;
    return {8, "", pass,
            "max refinement change " + fmt("%.2e", worst) + " < 0.2; |k_11(0) - 1/(4 pi)| = " + fmt("%.1e", k0err)};
}

CriterionResult domination(double tol, std::uint64_t seed) {
    const Domain d = Domain::torus(128);
    const TimeGrid grid(1e-4, 200.0, 400);
    auto g = stream_rng(seed, 9);
    double worst = 0.0;
    for (double q : {2.0, 3.0})
        for (int trial = 0; trial < 20; ++trial) {
            const GridFunction f = random_trig(d, 1 + static_cast<int>(g() % 12), g);
            worst = std::max(worst, pointwise_domination_check(f, q, heat_torus(), grid).max_ratio);
        }
    const double K1 = subordinator_moment_K(40, 16), K2 = subordinator_moment_K(80, 16);
    const double kchange = std::abs(K1 - K2);
    const bool pass = worst <= 1.0 + 1e-6 * tol && kchange <= 1e-6 * tol;
    return {9, "", pass,
            "max g^P / (C g^M) " + fmt("%.6f", worst) + " <= 1 + 1e-6; K = " + fmt("%.10f", K1) + ", refinement change " +
                fmt("%.1e", kchange)};
}

CriterionResult operator_norm(double, std::uint64_t seed) {
    SearchSpec s;
    s.seed = seed;
    const NormEstimate e = extremal_search(OpSpec{"gfun-torus"}, s);
    return {10, "", e.estimate >= 0.45 && e.estimate <= 0.5001, "estimate " + fmt("%.6f", e.estimate) + " in [0.45, 0.5001]"};
}

CriterionResult weak_type(double tol, std::uint64_t) {
    const Domain d = Domain::line(1024, 16.0);
    const OpSpec op{"gfun-euclid"};
    const GridFunction f = GridFunction::scalar(d, [](Point x) { return bump(x[0]) + 0.3 * bump(x[0], 2.0, 0.5); });
    const double base = weak_type_profile(op, f).value;
    bool exact = base > 0.0;
    for (double c : {0.25, 2.0, 8.0}) exact = exact && weak_type_profile(op, c * f).value == base;
    double rel = 0.0;
    for (double c : {0.3, 1.7, 11.0}) rel = std::max(rel, std::abs(weak_type_profile(op, c * f).value - base) / base);
    double bound = 0.0;
    for (double w : {1.0, 0.5, 0.25}) {
        const GridFunction fw = GridFunction::scalar(d, [w](Point x) { return bump(x[0], 0.0, w) / w; });
        bound = std::max(bound, weak_type_profile(op, fw).value);
    }
    const double lim = 1e-12 * tol;
    return {11, "", exact && rel <= lim && std::isfinite(bound),
            std::string("powers of two ") + (exact ? "bitwise" : "NOT bitwise") + ", other scalings " + fmt("%.1e", rel) +
                " <= " + fmt("%.0e", lim) + "; bump family bound " + fmt("%.4f", bound)};
}

using Runner = CriterionResult (*)(double, std::uint64_t);

struct Entry {
    const char* name;
    Runner run;
};

const Entry kCriteria[] = {
    {"Parseval pairing on the torus", parseval},
    {"eigenline g-function values", eigenline},
    {"subordinated heat kernel vs Poisson", subordination},
    {"Cesaro difference products", cesaro_product},
    {"martingale Parseval and Q_q = S_q", martingale_parseval},
    {"cotype sweep", cotype},
    {"time-space equivalence", equivalence},
    {"kernel bounds under refinement", kernels},
    {"pointwise domination", domination},
    {"operator-norm exactness", operator_norm},
    {"weak-type scaling", weak_type},
};

}  // namespace

int acceptance_count() { return static_cast<int>(std::size(kCriteria)); }

std::string acceptance_name(int id) {
    require(id >= 1 && id <= acceptance_count(), "no acceptance criterion " + std::to_string(id));
    return kCriteria[id - 1].name;
}

std::vector<int> acceptance_suite(const std::string& suite) {
    std::vector<int> ids;
    if (suite == "core") {
        for (int i = 1; i <= acceptance_count(); ++i) ids.push_back(i);
        return ids;
    }
    std::stringstream ss(suite);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == item.size() && !item.empty(), "unknown suite '" + suite + "' (use core or a list of ids)");
        require(id >= 1 && id <= acceptance_count(), "no acceptance criterion " + item);
        ids.push_back(id);
    }
    require(!ids.empty(), "empty suite");
    return ids;
}

double tolerance_factor(const std::string& tol) {
    if (tol == "default") return 1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tol, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == tol.size() && v > 0.0 && std::isfinite(v), "tolerance must be 'default' or a positive factor");
    return v;
}

CriterionResult run_criterion(int id, double tol_factor, std::uint64_t seed) {
    const std::string name = acceptance_name(id);
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = kCriteria[id - 1].run(tol_factor, seed);
    } catch (const std::exception& e) {
        r = {id, "", false, std::string("error: ") + e.what()};
    }
    r.id = id;
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options) {
    const double tol = tolerance_factor(options.tol);
    std::vector<CriterionResult> out;
    for (int id : acceptance_suite(options.suite)) out.push_back(run_criterion(id, tol, options.seed));
    return out;
}

std::string format_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s  %2d  %-38s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
    return std::string(head) + "  " + r.detail + fmt("  [%.1fs]", r.seconds);
}

std::string format_table(const std::vector<CriterionResult>& rows) {
    std::string out;
    int passed = 0;
    for (const auto& r : rows) {
        out += format_line(r) + "\n";
        passed += r.pass;
    }
    out += std::to_string(passed) + "/" + std::to_string(rows.size()) + " criteria passed\n";
    return out;
}

}  // namespace lps
