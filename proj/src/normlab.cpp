#include "lps/normlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lps/convolution.hpp"
#include "lps/kernels.hpp"
#include "lps/rng.hpp"

namespace lps {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }

}  // namespace

const std::vector<std::string>& operator_ids() {
    static const std::vector<std::string> ids{"gfun-torus", "poisson-torus", "radial-torus", "gfun-euclid", "area", "ou-gfun"};
    return ids;
}

bool OpSpec::supports(const Domain& d) const {
    if (id == "gfun-torus" || id == "poisson-torus" || id == "radial-torus") return d.is_torus();
    if (id == "gfun-euclid" || id == "area") return d.is_euclidean();
    if (id == "ou-gfun") return d.is_gauss();
    return false;
}

GridFunction OpSpec::apply(const GridFunction& f, loops::Exec exec) const {
    require(std::find(operator_ids().begin(), operator_ids().end(), id) != operator_ids().end(), "unknown operator '" + id + "'");
    require(supports(f.domain()), "operator '" + id + "' does not act on " + to_string(f.domain().kind()) + " grids");
    if (id == "gfun-torus" || id == "poisson-torus" || id == "gfun-euclid") {
        static const ActionPtr sub_heat = subordinated(heat_torus());
        const ActionPtr act = id == "gfun-torus" ? sub_heat : id == "poisson-torus" ? poisson_torus() : poisson_euclid();
        return gfunction(f, GSpec{act, q, variant, grid, std::nullopt}, exec);
    }
    if (id == "radial-torus") return g_torus_radial(f, q, variant == GVariant::time ? RadialVariant::radial : RadialVariant::full);
    if (id == "area") return area_function(f, AreaSpec{q, aperture, grid});
    return ou_gfunction(f, q, variant, grid);
}

double ratio(const OpSpec& op, const GridFunction& f, double p, loops::Exec exec) {
    const double nf = lp_norm(f, p);
    require(nf > 0.0, "ratio needs a nonzero input");
    return lp_norm(op.apply(f, exec), p) / nf;
}

std::vector<std::vector<double>> search_basis(const Domain& d, const std::vector<int>& frequencies) {
    std::vector<std::vector<double>> basis;
    const std::size_t cells = d.cells();
    if (d.is_torus()) {
        for (int k : frequencies) {
            require(k >= 1 && 2 * k < d.N(), "search frequency must lie in [1, N/2)");
            std::vector<double> c(cells), s(cells);
            for (std::size_t j = 0; j < cells; ++j) {
                // Exact reduction of k j mod N keeps the tables accurate at high frequency.
                const double th = 2.0 * kPi * static_cast<double>((static_cast<long>(k) * static_cast<long>(j)) % d.N()) / d.N();
                c[j] = std::cos(th);
                s[j] = std::sin(th);
            }
            basis.push_back(std::move(c));
            basis.push_back(std::move(s));
        }
        return basis;
    }
    if (d.is_euclidean()) {
        const double s = d.L() / 6.0;
        for (int k : frequencies) {
            const double w = (k - 1) / s;
            std::vector<double> c(cells), sn(cells);
            for (std::size_t j = 0; j < cells; ++j) {
                const Point x = d.point(j);
                const double env = std::exp(-0.5 * (sq(x[0]) + sq(x[1])) / sq(s));
                c[j] = env * std::cos(w * x[0]);
                sn[j] = env * std::sin(w * x[0]);
            }
            basis.push_back(std::move(c));
            if (k > 1) basis.push_back(std::move(sn));
        }
        return basis;
    }
    for (int k : frequencies) {
        std::vector<double> h(cells);
        for (std::size_t j = 0; j < cells; ++j) {
            const double x = d.point(j)[0];
            double h0 = 1.0, h1 = 2.0 * x;
            for (int m = 1; m < k; ++m) {
                const double h2 = 2.0 * x * h1 - 2.0 * m * h0;
                h0 = h1;
                h1 = h2;
            }
            h[j] = h1;
        }
        basis.push_back(std::move(h));
    }
    return basis;
}

namespace {

struct RestartResult {
    double best = -1.0;
    GridFunction witness{Domain::torus(8), 1, 2.0};
    std::vector<TracePoint> trace;
};

RestartResult run_restart(const OpSpec& op, const SearchSpec& spec, const std::vector<std::vector<double>>& basis, int restart,
                          loops::Exec exec) {
    const Domain& d = spec.domain;
    const int M = spec.M, B = static_cast<int>(basis.size());
    const std::size_t cells = d.cells();
    auto g = stream_rng(spec.seed, static_cast<std::uint64_t>(restart));
    std::normal_distribution<double> n01;
    std::vector<double> coef(static_cast<std::size_t>(M) * B);
    if (restart == 0 && spec.initial) {
        require(spec.initial->size() == coef.size(), "initial coefficients do not match the search basis");
        coef = *spec.initial;
    } else {
        for (double& c : coef) c = n01(g);
    }

    GridFunction f(d, M, spec.r);
    auto synth = [&] {
        std::fill(f.values().begin(), f.values().end(), 0.0);
        for (int m = 0; m < M; ++m)
            for (int b = 0; b < B; ++b) {
                const double c = coef[static_cast<std::size_t>(m) * B + b];
                if (c == 0.0) continue;
                for (std::size_t j = 0; j < cells; ++j) f(j, m) += c * basis[b][j];
            }
    };
    auto normalize = [&] {
        const double n = lp_norm(f, spec.p);
        require(n > 0.0, "search iterate vanished");
        f *= 1.0 / n;
        for (double& c : coef) c /= n;
    };
    synth();
    normalize();
    RestartResult res;
    res.best = ratio(op, f, spec.p, exec);
    res.witness = f;
    res.trace.push_back({0, res.best});

    std::uniform_int_distribution<std::size_t> pick(0, coef.size() - 1);
    for (int it = 1; it < spec.budget; ++it) {
        const double step = std::ldexp(1.0, -(it / 50));
        const std::size_t idx = pick(g);
        const double xi = n01(g);
        const double old = coef[idx];
        if (old == 0.0) continue;
        const double delta = old * step * xi;
        const std::vector<double> saved_coef = coef;
        const GridFunction saved = f;
        coef[idx] = old + delta;
        const int m = static_cast<int>(idx / B), b = static_cast<int>(idx % B);
        for (std::size_t j = 0; j < cells; ++j) f(j, m) += delta * basis[b][j];
        if (lp_norm(f, spec.p) == 0.0) {
            coef = saved_coef;
            f = saved;
            continue;
        }
        normalize();
        const double r = ratio(op, f, spec.p, exec);
        if (r > res.best) {
            res.best = r;
            res.witness = f;
            res.trace.push_back({it, r});
        } else {
            coef = saved_coef;
            f = saved;
        }
    }
    return res;
}

}  // namespace

NormEstimate extremal_search(const OpSpec& op, const SearchSpec& spec) {
    require(spec.budget >= 1, "search budget must be at least 1");
    require(spec.restarts >= 1, "search needs at least one restart");
    require(spec.M >= 1, "coordinate count must be at least 1");
    require(spec.p >= 1.0 && spec.r >= 1.0 && op.q >= 1.0, "exponents p, r and q must be at least 1");
    require(op.supports(spec.domain), "operator '" + op.id + "' does not act on the search domain");
    std::vector<int> freqs = spec.frequencies;
    if (freqs.empty())
        for (int k = 1; k <= 16; ++k) freqs.push_back(k);
    const auto basis = search_basis(spec.domain, freqs);

    std::vector<RestartResult> runs(spec.restarts);
    const bool par = spec.restarts > 1 && loops::thread_count() > 1;
    const loops::Exec inner = par ? loops::Exec::serial : loops::Exec::parallel;
    loops::ErrorSlot slot;
#pragma omp parallel for schedule(dynamic) num_threads(loops::thread_count()) if (par)
    for (int i = 0; i < spec.restarts; ++i) slot.run([&] { runs[i] = run_restart(op, spec, basis, i, inner); });
    slot.rethrow();

    int best = 0;
    for (int i = 1; i < spec.restarts; ++i)
        if (runs[i].best > runs[best].best) best = i;
    NormEstimate est;
    est.op = op.id;
    est.q = op.q;
    est.variant = op.variant;
    est.p = spec.p;
    est.r = spec.r;
    est.M = spec.M;
    est.estimate = runs[best].best;
    est.witness = std::move(runs[best].witness);
    est.trace = std::move(runs[best].trace);
    est.seed = spec.seed;
    est.best_restart = best;
    return est;
}

std::vector<int> lacunary_frequencies(int M) {
    std::vector<int> f;
    for (int k = 1; k <= M; ++k) {
        int v = static_cast<int>(std::ceil(std::pow(1.3, k) - 1e-9));
        if (!f.empty()) v = std::max(v, f.back() + 1);
        f.push_back(v);
    }
    return f;
}

std::vector<CotypeRow> cotype_sweep(const CotypeSpec& spec) {
    require(!spec.M_list.empty(), "cotype sweep needs at least one M");
    for (std::size_t i = 1; i < spec.M_list.size(); ++i) require(spec.M_list[i] > spec.M_list[i - 1], "M list must increase");
    std::vector<CotypeRow> rows;
    for (int M : spec.M_list) {
        require(M >= 1, "M must be at least 1");
        const auto freqs = lacunary_frequencies(M);
        int N = 256;
        while (N < 3 * freqs.back()) N *= 2;
        OpSpec op{"gfun-torus", spec.q, GVariant::time, TimeGrid(std::min(1e-3, 0.01 / freqs.back()), 50.0, 200)};
        SearchSpec s;
        s.domain = Domain::torus(N);
        s.M = M;
        s.r = spec.r;
        s.p = spec.p;
        s.budget = spec.budget;
        s.restarts = spec.restarts;
        s.seed = spec.seed;
        s.frequencies = freqs;
        // Coordinate k carries cos(lambda_k theta): basis slot 2k of coordinate k.
        std::vector<double> init(static_cast<std::size_t>(M) * 2 * M, 0.0);
        for (int k = 0; k < M; ++k) init[static_cast<std::size_t>(k) * 2 * M + 2 * k] = 1.0;
        s.initial = init;
        GridFunction w(s.domain, M, spec.r);
        const auto basis = search_basis(s.domain, freqs);
        for (int k = 0; k < M; ++k)
            for (std::size_t j = 0; j < w.cells(); ++j) w(j, k) = basis[2 * k][j];
        CotypeRow row{M, N, ratio(op, w, spec.p), extremal_search(op, s), 0.0};
        if (!rows.empty()) row.growth = row.estimate.estimate / rows.back().estimate.estimate;
        rows.push_back(std::move(row));
    }
    return rows;
}

DualityResult duality_pairing_check(const GridFunction& f, const GridFunction& g, const TimeGrid& grid) {
    require(f.domain().is_torus() && f.same_shape(g), "duality check needs two functions on the same torus grid");
    require(f.M() == 1, "duality check needs scalar functions");
    static const ActionPtr act = subordinated(heat_torus());
    const Domain& d = f.domain();
    const std::size_t cells = d.cells();
    const GridFunction fc = f - act->fixpoint(f), gc = g - act->fixpoint(g);
    std::vector<double> prod(cells);
    for (std::size_t c = 0; c < cells; ++c) prod[c] = fc(c, 0) * gc(c, 0) * d.weight(c);
    const double lhs = pairwise_sum(prod);

    const auto tf = act->trajectory(f), tg = act->trajectory(g);
    std::vector<double> per(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
        const double t = grid.nodes()[k];
        const GridFunction a = tf->time_derivative(t), b = tg->time_derivative(t);
        for (std::size_t c = 0; c < cells; ++c) prod[c] = a(c, 0) * b(c, 0) * d.weight(c);
        per[k] = grid.weights()[k] * t * t * pairwise_sum(prod);
    }
    const double rhs = 4.0 * pairwise_sum(per);
    return {lhs, rhs, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-12)};
}

namespace {

bool is_constant(const GridFunction& f) {
    for (std::size_t c = 1; c < f.cells(); ++c)
        for (int k = 0; k < f.M(); ++k)
            if (f(c, k) != f(0, k)) return false;
    return true;
}

// Sampled kernel table scaled by the cell volume, offsets of the padded domain.
std::vector<double> sampled_table(const Domain& d, double t, double (*fn)(double, const Point&, int, int), int axis) {
    const int N = d.N(), W = 2 * N - 1, n = d.dim();
    const double h = d.spacing(), vol = std::pow(h, n);
    std::vector<double> tab(n == 1 ? W : static_cast<std::size_t>(W) * W);
    for (int o0 = -(N - 1); o0 <= N - 1; ++o0) {
        if (n == 1) {
            tab[o0 + N - 1] = vol * fn(t, {o0 * h, 0.0}, 1, axis);
            continue;
        }
        for (int o1 = -(N - 1); o1 <= N - 1; ++o1)
            tab[static_cast<std::size_t>(o0 + N - 1) * W + (o1 + N - 1)] = vol * fn(t, {o0 * h, o1 * h}, 2, axis);
    }
    return tab;
}

double kst_dt(double t, const Point& x, int n, int) { return poisson_kernel_euclid_dt(t, x, n); }
double kst_dx(double t, const Point& x, int n, int axis) { return poisson_kernel_euclid_dx(t, x, n, axis); }
double kst_dxdt(double t, const Point& x, int n, int axis) { return poisson_kernel_euclid_dxdt(t, x, n, axis); }

}  // namespace

double factorization_error(const GridFunction& f, const std::vector<double>& times, int pad) {
    const Domain& d = f.domain();
    require(d.is_euclidean(), "factorization check needs a line or plane grid");
    require(pad >= 1, "padding factor must be at least 1");
    const int N = d.N(), P = N * pad, n = d.dim();
    const Domain big(d.kind(), P, d.L() * pad);
    const int off = (P - N) / 2;
    auto big_index = [&](std::size_t c) {
        if (n == 1) return static_cast<std::size_t>(c + off);
        const std::size_t i = c / N, j = c % N;
        return (i + off) * P + (j + off);
    };
    const PaddedConvolution conv(big);
    double worst = 0.0;
    for (int k = 0; k < f.M(); ++k) {
        std::vector<double> x(big.cells(), 0.0);
        for (std::size_t c = 0; c < d.cells(); ++c) x[big_index(c)] = f(c, k);
        const auto xs = conv.transform(x);
        for (double t : times) {
            require(t > 0.0, "factorization times must be positive");
            std::vector<double> phi(big.cells());
            conv.apply(xs, conv.transform_table(sampled_table(big, t, kst_dt, 0)), phi);
            for (double& v : phi) v *= t;
            const auto ps = conv.transform(phi);
            for (int axis = 0; axis < n; ++axis) {
                std::vector<double> lhs(big.cells()), rhs(big.cells());
                conv.apply(xs, conv.transform_table(sampled_table(big, 2.0 * t, kst_dxdt, axis)), lhs);
                conv.apply(ps, conv.transform_table(sampled_table(big, t, kst_dx, axis)), rhs);
                double err = 0.0, scale = 0.0;
                for (std::size_t c = 0; c < d.cells(); ++c) {
                    const std::size_t b = big_index(c);
                    const double l = t * t * lhs[b], r = t * rhs[b];
                    err = std::max(err, std::abs(l - r));
                    scale = std::max(scale, std::abs(l));
                }
                if (scale > 0.0) worst = std::max(worst, err / scale);
            }
        }
    }
    return worst;
}

EquivalenceResult time_space_equivalence_check(const GridFunction& f, double q, double p, const TimeGrid& grid) {
    require(f.domain().is_euclidean(), "time/space equivalence needs a line or plane grid");
    EquivalenceResult res;
    if (is_constant(f)) return res;
    res.g1 = lp_norm(gfunction(f, GSpec{poisson_euclid(), q, GVariant::time, grid, std::nullopt}), p);
    res.g2 = lp_norm(gfunction(f, GSpec{poisson_euclid(), q, GVariant::space, grid, std::nullopt}), p);
    res.ratio = res.g2 > 0.0 ? res.g1 / res.g2 : (res.g1 > 0.0 ? kInf : 1.0);
    const double h = f.domain().spacing(), L = f.domain().L();
    res.identity_error = factorization_error(f, {6.0 * h, 12.0 * h, std::max(12.0 * h, L / 16.0)});
    return res;
}

double fibered_norm(const TimeFibered& h, double q, double p) {
    require(!h.slices.empty() && static_cast<int>(h.slices.size()) == h.grid.size(), "fibered function does not match its grid");
    const GridFunction& s0 = h.slices.front();
    GridFunction pt(s0.domain(), 1, 1.0);
    for (std::size_t c = 0; c < s0.cells(); ++c) {
        std::vector<double> terms(h.slices.size());
        for (std::size_t k = 0; k < h.slices.size(); ++k)
            terms[k] = h.grid.weights()[k] * std::pow(b_norm(h.slices[k].at(c), h.slices[k].r()), q);
        pt(c, 0) = std::pow(pairwise_sum(terms), 1.0 / q);
    }
    return lp_norm(pt, p);
}

GridFunction projection_Q(const TimeFibered& h) {
    require(!h.slices.empty() && static_cast<int>(h.slices.size()) == h.grid.size(), "fibered function does not match its grid");
    require(h.slices.front().domain().is_euclidean(), "projection Q acts on line and plane grids");
    const ActionPtr act = poisson_euclid();
    GridFunction out(h.slices.front().domain(), h.slices.front().M(), h.slices.front().r());
    for (int k = 0; k < h.grid.size(); ++k) {
        const double t = h.grid.nodes()[k];
        require(h.slices[k].same_shape(out), "fiber slices differ in shape");
        GridFunction term = act->time_derivative(h.slices[k], t);
        term *= h.grid.weights()[k] * t;
        out += term;
    }
    return out;
}

double projection_boundedness_check(const TimeFibered& h, double q, double p) {
    const double nh = fibered_norm(h, q, p);
    if (nh == 0.0) return 0.0;
    const GridFunction Qh = projection_Q(h);
    return lp_norm(gfunction(Qh, GSpec{poisson_euclid(), q, GVariant::time, h.grid, std::nullopt}), p) / nh;
}

TimeFibered range_fiber(const GridFunction& f, const TimeGrid& grid) {
    require(f.domain().is_euclidean(), "range fiber needs a line or plane grid");
    const auto traj = poisson_euclid()->trajectory(f);
    TimeFibered h{grid, {}};
    for (double t : grid.nodes()) {
        GridFunction s = traj->time_derivative(t);
        s *= t;
        h.slices.push_back(std::move(s));
    }
    return h;
}

WeakTypeResult weak_type_profile(const OpSpec& op, const GridFunction& f, const std::vector<double>& lambdas) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        require(lambdas[i] > 0.0, "weak-type levels must be positive");
        if (i) require(lambdas[i] > lambdas[i - 1], "weak-type levels must increase");
    }
    const double n1 = lp_norm(f, 1.0);
    if (n1 == 0.0) return {};
    const GridFunction g = op.apply(f);
    const Domain& d = g.domain();
    std::vector<std::pair<double, double>> vw(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) vw[c] = {g(c, 0), d.weight(c)};
    std::sort(vw.begin(), vw.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    WeakTypeResult res;
    if (lambdas.empty()) {
        double mass = 0.0;
        for (std::size_t i = 0; i < vw.size();) {
            std::size_t j = i;
            while (j < vw.size() && vw[j].first == vw[i].first) mass += vw[j++].second;
            if (vw[i].first > 0.0 && vw[i].first * mass > res.value) res = {vw[i].first * mass, vw[i].first};
            i = j;
        }
    } else {
        for (double lam : lambdas) {
            double mass = 0.0;
            for (const auto& [v, w] : vw) {
                if (v <= lam) break;
                mass += w;
            }
            if (lam * mass > res.value) res = {lam * mass, lam};
        }
    }
    res.value /= n1;
    return res;
}

}  // namespace lps
