#include "lps/gfun.hpp"

#include <algorithm>
#include <cmath>

#include "lps/convolution.hpp"

namespace lps {

namespace {


// Packs the scaled derivative fields of one time node as [field][cell][M].
void pack(std::vector<double>& buf, std::size_t slot, const GridFunction& g, double scale) {
    const std::size_t n = g.values().size();
    for (std::size_t i = 0; i < n; ++i) buf[slot * n + i] = scale * g.values()[i];
}

int field_count(GVariant v, int dim) {
    switch (v) {
        case GVariant::time: return 1;
        case GVariant::space: return dim;
        case GVariant::full: return dim + 1;
    }
    return 1;
}

GridFunction finish(const Domain& d, std::span<const double> sums, double q) {
    GridFunction g(d, 1, 1.0);
    for (std::size_t c = 0; c < sums.size(); ++c) g.values()[c] = std::pow(std::max(sums[c], 0.0), 1.0 / q);
    return g;
}

}  // namespace

std::string to_string(GVariant v) {
    switch (v) {
        case GVariant::time: return "time";
        case GVariant::space: return "space";
        case GVariant::full: return "full";
    }
    return "time";
}

GVariant gvariant_from_string(const std::string& s) {
    if (s == "time") return GVariant::time;
    if (s == "space") return GVariant::space;
    if (s == "full") return GVariant::full;
    throw InvalidArgument("unknown g-function variant '" + s + "'");
}

std::string to_string(RadialVariant v) { return v == RadialVariant::radial ? "radial" : "full"; }

RadialVariant radial_variant_from_string(const std::string& s) {
    if (s == "radial") return RadialVariant::radial;
    if (s == "full") return RadialVariant::full;
    throw InvalidArgument("unknown radial variant '" + s + "'");
}

GResult gfunction_report(const GridFunction& f, const GSpec& spec, loops::Exec exec) {
    require(spec.action != nullptr, "g-function needs an action");
    require(spec.q > 1.0 && std::isfinite(spec.q), "g-function needs 1 < q < inf");
    require(spec.action->supports(f.domain()),
            "action " + spec.action->name() + " does not act on " + to_string(f.domain().kind()) + " grids");
    KernelWindow kw;
    double t_lo = 0.0, t_hi = kInf;
    if (spec.window) {
        require(spec.window->t_lo < spec.window->t_hi, "g-function window needs t_lo < t_hi");
        require(spec.window->radius > 0.0, "g-function window needs a positive radius");
        kw.radius = spec.window->radius;
        t_lo = spec.window->t_lo;
        t_hi = spec.window->t_hi;
    }
    const auto traj = spec.action->trajectory(f, kw);
    const Domain& d = f.domain();
    const std::size_t cells = d.cells();
    const int nf = field_count(spec.variant, d.dim());
    // A time window shrinks the grid to its intersection with [t_lo, t_hi].
    const double lo = std::max(spec.grid.t_min(), t_lo), hi = std::min(spec.grid.t_max(), t_hi);
    require(lo < hi, "g-function window misses the time grid");
    const TimeGrid tg = (lo > spec.grid.t_min() || hi < spec.grid.t_max()) ? TimeGrid(lo, hi, spec.grid.size()) : spec.grid;
    const int K = tg.size();
    std::vector<double> rows(static_cast<std::size_t>(K) * cells, 0.0);

    auto node = [&](int k) {
        const double t = tg.nodes()[k];
        std::vector<double> buf(static_cast<std::size_t>(nf) * f.values().size());
        std::size_t slot = 0;
        if (spec.variant != GVariant::space) pack(buf, slot++, traj->time_derivative(t), t);
        if (spec.variant != GVariant::time)
            for (const GridFunction& g : traj->space_gradient(t)) pack(buf, slot++, g, t);
        loops::fiber_power(buf, nf, cells, f.M(), f.r(), spec.q,
                           std::span<double>(rows).subspan(static_cast<std::size_t>(k) * cells, cells), loops::Exec::serial);
    };
    if (exec == loops::Exec::parallel) {
        loops::ErrorSlot slot;
#pragma omp parallel for schedule(dynamic) num_threads(loops::thread_count())
        for (int k = 0; k < K; ++k) slot.run([&] { node(k); });
        slot.rethrow();
    } else {
        for (int k = 0; k < K; ++k) node(k);
    }

    std::vector<double> sums(cells);
    loops::weighted_column_sums(rows, tg.weights(), cells, sums, exec);
    GResult res{finish(d, sums, spec.q), 0.0, 0.0};
    for (std::size_t c = 0; c < cells; ++c) {
        res.head = std::max(res.head, std::pow(rows[c], 1.0 / spec.q));
        res.tail = std::max(res.tail, std::pow(rows[static_cast<std::size_t>(K - 1) * cells + c], 1.0 / spec.q));
    }
    return res;
}

GridFunction gfunction(const GridFunction& f, const GSpec& spec, loops::Exec exec) {
    return gfunction_report(f, spec, exec).g;
}

GridFunction g_torus_radial(const GridFunction& f, double q, RadialVariant variant,
                            const std::optional<RadialWindow>& window, double rho_min, int panels, int order) {
    require(f.domain().is_torus(), "radial g-function needs a torus grid");
    require(q > 1.0 && std::isfinite(q), "radial g-function needs 1 < q < inf");
    require(rho_min > 0.0 && rho_min < 1.0, "radial g-function needs 0 < rho_min < 1");
    KernelWindow kw;
    double r_lo = 0.0, r_hi = 1.0;
    if (window) {
        require(window->r_lo >= 0.0 && window->r_lo < window->r_hi && window->r_hi <= 1.0,
                "radial window needs 0 <= r_lo < r_hi <= 1");
        kw.radius = window->radius;
        r_lo = window->r_lo;
        r_hi = window->r_hi;
    }
    const auto traj = poisson_torus()->trajectory(f, kw);
    // In s = log(1 - r): (1-r)^q ||.||^q dr / (1-r) = rho^q ||.||^q ds.
    const double s_lo = std::max(std::log(rho_min), r_hi < 1.0 ? std::log1p(-r_hi) : -kInf);
    const double s_hi = r_lo > 0.0 ? std::log1p(-r_lo) : 0.0;
    const QuadratureRule rule = composite_gauss_legendre(s_lo, s_hi, panels, order);
    const std::size_t cells = f.cells(), K = rule.nodes.size();
    const int nf = variant == RadialVariant::radial ? 1 : 2;
    std::vector<double> rows(K * cells, 0.0), w(K);
#pragma omp parallel for schedule(dynamic) num_threads(loops::thread_count())
    for (std::size_t k = 0; k < K; ++k) {
        const double rho = std::exp(rule.nodes[k]), r = 1.0 - rho;
        w[k] = rule.weights[k] * std::pow(rho, q);
        const double t = -std::log1p(-rho);
        // P_r = P_t with r = e^{-t}: d/dr = -(1/r) d/dt.
        std::vector<double> buf(static_cast<std::size_t>(nf) * f.values().size());
        pack(buf, 0, traj->time_derivative(t), -1.0 / r);
        if (nf == 2) pack(buf, 1, traj->space_gradient(t)[0], 1.0 / r);
        loops::fiber_power(buf, nf, cells, f.M(), f.r(), q, std::span<double>(rows).subspan(k * cells, cells),
                           loops::Exec::serial);
    }
    std::vector<double> sums(cells);
    loops::weighted_column_sums(rows, w, cells, sums);
    return finish(f.domain(), sums, q);
}

// ---------------------------------------------------------------------------------------
// Area function

namespace {

// Area of the disc of radius R about the origin inside [u0, u1] x [v0, v1].
double disc_rect_area(double R, double u0, double u1, double v0, double v1) {
    const double lo = std::max(u0, -R), hi = std::min(u1, R);
    if (lo >= hi || v0 >= R || v1 <= -R) return 0.0;
    auto G = [R](double u) {
        const double s = std::sqrt(std::max(R * R - u * u, 0.0));
        return 0.5 * (u * s + R * R * std::asin(std::clamp(u / R, -1.0, 1.0)));
    };
    std::vector<double> cuts{lo, hi};
    for (double v : {v0, v1})
        if (std::abs(v) < R) {
            const double u = std::sqrt(R * R - v * v);
            for (double c : {-u, u})
                if (c > lo && c < hi) cuts.push_back(c);
        }
    std::sort(cuts.begin(), cuts.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= a) continue;
        const double m = 0.5 * (a + b), s = std::sqrt(R * R - m * m);
        const bool top_circle = s < v1, bot_circle = -s > v0;
        if ((top_circle ? s : v1) <= (bot_circle ? -s : v0)) continue;
        const double circ = G(b) - G(a);
        area += (top_circle ? circ : v1 * (b - a)) - (bot_circle ? -circ : v0 * (b - a));
    }
    return area;
}

}  // namespace

AreaResult area_function_report(const GridFunction& f, const AreaSpec& spec) {
    const Domain& d = f.domain();
    require(d.is_euclidean(), "area function needs a line or plane grid");
    require(spec.q > 1.0 && std::isfinite(spec.q), "area function needs 1 < q < inf");
    require(spec.aperture > 0.0, "area function needs a positive aperture");
    require(spec.aperture * spec.grid.t_min() <= 2.0 * d.L(), "window too small to contain any cone slice");
    const auto traj = poisson_euclid()->trajectory(f);
    const int N = d.N(), n = d.dim(), K = spec.grid.size();
    const double h = d.spacing(), L = d.L(), q = spec.q;
    const std::size_t cells = d.cells();
    std::vector<double> rows(static_cast<std::size_t>(K) * cells, 0.0);
    std::vector<long> clipped(K, 0);

#pragma omp parallel for schedule(dynamic) num_threads(loops::thread_count())
    for (int k = 0; k < K; ++k) {
        const double t = spec.grid.nodes()[k], R = spec.aperture * t;
        std::vector<double> buf(static_cast<std::size_t>(n + 1) * f.values().size()), F(cells);
        pack(buf, 0, traj->time_derivative(t), t);
        const auto grad = traj->space_gradient(t);
        for (int a = 0; a < n; ++a) pack(buf, a + 1, grad[a], t);
        loops::fiber_power(buf, n + 1, cells, f.M(), f.r(), q, F, loops::Exec::serial);
        double* row = rows.data() + static_cast<std::size_t>(k) * cells;
        const double scale = 1.0 / std::pow(t, n);
        if (n == 1) {
            std::vector<double> pre(N + 1, 0.0);
            for (int j = 0; j < N; ++j) pre[j + 1] = pre[j] + h * F[j];
            // Integral of the piecewise-constant F over [a, b].
            auto integral = [&](double a, double b) {
                auto cum = [&](double x) {
                    const double s = std::clamp((x + L) / h, 0.0, static_cast<double>(N));
                    const int j = std::min(static_cast<int>(s), N - 1);
                    return pre[j] + (s - j) * h * F[j];
                };
                return cum(b) - cum(a);
            };
            for (int i = 0; i < N; ++i) {
                const double x = d.axis_coord(i);
                if (x - R < -L || x + R > L) ++clipped[k];
                row[i] = scale * integral(x - R, x + R);
            }
        } else {
            const int B = static_cast<int>(std::ceil(R / h)) + 1;
            for (int i0 = 0; i0 < N; ++i0)
                for (int i1 = 0; i1 < N; ++i1) {
                    const double x0 = d.axis_coord(i0), x1 = d.axis_coord(i1);
                    if (x0 - R < -L || x0 + R > L || x1 - R < -L || x1 + R > L) ++clipped[k];
                    double s = 0.0;
                    for (int j0 = std::max(0, i0 - B); j0 <= std::min(N - 1, i0 + B); ++j0) {
                        const double u0 = d.axis_coord(j0) - 0.5 * h - x0;
                        for (int j1 = std::max(0, i1 - B); j1 <= std::min(N - 1, i1 + B); ++j1) {
                            const double v0 = d.axis_coord(j1) - 0.5 * h - x1;
                            const double cu = std::max(std::abs(u0), std::abs(u0 + h));
                            const double cv = std::max(std::abs(v0), std::abs(v0 + h));
                            const double area = cu * cu + cv * cv <= R * R ? h * h : disc_rect_area(R, u0, u0 + h, v0, v0 + h);
                            s += area * F[static_cast<std::size_t>(j0) * N + j1];
                        }
                    }
                    row[static_cast<std::size_t>(i0) * N + i1] = scale * s;
                }
        }
    }
    std::vector<double> sums(cells);
    loops::weighted_column_sums(rows, spec.grid.weights(), cells, sums);
    long total = 0;
    for (long c : clipped) total += c;
    return {finish(d, sums, q), static_cast<double>(total) / (static_cast<double>(K) * static_cast<double>(cells))};
}

GridFunction area_function(const GridFunction& f, const AreaSpec& spec) { return area_function_report(f, spec).A; }

GridFunction ou_gfunction(const GridFunction& f, double q, GVariant variant, const TimeGrid& grid) {
    require(f.domain().is_gauss(), "OU g-function needs a Gaussian grid");
    static const ActionPtr sub = subordinated(ou_action());
    return gfunction(f, GSpec{sub, q, variant, grid, std::nullopt});
}

std::pair<double, double> local_global_split(const Point& x, const Point& y, int n) {
    require(n == 1 || n == 2, "dimension must be 1 or 2");
    const double nx = n == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    const double ny = n == 1 ? std::abs(y[0]) : std::hypot(y[0], y[1]);
    const double dist = n == 1 ? std::abs(x[0] - y[0]) : std::hypot(x[0] - y[0], x[1] - y[1]);
    const double rho = dist * (1.0 + nx + ny) / (n * (n + 3));
    double phi;
    if (rho <= 1.0) {
        phi = 1.0;
    } else if (rho >= 2.0) {
        phi = 0.0;
    } else {
        // C-infinity step from 1 at rho = 1 to 0 at rho = 2.
        const double u = 2.0 - rho;
        const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
        phi = a / (a + b);
    }
    return {phi, 1.0 - phi};
}

DominationReport pointwise_domination_check(const GridFunction& f, double q, const ActionPtr& base,
                                            const TimeGrid& grid) {
    DominationReport rep{subordinator_moment_K(), 0.0, 0.0, GridFunction(f.domain(), 1, 1.0),
                         GridFunction(f.domain(), 1, 1.0)};
    rep.constant = std::pow(2.0, 1.0 - 1.0 / q) * rep.K;
    rep.g_poisson = gfunction(f, GSpec{subordinated(base), q, GVariant::time, grid, std::nullopt});
    rep.g_cesaro = gfunction(f, GSpec{cesaro(base), q, GVariant::time, grid, std::nullopt});
    double scale = 0.0;
    for (double v : rep.g_poisson.values()) scale = std::max(scale, v);
    const double floor = 1e-9 * std::max(scale, lp_norm(f, kInf));
    for (std::size_t c = 0; c < f.cells(); ++c) {
        const double lhs = rep.g_poisson.values()[c], rhs = rep.constant * rep.g_cesaro.values()[c];
        if (lhs <= floor) continue;
        rep.max_ratio = std::max(rep.max_ratio, rhs > 0.0 ? lhs / rhs : kInf);
    }
    return rep;
}

}  // namespace lps
