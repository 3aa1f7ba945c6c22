#include "lps/kernelcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lps/kernels.hpp"
#include "lps/loops.hpp"

namespace lps {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Point> directions(int n) {
    if (n == 1) return {Point{1.0, 0.0}, Point{-1.0, 0.0}};
    std::vector<Point> d;
    for (int k = 0; k < 16; ++k) d.push_back({std::cos(2 * kPi * k / 16), std::sin(2 * kPi * k / 16)});
    return d;
}

}  // namespace

OperatorKernel OperatorKernel::scalar(int n, std::function<double(const Point&, const Point&)> k) {
    OperatorKernel K;
    K.n = n;
    K.eval = [k = std::move(k)](const Point& x, const Point& y) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = k(x, y);
        return m;
    };
    return K;
}

OperatorKernel OperatorKernel::poisson_fiber(int n, int axis, const TimeGrid& fiber) {
    require(axis >= 0 && axis < n, "fiber kernel axis out of range");
    OperatorKernel K;
    K.n = n;
    K.fiber = fiber;
    K.eval = [n, axis, nodes = fiber.nodes()](const Point& x, const Point& y) {
        const Point z{x[0] - y[0], x[1] - y[1]};
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nodes.size(), nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) m(k, k) = nodes[k] * poisson_kernel_euclid_dx(nodes[k], z, n, axis);
        return m;
    };
    return K;
}

double fiber_norm(const Eigen::MatrixXd& A, const std::optional<TimeGrid>& fiber) {
    if (A.size() == 0) return 0.0;
    Eigen::MatrixXd B = A;
    if (fiber) {
        require(A.rows() == fiber->size() && A.rows() == A.cols(), "kernel does not match its fiber");
        // ||A||_{L^2(w)} = ||W^{1/2} A W^{-1/2}||_2.
        for (long i = 0; i < B.rows(); ++i)
            for (long j = 0; j < B.cols(); ++j) B(i, j) *= std::sqrt(fiber->weights()[i] / fiber->weights()[j]);
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(B.cols());
    for (int it = 0; it < 20; ++it) {
        Eigen::VectorXd next = B.transpose() * (B * v);
        const double nn = next.norm();
        if (nn == 0.0 || !std::isfinite(nn)) break;
        v = next / nn;
    }
    return (B * v).norm() / v.norm();
}

CzProfile cz_bound_profile(const OperatorKernel& kernel, const std::vector<double>& radii, const std::vector<Point>& bases) {
    require(kernel.n == 1 || kernel.n == 2, "kernel dimension must be 1 or 2");
    for (double rho : radii) require(rho > 0.0, "kernel profile radii must be positive (k is singular at x = y)");
    const auto dirs = directions(kernel.n);
    CzProfile prof;
    prof.rows.resize(radii.size());
#pragma omp parallel for schedule(dynamic) num_threads(loops::thread_count())
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double rho = radii[k], h = 1e-4 * rho;
        double size = 0.0, grad = 0.0;
        for (const Point& y : bases)
            for (const Point& e : dirs) {
                const Point x{y[0] + rho * e[0], y[1] + rho * e[1]};
                const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
                size = std::max(size, std::pow(dist, kernel.n) * fiber_norm(kernel.eval(x, y), kernel.fiber));
                double g2 = 0.0;
                for (int a = 0; a < kernel.n; ++a) {
                    Point xp = x, xm = x;
                    xp[a] += h;
                    xm[a] -= h;
                    const Eigen::MatrixXd D = (kernel.eval(xp, y) - kernel.eval(xm, y)) / (2.0 * h);
                    g2 += std::pow(fiber_norm(D, kernel.fiber), 2);
                }
                grad = std::max(grad, std::pow(dist, kernel.n + 1) * std::sqrt(g2));
            }
        prof.rows[k] = {rho, size, grad};
    }
    for (const auto& r : prof.rows) {
        prof.max_size = std::max(prof.max_size, r.size);
        prof.max_gradient = std::max(prof.max_gradient, r.gradient);
    }
    return prof;
}

double torus_kernel(double t, double phi) {
    const double a = -std::expm1(-t), s2 = std::pow(std::sin(0.5 * phi), 2);
    const double den = a * a + 4.0 * std::exp(-t) * s2;
    return (2.0 * a * a - 4.0 * (1.0 + std::exp(-2.0 * t)) * s2) / (den * den);
}

double torus_kernel_model(double t, double phi) {
    const double d = t * t + phi * phi;
    return 2.0 * (t * t - phi * phi) / (d * d);
}

TorusKernelValues torus_kernel_decompose(double t, double phi, double delta) {
    require(delta > 0.0 && delta < 1.0, "torus window needs 0 < delta < 1");
    const double eps = std::log(1.0 / (1.0 - delta));
    require(t > 0.0 && t < eps, "torus decomposition needs 0 < t < log(1/(1-delta))");
    require(std::abs(phi) < delta, "torus decomposition needs |phi| < delta");
    const double k = torus_kernel(t, phi), k0 = torus_kernel_model(t, phi);
    return {k, k0, k - k0};
}

double torus_residual_bound(double delta, int nt, int nphi) {
    require(nt >= 2 && nphi >= 2, "residual grid needs at least two nodes per axis");
    const double eps = std::log(1.0 / (1.0 - delta));
    const double lo = std::log(1e-6 * eps), hi = std::log(eps * (1.0 - 1e-9));
    double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static) num_threads(loops::thread_count())
    for (int i = 0; i < nt; ++i) {
        const double t = std::exp(lo + (hi - lo) * i / (nt - 1));
        for (int j = 0; j < nphi; ++j) {
            const double phi = delta * (2.0 * (j + 0.5) / nphi - 1.0);
            const double res = torus_kernel_decompose(t, phi, delta).residual;
            best = std::max(best, std::abs(res) / (t / (t * t + phi * phi) + 1.0));
        }
    }
    return best;
}

double projection_kernel_kst(double s, double t, const Point& x, int n) {
    require(s > 0.0 && t > 0.0, "projection kernel needs s, t > 0");
    return s * t * poisson_kernel_euclid_dtt(s + t, x, n);
}

double kst_bound_ratio(int n, double lo, double hi, int per_decade) {
    require(lo > 0.0 && hi > lo && per_decade >= 1, "k_st box needs 0 < lo < hi and per_decade >= 1");
    const int m = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1;
    std::vector<double> g(m);
    for (int i = 0; i < m; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1));
    std::vector<double> xs{0.0};
    xs.insert(xs.end(), g.begin(), g.end());
    double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static) num_threads(loops::thread_count())
    for (int i = 0; i < m; ++i)
        for (double t : g)
            for (double x : xs) {
                const double s = g[i];
                const double v = std::abs(projection_kernel_kst(s, t, {x, 0.0}, n)) * std::pow(x + s + t, n + 2) / (s * t);
                best = std::max(best, v);
            }
    return best;
}

double bmo_norm(const GridFunction& f, int max_level) {
    const Domain& d = f.domain();
    require(!d.is_gauss(), "BMO norm is defined on torus, line and plane grids");
    const int N = d.N();
    require((N & (N - 1)) == 0, "BMO norm needs a power-of-two grid");
    const int levels = static_cast<int>(std::lround(std::log2(N)));
    const int top = max_level < 0 ? levels : std::min(max_level, levels);
    return d.dim() == 1 ? loops::dyadic_oscillation_1d(f.values(), N, f.M(), f.r(), top)
                        : loops::dyadic_oscillation_2d(f.values(), N, f.M(), f.r(), top);
}

}  // namespace lps
