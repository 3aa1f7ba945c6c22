#include "lps/kernels.hpp"

#include <cmath>
#include <numbers>

namespace lps {

namespace {

constexpr double kPi = std::numbers::pi;

double poisson_const(int n) { return n == 1 ? 1.0 / kPi : 0.5 / kPi; }

double sq_norm(const Point& x, int n) { return n == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1]; }

void check_dim(int n) { require(n == 1 || n == 2, "dimension must be 1 or 2"); }

// Mass of the 1-D heat kernel on [a, b], computed on the tail side to keep precision.
double heat_cell(double a, double b, double t) {
    const double s = 2.0 * std::sqrt(t);
    if (a >= 0.0) return 0.5 * (std::erfc(a / s) - std::erfc(b / s));
    if (b <= 0.0) return 0.5 * (std::erfc(-b / s) - std::erfc(-a / s));
    return 0.5 * (std::erf(b / s) - std::erf(a / s));
}

double heat_1d(double t, double x) { return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t); }

double heat_cell_dt(double a, double b, double t) { return -(b * heat_1d(t, b) - a * heat_1d(t, a)) / (2.0 * t); }

double heat_cell_dx(double a, double b, double t) { return heat_1d(t, b) - heat_1d(t, a); }

double poisson_1d(double t, double x) { return t / (kPi * (x * x + t * t)); }

double poisson_cell(double a, double b, double t) { return (std::atan(b / t) - std::atan(a / t)) / kPi; }

double poisson_cell_dt(double a, double b, double t) { return -(b / (b * b + t * t) - a / (a * a + t * t)) / kPi; }

double poisson_cell_dx(double a, double b, double t) { return poisson_1d(t, b) - poisson_1d(t, a); }

// Antiderivatives of the plane Poisson kernel: F_xy = P, D = dF/dt, E(x) = int P(x, y) dy.
double plane_F(double x, double y, double t) {
    const double R = std::sqrt(x * x + y * y + t * t);
    return std::atan(x * y / (t * R)) / (2.0 * kPi);
}

double plane_D(double x, double y, double t) {
    const double R2 = x * x + y * y + t * t;
    return -x * y * (R2 + t * t) / (2.0 * kPi * std::sqrt(R2) * (x * x + t * t) * (y * y + t * t));
}

double plane_E(double x, double ya, double yb, double t) {
    const double c = t / (2.0 * kPi * (x * x + t * t));
    return c * (yb / std::sqrt(x * x + yb * yb + t * t) - ya / std::sqrt(x * x + ya * ya + t * t));
}

template <class F>
double corners(F&& fn, double a0, double b0, double a1, double b1) {
    return fn(b0, b1) - fn(a0, b1) - fn(b0, a1) + fn(a0, a1);
}

double sampled_value(KernelFamily family, KernelPart part, double t, const Point& z, int n) {
    if (family == KernelFamily::heat) {
        switch (part) {
            case KernelPart::value: return heat_kernel(t, z, n);
            case KernelPart::dt: return heat_kernel_dt(t, z, n);
            case KernelPart::dx0: return heat_kernel_dx(t, z, n, 0);
            case KernelPart::dx1: return heat_kernel_dx(t, z, n, 1);
        }
    }
    switch (part) {
        case KernelPart::value: return poisson_kernel_euclid(t, z, n);
        case KernelPart::dt: return poisson_kernel_euclid_dt(t, z, n);
        case KernelPart::dx0: return poisson_kernel_euclid_dx(t, z, n, 0);
        case KernelPart::dx1: return poisson_kernel_euclid_dx(t, z, n, 1);
    }
    return 0.0;
}

double cell_value_1d(KernelFamily family, KernelPart part, double t, double a, double b) {
    if (family == KernelFamily::heat) {
        switch (part) {
            case KernelPart::value: return heat_cell(a, b, t);
            case KernelPart::dt: return heat_cell_dt(a, b, t);
            case KernelPart::dx0: return heat_cell_dx(a, b, t);
            case KernelPart::dx1: return 0.0;
        }
    }
    switch (part) {
        case KernelPart::value: return poisson_cell(a, b, t);
        case KernelPart::dt: return poisson_cell_dt(a, b, t);
        case KernelPart::dx0: return poisson_cell_dx(a, b, t);
        case KernelPart::dx1: return 0.0;
    }
    return 0.0;
}

double cell_value_2d(KernelFamily family, KernelPart part, double t, double a0, double b0, double a1, double b1) {
    if (family == KernelFamily::heat) {
        const double w0 = heat_cell(a0, b0, t), w1 = heat_cell(a1, b1, t);
        switch (part) {
            case KernelPart::value: return w0 * w1;
            case KernelPart::dt: return heat_cell_dt(a0, b0, t) * w1 + w0 * heat_cell_dt(a1, b1, t);
            case KernelPart::dx0: return heat_cell_dx(a0, b0, t) * w1;
            case KernelPart::dx1: return w0 * heat_cell_dx(a1, b1, t);
        }
    }
    switch (part) {
        case KernelPart::value: return corners([t](double x, double y) { return plane_F(x, y, t); }, a0, b0, a1, b1);
        case KernelPart::dt: return corners([t](double x, double y) { return plane_D(x, y, t); }, a0, b0, a1, b1);
        case KernelPart::dx0: return plane_E(b0, a1, b1, t) - plane_E(a0, a1, b1, t);
        case KernelPart::dx1: return plane_E(b1, a0, b0, t) - plane_E(a1, a0, b0, t);
    }
    return 0.0;
}

}  // namespace

double poisson_kernel_torus(double r, double theta) {
    require(r > 0.0 && r < 1.0, "torus Poisson kernel needs 0 < r < 1");
    return (1.0 - r * r) / (1.0 + r * r - 2.0 * r * std::cos(theta));
}

double poisson_kernel_torus_dr(double r, double theta) {
    require(r > 0.0 && r < 1.0, "torus Poisson kernel needs 0 < r < 1");
    const double c = std::cos(theta);
    const double D = 1.0 + r * r - 2.0 * r * c;
    return (-2.0 * r * D - (1.0 - r * r) * (2.0 * r - 2.0 * c)) / (D * D);
}

double poisson_kernel_euclid(double t, const Point& x, int n) {
    require(t > 0.0, "Poisson kernel needs t > 0");
    check_dim(n);
    const double s = sq_norm(x, n) + t * t;
    return poisson_const(n) * t / std::pow(s, 0.5 * (n + 1));
}

double poisson_kernel_euclid_dt(double t, const Point& x, int n) {
    require(t > 0.0, "Poisson kernel needs t > 0");
    check_dim(n);
    const double x2 = sq_norm(x, n), s = x2 + t * t;
    return poisson_const(n) * (x2 - n * t * t) / std::pow(s, 0.5 * (n + 3));
}

double poisson_kernel_euclid_dtt(double t, const Point& x, int n) {
    require(t > 0.0, "Poisson kernel needs t > 0");
    check_dim(n);
    const double x2 = sq_norm(x, n), s = x2 + t * t;
    return poisson_const(n) * (n + 1) * t * (n * t * t - 3.0 * x2) / std::pow(s, 0.5 * (n + 5));
}

double poisson_kernel_euclid_dx(double t, const Point& x, int n, int axis) {
    require(t > 0.0, "Poisson kernel needs t > 0");
    check_dim(n);
    if (axis >= n) return 0.0;
    const double s = sq_norm(x, n) + t * t;
    return -poisson_const(n) * (n + 1) * t * x[axis] / std::pow(s, 0.5 * (n + 3));
}

double poisson_kernel_euclid_dxdt(double t, const Point& x, int n, int axis) {
    require(t > 0.0, "Poisson kernel needs t > 0");
    check_dim(n);
    if (axis >= n) return 0.0;
    const double x2 = sq_norm(x, n), s = x2 + t * t;
    return poisson_const(n) * (n + 1) * x[axis] * ((n + 2) * t * t - x2) / std::pow(s, 0.5 * (n + 5));
}

double heat_kernel(double t, const Point& x, int n) {
    require(t > 0.0, "heat kernel needs t > 0");
    check_dim(n);
    return std::exp(-sq_norm(x, n) / (4.0 * t)) / std::pow(4.0 * kPi * t, 0.5 * n);
}

double heat_kernel_dt(double t, const Point& x, int n) {
    const double k = heat_kernel(t, x, n);
    return k * (sq_norm(x, n) / (4.0 * t * t) - 0.5 * n / t);
}

double heat_kernel_dx(double t, const Point& x, int n, int axis) {
    if (axis >= n) return 0.0;
    return -x[axis] / (2.0 * t) * heat_kernel(t, x, n);
}

double ou_kernel(double t, const Point& x, const Point& y, int n) {
    require(t > 0.0, "OU kernel needs t > 0");
    check_dim(n);
    const double e = std::exp(-t), v = -std::expm1(-2.0 * t);
    Point d{e * x[0] - y[0], e * x[1] - y[1]};
    return std::exp(-sq_norm(d, n) / v) / std::pow(kPi * v, 0.5 * n);
}

bool kernel_table_sampled(KernelFamily family, double t, double h) {
    if (family == KernelFamily::heat) return 2.0 * t >= 2.25 * h * h;
    return t >= 6.0 * h;
}

std::vector<double> kernel_table(KernelFamily family, KernelPart part, double t, const Domain& domain) {
    require(t > 0.0, "kernel table needs t > 0");
    require(!domain.is_torus(), "kernel tables are defined on line and plane grids");
    const int n = domain.dim(), N = domain.N(), W = 2 * N - 1;
    const double h = domain.spacing();
    const bool sampled = kernel_table_sampled(family, t, h);
    std::vector<double> table(n == 1 ? W : static_cast<std::size_t>(W) * W);
    if (n == 1) {
        if (part == KernelPart::dx1) return table;
        for (int o = -(N - 1); o <= N - 1; ++o) {
            const double z = o * h;
            table[o + N - 1] = sampled ? h * sampled_value(family, part, t, {z, 0.0}, 1)
                                       : cell_value_1d(family, part, t, z - 0.5 * h, z + 0.5 * h);
        }
        return table;
    }
    const double h2 = h * h;
#pragma omp parallel for schedule(static)
    for (int o0 = -(N - 1); o0 <= N - 1; ++o0) {
        const double z0 = o0 * h;
        for (int o1 = -(N - 1); o1 <= N - 1; ++o1) {
            const double z1 = o1 * h;
            table[static_cast<std::size_t>(o0 + N - 1) * W + (o1 + N - 1)] =
                sampled ? h2 * sampled_value(family, part, t, {z0, z1}, 2)
                        : cell_value_2d(family, part, t, z0 - 0.5 * h, z0 + 0.5 * h, z1 - 0.5 * h, z1 + 0.5 * h);
        }
    }
    return table;
}

}  // namespace lps
