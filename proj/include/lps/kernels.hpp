#pragma once

#include <vector>

#include "lps/grid.hpp"

namespace lps {

/// (1 - r^2) / (1 + r^2 - 2 r cos theta), normalized for d theta / 2 pi.
double poisson_kernel_torus(double r, double theta);
/// d/dr of the torus Poisson kernel.
double poisson_kernel_torus_dr(double r, double theta);

/// c_n t / (|x|^2 + t^2)^{(n+1)/2}, c_n = Gamma((n+1)/2) / pi^{(n+1)/2}, n in {1, 2}.
double poisson_kernel_euclid(double t, const Point& x, int n);
double poisson_kernel_euclid_dt(double t, const Point& x, int n);
double poisson_kernel_euclid_dtt(double t, const Point& x, int n);
double poisson_kernel_euclid_dx(double t, const Point& x, int n, int axis);
/// d/dx_axis d/dt of the Euclidean Poisson kernel.
double poisson_kernel_euclid_dxdt(double t, const Point& x, int n, int axis);

/// (4 pi t)^{-n/2} exp(-|x|^2 / 4t).
double heat_kernel(double t, const Point& x, int n);
double heat_kernel_dt(double t, const Point& x, int n);
double heat_kernel_dx(double t, const Point& x, int n, int axis);

/// Mehler kernel (pi (1 - e^{-2t}))^{-n/2} exp(-|e^{-t} x - y|^2 / (1 - e^{-2t})), with respect to dy.
double ou_kernel(double t, const Point& x, const Point& y, int n);

enum class KernelFamily { heat, poisson };
enum class KernelPart { value, dt, dx0, dx1 };

/// Convolution weights on the offsets of a line/plane grid: (2N-1)^n entries, offset
/// (o0, o1) at index (o0 + N - 1) * (2N - 1) + (o1 + N - 1), so that
///   (K * f)(x_i) = sum_j table[i - j] f_j
/// already includes the cell measure. Kernels resolved by the grid are sampled at the
/// offsets; narrower ones are integrated exactly over each cell, which keeps t -> 0 an
/// identity limit.
std::vector<double> kernel_table(KernelFamily family, KernelPart part, double t, const Domain& domain);

/// True when kernel_table samples the kernel (false: cell-integrated).
bool kernel_table_sampled(KernelFamily family, double t, double h);

}  // namespace lps
