#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lps/grid.hpp"
#include "lps/quadrature.hpp"

namespace lps {

/// Operator-valued kernel k(x, y) acting on a discretized time fiber. The fiber is
/// L^2(dt/t) on `fiber` when given, plain l^2 of the matrix size otherwise.
struct OperatorKernel {
    int n = 1;
    std::function<Eigen::MatrixXd(const Point& x, const Point& y)> eval;
    std::optional<TimeGrid> fiber;
    std::optional<Eigen::MatrixXd> Lambda;

    /// Scalar kernel (1 x 1 fiber).
    static OperatorKernel scalar(int n, std::function<double(const Point&, const Point&)> k);
    /// phi -> Phi^i_t(x - y) phi(t) with Phi^i_t = t d_{x_i} P_t (Poisson on R^n).
    static OperatorKernel poisson_fiber(int n, int axis, const TimeGrid& fiber);
};

/// Fiber operator norm of A: 20 power-iteration steps from the all-ones vector.
double fiber_norm(const Eigen::MatrixXd& A, const std::optional<TimeGrid>& fiber);

struct CzRow {
    double rho;
    double size;      ///< sup of |x - y|^n ||k(x, y)|| over sampled |x - y| = rho
    double gradient;  ///< sup of |x - y|^{n+1} ||grad_x k(x, y)||
};

struct CzProfile {
    std::vector<CzRow> rows;
    double max_size = 0.0, max_gradient = 0.0;
};

/// Size and gradient profile over the radii. Points are x = y + rho e for the base
/// points y (origin by default) and directions e (+-1 on the line, 16 angles on the
/// plane); the gradient in x uses central differences with step 1e-4 rho and
/// combines the axis norms in l^2.
CzProfile cz_bound_profile(const OperatorKernel& kernel, const std::vector<double>& radii,
                           const std::vector<Point>& bases = {Point{0.0, 0.0}});

struct TorusKernelValues {
    double k, k0, residual;
};

/// Torus kernel k_t(phi) against its Euclidean model k0_t(phi) = 2 (t^2 - phi^2) / (t^2 + phi^2)^2
/// inside the window 0 < t < log(1/(1 - delta)), |phi| < delta.
TorusKernelValues torus_kernel_decompose(double t, double phi, double delta);
double torus_kernel(double t, double phi);
double torus_kernel_model(double t, double phi);

/// sup of |residual| / (t / (t^2 + phi^2) + 1) over a window grid: t log-spaced on
/// [1e-6 eps, eps (1 - 1e-9)] with nt nodes, phi uniform on (-delta, delta) with nphi nodes.
double torus_residual_bound(double delta, int nt, int nphi);

/// k_{s,t}(x) = s t d_u^2 P_u(x) at u = s + t.
double projection_kernel_kst(double s, double t, const Point& x, int n);

/// sup of |k_{s,t}(x)| (|x| + s + t)^{n+2} / (s t) with s, t on [lo, hi] and |x| on
/// {0} u [lo, hi], all log-sampled with `per_decade` points (x along the first axis).
double kst_bound_ratio(int n, double lo, double hi, int per_decade);

/// Largest mean oscillation over dyadic cubes of the window (torus read as [0, 1)),
/// levels 0 .. max_level (all levels down to single cells by default).
double bmo_norm(const GridFunction& f, int max_level = -1);

}  // namespace lps
