#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lps {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b] (Golub-Welsch).
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// n-point generalized Gauss-Laguerre rule for the weight u^alpha e^{-u} on (0, inf).
QuadratureRule gauss_laguerre(int n, double alpha);

/// Composite Gauss-Legendre: `panels` equal panels of `order` points on [a, b].
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order);

/// Log-spaced nodes with trapezoid weights in log t, so that sum_k w_k g(t_k)
/// approximates int_{t_min}^{t_max} g(t) dt/t.
class TimeGrid {
public:
    TimeGrid(double t_min = 1e-3, double t_max = 50.0, int K = 200);

    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    /// Log-spacing of the nodes.
    double step() const { return step_; }

private:
    double t_min_, t_max_, step_;
    std::vector<double> nodes_, weights_;
};

enum class SubordinationKind { log_trapezoid, gauss_laguerre };

std::string to_string(SubordinationKind k);
SubordinationKind subordination_kind_from_string(const std::string& s);

/// Quadrature for the subordination integral
///   P_t = int_0^inf phi_t(u) T_u du,   phi_t(u) = t e^{-t^2/4u} / (2 sqrt(pi) u^{3/2}).
///
/// log_trapezoid: fixed u-nodes, log-spaced on [u_lo, u_hi] with step h; the mass below
/// u_lo is assigned to T_{u_lo} (weight erfc(t / 2 sqrt(u_lo))) and the mass above u_hi
/// to T_{u_hi} (weight erf(t / 2 sqrt(u_hi))). Weights depend on t but nodes do not, so a
/// trajectory sampled once at the nodes serves every t; weights are differentiable in t.
///
/// gauss_laguerre: P_t = pi^{-1/2} sum_i w_i T_{t^2 / 4 x_i}, with the generalized
/// Laguerre rule for u^{-1/2} e^{-u}; nodes depend on t.
class SubordinationRule {
public:
    static SubordinationRule log_trapezoid(double u_lo = 1e-12, double u_hi = 1e12, double h = 0.2);
    static SubordinationRule gauss_laguerre(int n = 64);

    SubordinationKind kind() const { return kind_; }

    /// u-nodes of the log-trapezoid rule (endpoints included).
    const std::vector<double>& u_nodes() const { return u_; }
    /// Weights for P_t and d/dt P_t on u_nodes() (log-trapezoid only).
    std::vector<double> weights(double t) const;
    std::vector<double> weight_derivatives(double t) const;

    /// Gauss-Laguerre base times t^2 / (4 x_i) and weights pi^{-1/2} w_i.
    std::vector<double> laguerre_times(double t) const;
    const std::vector<double>& laguerre_weights() const { return lag_w_; }

    /// Scalar subordination of a base function u -> g(u) (e.g. a multiplier or a kernel value).
    double apply(const std::function<double(double)>& base, double t) const;
    double apply_derivative(const std::function<double(double)>& base, double t) const;

private:
    double tail_sum(double t, bool dt) const;
    SubordinationKind kind_ = SubordinationKind::log_trapezoid;
    std::vector<double> u_, du_;       // nodes and trapezoid weights (u * ds)
    std::vector<double> lag_x_, lag_w_;
};

/// phi(s) = e^{-1/4s} / (2 sqrt(pi) s^{3/2}): the density of the subordinator at unit time.
double subordinator_density(double s);
double subordinator_density_derivative(double s);

/// K = int_0^inf s |phi'(s)| ds by composite Gauss-Legendre in log s, split at s = 1/6
/// where phi' changes sign. `panels` per side controls refinement.
double subordinator_moment_K(int panels = 40, int order = 16);

}  // namespace lps
