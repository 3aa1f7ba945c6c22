#include "lps/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "lps/error.hpp"

namespace lps {

namespace {

// Jacobi-matrix nodes, refined by Newton steps on the orthonormal recurrence; the weights are
// the Christoffel numbers 1 / sum_k p_k(x)^2, which keep full relative precision.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, offdiag, Eigen::EigenvaluesOnly);
    const auto n = diag.size();
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i), christoffel = 0.0;
        for (int it = 0; it < 3; ++it) {
            double p0 = 0.0, p1 = 1.0 / std::sqrt(mu0), d0 = 0.0, d1 = 0.0;
            christoffel = p1 * p1;
            for (Eigen::Index k = 0; k < n; ++k) {
                const double bk = k > 0 ? offdiag(k - 1) : 0.0;
                const double bn = k + 1 < n ? offdiag(k) : 1.0;
                const double p2 = ((x - diag(k)) * p1 - bk * p0) / bn;
                const double d2 = ((x - diag(k)) * d1 + p1 - bk * d0) / bn;
                p0 = p1, p1 = p2, d0 = d1, d1 = d2;
                if (k + 1 < n) christoffel += p1 * p1;
            }
            if (d1 != 0.0) x -= p1 / d1;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / christoffel;
    }
    return rule;
}

constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1/sqrt(pi)

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
    require(n >= 1, "Gauss-Legendre needs n >= 1");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd e(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) e(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    QuadratureRule r = golub_welsch(d, e, 2.0);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

QuadratureRule gauss_laguerre(int n, double alpha) {
    require(n >= 1, "Gauss-Laguerre needs n >= 1");
    require(alpha > -1.0, "Gauss-Laguerre needs alpha > -1");
    Eigen::VectorXd d(n);
    Eigen::VectorXd e(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) d(k) = 2.0 * k + 1.0 + alpha;
    for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(k * (k + alpha));
    return golub_welsch(d, e, std::tgamma(alpha + 1.0));
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
    require(panels >= 1 && b > a, "composite rule needs panels >= 1 and b > a");
    const QuadratureRule base = gauss_legendre(order);
    QuadratureRule r;
    const double len = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * len;
        for (int i = 0; i < order; ++i) {
            r.nodes.push_back(lo + 0.5 * len * (base.nodes[i] + 1.0));
            r.weights.push_back(0.5 * len * base.weights[i]);
        }
    }
    return r;
}

TimeGrid::TimeGrid(double t_min, double t_max, int K) : t_min_(t_min), t_max_(t_max) {
    require(t_min > 0.0 && t_min < t_max, "TimeGrid needs 0 < t_min < t_max");
    require(K >= 16, "TimeGrid needs K >= 16");
    const double a = std::log(t_min), b = std::log(t_max);
    step_ = (b - a) / (K - 1);
    nodes_.resize(K);
    weights_.assign(K, step_);
    for (int k = 0; k < K; ++k) nodes_[k] = std::exp(a + k * step_);
    nodes_.front() = t_min;
    nodes_.back() = t_max;
    weights_.front() *= 0.5;
    weights_.back() *= 0.5;
}

std::string to_string(SubordinationKind k) {
    return k == SubordinationKind::log_trapezoid ? "log-trapezoid" : "gauss-laguerre";
}

SubordinationKind subordination_kind_from_string(const std::string& s) {
    if (s == "log-trapezoid") return SubordinationKind::log_trapezoid;
    if (s == "gauss-laguerre") return SubordinationKind::gauss_laguerre;
    throw InvalidArgument("unknown subordination rule '" + s + "'");
}

SubordinationRule SubordinationRule::log_trapezoid(double u_lo, double u_hi, double h) {
    require(u_lo > 0.0 && u_lo < u_hi && h > 0.0, "log_trapezoid needs 0 < u_lo < u_hi, h > 0");
    SubordinationRule r;
    r.kind_ = SubordinationKind::log_trapezoid;
    const double a = std::log(u_lo), b = std::log(u_hi);
    const int n = static_cast<int>(std::ceil((b - a) / h)) + 1;
    const double step = (b - a) / (n - 1);
    r.u_.resize(n);
    r.du_.resize(n);
    for (int i = 0; i < n; ++i) {
        r.u_[i] = std::exp(a + i * step);
        r.du_[i] = step * r.u_[i] * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    }
    r.u_.front() = u_lo;
    r.u_.back() = u_hi;
    return r;
}

SubordinationRule SubordinationRule::gauss_laguerre(int n) {
    SubordinationRule r;
    r.kind_ = SubordinationKind::gauss_laguerre;
    QuadratureRule q = lps::gauss_laguerre(n, -0.5);
    r.lag_x_ = std::move(q.nodes);
    r.lag_w_ = std::move(q.weights);
    for (double& w : r.lag_w_) w *= kInvSqrtPi;
    return r;
}

namespace {

double phi_t(double t, double u) {
    return std::exp(std::log(t * 0.5 * kInvSqrtPi) - t * t / (4.0 * u) - 1.5 * std::log(u));
}

}  // namespace

// Trapezoid sum over the nodes u_hi e^{jh}, j >= 0, continued to infinity and lumped onto
// the last node; the base trajectory is frozen beyond u_hi.
double SubordinationRule::tail_sum(double t, bool dt) const {
    const double b = u_.back();
    const double step = std::log(u_[u_.size() - 1] / u_[u_.size() - 2]);
    double s = 0.0;
    for (int j = 0; j < 2000; ++j) {
        const double u = b * std::exp(j * step);
        const double term = step * u * phi_t(t, u) * (dt ? (1.0 / t - t / (2.0 * u)) : 1.0);
        s += term;
        if (std::abs(term) < 1e-18 * std::abs(s)) break;
    }
    return s;
}

std::vector<double> SubordinationRule::weights(double t) const {
    require(kind_ == SubordinationKind::log_trapezoid, "weights() is defined for the log-trapezoid rule");
    require(t > 0.0, "subordination needs t > 0");
    std::vector<double> w(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i) w[i] = du_[i] * phi_t(t, u_[i]);
    w.front() += std::erfc(t / (2.0 * std::sqrt(u_.front())));
    w.back() = tail_sum(t, false);
    return w;
}

std::vector<double> SubordinationRule::weight_derivatives(double t) const {
    require(kind_ == SubordinationKind::log_trapezoid, "weight_derivatives() is defined for the log-trapezoid rule");
    require(t > 0.0, "subordination needs t > 0");
    std::vector<double> w(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i) w[i] = du_[i] * phi_t(t, u_[i]) * (1.0 / t - t / (2.0 * u_[i]));
    const double lo = u_.front();
    w.front() -= kInvSqrtPi / std::sqrt(lo) * std::exp(-t * t / (4.0 * lo));
    w.back() = tail_sum(t, true);
    return w;
}

std::vector<double> SubordinationRule::laguerre_times(double t) const {
    require(kind_ == SubordinationKind::gauss_laguerre, "laguerre_times() is defined for the Gauss-Laguerre rule");
    std::vector<double> u(lag_x_.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = t * t / (4.0 * lag_x_[i]);
    return u;
}

double SubordinationRule::apply(const std::function<double(double)>& base, double t) const {
    double s = 0.0;
    if (kind_ == SubordinationKind::log_trapezoid) {
        const auto w = weights(t);
        for (std::size_t i = 0; i < u_.size(); ++i)
            if (w[i] != 0.0) s += w[i] * base(u_[i]);
        return s;
    }
    const auto u = laguerre_times(t);
    for (std::size_t i = 0; i < u.size(); ++i) s += lag_w_[i] * base(u[i]);
    return s;
}

double SubordinationRule::apply_derivative(const std::function<double(double)>& base, double t) const {
    if (kind_ == SubordinationKind::log_trapezoid) {
        const auto w = weight_derivatives(t);
        double s = 0.0;
        for (std::size_t i = 0; i < u_.size(); ++i)
            if (w[i] != 0.0) s += w[i] * base(u_[i]);
        return s;
    }
    const double h = std::max(1e-4, 1e-3 * t);
    require(t > h, "t too close to 0 for the finite-difference step");
    return (apply(base, t + h) - apply(base, t - h)) / (2.0 * h);
}

double subordinator_density(double s) {
    if (s <= 0.0) return 0.0;
    return 0.5 * kInvSqrtPi * std::exp(-0.25 / s) / (s * std::sqrt(s));
}

double subordinator_density_derivative(double s) {
    if (s <= 0.0) return 0.0;
    return subordinator_density(s) * (0.25 / (s * s) - 1.5 / s);
}

double subordinator_moment_K(int panels, int order) {
    const double split = std::log(1.0 / 6.0);
    auto integrate = [&](double a, double b) {
        const QuadratureRule q = composite_gauss_legendre(a, b, panels, order);
        double s = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double x = std::exp(q.nodes[i]);
            s += q.weights[i] * x * x * std::abs(subordinator_density_derivative(x));
        }
        return s;
    };
    // Left of the split the integrand is below 1e-50 for s < 2e-3; the right tail
    // decays like s^{-1/2} and is negligible past s = e^{72}.
    return integrate(std::log(2e-3), split) + integrate(split, 72.0);
}

}  // namespace lps
