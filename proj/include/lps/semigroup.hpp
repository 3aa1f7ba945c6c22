#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "lps/grid.hpp"
#include "lps/kernels.hpp"
#include "lps/quadrature.hpp"

namespace lps {

enum class FixpointKind { mean, zero, gauss_mean };

/// Spatial restriction of an action's kernel: offsets farther than `radius` are dropped
/// (angular distance on the torus). The default is unrestricted.
struct KernelWindow {
    double radius = kInf;
    bool active() const { return radius < kInf; }
};

/// t -> T_t f for one fixed input f.
class Trajectory {
public:
    virtual ~Trajectory() = default;
    virtual GridFunction value(double t) const = 0;
    /// d/dt T_t f. The default is a central difference with step max(1e-4, 1e-3 t).
    virtual GridFunction time_derivative(double t) const;
    /// Spatial partials, one field per axis (d/dtheta on the torus).
    virtual std::vector<GridFunction> space_gradient(double t) const = 0;
};

/// A family t -> T_t acting on GridFunctions, with its fixpoint projector.
class SemigroupAction : public std::enable_shared_from_this<SemigroupAction> {
public:
    SemigroupAction(std::string name, FixpointKind fixpoint);
    virtual ~SemigroupAction() = default;

    const std::string& name() const { return name_; }
    FixpointKind fixpoint_kind() const { return fixpoint_; }
    virtual bool supports(const Domain& domain) const = 0;
    virtual bool supports_window() const { return true; }

    virtual std::unique_ptr<Trajectory> trajectory(const GridFunction& f, const KernelWindow& window = {}) const = 0;

    GridFunction apply(const GridFunction& f, double t) const;
    GridFunction time_derivative(const GridFunction& f, double t) const;
    std::vector<GridFunction> space_gradient(const GridFunction& f, double t) const;
    GridFunction fixpoint(const GridFunction& f) const;

protected:
    void check(const GridFunction& f, const KernelWindow& window) const;

private:
    std::string name_;
    FixpointKind fixpoint_;
};

using ActionPtr = std::shared_ptr<const SemigroupAction>;

/// Torus action by a real even Fourier multiplier, tabulated for k = 0 .. N/2.
class MultiplierAction : public SemigroupAction {
public:
    using Filler = std::function<void(int N, double t, bool dt, std::vector<double>& out)>;
    /// `exponent`, when given, states m(k, t) = exp(-exponent(k) t).
    MultiplierAction(std::string name, Filler filler, std::function<double(int)> exponent = {});

    bool supports(const Domain& domain) const override { return domain.is_torus(); }
    std::unique_ptr<Trajectory> trajectory(const GridFunction& f, const KernelWindow& window = {}) const override;

    /// Cached symbol table (value or d/dt).
    std::shared_ptr<const std::vector<double>> table(int N, double t, bool dt) const;
    /// Uncached evaluation.
    std::vector<double> compute(int N, double t, bool dt) const;
    const std::function<double(int)>& exponent() const { return exponent_; }

private:
    Filler filler_;
    std::function<double(int)> exponent_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<int, double, bool>, std::shared_ptr<const std::vector<double>>> cache_;
};

/// Line/plane action by truncated convolution with a kernel table.
class ConvolutionAction : public SemigroupAction {
public:
    ConvolutionAction(std::string name, KernelFamily family);

    bool supports(const Domain& domain) const override { return domain.is_euclidean(); }
    std::unique_ptr<Trajectory> trajectory(const GridFunction& f, const KernelWindow& window = {}) const override;

    KernelFamily family() const { return family_; }
    std::shared_ptr<const std::vector<double>> table(const Domain& domain, double t, KernelPart part) const;

private:
    KernelFamily family_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<int, double, double, int>, std::shared_ptr<const std::vector<double>>> cache_;
    mutable std::size_t cached_doubles_ = 0;
};

/// Ornstein-Uhlenbeck semigroup on the Gaussian kinds, Mehler kernel
///   O_t f(x) = int f(y) exp(-|y - e^{-t} x|^2 / v) / (pi v)^{n/2} dy,  v = 1 - e^{-2t}.
/// Each axis uses a matrix A_t with A_ij w_i = A_ji w_j for the grid weights
/// w_i = h e^{-x_i^2}, built from sampled Mehler values (or cell masses when v is
/// below the grid scale) and made stochastic through its diagonal. The plane acts by
/// A F A^T. The discrete operator is positive, fixes constants and the weighted mean,
/// and contracts every L^p of the discrete Gaussian measure.
class OuAction : public SemigroupAction {
public:
    OuAction();
    bool supports(const Domain& domain) const override { return domain.is_gauss(); }
    bool supports_window() const override { return false; }
    std::unique_ptr<Trajectory> trajectory(const GridFunction& f, const KernelWindow& window = {}) const override;
};

/// P_t = int phi_t(u) T_u du for an arbitrary base action.
class SubordinatedAction : public SemigroupAction {
public:
    SubordinatedAction(ActionPtr base, SubordinationRule rule);
    bool supports(const Domain& domain) const override { return base_->supports(domain); }
    bool supports_window() const override { return base_->supports_window(); }
    std::unique_ptr<Trajectory> trajectory(const GridFunction& f, const KernelWindow& window = {}) const override;

    const ActionPtr& base() const { return base_; }
    const SubordinationRule& rule() const { return rule_; }

private:
    ActionPtr base_;
    SubordinationRule rule_;
};

/// Continuous Cesaro means M_t = (1/t) int_0^t T_s ds of a base action (a family, not a
/// semigroup); t d/dt M_t f = T_t f - M_t f.
class CesaroAction : public SemigroupAction {
public:
    explicit CesaroAction(ActionPtr base);
    bool supports(const Domain& domain) const override { return base_->supports(domain); }
    bool supports_window() const override { return base_->supports_window(); }
    std::unique_ptr<Trajectory> trajectory(const GridFunction& f, const KernelWindow& window = {}) const override;
    const ActionPtr& base() const { return base_; }

private:
    ActionPtr base_;
};

ActionPtr heat_torus();
ActionPtr poisson_torus();
ActionPtr heat_euclid();
ActionPtr poisson_euclid();
ActionPtr ou_action();
/// Multiplier bases are subordinated symbol-wise; other bases through their trajectories.
ActionPtr subordinated(ActionPtr base, SubordinationRule rule = SubordinationRule::log_trapezoid());
ActionPtr cesaro(ActionPtr base);

/// Named actions: heat-line, heat-plane, heat-torus, poisson-line, poisson-plane,
/// poisson-torus, ou, ou-poisson, and subordinated-<base> for any base name.
ActionPtr make_action(const std::string& name, SubordinationRule rule = SubordinationRule::log_trapezoid());

/// Subordinated action applied to f at time t. Before applying, the rule is checked on the
/// scalar eigenrelation e^{-lambda u} -> e^{-sqrt(lambda) t} over lambda in [1e-2, 1e4];
/// a worse error than `tol` raises QuadratureError with the achieved error.
GridFunction subordinate(const ActionPtr& base, const GridFunction& f, double t,
                         const SubordinationRule& rule = SubordinationRule::log_trapezoid(), double tol = 1e-6);

/// Largest deviation of the rule from e^{-sqrt(lambda) t} on a log-sampled lambda range.
double subordination_error(const SubordinationRule& rule, double t);

/// Subordinated heat kernel at (t, x): int phi_t(u) heat_kernel(u, x) du.
double subordinated_heat_kernel(double t, const Point& x, int n,
                                const SubordinationRule& rule = SubordinationRule::log_trapezoid());

GridFunction cesaro_mean(const ActionPtr& action, const GridFunction& f, double t);

}  // namespace lps
