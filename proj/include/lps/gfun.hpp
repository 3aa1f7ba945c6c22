#pragma once

#include <optional>
#include <string>
#include <utility>

#include "lps/grid.hpp"
#include "lps/loops.hpp"
#include "lps/quadrature.hpp"
#include "lps/semigroup.hpp"

namespace lps {

/// time: t d/dt; space: t grad_x; full: both, combined in l^2 over the partials.
enum class GVariant { time, space, full };

std::string to_string(GVariant v);
GVariant gvariant_from_string(const std::string& s);

/// Restriction of the square-function integrand: the time integral runs over the part of
/// the grid inside [t_lo, t_hi] and the action kernel is cut at `radius`.
struct GWindow {
    double t_lo = 0.0;
    double t_hi = kInf;
    double radius = kInf;
};

struct GSpec {
    ActionPtr action;
    double q = 2.0;
    GVariant variant = GVariant::time;
    TimeGrid grid{};
    std::optional<GWindow> window{};
};

struct GResult {
    GridFunction g;
    /// max over cells of the integrand norm at the first and last time node.
    double head = 0.0;
    double tail = 0.0;
};

/// (int ||F_t f(x)||^q dt/t)^{1/q} on the spec's time grid, F_t the variant's derivative
/// field scaled by t.
GResult gfunction_report(const GridFunction& f, const GSpec& spec, loops::Exec exec = loops::Exec::parallel);
GridFunction gfunction(const GridFunction& f, const GSpec& spec, loops::Exec exec = loops::Exec::parallel);

/// Radial torus variants of P_r * f: radial uses d/dr, full uses (d/dr, (1/r) d/dtheta).
enum class RadialVariant { radial, full };

std::string to_string(RadialVariant v);
RadialVariant radial_variant_from_string(const std::string& s);

struct RadialWindow {
    double r_lo = 0.0;
    double r_hi = 1.0;
    double radius = kInf;
};

/// (int_0^1 (1-r)^q ||grad P_r * f||^q dr/(1-r))^{1/q}, composite Gauss-Legendre in log(1-r)
/// over 1 - r in [rho_min, 1].
GridFunction g_torus_radial(const GridFunction& f, double q, RadialVariant variant,
                            const std::optional<RadialWindow>& window = {}, double rho_min = 1e-9, int panels = 48,
                            int order = 16);

struct AreaSpec {
    double q = 2.0;
    double aperture = 1.0;
    TimeGrid grid{};
};

struct AreaResult {
    GridFunction A;
    /// Fraction of (cell, time node) pairs whose cone slice leaves the window.
    double clipped = 0.0;
};

/// Cone integral (int int_{|x-y| <= a t} t^q ||(d_t, grad_x) P_t f(y)||^q dy dt / t^{n+1})^{1/q}
/// for the Poisson action on a line or plane. Cells partially inside a cone slice count with
/// their exact covered fraction.
AreaResult area_function_report(const GridFunction& f, const AreaSpec& spec);
GridFunction area_function(const GridFunction& f, const AreaSpec& spec);

/// g-function of the subordinated OU action on a Gaussian domain.
GridFunction ou_gfunction(const GridFunction& f, double q, GVariant variant, const TimeGrid& grid = {});

/// Smooth cutoff phi(x, y): 1 on |x - y| <= n(n+3)/(1+|x|+|y|), 0 beyond twice that.
/// Returns (phi, 1 - phi).
std::pair<double, double> local_global_split(const Point& x, const Point& y, int n);

struct DominationReport {
    double K = 0.0;
    double constant = 0.0;
    /// max of g^P / (constant g^M) over cells where g^P exceeds 1e-9 of its scale.
    double max_ratio = 0.0;
    GridFunction g_poisson;
    GridFunction g_cesaro;
};

/// Compares the g-function of the subordinated family built on `base` with the
/// constant times the g-function of the Cesaro means of `base`.
DominationReport pointwise_domination_check(const GridFunction& f, double q, const ActionPtr& base,
                                            const TimeGrid& grid = {});

}  // namespace lps
