#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lps/gfun.hpp"
#include "lps/grid.hpp"

namespace lps {

/// Named square-function operator:
///   gfun-torus     g-function of the subordinated heat semigroup on the torus
///   poisson-torus  g-function of the closed-form torus Poisson semigroup
///   radial-torus   radial torus g-function (variant time -> d/dr, full -> full gradient)
///   gfun-euclid    Poisson g-function on a line or plane
///   area           Poisson area function on a line or plane
///   ou-gfun        g-function of the subordinated OU semigroup
struct OpSpec {
    std::string id = "gfun-torus";
    double q = 2.0;
    GVariant variant = GVariant::time;
    TimeGrid grid{};
    double aperture = 1.0;

    bool supports(const Domain& d) const;
    GridFunction apply(const GridFunction& f, loops::Exec exec = loops::Exec::parallel) const;
};

const std::vector<std::string>& operator_ids();

/// lp_norm(op f, p) / lp_norm(f, p).
double ratio(const OpSpec& op, const GridFunction& f, double p, loops::Exec exec = loops::Exec::parallel);

/// Scalar fields spanning the search space: cos/sin of the given frequencies on the torus,
/// Gaussian-windowed cos/sin along the first axis on lines and planes, Hermite polynomials
/// of the first coordinate on Gaussian kinds. Constants are excluded.
std::vector<std::vector<double>> search_basis(const Domain& d, const std::vector<int>& frequencies);

struct SearchSpec {
    Domain domain = Domain::torus(256);
    int M = 1;
    double r = 2.0;
    double p = 2.0;
    int budget = 500;     ///< ratio evaluations per restart
    int restarts = 4;
    std::uint64_t seed = 1;
    std::vector<int> frequencies;  ///< basis frequencies; 1 .. 16 when empty
    /// Optional starting coefficients for restart 0, laid out [coord][basis function].
    std::optional<std::vector<double>> initial;
};

struct TracePoint {
    int iteration;
    double ratio;
};

struct NormEstimate {
    std::string op;
    double q = 2.0;
    GVariant variant = GVariant::time;
    double p = 2.0;
    double r = 2.0;
    int M = 1;
    double estimate = 0.0;
    GridFunction witness{Domain::torus(8), 1, 2.0};
    std::vector<TracePoint> trace;  ///< accepted improvements of the best restart
    std::uint64_t seed = 0;
    int best_restart = 0;
};

/// Multi-restart ascent. Restart i draws from stream i of the seed; restart 0 starts from
/// `initial` when given. Each step multiplies one random coefficient by (1 + s xi),
/// xi ~ N(0, 1), s = 0.5^{floor(i/50)}, renormalizes to unit L^p norm and keeps the change
/// only when the ratio increases. Ties between restarts go to the lowest index.
NormEstimate extremal_search(const OpSpec& op, const SearchSpec& spec);

/// Distinct frequencies ceil(1.3^k), k = 1 .. M, bumped upward to stay strictly increasing.
std::vector<int> lacunary_frequencies(int M);

struct CotypeRow {
    int M;
    int N;
    double witness_ratio;  ///< ratio of the lacunary witness itself
    NormEstimate estimate;
    double growth;         ///< estimate / previous estimate (0 for the first row)
};

struct CotypeSpec {
    double r = 2.0;
    double q = 2.0;
    double p = 2.0;
    std::vector<int> M_list{4, 8, 16};
    int budget = 100;
    int restarts = 2;
    std::uint64_t seed = 1;
};

/// For each M: the torus l^r_M-valued gfun-torus search seeded with the lacunary witness
/// f = sum_k e_k cos(lambda_k theta). Grid size is the smallest power of two >= 3 lambda_M
/// (at least 256), and the time grid spans [min(1e-3, 0.01/lambda_M), 50] with 200 nodes.
std::vector<CotypeRow> cotype_sweep(const CotypeSpec& spec);

struct DualityResult {
    double lhs, rhs, relative_error;
};

/// int (f - Ff)(g - Fg) dmu against 4 int int (t d_t P_t f)(t d_t P_t g) dt/t dmu, P the
/// subordinated heat semigroup on the torus.
DualityResult duality_pairing_check(const GridFunction& f, const GridFunction& g,
                                    const TimeGrid& grid = TimeGrid(1e-5, 50.0, 200));

struct EquivalenceResult {
    double g1 = 0.0, g2 = 0.0;  ///< ||G^1_q f||_p and ||G^2_q f||_p (time and space parts)
    double ratio = 1.0;         ///< g1 / g2, 1 for constant f
    double identity_error = 0.0;
};

/// Time/space g-function comparison for the Poisson semigroup on a line or plane, with
/// the factorization t^2 d_i d_t P_{2t} * f = (t d_i P_t) * (t d_t P_t) * f checked on
/// the grid (max error over the window relative to the max of the left side).
EquivalenceResult time_space_equivalence_check(const GridFunction& f, double q, double p,
                                               const TimeGrid& grid = {});

/// The factorization check alone at the given times, on a grid padded to `pad` times
/// the window with the same spacing.
double factorization_error(const GridFunction& f, const std::vector<double>& times, int pad = 32);

/// Time-fibered function: one slice per node of `grid`.
struct TimeFibered {
    TimeGrid grid;
    std::vector<GridFunction> slices;
};

/// || (sum_k w_k ||h_k(x)||^q)^{1/q} ||_{L^p}.
double fibered_norm(const TimeFibered& h, double q, double p);

/// Q h = sum_k w_k (t_k d_t P_{t_k}) * h_k for the Poisson semigroup on a line or plane.
GridFunction projection_Q(const TimeFibered& h);

/// ||G^1_q(Q h)||_p / ||h|| (0 for h = 0), G^1 on the fiber grid.
double projection_boundedness_check(const TimeFibered& h, double q, double p);

/// h_k = t_k d_t P_{t_k} f.
TimeFibered range_fiber(const GridFunction& f, const TimeGrid& grid);

struct WeakTypeResult {
    double value = 0.0;   ///< sup_lambda lambda m{op f > lambda} / ||f||_1
    double lambda = 0.0;  ///< a maximizing level
};

/// With an empty grid the sup runs over all levels: as lambda rises to a value v of
/// op f, m{op f > lambda} tends to the mass where op f >= v.
WeakTypeResult weak_type_profile(const OpSpec& op, const GridFunction& f, const std::vector<double>& lambdas = {});

}  // namespace lps
