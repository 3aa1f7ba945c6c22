#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lps/grid.hpp"

namespace lps {

/// Increasing dyadic filtration on [0,1): level n has 2^n cells, samples sit on the
/// 2^depth finest cells with equal weight.
class DyadicFiltration {
public:
    explicit DyadicFiltration(int depth);
    int depth() const { return depth_; }
    std::size_t samples() const { return std::size_t{1} << depth_; }
    /// Sample point (cell midpoint) of finest cell i.
    double point(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(samples()); }

private:
    int depth_;
};

/// B-valued sample on a dyadic filtration, M coordinates per finest cell.
class DyadicFunction {
public:
    DyadicFunction(DyadicFiltration filtration, int M, double r);
    DyadicFunction(DyadicFiltration filtration, int M, double r, std::vector<double> values);

    template <class F>
    static DyadicFunction scalar(int depth, F&& fn) {
        DyadicFunction f(DyadicFiltration(depth), 1, 1.0);
        for (std::size_t i = 0; i < f.samples(); ++i) f.values_[i] = fn(f.filtration().point(i));
        return f;
    }

    const DyadicFiltration& filtration() const { return filtration_; }
    int depth() const { return filtration_.depth(); }
    std::size_t samples() const { return filtration_.samples(); }
    int M() const { return M_; }
    double r() const { return r_; }

    std::span<double> at(std::size_t i) { return {values_.data() + i * M_, static_cast<std::size_t>(M_)}; }
    std::span<const double> at(std::size_t i) const { return {values_.data() + i * M_, static_cast<std::size_t>(M_)}; }
    double& operator()(std::size_t i, int k) { return values_[i * M_ + k]; }
    double operator()(std::size_t i, int k) const { return values_[i * M_ + k]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double norm_at(std::size_t i) const { return b_norm(at(i), r_); }
    DyadicFunction with_r(double r) const { return DyadicFunction(filtration_, M_, r, values_); }
    bool same_shape(const DyadicFunction& o) const;

    DyadicFunction& operator+=(const DyadicFunction& o);
    DyadicFunction& operator-=(const DyadicFunction& o);
    DyadicFunction& operator*=(double c);

private:
    DyadicFiltration filtration_;
    int M_;
    double r_;
    std::vector<double> values_;
};

DyadicFunction operator+(DyadicFunction a, const DyadicFunction& b);
DyadicFunction operator-(DyadicFunction a, const DyadicFunction& b);
DyadicFunction operator*(double c, DyadicFunction a);

/// (int ||f||^p)^{1/p} under the uniform measure; sup for p = inf.
double lp_norm(const DyadicFunction& f, double p);

/// E_n f: level-n cell averages, computed by a pairwise halving tree so that
/// E_n E_m = E_{min(n,m)} holds bit for bit. Levels above depth return f.
DyadicFunction cond_expect(const DyadicFunction& f, int n);
/// All of E_0 f .. E_depth f.
std::vector<DyadicFunction> cond_expect_all(const DyadicFunction& f);
/// d_n f = E_n f - E_{n-1} f for n = 1 .. depth.
std::vector<DyadicFunction> differences(const DyadicFunction& f);

/// (sum_{n=1}^{depth} ||d_n f||^q)^{1/q} pointwise, as a scalar sample.
DyadicFunction square_function(const DyadicFunction& f, double q);

/// sigma_n = (E_0 + ... + E_n) / (n + 1).
DyadicFunction cesaro_sigma(const DyadicFunction& f, int n);
/// sigma_n - sigma_{n-1}, n >= 1.
DyadicFunction delta_sigma(const DyadicFunction& f, int n);
/// (sum_{n=1}^{nmax} n^{q-1} ||delta_sigma_n f||^q)^{1/q} pointwise.
DyadicFunction cesaro_square_function(const DyadicFunction& f, double q, int nmax);

struct ProductPair {
    DyadicFunction direct, formula;
    double discrepancy;  ///< max cellwise coordinate difference
};
/// delta_sigma_m(delta_sigma_n f) against (1/(mn(m+1)(n+1))) sum_{j<=min(m,n)} j^2 d_j f.
ProductPair delta_sigma_product(const DyadicFunction& f, int m, int n);

/// Mixed norm (sum_blocks ||block||_inner^outer)^{1/outer} on `blocks * block` coordinates.
struct MixedNorm {
    int block = 1;
    double inner = 2.0;
    double outer = 2.0;
    static MixedNorm plain(int M, double r) { return {M, r, r}; }
    double operator()(std::span<const double> x) const;
};

/// Constant multiplying sequence v_1 .. v_K of linear maps (target rows x source cols).
class MultiplyingSequence {
public:
    MultiplyingSequence(std::vector<Eigen::MatrixXd> maps, MixedNorm source, MixedNorm target);

    static MultiplyingSequence identity(int K, int M, double r);
    /// v_k = (-1)^k Id.
    static MultiplyingSequence signs(int K, int M, double r);
    /// v_k b = (0, .., 0, b, 0, ..) with b in block k of l^q(l^r_M) over K blocks.
    static MultiplyingSequence q_embedding(int K, int M, double r, double q);

    std::size_t size() const { return maps_.size(); }
    const Eigen::MatrixXd& operator[](std::size_t k) const { return maps_[k]; }
    const MixedNorm& source() const { return source_; }
    const MixedNorm& target() const { return target_; }
    /// sup_k ||v_k||. Exact for single-block norms with r in {1, 2, inf} and for
    /// block embeddings; otherwise the best ratio over basis and sampled vectors.
    double sup_norm() const { return sup_norm_; }

private:
    std::vector<Eigen::MatrixXd> maps_;
    MixedNorm source_, target_;
    double sup_norm_;
};

/// Operator norm of A between the given norms (see MultiplyingSequence::sup_norm).
double operator_norm(const Eigen::MatrixXd& A, const MixedNorm& source, const MixedNorm& target);

struct TransformResult {
    std::vector<std::vector<double>> partial;  ///< (Tf)_n for n = 1 .. depth, cell-major target coords
    int target_dim = 0;
    std::vector<double> maximal;               ///< sup_n ||(Tf)_n|| per cell
    double target_norm_at(std::size_t n, std::size_t cell, const MixedNorm& norm) const;
};
/// (Tf)_n = sum_{k<=n} v_k d_k f with the maximal function in the target norm.
TransformResult martingale_transform(const DyadicFunction& f, const MultiplyingSequence& v);

struct ProjectionResult {
    DyadicFunction Rh;
    std::vector<DyadicFunction> composite;  ///< n delta_sigma_n(R h), n = 1 .. N
};
/// R h = sum_n delta_sigma_n(h_n) for h_1 .. h_N.
ProjectionResult discrete_projection_R(std::span<const DyadicFunction> h);

/// || (sum_n ||a_n||^q / n)^{1/q} ||_{L^p} for a_1 .. a_N.
double weighted_lq_lp_norm(std::span<const DyadicFunction> a, double q, double p);

/// j^2 (sum_{m>=j} 1/(m(m+1)^q))^{1/q} (sum_{n>=j} 1/(n(n+1)^{q'}))^{1/q'}.
double projection_multiplier_norm(int j, double q);
/// The same for j = 1 .. jmax.
std::vector<double> projection_multiplier_profile(int jmax, double q);

struct DoobRow {
    double lambda, lhs, rhs;  ///< lambda m{f* > lambda} and int_{f* > lambda} ||f||
};
/// Weak-type profile of the Doob maximal function f* = sup_n ||E_n f|| on a lambda grid
/// (the distinct values of f* below its max when `lambdas` is empty).
std::vector<DoobRow> doob_profile(const DyadicFunction& f, std::vector<double> lambdas = {});

struct MartingaleTrialSpec {
    int depth = 10;
    int M = 1;
    double r = 2.0;
    double q = 2.0;
    double p = 2.0;
    int trials = 100;
    std::uint64_t seed = 1;
    int projection_terms = 16;
};

struct MartingaleTrialRow {
    int trial;
    std::string statistic;
    double value;
};

/// Random Gaussian martingales, one RNG stream per trial. Statistics per trial:
/// parseval_defect, qq_max_minus_sq, product_defect, r_ratio, doob_margin.
std::vector<MartingaleTrialRow> martingale_trials(const MartingaleTrialSpec& spec);

/// Gaussian sample with i.i.d. coordinates from `rng`-style seed/stream.
DyadicFunction random_dyadic(int depth, int M, double r, std::uint64_t seed, std::uint64_t stream);

}  // namespace lps
