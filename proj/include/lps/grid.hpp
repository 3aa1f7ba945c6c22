#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lps/error.hpp"

namespace lps {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Norm of a point of the truncated sequence space l^r_M.
double b_norm(std::span<const double> coords, double r);

/// A single value of B = l^r_M.
class VectorValue {
public:
    VectorValue(std::vector<double> coords, double r);

    std::span<const double> coords() const { return coords_; }
    std::size_t dim() const { return coords_.size(); }
    double r() const { return r_; }
    double norm() const { return b_norm(coords_, r_); }

private:
    std::vector<double> coords_;
    double r_;
};

enum class DomainKind { torus, line, plane, gauss_line, gauss_plane };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& s);

using Point = std::array<double, 2>;

/// Discretized domain with its cell measure.
///
/// Torus cells sit at theta_j = 2 pi j / N with normalized weight 1/N.
/// Line/plane cells are midpoints of a uniform partition of [-L, L]^n with
/// Lebesgue weight (2L/N)^n. Gaussian kinds reuse the line/plane cells and
/// multiply the weight by exp(-|x|^2) (unnormalized Gaussian measure).
class Domain {
public:
    Domain(DomainKind kind, int N, double L = 1.0);

    static Domain torus(int N) { return Domain(DomainKind::torus, N); }
    static Domain line(int N, double L) { return Domain(DomainKind::line, N, L); }
    static Domain plane(int N, double L) { return Domain(DomainKind::plane, N, L); }
    static Domain gauss_line(int N, double L) { return Domain(DomainKind::gauss_line, N, L); }
    static Domain gauss_plane(int N, double L) { return Domain(DomainKind::gauss_plane, N, L); }

    DomainKind kind() const { return kind_; }
    int N() const { return N_; }
    double L() const { return L_; }
    int dim() const;
    std::size_t cells() const;

    bool is_torus() const { return kind_ == DomainKind::torus; }
    bool is_gauss() const { return kind_ == DomainKind::gauss_line || kind_ == DomainKind::gauss_plane; }
    bool is_euclidean() const { return kind_ == DomainKind::line || kind_ == DomainKind::plane; }

    /// Grid spacing along one axis (2 pi / N on the torus).
    double spacing() const;
    /// Coordinate of index j along one axis.
    double axis_coord(int j) const;
    /// Cell centre; the second component is 0 for one-dimensional kinds.
    Point point(std::size_t cell) const;
    double weight(std::size_t cell) const;
    double total_mass() const;

    bool operator==(const Domain& other) const;

private:
    DomainKind kind_;
    int N_;
    double L_;
};

/// Sampled B-valued function: `M` coordinates per cell, stored cell-major.
class GridFunction {
public:
    GridFunction(Domain domain, int M, double r);
    GridFunction(Domain domain, int M, double r, std::vector<double> values);

    /// Scalar function sampled at cell centres.
    template <class F>
    static GridFunction scalar(const Domain& domain, F&& fn) {
        GridFunction g(domain, 1, 1.0);
        for (std::size_t c = 0; c < domain.cells(); ++c) g.values_[c] = fn(domain.point(c));
        return g;
    }

    const Domain& domain() const { return domain_; }
    int M() const { return M_; }
    double r() const { return r_; }
    std::size_t cells() const { return domain_.cells(); }

    std::span<double> at(std::size_t cell) { return {values_.data() + cell * M_, static_cast<std::size_t>(M_)}; }
    std::span<const double> at(std::size_t cell) const {
        return {values_.data() + cell * M_, static_cast<std::size_t>(M_)};
    }
    double& operator()(std::size_t cell, int k) { return values_[cell * M_ + k]; }
    double operator()(std::size_t cell, int k) const { return values_[cell * M_ + k]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    /// Coordinate k as a scalar field.
    GridFunction component(int k) const;
    void set_component(int k, const GridFunction& scalar);
    /// Pointwise B-norm as a scalar field.
    GridFunction pointwise_norm() const;

    /// Same values reinterpreted with a different exponent r.
    GridFunction with_r(double r) const;

    bool same_shape(const GridFunction& other) const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double c);

private:
    Domain domain_;
    int M_;
    double r_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// Embed a scalar field as coordinate `k` of l^r_M.
GridFunction embed_coordinate(const GridFunction& scalar, int k, int M, double r);

/// Cyclic shift by `shift` cells along the (single) torus axis.
GridFunction torus_shift(const GridFunction& f, int shift);

/// Weighted L^p norm of the pointwise B-norm under the domain measure.
double lp_norm(const GridFunction& f, double p);

/// (sum_n |a_n|^q / n)^{1/q}, indices starting at n = 1.
double weighted_lq_norm(std::span<const VectorValue> a, double q);
/// Same on raw scalars (already-normed entries).
double weighted_lq_norm(std::span<const double> a, double q);

/// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> x);

}  // namespace lps
