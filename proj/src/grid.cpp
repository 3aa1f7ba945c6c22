#include "lps/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lps/loops.hpp"

namespace lps {

double b_norm(std::span<const double> coords, double r) {
    if (coords.size() == 1) return std::abs(coords[0]);
    if (std::isinf(r)) {
        double m = 0.0;
        for (double c : coords) m = std::max(m, std::abs(c));
        return m;
    }
    if (r == 2.0) {
        double s = 0.0;
        for (double c : coords) s += c * c;
        return std::sqrt(s);
    }
    if (r == 1.0) {
        double s = 0.0;
        for (double c : coords) s += std::abs(c);
        return s;
    }
    // Scale by the max coordinate so large M or large r cannot overflow.
    double m = 0.0;
    for (double c : coords) m = std::max(m, std::abs(c));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    if (r == 4.0) {
        for (double c : coords) {
            double x = c / m;
            x *= x;
            s += x * x;
        }
        return m * std::sqrt(std::sqrt(s));
    }
    for (double c : coords) s += std::pow(std::abs(c) / m, r);
    return m * std::pow(s, 1.0 / r);
}

VectorValue::VectorValue(std::vector<double> coords, double r) : coords_(std::move(coords)), r_(r) {
    require(!coords_.empty(), "VectorValue needs M >= 1 coordinates");
    require(r_ >= 1.0, "VectorValue needs r >= 1");
    for (double c : coords_) require(std::isfinite(c), "VectorValue coordinates must be finite");
}

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::torus: return "torus";
        case DomainKind::line: return "line";
        case DomainKind::plane: return "plane";
        case DomainKind::gauss_line: return "gauss-line";
        case DomainKind::gauss_plane: return "gauss-plane";
    }
    return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
    if (s == "torus") return DomainKind::torus;
    if (s == "line") return DomainKind::line;
    if (s == "plane") return DomainKind::plane;
    if (s == "gauss-line") return DomainKind::gauss_line;
    if (s == "gauss-plane") return DomainKind::gauss_plane;
    throw InvalidArgument("unknown domain kind '" + s + "'");
}

Domain::Domain(DomainKind kind, int N, double L) : kind_(kind), N_(N), L_(kind == DomainKind::torus ? std::numbers::pi : L) {
    require(N >= 8 && N % 2 == 0, "domain needs N >= 8 and even");
    require(L > 0.0, "domain needs L > 0");
}

int Domain::dim() const { return (kind_ == DomainKind::plane || kind_ == DomainKind::gauss_plane) ? 2 : 1; }

std::size_t Domain::cells() const {
    return dim() == 2 ? static_cast<std::size_t>(N_) * N_ : static_cast<std::size_t>(N_);
}

double Domain::spacing() const { return is_torus() ? 2.0 * std::numbers::pi / N_ : 2.0 * L_ / N_; }

double Domain::axis_coord(int j) const {
    if (is_torus()) return 2.0 * std::numbers::pi * j / N_;
    return -L_ + (j + 0.5) * spacing();
}

Point Domain::point(std::size_t cell) const {
    if (dim() == 1) return {axis_coord(static_cast<int>(cell)), 0.0};
    return {axis_coord(static_cast<int>(cell / N_)), axis_coord(static_cast<int>(cell % N_))};
}

double Domain::weight(std::size_t cell) const {
    if (is_torus()) return 1.0 / N_;
    const double h = spacing();
    const double base = dim() == 2 ? h * h : h;
    if (!is_gauss()) return base;
    const Point x = point(cell);
    return base * std::exp(-(x[0] * x[0] + x[1] * x[1]));
}

double Domain::total_mass() const {
    std::vector<double> w(cells());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = weight(c);
    return pairwise_sum(w);
}

bool Domain::operator==(const Domain& o) const { return kind_ == o.kind_ && N_ == o.N_ && L_ == o.L_; }

GridFunction::GridFunction(Domain domain, int M, double r)
    : domain_(domain), M_(M), r_(r), values_(domain.cells() * static_cast<std::size_t>(std::max(M, 0)), 0.0) {
    require(M >= 1, "GridFunction needs M >= 1");
    require(r >= 1.0, "GridFunction needs r >= 1");
}

GridFunction::GridFunction(Domain domain, int M, double r, std::vector<double> values)
    : domain_(domain), M_(M), r_(r), values_(std::move(values)) {
    require(M >= 1, "GridFunction needs M >= 1");
    require(r >= 1.0, "GridFunction needs r >= 1");
    require(values_.size() == domain_.cells() * static_cast<std::size_t>(M),
            "GridFunction value count must equal cells * M");
}

GridFunction GridFunction::component(int k) const {
    GridFunction g(domain_, 1, 1.0);
    for (std::size_t c = 0; c < cells(); ++c) g.values_[c] = (*this)(c, k);
    return g;
}

void GridFunction::set_component(int k, const GridFunction& s) {
    require(s.domain() == domain_ && s.M() == 1, "set_component needs a scalar field on the same domain");
    for (std::size_t c = 0; c < cells(); ++c) (*this)(c, k) = s.values_[c];
}

GridFunction GridFunction::pointwise_norm() const {
    GridFunction g(domain_, 1, 1.0);
    loops::pointwise_norms(values_, M_, r_, g.values_);
    return g;
}

GridFunction GridFunction::with_r(double r) const { return GridFunction(domain_, M_, r, values_); }

bool GridFunction::same_shape(const GridFunction& o) const {
    return domain_ == o.domain_ && M_ == o.M_ && r_ == o.r_;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require(same_shape(o), "GridFunction shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require(same_shape(o), "GridFunction shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction embed_coordinate(const GridFunction& s, int k, int M, double r) {
    require(s.M() == 1, "embed_coordinate needs a scalar field");
    require(k >= 0 && k < M, "embedding coordinate out of range");
    GridFunction g(s.domain(), M, r);
    g.set_component(k, s);
    return g;
}

GridFunction torus_shift(const GridFunction& f, int shift) {
    require(f.domain().is_torus(), "torus_shift needs a torus domain");
    const int N = f.domain().N();
    GridFunction g(f.domain(), f.M(), f.r());
    for (int j = 0; j < N; ++j) {
        const int src = ((j - shift) % N + N) % N;
        auto in = f.at(src);
        std::copy(in.begin(), in.end(), g.at(j).begin());
    }
    return g;
}

double lp_norm(const GridFunction& f, double p) {
    require(p >= 1.0, "lp_norm needs p >= 1");
    std::vector<double> n(f.cells());
    loops::pointwise_norms(f.values(), f.M(), f.r(), n);
    const Domain& d = f.domain();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t c = 0; c < n.size(); ++c)
            if (d.weight(c) > 0.0) m = std::max(m, n[c]);
        return m;
    }
    double scale = 0.0;
    for (double v : n) scale = std::max(scale, v);
    if (scale == 0.0) return 0.0;
    for (std::size_t c = 0; c < n.size(); ++c) {
        const double x = n[c] / scale;
        n[c] = d.weight(c) * (p == 1.0 ? x : p == 2.0 ? x * x : std::pow(x, p));
    }
    return scale * std::pow(pairwise_sum(n), 1.0 / p);
}

double weighted_lq_norm(std::span<const double> a, double q) {
    require(q >= 1.0 && std::isfinite(q), "weighted_lq_norm needs q in [1, inf)");
    if (a.empty()) return 0.0;
    std::vector<double> terms(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) terms[i] = std::pow(std::abs(a[i]), q) / static_cast<double>(i + 1);
    return std::pow(pairwise_sum(terms), 1.0 / q);
}

double weighted_lq_norm(std::span<const VectorValue> a, double q) {
    std::vector<double> n(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) n[i] = a[i].norm();
    return weighted_lq_norm(std::span<const double>(n), q);
}

double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

}  // namespace lps
