#include "lps/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lps/quadrature.hpp"

namespace lps {

namespace {

double bump_value(const Point& x, int dim, double c, double w) {
    const double y0 = (x[0] - c) / w, y1 = dim == 2 ? x[1] / w : 0.0;
    const double s = y0 * y0 + y1 * y1;
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
}

// int exp(-1/(1-y^2)) dy over (-1, 1) and the radial analogue in the plane.
double bump_mass(int dim) {
    const QuadratureRule g = composite_gauss_legendre(0.0, 1.0, 32, 16);
    double m = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double y = g.nodes[i], v = std::exp(-1.0 / (1.0 - y * y));
        m += g.weights[i] * (dim == 1 ? 2.0 * v : 2.0 * std::numbers::pi * y * v);
    }
    return m;
}

}  // namespace

const std::vector<std::string>& synth_names() {
    static const std::vector<std::string> names{"cos", "lacunary", "haar", "bump", "hermite2", "dirac-col"};
    return names;
}

GridFunction synth(const std::string& name, const SynthParams& p) {
    if (name == "haar") {
        require(p.depth >= 3 && p.depth <= 24, "haar depth must lie in [3, 24]");
        const Domain d = Domain::line(1 << p.depth, p.L);
        GridFunction f(d, 1, p.r);
        for (std::size_t c = 0; c < d.cells(); ++c) f(c, 0) = 2 * c < d.cells() ? 1.0 : -1.0;
        return f;
    }
    const Domain d(p.kind, p.N, p.L);
    if (name == "cos") {
        GridFunction f(d, 1, p.r);
        for (std::size_t c = 0; c < d.cells(); ++c) {
            // Exact angle reduction on the torus keeps cos(2 pi k j / N) at full precision.
            const double x = d.is_torus() ? 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(p.k) * static_cast<long>(c)) % d.N()) / d.N()
                                          : p.k * d.point(c)[0];
            f(c, 0) = std::cos(x);
        }
        return f;
    }
    if (name == "lacunary") {
        require(d.is_torus(), "lacunary witness lives on the torus");
        require(p.M >= 1 && p.M <= 30 && (2L << p.M) < d.N(), "lacunary needs 2^(M+1) < N");
        GridFunction f(d, p.M, p.r);
        for (std::size_t c = 0; c < d.cells(); ++c)
            for (int k = 1; k <= p.M; ++k) {
                const long j = ((1L << k) * static_cast<long>(c)) % d.N();
                f(c, k - 1) = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / d.N());
            }
        return f;
    }
    if (name == "bump" || name == "dirac-col") {
        require(!d.is_torus(), "bumps live on line, plane and Gaussian grids");
        require(p.width > 0.0, "bump width must be positive");
        const double scale = name == "bump" ? 1.0 : 1.0 / (bump_mass(d.dim()) * std::pow(p.width, d.dim()));
        GridFunction f(d, 1, p.r);
        for (std::size_t c = 0; c < d.cells(); ++c) f(c, 0) = scale * bump_value(d.point(c), d.dim(), p.center, p.width);
        return f;
    }
    if (name == "hermite2") {
        require(d.is_gauss(), "hermite2 lives on a Gaussian grid");
        GridFunction f(d, 1, p.r);
        for (std::size_t c = 0; c < d.cells(); ++c) {
            const double x = d.point(c)[0];
            f(c, 0) = 4.0 * x * x - 2.0;
        }
        return f;
    }
    throw InvalidArgument("unknown synth input '" + name + "'");
}

}  // namespace lps
