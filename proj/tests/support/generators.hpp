#pragma once

// Seeded generators for property tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lps/grid.hpp"

namespace lps::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed * 0x9E3779B97F4A7C15ull + 1); }

inline double uniform(std::mt19937_64& g, double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }

inline double gauss(std::mt19937_64& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

/// Random field with i.i.d. N(0,1) coordinates.
inline GridFunction random_field(const Domain& d, int M, double r, std::mt19937_64& g) {
    GridFunction f(d, M, r);
    for (double& v : f.values()) v = gauss(g);
    return f;
}

/// Real trigonometric polynomial sum_{k<=degree} a_k cos k theta + b_k sin k theta, one per coordinate.
struct TrigPoly {
    std::vector<double> a, b;
    double operator()(double theta) const {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos(k * theta) + b[k] * std::sin(k * theta);
        return s;
    }
};

inline TrigPoly random_trig(int degree, std::mt19937_64& g, bool mean_zero = false) {
    TrigPoly p{std::vector<double>(degree + 1), std::vector<double>(degree + 1)};
    for (int k = 0; k <= degree; ++k) {
        p.a[k] = gauss(g);
        p.b[k] = k == 0 ? 0.0 : gauss(g);
    }
    if (mean_zero) p.a[0] = 0.0;
    return p;
}

inline GridFunction sample_trig(const Domain& d, const std::vector<TrigPoly>& coords, double r) {
    GridFunction f(d, static_cast<int>(coords.size()), r);
    for (std::size_t c = 0; c < d.cells(); ++c)
        for (std::size_t k = 0; k < coords.size(); ++k) f(c, static_cast<int>(k)) = coords[k](d.point(c)[0]);
    return f;
}

/// Smooth compactly supported bump exp(-1/(1-x^2)) scaled to [-w, w], centred at c.
inline double bump(double x, double c = 0.0, double w = 1.0) {
    const double y = (x - c) / w;
    return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0;
}

}  // namespace lps::testing
