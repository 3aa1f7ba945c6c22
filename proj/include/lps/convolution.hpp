#pragma once

#include <span>
#include <vector>

#include "lps/fft.hpp"
#include "lps/grid.hpp"

namespace lps {

/// Truncated linear convolution on a line/plane grid via FFTs zero-padded to 2N per axis.
/// Tables follow the kernel_table offset layout.
class PaddedConvolution {
public:
    explicit PaddedConvolution(const Domain& domain);

    const Domain& domain() const { return domain_; }
    /// Spectrum of N^n samples (row-major for the plane).
    std::vector<cplx> transform(std::span<const double> samples) const;
    /// Spectrum of a (2N-1)^n offset table.
    std::vector<cplx> transform_table(std::span<const double> table) const;
    /// out = samples * table from their spectra; out has N^n entries.
    void apply(std::span<const cplx> sample_spec, std::span<const cplx> table_spec, std::span<double> out) const;

    std::vector<double> convolve(std::span<const double> table, std::span<const double> samples) const;

private:
    Domain domain_;
    RealFft fft_;
};

/// Coordinate k of a GridFunction as a contiguous array (cell order).
std::vector<double> component_values(const GridFunction& f, int k);
void set_component_values(GridFunction& f, int k, std::span<const double> values);

}  // namespace lps
