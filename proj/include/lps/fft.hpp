#pragma once

#include <complex>
#include <span>
#include <vector>

namespace lps {

using cplx = std::complex<double>;

/// Real-to-complex transforms of length n (1-D) or n x n (2-D) backed by FFTW.
/// Plans are shared and created once per shape; execution is thread-safe.
/// forward: X_k = sum_j x_j e^{-2 pi i jk/n}; inverse includes the 1/n^d factor.
class RealFft {
public:
    explicit RealFft(int n, int dims = 1);

    int n() const { return n_; }
    int dims() const { return dims_; }
    std::size_t real_size() const { return dims_ == 1 ? n_ : static_cast<std::size_t>(n_) * n_; }
    std::size_t spectrum_size() const {
        return dims_ == 1 ? n_ / 2 + 1 : static_cast<std::size_t>(n_) * (n_ / 2 + 1);
    }

    void forward(std::span<const double> in, std::span<cplx> out) const;
    void inverse(std::span<const cplx> in, std::span<double> out) const;

    std::vector<cplx> forward(std::span<const double> in) const;
    std::vector<double> inverse(std::span<const cplx> in) const;

private:
    int n_;
    int dims_;
    void* r2c_;
    void* c2r_;
};

}  // namespace lps
