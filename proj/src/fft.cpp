#include "lps/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "lps/error.hpp"

namespace lps {

namespace {

struct PlanPair {
    fftw_plan r2c;
    fftw_plan c2r;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// FFTW planning is not thread-safe; plans live for the whole process.
PlanPair plans_for(int n, int dims) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto it = cache.find({n, dims});
    if (it != cache.end()) return it->second;
    const std::size_t rs = dims == 1 ? n : static_cast<std::size_t>(n) * n;
    const std::size_t cs = dims == 1 ? n / 2 + 1 : static_cast<std::size_t>(n) * (n / 2 + 1);
    double* r = fftw_alloc_real(rs);
    fftw_complex* c = fftw_alloc_complex(cs);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p{};
    if (dims == 1) {
        p.r2c = fftw_plan_dft_r2c_1d(n, r, c, flags);
        p.c2r = fftw_plan_dft_c2r_1d(n, c, r, flags);
    } else {
        p.r2c = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
        p.c2r = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
    }
    fftw_free(r);
    fftw_free(c);
    cache.emplace(std::make_pair(n, dims), p);
    return p;
}

}  // namespace

RealFft::RealFft(int n, int dims) : n_(n), dims_(dims) {
    require(n >= 2, "FFT length must be >= 2");
    require(dims == 1 || dims == 2, "FFT supports 1 or 2 dimensions");
    const PlanPair p = plans_for(n, dims);
    r2c_ = p.r2c;
    c2r_ = p.c2r;
}

void RealFft::forward(std::span<const double> in, std::span<cplx> out) const {
    require(in.size() == real_size() && out.size() == spectrum_size(), "FFT buffer size mismatch");
    // r2c does not modify its input with FFTW_ESTIMATE; the cast is safe.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const cplx> in, std::span<double> out) const {
    require(in.size() == spectrum_size() && out.size() == real_size(), "FFT buffer size mismatch");
    std::vector<cplx> scratch(in.begin(), in.end());  // c2r destroys its input
    fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double scale = 1.0 / static_cast<double>(real_size());
    for (double& v : out) v *= scale;
}

std::vector<cplx> RealFft::forward(std::span<const double> in) const {
    std::vector<cplx> out(spectrum_size());
    forward(in, out);
    return out;
}

std::vector<double> RealFft::inverse(std::span<const cplx> in) const {
    std::vector<double> out(real_size());
    inverse(in, out);
    return out;
}

}  // namespace lps
