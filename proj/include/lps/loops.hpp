#pragma once

// Hot inner loops. Every loop has a serial reference path and an OpenMP path;
// both produce bit-identical results (no cross-thread reductions).

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>

namespace lps::loops {

enum class Exec { serial, parallel };

/// Worker count honoured by the parallel paths (LPS_THREADS, else machine default).
int thread_count();
void set_thread_count(int n);
/// Reads LPS_THREADS once; no-op when unset.
void configure_threads_from_env();

/// Keeps the first exception thrown by bodies run inside an OpenMP region, which must not
/// propagate out of the region; rethrow() raises it afterwards on the calling thread.
class ErrorSlot {
public:
    template <class F>
    void run(F&& body) noexcept {
        try {
            body();
        } catch (...) {
            std::lock_guard<std::mutex> lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
};

/// out[c] = ||values[c*M .. c*M+M)||_{l^r}.
void pointwise_norms(std::span<const double> values, int M, double r, std::span<double> out,
                     Exec exec = Exec::parallel);

/// Combined fiber norm: out[c] = (sum_j ||field_j(c)||_r^2)^{q/2} for `fields` packed as
/// [j][cell][M]; with one field this is ||field(c)||_r^q.
void fiber_power(std::span<const double> fields, int nfields, std::size_t cells, int M, double r,
                 double q, std::span<double> out, Exec exec = Exec::parallel);

/// out[c] = sum_k w[k] * rows[k*cells + c], summed pairwise over k.
void weighted_column_sums(std::span<const double> rows, std::span<const double> w, std::size_t cells,
                          std::span<double> out, Exec exec = Exec::parallel);

/// Truncated linear convolution on N samples: out[i] = sum_j kernel[i - j + N - 1] * in[j],
/// where `kernel` holds the 2N-1 offsets -(N-1) .. N-1.
void convolve_direct(std::span<const double> kernel, std::span<const double> in, std::span<double> out,
                     Exec exec = Exec::parallel);

/// out = A in for a dense row-major N x N matrix A, applied to `stride`-separated
/// vectors: in/out hold `count` interleaved vectors (element i of vector v at i*stride + v).
void dense_apply(std::span<const double> A, int N, std::span<const double> in, std::span<double> out,
                 int stride, Exec exec = Exec::parallel);

/// Largest mean oscillation over aligned dyadic blocks of a one-dimensional
/// B-valued sample with uniform weights; levels 0 .. max_level.
double dyadic_oscillation_1d(std::span<const double> values, int N, int M, double r, int max_level,
                             Exec exec = Exec::parallel);

/// Same over aligned dyadic squares of an N x N sample (cell index i0*N + i1).
double dyadic_oscillation_2d(std::span<const double> values, int N, int M, double r, int max_level,
                             Exec exec = Exec::parallel);

}  // namespace lps::loops
