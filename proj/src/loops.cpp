#include "lps/loops.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "lps/grid.hpp"

namespace lps::loops {

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) { omp_set_num_threads(std::max(1, n)); }

void configure_threads_from_env() {
    if (const char* env = std::getenv("LPS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) set_thread_count(n);
    }
}

namespace {

inline double pow_q(double x, double q) {
    if (q == 2.0) return x * x;
    if (q == 1.0) return x;
    if (q == 3.0) return x * x * x;
    if (q == 4.0) {
        const double y = x * x;
        return y * y;
    }
    return std::pow(x, q);
}

// Sum over the K rows of one column, pairwise, via a scratch buffer.
double column_pairwise(std::span<const double> rows, std::span<const double> w, std::size_t cells,
                       std::size_t c, std::vector<double>& scratch) {
    const std::size_t K = w.size();
    scratch.resize(K);
    for (std::size_t k = 0; k < K; ++k) scratch[k] = w[k] * rows[k * cells + c];
    return pairwise_sum(scratch);
}

double block_oscillation(std::span<const double> values, int M, double r, const std::vector<std::size_t>& cells) {
    std::vector<double> mean(M, 0.0);
    for (std::size_t c : cells)
        for (int k = 0; k < M; ++k) mean[k] += values[c * M + k];
    for (double& m : mean) m /= static_cast<double>(cells.size());
    std::vector<double> diff(M), n(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (int k = 0; k < M; ++k) diff[k] = values[cells[i] * M + k] - mean[k];
        n[i] = b_norm(diff, r);
    }
    return pairwise_sum(n) / static_cast<double>(cells.size());
}

}  // namespace

void pointwise_norms(std::span<const double> values, int M, double r, std::span<double> out, Exec exec) {
    const long n = static_cast<long>(out.size());
    if (exec == Exec::serial) {
        for (long c = 0; c < n; ++c) out[c] = b_norm(values.subspan(c * M, M), r);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n; ++c) out[c] = b_norm(values.subspan(c * M, M), r);
}

void fiber_power(std::span<const double> fields, int nfields, std::size_t cells, int M, double r, double q,
                 std::span<double> out, Exec exec) {
    auto body = [&](long c) {
        if (nfields == 1) {
            out[c] = pow_q(b_norm(fields.subspan(c * M, M), r), q);
            return;
        }
        double s = 0.0;
        for (int j = 0; j < nfields; ++j) {
            const double b = b_norm(fields.subspan((j * cells + c) * M, M), r);
            s += b * b;
        }
        out[c] = q == 2.0 ? s : std::pow(s, 0.5 * q);
    };
    const long n = static_cast<long>(cells);
    if (exec == Exec::serial) {
        for (long c = 0; c < n; ++c) body(c);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n; ++c) body(c);
}

void weighted_column_sums(std::span<const double> rows, std::span<const double> w, std::size_t cells,
                          std::span<double> out, Exec exec) {
    const long n = static_cast<long>(cells);
    if (exec == Exec::serial) {
        std::vector<double> scratch;
        for (long c = 0; c < n; ++c) out[c] = column_pairwise(rows, w, cells, c, scratch);
        return;
    }
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (long c = 0; c < n; ++c) out[c] = column_pairwise(rows, w, cells, c, scratch);
    }
}

void convolve_direct(std::span<const double> kernel, std::span<const double> in, std::span<double> out, Exec exec) {
    const long N = static_cast<long>(in.size());
    auto body = [&](long i) {
        double s = 0.0;
        for (long j = 0; j < N; ++j) s += kernel[i - j + N - 1] * in[j];
        out[i] = s;
    };
    if (exec == Exec::serial) {
        for (long i = 0; i < N; ++i) body(i);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < N; ++i) body(i);
}

void dense_apply(std::span<const double> A, int N, std::span<const double> in, std::span<double> out, int stride,
                 Exec exec) {
    auto body = [&](long i) {
        for (int v = 0; v < stride; ++v) {
            double s = 0.0;
            const double* row = A.data() + static_cast<std::size_t>(i) * N;
            for (int j = 0; j < N; ++j) s += row[j] * in[static_cast<std::size_t>(j) * stride + v];
            out[static_cast<std::size_t>(i) * stride + v] = s;
        }
    };
    if (exec == Exec::serial) {
        for (long i = 0; i < N; ++i) body(i);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < N; ++i) body(i);
}

double dyadic_oscillation_1d(std::span<const double> values, int N, int M, double r, int max_level, Exec exec) {
    double best = 0.0;
    for (int level = 0; level <= max_level; ++level) {
        const int blocks = 1 << level;
        if (blocks > N) break;
        const int width = N / blocks;
        std::vector<double> osc(blocks);
        auto body = [&](long b) {
            std::vector<std::size_t> cells(width);
            for (int i = 0; i < width; ++i) cells[i] = static_cast<std::size_t>(b) * width + i;
            osc[b] = block_oscillation(values, M, r, cells);
        };
        if (exec == Exec::serial) {
            for (long b = 0; b < blocks; ++b) body(b);
        } else {
#pragma omp parallel for schedule(dynamic)
            for (long b = 0; b < blocks; ++b) body(b);
        }
        for (double o : osc) best = std::max(best, o);
    }
    return best;
}

double dyadic_oscillation_2d(std::span<const double> values, int N, int M, double r, int max_level, Exec exec) {
    double best = 0.0;
    for (int level = 0; level <= max_level; ++level) {
        const int per_axis = 1 << level;
        if (per_axis > N) break;
        const int width = N / per_axis;
        const long blocks = static_cast<long>(per_axis) * per_axis;
        std::vector<double> osc(blocks);
        auto body = [&](long b) {
            const int b0 = static_cast<int>(b / per_axis), b1 = static_cast<int>(b % per_axis);
            std::vector<std::size_t> cells;
            cells.reserve(static_cast<std::size_t>(width) * width);
            for (int i = 0; i < width; ++i)
                for (int j = 0; j < width; ++j)
                    cells.push_back(static_cast<std::size_t>(b0 * width + i) * N + (b1 * width + j));
            osc[b] = block_oscillation(values, M, r, cells);
        };
        if (exec == Exec::serial) {
            for (long b = 0; b < blocks; ++b) body(b);
        } else {
#pragma omp parallel for schedule(dynamic)
            for (long b = 0; b < blocks; ++b) body(b);
        }
        for (double o : osc) best = std::max(best, o);
    }
    return best;
}

}  // namespace lps::loops
