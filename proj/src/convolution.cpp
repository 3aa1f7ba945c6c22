#include "lps/convolution.hpp"

namespace lps {

PaddedConvolution::PaddedConvolution(const Domain& domain)
    : domain_(domain), fft_(2 * domain.N(), domain.dim()) {
    require(!domain.is_torus(), "padded convolution needs a line or plane grid");
}

std::vector<cplx> PaddedConvolution::transform(std::span<const double> samples) const {
    const int N = domain_.N(), P = 2 * N;
    std::vector<double> buf(fft_.real_size(), 0.0);
    if (domain_.dim() == 1) {
        std::copy(samples.begin(), samples.begin() + N, buf.begin());
    } else {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) buf[static_cast<std::size_t>(i) * P + j] = samples[static_cast<std::size_t>(i) * N + j];
    }
    return fft_.forward(buf);
}

std::vector<cplx> PaddedConvolution::transform_table(std::span<const double> table) const {
    const int N = domain_.N(), P = 2 * N, W = 2 * N - 1;
    std::vector<double> buf(fft_.real_size(), 0.0);
    auto wrap = [P](int o) { return o < 0 ? o + P : o; };
    if (domain_.dim() == 1) {
        for (int o = -(N - 1); o <= N - 1; ++o) buf[wrap(o)] = table[o + N - 1];
    } else {
        for (int o0 = -(N - 1); o0 <= N - 1; ++o0)
            for (int o1 = -(N - 1); o1 <= N - 1; ++o1)
                buf[static_cast<std::size_t>(wrap(o0)) * P + wrap(o1)] =
                    table[static_cast<std::size_t>(o0 + N - 1) * W + (o1 + N - 1)];
    }
    return fft_.forward(buf);
}

void PaddedConvolution::apply(std::span<const cplx> sample_spec, std::span<const cplx> table_spec,
                              std::span<double> out) const {
    const int N = domain_.N(), P = 2 * N;
    std::vector<cplx> prod(sample_spec.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = sample_spec[i] * table_spec[i];
    const std::vector<double> full = fft_.inverse(prod);
    if (domain_.dim() == 1) {
        std::copy(full.begin(), full.begin() + N, out.begin());
        return;
    }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) out[static_cast<std::size_t>(i) * N + j] = full[static_cast<std::size_t>(i) * P + j];
}

std::vector<double> PaddedConvolution::convolve(std::span<const double> table, std::span<const double> samples) const {
    std::vector<double> out(domain_.cells());
    apply(transform(samples), transform_table(table), out);
    return out;
}

std::vector<double> component_values(const GridFunction& f, int k) {
    std::vector<double> v(f.cells());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = f(c, k);
    return v;
}

void set_component_values(GridFunction& f, int k, std::span<const double> values) {
    for (std::size_t c = 0; c < values.size(); ++c) f(c, k) = values[c];
}

}  // namespace lps
