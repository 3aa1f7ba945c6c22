#include "lps/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lps/loops.hpp"
#include "lps/rng.hpp"

namespace lps {

namespace {

double norm_power(double v, double q) { return std::pow(v, q); }

// Compact level-n means, level n holding 2^n cells of M coordinates.
std::vector<std::vector<double>> mean_tree(const DyadicFunction& f) {
    const int D = f.depth(), M = f.M();
    std::vector<std::vector<double>> lv(D + 1);
    lv[D] = f.values();
    for (int n = D; n > 0; --n) {
        const std::size_t cells = std::size_t{1} << (n - 1);
        lv[n - 1].resize(cells * M);
        const std::vector<double>& up = lv[n];
        for (std::size_t i = 0; i < cells; ++i)
            for (int k = 0; k < M; ++k)
                lv[n - 1][i * M + k] = (up[(2 * i) * M + k] + up[(2 * i + 1) * M + k]) * 0.5;
    }
    return lv;
}

DyadicFunction expand(const DyadicFunction& f, const std::vector<double>& level, int n) {
    DyadicFunction out(f.filtration(), f.M(), f.r());
    const int M = f.M(), shift = f.depth() - n;
    for (std::size_t i = 0; i < f.samples(); ++i) {
        const std::size_t a = i >> shift;
        for (int k = 0; k < M; ++k) out(i, k) = level[a * M + k];
    }
    return out;
}

// sigma_n from the cached conditional expectations (E_k = f beyond the depth).
DyadicFunction sigma_from(const std::vector<DyadicFunction>& E, int n) {
    const int D = static_cast<int>(E.size()) - 1;
    DyadicFunction s = E[0];
    for (int k = 1; k <= n; ++k) s += E[std::min(k, D)];
    s *= 1.0 / (n + 1);
    return s;
}

DyadicFunction delta_from(const std::vector<DyadicFunction>& E, int n) {
    return sigma_from(E, n) - sigma_from(E, n - 1);
}

double lp_mean(std::span<const double> x, double p) {
    if (std::isinf(p)) return x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = std::pow(x[i], p);
    return std::pow(pairwise_sum(t) / static_cast<double>(x.size()), 1.0 / p);
}

}  // namespace

DyadicFiltration::DyadicFiltration(int depth) : depth_(depth) {
    require(depth >= 0 && depth <= 24, "dyadic depth must lie in [0, 24]");
}

DyadicFunction::DyadicFunction(DyadicFiltration filtration, int M, double r)
    : filtration_(filtration), M_(M), r_(r), values_(filtration.samples() * static_cast<std::size_t>(M), 0.0) {
    require(M >= 1, "coordinate count must be at least 1");
    require(r >= 1.0, "exponent r must be at least 1");
}

DyadicFunction::DyadicFunction(DyadicFiltration filtration, int M, double r, std::vector<double> values)
    : DyadicFunction(filtration, M, r) {
    require(values.size() == values_.size(), "value count does not match the filtration");
    values_ = std::move(values);
}

bool DyadicFunction::same_shape(const DyadicFunction& o) const {
    return depth() == o.depth() && M_ == o.M_ && r_ == o.r_;
}

DyadicFunction& DyadicFunction::operator+=(const DyadicFunction& o) {
    require(same_shape(o), "dyadic functions differ in shape");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

DyadicFunction& DyadicFunction::operator-=(const DyadicFunction& o) {
    require(same_shape(o), "dyadic functions differ in shape");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

DyadicFunction& DyadicFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

DyadicFunction operator+(DyadicFunction a, const DyadicFunction& b) { return a += b; }
DyadicFunction operator-(DyadicFunction a, const DyadicFunction& b) { return a -= b; }
DyadicFunction operator*(double c, DyadicFunction a) { return a *= c; }

double lp_norm(const DyadicFunction& f, double p) {
    require(p >= 1.0, "lp_norm needs p >= 1");
    std::vector<double> n(f.samples());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = f.norm_at(i);
    return lp_mean(n, p);
}

DyadicFunction cond_expect(const DyadicFunction& f, int n) {
    require(n >= 0, "conditional expectation level must be nonnegative");
    if (n >= f.depth()) return f;
    return expand(f, mean_tree(f)[n], n);
}

std::vector<DyadicFunction> cond_expect_all(const DyadicFunction& f) {
    const auto lv = mean_tree(f);
    std::vector<DyadicFunction> E;
    E.reserve(lv.size());
    for (int n = 0; n <= f.depth(); ++n) E.push_back(expand(f, lv[n], n));
    return E;
}

std::vector<DyadicFunction> differences(const DyadicFunction& f) {
    const auto E = cond_expect_all(f);
    std::vector<DyadicFunction> d;
    for (int n = 1; n <= f.depth(); ++n) d.push_back(E[n] - E[n - 1]);
    return d;
}

DyadicFunction square_function(const DyadicFunction& f, double q) {
    require(q >= 1.0, "square function needs q >= 1");
    const auto d = differences(f);
    DyadicFunction S(f.filtration(), 1, 1.0);
    for (std::size_t i = 0; i < f.samples(); ++i) {
        double acc = 0.0;
        for (const auto& dn : d) {
            const double v = dn.norm_at(i);
            acc = std::isinf(q) ? std::max(acc, v) : acc + norm_power(v, q);
        }
        S(i, 0) = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
    }
    return S;
}

DyadicFunction cesaro_sigma(const DyadicFunction& f, int n) {
    require(n >= 0, "Cesaro index must be nonnegative");
    return sigma_from(cond_expect_all(f), n);
}

DyadicFunction delta_sigma(const DyadicFunction& f, int n) {
    require(n >= 1, "delta sigma index must be at least 1");
    return delta_from(cond_expect_all(f), n);
}

DyadicFunction cesaro_square_function(const DyadicFunction& f, double q, int nmax) {
    require(q >= 1.0 && std::isfinite(q), "Cesaro square function needs finite q >= 1");
    const auto E = cond_expect_all(f);
    std::vector<double> acc(f.samples(), 0.0);
    for (int n = 1; n <= nmax; ++n) {
        const DyadicFunction ds = delta_from(E, n);
        const double w = std::pow(n, q - 1.0);
        for (std::size_t i = 0; i < f.samples(); ++i) acc[i] += w * norm_power(ds.norm_at(i), q);
    }
    DyadicFunction S(f.filtration(), 1, 1.0);
    for (std::size_t i = 0; i < f.samples(); ++i) S(i, 0) = std::pow(acc[i], 1.0 / q);
    return S;
}

ProductPair delta_sigma_product(const DyadicFunction& f, int m, int n) {
    require(m >= 1 && n >= 1, "delta sigma indices must be at least 1");
    DyadicFunction direct = delta_sigma(delta_sigma(f, n), m);
    const auto d = differences(f);
    DyadicFunction formula(f.filtration(), f.M(), f.r());
    const int top = std::min({m, n, f.depth()});
    for (int j = 1; j <= top; ++j) formula += static_cast<double>(j) * j * d[j - 1];
    formula *= 1.0 / (static_cast<double>(m) * n * (m + 1.0) * (n + 1.0));
    double disc = 0.0;
    for (std::size_t i = 0; i < direct.values().size(); ++i)
        disc = std::max(disc, std::abs(direct.values()[i] - formula.values()[i]));
    return {std::move(direct), std::move(formula), disc};
}

double MixedNorm::operator()(std::span<const double> x) const {
    const std::size_t blocks = x.size() / block;
    double acc = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double v = b_norm(x.subspan(b * block, block), inner);
        acc = std::isinf(outer) ? std::max(acc, v) : acc + norm_power(v, outer);
    }
    return std::isinf(outer) ? acc : std::pow(acc, 1.0 / outer);
}

namespace {

// Columns of A are coordinate vectors landing in one target block, in distinct rows.
bool is_block_embedding(const Eigen::MatrixXd& A, const MixedNorm& source, const MixedNorm& target) {
    if (source.block != A.cols() || target.inner != source.inner) return false;
    long blk = -1;
    std::vector<int> used(A.rows(), 0);
    for (long c = 0; c < A.cols(); ++c) {
        long hit = -1;
        for (long r = 0; r < A.rows(); ++r) {
            if (A(r, c) == 0.0) continue;
            if (std::abs(A(r, c)) != 1.0 || hit >= 0) return false;
            hit = r;
        }
        if (hit < 0 || used[hit]++) return false;
        const long b = hit / target.block;
        if (blk >= 0 && b != blk) return false;
        blk = b;
    }
    return true;
}

void apply_map(const Eigen::MatrixXd& A, std::span<const double> x, std::span<double> y) {
    for (long a = 0; a < A.rows(); ++a) {
        double s = 0.0;
        for (long b = 0; b < A.cols(); ++b) s += A(a, b) * x[b];
        y[a] = s;
    }
}

}  // namespace

double operator_norm(const Eigen::MatrixXd& A, const MixedNorm& source, const MixedNorm& target) {
    const bool single = source.block == A.cols() && target.block == A.rows() && source.inner == target.inner;
    if (single && source.inner == 2.0)
        return A.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
    if (single && source.inner == 1.0) return A.cwiseAbs().colwise().sum().maxCoeff();
    if (single && std::isinf(source.inner)) return A.cwiseAbs().rowwise().sum().maxCoeff();
    if (is_block_embedding(A, source, target)) return 1.0;
    double best = 0.0;
    std::vector<double> x(A.cols()), y(A.rows());
    auto probe = [&] {
        const double nx = source(x);
        if (nx > 0.0) {
            apply_map(A, x, y);
            best = std::max(best, target(y) / nx);
        }
    };
    for (long c = 0; c < A.cols(); ++c) {
        std::fill(x.begin(), x.end(), 0.0);
        x[c] = 1.0;
        probe();
    }
    auto g = stream_rng(0x5eed, static_cast<std::uint64_t>(A.rows() * 131 + A.cols()));
    std::normal_distribution<double> n01;
    for (int s = 0; s < 256; ++s) {
        for (double& v : x) v = n01(g);
        probe();
    }
    return best;
}

MultiplyingSequence::MultiplyingSequence(std::vector<Eigen::MatrixXd> maps, MixedNorm source, MixedNorm target)
    : maps_(std::move(maps)), source_(source), target_(target), sup_norm_(0.0) {
    require(!maps_.empty(), "multiplying sequence is empty");
    for (const auto& A : maps_) {
        require(A.rows() == maps_[0].rows() && A.cols() == maps_[0].cols(), "multiplying maps differ in shape");
        require(A.allFinite(), "multiplying map has non-finite entries");
        sup_norm_ = std::max(sup_norm_, operator_norm(A, source_, target_));
    }
    require(source_.block >= 1 && maps_[0].cols() % source_.block == 0, "source norm does not fit the map");
    require(target_.block >= 1 && maps_[0].rows() % target_.block == 0, "target norm does not fit the map");
}

MultiplyingSequence MultiplyingSequence::identity(int K, int M, double r) {
    return MultiplyingSequence(std::vector<Eigen::MatrixXd>(K, Eigen::MatrixXd::Identity(M, M)), MixedNorm::plain(M, r),
                               MixedNorm::plain(M, r));
}

MultiplyingSequence MultiplyingSequence::signs(int K, int M, double r) {
    std::vector<Eigen::MatrixXd> v;
    for (int k = 1; k <= K; ++k) v.push_back((k % 2 ? -1.0 : 1.0) * Eigen::MatrixXd::Identity(M, M));
    return MultiplyingSequence(std::move(v), MixedNorm::plain(M, r), MixedNorm::plain(M, r));
}

MultiplyingSequence MultiplyingSequence::q_embedding(int K, int M, double r, double q) {
    std::vector<Eigen::MatrixXd> v;
    for (int k = 0; k < K; ++k) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<long>(K) * M, M);
        A.block(static_cast<long>(k) * M, 0, M, M).setIdentity();
        v.push_back(std::move(A));
    }
    return MultiplyingSequence(std::move(v), MixedNorm::plain(M, r), MixedNorm{M, r, q});
}

double TransformResult::target_norm_at(std::size_t n, std::size_t cell, const MixedNorm& norm) const {
    return norm(std::span<const double>(partial[n]).subspan(cell * target_dim, target_dim));
}

TransformResult martingale_transform(const DyadicFunction& f, const MultiplyingSequence& v) {
    require(v[0].cols() == f.M(), "multiplying maps do not act on the coordinate count");
    require(static_cast<int>(v.size()) >= f.depth(), "multiplying sequence is shorter than the depth");
    const auto d = differences(f);
    TransformResult res;
    res.target_dim = static_cast<int>(v[0].rows());
    const std::size_t T = res.target_dim, cells = f.samples();
    std::vector<double> acc(cells * T, 0.0), y(T);
    res.maximal.assign(cells, 0.0);
    for (int k = 0; k < f.depth(); ++k) {
        for (std::size_t i = 0; i < cells; ++i) {
            apply_map(v[k], d[k].at(i), y);
            for (std::size_t a = 0; a < T; ++a) acc[i * T + a] += y[a];
        }
        res.partial.push_back(acc);
        for (std::size_t i = 0; i < cells; ++i)
            res.maximal[i] = std::max(res.maximal[i], res.target_norm_at(k, i, v.target()));
    }
    return res;
}

ProjectionResult discrete_projection_R(std::span<const DyadicFunction> h) {
    require(!h.empty(), "projection needs at least one term");
    DyadicFunction Rh(h[0].filtration(), h[0].M(), h[0].r());
    for (std::size_t n = 0; n < h.size(); ++n) {
        require(h[n].same_shape(h[0]), "projection terms differ in shape");
        Rh += delta_sigma(h[n], static_cast<int>(n + 1));
    }
    const auto E = cond_expect_all(Rh);
    std::vector<DyadicFunction> comp;
    for (std::size_t n = 1; n <= h.size(); ++n) comp.push_back(static_cast<double>(n) * delta_from(E, static_cast<int>(n)));
    return {std::move(Rh), std::move(comp)};
}

double weighted_lq_lp_norm(std::span<const DyadicFunction> a, double q, double p) {
    require(q >= 1.0 && std::isfinite(q), "weighted norm needs finite q >= 1");
    if (a.empty()) return 0.0;
    std::vector<double> pt(a[0].samples(), 0.0);
    for (std::size_t n = 0; n < a.size(); ++n)
        for (std::size_t i = 0; i < pt.size(); ++i) pt[i] += norm_power(a[n].norm_at(i), q) / static_cast<double>(n + 1);
    for (double& v : pt) v = std::pow(v, 1.0 / q);
    return lp_mean(pt, p);
}

namespace {

// T(j, q) = sum_{m>=j} (1/m) ((j+1)/(m+1))^q, so that sum_{m>=j} 1/(m (m+1)^q) = T / (j+1)^q.
// Explicit terms up to X = j + 256, then Euler-Maclaurin with the exact integral.
double normalized_tail(int j, double q) {
    const double a = j + 1.0;
    auto g = [&](double x) { return std::pow(a / (x + 1.0), q) / x; };
    const int X = j + 256;
    std::vector<double> terms;
    for (int m = j; m < X; ++m) terms.push_back(g(m));
    // int_X^inf x^{-1} (x+1)^{-q} dx = sum_k binom(-q, k) U^{q+k} / (q+k), U = 1/X.
    const double U = 1.0 / X;
    double integral = 0.0, c = 1.0, Uk = 1.0;
    for (int k = 0; k < 40; ++k) {
        const double term = c * Uk / (q + k);
        integral += term;
        if (std::abs(term) < 1e-18 * std::abs(integral)) break;
        c *= (-q - k) / (k + 1.0);
        Uk *= U;
    }
    integral *= std::pow(a * U, q);
    const double gX = g(X), dgX = -gX * (1.0 / X + q / (X + 1.0));
    return pairwise_sum(terms) + integral + 0.5 * gX - dgX / 12.0;
}

// (sum_{m>=j} 1/(m (m+1)^q))^{1/q}, with the q = inf limit 1/(j+1).
double tail_factor(int j, double q) {
    if (std::isinf(q)) return 1.0 / (j + 1.0);
    if (q == 1.0) return 1.0 / j;
    return std::pow(normalized_tail(j, q), 1.0 / q) / (j + 1.0);
}

}  // namespace

double projection_multiplier_norm(int j, double q) {
    require(j >= 1, "multiplier index must be at least 1");
    require(q >= 1.0, "multiplier exponent must be at least 1");
    const double qp = q == 1.0 ? kInf : (std::isinf(q) ? 1.0 : q / (q - 1.0));
    return static_cast<double>(j) * j * tail_factor(j, q) * tail_factor(j, qp);
}

std::vector<double> projection_multiplier_profile(int jmax, double q) {
    require(jmax >= 1, "profile needs jmax >= 1");
    std::vector<double> out(jmax);
#pragma omp parallel for schedule(static) num_threads(loops::thread_count())
    for (int j = 1; j <= jmax; ++j) out[j - 1] = projection_multiplier_norm(j, q);
    return out;
}

std::vector<DoobRow> doob_profile(const DyadicFunction& f, std::vector<double> lambdas) {
    const auto E = cond_expect_all(f);
    const std::size_t N = f.samples();
    std::vector<double> star(N, 0.0), nf(N);
    for (std::size_t i = 0; i < N; ++i) {
        for (const auto& e : E) star[i] = std::max(star[i], e.norm_at(i));
        nf[i] = f.norm_at(i);
    }
    if (lambdas.empty()) {
        std::vector<double> s = star;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (!s.empty()) s.pop_back();
        const std::size_t stride = std::max<std::size_t>(1, s.size() / 256);
        for (std::size_t k = 0; k < s.size(); k += stride) lambdas.push_back(s[k]);
    }
    std::vector<DoobRow> rows;
    for (double lam : lambdas) {
        std::size_t count = 0;
        std::vector<double> mass;
        for (std::size_t i = 0; i < N; ++i)
            if (star[i] > lam) {
                ++count;
                mass.push_back(nf[i]);
            }
        rows.push_back({lam, lam * static_cast<double>(count) / N, pairwise_sum(mass) / N});
    }
    return rows;
}

DyadicFunction random_dyadic(int depth, int M, double r, std::uint64_t seed, std::uint64_t stream) {
    auto g = stream_rng(seed, stream);
    std::normal_distribution<double> n01;
    DyadicFunction f(DyadicFiltration(depth), M, r);
    for (double& v : f.values()) v = n01(g);
    return f;
}

std::vector<MartingaleTrialRow> martingale_trials(const MartingaleTrialSpec& spec) {
    require(spec.trials >= 1, "trial count must be positive");
    require(spec.depth >= 1, "trials need depth >= 1");
    std::vector<std::vector<MartingaleTrialRow>> per(spec.trials);
    loops::ErrorSlot slot;
#pragma omp parallel for schedule(dynamic) num_threads(loops::thread_count())
    for (int t = 0; t < spec.trials; ++t) {
        slot.run([&] {
            const std::uint64_t base = static_cast<std::uint64_t>(t) * (spec.projection_terms + 1);
            const DyadicFunction f = random_dyadic(spec.depth, spec.M, spec.r, spec.seed, base);
            auto& rows = per[t];

            const DyadicFunction f2 = f.with_r(2.0);
            const auto d = differences(f2);
            double rhs = std::pow(lp_norm(cond_expect(f2, 0), 2.0), 2.0);
            for (const auto& dn : d) rhs += std::pow(lp_norm(dn, 2.0), 2.0);
            const double lhs = std::pow(lp_norm(f2, 2.0), 2.0);
            rows.push_back({t, "parseval_defect", std::abs(lhs - rhs) / lhs});

            const auto Q = MultiplyingSequence::q_embedding(spec.depth, spec.M, spec.r, spec.q);
            const auto T = martingale_transform(f, Q);
            const DyadicFunction S = square_function(f, spec.q);
            double qq = 0.0;
            for (std::size_t i = 0; i < f.samples(); ++i) qq = std::max(qq, std::abs(T.maximal[i] - S(i, 0)));
            rows.push_back({t, "qq_max_minus_sq", qq});

            const int top = std::min(8, 1 << (spec.depth - 1));
            double prod = 0.0;
            for (int m = 1; m <= top; ++m)
                for (int n = 1; n <= top; ++n) prod = std::max(prod, delta_sigma_product(f, m, n).discrepancy);
            rows.push_back({t, "product_defect", prod});

            std::vector<DyadicFunction> h;
            for (int n = 0; n < spec.projection_terms; ++n)
                h.push_back(random_dyadic(spec.depth, spec.M, spec.r, spec.seed, base + 1 + n));
            const auto R = discrete_projection_R(h);
            rows.push_back({t, "r_ratio", weighted_lq_lp_norm(R.composite, spec.q, spec.p) / weighted_lq_lp_norm(h, spec.q, spec.p)});

            double margin = kInf;
            for (const auto& row : doob_profile(f)) margin = std::min(margin, row.rhs - row.lhs);
            rows.push_back({t, "doob_margin", margin / std::max(lp_norm(f, 1.0), 1e-300)});
        });
    }
    slot.rethrow();
    std::vector<MartingaleTrialRow> out;
    for (auto& rows : per) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

}  // namespace lps
