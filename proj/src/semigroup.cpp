#include "lps/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "lps/convolution.hpp"
#include "lps/fft.hpp"
#include "lps/loops.hpp"

namespace lps {

namespace {

constexpr double kPi = std::numbers::pi;

double fd_step(double t) { return std::max(1e-4, 1e-3 * t); }

GridFunction zeros_like(const GridFunction& f) { return GridFunction(f.domain(), f.M(), f.r()); }

// out += w * x, skipping exact zeros.
void axpy(GridFunction& out, double w, const GridFunction& x) {
    if (w == 0.0) return;
    auto& o = out.values();
    const auto& v = x.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += w * v[i];
}

GridFunction mix(const GridFunction& proto, std::span<const double> w, const std::vector<GridFunction>& fields) {
    GridFunction out = zeros_like(proto);
    for (std::size_t i = 0; i < fields.size(); ++i) axpy(out, w[i], fields[i]);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------------------

GridFunction Trajectory::time_derivative(double t) const {
    const double h = fd_step(t);
    require(t > h, "t too close to 0 for the finite-difference step");
    GridFunction d = value(t + h);
    d -= value(t - h);
    d *= 1.0 / (2.0 * h);
    return d;
}

SemigroupAction::SemigroupAction(std::string name, FixpointKind fixpoint)
    : name_(std::move(name)), fixpoint_(fixpoint) {}

void SemigroupAction::check(const GridFunction& f, const KernelWindow& window) const {
    require(supports(f.domain()), "action " + name_ + " does not act on " + to_string(f.domain().kind()) + " domains");
    require(!window.active() || supports_window(), "action " + name_ + " does not support kernel windows");
    require(!window.active() || window.radius > 0.0, "kernel window radius must be positive");
}

GridFunction SemigroupAction::apply(const GridFunction& f, double t) const {
    require(t > 0.0, "action time must be positive");
    return trajectory(f)->value(t);
}

GridFunction SemigroupAction::time_derivative(const GridFunction& f, double t) const {
    require(t > 0.0, "action time must be positive");
    return trajectory(f)->time_derivative(t);
}

std::vector<GridFunction> SemigroupAction::space_gradient(const GridFunction& f, double t) const {
    require(t > 0.0, "action time must be positive");
    return trajectory(f)->space_gradient(t);
}

GridFunction SemigroupAction::fixpoint(const GridFunction& f) const {
    check(f, {});
    GridFunction out = zeros_like(f);
    if (fixpoint_ == FixpointKind::zero) return out;
    const Domain& d = f.domain();
    std::vector<double> w(f.cells()), col(f.cells());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = d.weight(c);
    const double mass = pairwise_sum(w);
    for (int k = 0; k < f.M(); ++k) {
        for (std::size_t c = 0; c < col.size(); ++c) col[c] = w[c] * f(c, k);
        const double mean = pairwise_sum(col) / mass;
        for (std::size_t c = 0; c < col.size(); ++c) out(c, k) = mean;
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Torus multipliers

MultiplierAction::MultiplierAction(std::string name, Filler filler, std::function<double(int)> exponent)
    : SemigroupAction(std::move(name), FixpointKind::mean), filler_(std::move(filler)), exponent_(std::move(exponent)) {}

std::vector<double> MultiplierAction::compute(int N, double t, bool dt) const {
    std::vector<double> out(N / 2 + 1);
    filler_(N, t, dt, out);
    return out;
}

std::shared_ptr<const std::vector<double>> MultiplierAction::table(int N, double t, bool dt) const {
    const auto key = std::make_tuple(N, t, dt);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto tab = std::make_shared<const std::vector<double>>(compute(N, t, dt));
    std::lock_guard<std::mutex> lock(mutex_);
    if (cache_.size() > 8192) cache_.clear();
    return cache_.emplace(key, tab).first->second;
}

namespace {

enum class Part { value, dt, grad };

class TorusTrajectory : public Trajectory {
public:
    TorusTrajectory(std::shared_ptr<const MultiplierAction> action, const GridFunction& f, KernelWindow window)
        : action_(std::move(action)), proto_(zeros_like(f)), window_(window), fft_(f.domain().N()) {
        for (int k = 0; k < f.M(); ++k) spec_.push_back(fft_.forward(component_values(f, k)));
    }

    GridFunction value(double t) const override { return synth(symbol(t, Part::value)); }
    GridFunction time_derivative(double t) const override { return synth(symbol(t, Part::dt)); }
    std::vector<GridFunction> space_gradient(double t) const override { return {synth(symbol(t, Part::grad))}; }

private:
    std::vector<cplx> symbol(double t, Part part) const {
        const int N = proto_.domain().N();
        const auto tab = action_->table(N, t, part == Part::dt);
        std::vector<cplx> s(tab->size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (part == Part::grad)
                s[k] = (static_cast<int>(k) == N / 2) ? cplx(0.0) : cplx(0.0, static_cast<double>(k) * (*tab)[k]);
            else
                s[k] = (*tab)[k];
        }
        if (window_.active()) {
            std::vector<double> kernel = fft_.inverse(s);
            for (int j = 0; j < N; ++j) {
                const double d = 2.0 * std::numbers::pi * std::min(j, N - j) / N;
                if (d > window_.radius) kernel[j] = 0.0;
            }
            s = fft_.forward(kernel);
        }
        return s;
    }

    GridFunction synth(const std::vector<cplx>& sym) const {
        GridFunction out = proto_;
        std::vector<cplx> prod(sym.size());
        for (int k = 0; k < out.M(); ++k) {
            for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = spec_[k][i] * sym[i];
            set_component_values(out, k, fft_.inverse(prod));
        }
        return out;
    }

    std::shared_ptr<const MultiplierAction> action_;
    GridFunction proto_;
    KernelWindow window_;
    RealFft fft_;
    std::vector<std::vector<cplx>> spec_;
};

}  // namespace

std::unique_ptr<Trajectory> MultiplierAction::trajectory(const GridFunction& f, const KernelWindow& window) const {
    check(f, window);
    auto self = std::static_pointer_cast<const MultiplierAction>(shared_from_this());
    return std::make_unique<TorusTrajectory>(std::move(self), f, window);
}

// ---------------------------------------------------------------------------------------
// Line / plane convolutions

ConvolutionAction::ConvolutionAction(std::string name, KernelFamily family)
    : SemigroupAction(std::move(name), FixpointKind::zero), family_(family) {}

std::shared_ptr<const std::vector<double>> ConvolutionAction::table(const Domain& domain, double t,
                                                                     KernelPart part) const {
    const auto key = std::make_tuple(domain.N() * 4 + domain.dim(), domain.L(), t, static_cast<int>(part));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto tab = std::make_shared<const std::vector<double>>(kernel_table(family_, part, t, domain));
    std::lock_guard<std::mutex> lock(mutex_);
    if (cached_doubles_ + tab->size() > (std::size_t{1} << 23)) {
        cache_.clear();
        cached_doubles_ = 0;
    }
    cached_doubles_ += tab->size();
    return cache_.emplace(key, tab).first->second;
}

namespace {

class ConvolutionTrajectory : public Trajectory {
public:
    ConvolutionTrajectory(std::shared_ptr<const ConvolutionAction> action, const GridFunction& f, KernelWindow window)
        : action_(std::move(action)), proto_(zeros_like(f)), window_(window), conv_(f.domain()) {
        for (int k = 0; k < f.M(); ++k) spec_.push_back(conv_.transform(component_values(f, k)));
    }

    GridFunction value(double t) const override { return synth(t, KernelPart::value); }
    GridFunction time_derivative(double t) const override { return synth(t, KernelPart::dt); }
    std::vector<GridFunction> space_gradient(double t) const override {
        std::vector<GridFunction> g{synth(t, KernelPart::dx0)};
        if (proto_.domain().dim() == 2) g.push_back(synth(t, KernelPart::dx1));
        return g;
    }

private:
    GridFunction synth(double t, KernelPart part) const {
        require(t > 0.0, "action time must be positive");
        const Domain& d = proto_.domain();
        auto tab = action_->table(d, t, part);
        std::vector<cplx> kspec;
        if (window_.active()) {
            std::vector<double> masked(*tab);
            const int N = d.N(), W = 2 * N - 1;
            const double h = d.spacing();
            for (std::size_t i = 0; i < masked.size(); ++i) {
                const int o0 = d.dim() == 1 ? static_cast<int>(i) - (N - 1) : static_cast<int>(i / W) - (N - 1);
                const int o1 = d.dim() == 1 ? 0 : static_cast<int>(i % W) - (N - 1);
                if (h * std::hypot(o0, o1) > window_.radius) masked[i] = 0.0;
            }
            kspec = conv_.transform_table(masked);
        } else {
            kspec = conv_.transform_table(*tab);
        }
        GridFunction out = proto_;
        std::vector<double> buf(out.cells());
        for (int k = 0; k < out.M(); ++k) {
            conv_.apply(spec_[k], kspec, buf);
            set_component_values(out, k, buf);
        }
        return out;
    }

    std::shared_ptr<const ConvolutionAction> action_;
    GridFunction proto_;
    KernelWindow window_;
    PaddedConvolution conv_;
    std::vector<std::vector<cplx>> spec_;
};

}  // namespace

std::unique_ptr<Trajectory> ConvolutionAction::trajectory(const GridFunction& f, const KernelWindow& window) const {
    check(f, window);
    auto self = std::static_pointer_cast<const ConvolutionAction>(shared_from_this());
    return std::make_unique<ConvolutionTrajectory>(std::move(self), f, window);
}

// ---------------------------------------------------------------------------------------
// Ornstein-Uhlenbeck

namespace {

// One-dimensional factor of the discrete OU operator on the grid x_i with weights
// w_i = h e^{-x_i^2}. S = W A is symmetric and nonnegative with row sums w_i, so A is
// positive, row-stochastic and leaves w invariant (an exact L^1, L^2, L^infinity contraction).
// Resolved times sample the reversible joint density; otherwise the cell probabilities of
// N(e^{-t} x_i, v/2) are symmetrized by S_ij = min(w_i K_ij, w_j K_ji), which keeps the row
// sums below w_i. The defect w_i - sum_j S_ij goes on the diagonal.
// Rows are stored on the band |x_j - x_i| <= reach; once e^{-t} underflows A is the
// weighted-mean projector.
class OuFactor {
public:
    OuFactor(const Domain& d, double t, bool gradient);

    void apply(std::span<const double> f, std::span<double> out, bool derivative) const {
        const int N = static_cast<int>(w_.size());
        if (mean_) {
            double s = 0.0;
            for (int j = 0; j < N; ++j) s += w_[j] * f[j];
            std::fill(out.begin(), out.begin() + N, derivative ? 0.0 : s / wsum_);
            return;
        }
        const auto& v = derivative ? dval_ : val_;
        for (int i = 0; i < N; ++i) {
            double s = 0.0;
            const double* row = v.data() + off_[i];
            for (int j = lo_[i]; j <= hi_[i]; ++j) s += row[j - lo_[i]] * f[j];
            out[i] = s;
        }
    }

    Eigen::MatrixXd dense(bool derivative) const {
        const int N = static_cast<int>(w_.size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
        if (mean_) {
            if (!derivative)
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) m(i, j) = w_[j] / wsum_;
            return m;
        }
        const auto& v = derivative ? dval_ : val_;
        for (int i = 0; i < N; ++i)
            for (int j = lo_[i]; j <= hi_[i]; ++j) m(i, j) = v[off_[i] + (j - lo_[i])];
        return m;
    }

private:
    std::vector<double> w_;
    double wsum_ = 0.0;
    bool mean_ = false;
    std::vector<int> lo_, hi_;
    std::vector<std::size_t> off_;
    std::vector<double> val_, dval_;
};

OuFactor::OuFactor(const Domain& d, double t, bool gradient) {
    const int N = d.N();
    const double h = d.spacing(), e = std::exp(-t), v = -std::expm1(-2.0 * t);
    std::vector<double> x(N);
    w_.resize(N);
    for (int i = 0; i < N; ++i) {
        x[i] = d.axis_coord(i);
        w_[i] = h * std::exp(-x[i] * x[i]);
        wsum_ += w_[i];
    }
    if (e < 1e-17) {
        mean_ = true;
        return;
    }
    const bool sampled = kernel_table_sampled(KernelFamily::heat, 0.25 * v, h);
    const int B = std::min(N - 1, static_cast<int>(std::ceil((28.0 * std::sqrt(v) + (1.0 - e) * d.L()) / h)) + 2);
    lo_.resize(N);
    hi_.resize(N);
    off_.resize(N + 1);
    off_[0] = 0;
    for (int i = 0; i < N; ++i) {
        lo_[i] = std::max(0, i - B);
        hi_[i] = std::min(N - 1, i + B);
        off_[i + 1] = off_[i] + static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
    }
    val_.assign(off_[N], 0.0);
    if (gradient) dval_.assign(off_[N], 0.0);
    if (sampled) {
        // S_ij = h^2 e^{-x_i^2} g_ij / sqrt(pi v), g_ij = exp(-(x_j - e x_i)^2 / v), filled outward
        // from the peak by the recurrence g_{j+1} = g_j q_j, q_{j+1} = q_j exp(-2h^2/v).
        const double c = h * h / std::sqrt(kPi * v), rho = std::exp(-2.0 * h * h / v);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < N; ++i) {
            const double m = e * x[i], ex = std::exp(-x[i] * x[i]);
            double* row = val_.data() + off_[i];
            double* drow = gradient ? dval_.data() + off_[i] : nullptr;
            const int p = std::clamp(static_cast<int>(std::lround((m - x[0]) / h)), lo_[i], hi_[i]);
            auto put = [&](int j, double g) {
                row[j - lo_[i]] = c * ex * g;
                if (drow) drow[j - lo_[i]] = h * g / std::sqrt(kPi * v) * (2.0 * e * (x[j] - m) / v);
            };
            const double zp = x[p] - m;
            const double gp = std::exp(-zp * zp / v);
            put(p, gp);
            double g = gp, q = std::exp(-(2.0 * zp * h + h * h) / v);
            for (int j = p + 1; j <= hi_[i]; ++j) {
                g *= q;
                q *= rho;
                put(j, g);
            }
            g = gp;
            q = std::exp(-(-2.0 * zp * h + h * h) / v);
            for (int j = p - 1; j >= lo_[i]; --j) {
                g *= q;
                q *= rho;
                put(j, g);
            }
        }
    } else {
        const double sd = std::sqrt(0.5 * v), r2 = std::sqrt(2.0) * sd;
        auto upper = [&](double a) { return 0.5 * std::erfc(a / r2); };  // P(Z > a)
        auto dens = [&](double a) { return std::exp(-a * a / (r2 * r2)) / (std::sqrt(2.0 * kPi) * sd); };
        // Cell probability of N(e x_i, v/2) for cell j, tails lumped onto the edge cells.
        auto cellp = [&](int i, int j) {
            const double m = e * x[i];
            const double a = j == 0 ? -kInf : x[j] - 0.5 * h - m;
            const double b = j == N - 1 ? kInf : x[j] + 0.5 * h - m;
            return b <= 0.0 ? upper(-b) - upper(-a) : upper(a) - upper(b);
        };
#pragma omp parallel for schedule(static)
        for (int i = 0; i < N; ++i) {
            const double m = e * x[i];
            for (int j = lo_[i]; j <= hi_[i]; ++j) {
                const std::size_t k = off_[i] + (j - lo_[i]);
                val_[k] = std::min(w_[i] * cellp(i, j), w_[j] * cellp(j, i));
                if (gradient) {
                    const double a = x[j] - 0.5 * h - m, b = x[j] + 0.5 * h - m;
                    dval_[k] = e * ((j == 0 ? 0.0 : dens(a)) - (j == N - 1 ? 0.0 : dens(b)));
                }
            }
        }
    }
    for (int i = 0; i < N; ++i) {
        double* row = val_.data() + off_[i];
        double s = 0.0;
        for (int j = lo_[i]; j <= hi_[i]; ++j) s += row[j - lo_[i]];
        row[i - lo_[i]] = std::max(0.0, row[i - lo_[i]] + w_[i] - s);
        for (int j = lo_[i]; j <= hi_[i]; ++j) row[j - lo_[i]] /= w_[i];
    }
}

// (L (x) R) applied to the samples of one component; L and R are the same factor, with
// `dl` / `dr` selecting the derivative rows.
std::vector<double> tensor_apply(const Domain& d, const OuFactor& F, bool dl, bool dr, std::span<const double> f) {
    const int N = d.N();
    std::vector<double> out(f.size());
    if (d.dim() == 1) {
        F.apply(f, out, dl);
        return out;
    }
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat>(out.data(), N, N) = F.dense(dl) * Eigen::Map<const RowMat>(f.data(), N, N) * F.dense(dr).transpose();
    return out;
}

class OuTrajectory : public Trajectory {
public:
    explicit OuTrajectory(const GridFunction& f) : f_(f) {}

    GridFunction value(double t) const override {
        require(t > 0.0, "action time must be positive");
        const Domain& d = f_.domain();
        const OuFactor F(d, t, false);
        GridFunction out = zeros_like(f_);
        for (int k = 0; k < f_.M(); ++k) set_component_values(out, k, tensor_apply(d, F, false, false, component_values(f_, k)));
        return out;
    }

    std::vector<GridFunction> space_gradient(double t) const override {
        require(t > 0.0, "action time must be positive");
        const Domain& d = f_.domain();
        const OuFactor F(d, t, true);
        std::vector<GridFunction> out(d.dim(), zeros_like(f_));
        for (int k = 0; k < f_.M(); ++k) {
            const auto v = component_values(f_, k);
            set_component_values(out[0], k, tensor_apply(d, F, true, false, v));
            if (d.dim() == 2) set_component_values(out[1], k, tensor_apply(d, F, false, true, v));
        }
        return out;
    }

private:
    GridFunction f_;
};

}  // namespace

OuAction::OuAction() : SemigroupAction("ou", FixpointKind::gauss_mean) {}

std::unique_ptr<Trajectory> OuAction::trajectory(const GridFunction& f, const KernelWindow& window) const {
    check(f, window);
    return std::make_unique<OuTrajectory>(f);
}

// ---------------------------------------------------------------------------------------
// Subordination

SubordinatedAction::SubordinatedAction(ActionPtr base, SubordinationRule rule)
    : SemigroupAction("subordinated(" + base->name() + ")", base->fixpoint_kind()),
      base_(std::move(base)),
      rule_(std::move(rule)) {}

namespace {

class SubordinatedTrajectory : public Trajectory {
public:
    SubordinatedTrajectory(ActionPtr base, SubordinationRule rule, const GridFunction& f, const KernelWindow& window)
        : base_(std::move(base)), rule_(std::move(rule)), proto_(zeros_like(f)), traj_(base_->trajectory(f, window)) {
        if (rule_.kind() != SubordinationKind::log_trapezoid) return;
        const auto& u = rule_.u_nodes();
        values_.assign(u.size(), proto_);
        const long n = static_cast<long>(u.size());
        loops::ErrorSlot slot;
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) slot.run([&] { values_[i] = traj_->value(u[i]); });
        slot.rethrow();
    }

    GridFunction value(double t) const override {
        require(t > 0.0, "action time must be positive");
        if (rule_.kind() == SubordinationKind::log_trapezoid) return mix(proto_, rule_.weights(t), values_);
        GridFunction out = proto_;
        const auto u = rule_.laguerre_times(t);
        for (std::size_t i = 0; i < u.size(); ++i) axpy(out, rule_.laguerre_weights()[i], traj_->value(u[i]));
        return out;
    }

    GridFunction time_derivative(double t) const override {
        if (rule_.kind() != SubordinationKind::log_trapezoid) return Trajectory::time_derivative(t);
        require(t > 0.0, "action time must be positive");
        return mix(proto_, rule_.weight_derivatives(t), values_);
    }

    std::vector<GridFunction> space_gradient(double t) const override {
        require(t > 0.0, "action time must be positive");
        if (rule_.kind() == SubordinationKind::log_trapezoid) {
            std::call_once(grad_once_, [this] {
                const auto& u = rule_.u_nodes();
                grads_.resize(u.size());
                const long n = static_cast<long>(u.size());
                loops::ErrorSlot slot;
#pragma omp parallel for schedule(dynamic)
                for (long i = 0; i < n; ++i) slot.run([&] { grads_[i] = traj_->space_gradient(u[i]); });
                slot.rethrow();
            });
            const auto w = rule_.weights(t);
            std::vector<GridFunction> out(grads_.front().size(), proto_);
            for (std::size_t i = 0; i < grads_.size(); ++i)
                for (std::size_t a = 0; a < out.size(); ++a) axpy(out[a], w[i], grads_[i][a]);
            return out;
        }
        const auto u = rule_.laguerre_times(t);
        std::vector<GridFunction> out;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const auto g = traj_->space_gradient(u[i]);
            if (out.empty()) out.assign(g.size(), proto_);
            for (std::size_t a = 0; a < g.size(); ++a) axpy(out[a], rule_.laguerre_weights()[i], g[a]);
        }
        return out;
    }

private:
    ActionPtr base_;
    SubordinationRule rule_;
    GridFunction proto_;
    std::unique_ptr<Trajectory> traj_;
    std::vector<GridFunction> values_;
    mutable std::once_flag grad_once_;
    mutable std::vector<std::vector<GridFunction>> grads_;
};

}  // namespace

std::unique_ptr<Trajectory> SubordinatedAction::trajectory(const GridFunction& f, const KernelWindow& window) const {
    check(f, window);
    return std::make_unique<SubordinatedTrajectory>(base_, rule_, f, window);
}

namespace {

MultiplierAction::Filler subordinated_filler(std::shared_ptr<const MultiplierAction> base, SubordinationRule rule) {
    return [base = std::move(base), rule = std::move(rule)](int N, double t, bool dt, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        if (rule.kind() == SubordinationKind::log_trapezoid) {
            const auto w = dt ? rule.weight_derivatives(t) : rule.weights(t);
            const auto& u = rule.u_nodes();
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (w[i] == 0.0) continue;
                const auto tab = base->table(N, u[i], false);
                for (std::size_t k = 0; k < out.size(); ++k) out[k] += w[i] * (*tab)[k];
            }
            return;
        }
        auto value_at = [&](double s, std::vector<double>& acc, double scale) {
            const auto u = rule.laguerre_times(s);
            for (std::size_t i = 0; i < u.size(); ++i) {
                const auto tab = base->compute(N, u[i], false);
                for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += scale * rule.laguerre_weights()[i] * tab[k];
            }
        };
        if (!dt) {
            value_at(t, out, 1.0);
            return;
        }
        const double h = fd_step(t);
        require(t > h, "t too close to 0 for the finite-difference step");
        value_at(t + h, out, 1.0 / (2.0 * h));
        value_at(t - h, out, -1.0 / (2.0 * h));
    };
}

// Graded Gauss-Legendre nodes on (0, t): dyadic panels toward 0.
QuadratureRule graded_rule(double t) {
    const QuadratureRule base = gauss_legendre(8);
    QuadratureRule r;
    double hi = t;
    for (int p = 0; p <= 30; ++p) {
        const double lo = p == 30 ? 0.0 : 0.5 * hi;
        for (int i = 0; i < 8; ++i) {
            r.nodes.push_back(lo + 0.5 * (hi - lo) * (base.nodes[i] + 1.0));
            r.weights.push_back(0.5 * (hi - lo) * base.weights[i]);
        }
        hi = lo;
    }
    return r;
}

class CesaroTrajectory : public Trajectory {
public:
    CesaroTrajectory(const ActionPtr& base, const GridFunction& f, const KernelWindow& window)
        : proto_(zeros_like(f)), traj_(base->trajectory(f, window)) {}

    GridFunction value(double t) const override {
        require(t > 0.0, "action time must be positive");
        const QuadratureRule q = graded_rule(t);
        GridFunction out = proto_;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) axpy(out, q.weights[i] / t, traj_->value(q.nodes[i]));
        return out;
    }

    GridFunction time_derivative(double t) const override {
        GridFunction d = traj_->value(t);
        d -= value(t);
        d *= 1.0 / t;
        return d;
    }

    std::vector<GridFunction> space_gradient(double t) const override {
        require(t > 0.0, "action time must be positive");
        const QuadratureRule q = graded_rule(t);
        std::vector<GridFunction> out;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const auto g = traj_->space_gradient(q.nodes[i]);
            if (out.empty()) out.assign(g.size(), proto_);
            for (std::size_t a = 0; a < g.size(); ++a) axpy(out[a], q.weights[i] / t, g[a]);
        }
        return out;
    }

private:
    GridFunction proto_;
    std::unique_ptr<Trajectory> traj_;
};

// (1 - e^{-x}) / x and its derivative in x.
double cesaro_symbol(double x) { return x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x; }

double cesaro_symbol_dx(double x) {
    if (x < 1e-3) return -0.5 + x / 3.0 - x * x / 8.0 + x * x * x / 30.0;
    return (std::exp(-x) - cesaro_symbol(x)) / x;
}

std::shared_ptr<MultiplierAction> exponential_multiplier(std::string name, std::function<double(int)> exponent) {
    auto filler = [exponent](int, double t, bool dt, std::vector<double>& out) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double lam = exponent(static_cast<int>(k));
            const double e = std::exp(-lam * t);
            out[k] = dt ? -lam * e : e;
        }
    };
    return std::make_shared<MultiplierAction>(std::move(name), filler, exponent);
}

}  // namespace

CesaroAction::CesaroAction(ActionPtr base)
    : SemigroupAction("cesaro(" + base->name() + ")", base->fixpoint_kind()), base_(std::move(base)) {}

std::unique_ptr<Trajectory> CesaroAction::trajectory(const GridFunction& f, const KernelWindow& window) const {
    check(f, window);
    return std::make_unique<CesaroTrajectory>(base_, f, window);
}

ActionPtr heat_torus() {
    static const ActionPtr a = exponential_multiplier("heat-torus", [](int k) { return static_cast<double>(k) * k; });
    return a;
}

ActionPtr poisson_torus() {
    static const ActionPtr a = exponential_multiplier("poisson-torus", [](int k) { return static_cast<double>(k); });
    return a;
}

ActionPtr heat_euclid() {
    static const ActionPtr a = std::make_shared<ConvolutionAction>("heat-euclid", KernelFamily::heat);
    return a;
}

ActionPtr poisson_euclid() {
    static const ActionPtr a = std::make_shared<ConvolutionAction>("poisson-euclid", KernelFamily::poisson);
    return a;
}

ActionPtr ou_action() {
    static const ActionPtr a = std::make_shared<OuAction>();
    return a;
}

ActionPtr subordinated(ActionPtr base, SubordinationRule rule) {
    require(base != nullptr, "subordination needs a base action");
    if (auto m = std::dynamic_pointer_cast<const MultiplierAction>(base)) {
        const std::string name = "subordinated(" + base->name() + ")";
        return std::make_shared<MultiplierAction>(name, subordinated_filler(std::move(m), std::move(rule)));
    }
    return std::make_shared<SubordinatedAction>(std::move(base), std::move(rule));
}

ActionPtr cesaro(ActionPtr base) {
    require(base != nullptr, "Cesaro means need a base action");
    if (auto m = std::dynamic_pointer_cast<const MultiplierAction>(base); m && m->exponent()) {
        auto exponent = m->exponent();
        auto filler = [exponent](int, double t, bool dt, std::vector<double>& out) {
            for (std::size_t k = 0; k < out.size(); ++k) {
                const double lam = exponent(static_cast<int>(k));
                out[k] = dt ? lam * cesaro_symbol_dx(lam * t) : cesaro_symbol(lam * t);
            }
        };
        return std::make_shared<MultiplierAction>("cesaro(" + base->name() + ")", filler);
    }
    return std::make_shared<CesaroAction>(std::move(base));
}

ActionPtr make_action(const std::string& name, SubordinationRule rule) {
    if (name == "heat-line" || name == "heat-plane" || name == "heat-euclid") return heat_euclid();
    if (name == "poisson-line" || name == "poisson-plane" || name == "poisson-euclid") return poisson_euclid();
    if (name == "heat-torus") return heat_torus();
    if (name == "poisson-torus") return poisson_torus();
    if (name == "ou") return ou_action();
    if (name == "ou-poisson") return subordinated(ou_action(), std::move(rule));
    const std::string prefix = "subordinated-";
    if (name.rfind(prefix, 0) == 0) return subordinated(make_action(name.substr(prefix.size()), rule), rule);
    throw InvalidArgument("unknown action '" + name + "'");
}

double subordination_error(const SubordinationRule& rule, double t) {
    double worst = 0.0;
    for (int i = 0; i <= 24; ++i) {
        const double lam = std::pow(10.0, -2.0 + i / 4.0);
        const double approx = rule.apply([lam](double u) { return std::exp(-lam * u); }, t);
        worst = std::max(worst, std::abs(approx - std::exp(-std::sqrt(lam) * t)));
    }
    return worst;
}

GridFunction subordinate(const ActionPtr& base, const GridFunction& f, double t, const SubordinationRule& rule,
                         double tol) {
    require(t > 0.0, "subordination needs t > 0");
    const double err = subordination_error(rule, t);
    if (err > tol)
        throw QuadratureError("subordination rule " + to_string(rule.kind()) + " misses tolerance at t = " +
                                  std::to_string(t),
                              err);
    return subordinated(base, rule)->apply(f, t);
}

double subordinated_heat_kernel(double t, const Point& x, int n, const SubordinationRule& rule) {
    require(t > 0.0, "subordination needs t > 0");
    return rule.apply([&](double u) { return heat_kernel(u, x, n); }, t);
}

GridFunction cesaro_mean(const ActionPtr& action, const GridFunction& f, double t) {
    return cesaro(action)->apply(f, t);
}

}  // namespace lps
