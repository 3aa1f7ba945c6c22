#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lps/acceptance.hpp"
#include "lps/gfun.hpp"
#include "lps/io.hpp"
#include "lps/kernelcheck.hpp"
#include "lps/loops.hpp"
#include "lps/martingale.hpp"
#include "lps/normlab.hpp"
#include "lps/rng.hpp"
#include "lps/synth.hpp"

using namespace lps;

namespace {

struct RunConfig {
    std::string command;
    std::string domain;
    int n = 0;
    int N = 256;
    double L = 8.0;
    double r = 2.0;
    int M = 1;
    double p = 2.0;
    double q = 2.0;
    std::string variant = "time";
    double tmin = 1e-3, tmax = 50.0;
    int tsteps = 200;
    std::uint64_t seed = 1;
    int budget = 500;
    int restarts = 4;
    std::string input, input2, out, witness;
    std::string suite = "core";
    std::string tol = "default";
    std::string op = "gfun-torus";
    std::string action;
    double aperture = 1.0;
    int depth = 10;
    int trials = 100;
    int axis = 0;
    int k = 1;
    double width = 1.0, center = 0.0;
    std::vector<int> Ms;
    std::vector<double> radii{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> lambdas;
    std::string synth_name;
};

// Exit-code classes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Runner {
public:
    Runner(const CLI::App& app, RunConfig& cfg) : app_(app), c_(cfg) {}

    int run() {
        const std::string& cmd = c_.command;
        if (cmd == "gfun") return gfun();
        if (cmd == "area") return area();
        if (cmd == "ou-gfun") return ou_gfun();
        if (cmd == "martingale") return martingale();
        if (cmd == "kernel-profile") return kernel_profile();
        if (cmd == "norm-estimate") return norm_estimate();
        if (cmd == "cotype-sweep") return cotype();
        if (cmd == "duality-check") return duality();
        if (cmd == "equiv-check") return equivalence();
        if (cmd == "projection-check") return projection();
        if (cmd == "weak-type") return weak_type();
        if (cmd == "verify") return verify();
        if (cmd == "synth") return synth_cmd();
        throw ConfigError("unknown command '" + cmd + "'");
    }

private:
    bool given(const std::string& name) const { return app_.count("--" + name) > 0; }

    // Every setting that can influence a result; output paths are left out so that reruns
    // into different files stay byte-identical.
    json config_json(const std::optional<Domain>& dom = std::nullopt) const {
        json j{{"command", c_.command}, {"r", c_.r}, {"M", c_.M}, {"p", c_.p}, {"q", c_.q}, {"variant", c_.variant},
               {"tmin", c_.tmin}, {"tmax", c_.tmax}, {"tsteps", c_.tsteps}, {"seed", c_.seed}, {"budget", c_.budget},
               {"restarts", c_.restarts}, {"input", c_.input}, {"input2", c_.input2}, {"suite", c_.suite}, {"tol", c_.tol},
               {"op", c_.op}, {"action", c_.action}, {"aperture", c_.aperture}, {"depth", c_.depth}, {"trials", c_.trials},
               {"axis", c_.axis}, {"Ms", c_.Ms}, {"radii", c_.radii}, {"lambdas", c_.lambdas}};
        if (dom)
            j["domain"] = {{"kind", to_string(dom->kind())}, {"n", dom->dim()}, {"N", dom->N()}, {"L", dom->L()}};
        else
            j["domain"] = {{"kind", c_.domain}, {"n", c_.n}, {"N", c_.N}, {"L", c_.L}};
        j["flags"] = json::array();
        for (const CLI::Option* o : app_.get_options())
            if (o->count() > 0 && o->get_single_name() != "help") j["flags"].push_back(o->get_single_name());
        return j;
    }

    Domain domain_or(DomainKind fallback_kind, int fallback_N, double fallback_L) const {
        DomainKind kind = fallback_kind;
        if (given("domain")) {
            const std::string& d = c_.domain;
            if (d == "euclid" || d == "gauss") {
                const int n = given("n") ? c_.n : 1;
                require(n == 1 || n == 2, "--n must be 1 or 2");
                kind = d == "euclid" ? (n == 1 ? DomainKind::line : DomainKind::plane)
                                     : (n == 1 ? DomainKind::gauss_line : DomainKind::gauss_plane);
            } else {
                kind = domain_kind_from_string(d);
            }
        } else if (given("n")) {
            require(c_.n == 1 || c_.n == 2, "--n must be 1 or 2");
            if (fallback_kind == DomainKind::line || fallback_kind == DomainKind::plane)
                kind = c_.n == 1 ? DomainKind::line : DomainKind::plane;
            if (fallback_kind == DomainKind::gauss_line || fallback_kind == DomainKind::gauss_plane)
                kind = c_.n == 1 ? DomainKind::gauss_line : DomainKind::gauss_plane;
        }
        const Domain dom(kind, given("N") ? c_.N : fallback_N, given("L") ? c_.L : fallback_L);
        if (given("n")) require(dom.dim() == c_.n, "--n does not match --domain");
        return dom;
    }

    // Input file, checked against any explicit domain flags.
    GridFunction load_input(const std::string& path) const {
        GridFunction f = load_grid_function(path);
        const Domain& d = f.domain();
        if (given("domain") || given("N") || given("L") || given("n")) {
            const Domain want = domain_or(d.kind(), d.N(), d.L());
            require(want.kind() == d.kind() && want.N() == d.N() && (d.is_torus() || want.L() == d.L()),
                    "input '" + path + "' lives on " + to_string(d.kind()) + " N=" + std::to_string(d.N()) +
                        ", not on the domain given by the flags");
        }
        if (given("r")) f = f.with_r(c_.r);
        return f;
    }

    GridFunction require_input() const {
        if (c_.input.empty()) throw ConfigError(c_.command + " needs --input");
        return load_input(c_.input);
    }

    // Command-specific time grid defaults, recorded back into the config.
    TimeGrid time_grid(double tmin, double tmax, int K) const {
        if (!given("tmin")) c_.tmin = tmin;
        if (!given("tmax")) c_.tmax = tmax;
        if (!given("tsteps")) c_.tsteps = K;
        return time_grid();
    }
    TimeGrid time_grid() const { return TimeGrid(c_.tmin, c_.tmax, c_.tsteps); }

    void emit(const json& report) const { std::cout << report.dump(2) << "\n"; }

    void emit_to_out(const std::string& content) const {
        if (c_.out.empty())
            std::cout << content;
        else
            write_atomic(c_.out, content);
    }

    void save_field(const GridFunction& g) const {
        if (c_.out.empty()) return;
        if (c_.out.size() > 4 && c_.out.substr(c_.out.size() - 4) == ".csv") {
            write_atomic(c_.out, to_csv(g));
        } else {
            json j = to_json(g);
            j["config"] = config_json(g.domain());
            write_atomic(c_.out, j.dump() + "\n");
        }
    }

    static json field_summary(const GridFunction& g) {
        double mx = 0.0;
        for (std::size_t c = 0; c < g.cells(); ++c) mx = std::max(mx, b_norm(g.at(c), g.r()));
        return {{"max", mx}, {"lp_norm_2", lp_norm(g, 2.0)}};
    }

    int gfun() {
        const GridFunction f = require_input();
        const std::string v = c_.variant;
        json rep{{"config", config_json(f.domain())}};
        GridFunction g = f;
        if (v == "radial" || v == "radial-full") {
            g = g_torus_radial(f, c_.q, v == "radial" ? RadialVariant::radial : RadialVariant::full);
        } else {
            ActionPtr act;
            if (!c_.action.empty()) act = make_action(c_.action);
            else if (f.domain().is_torus()) act = subordinated(heat_torus());
            else if (f.domain().is_gauss()) act = subordinated(ou_action());
            else act = poisson_euclid();
            const GResult res = gfunction_report(f, GSpec{act, c_.q, gvariant_from_string(v), time_grid(), {}});
            g = res.g;
            rep["head"] = res.head;
            rep["tail"] = res.tail;
            rep["action"] = act->name();
        }
        rep["result"] = field_summary(g);
        save_field(g);
        emit(rep);
        return 0;
    }

    int area() {
        const GridFunction f = require_input();
        const AreaResult res = area_function_report(f, AreaSpec{c_.q, c_.aperture, time_grid()});
        save_field(res.A);
        emit({{"config", config_json(f.domain())}, {"clipped", res.clipped}, {"result", field_summary(res.A)}});
        return 0;
    }

    int ou_gfun() {
        const GridFunction f = require_input();
        const GridFunction g = ou_gfunction(f, c_.q, gvariant_from_string(c_.variant), time_grid());
        save_field(g);
        emit({{"config", config_json(f.domain())}, {"result", field_summary(g)}});
        return 0;
    }

    int martingale() {
        MartingaleTrialSpec s;
        s.depth = c_.depth;
        s.M = c_.M;
        s.r = c_.r;
        s.q = c_.q;
        s.p = c_.p;
        s.trials = c_.trials;
        s.seed = c_.seed;
        emit_to_out(martingale_csv(s, martingale_trials(s)));
        return 0;
    }

    int kernel_profile() {
        const int n = given("n") ? c_.n : 1;
        require(n == 1 || n == 2, "--n must be 1 or 2");
        require(c_.axis >= 0 && c_.axis < n, "--axis must be below --n");
        const TimeGrid fiber = time_grid(std::ldexp(1.0, -16), std::ldexp(1.0, 16), 321);
        const CzProfile prof = cz_bound_profile(OperatorKernel::poisson_fiber(n, c_.axis, fiber), c_.radii);
        emit_to_out(kernel_profile_csv(prof));
        return 0;
    }

    OpSpec op_spec() const {
        OpSpec op{c_.op, c_.q, GVariant::time, time_grid(), c_.aperture};
        op.variant = gvariant_from_string(c_.variant);
        const auto& ids = operator_ids();
        require(std::find(ids.begin(), ids.end(), c_.op) != ids.end(), "unknown operator '" + c_.op + "'");
        return op;
    }

    Domain op_domain(const OpSpec& op) const {
        if (op.id == "gfun-euclid" || op.id == "area") return domain_or(DomainKind::line, 256, 8.0);
        if (op.id == "ou-gfun") return domain_or(DomainKind::gauss_line, 256, 7.0);
        return domain_or(DomainKind::torus, 256, 1.0);
    }

    int norm_estimate() {
        const OpSpec op = op_spec();
        SearchSpec s;
        s.domain = op_domain(op);
        require(op.supports(s.domain), "operator '" + op.id + "' does not act on " + to_string(s.domain.kind()));
        s.M = c_.M;
        s.r = c_.r;
        s.p = c_.p;
        s.budget = c_.budget;
        s.restarts = c_.restarts;
        s.seed = c_.seed;
        const NormEstimate e = extremal_search(op, s);
        json rep = to_json(e);
        rep["config"] = config_json(s.domain);
        const std::string text = rep.dump(2) + "\n";
        emit_to_out(text);
        if (!c_.witness.empty()) save_grid_function(c_.witness, e.witness);
        return 0;
    }

    int cotype() {
        CotypeSpec s;
        s.r = c_.r;
        s.q = c_.q;
        s.p = c_.p;
        s.seed = c_.seed;
        if (given("budget")) s.budget = c_.budget;
        if (given("restarts")) s.restarts = c_.restarts;
        if (!c_.Ms.empty()) s.M_list = c_.Ms;
        c_.budget = s.budget;
        c_.restarts = s.restarts;
        c_.Ms = s.M_list;
        const auto rows = cotype_sweep(s);
        if (c_.out.size() > 4 && c_.out.substr(c_.out.size() - 4) == ".csv") {
            std::string csv = "M,N,witness_ratio,estimate,growth\n";
            for (const auto& r : rows)
                csv += std::to_string(r.M) + "," + std::to_string(r.N) + "," + format_double(r.witness_ratio) + "," +
                       format_double(r.estimate.estimate) + "," + format_double(r.growth) + "\n";
            write_atomic(c_.out, csv);
            return 0;
        }
        json jr = json::array();
        for (const auto& r : rows)
            jr.push_back({{"M", r.M}, {"N", r.N}, {"witness_ratio", r.witness_ratio}, {"estimate", r.estimate.estimate},
                          {"growth", r.growth}, {"best_restart", r.estimate.best_restart}});
        json rep{{"config", config_json()}, {"rows", jr}, {"growth_threshold", 1.0704},
                 {"growth_threshold_source", "lacunary witness oracle"}};
        emit_to_out(rep.dump(2) + "\n");
        return 0;
    }

    GridFunction random_torus_trig(std::uint64_t stream) const {
        const Domain d = domain_or(DomainKind::torus, 2048, 1.0);
        require(d.is_torus(), "duality-check runs on the torus");
        auto g = stream_rng(c_.seed, stream);
        std::normal_distribution<double> gauss;
        std::vector<double> a(17), b(17);
        for (int k = 0; k <= 16; ++k) {
            a[k] = gauss(g);
            b[k] = k == 0 ? 0.0 : gauss(g);
        }
        return GridFunction::scalar(d, [&](Point x) {
            double s = 0.0;
            for (int k = 0; k <= 16; ++k) s += a[k] * std::cos(k * x[0]) + b[k] * std::sin(k * x[0]);
            return s;
        });
    }

    int duality() {
        const GridFunction f = c_.input.empty() ? random_torus_trig(0) : load_input(c_.input);
        const GridFunction g = !c_.input2.empty() ? load_input(c_.input2) : (c_.input.empty() ? random_torus_trig(1) : f);
        const DualityResult r = duality_pairing_check(f, g, time_grid(1e-5, 50.0, 200));
        const json rep{{"config", config_json(f.domain())}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"relative_error", r.relative_error}};
        emit_to_out(rep.dump(2) + "\n");
        return 0;
    }

    static double bump(double x, double c = 0.0, double w = 1.0) {
        const double y = (x - c) / w;
        return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0;
    }

    int equivalence() {
        const GridFunction f = c_.input.empty()
                                   ? GridFunction::scalar(domain_or(DomainKind::line, 512, 8.0), [](Point x) { return bump(std::hypot(x[0], x[1])); })
                                   : load_input(c_.input);
        const EquivalenceResult r = time_space_equivalence_check(f, c_.q, c_.p, time_grid());
        const json rep{{"config", config_json(f.domain())}, {"g1", r.g1}, {"g2", r.g2}, {"ratio", r.ratio}, {"identity_error", r.identity_error}};
        emit_to_out(rep.dump(2) + "\n");
        return 0;
    }

    int projection() {
        const GridFunction f = c_.input.empty()
                                   ? GridFunction::scalar(domain_or(DomainKind::line, 256, 8.0),
                                                          [](Point x) { return bump(x[0], 0.5) - bump(x[0], -0.5); })
                                   : load_input(c_.input);
        const TimeGrid grid = time_grid(1e-3, 100.0, 200);
        const TimeFibered h = range_fiber(f, grid);
        const GridFunction Qh = projection_Q(h);
        double err = 0.0, scale = 0.0;
        const Domain& d = f.domain();
        for (std::size_t c = 0; c < d.cells(); ++c) {
            const Point x = d.point(c);
            if (std::max(std::abs(x[0]), std::abs(x[1])) > 0.5 * d.L()) continue;
            for (int k = 0; k < f.M(); ++k) {
                err = std::max(err, std::abs(Qh(c, k) - 0.25 * f(c, k)));
                scale = std::max(scale, 0.25 * std::abs(f(c, k)));
            }
        }
        const double ratio = projection_boundedness_check(h, c_.q, c_.p);
        save_field(Qh);
        emit({{"config", config_json(f.domain())}, {"ratio", ratio}, {"range_error", scale > 0.0 ? err / scale : 0.0}});
        return 0;
    }

    int weak_type() {
        OpSpec op = op_spec();
        if (!given("op")) op.id = "gfun-euclid";
        const GridFunction f = c_.input.empty()
                                   ? GridFunction::scalar(domain_or(DomainKind::line, 1024, 16.0), [](Point x) { return bump(x[0]); })
                                   : load_input(c_.input);
        const WeakTypeResult r = weak_type_profile(op, f, c_.lambdas);
        const json rep{{"config", config_json(f.domain())}, {"operator", op.id}, {"value", r.value}, {"lambda", r.lambda}};
        emit_to_out(rep.dump(2) + "\n");
        return 0;
    }

    int verify() {
        const std::vector<int> ids = acceptance_suite(c_.suite);
        const double tol = tolerance_factor(c_.tol);
        std::vector<CriterionResult> rows;
        bool ok = true;
        for (int id : ids) {
            rows.push_back(run_criterion(id, tol, c_.seed));
            std::cout << format_line(rows.back()) << std::endl;
            ok = ok && rows.back().pass;
        }
        int passed = 0;
        for (const auto& r : rows) passed += r.pass;
        std::cout << passed << "/" << rows.size() << " criteria passed\n";
        if (!c_.out.empty()) write_atomic(c_.out, format_table(rows));
        return ok ? 0 : 1;
    }

    int synth_cmd() {
        if (c_.out.empty()) throw ConfigError("synth needs --out");
        SynthParams p;
        p.kind = domain_or(DomainKind::torus, 256, 8.0).kind();
        p.N = given("N") ? c_.N : 256;
        p.L = given("L") ? c_.L : (p.kind == DomainKind::torus ? 1.0 : 8.0);
        p.M = c_.M;
        p.r = c_.r;
        p.k = c_.k;
        p.depth = given("depth") ? c_.depth : 3;
        p.width = c_.width;
        p.center = c_.center;
        if (c_.synth_name == "haar" && !given("L")) p.L = 1.0;
        if (c_.synth_name == "hermite2" && !given("domain")) p.kind = DomainKind::gauss_line;
        if ((c_.synth_name == "bump" || c_.synth_name == "dirac-col") && !given("domain")) p.kind = DomainKind::line;
        const GridFunction f = synth(c_.synth_name, p);
        save_grid_function(c_.out, f);
        return 0;
    }

    const CLI::App& app_;
    RunConfig& c_;
};

const std::vector<std::pair<std::string, std::string>> kCommands{
    {"gfun", "g-function of --input (time, space, full, radial, radial-full)"},
    {"area", "Poisson area function of --input on a line or plane"},
    {"ou-gfun", "Ornstein-Uhlenbeck g-function of --input on a Gaussian grid"},
    {"martingale", "seeded dyadic martingale trials, CSV"},
    {"kernel-profile", "size and gradient bounds of the Poisson fiber kernel, CSV"},
    {"norm-estimate", "extremal search for an operator norm lower bound, JSON"},
    {"cotype-sweep", "lacunary-seeded norm estimates over --Ms"},
    {"duality-check", "pairing identity on the torus"},
    {"equiv-check", "time/space g-function comparison on a line or plane"},
    {"projection-check", "projection Q on the range of t d_t P_t"},
    {"weak-type", "weak-type profile of --op applied to --input"},
    {"verify", "run the acceptance suite"},
    {"synth", "write a named input: cos, lacunary, haar, bump, hermite2, dirac-col"},
};

}  // namespace

int main(int argc, char** argv) {
    try {
        loops::configure_threads_from_env();
    } catch (const std::exception& e) {
        std::cerr << "lpslab: " << e.what() << "\n";
        return 2;
    }

    RunConfig c;
    CLI::App app{"Littlewood-Paley square functions, martingales and kernel checks"};
    app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.add_option("--domain", c.domain, "torus, line, plane, gauss-line, gauss-plane, euclid, gauss");
    app.add_option("--n", c.n, "dimension for euclid/gauss domains and kernel-profile");
    app.add_option("--N", c.N, "points per axis");
    app.add_option("--L", c.L, "half-width of line/plane windows");
    app.add_option("--r", c.r, "exponent of the l^r_M coordinate norm");
    app.add_option("--M", c.M, "number of coordinates");
    app.add_option("--p", c.p, "outer L^p exponent");
    app.add_option("--q", c.q, "square-function exponent");
    app.add_option("--variant", c.variant, "time, space, full (gfun also radial, radial-full)");
    app.add_option("--tmin", c.tmin, "smallest time node");
    app.add_option("--tmax", c.tmax, "largest time node");
    app.add_option("--tsteps", c.tsteps, "number of time nodes");
    app.add_option("--seed", c.seed, "seed for every random draw");
    app.add_option("--budget", c.budget, "ratio evaluations per restart");
    app.add_option("--restarts", c.restarts, "independent search restarts");
    app.add_option("--input", c.input, "GridFunction JSON file");
    app.add_option("--input2", c.input2, "second GridFunction for duality-check");
    app.add_option("--out", c.out, "output file (.json or .csv)");
    app.add_option("--witness", c.witness, "norm-estimate: file for the best input found");
    app.add_option("--suite", c.suite, "verify: core or a comma list of criterion ids");
    app.add_option("--tol", c.tol, "verify: default or a tolerance factor");
    app.add_option("--op", c.op, "operator id for norm-estimate and weak-type");
    app.add_option("--action", c.action, "gfun: semigroup name, e.g. poisson-torus");
    app.add_option("--aperture", c.aperture, "cone aperture of the area function");
    app.add_option("--depth", c.depth, "dyadic depth (martingale, haar)");
    app.add_option("--trials", c.trials, "martingale trials");
    app.add_option("--axis", c.axis, "kernel-profile: derivative axis");
    app.add_option("--k", c.k, "synth cos: frequency");
    app.add_option("--width", c.width, "synth bump and dirac-col: support radius");
    app.add_option("--center", c.center, "synth bump and dirac-col: centre on the first axis");
    app.add_option("--Ms", c.Ms, "cotype-sweep: increasing coordinate counts")->delimiter(',');
    app.add_option("--radii", c.radii, "kernel-profile: sampled |x - y|")->delimiter(',');
    app.add_option("--lambdas", c.lambdas, "weak-type: increasing level grid")->delimiter(',');

    for (const auto& [name, help] : kCommands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->set_help_flag();
        sub->footer("Options are shared by all commands; see lpslab --help.");
        sub->callback([&c, n = name] { c.command = n; });
        if (name == "synth") sub->add_option("name", c.synth_name, "input name")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (app.get_subcommands().empty()) std::cerr << app.help();
        return 2;
    }

    try {
        Runner runner(app, c);
        return runner.run();
    } catch (const ConfigError& e) {
        std::cerr << "lpslab: " << e.what() << "\nRun with --help for more information.\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "lpslab: " << e.what() << "\n";
        return 2;
    } catch (const QuadratureError& e) {
        std::cerr << "lpslab: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "lpslab: " << e.what() << "\n";
        return 1;
    }
}
