// Acceptance gate: nine numbered criteria, one line of output each, exit 0
// only if every one passes.  Each criterion carries a wall-clock budget that
// is enforced, not just reported.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ekdiff/ekops.hpp"
#include "ekdiff/errors.hpp"
#include "ekdiff/greenfn.hpp"
#include "ekdiff/mwright.hpp"
#include "ekdiff/quadrature.hpp"
#include "ekdiff/sampler.hpp"
#include "ekdiff/solver.hpp"

using namespace ekdiff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string eng(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

const double kPi = std::acos(-1.0);

// ---------------------------------------------------------------- criterion 1
Outcome criterion_gaussian_case() {
    const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
    double worst = 0.0;
    for (int k = 0; k <= 500; ++k) {
        const double z = 0.01 * k;
        const double want = inv_sqrt_pi * std::exp(-0.25 * z * z);
        worst = std::max(worst, std::abs(mwright_eval(WrightOrder(0.5), z) - want) / want);
    }
    return {worst < 1e-12, "max rel err " + eng(worst) + " (< 1e-12)"};
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_composition() {
    double worst = 0.0;
    for (double lambda : {0.4, 0.5, 0.6})
        for (double ell : {0.4, 0.5, 0.6})
            for (double xi : {0.5, 1.0, 2.0})
                for (double t : {0.5, 1.0, 2.0}) {
                    const double nu = lambda * ell;
                    const double sc = std::pow(t, -nu);
                    const double direct = sc * mwright_eval(WrightOrder(nu), xi * sc);
                    const double composed =
                        mwright_compose(WrightOrder(lambda), WrightOrder(ell), xi, t);
                    worst = std::max(worst, std::abs(composed - direct));
                }
    return {worst < 1e-6, "max abs err " + eng(worst) + " (< 1e-6)"};
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_moments() {
    double worst = 0.0;
    for (double beta : {0.25, 0.5, 0.75})
        for (double delta : {0.0, 1.0, 2.0}) {
            // quadrature moment over [0, tail_cut], independent of the
            // closed-form moment routine
            const WrightOrder order(beta);
            const double hi = mwright_tail_cut(order, 1e-14);
            const QuadRule& r = gauss_legendre(256);
            double acc = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) {
                const double z = 0.5 * hi * (1.0 + r.nodes[i]);
                acc += r.weights[i] * std::pow(z, delta) * mwright_eval(order, z, 1e-18);
            }
            acc *= 0.5 * hi;
            const double want = std::tgamma(delta + 1.0) / std::tgamma(beta * delta + 1.0);
            worst = std::max(worst, std::abs(acc - want) / want);
        }
    return {worst < 1e-6, "max rel err " + eng(worst) + " (< 1e-6)"};
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_operator_identities() {
    // (a) power-law eigenrelation against the Gamma-ratio closed form
    double worst_a = 0.0;
    for (double gamma : {-0.5, 0.0, 1.0})
        for (double mu : {0.3, 0.5, 0.8})
            for (double eta : {0.5, 1.0, 2.0})
                for (double c : {0.0, 1.0, 2.0}) {
                    const EKParams p(gamma, mu, eta);
                    const double t = 1.3;
                    const SampledFunction f = SampledFunction::from_callable(
                        [c](double tau) { return std::pow(tau, c); });
                    const double want = ek_power_oracle(p, c) * std::pow(t, c);
                    worst_a = std::max(worst_a,
                                       std::abs(ek_integral(p, f, t) - want) / std::abs(want));
                }
    if (!(worst_a < 1e-7))
        return {false, "eigenrelation rel err " + eng(worst_a) + " (>= 1e-7)"};

    // (b) the gamma = 0, eta = 1 member equals t^-mu times the
    // Riemann-Liouville integral, the two sides by unrelated quadratures
    const std::vector<std::function<double(double)>> phis = {
        [](double) { return 1.0; },
        [](double tau) { return tau; },
        [](double tau) { return tau * tau; },
        [](double tau) { return std::exp(-tau); },
    };
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> mu_draw(0.05, 0.95), t_draw(0.3, 2.5);
    double worst_b = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const double mu = mu_draw(rng);
        const double t = t_draw(rng);
        for (const auto& phi : phis) {
            const SampledFunction f = SampledFunction::from_callable(phi);
            const double lhs = ek_integral(EKParams(0.0, mu, 1.0), f, t);
            const double rhs = std::pow(t, -mu) * rl_integral(mu, f, t);
            worst_b = std::max(worst_b, std::abs(lhs - rhs));
        }
    }
    if (!(worst_b < 1e-9)) return {false, "RL route abs err " + eng(worst_b) + " (>= 1e-9)"};

    // (c) the order-0 derivative is the identity, bit for bit
    for (double gamma : {-0.3, 0.8})
        for (double eta : {0.7, 1.6})
            for (double t : {0.4, 1.7}) {
                const SampledFunction f = SampledFunction::from_callable(
                    [](double tau) { return std::cos(tau) + tau; });
                if (ek_derivative(EKParams(gamma, 0.0, eta), f, t) != f(t))
                    return {false, "order-0 derivative is not the exact identity"};
            }
    return {true, "eigen " + eng(worst_a) + " (< 1e-7), RL " + eng(worst_b) +
                      " (< 1e-9), identity exact"};
}

// ---------------------------------------------------------------- criterion 5
double l1_vs_green(const SolutionField& f, std::size_t rec) {
    const Grid1D& g = f.config.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i)
        acc += std::abs(f.values[rec][i] -
                        ggbm_green(f.config.params, g.node(i), f.times[rec]));
    return acc * g.dx();
}

Outcome criterion_solver() {
    struct Fixture {
        double alpha, beta, t0, l1_bound;
    };
    const Fixture fixtures[] = {
        {1.0, 1.0, 0.01, 1e-3},
        {0.6, 0.6, 0.01, 5e-3},
        {1.4, 1.0, 0.1, 5e-3},
        {0.8, 0.5, 0.01, 5e-3},
    };
    std::string detail;
    for (const Fixture& fx : fixtures) {
        SolverConfig cfg(DiffusionParams(fx.alpha, fx.beta), Grid1D(-10.0, 10.0, 401),
                         fx.t0, 1.0, 200);
        cfg.record_every = 200;
        const SolutionField f = solve(cfg);
        const double l1 = l1_vs_green(f, f.times.size() - 1);
        if (!(l1 < fx.l1_bound))
            return {false, "L1(" + eng(fx.alpha) + "," + eng(fx.beta) + ") = " + eng(l1) +
                               " (>= " + eng(fx.l1_bound) + ")"};
        double worst_var = 0.0;
        for (std::size_t n = 0; n < f.step_times.size(); ++n) {
            const double want = green_variance(cfg.params, f.step_times[n]);
            worst_var = std::max(worst_var, std::abs(f.variance[n] - want) / want);
        }
        if (!(worst_var < 0.01))
            return {false, "variance(" + eng(fx.alpha) + "," + eng(fx.beta) + ") off by " +
                               eng(worst_var) + " (>= 1%)"};
        detail += eng(l1) + " ";
    }

    // dt refinement: same grid throughout, finest run as reference, so the
    // fixed spatial error cancels and the step order is isolated
    const double pairs[][2] = {{1.0, 1.0}, {0.6, 0.6}, {1.4, 0.8}};
    std::string orders;
    for (const auto& pr : pairs) {
        auto final_profile = [&](std::size_t nt) {
            SolverConfig cfg(DiffusionParams(pr[0], pr[1]), Grid1D(-10.0, 10.0, 201), 0.15,
                             1.0, nt);
            cfg.record_every = nt;
            return solve(cfg).values.back();
        };
        const std::vector<double> ref = final_profile(400);
        std::vector<double> errs;
        for (std::size_t nt : {50u, 100u, 200u}) {
            const std::vector<double> p = final_profile(nt);
            double acc = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - ref[i]);
            errs.push_back(acc * 0.1);
        }
        // least-squares slope of log err against log dt over the three runs
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double x = std::log(1.0 / static_cast<double>(50u << k));
            const double y = std::log(errs[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double order = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
        if (!(order >= 0.9))
            return {false, "dt order(" + eng(pr[0]) + "," + eng(pr[1]) + ") = " + eng(order) +
                               " (< 0.9)"};
        orders += eng(order) + " ";
    }
    return {true, "L1 " + detail + "ok, variance within 1%, dt orders " + orders +
                      "(all >= 0.9)"};
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_sampler() {
    const double pairs[][2] = {{1.0, 1.0}, {0.6, 0.4}, {1.5, 0.8}};
    const std::size_t n = 20000;
    std::string detail;
    for (const auto& pr : pairs) {
        std::vector<double> nodes(20);
        for (std::size_t k = 0; k < 20; ++k) nodes[k] = 0.05 * static_cast<double>(k + 1);
        EnsembleConfig cfg(DiffusionParams(pr[0], pr[1]), nodes, n, 20240817);
        const PathEnsemble ens = ggbm_paths(cfg);

        // (a) KS of the t = 1 marginal against the tabulated exact pdf
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = ens.paths[i][19];
        std::sort(xs.begin(), xs.end());
        const GreenProfile prof = green_profile(cfg.params, 1.0, 4001);
        std::vector<double> cdf(prof.x_nodes.size(), 0.0);
        for (std::size_t i = 1; i < cdf.size(); ++i)
            cdf[i] = cdf[i - 1] + 0.5 * (prof.values[i] + prof.values[i - 1]) *
                                      (prof.x_nodes[i] - prof.x_nodes[i - 1]);
        const double mass = cdf.back();
        auto cdf_at = [&](double x) {
            if (x <= prof.x_nodes.front()) return 0.0;
            if (x >= prof.x_nodes.back()) return 1.0;
            const double step = prof.x_nodes[1] - prof.x_nodes[0];
            const std::size_t j = static_cast<std::size_t>((x - prof.x_nodes.front()) / step);
            const double frac = (x - prof.x_nodes[j]) / step;
            return (cdf[j] + frac * (cdf[j + 1] - cdf[j])) / mass;
        };
        double ks = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double F = cdf_at(xs[i]);
            ks = std::max(ks, std::max(std::abs(F - static_cast<double>(i) / n),
                                       std::abs(F - static_cast<double>(i + 1) / n)));
        }
        const double crit = 1.63 / std::sqrt(static_cast<double>(n));
        if (!(ks < crit))
            return {false, "KS(" + eng(pr[0]) + "," + eng(pr[1]) + ") = " + eng(ks) +
                               " (>= " + eng(crit) + ")"};

        // (b) slope and (c) amplitude of the variance law
        const EnsembleStats st = ensemble_stats(ens);
        if (!(std::abs(st.loglog_slope - pr[0]) < 0.05))
            return {false, "slope(" + eng(pr[0]) + "," + eng(pr[1]) + ") = " +
                               eng(st.loglog_slope) + " (alpha +- 0.05 violated)"};
        double mean_lv = 0.0, mean_lt = 0.0;
        for (std::size_t k = 0; k < 20; ++k) {
            mean_lv += std::log(st.variance_curve[k]);
            mean_lt += std::log(nodes[k]);
        }
        const double amp = std::exp(mean_lv / 20.0 - st.loglog_slope * mean_lt / 20.0);
        const double amp_want = 2.0 / std::tgamma(pr[1] + 1.0);
        if (!(std::abs(amp - amp_want) < 0.05 * amp_want))
            return {false, "amplitude(" + eng(pr[0]) + "," + eng(pr[1]) + ") = " + eng(amp) +
                               " vs " + eng(amp_want) + " (5% violated)"};
        detail += "KS " + eng(ks) + " slope " + eng(st.loglog_slope) + "; ";
    }

    // (d) beta = 1 collapses to plain fBm, bit for bit
    std::vector<double> nodes(10);
    for (std::size_t k = 0; k < 10; ++k) nodes[k] = 0.1 * static_cast<double>(k + 1);
    EnsembleConfig cfg(DiffusionParams(1.5, 1.0), nodes, 500, 99);
    const PathEnsemble ens = ggbm_paths(cfg);
    const auto plain = fbm_paths(0.75, nodes, 500, 99);
    if (ens.paths != plain) return {false, "beta = 1 ensemble differs from plain fBm"};
    for (double v : ens.tau)
        if (v != 1.0) return {false, "beta = 1 tau draw differs from 1"};
    return {true, detail + "beta = 1 bitwise fBm"};
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_reductions() {
    const double xs[] = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
    const double ts[] = {0.5, 1.0, 2.0};
    double worst = 0.0;
    for (double t : ts)
        for (double ax : xs)
            for (double sgn : {-1.0, 1.0}) {
                const double x = sgn * ax;
                worst = std::max(worst, std::abs(ggbm_green(DiffusionParams(1.0, 1.0), x, t) -
                                                 gaussian_green(x, t)));
                worst = std::max(worst, std::abs(ggbm_green(DiffusionParams(0.6, 0.6), x, t) -
                                                 time_fractional_green(0.6, x, t)));
                worst = std::max(worst, std::abs(ggbm_green(DiffusionParams(1.4, 1.0), x, t) -
                                                 stretched_gaussian_green(1.4, x, t)));
            }
    return {worst < 1e-10, "max abs err " + eng(worst) + " (< 1e-10)"};
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_mixture() {
    const double xs[] = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
    const double ts[] = {0.5, 1.0, 2.0};
    const double pairs[][2] = {{1.0, 1.0}, {0.6, 0.6}, {1.4, 1.0}};
    double worst = 0.0;
    for (const auto& pr : pairs) {
        const DiffusionParams p(pr[0], pr[1]);
        for (double t : ts)
            for (double x : xs)
                worst = std::max(worst, std::abs(ggbm_green(p, x, t) - green_mixture(p, x, t)));
    }
    return {worst < 1e-6, "max abs err " + eng(worst) + " (< 1e-6)"};
}

// ---------------------------------------------------------------- criterion 9
std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Outcome criterion_cli() {
    const char* bin = std::getenv("EKDIFF_CLI_BIN");
    if (!bin || !*bin)
        return {false, "EKDIFF_CLI_BIN not set (path to the ekdiff executable)"};
    const fs::path dir = fs::path("acceptance_scratch");
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string q = std::string("\"") + bin + "\"";

    auto run = [&](const std::string& args) {
        const std::string cmd = q + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    // identical command and seed must give byte-identical CSVs
    const std::string mw =
        " mwright --nu 0.6 --range 0:4 --n 64 --out " + (dir / "mw").string();
    if (run(mw + "1.csv") != 0 || run(mw + "2.csv") != 0)
        return {false, "mwright run failed"};
    if (slurp(dir / "mw1.csv") != slurp(dir / "mw2.csv"))
        return {false, "mwright reruns differ"};

    for (int rep = 1; rep <= 2; ++rep) {
        const std::string r = std::to_string(rep);
        const std::string sim = " simulate --alpha 1 --beta 0.8 --paths 300 --n-steps 12"
                                " --t-end 1 --seed 7 --out-paths " +
                                (dir / ("p" + r + ".csv")).string() + " --out-stats " +
                                (dir / ("s" + r + ".csv")).string();
        if (run(sim) != 0) return {false, "simulate run failed"};
    }
    if (slurp(dir / "p1.csv") != slurp(dir / "p2.csv") ||
        slurp(dir / "s1.csv") != slurp(dir / "s2.csv"))
        return {false, "simulate reruns differ"};

    // quick verification: under a minute, exit 0
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = run(" verify --level quick");
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rc != 0) return {false, "verify quick exited nonzero"};
    if (!(secs < 60.0)) return {false, "verify quick took " + eng(secs) + " s (>= 60 s)"};
    fs::remove_all(dir);
    return {true, "reruns byte-identical, verify quick " + eng(secs) + " s (< 60 s)"};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        double budget_s;
        std::function<Outcome()> fn;
    };
    const Entry entries[] = {
        {"M-Wright Gaussian case", 1.0, criterion_gaussian_case},
        {"composition formula", 30.0, criterion_composition},
        {"moments", 5.0, criterion_moments},
        {"EK operator identities", 10.0, criterion_operator_identities},
        {"solver vs analytic profile", 120.0, criterion_solver},
        {"sampler distributional checks", 180.0, criterion_sampler},
        {"reductions triad", 1.0, criterion_reductions},
        {"dual representation", 30.0, criterion_mixture},
        {"CLI reproducibility", 90.0, criterion_cli},
    };

    bool all = true;
    int idx = 0;
    for (const Entry& e : entries) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out = {false, std::string("exception: ") + ex.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= e.budget_s) {
            out.pass = false;
            out.detail += " [over budget]";
        }
        std::printf("criterion %d (%s): %s  %s  [%.2f s < %.0f s]\n", idx, e.name,
                    out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs, e.budget_s);
        std::fflush(stdout);
        all = all && out.pass;
    }
    std::printf(all ? "acceptance: all criteria PASS\n" : "acceptance: FAILURES above\n");
    return all ? 0 : 1;
}
