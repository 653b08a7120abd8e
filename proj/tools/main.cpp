// ekdiff: evaluate the density family, run the solver and the sampler, and
// audit the build, from the shell.  Every file-writing run also writes a JSON
// manifest naming its outputs; the manifest is written last, so its presence
// marks a run that finished.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parameter error,
// 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ekdiff/csv.hpp"
#include "ekdiff/ekops.hpp"
#include "ekdiff/errors.hpp"
#include "ekdiff/greenfn.hpp"
#include "ekdiff/mwright.hpp"
#include "ekdiff/sampler.hpp"
#include "ekdiff/solver.hpp"
#include "ekdiff/svg.hpp"
#include "ekdiff/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

// Collects what a command did; dumped as the manifest once everything else
// is on disk.
struct RunRecord {
    std::string command;
    json parameters = json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

void write_manifest(const RunRecord& rec, const std::string& path) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - rec.start).count();
    json j;
    j["command"] = rec.command;
    j["parameters"] = rec.parameters;
    j["seed"] = rec.seed;
    j["tool_version"] = kVersion;
    j["outputs"] = rec.outputs;
    j["duration_seconds"] = elapsed;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ekdiff::Error("cannot open manifest file " + path);
    os << j.dump(2) << "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ekdiff::Error("cannot open output file " + path);
    return os;
}

// "lo:hi" with both ends parsed as doubles.
void parse_range(const std::string& text, double& lo, double& hi) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ekdiff::DomainError("range must look like lo:hi, got '" + text + "'");
    std::size_t used = 0;
    try {
        lo = std::stod(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing characters");
        const std::string rest = text.substr(colon + 1);
        hi = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw ekdiff::DomainError("range must look like lo:hi, got '" + text + "'");
    }
    if (!(lo <= hi)) throw ekdiff::DomainError("range lo must not exceed hi");
}

void emit_csv(const std::string& path, RunRecord& rec,
              const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows,
              const std::vector<std::string>& leading = {},
              const std::vector<std::string>& footer = {}) {
    if (path.empty()) {
        ekdiff::write_csv(std::cout, header, rows, leading, footer);
        return;
    }
    auto os = open_out(path);
    ekdiff::write_csv(os, header, rows, leading, footer);
    rec.outputs.push_back(path);
}

void emit_svg(const std::string& path, RunRecord& rec,
              const std::vector<ekdiff::SvgSeries>& series, const std::string& title,
              const std::string& x_label, const std::string& y_label) {
    auto os = open_out(path);
    ekdiff::write_svg_plot(os, series, title, x_label, y_label);
    rec.outputs.push_back(path);
}

void finish(RunRecord& rec, const std::string& manifest, const std::string& primary_out) {
    if (!manifest.empty()) {
        write_manifest(rec, manifest);
    } else if (!primary_out.empty()) {
        write_manifest(rec, primary_out + ".manifest.json");
    }
}

int cmd_mwright(double nu, const std::string& range, std::size_t n, double drop_below,
                const std::string& out, const std::string& manifest) {
    RunRecord rec;
    rec.command = "mwright";
    double lo = 0.0, hi = 0.0;
    parse_range(range, lo, hi);
    if (n < 1) throw ekdiff::DomainError("need n >= 1");
    if (n == 1 && lo != hi) throw ekdiff::DomainError("n = 1 needs a degenerate range lo:lo");
    const ekdiff::WrightOrder order(nu);
    if (order.is_dirac())
        throw ekdiff::DiracOrderError(
            "nu = 1 is a unit point mass at z = 1 and has no pointwise values; "
            "use moments or the sampler instead");
    rec.parameters = {{"nu", nu}, {"range", range}, {"n", n}, {"drop_below", drop_below}};

    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    const double step = (n > 1) ? (hi - lo) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = lo + step * static_cast<double>(i);
        rows.push_back({z, ekdiff::mwright_eval(order, z, drop_below)});
    }
    emit_csv(out, rec, {"z", "M_nu"}, rows);
    finish(rec, manifest, out);
    return 0;
}

int cmd_green(double alpha, double beta, double t, double x_max, std::size_t n,
              const std::string& out, const std::string& svg, const std::string& manifest) {
    RunRecord rec;
    rec.command = "green";
    const ekdiff::DiffusionParams p(alpha, beta);
    rec.parameters = {{"alpha", alpha}, {"beta", beta}, {"t", t}, {"x_max", x_max}, {"n", n}};

    std::vector<double> xs, gs;
    if (x_max > 0.0) {
        if (n < 3) throw ekdiff::DomainError("need n >= 3");
        const double dx = 2.0 * x_max / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            xs.push_back(-x_max + dx * static_cast<double>(i));
            gs.push_back(ekdiff::ggbm_green(p, xs.back(), t));
        }
    } else {
        const ekdiff::GreenProfile prof = ekdiff::green_profile(p, t, n);
        xs = prof.x_nodes;
        gs = prof.values;
    }

    double mass = 0.0, second = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double h = xs[i] - xs[i - 1];
        mass += 0.5 * h * (gs[i] + gs[i - 1]);
        second += 0.5 * h * (xs[i] * xs[i] * gs[i] + xs[i - 1] * xs[i - 1] * gs[i - 1]);
    }
    if (!(mass >= 0.999 && mass <= 1.001))
        throw ekdiff::NonConvergenceError("emitted profile mass " + ekdiff::format_double(mass) +
                                          " outside [0.999, 1.001]; widen --x-max");

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({xs[i], gs[i]});
    const std::vector<std::string> footer = {
        "mass " + ekdiff::format_double(mass),
        "variance " + ekdiff::format_double(second / mass),
        "analytic_variance " + ekdiff::format_double(ekdiff::green_variance(p, t)),
    };
    emit_csv(out, rec, {"x", "G"}, rows, {}, footer);
    if (!svg.empty()) {
        ekdiff::SvgSeries s;
        s.x = xs;
        s.y = gs;
        s.label = "G(x, t)";
        emit_svg(svg, rec, {s}, "one-point density", "x", "G");
    }
    finish(rec, manifest, out);
    return 0;
}

int cmd_solve(double alpha, double beta, double x_min, double x_max, std::size_t nx, double t0,
              double t_end, std::size_t nt, std::size_t record_every,
              const std::string& out_prefix, const std::string& svg,
              const std::string& manifest) {
    RunRecord rec;
    rec.command = "solve";
    ekdiff::SolverConfig cfg(ekdiff::DiffusionParams(alpha, beta),
                             ekdiff::Grid1D(x_min, x_max, nx), t0, t_end, nt);
    cfg.record_every = (record_every == 0) ? nt : record_every;
    rec.parameters = {{"alpha", alpha}, {"beta", beta},   {"x_min", x_min},
                      {"x_max", x_max}, {"nx", nx},       {"t0", t0},
                      {"t_end", t_end}, {"nt", nt},       {"record_every", cfg.record_every}};

    const ekdiff::SolutionField field = ekdiff::solve(cfg);

    for (std::size_t r = 0; r < field.record_steps.size(); ++r) {
        char tag[32];
        std::snprintf(tag, sizeof(tag), "_level%04zu.csv", field.record_steps[r]);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < nx; ++i)
            rows.push_back({cfg.grid.node(i), field.values[r][i]});
        emit_csv(out_prefix + tag, rec, {"x", "P"}, rows,
                 {"t " + ekdiff::format_double(field.times[r])});
    }
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t s = 0; s < field.step_times.size(); ++s)
            rows.push_back({field.step_times[s], field.mass[s], field.variance[s]});
        emit_csv(out_prefix + "_diag.csv", rec, {"t", "mass", "variance"}, rows);
    }
    if (!svg.empty()) {
        std::vector<ekdiff::SvgSeries> series;
        const char* palette[] = {"#1f6fb2", "#b2561f", "#3d8f3d", "#7a3db2", "#b21f6f"};
        for (std::size_t r = 0; r < field.values.size(); ++r) {
            ekdiff::SvgSeries s;
            for (std::size_t i = 0; i < nx; ++i) {
                s.x.push_back(cfg.grid.node(i));
                s.y.push_back(field.values[r][i]);
            }
            s.color = palette[r % 5];
            s.label = "t = " + ekdiff::format_double(field.times[r]);
            series.push_back(std::move(s));
        }
        emit_svg(svg, rec, series, "solver profiles", "x", "P");
    }
    finish(rec, manifest.empty() ? out_prefix + "_manifest.json" : manifest, "");
    return 0;
}

int cmd_simulate(double alpha, double beta, std::size_t n_paths, std::uint64_t seed,
                 double t_end, std::size_t n_steps, const std::string& out_paths,
                 const std::string& out_stats, const std::string& svg,
                 const std::string& manifest) {
    RunRecord rec;
    rec.command = "simulate";
    rec.seed = seed;
    if (n_steps < 2) throw ekdiff::DomainError("need --n-steps >= 2");
    if (!(t_end > 0.0)) throw ekdiff::DomainError("need --t-end > 0");
    std::vector<double> nodes(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k)
        nodes[k] = t_end * static_cast<double>(k + 1) / static_cast<double>(n_steps);
    ekdiff::EnsembleConfig cfg(ekdiff::DiffusionParams(alpha, beta), nodes, n_paths, seed);
    rec.parameters = {{"alpha", alpha},   {"beta", beta},     {"paths", n_paths},
                      {"t_end", t_end},   {"n_steps", n_steps}};

    const ekdiff::PathEnsemble ens = ekdiff::ggbm_paths(cfg);
    const ekdiff::EnsembleStats stats = ekdiff::ensemble_stats(ens);

    {
        std::ostringstream times;
        times << "time nodes:";
        for (double t : nodes) times << ' ' << ekdiff::format_double(t);
        std::vector<std::string> header = {"path", "tau"};
        for (std::size_t k = 0; k < n_steps; ++k) header.push_back("x" + std::to_string(k + 1));
        std::vector<std::vector<double>> rows;
        rows.reserve(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            std::vector<double> row = {static_cast<double>(i), ens.tau[i]};
            row.insert(row.end(), ens.paths[i].begin(), ens.paths[i].end());
            rows.push_back(std::move(row));
        }
        emit_csv(out_paths, rec, header, rows,
                 {times.str(), "stream rule: " + ens.stream_rule});
    }
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < n_steps; ++k)
            rows.push_back({nodes[k], stats.variance_curve[k], stats.loglog_slope});
        emit_csv(out_stats, rec, {"t", "variance", "slope"}, rows,
                 {"cholesky jitter: " + ekdiff::format_double(ens.cholesky_jitter)});
    }
    if (!svg.empty()) {
        ekdiff::SvgSeries emp, ref;
        emp.label = "sample variance";
        ref.label = "2 t^alpha / Gamma(beta+1)";
        ref.color = "#b2561f";
        for (std::size_t k = 0; k < n_steps; ++k) {
            emp.x.push_back(nodes[k]);
            emp.y.push_back(stats.variance_curve[k]);
            ref.x.push_back(nodes[k]);
            ref.y.push_back(ekdiff::green_variance(cfg.params, nodes[k]));
        }
        emit_svg(svg, rec, {emp, ref}, "ensemble variance", "t", "variance");
    }
    finish(rec, manifest, out_paths);
    return 0;
}

int cmd_ek(double gamma, double mu, double eta, const std::string& op, double power,
           const std::string& range, std::size_t n, const std::string& out,
           const std::string& manifest) {
    RunRecord rec;
    rec.command = "ek";
    const ekdiff::EKParams p(gamma, mu, eta);
    double lo = 0.0, hi = 0.0;
    parse_range(range, lo, hi);
    if (!(lo > 0.0)) throw ekdiff::DomainError("evaluation times must be positive");
    if (n < 1) throw ekdiff::DomainError("need n >= 1");
    if (n == 1 && lo != hi) throw ekdiff::DomainError("n = 1 needs a degenerate range lo:lo");
    if (op != "integral" && op != "derivative")
        throw ekdiff::DomainError("--op must be integral or derivative");
    rec.parameters = {{"gamma", gamma}, {"mu", mu},       {"eta", eta}, {"op", op},
                      {"power", power}, {"range", range}, {"n", n}};

    const ekdiff::SampledFunction f = ekdiff::SampledFunction::from_callable(
        [power](double t) { return std::pow(t, power); });

    std::vector<std::vector<double>> rows;
    const double step = (n > 1) ? (hi - lo) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = lo + step * static_cast<double>(i);
        const double v = (op == "integral") ? ekdiff::ek_integral(p, f, t)
                                            : ekdiff::ek_derivative(p, f, t);
        rows.push_back({t, v});
    }
    std::vector<std::string> footer;
    // closed-form eigenvalue on powers, for auditing the computed column
    const double base = gamma + 1.0 + power / eta;
    if (base > 0.0 && mu > 0.0) {
        const double K = ekdiff::ek_power_oracle(p, power);
        footer.push_back("power_eigenvalue " +
                         ekdiff::format_double(op == "integral" ? K : 1.0 / K));
    }
    emit_csv(out, rec, {"t", "value"}, rows, {}, footer);
    finish(rec, manifest, out);
    return 0;
}

int cmd_verify(const std::string& level) {
    if (level != "quick" && level != "full")
        throw ekdiff::DomainError("--level must be quick or full");
    const auto results = ekdiff::run_verification(level == "full");
    for (const auto& r : results) {
        std::printf("%s  %-28s %s  (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str(), r.seconds);
    }
    if (!ekdiff::all_passed(results)) {
        std::printf("verification FAILED\n");
        return 1;
    }
    std::printf("verification passed (%zu checks)\n", results.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Erdelyi-Kober fractional diffusion toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // mwright
    double mw_nu = 0.5;
    std::string mw_range = "0:5";
    std::size_t mw_n = 501;
    double mw_drop = 0.0;
    std::string mw_out, mw_manifest;
    auto* mw = app.add_subcommand("mwright", "tabulate the density M_nu on a z grid");
    mw->add_option("--nu", mw_nu, "order in (0, 1)")->required();
    mw->add_option("--range", mw_range, "z range lo:hi (default 0:5)");
    mw->add_option("--n", mw_n, "number of rows (default 501)");
    mw->add_option("--drop-below", mw_drop, "certified threshold under which 0 is returned");
    mw->add_option("--out", mw_out, "output CSV (default: stdout)");
    mw->add_option("--manifest", mw_manifest, "manifest path (default: <out>.manifest.json)");

    // green
    double g_alpha = 1.0, g_beta = 1.0, g_t = 1.0, g_xmax = 0.0;
    std::size_t g_n = 801;
    std::string g_out, g_svg, g_manifest;
    auto* gr = app.add_subcommand("green", "tabulate the one-point density at fixed t");
    gr->add_option("--alpha", g_alpha, "variance exponent in (0, 2]")->required();
    gr->add_option("--beta", g_beta, "mixing order in (0, 1]")->required();
    gr->add_option("--t", g_t, "time")->required();
    gr->add_option("--x-max", g_xmax, "half-extent (default: automatic from the tail)");
    gr->add_option("--n", g_n, "number of nodes (default 801)");
    gr->add_option("--out", g_out, "output CSV (default: stdout)");
    gr->add_option("--svg", g_svg, "also write an SVG plot");
    gr->add_option("--manifest", g_manifest, "manifest path");

    // solve
    double s_alpha = 1.0, s_beta = 1.0, s_xmin = -10.0, s_xmax = 10.0, s_t0 = 0.0,
           s_tend = 1.0;
    std::size_t s_nx = 401, s_nt = 0, s_every = 0;
    std::string s_prefix, s_svg, s_manifest;
    auto* so = app.add_subcommand("solve", "integrate the diffusion equation forward");
    so->add_option("--alpha", s_alpha, "variance exponent in (0, 2]")->required();
    so->add_option("--beta", s_beta, "memory order in (0, 1]")->required();
    so->add_option("--x-min", s_xmin, "left edge (default -10)");
    so->add_option("--x-max", s_xmax, "right edge (default 10)");
    so->add_option("--nx", s_nx, "spatial nodes (default 401)");
    so->add_option("--t0", s_t0, "start time > 0 (point source released at 0)")->required();
    so->add_option("--t-end", s_tend, "final time (default 1)");
    so->add_option("--nt", s_nt, "time steps")->required();
    so->add_option("--record-every", s_every,
                   "profile recording stride (default: first and final level only)");
    so->add_option("--out-prefix", s_prefix, "output prefix for level and diagnostic CSVs")
        ->required();
    so->add_option("--svg", s_svg, "also write an SVG plot of the recorded profiles");
    so->add_option("--manifest", s_manifest, "manifest path (default: <prefix>_manifest.json)");

    // simulate
    double si_alpha = 1.0, si_beta = 1.0, si_tend = 1.0;
    std::size_t si_paths = 0, si_steps = 20;
    std::uint64_t si_seed = 1;
    std::string si_paths_out, si_stats_out, si_svg, si_manifest;
    auto* si = app.add_subcommand("simulate", "draw ensemble paths of the process");
    si->add_option("--alpha", si_alpha, "variance exponent in (0, 2]")->required();
    si->add_option("--beta", si_beta, "amplitude mixing order in (0, 1]")->required();
    si->add_option("--paths", si_paths, "number of paths")->required();
    si->add_option("--seed", si_seed, "RNG seed (default 1)");
    si->add_option("--t-end", si_tend, "final time (default 1)");
    si->add_option("--n-steps", si_steps, "number of observation times (default 20)");
    si->add_option("--out-paths", si_paths_out, "paths CSV, one row per path")->required();
    si->add_option("--out-stats", si_stats_out, "variance and slope CSV")->required();
    si->add_option("--svg", si_svg, "also write an SVG variance plot");
    si->add_option("--manifest", si_manifest, "manifest path");

    // ek
    double e_gamma = 0.0, e_mu = 0.5, e_eta = 1.0, e_power = 1.0;
    std::string e_op = "integral", e_range = "1:1", e_out, e_manifest;
    std::size_t e_n = 1;
    auto* ek = app.add_subcommand("ek", "apply the fractional operators to a power law");
    ek->add_option("--gamma", e_gamma, "weight exponent > -1")->required();
    ek->add_option("--mu", e_mu, "fractional order")->required();
    ek->add_option("--eta", e_eta, "stretch exponent > 0")->required();
    ek->add_option("--op", e_op, "integral or derivative (default integral)");
    ek->add_option("--power", e_power, "apply to tau^power (default 1)");
    ek->add_option("--range", e_range, "evaluation times lo:hi (default 1:1)");
    ek->add_option("--n", e_n, "number of evaluation times (default 1)");
    ek->add_option("--out", e_out, "output CSV (default: stdout)");
    ek->add_option("--manifest", e_manifest, "manifest path");

    // verify
    std::string v_level = "quick";
    auto* ve = app.add_subcommand("verify", "run the named analytic checks");
    ve->add_option("--level", v_level, "quick or full (default quick)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (mw->parsed())
            return cmd_mwright(mw_nu, mw_range, mw_n, mw_drop, mw_out, mw_manifest);
        if (gr->parsed())
            return cmd_green(g_alpha, g_beta, g_t, g_xmax, g_n, g_out, g_svg, g_manifest);
        if (so->parsed())
            return cmd_solve(s_alpha, s_beta, s_xmin, s_xmax, s_nx, s_t0, s_tend, s_nt,
                             s_every, s_prefix, s_svg, s_manifest);
        if (si->parsed())
            return cmd_simulate(si_alpha, si_beta, si_paths, si_seed, si_tend, si_steps,
                                si_paths_out, si_stats_out, si_svg, si_manifest);
        if (ek->parsed())
            return cmd_ek(e_gamma, e_mu, e_eta, e_op, e_power, e_range, e_n, e_out,
                          e_manifest);
        if (ve->parsed()) return cmd_verify(v_level);
    } catch (const ekdiff::DomainError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const ekdiff::DiracOrderError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const ekdiff::ParamMismatchError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const ekdiff::TableError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const ekdiff::UnsupportedError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const ekdiff::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
