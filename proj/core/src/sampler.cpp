#include "ekdiff/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "ekdiff/errors.hpp"
#include "ekdiff/special.hpp"

namespace ekdiff {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kTauSalt = 0x7ad870c830358979ULL;

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t idx) {
    return splitmix64(seed + (idx + 1) * kGolden);
}

// Hand-rolled Box-Muller over mt19937_64 so draws are a fixed function of the
// stream seed, independent of standard-library distribution internals.
struct NormalGen {
    std::mt19937_64 mt;
    explicit NormalGen(std::uint64_t s) : mt(s) {}
    double uniform_open() { return static_cast<double>((mt() >> 11) + 1) * 0x1.0p-53; }
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
};

void check_time_nodes(const std::vector<double>& t) {
    if (t.empty()) throw DomainError("sampler: time grid is empty");
    if (!(t.front() >= 0.0)) throw DomainError("sampler: time grid must start at t >= 0");
    for (std::size_t j = 1; j < t.size(); ++j)
        if (!(t[j] > t[j - 1]))
            throw DomainError("sampler: time grid must be strictly increasing");
    if (std::isinf(t.back())) throw DomainError("sampler: time grid must be finite");
}

const MWrightTable& cached_table(double beta) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<const MWrightTable>> tables;
    std::lock_guard<std::mutex> lock(mu);
    auto it = tables.find(beta);
    if (it == tables.end()) {
        auto tab = std::make_shared<MWrightTable>(mwright_build_table(WrightOrder(beta)));
        it = tables.emplace(beta, std::move(tab)).first;
    }
    return *it->second;
}

void run_over_paths(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t threads = std::min<std::size_t>(std::max<std::size_t>(thread_budget(), 1),
                                                      std::max<std::size_t>(n / 64, 1));
    if (threads <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t b = 0; b < threads; ++b) {
        const std::size_t lo = b * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

EnsembleConfig::EnsembleConfig(DiffusionParams params_, std::vector<double> time_nodes_,
                               std::size_t n_paths_, std::uint64_t seed_)
    : params(params_), time_nodes(std::move(time_nodes_)), n_paths(n_paths_), seed(seed_) {
    check_time_nodes(time_nodes);
    if (n_paths < 1) throw DomainError("EnsembleConfig: need at least one path");
    if (n_paths > memory_cap_values / time_nodes.size())
        throw DomainError("EnsembleConfig: n_paths * time nodes exceeds the memory cap");
}

std::vector<double> sample_tau(double beta, std::size_t n, std::uint64_t seed,
                               const MWrightTable* table) {
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw DomainError("sample_tau: beta must lie in (0, 1]");
    if (beta == 1.0) return std::vector<double>(n, 1.0);  // point mass at 1

    if (table != nullptr) {
        if (table->nodes.size() < 2 || table->cdf_values.size() != table->nodes.size())
            throw TableError("sample_tau: supplied table is not built");
        if (std::abs(table->nu - beta) > 1e-12)
            throw TableError("sample_tau: supplied table was built for a different order");
    }
    const MWrightTable& tab = table ? *table : cached_table(beta);

    std::vector<double> draws(n);
    std::mt19937_64 mt(splitmix64(seed));
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(mt() >> 11) * 0x1.0p-53;  // [0, 1)
        draws[i] = tab.inverse_cdf(u);
    }
    return draws;
}

std::vector<std::vector<double>> fbm_paths(double hurst, const std::vector<double>& time_nodes,
                                           std::size_t n, std::uint64_t seed,
                                           double* jitter_out) {
    if (!(hurst > 0.0) || !(hurst <= 1.0))
        throw DomainError("fbm_paths: hurst must lie in (0, 1]");
    check_time_nodes(time_nodes);
    if (n < 1) throw DomainError("fbm_paths: need at least one path");
    if (jitter_out) *jitter_out = 0.0;

    const std::size_t m = time_nodes.size();
    const std::size_t j0 = (time_nodes.front() == 0.0) ? 1 : 0;  // t = 0 pins the value
    const std::size_t mp = m - j0;
    std::vector<std::vector<double>> paths(n, std::vector<double>(m, 0.0));
    if (mp == 0) return paths;

    const double h2 = 2.0 * hurst;
    Eigen::MatrixXd cov(mp, mp);
    for (std::size_t r = 0; r < mp; ++r) {
        const double s = time_nodes[j0 + r];
        for (std::size_t c = 0; c <= r; ++c) {
            const double t = time_nodes[j0 + c];
            const double v = std::pow(s, h2) + std::pow(t, h2) - std::pow(s - t, h2);
            cov(r, c) = v;
            cov(c, r) = v;
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-12 * cov.diagonal().maxCoeff();
        cov.diagonal().array() += jitter;
        llt.compute(cov);
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefiniteError(
                "fbm_paths: covariance not positive definite even after jitter");
        if (jitter_out) *jitter_out = jitter;
    }
    const Eigen::MatrixXd L = llt.matrixL();

    run_over_paths(n, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> z(mp);
        for (std::size_t i = lo; i < hi; ++i) {
            NormalGen gen(stream_seed(seed, i));
            for (std::size_t r = 0; r < mp; ++r) z[r] = gen.normal();
            for (std::size_t r = 0; r < mp; ++r) {
                double acc = 0.0;
                for (std::size_t c = 0; c <= r; ++c) acc += L(r, c) * z[c];
                paths[i][j0 + r] = acc;
            }
        }
    });
    return paths;
}

PathEnsemble ggbm_paths(const EnsembleConfig& config) {
    if (config.n_paths > config.memory_cap_values / config.time_nodes.size())
        throw DomainError("ggbm_paths: ensemble exceeds the memory cap");

    PathEnsemble ens{config, {}, {}, config.seed, {}, 0.0};
    ens.stream_rule =
        "path i: mt19937_64(splitmix64(seed + (i+1)*golden)); "
        "tau: mt19937_64(splitmix64(seed xor tau_salt))";
    ens.tau = sample_tau(config.params.beta, config.n_paths, config.seed ^ kTauSalt);
    ens.paths = fbm_paths(config.params.hurst(), config.time_nodes, config.n_paths,
                          config.seed, &ens.cholesky_jitter);
    // beta = 1 gives tau = 1 exactly, so the ensemble stays bitwise the fBm one
    for (std::size_t i = 0; i < config.n_paths; ++i) {
        const double amp = std::sqrt(ens.tau[i]);
        if (amp != 1.0)
            for (double& v : ens.paths[i]) v *= amp;
    }
    return ens;
}

EnsembleStats ensemble_stats(const PathEnsemble& ens) {
    const std::size_t n = ens.paths.size();
    if (n < 100) throw InsufficientPathsError("ensemble_stats: need at least 100 paths");
    const std::size_t m = ens.config.time_nodes.size();

    EnsembleStats st;
    st.variance_curve.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += ens.paths[i][j] * ens.paths[i][j];
        st.variance_curve[j] = acc / static_cast<double>(n);  // the process is zero-mean
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (!(ens.config.time_nodes[j] > 0.0) || !(st.variance_curve[j] > 0.0)) continue;
        const double lx = std::log(ens.config.time_nodes[j]);
        const double ly = std::log(st.variance_curve[j]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    if (cnt < 2) throw DomainError("ensemble_stats: need two positive-time nodes for the slope");
    const double denom = static_cast<double>(cnt) * sxx - sx * sx;
    st.loglog_slope = (static_cast<double>(cnt) * sxy - sx * sy) / denom;
    return st;
}

Histogram marginal_hist(const PathEnsemble& ens, std::size_t node_index, std::size_t n_bins) {
    if (node_index >= ens.config.time_nodes.size())
        throw DomainError("marginal_hist: node index out of range");
    if (n_bins < 1) throw DomainError("marginal_hist: need at least one bin");
    const std::size_t n = ens.paths.size();

    double lo = ens.paths[0][node_index], hi = lo;
    for (std::size_t i = 0; i < n; ++i) {
        lo = std::min(lo, ens.paths[i][node_index]);
        hi = std::max(hi, ens.paths[i][node_index]);
    }
    if (!(hi > lo)) hi = lo + 1.0;  // degenerate marginal, one wide bin
    const double pad = 1e-9 * (hi - lo);
    lo -= pad;
    hi += pad;

    Histogram h;
    h.edges.resize(n_bins + 1);
    h.density.assign(n_bins, 0.0);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t b = 0; b <= n_bins; ++b)
        h.edges[b] = lo + width * static_cast<double>(b);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = ens.paths[i][node_index];
        auto b = static_cast<std::size_t>((v - lo) / width);
        h.density[std::min(b, n_bins - 1)] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(n) * width);
    for (double& d : h.density) d *= norm;
    return h;
}

}  // namespace ekdiff
