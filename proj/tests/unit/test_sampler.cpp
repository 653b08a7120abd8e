#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "ekdiff/errors.hpp"
#include "ekdiff/sampler.hpp"

using namespace ekdiff;

namespace {
std::vector<double> ramp(double dt, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = dt * static_cast<double>(i + 1);
    return t;
}
}  // namespace

TEST_CASE("sampler: config validation") {
    const DiffusionParams p(1.0, 1.0);
    CHECK_THROWS_AS(EnsembleConfig(p, {}, 10, 1), DomainError);
    CHECK_THROWS_AS(EnsembleConfig(p, {0.5, 0.5, 1.0}, 10, 1), DomainError);
    CHECK_THROWS_AS(EnsembleConfig(p, {-0.1, 0.5}, 10, 1), DomainError);
    CHECK_THROWS_AS(EnsembleConfig(p, {0.0, 0.5}, 0, 1), DomainError);
    // memory cap: n_paths * nodes above the default 1e8
    CHECK_THROWS_AS(EnsembleConfig(p, ramp(0.25, 4), 30'000'000, 1), DomainError);
}

TEST_CASE("sampler: amplitude draws") {
    // beta = 1 is the degenerate point mass at 1
    const std::vector<double> ones = sample_tau(1.0, 5, 42);
    for (double v : ones) CHECK(v == 1.0);

    // reproducible from the seed
    const std::vector<double> a = sample_tau(0.5, 64, 1234);
    const std::vector<double> b = sample_tau(0.5, 64, 1234);
    CHECK(a == b);
    CHECK(sample_tau(0.5, 64, 1235) != a);

    // a caller table built for another order is rejected
    const MWrightTable wrong = mwright_build_table(WrightOrder(0.7));
    CHECK_THROWS_AS(sample_tau(0.5, 8, 1, &wrong), TableError);
}

TEST_CASE("sampler: amplitude sample matches its target distribution") {
    const std::size_t n = 5000;
    std::vector<double> draws = sample_tau(0.5, n, 20240817);
    // mean of M_{1/2} is 1/Gamma(1.5); SE = sqrt(var/n), var = 2/Gamma(2) - mean^2
    const double mean_want = 1.0 / std::tgamma(1.5);
    const double var = 2.0 - mean_want * mean_want;
    double mean = 0.0;
    for (double v : draws) mean += v;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean - mean_want) < 4.0 * std::sqrt(var / static_cast<double>(n)));

    // KS against the exact half-Gaussian CDF erf(z/2)
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = std::erf(0.5 * draws[i]);
        const double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
        ks = std::max(ks, std::max(std::abs(F - lo), std::abs(F - hi)));
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST_CASE("sampler: fBm covariance structure at the endpoints") {
    const std::size_t n = 4000;
    const auto paths = fbm_paths(0.5, ramp(0.25, 4), n, 7);
    REQUIRE(paths.size() == n);
    REQUIRE(paths[0].size() == 4);
    // Var X(1) = 2; increments over disjoint intervals are uncorrelated at H = 1/2
    double v = 0.0, cross = 0.0;
    for (const auto& p : paths) {
        v += p[3] * p[3];
        cross += (p[1] - p[0]) * (p[3] - p[2]);
    }
    v /= static_cast<double>(n);
    cross /= static_cast<double>(n);
    // SE of the variance estimate is var * sqrt(2/n)
    CHECK(std::abs(v - 2.0) < 4.0 * 2.0 * std::sqrt(2.0 / static_cast<double>(n)));
    CHECK(std::abs(cross) < 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampler: a node at t = 0 pins the paths to zero") {
    std::vector<double> nodes = {0.0, 0.5, 1.0};
    const auto paths = fbm_paths(0.4, nodes, 50, 3);
    for (const auto& p : paths) CHECK(p[0] == 0.0);
}

TEST_CASE("sampler: hurst validation") {
    CHECK_THROWS_AS(fbm_paths(0.0, ramp(0.5, 2), 10, 1), DomainError);
    CHECK_THROWS_AS(fbm_paths(1.5, ramp(0.5, 2), 10, 1), DomainError);
    CHECK_THROWS_AS(fbm_paths(0.5, {0.5, 0.25}, 10, 1), DomainError);
}

TEST_CASE("sampler: beta = 1 ensemble equals plain fBm bit for bit") {
    EnsembleConfig cfg(DiffusionParams(1.2, 1.0), ramp(0.2, 5), 40, 99);
    const PathEnsemble ens = ggbm_paths(cfg);
    const auto plain = fbm_paths(0.6, cfg.time_nodes, 40, 99);
    CHECK(ens.paths == plain);
    for (double v : ens.tau) CHECK(v == 1.0);
}

TEST_CASE("sampler: ensemble is independent of the thread budget") {
    EnsembleConfig cfg(DiffusionParams(0.8, 0.5), ramp(0.1, 10), 512, 2024);
    setenv("EKDIFF_THREADS", "1", 1);
    const PathEnsemble one = ggbm_paths(cfg);
    setenv("EKDIFF_THREADS", "4", 1);
    const PathEnsemble four = ggbm_paths(cfg);
    unsetenv("EKDIFF_THREADS");
    CHECK(one.paths == four.paths);
    CHECK(one.tau == four.tau);
    CHECK(one.stream_rule == four.stream_rule);
}

TEST_CASE("sampler: variance curve and slope recover the scaling law") {
    EnsembleConfig cfg(DiffusionParams(1.0, 1.0), ramp(0.1, 10), 2000, 11);
    const PathEnsemble ens = ggbm_paths(cfg);
    const EnsembleStats st = ensemble_stats(ens);
    REQUIRE(st.variance_curve.size() == 10);
    CHECK(std::abs(st.loglog_slope - 1.0) < 0.15);
    CHECK(std::abs(st.variance_curve.back() - 2.0) < 0.3);

    EnsembleConfig tiny(DiffusionParams(1.0, 1.0), ramp(0.1, 10), 50, 11);
    CHECK_THROWS_AS(ensemble_stats(ggbm_paths(tiny)), InsufficientPathsError);
}

TEST_CASE("sampler: mixture ensemble is leptokurtic for beta < 1") {
    EnsembleConfig cfg(DiffusionParams(0.8, 0.5), {1.0}, 8000, 5150);
    const PathEnsemble ens = ggbm_paths(cfg);
    double m2 = 0.0, m4 = 0.0;
    for (const auto& p : ens.paths) {
        m2 += p[0] * p[0];
        m4 += p[0] * p[0] * p[0] * p[0];
    }
    m2 /= 8000.0;
    m4 /= 8000.0;
    // Gaussian kurtosis is 3; the amplitude mixture pushes it well above
    CHECK(m4 / (m2 * m2) > 3.2);
}

TEST_CASE("sampler: histogram integrates to one") {
    EnsembleConfig cfg(DiffusionParams(1.0, 1.0), {0.5, 1.0}, 1000, 77);
    const PathEnsemble ens = ggbm_paths(cfg);
    const Histogram h = marginal_hist(ens, 1, 40);
    REQUIRE(h.edges.size() == 41);
    REQUIRE(h.density.size() == 40);
    double mass = 0.0;
    for (std::size_t i = 0; i < 40; ++i) mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}
