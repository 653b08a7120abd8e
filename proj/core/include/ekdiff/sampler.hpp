#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ekdiff/greenfn.hpp"
#include "ekdiff/mwright.hpp"

namespace ekdiff {

enum class FbmMethod { cholesky };

// One Monte Carlo run: n_paths paths observed on a fixed ascending time grid.
// The memory cap bounds n_paths * len(time_nodes) (two such arrays live at
// once during generation).
struct EnsembleConfig {
    DiffusionParams params;
    std::vector<double> time_nodes;
    std::size_t n_paths;
    std::uint64_t seed;
    FbmMethod fbm_method = FbmMethod::cholesky;
    std::size_t memory_cap_values = 100'000'000;

    EnsembleConfig(DiffusionParams params_, std::vector<double> time_nodes_,
                   std::size_t n_paths_, std::uint64_t seed_);
};

// Output ensemble.  Bit-for-bit reproducible from (config, seed): every path
// owns an RNG stream derived from (seed, path index) and the amplitude draws
// come from a separate salted stream, so results do not depend on thread
// count or execution order.
struct PathEnsemble {
    EnsembleConfig config;
    std::vector<double> tau;                 // amplitude draw per path; 1.0 when beta = 1
    std::vector<std::vector<double>> paths;  // n_paths rows
    std::uint64_t seed = 0;
    std::string stream_rule;       // how per-path stream ids derive from the seed
    double cholesky_jitter = 0.0;  // diagonal repair applied, 0 if none
};

// n draws of the random amplitude with density M_beta, by inverse-CDF
// interpolation on a tabulated CDF; beta = 1 returns all ones.  A caller-built
// table is used as-is after an order check; otherwise a table for beta is
// built (and cached process-wide).
std::vector<double> sample_tau(double beta, std::size_t n, std::uint64_t seed,
                               const MWrightTable* table = nullptr);

// Zero-mean Gaussian paths with Cov[X(s), X(t)] = s^2H + t^2H - |t-s|^2H,
// so Var[X(t)] = 2 t^2H exactly.  Cholesky of the covariance over the nodes
// with t > 0; a node at t = 0 pins the path value to 0.  On factorization
// failure a diagonal jitter of 1e-12 * max diagonal is added once (reported
// through jitter_out); if the matrix is still not definite,
// NotPositiveDefiniteError.
std::vector<std::vector<double>> fbm_paths(double hurst, const std::vector<double>& time_nodes,
                                           std::size_t n, std::uint64_t seed,
                                           double* jitter_out = nullptr);

// Mixture ensemble: path_i = sqrt(tau_i) * Z_i with Z_i an fbm_paths draw.
// For beta = 1 the multiplier is exactly 1, so the ensemble equals the fBm
// ensemble bit for bit.
PathEnsemble ggbm_paths(const EnsembleConfig& config);

struct EnsembleStats {
    std::vector<double> variance_curve;  // per time node, sample variance about 0
    double loglog_slope = 0.0;           // fit of log variance vs log t over t > 0 nodes
};

// Needs n_paths >= 100 (slope fit) and at least two nodes with t > 0.
EnsembleStats ensemble_stats(const PathEnsemble& ens);

struct Histogram {
    std::vector<double> edges;    // n_bins + 1
    std::vector<double> density;  // normalized to unit mass
};

Histogram marginal_hist(const PathEnsemble& ens, std::size_t node_index, std::size_t n_bins);

}  // namespace ekdiff
