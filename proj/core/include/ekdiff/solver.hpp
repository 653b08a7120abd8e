#pragma once

#include <cstddef>
#include <vector>

#include "ekdiff/greenfn.hpp"

namespace ekdiff {

// Uniform spatial grid on [x_min, x_max] with nx >= 3 nodes.
struct Grid1D {
    double x_min;
    double x_max;
    std::size_t nx;
    Grid1D(double x_min_, double x_max_, std::size_t nx_);
    double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    double node(std::size_t i) const { return x_min + dx() * static_cast<double>(i); }
};

enum class InitialCondition {
    analytic_green_at_t0,  // start from the exact profile of a point source at t0
    custom_P0,             // caller-supplied values on the grid, memory starts at t0
};

enum class BoundaryKind { dirichlet_zero };

// Time stepping runs on the stretched variable S = t^(alpha/beta), uniform in
// S from t0^(alpha/beta) to t_end^(alpha/beta) in nt steps.  record_every
// selects which levels keep a full profile copy in the public output; level 0
// and the final level are always kept.
struct SolverConfig {
    DiffusionParams params;
    Grid1D grid;
    double t0;
    double t_end;
    std::size_t nt;
    InitialCondition ic_mode = InitialCondition::analytic_green_at_t0;
    BoundaryKind bc = BoundaryKind::dirichlet_zero;
    std::size_t record_every = 1;
    std::vector<double> custom_p0;  // used only when ic_mode == custom_P0

    SolverConfig(DiffusionParams params_, Grid1D grid_, double t0_, double t_end_,
                 std::size_t nt_);
};

// Full output of one run.  times/values/record_steps hold the recorded subset;
// step_times, mass, variance, and the P / Laplacian histories cover every
// computed level (the histories feed ek_residual).
struct SolutionField {
    SolverConfig config;
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    std::vector<std::size_t> record_steps;
    std::vector<double> mass;      // per level, trapezoid
    std::vector<double> variance;  // per level, trapezoid second moment / mass
    std::vector<double> step_times;
    std::vector<std::vector<double>> history;            // P at every level
    std::vector<std::vector<double>> laplacian_history;  // centered second difference
};

// Product-integration scheme for the Volterra form
//   P(x,t) = P0(x) + (1/Gamma(beta)) integral_0^S (S - u)^(beta-1) Lap P du,
// S = t^(alpha/beta).  The Abel kernel is integrated exactly against
// cell-averaged Laplacians (L_k + L_{k+1})/2; the newest level enters
// implicitly through one tridiagonal solve per step (Crank-Nicolson in S when
// beta = 1).  For beta < 1 with the analytic start, the memory the equation
// carries over [0, t0] is supplied by quadrature against Laplacians of the
// analytic profile on graded dyadic cells; with a custom start that history
// does not exist and the memory integral begins at t0 instead.
//
// Throws ResolutionError when the analytic start is under-resolved
// (sqrt(green_variance(t0)) < 2 dx, i.e. +-2 sigma of the peak spans fewer
// than 8 cells), SingularityError if a kernel weight is nonfinite,
// LinAlgError if the tridiagonal solve breaks down.
SolutionField solve(const SolverConfig& config);

enum class ReducedKind { time_fractional, stretched_gaussian, brownian };

// Same engine with the parameters pinned to one of the degenerate family
// members; ParamMismatchError when config disagrees with kind.
SolutionField solve_reduced(ReducedKind kind, const SolverConfig& config);

// Max-norm defect of the differential form
//   dP/dt = (alpha/beta) t^(alpha-1) D^{beta-1, 1-beta}_{alpha/beta} [Lap P]
// at one stored level, with dP/dt by second-order differences in S and the
// fractional derivative applied to the stored Laplacian history (continued
// below t0 by the analytic profile for the analytic start, by zero for a
// custom start, whose equation restarts its memory at t0).  First-order
// accurate in the step, so the value is O(dS).  Interior nodes only; for
// beta < 1 the nodes |x| <= dx
// are excluded, where the pdf kink at the origin makes the pointwise
// Laplacian non-classical.  Needs level >= 2 for the time difference.
double ek_residual(const SolutionField& field, std::size_t level);

}  // namespace ekdiff
