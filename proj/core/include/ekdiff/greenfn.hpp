#pragma once

#include <cstddef>
#include <vector>

#include "ekdiff/ekops.hpp"

namespace ekdiff {

// One member of the two-parameter diffusion family: alpha in (0, 2] sets the
// variance growth t^alpha (slow for alpha < 1, fast for alpha > 1), beta in
// (0, 1] sets the amplitude mixing.  alpha = beta = 1 is Brownian motion.
struct DiffusionParams {
    double alpha;
    double beta;
    DiffusionParams(double alpha_, double beta_);
    double hurst() const { return 0.5 * alpha; }
    bool slow() const { return alpha < 1.0; }
    bool fast() const { return alpha > 1.0; }
};

// Fundamental solution of the heat equation with unit diffusivity in the
// convention where the variance is 2t:  (4 pi t)^(-1/2) exp(-x^2 / (4t)).
double gaussian_green(double x, double t);

// One-point pdf of the general family:
//   G(x, t) = (1/2) t^(-alpha/2) M_{beta/2}(|x| t^(-alpha/2)).
// Even in x; reduces to gaussian_green at alpha = beta = 1.
double ggbm_green(const DiffusionParams& p, double x, double t);

// Closed forms the family degenerates to.  Kept as separate code paths so the
// reductions can be tested as genuine identities rather than tautologies.
double time_fractional_green(double beta, double x, double t);     // alpha = beta < 1
double stretched_gaussian_green(double alpha, double x, double t); // beta = 1

// Exact second moment 2 t^alpha / Gamma(beta + 1).
double green_variance(const DiffusionParams& p, double t);

// Same pdf through the scale-mixture representation
//   G(x,t) = integral_0^inf (4 pi tau t^alpha)^(-1/2)
//            exp(-x^2/(4 tau t^alpha)) M_beta(tau) dtau,
// evaluated by adaptive quadrature after the substitution tau = s^2 (which
// removes the 1/sqrt(tau) endpoint factor).  beta = 1 short-circuits to the
// collapsed integrand at tau = 1 (stretched Gaussian).
double green_mixture(const DiffusionParams& p, double x, double t);

// Density of the operational time t_star at clock time t:
//   t^(-alpha) M_beta(t_star t^(-alpha)),  normalized over t_star >= 0.
// beta = 1 is a point mass at t_star = t^alpha and is refused pointwise.
double directing_pdf(const DiffusionParams& p, double t_star, double t);

// Spatial convolution with initial data: integral G(x - z, t) P0(z) dz.
// P0 must carry a finite support hint; the integral is split at the kernel's
// |x - z| corner.
double general_solution(const DiffusionParams& p, const SampledFunction& P0, double x,
                        double t);

// Tabulated symmetric profile of ggbm_green at fixed t.  The extent grows
// until the pdf falls below 1e-12 of its peak, so trapezoidal mass and
// moments are truncation-safe.
struct GreenProfile {
    DiffusionParams params;
    double t;
    std::vector<double> x_nodes;
    std::vector<double> values;

    double mass() const;      // trapezoid over the grid
    double variance() const;  // trapezoid second moment
};

GreenProfile green_profile(const DiffusionParams& p, double t, std::size_t nx = 801);

}  // namespace ekdiff
