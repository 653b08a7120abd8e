#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace ekdiff {

// Parameter triple of one fractional operator: power weight offset gamma,
// fractional order mu, stretching exponent eta.  gamma > -1 keeps the origin
// weight integrable for bounded functions; mu >= 0 (the integral operator
// additionally requires mu > 0 at the call site); eta > 0.
struct EKParams {
    double gamma;
    double mu;
    double eta;
    EKParams(double gamma_, double mu_, double eta_);
};

// A deterministic function of one positive variable, the common currency of
// the operators and the solver.  Either wraps a callable directly or
// interpolates a uniform tabulation linearly.  The domain hint bounds where
// the function is meaningful; consumers integrate only inside it.
struct SampledFunction {
    std::function<double(double)> evaluator;
    double domain_lo = 0.0;
    double domain_hi = std::numeric_limits<double>::infinity();
    bool smooth = true;

    std::vector<double> grid_values;  // non-empty => tabulated mode
    double grid_t0 = 0.0;
    double grid_dt = 0.0;

    static SampledFunction from_callable(std::function<double(double)> f,
                                         double lo = 0.0,
                                         double hi = std::numeric_limits<double>::infinity(),
                                         bool smooth = true);
    static SampledFunction from_uniform_grid(double t_start, double dt,
                                             std::vector<double> values);

    double operator()(double t) const;
};

// Accuracy budget for the operator quadratures.  The node ladder doubles the
// Gauss-Jacobi rule until successive results agree to the tolerance; a graded
// dyadic composite serves as fallback for integrands with algebraic origin
// behavior the single rule cannot resolve.
struct QuadControl {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    std::size_t max_nodes = 256;
};

// Fractional integral
//   I f(t) = (eta / Gamma(mu)) t^(-eta(mu+gamma))
//            * integral_0^t tau^(eta(gamma+1)-1) (t^eta - tau^eta)^(mu-1) f(tau) dtau.
// Computed after the substitution u = tau^eta, which turns the kernel into the
// Abel form (T-u)^(mu-1) u^gamma handled by Gauss-Jacobi weights.
double ek_integral(const EKParams& p, const SampledFunction& f, double t,
                   const QuadControl& ctl = {});

// Closed-form eigenvalue on power laws: I[tau^c](t) = K t^c with
//   K = Gamma(gamma + 1 + c/eta) / Gamma(gamma + mu + 1 + c/eta).
// Requires gamma + 1 + c/eta > 0 (convergence at the origin).
double ek_power_oracle(const EKParams& p, double c);

// Riemann-Liouville integral (1/Gamma(mu)) integral_0^t (t-tau)^(mu-1) f dtau;
// satisfies t^(-mu) * rl_integral(mu, f, t) = ek_integral({0, mu, 1}, f, t).
// Deliberately computed by double-exponential quadrature, not by the
// Gauss-Jacobi machinery above, so the identity test between the two routes
// compares genuinely independent algorithms.
double rl_integral(double mu, const SampledFunction& f, double t,
                   const QuadControl& ctl = {});

// First-order fractional derivative (0 <= mu <= 1):
//   D f(t) = (gamma + 1 + (1/eta) t d/dt) I_{gamma+mu, 1-mu, eta} f(t),
// the outer d/dt taken by 4th-order central differences with adaptive step.
// mu = 0 returns f(t) unchanged (identity reduction, no quadrature path);
// mu > 1 is rejected: the multi-factor product form is not implemented.
double ek_derivative(const EKParams& p, const SampledFunction& f, double t,
                     const QuadControl& ctl = {});

}  // namespace ekdiff
