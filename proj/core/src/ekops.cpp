#include "ekdiff/ekops.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ekdiff/errors.hpp"
#include "ekdiff/quadrature.hpp"
#include "ekdiff/special.hpp"

namespace ekdiff {
namespace {

// Raw Abel-kernel integral over [0, T]:
//   integral_0^T (T-u)^(mu-1) u^gamma g(u) du.
// First a single Gauss-Jacobi (mu-1, gamma) rule under node doubling; both
// endpoint weights are then exact and the ladder converges fast whenever the
// residual factor g is smooth.  If g itself carries an algebraic origin
// factor (for instance g(u) = f(u^(1/eta)) with fractional 1/eta), the single
// rule stalls near order n^-2, so a graded dyadic composite takes over: a
// Jacobi-weighted top cell at u = T, plain Gauss-Legendre on dyadic cells
// shrinking toward 0, and a Jacobi-weighted closing cell at the origin.
template <class G>
double abel_integral(double gamma, double mu, double T, G&& g, const QuadControl& ctl,
                     bool smooth) {
    const double scale = std::pow(0.5 * T, gamma + mu);

    auto single_rule = [&](std::size_t n) {
        const QuadRule& r = gauss_jacobi(n, mu - 1.0, gamma);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += r.weights[i] * g(0.5 * T * (1.0 + r.nodes[i]));
        return scale * acc;
    };

    double prev = single_rule(smooth ? 16 : 32);
    for (std::size_t n = smooth ? 32 : 64; n <= std::min<std::size_t>(256, ctl.max_nodes);
         n *= 2) {
        const double cur = single_rule(n);
        if (std::abs(cur - prev) <= std::max(ctl.abs_tol, ctl.rel_tol * std::abs(cur)))
            return cur;
        prev = cur;
    }

    auto composite = [&](std::size_t n_mid, std::size_t n_top, std::size_t n_bot) {
        double acc = 0.0;
        // top cell [T/2, T]: kernel factor absorbed by the Jacobi weight
        {
            const QuadRule& r = gauss_jacobi(n_top, mu - 1.0, 0.0);
            const double h = 0.5 * T;
            double cell = 0.0;
            for (std::size_t i = 0; i < n_top; ++i) {
                const double u = h + 0.5 * h * (1.0 + r.nodes[i]);
                cell += r.weights[i] * std::pow(u, gamma) * g(u);
            }
            acc += std::pow(0.5 * h, mu) * cell;
        }
        const int cells = 44;
        for (int j = 1; j < cells; ++j) {
            const QuadRule& r = gauss_legendre(n_mid);
            const double b = T * std::ldexp(1.0, -j);
            const double a = 0.5 * b;
            double cell = 0.0;
            for (std::size_t i = 0; i < n_mid; ++i) {
                const double u = a + 0.5 * (b - a) * (1.0 + r.nodes[i]);
                cell += r.weights[i] * std::pow(T - u, mu - 1.0) * std::pow(u, gamma) * g(u);
            }
            acc += 0.5 * (b - a) * cell;
        }
        // closing cell [0, T 2^-cells]: origin weight absorbed by Jacobi
        {
            const QuadRule& r = gauss_jacobi(n_bot, 0.0, gamma);
            const double a = T * std::ldexp(1.0, -cells);
            double cell = 0.0;
            for (std::size_t i = 0; i < n_bot; ++i) {
                const double u = 0.5 * a * (1.0 + r.nodes[i]);
                cell += r.weights[i] * std::pow(T - u, mu - 1.0) * g(u);
            }
            acc += std::pow(0.5 * a, gamma + 1.0) * cell;
        }
        return acc;
    };

    const double coarse = composite(12, 16, 12);
    const double fine = composite(16, 24, 16);
    if (std::abs(fine - coarse) <= std::max(ctl.abs_tol, ctl.rel_tol * std::abs(fine)))
        return fine;
    throw NonConvergenceError("ek quadrature: error estimate above target");
}

// 4th-order central difference with adaptive step halving.  Reuses previously
// evaluated points: the +-h nodes of one level are the +-2h nodes of the next.
// noise_eps bounds the evaluation error of g itself; the stencil amplifies it
// by 1.5/h, so successive estimates cannot be expected to agree more closely
// than that and the ladder accepts once the gap is inside the amplified band.
template <class G>
double derivative4(G&& g, double t, double rel_tol, double noise_eps) {
    std::map<double, double> memo;
    auto ev = [&](double s) {
        auto it = memo.find(s);
        if (it != memo.end()) return it->second;
        const double v = g(s);
        memo.emplace(s, v);
        return v;
    };
    auto d4 = [&](double h) {
        return (-ev(t + 2.0 * h) + 8.0 * ev(t + h) - 8.0 * ev(t - h) + ev(t - 2.0 * h)) /
               (12.0 * h);
    };
    double h = 0.05 * t;
    double prev = d4(h);
    for (int k = 0; k < 8; ++k) {
        h *= 0.5;
        const double cur = d4(h);
        const double bound =
            std::max({rel_tol * std::abs(cur), 3.0 * noise_eps / h, 1e-13});
        if (std::abs(cur - prev) <= bound) return cur;
        prev = cur;
    }
    throw NonConvergenceError("ek_derivative: finite-difference step ladder did not settle");
}

}  // namespace

EKParams::EKParams(double gamma_, double mu_, double eta_)
    : gamma(gamma_), mu(mu_), eta(eta_) {
    if (!(gamma > -1.0) || std::isinf(gamma))
        throw DomainError("EKParams: gamma must be finite and > -1");
    if (!(mu >= 0.0) || std::isinf(mu))
        throw DomainError("EKParams: mu must be finite and >= 0");
    if (!(eta > 0.0) || std::isinf(eta))
        throw DomainError("EKParams: eta must be finite and > 0");
}

SampledFunction SampledFunction::from_callable(std::function<double(double)> f, double lo,
                                               double hi, bool smooth) {
    if (!f) throw DomainError("SampledFunction: null callable");
    SampledFunction s;
    s.evaluator = std::move(f);
    s.domain_lo = lo;
    s.domain_hi = hi;
    s.smooth = smooth;
    return s;
}

SampledFunction SampledFunction::from_uniform_grid(double t_start, double dt,
                                                   std::vector<double> values) {
    if (values.size() < 2)
        throw DomainError("SampledFunction: tabulation needs at least two samples");
    if (!(dt > 0.0)) throw DomainError("SampledFunction: grid step must be positive");
    SampledFunction s;
    s.grid_values = std::move(values);
    s.grid_t0 = t_start;
    s.grid_dt = dt;
    s.domain_lo = t_start;
    s.domain_hi = t_start + dt * static_cast<double>(s.grid_values.size() - 1);
    return s;
}

double SampledFunction::operator()(double t) const {
    if (!grid_values.empty()) {
        const double pos = (t - grid_t0) / grid_dt;
        const double last = static_cast<double>(grid_values.size() - 1);
        if (pos < -1e-9 || pos > last + 1e-9)
            throw DomainError("SampledFunction: argument outside tabulated range");
        const double clamped = std::clamp(pos, 0.0, last);
        const std::size_t i = std::min(static_cast<std::size_t>(clamped), grid_values.size() - 2);
        const double frac = clamped - static_cast<double>(i);
        return grid_values[i] + frac * (grid_values[i + 1] - grid_values[i]);
    }
    if (!evaluator) throw DomainError("SampledFunction: no evaluator set");
    return evaluator(t);
}

double ek_integral(const EKParams& p, const SampledFunction& f, double t,
                   const QuadControl& ctl) {
    if (!(p.mu > 0.0)) throw DomainError("ek_integral: integral operator requires mu > 0");
    if (!(t > 0.0) || std::isinf(t)) throw DomainError("ek_integral: t must be finite and > 0");
    const double T = std::pow(t, p.eta);
    const double inv_eta = 1.0 / p.eta;
    auto g = [&](double u) { return f(std::pow(u, inv_eta)); };
    const double raw = abel_integral(p.gamma, p.mu, T, g, ctl, f.smooth);
    return reciprocal_gamma(p.mu) * std::pow(t, -p.eta * (p.gamma + p.mu)) * raw;
}

double ek_power_oracle(const EKParams& p, double c) {
    const double base = p.gamma + 1.0 + c / p.eta;
    if (!(base > 0.0))
        throw DomainError("ek_power_oracle: gamma + 1 + c/eta must be positive");
    return gamma_ratio(base, base + p.mu);
}

double rl_integral(double mu, const SampledFunction& f, double t, const QuadControl& ctl) {
    if (!(mu > 0.0)) throw DomainError("rl_integral: requires mu > 0");
    if (!(t > 0.0) || std::isinf(t)) throw DomainError("rl_integral: t must be finite and > 0");
    // double-exponential rule: handles the integrable (t-tau)^(mu-1) endpoint
    // singularity without the Jacobi-weight machinery used by ek_integral
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto g = [&](double tau, double xc) {
        // xc = t - tau near the right endpoint, exact where direct subtraction
        // would cancel; it is the (negative) left distance elsewhere
        const double d = (tau > 0.5 * t) ? xc : t - tau;
        return std::pow(d, mu - 1.0) * f(tau);
    };
    double err = 0.0;
    double l1 = 0.0;
    const double raw = integrator.integrate(g, 0.0, t, 1e-11, &err, &l1);
    if (!(err * l1 <= std::max(1e3 * ctl.abs_tol, 1e2 * ctl.rel_tol * l1)))
        throw NonConvergenceError("rl_integral: double-exponential estimate above target");
    return reciprocal_gamma(mu) * raw;
}

double ek_derivative(const EKParams& p, const SampledFunction& f, double t,
                     const QuadControl& ctl) {
    if (!(t > 0.0) || std::isinf(t)) throw DomainError("ek_derivative: t must be finite and > 0");
    if (p.mu > 1.0)
        throw UnsupportedError("ek_derivative: only orders mu <= 1 (single product factor)");
    if (p.mu == 0.0) return f(t);  // identity reduction, no quadrature path

    // the step ladder cannot resolve the derivative below the noise the inner
    // quadrature tolerance injects, so the acceptance band scales with it
    const double deriv_tol = std::max(1e-6, 5.0 * ctl.rel_tol);
    if (p.mu == 1.0) {
        // inner operator has order 0 (identity): differentiate f directly
        auto g = [&](double s) { return f(s); };
        const double noise = 1e-14 * (1.0 + std::abs(f(t)));
        return (p.gamma + 1.0) * f(t) + t / p.eta * derivative4(g, t, deriv_tol, noise);
    }
    const EKParams inner(p.gamma + p.mu, 1.0 - p.mu, p.eta);
    auto g = [&](double s) { return ek_integral(inner, f, s, ctl); };
    const double g_t = g(t);
    const double noise = ctl.abs_tol + ctl.rel_tol * std::abs(g_t);
    return (p.gamma + 1.0) * g_t + t / p.eta * derivative4(g, t, deriv_tol, noise);
}

}  // namespace ekdiff
