#include "ekdiff/greenfn.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ekdiff/errors.hpp"
#include "ekdiff/mwright.hpp"
#include "ekdiff/special.hpp"

namespace ekdiff {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_time(double t, const char* who) {
    if (!(t > 0.0) || std::isinf(t)) throw DomainError(std::string(who) + ": t must be finite and > 0");
}

}  // namespace

DiffusionParams::DiffusionParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw DomainError("DiffusionParams: alpha must lie in (0, 2]");
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw DomainError("DiffusionParams: beta must lie in (0, 1]");
}

double gaussian_green(double x, double t) {
    require_time(t, "gaussian_green");
    return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

double ggbm_green(const DiffusionParams& p, double x, double t) {
    require_time(t, "ggbm_green");
    const double scale = std::pow(t, -0.5 * p.alpha);
    return 0.5 * scale * mwright_eval(WrightOrder(0.5 * p.beta), std::abs(x) * scale);
}

double time_fractional_green(double beta, double x, double t) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw DomainError("time_fractional_green: beta must lie in (0, 1)");
    require_time(t, "time_fractional_green");
    const double scale = std::pow(t, -0.5 * beta);
    return 0.5 * scale * mwright_eval(WrightOrder(0.5 * beta), std::abs(x) * scale);
}

double stretched_gaussian_green(double alpha, double x, double t) {
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw DomainError("stretched_gaussian_green: alpha must lie in (0, 2]");
    require_time(t, "stretched_gaussian_green");
    const double ta = std::pow(t, alpha);
    return std::exp(-x * x / (4.0 * ta)) / std::sqrt(4.0 * kPi * ta);
}

double green_variance(const DiffusionParams& p, double t) {
    require_time(t, "green_variance");
    return 2.0 * std::pow(t, p.alpha) * reciprocal_gamma(p.beta + 1.0);
}

double green_mixture(const DiffusionParams& p, double x, double t) {
    require_time(t, "green_mixture");
    const double ta = std::pow(t, p.alpha);
    if (p.beta == 1.0)  // amplitude density collapses to a point mass at tau = 1
        return std::exp(-x * x / (4.0 * ta)) / std::sqrt(4.0 * kPi * ta);

    // after tau = s^2:  (pi t^alpha)^(-1/2) integral_0^inf
    //   exp(-x^2/(4 s^2 t^alpha)) M_beta(s^2) ds
    const WrightOrder order(p.beta);
    const double x2 = x * x / (4.0 * ta);
    auto integrand = [&](double s) {
        const double gauss = (x2 == 0.0) ? 1.0 : std::exp(-x2 / (s * s));
        if (gauss == 0.0) return 0.0;
        return gauss * mwright_eval(order, s * s, 1e-18);
    };
    const double s_hi = 1.5 * std::sqrt(mwright_tail_cut(order, 1e-14));
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, s_hi, 14, 1e-10, &err);
    if (!(err <= 1e-7 * std::max(1.0, std::abs(val))))
        throw NonConvergenceError("green_mixture: quadrature estimate above target");
    return val / std::sqrt(kPi * ta);
}

double directing_pdf(const DiffusionParams& p, double t_star, double t) {
    require_time(t, "directing_pdf");
    if (!(t_star >= 0.0)) throw DomainError("directing_pdf: t_star must be >= 0");
    if (p.beta == 1.0)
        throw DiracOrderError("directing_pdf: beta = 1 is a point mass at t_star = t^alpha");
    const double scale = std::pow(t, -p.alpha);
    return scale * mwright_eval(WrightOrder(p.beta), t_star * scale);
}

double general_solution(const DiffusionParams& p, const SampledFunction& P0, double x,
                        double t) {
    require_time(t, "general_solution");
    if (std::isinf(P0.domain_lo) || std::isinf(P0.domain_hi) || !(P0.domain_lo < P0.domain_hi))
        throw DomainError("general_solution: P0 needs a finite support hint");

    auto integrand = [&](double z) { return ggbm_green(p, x - z, t) * P0(z); };
    auto piece = [&](double a, double b) {
        if (!(a < b)) return 0.0;
        double err = 0.0;
        const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, a, b, 12, 1e-9, &err);
        if (!(err <= 1e-6 * std::max(1.0, std::abs(val))))
            throw NonConvergenceError("general_solution: quadrature estimate above target");
        return val;
    };
    // the kernel has a corner at z = x; splitting there keeps both pieces smooth
    if (x > P0.domain_lo && x < P0.domain_hi)
        return piece(P0.domain_lo, x) + piece(x, P0.domain_hi);
    return piece(P0.domain_lo, P0.domain_hi);
}

double GreenProfile::mass() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < x_nodes.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (x_nodes[i] - x_nodes[i - 1]);
    return acc;
}

double GreenProfile::variance() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < x_nodes.size(); ++i) {
        const double f0 = x_nodes[i - 1] * x_nodes[i - 1] * values[i - 1];
        const double f1 = x_nodes[i] * x_nodes[i] * values[i];
        acc += 0.5 * (f0 + f1) * (x_nodes[i] - x_nodes[i - 1]);
    }
    return acc;
}

GreenProfile green_profile(const DiffusionParams& p, double t, std::size_t nx) {
    require_time(t, "green_profile");
    if (nx < 3) throw DomainError("green_profile: need at least 3 nodes");
    if ((nx & 1) == 0) ++nx;  // mirrored construction needs a center node
    const double peak = ggbm_green(p, 0.0, t);
    double x_max = std::sqrt(green_variance(p, t));
    while (ggbm_green(p, x_max, t) >= 1e-12 * peak) x_max *= 1.25;

    GreenProfile prof{p, t, {}, {}};
    prof.x_nodes.resize(nx);
    prof.values.resize(nx);
    const double dx = 2.0 * x_max / static_cast<double>(nx - 1);
    const std::size_t half = nx / 2;
    for (std::size_t i = 0; i < nx; ++i) {
        // build from the center out so the grid and values are exactly even
        const double xi = (static_cast<double>(i) - static_cast<double>(half)) * dx;
        prof.x_nodes[i] = xi;
    }
    for (std::size_t i = half; i < nx; ++i) prof.values[i] = ggbm_green(p, prof.x_nodes[i], t);
    for (std::size_t i = 0; i < half; ++i) prof.values[i] = prof.values[2 * half - i];
    return prof;
}

}  // namespace ekdiff
