#include <cmath>

#include "doctest.h"
#include "ekdiff/ekops.hpp"
#include "ekdiff/errors.hpp"

using namespace ekdiff;

namespace {
double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

SampledFunction power_fn(double c) {
    return SampledFunction::from_callable([c](double t) { return std::pow(t, c); });
}
}  // namespace

TEST_CASE("ekops: parameter validation") {
    CHECK_THROWS_AS(EKParams(-1.5, 0.5, 1.0), DomainError);  // gamma <= -1
    CHECK_THROWS_AS(EKParams(0.0, -0.1, 1.0), DomainError);  // mu < 0
    CHECK_THROWS_AS(EKParams(0.0, 0.5, 0.0), DomainError);   // eta <= 0
    CHECK_NOTHROW(EKParams(-0.999, 0.0, 2.0));
}

TEST_CASE("ekops: sampled function wrapper") {
    const SampledFunction lin = SampledFunction::from_uniform_grid(0.0, 0.5, {0.0, 1.0, 2.0, 3.0});
    // linear data is reproduced exactly between nodes
    CHECK(lin(0.25) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lin(1.5) == 3.0);
    CHECK_THROWS_AS(lin(1.7), DomainError);
    CHECK_THROWS_AS(lin(-0.2), DomainError);
    CHECK_THROWS_AS(SampledFunction::from_uniform_grid(0.0, 0.5, {1.0}), DomainError);
    CHECK_THROWS_AS(SampledFunction::from_uniform_grid(0.0, -0.5, {1.0, 2.0}), DomainError);
}

TEST_CASE("ekops: integral eigenrelation on power laws, frozen anchors") {
    struct Anchor {
        double gamma, mu, eta, c, t, value;
    };
    // I[tau^c](t) = K t^c, K = Gamma(gamma+1+c/eta)/Gamma(gamma+mu+1+c/eta),
    // values frozen from a 50-digit reference
    const Anchor anchors[] = {
        {2.0, 0.3, 2.0, 4.0, 1.5, 3.1908208189501102892},
        {0.5, 1.2, 1.6, 3.0, 0.8, 0.11505650803611953564},
        {-0.5, 0.7, 0.8, 1.0, 2.0, 1.4313285856927086812},
    };
    for (const Anchor& a : anchors) {
        const EKParams p(a.gamma, a.mu, a.eta);
        CHECK(rel_err(ek_integral(p, power_fn(a.c), a.t), a.value) < 1e-9);
        CHECK(rel_err(ek_power_oracle(p, a.c) * std::pow(a.t, a.c), a.value) < 1e-13);
    }
}

TEST_CASE("ekops: eigenrelation across a wider parameter sweep") {
    for (double gamma : {-0.5, 0.0, 1.0})
        for (double mu : {0.3, 0.5, 0.8})
            for (double eta : {0.5, 1.0, 2.0})
                for (double c : {0.0, 1.0, 2.0}) {
                    const EKParams p(gamma, mu, eta);
                    const double t = 1.3;
                    const double want = ek_power_oracle(p, c) * std::pow(t, c);
                    CHECK(rel_err(ek_integral(p, power_fn(c), t), want) < 1e-8);
                }
}

TEST_CASE("ekops: power oracle matches a direct Gamma-ratio and guards its pole") {
    const EKParams p(0.4, 0.7, 1.3);
    const double c = 1.9;
    const double want =
        std::tgamma(p.gamma + 1.0 + c / p.eta) / std::tgamma(p.gamma + p.mu + 1.0 + c / p.eta);
    CHECK(rel_err(ek_power_oracle(p, c), want) < 1e-13);
    // gamma + 1 + c/eta <= 0 means the defining integral diverges at the origin
    CHECK_THROWS_AS(ek_power_oracle(EKParams(-0.9, 0.5, 1.0), -0.2), DomainError);
}

TEST_CASE("ekops: Riemann-Liouville route agrees with the Gauss-Jacobi route") {
    // t^(-mu) J^mu f = I_{0,mu,1} f, with the two sides computed by
    // unrelated quadratures (double-exponential vs Gauss-Jacobi ladder)
    const SampledFunction f =
        SampledFunction::from_callable([](double t) { return std::exp(-t); });
    for (double mu : {0.25, 0.4, 0.9})
        for (double t : {0.4, 1.1, 2.3}) {
            const double lhs = std::pow(t, -mu) * rl_integral(mu, f, t);
            const double rhs = ek_integral(EKParams(0.0, mu, 1.0), f, t);
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    // J^mu[1](t) = t^mu / Gamma(mu+1), closed form
    const SampledFunction one = SampledFunction::from_callable([](double) { return 1.0; });
    CHECK(rel_err(rl_integral(0.6, one, 1.7), std::pow(1.7, 0.6) / std::tgamma(1.6)) < 1e-11);
}

TEST_CASE("ekops: derivative identities") {
    const SampledFunction f =
        SampledFunction::from_callable([](double t) { return std::exp(-t) + t; });

    // mu = 0 is the identity, bit for bit: no quadrature may run
    const EKParams id(0.7, 0.0, 1.4);
    CHECK(ek_derivative(id, f, 0.9) == f(0.9));

    // mu = 1 on powers: D[tau^c](t) = (gamma + 1 + c/eta) t^c
    const EKParams d1(0.3, 1.0, 1.5);
    const double c = 2.0;
    const double want = (d1.gamma + 1.0 + c / d1.eta) * std::pow(0.8, c);
    CHECK(rel_err(ek_derivative(d1, power_fn(c), 0.8), want) < 1e-8);

    // fractional mu inverts the integral eigenvalue on powers
    const EKParams p(0.4, 0.45, 1.3);
    const double K = ek_power_oracle(p, c);
    const double got = ek_derivative(p, power_fn(c), 0.9);
    CHECK(rel_err(got, std::pow(0.9, c) / K) < 1e-5);

    CHECK_THROWS_AS(ek_derivative(EKParams(0.0, 1.2, 1.0), f, 1.0), UnsupportedError);
}

TEST_CASE("ekops: integral rejects bad evaluation points") {
    const EKParams p(0.0, 0.5, 1.0);
    CHECK_THROWS_AS(ek_integral(p, power_fn(1.0), 0.0), DomainError);
    CHECK_THROWS_AS(ek_integral(p, power_fn(1.0), -1.0), DomainError);
    // the mu = 0 integral is the identity only for the derivative; as an
    // integral the kernel exponent mu - 1 = -1 is not integrable
    CHECK_THROWS_AS(ek_integral(EKParams(0.0, 0.0, 1.0), power_fn(1.0), 1.0), DomainError);
}
