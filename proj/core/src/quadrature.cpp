#include "ekdiff/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "ekdiff/errors.hpp"

namespace ekdiff {
namespace {

QuadRule build_jacobi(std::size_t n, double a, double b) {
    // Three-term recurrence of the monic Jacobi polynomials:
    //   alpha_0 = (b-a)/(a+b+2)
    //   alpha_k = (b^2-a^2) / ((2k+a+b)(2k+a+b+2))
    //   beta_1  = 4(1+a)(1+b) / ((2+a+b)^2 (3+a+b))
    //   beta_k  = 4k(k+a)(k+b)(k+a+b) / ((2k+a+b)^2 (2k+a+b+1)(2k+a+b-1))
    // Nodes are eigenvalues of tridiag(alpha, sqrt(beta)); each weight is
    // mu_0 times the squared first component of the matching eigenvector,
    // mu_0 = 2^(a+b+1) B(a+1, b+1).
    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
    diag[0] = (b - a) / (a + b + 2.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        diag[k] = (b * b - a * a) / (s * (s + 2.0));
    }
    if (n > 1) {
        sub[0] = std::sqrt(4.0 * (1.0 + a) * (1.0 + b) /
                           ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b)));
        for (std::size_t k = 2; k < n; ++k) {
            const double s = 2.0 * k + a + b;
            sub[k - 1] = std::sqrt(4.0 * k * (k + a) * (k + b) * (k + a + b) /
                                   (s * s * (s + 1.0) * (s - 1.0)));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw LinAlgError("gauss_jacobi: tridiagonal eigen decomposition failed");

    const double mu0 = std::pow(2.0, a + b + 1.0) *
                       std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(a + b + 2.0));
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace

const QuadRule& gauss_jacobi(std::size_t n, double a, double b) {
    if (n == 0 || n > 100'000)
        throw DomainError("gauss_jacobi: rule size out of range [1, 1e5]");
    if (!(a > -1.0) || !(b > -1.0))
        throw DomainError("gauss_jacobi: weight exponents must exceed -1");
    static std::mutex mtx;
    static std::map<std::tuple<std::size_t, double, double>, std::unique_ptr<QuadRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[{n, a, b}];
    if (!slot) slot = std::make_unique<QuadRule>(build_jacobi(n, a, b));
    return *slot;
}

const QuadRule& gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0, 0.0); }

}  // namespace ekdiff
