#include "ekdiff/special.hpp"

#include <boost/math/special_functions/sin_pi.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "ekdiff/errors.hpp"

namespace ekdiff {

double reciprocal_gamma(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x > 0.0) {
        if (x > 178.0) {
            // 1/Gamma underflows; recover the exact scale through lgamma.
            return std::exp(-std::lgamma(x));
        }
        return 1.0 / std::tgamma(x);
    }
    if (x == std::floor(x)) return 0.0;  // poles of Gamma
    // 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi.  Gamma(1-x) can overflow for very
    // negative x, in which case the sin factor cannot rescue a finite product
    // in double; fall through to the log form.
    const double s = boost::math::sin_pi(x);
    const double lg = std::lgamma(1.0 - x);
    if (lg < 700.0) return s * std::tgamma(1.0 - x) / 3.14159265358979323846;
    return std::copysign(std::exp(lg + std::log(std::fabs(s) / 3.14159265358979323846)), s);
}

double log_abs_reciprocal_gamma(double x, int& sign) {
    if (x > 0.0) {
        sign = 1;
        return -std::lgamma(x);
    }
    if (x == std::floor(x)) {
        sign = 0;
        return -std::numeric_limits<double>::infinity();
    }
    const double s = boost::math::sin_pi(x);
    sign = (s > 0.0) ? 1 : -1;
    return std::log(std::fabs(s)) - std::log(3.14159265358979323846) + std::lgamma(1.0 - x);
}

double gamma_ratio(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("gamma_ratio: arguments must be positive");
    return std::exp(std::lgamma(a) - std::lgamma(b));
}

unsigned thread_budget() {
    if (const char* env = std::getenv("EKDIFF_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace ekdiff
