#pragma once

namespace ekdiff {

// 1/Gamma(x), entire in x.  Returns exact +0.0 at the poles x = 0, -1, -2, ...
// Uses the reflection form sin(pi x) Gamma(1-x) / pi for x <= 0 so no
// intermediate overflows before the zero crossings.
double reciprocal_gamma(double x);

// log|1/Gamma(x)| and the sign of 1/Gamma(x), for assembling products whose
// factors overflow individually.  At poles: sign = 0 and the log is -inf.
double log_abs_reciprocal_gamma(double x, int& sign);

// Gamma(a)/Gamma(b) for a, b > 0 without overflowing either factor.
double gamma_ratio(double a, double b);

// Number of threads worker loops may use: the EKDIFF_THREADS environment
// variable if set to a positive integer, otherwise hardware concurrency.
unsigned thread_budget();

}  // namespace ekdiff
