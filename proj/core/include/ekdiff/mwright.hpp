#pragma once

#include <cstddef>
#include <vector>

namespace ekdiff {

// Order parameter of the auxiliary density family, restricted to (0, 1].
// At nu == 1 the density degenerates to a unit point mass at z == 1: moments
// and compositions still make sense there, pointwise evaluation does not.
struct WrightOrder {
    double nu;
    explicit WrightOrder(double v);
    bool is_dirac() const { return nu == 1.0; }
};

// M_nu(z) = sum_{n>=0} (-z)^n / (n! Gamma(1 - nu(n+1))) for z >= 0.
//
// The series is alternating with terms peaking near n ~ E/(1-nu) where
// E = (1-nu) nu^(nu/(1-nu)) z^(1/(1-nu)); the largest term exceeds the result
// by a factor ~exp(2E), so plain double arithmetic loses ~2E/ln(10) digits.
// Evaluation escalates through double, double-double, and progressively wider
// MPFR-backed precisions chosen from E, so the returned double carries
// close to full precision over the whole admissible range.  For E > 800 the
// value lies far below the smallest subnormal double and +0.0 is returned.
//
// drop_below > 0 is a performance contract for callers scanning wide argument
// ranges: when a cheap upper bound certifies M_nu(z) < drop_below, the
// function may return +0.0 without summing.  drop_below == 0 disables this.
double mwright_eval(WrightOrder order, double z, double drop_below = 0.0);

// Integer or fractional moment: integral of z^delta M_nu(z) over (0, inf)
//   = Gamma(delta + 1) / Gamma(nu delta + 1),  delta > -1.
double mwright_moment(WrightOrder order, double delta);

// Smallest T such that the Markov bound  min_k  moment(k) / T^k  certifies
// that the mass beyond T is at most tail_eps.
double mwright_tail_cut(WrightOrder order, double tail_eps);

// Tabulated density on [0, tail_cut] with a trapezoidal CDF.  Node spacing
// grows geometrically away from the origin; the CDF is deliberately not
// renormalized, so cdf_values.back() reports how much mass the table resolves.
struct MWrightTable {
    double nu = 0.0;
    double tail_eps = 0.0;
    double tail_cut = 0.0;
    std::vector<double> nodes;
    std::vector<double> pdf_values;
    std::vector<double> cdf_values;

    double mass_resolved() const { return cdf_values.back(); }

    // Piecewise-linear inverse of the tabulated CDF; u in [0, 1).  Draws that
    // fall beyond the resolved mass map to tail_cut.
    double inverse_cdf(double u) const;
};

// tail_eps in (0, 1e-3], n_nodes >= 64.
MWrightTable mwright_build_table(WrightOrder order, double tail_eps = 1e-6,
                                 std::size_t n_nodes = 2048);

// Two-stage composition: for nu = lambda * ell,
//   t^(-nu) M_nu(xi t^(-nu)) =
//     integral over tau of  tau^(-lambda) M_lambda(xi tau^(-lambda))
//                           * t^(-ell) M_ell(tau t^(-ell))  d tau.
// Returns the left-hand side evaluated through the integral (or through the
// exact collapse when one factor is a point mass).  Requires xi >= 0, t > 0;
// refuses lambda == ell == 1, where the composed density is itself a point
// mass.
double mwright_compose(WrightOrder lambda, WrightOrder ell, double xi, double t);

}  // namespace ekdiff
