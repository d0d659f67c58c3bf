#pragma once

#include <complex>

namespace dunkl {

/// Kummer's confluent hypergeometric 1F1(a; b; z) for z >= 0, a, b > 0,
/// returned as log(1F1) — the series has positive terms, so it is summed
/// with periodic rescaling and never overflows.
double hyp1f1_positive_log(double a, double b, double z);

/// Plain Taylor evaluation of 1F1(a; b; z); valid for moderate |z|.
double hyp1f1_series(double a, double b, double z, double tol = 1e-15);

/// Normalized Bessel function j_nu(z) = Gamma(nu+1) (2/z)^nu J_nu(z),
/// even in z, j_nu(0) = 1. Requires nu > -1.
double bessel_j_normalized(double nu, double z);

/// log of the rank-one Dunkl kernel E_k(u, v) for real arguments.
/// E_k(u,v) = e^{uv} 1F1(k; 2k+1; -2uv); positive for real u, v.
double rank1_kernel_log(double k, double u, double v);

/// Rank-one Dunkl kernel E_k(u, v); overflows for very large uv — use
/// rank1_kernel_log when combining with Gaussian factors.
double rank1_kernel(double k, double u, double v);

/// Rank-one Dunkl kernel with imaginary second argument, E_k(u, -i xi).
/// |result| <= 1 for all real u, xi.
std::complex<double> rank1_kernel_imag(double k, double u, double xi);

} // namespace dunkl
