#pragma once

// Pointwise Dunkl kernel evaluation on Z2^N products and the direct
// (non-spectral) action of the Dunkl operators T_j and Laplacian on grids.

#include <complex>
#include <span>

#include "dunkl/geometry.hpp"

namespace dunkl {

/// Evaluates the Dunkl kernel E as a product of rank-one closed forms
/// E_k(u,v) = e^{uv} 1F1(k; 2k+1; -2uv); E(x, 0) = 1 exactly.
struct KernelEvaluator {
    RootSystemConfig cfg;
    double tolerance = 1e-14;

    /// E(x, y) for real arguments (positive).
    double real_kernel(std::span<const double> x, std::span<const double> y) const;
    /// log E(x, y) — safe when combined with Gaussian factors.
    double real_kernel_log(std::span<const double> x, std::span<const double> y) const;
    /// E(x, -i xi); modulus <= 1.
    std::complex<double> imag_kernel(std::span<const double> x,
                                     std::span<const double> xi) const;
};

KernelEvaluator make_kernel_evaluator(const RootSystemConfig& cfg);

/// c_k = ∫ e^{-||x||^2/2} dw(x), by per-axis adaptive quadrature (the tensor
/// weight factorizes), relative accuracy ~1e-12.
double dunkl_constant(const RootSystemConfig& cfg);

/// T_j f = ∂_j f + k_j (f(x) - f(σ_j x)) / x_j (Z2^N form). The grid is
/// reflection-closed, so the reflected values are exact samples.
GridFunction apply_dunkl_operator(const WeightedGrid& grid, const GridFunction& f,
                                  int axis);

/// Δ_k f = Δf + Σ_j k_j (2 ∂_j f / x_j - (f(x) - f(σ_j x)) / x_j^2).
GridFunction apply_dunkl_laplacian(const WeightedGrid& grid, const GridFunction& f);

} // namespace dunkl
