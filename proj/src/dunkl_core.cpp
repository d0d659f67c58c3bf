#include "dunkl/dunkl_core.hpp"

#include <cmath>
#include <stdexcept>

#include "dunkl/special.hpp"

namespace dunkl {

double KernelEvaluator::real_kernel_log(std::span<const double> x,
                                        std::span<const double> y) const {
    double lg = 0.0;
    for (int j = 0; j < cfg.dim; ++j)
        lg += rank1_kernel_log(cfg.multiplicities[j], x[j], y[j]);
    return lg;
}

double KernelEvaluator::real_kernel(std::span<const double> x,
                                    std::span<const double> y) const {
    return std::exp(real_kernel_log(x, y));
}

std::complex<double> KernelEvaluator::imag_kernel(std::span<const double> x,
                                                  std::span<const double> xi) const {
    std::complex<double> prod{1.0, 0.0};
    for (int j = 0; j < cfg.dim; ++j)
        prod *= rank1_kernel_imag(cfg.multiplicities[j], x[j], xi[j]);
    return prod;
}

KernelEvaluator make_kernel_evaluator(const RootSystemConfig& cfg) {
    return KernelEvaluator{cfg, 1e-14};
}

double dunkl_constant(const RootSystemConfig& cfg) {
    double c = 1.0;
    for (double k : cfg.multiplicities) {
        // Truncation at 40 leaves a relative tail below e^{-800}.
        const double half = integrate_adaptive(
            [k](double x) {
                const double w = k == 0.0 ? 1.0 : std::pow(2.0 * x * x, k);
                return w * std::exp(-x * x / 2.0);
            },
            0.0, 40.0, 1e-13);
        c *= 2.0 * half;
    }
    return c;
}

GridFunction apply_dunkl_operator(const WeightedGrid& grid, const GridFunction& f,
                                  int axis) {
    if (f.size() != grid.size())
        throw std::invalid_argument("apply_dunkl_operator: size mismatch");
    GridFunction out = axis_derivative(grid, f, axis, 1);
    const double k = grid.config.multiplicities[axis];
    if (k == 0.0) return out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double xj = grid.node(i)[axis];
        // Gauss-Legendre nodes never sit on the hyperplane, but guard anyway:
        // (f(x) - f(σ_j x))/x_j -> 2 ∂_j f as x_j -> 0 (removable singularity).
        if (std::abs(xj) < 1e-14) {
            out[i] *= 1.0 + 2.0 * k;
            continue;
        }
        out[i] += k * (f[i] - f[grid.reflect_index(i, axis)]) / xj;
    }
    return out;
}

GridFunction apply_dunkl_laplacian(const WeightedGrid& grid, const GridFunction& f) {
    if (f.size() != grid.size())
        throw std::invalid_argument("apply_dunkl_laplacian: size mismatch");
    GridFunction out(f.size(), 0.0);
    for (int axis = 0; axis < grid.dim(); ++axis) {
        const auto d2 = axis_derivative(grid, f, axis, 2);
        const double k = grid.config.multiplicities[axis];
        if (k == 0.0) {
            for (std::size_t i = 0; i < f.size(); ++i) out[i] += d2[i];
            continue;
        }
        const auto d1 = axis_derivative(grid, f, axis, 1);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double xj = grid.node(i)[axis];
            const auto refl = f[grid.reflect_index(i, axis)];
            out[i] += d2[i] + k * (2.0 * d1[i] / xj - (f[i] - refl) / (xj * xj));
        }
    }
    return out;
}

} // namespace dunkl
