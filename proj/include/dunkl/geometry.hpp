#pragma once

// Root-system configuration for Z2^N products, the weight w, orbit geometry,
// weighted Gauss-Legendre quadrature grids, and L^p / Schwartz seminorms.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

namespace dunkl {

/// Z2^N product root system: roots ±√2·e_j with multiplicity k_j on axis j.
/// The reflection group is the 2^N sign-flip maps, stored as bit masks
/// (bit j set = flip coordinate j).
struct RootSystemConfig {
    int dim = 1;
    std::vector<double> multiplicities;        // k_j >= 0 per axis
    std::vector<std::vector<double>> roots;    // ±√2·e_j, listed both signs
    std::vector<std::uint32_t> group;          // all 2^N sign masks

    /// Homogeneous dimension 𝐍 = N + Σ_α k(α) = N + 2 Σ_j k_j.
    double homogeneous_dimension() const;

    /// w(x) = Π_α |<x,α>|^{k(α)} = Π_j 2^{k_j} |x_j|^{2 k_j}.
    double weight_at(std::span<const double> x) const;

    /// Apply the sign-flip group element given by `mask` to x.
    std::vector<double> reflect(std::uint32_t mask, std::span<const double> x) const;
};

RootSystemConfig build_root_system(int n_axes, std::vector<double> multiplicities);

/// d(x,y) = min_{σ∈G} ||σ(x) − y||; factorizes per axis for sign flips.
double orbit_distance(const RootSystemConfig& cfg, std::span<const double> x,
                      std::span<const double> y);

struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

/// True iff the orbit of z meets B, i.e. orbit_distance(center, z) < radius.
bool orbit_contains(const RootSystemConfig& cfg, const Ball& ball,
                    std::span<const double> z);

/// One axis of the tensor quadrature grid: composite 12-point Gauss-Legendre
/// panels on [-L, L], dyadically refined toward 0 so that the |x|^{2k} weight
/// factor is integrated accurately. Nodes ascend and are symmetric about 0;
/// quad_weights already include the per-axis weight factor 2^k |x|^{2k}.
struct AxisGrid {
    double multiplicity = 0.0;
    double extent = 0.0;
    std::vector<double> nodes;
    std::vector<double> quad_weights;

    int size() const { return static_cast<int>(nodes.size()); }
    /// Index of -nodes[i] (the grid is reflection-closed by construction).
    int mirror_index(int i) const { return size() - 1 - i; }
};

AxisGrid build_axis_grid(double multiplicity, double extent, int resolution,
                         int points_per_panel = 12, int refine_levels = 8);

/// Tensor product of per-axis grids; flat indices are row-major
/// (axis 0 slowest). Functions on the grid are stored as flat vectors.
struct WeightedGrid {
    RootSystemConfig config;
    std::vector<AxisGrid> axes;

    std::size_t size() const;
    int dim() const { return static_cast<int>(axes.size()); }

    std::vector<int> unflatten(std::size_t flat) const;
    std::size_t flatten(std::span<const int> multi) const;
    std::vector<double> node(std::size_t flat) const;
    double quad_weight(std::size_t flat) const;  // product of axis weights
    /// Flat index of the node with coordinate `axis` negated.
    std::size_t reflect_index(std::size_t flat, int axis) const;
};

WeightedGrid build_grid(const RootSystemConfig& cfg, double extent, int resolution,
                        int points_per_panel = 12, int refine_levels = 8);

/// Sampled complex function on a WeightedGrid (flat, row-major).
using GridFunction = std::vector<std::complex<double>>;

double lp_norm(const WeightedGrid& grid, const GridFunction& f, double p);
std::complex<double> integrate(const WeightedGrid& grid, const GridFunction& f);
std::complex<double> inner_product(const WeightedGrid& grid, const GridFunction& f,
                                   const GridFunction& g);  // ∫ f conj(g) dw

/// Adaptive 1-D quadrature (GSL QAG under the hood).
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-12);

/// w(B(center, r)) by closed form in the innermost axis and adaptive
/// quadrature over the outer axes.
double ball_volume(const RootSystemConfig& cfg, const Ball& ball);

/// Fast comparable surrogate r^N Π_α (|<x0,α>| + r)^{k(α)}.
double ball_volume_surrogate(const RootSystemConfig& cfg, const Ball& ball);

/// Memoizing wrapper around ball_volume keyed on the exact center/radius
/// bit patterns; the conic functional queries the same balls repeatedly.
class BallVolumeCache {
public:
    explicit BallVolumeCache(const RootSystemConfig& cfg) : cfg_(&cfg) {}
    double operator()(std::span<const double> center, double radius);
    std::size_t entries() const { return memo_.size(); }

private:
    const RootSystemConfig* cfg_;
    std::unordered_map<std::uint64_t, double> memo_;
};

/// d/dx^order along one axis by Fornberg finite-difference weights on the
/// (order+5)-node nearest stencil (4th-order accurate on smooth data).
GridFunction axis_derivative(const WeightedGrid& grid, const GridFunction& f,
                             int axis, int order);

/// sup over nodes and multi-indices |alpha| <= n of (1+||x||)^n |∂^alpha f|.
/// Supported for n <= 4.
double schwartz_seminorm(const WeightedGrid& grid, const GridFunction& f, int n);

} // namespace dunkl
