#pragma once

// Half-space fields F(t,x), the conic square functional, the Calderon pair
// (psi, phi) with its reproducing formulas, and the tent-space atomic
// decomposition.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "dunkl/spectral.hpp"

namespace dunkl {

/// Sampled F(t, x) on a geometric t-grid x the plan's spatial grid.
struct HalfSpaceField {
    std::vector<double> t_grid;        // t_j = t_min * rho^j
    std::vector<GridFunction> values;  // one grid function per t_j

    int levels() const { return static_cast<int>(t_grid.size()); }
};

/// Geometric t-grid; defaults are the unit-scale experiment range.
std::vector<double> make_t_grid(double t_min = 0.015625, double t_max = 64.0,
                                double rho = 1.189207115002721);  // 2^(1/4)

/// Trapezoid weights for ∫ (.) dt/t on the geometric grid.
std::vector<double> log_trapezoid_weights(const std::vector<double>& t_grid);

/// F(t, x) = Q_t f(x) = t^2 Δ_k h_{t^2} * f(x): spectral multiplier
/// -t^2 ||xi||^2 e^{-t^2 ||xi||^2} per level.
HalfSpaceField q_field(const TransformPlan& plan, const GridFunction& f,
                       const std::vector<double>& t_grid = make_t_grid());

/// ∬ |F|^2 dw dt/t with the same discrete weights the functional uses.
double t2_norm_sq(const WeightedGrid& grid, const HalfSpaceField& field);

/// 𝒜F(x) = (∫∫_{||y-x||<t} |F(t,y)|^2 dw(y)/w(B(x,t)) dt/t)^{1/2}.
/// Cone membership at node centers; boundary cells get weight 1/2.
GridFunction conic_functional(const WeightedGrid& grid, const HalfSpaceField& field,
                              BallVolumeCache& volumes, bool parallel = true);

/// S f = conic_functional(q_field(f)) — single code path by construction.
GridFunction square_function(const TransformPlan& plan, const GridFunction& f,
                             BallVolumeCache& volumes,
                             const std::vector<double>& t_grid = make_t_grid());

/// ||S f||_{L^p(dw)} for 0 < p <= 1.
double hp_quasinorm(const TransformPlan& plan, const GridFunction& f, double p,
                    BallVolumeCache& volumes,
                    const std::vector<double>& t_grid = make_t_grid());

/// The Calderon pair: psi a fixed radial bump supported in B(0,1), rescaled
/// so that the reproducing normalization integral equals 1; phi = Δ_k^M psi.
struct CalderonPair {
    GridFunction psi;
    GridFunction phi;
    int M = 1;
    double c_phi = 0.0;        // c_k^2 ∫ (F phi(u e))^2 du/u
    double psi_scale = 1.0;    // rescale applied to the raw bump
    // Dense radial profiles: g(u) = F phi(xi) and F psi(xi), ||xi|| = u.
    // They satisfy profile_g = (-u^2)^M profile_gpsi exactly at table nodes.
    std::vector<double> profile_u;
    std::vector<double> profile_g;
    std::vector<double> profile_gpsi;

    /// Interpolation of the radial profiles (0 beyond the table).
    double fourier_phi(double u) const;
    double fourier_psi(double u) const;
};

CalderonPair build_calderon_pair(const TransformPlan& plan, int M);

enum class ReproRoute { heat, self };

struct ReproResult {
    GridFunction reconstruction;
    double rel_l2_error = 0.0;
};

/// f ≈ -∫ φ_t * φ_t * (Q_t f) dt/t   (heat route), or
/// f ≈ (1/c_φ) ∫ φ_t * φ_t * f dt/t  (self route), discretized on t_grid.
/// Throws if the recorded relative error exceeds 0.1 (t-range too narrow).
ReproResult reproduce(const TransformPlan& plan, const CalderonPair& pair,
                      const GridFunction& f, ReproRoute route,
                      const std::vector<double>& t_grid = make_t_grid());

/// A tent atom: samples of the field restricted to one stopping-time region,
/// stored sparsely, with its ball and measured square integral.
struct TentAtom {
    Ball ball;
    struct Sample {
        int t_index;
        std::size_t node_index;
        std::complex<double> value;
    };
    std::vector<Sample> samples;
    double square_integral = 0.0;  // ∬ |A|^2 dw dt/t
};

struct TentDecomposition {
    std::vector<double> lambdas;
    std::vector<TentAtom> atoms;
    double sum_lambda_p = 0.0;
    double tp_norm = 0.0;  // ||𝒜F||_{L^p(dw)}
};

/// Stopping-time tent decomposition at thresholds 2^i with maximal dyadic
/// cube covers; Σ λ_j A_j = F exactly on the sampled half-space (the regions
/// partition the support). If F already fits one tent within the size bound,
/// it is returned as a single atom.
TentDecomposition tent_decompose(const WeightedGrid& grid, const HalfSpaceField& field,
                                 double p, BallVolumeCache& volumes,
                                 bool parallel = true);

struct TentAtomCertificate {
    bool pass = false;
    double support_margin = 0.0;  // min over samples of r - t + slack - ||y-c||
    double size_margin = 0.0;     // relative slack in the square-integral bound
};

TentAtomCertificate verify_tent_atom(const WeightedGrid& grid,
                                     const std::vector<double>& t_grid,
                                     const TentAtom& atom, double p,
                                     BallVolumeCache& volumes);

} // namespace dunkl
