#pragma once

// (p,2,M,Delta_k)-atoms and (p,2,M,Delta_k,eps)-molecules: seeded random
// generation, certification, atom synthesis from tent atoms, the full atomic
// decomposition, and the Schwartz pairing / smoothness-envelope reports.

#include <cstdint>
#include <string>
#include <vector>

#include "dunkl/littlewood_paley.hpp"

namespace dunkl {

enum class AtomProvenance { random, from_tent, external };

/// How iterated Laplacians (r^2 Delta_k)^m are evaluated in certificates.
/// `direct` applies the local differential-reflection operator — exact
/// support behaviour, right for compactly supported analytic atoms.
/// `spectral` multiplies by (-||xi||^2)^m on the frequency grid — exact for
/// band-limited functions (transform outputs), where the direct stencils
/// would amplify round-off on the finest cells near the hyperplanes.
enum class LadderMethod { direct, spectral };

/// An atom a = Delta_k^M b with supp b in the orbit of B and the size
/// normalization ||(r^2 Delta_k)^m b||_2 <= r^{2M} w(B)^{1/2 - 1/p}, m <= M.
struct AtomSpec {
    GridFunction a;
    GridFunction b;
    Ball ball;
    int M = 1;
    double p = 1.0;
    AtomProvenance provenance = AtomProvenance::external;
    LadderMethod ladder = LadderMethod::direct;
};

/// Smallest admissible default M: the least integer exceeding
/// hom_dim (2-p)/(4p) + 1.
int default_atom_M(double hom_dim, double p);

struct AtomCertificate {
    bool pass = false;
    bool cancellation_pass = false;
    bool support_pass = false;
    bool size_pass = false;
    double cancellation_residual = 0.0;  // ||a - Delta_k^M b||_2 / ||a||_2
    double support_leak = 0.0;           // L^2 mass of b outside O(B), relative
    std::vector<double> size_margins;    // m = 0..M: 1 - norm/budget
};

/// Seeded random atom on the plan's grid: smooth bumps x exact cutoff inside
/// the ball, mollified within a 10% support margin (the heat step acts on
/// the bumps in closed form, keeping b an exact analytic sample), rescaled
/// so the worst size ratio equals 1. Deterministic in (ball, M, p, seed).
/// For M >= 3 keep the ball clear of the coordinate hyperplanes (the direct
/// ladder loses accuracy on the refined cells there).
AtomSpec make_random_atom(const TransformPlan& plan, const Ball& ball, int M,
                          double p, std::uint64_t seed);

AtomCertificate verify_atom(const TransformPlan& plan, const AtomSpec& spec);

struct MoleculeCertificate {
    bool pass = false;
    bool truncated = false;  // grid cannot hold the full shell/mass budget
    double epsilon = 0.0;
    int J = 0;  // shells j = 0..J, largest with 2^J r <= L/2
    // measured[j][n] = ||(r^2 Delta_k)^n b||_{L^2(U_j)}; budget analogous.
    std::vector<std::vector<double>> measured;
    std::vector<std::vector<double>> budget;
    double worst_margin = 0.0;      // min over cells of 1 - measured/budget
    double global_margin = 0.0;     // 1 - ||m||_2^2 / (C w(B)^{1 - 2/p})
    double global_constant = 0.0;   // C = sum_j 2^{-2j eps} (w(2^jB)/w(B))^{1-2/p}
};

/// Certify (mol, b) as a (p,2,M,Delta_k,eps)-molecule on ball B: per-shell
/// norms against r^{2M} 2^{-j eps} w(2^jB)^{1/2-1/p} plus the global L^2
/// bound. Shells U_j(B) are orbit-distance annuli; mass beyond the last
/// in-grid shell above 1% marks the certificate TRUNCATED.
MoleculeCertificate verify_molecule(const TransformPlan& plan,
                                    const GridFunction& mol, const GridFunction& b,
                                    const Ball& ball, int M, double p, double eps,
                                    LadderMethod method = LadderMethod::direct);

/// b_j(x) = sum_t w_t t^{2M} (psi_t * phi_t * A_t)(x), a_j = Delta_k^M b_j,
/// on ball B(x0, 8r). The t-grid and weights must match the field the tent
/// atom was cut from. Throws if pair.M != M.
AtomSpec atom_from_tent_atom(const TransformPlan& plan, const CalderonPair& pair,
                             const TentAtom& tent, const std::vector<double>& t_grid,
                             int M, double p);

struct DecompositionResult {
    std::vector<double> lambdas;
    std::vector<AtomSpec> atoms;
    double residual = 0.0;      // relative L^2 error of sum lambda_j a_j vs f
    double sum_lambda_p = 0.0;  // sum |lambda_j|^p (upper proxy only)
    double source_hp = 0.0;     // hp_quasinorm(f, p)
};

/// Fine default t-grid for the decomposition pipeline (the reassembly reuses
/// the reproducing formula, whose discretization error this grid controls).
std::vector<double> decompose_t_grid();

/// f -> Q_t field -> tent decomposition -> one atom per tent atom ->
/// reassembly through the reproducing formula.
DecompositionResult atomic_decompose(const TransformPlan& plan,
                                     const CalderonPair& pair, const GridFunction& f,
                                     double p, BallVolumeCache& volumes,
                                     const std::vector<double>& t_grid = decompose_t_grid());

struct PairingReport {
    double max_ratio = 0.0;
    std::vector<double> ratios;  // per (atom, test) pair, zero tests excluded
};

/// max over pairs of |<a, f>_dw| / ||f||_(n); requires n > max(2M, hom dim).
PairingReport pairing_bound_check(const TransformPlan& plan,
                                  const std::vector<AtomSpec>& atoms,
                                  const std::vector<GridFunction>& tests, int n);

struct AppendixReport {
    double seminorm_ratio = 0.0;     // ||Delta_k^{M1} f||_2 / ||f||_(n)
    double envelope_classical = 0.0; // max |d_0 f| (1+||x||)^{N/2+gamma}
    double envelope_dunkl = 0.0;     // max |T_0 f| (1+||x||)^{N/2+gamma}
    double envelope_constant = 0.0;  // envelope_dunkl / envelope_classical
};

/// L^2-vs-Schwartz bound and the decay-envelope transfer from the classical
/// first derivative to the Dunkl operator T_0, with fitted constants.
AppendixReport appendix_bounds_check(const TransformPlan& plan, const GridFunction& f,
                                     int M1, int n, double gamma = 1.0);

} // namespace dunkl
