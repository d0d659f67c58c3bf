#include "dunkl/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fftw3.h>

namespace dunkl {

namespace {

// Smooth step: 1 for u <= 1, 0 for u >= 2, C^inf in between.
double smooth_step_down(double u) {
    if (u <= 1.0) return 1.0;
    if (u >= 2.0) return 0.0;
    const double a = std::exp(-1.0 / (2.0 - u));
    const double b = std::exp(-1.0 / (u - 1.0));
    return a / (a + b);
}

double norm2(std::span<const double> x) {
    double n2 = 0.0;
    for (double v : x) n2 += v * v;
    return std::sqrt(n2);
}

// Least-squares slope of log2(y) vs l, skipping entries below a relative
// floor (quadrature dust would otherwise dominate the fit).
double log2_slope(const std::vector<int>& ells, const std::vector<double>& ys) {
    double ymax = 0.0;
    for (double y : ys) ymax = std::max(ymax, y);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!(ys[i] > 1e-13 * ymax)) continue;
        const double x = static_cast<double>(ells[i]);
        const double y = std::log2(ys[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1.0;
    }
    if (n < 2.0) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

double annulus_cutoff(double u) {
    // phi(u) = chi(u) - chi(2u) telescopes: sum_l phi(2^{-l} u) = 1, u > 0.
    return smooth_step_down(u) - smooth_step_down(2.0 * u);
}

double partition_sum(double u, int l_min, int l_max) {
    double s = 0.0;
    for (int l = l_min; l <= l_max; ++l) s += annulus_cutoff(std::ldexp(u, -l));
    return s;
}

SymbolSpec builtin_symbol(const std::string& label) {
    SymbolSpec spec;
    spec.label = label;
    spec.smoothness = std::numeric_limits<double>::infinity();
    if (label == "const") {
        spec.m = [](std::span<const double>) { return std::complex<double>(1.0, 0.0); };
        return spec;
    }
    if (label.rfind("heat:", 0) == 0) {
        const double t = std::stod(label.substr(5));
        if (!(t >= 0.0)) throw std::invalid_argument("builtin_symbol: heat needs t >= 0");
        spec.m = [t](std::span<const double> xi) {
            double n2 = 0.0;
            for (double v : xi) n2 += v * v;
            return std::complex<double>(std::exp(-t * n2), 0.0);
        };
        return spec;
    }
    if (label.rfind("imagpow:", 0) == 0) {
        const double g = std::stod(label.substr(8));
        spec.m = [g](std::span<const double> xi) {
            const double u = norm2(xi);
            if (u == 0.0) return std::complex<double>(1.0, 0.0);
            return std::exp(std::complex<double>(0.0, g * std::log(u)));
        };
        return spec;
    }
    throw std::invalid_argument("builtin_symbol: unknown label " + label);
}

namespace {

// ||g||_{W_2^s} for g sampled on a uniform box [-B, B]^dim, via FFT with the
// unitary transform convention.
double sobolev_norm_fft(const std::vector<std::complex<double>>& g, int n, int dim,
                        double B, double s) {
    const double h = 2.0 * B / n;
    const std::size_t total = g.size();
    std::vector<std::complex<double>> out(total);
    fftw_plan plan;
    if (dim == 1)
        plan = fftw_plan_dft_1d(n,
                                reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(g.data())),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    else
        plan = fftw_plan_dft_2d(n, n,
                                reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(g.data())),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double dzeta = 2.0 * M_PI / (n * h);
    const double scale = std::pow(h / std::sqrt(2.0 * M_PI), dim);
    double acc = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        double z2 = 0.0;
        std::size_t rem = idx;
        for (int d = 0; d < dim; ++d) {
            const std::size_t k = rem % static_cast<std::size_t>(n);
            rem /= static_cast<std::size_t>(n);
            const double kk = k <= static_cast<std::size_t>(n) / 2
                                  ? static_cast<double>(k)
                                  : static_cast<double>(k) - n;
            z2 += (kk * dzeta) * (kk * dzeta);
        }
        const double zeta = std::sqrt(z2);
        acc += std::norm(out[idx] * scale) * std::pow(1.0 + zeta, 2.0 * s) *
               std::pow(dzeta, dim);
    }
    return std::sqrt(acc);
}

std::vector<double> hormander_per_t(const SymbolSpec& sym, double s, int Q, int dim,
                                    const std::function<double(double)>& psi, int n,
                                    double B) {
    std::vector<double> norms;
    for (int q = -Q; q <= Q; ++q) {
        const double t = std::ldexp(1.0, q);
        std::vector<std::complex<double>> g;
        g.reserve(static_cast<std::size_t>(std::pow(n, dim)));
        std::vector<double> xi(static_cast<std::size_t>(dim)), txi(xi.size());
        const std::size_t total = static_cast<std::size_t>(std::pow(n, dim));
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t rem = idx;
            for (int d = 0; d < dim; ++d) {
                const std::size_t j = rem % static_cast<std::size_t>(n);
                rem /= static_cast<std::size_t>(n);
                xi[static_cast<std::size_t>(d)] = -B + (static_cast<double>(j) + 0.5) * (2.0 * B / n);
            }
            const double r = norm2(xi);
            const double cut = psi(r);
            if (cut == 0.0) {
                g.emplace_back(0.0, 0.0);
                continue;
            }
            for (std::size_t d = 0; d < xi.size(); ++d) txi[d] = t * xi[d];
            g.push_back(cut * sym.m(txi));
        }
        norms.push_back(sobolev_norm_fft(g, n, dim, B, s));
    }
    return norms;
}

} // namespace

HormanderReport hormander_norm(const SymbolSpec& sym, double s, int Q, int dim,
                               const std::function<double(double)>& psi,
                               int samples) {
    if (!(s > 0.0)) throw std::invalid_argument("hormander_norm: need s > 0");
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("hormander_norm: dim must be 1 or 2");
    HormanderReport rep;
    rep.s = s;
    std::function<double(double)> cut = psi;
    if (!cut) {
        cut = [](double u) { return annulus_cutoff(u); };
        rep.psi_label = "annulus";
    } else {
        rep.psi_label = "custom";
    }
    const double B = 2.5;
    for (int q = -Q; q <= Q; ++q) rep.t_grid.push_back(std::ldexp(1.0, q));
    const auto coarse = hormander_per_t(sym, s, Q, dim, cut, samples, B);
    const auto fine = hormander_per_t(sym, s, Q, dim, cut, 2 * samples, B);
    rep.per_t_norms = fine;
    rep.refinement_change = 0.0;
    for (double v : fine) rep.M0 = std::max(rep.M0, v);
    // Rows whose localized symbol is below the numeric floor (e.g. the heat
    // symbol at huge t, which vanishes on the annulus) carry no information
    // about M0 and are excluded from the stability comparison.
    for (std::size_t i = 0; i < fine.size(); ++i) {
        if (!(fine[i] > 1e-9 * rep.M0)) continue;
        rep.refinement_change = std::max(rep.refinement_change,
                                         std::abs(fine[i] - coarse[i]) / fine[i]);
    }
    rep.resolved = rep.refinement_change <= 0.05;
    return rep;
}

DyadicKernelSet dyadic_kernels(const TransformPlan& plan, const SymbolSpec& sym,
                               int l_min, int l_max, int M, double delta,
                               double delta_prime, double tail_R,
                               double spectral_tol) {
    if (!(delta_prime > delta && delta > 0.0))
        throw std::invalid_argument("dyadic_kernels: need delta' > delta > 0");
    if (l_min > l_max) throw std::invalid_argument("dyadic_kernels: empty l range");
    const auto& grid = plan.grid;
    const double hom = plan.config().homogeneous_dimension();
    const double beta = hom / 2.0 + delta;
    double extent = 0.0;
    for (const auto& ax : grid.axes) extent = std::max(extent, ax.extent);

    DyadicKernelSet set;
    set.l_min = l_min;
    set.l_max = l_max;
    set.M = M;
    set.delta = delta;
    set.delta_prime = delta_prime;
    set.tail_R = tail_R;

    const std::size_t n = grid.size();
    std::vector<double> radius(n), qw(n);
    for (std::size_t i = 0; i < n; ++i) {
        radius[i] = norm2(grid.node(i));
        qw[i] = grid.quad_weight(i);
    }

    auto rel_l2 = [&](const GridFunction& a, const GridFunction& b) {
        double d2 = 0.0, n2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            d2 += std::norm(a[i] - b[i]) * qw[i];
            n2 += std::norm(b[i]) * qw[i];
        }
        return n2 > 0.0 ? std::sqrt(d2 / n2) : std::sqrt(d2);
    };
    auto abs_l2 = [&](const GridFunction& a, const GridFunction& b) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            d2 += std::norm(a[i] - b[i]) * qw[i];
        return std::sqrt(d2);
    };
    // Band capacity: the largest L2(dw) mass a localized symbol of this
    // sup-norm can put on the annulus. The spectral gate compares absolute
    // defects against it, so levels where the symbol has already vanished
    // (relative error meaningless) cannot fail the verdict.
    double phi_ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cut = annulus_cutoff(radius[i]);
        phi_ref += cut * cut * qw[i];
    }
    phi_ref = sym.supnorm * std::sqrt(phi_ref);

    bool spectral_ok = true;
    std::vector<double> xi(static_cast<std::size_t>(grid.dim()));
    for (int l = l_min; l <= l_max; ++l) {
        set.ells.push_back(l);
        const double two_l = std::ldexp(1.0, l);
        GridFunction mhat(n), nhat(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto node = grid.node(i);
            for (std::size_t d = 0; d < xi.size(); ++d) xi[d] = two_l * node[d];
            const double cut = annulus_cutoff(radius[i]);
            if (cut == 0.0) {
                mhat[i] = nhat[i] = 0.0;
                continue;
            }
            const std::complex<double> mv = cut * sym.m(xi);
            mhat[i] = mv;
            nhat[i] = mv * std::pow(two_l * two_l * radius[i] * radius[i], M);
        }
        GridFunction K = inverse_transform(plan, mhat);
        GridFunction L = inverse_transform(plan, nhat);
        const GridFunction FK = forward_transform(plan, K);
        const GridFunction FL = forward_transform(plan, L);
        set.spectral_error_K.push_back(rel_l2(FK, mhat));
        set.spectral_error_L.push_back(rel_l2(FL, nhat));
        // Normalize so that convolve(K_l, f) realizes the band multiplier:
        // the convolution theorem carries a factor ck in this convention.
        for (auto& v : K) v /= plan.ck;
        for (auto& v : L) v /= plan.ck;
        // Capacity of the L band carries the extra (2^l u)^{2M} <= 2^{2M(l+1)}.
        const double lcap = std::pow(std::ldexp(1.0, l + 1), 2.0 * M) * phi_ref;
        spectral_ok = spectral_ok && abs_l2(FK, mhat) <= spectral_tol * phi_ref &&
                      abs_l2(FL, nhat) <= spectral_tol * lcap;

        double im2 = 0.0, tot2 = 0.0;
        double k1 = 0.0, kw = 0.0, kt = 0.0, l1 = 0.0, lw = 0.0, lt = 0.0;
        const double thr = two_l * tail_R;
        for (std::size_t i = 0; i < n; ++i) {
            const double ka = std::abs(K[i]), la = std::abs(L[i]);
            im2 += K[i].imag() * K[i].imag() * qw[i];
            tot2 += std::norm(K[i]) * qw[i];
            k1 += ka * qw[i];
            l1 += la * qw[i];
            const double wpow = std::pow(radius[i], beta) * qw[i];
            kw += ka * wpow;
            lw += la * wpow;
            if (radius[i] > thr) {
                kt += ka * qw[i];
                lt += la * qw[i];
            }
        }
        set.imag_residue_K.push_back(tot2 > 0.0 ? std::sqrt(im2 / tot2) : 0.0);
        // Exact change of variables from the unit-scale kernels to K_l, L_l:
        // L^1 norms are scale-invariant, the ||x||^beta weight contributes
        // 2^{-l beta}, and the tail threshold co-moves.
        const double sc = std::pow(2.0, -static_cast<double>(l) * beta);
        set.k_l1.push_back(k1);
        set.k_weighted.push_back(sc * kw);
        set.k_tail.push_back(kt);
        set.l_l1.push_back(l1);
        set.l_weighted.push_back(sc * lw);
        set.l_tail.push_back(lt);
        set.K_scaled.push_back(std::move(K));
        set.L_scaled.push_back(std::move(L));

        // Direct (unscaled-argument) kernel when the annulus fits the band.
        if (std::ldexp(1.0, l + 1) <= extent * (1.0 + 1e-12)) {
            GridFunction dhat(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double cut = annulus_cutoff(radius[i] / two_l);
                if (cut == 0.0) {
                    dhat[i] = 0.0;
                    continue;
                }
                dhat[i] = cut * sym.m(grid.node(i));
            }
            set.direct_ells.push_back(l);
            GridFunction Kd = inverse_transform(plan, dhat);
            for (auto& v : Kd) v /= plan.ck;
            set.K_direct.push_back(std::move(Kd));
        }
    }

    // Exclude levels whose kernel mass sits below the quadrature floor (the
    // symbol vanished on the annulus) from the slope fits.
    double k1max = 0.0;
    for (double v : set.k_l1) k1max = std::max(k1max, v);
    std::vector<int> fit_ells;
    std::vector<double> fkw, fl1, flw;
    for (std::size_t i = 0; i < set.ells.size(); ++i) {
        if (set.k_l1[i] <= 1e-12 * k1max) {
            set.excluded_ells.push_back(set.ells[i]);
            continue;
        }
        fit_ells.push_back(set.ells[i]);
        fkw.push_back(set.k_weighted[i]);
        fl1.push_back(set.l_l1[i]);
        flw.push_back(set.l_weighted[i]);
    }
    set.slope_k_weighted = log2_slope(fit_ells, fkw);
    set.slope_l_l1 = log2_slope(fit_ells, fl1);
    set.slope_l_weighted = log2_slope(fit_ells, flw);

    // Tail decay in R at l = 0: the bound predicts at least R^{-beta}.
    {
        const std::size_t i0 = static_cast<std::size_t>(-l_min);
        std::vector<int> rexp{0, 1, 2};
        std::vector<double> tails;
        const auto& K0 = set.K_scaled[std::min(i0, set.K_scaled.size() - 1)];
        for (int e : rexp) {
            const double thr = tail_R * std::ldexp(1.0, e);
            double t = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (radius[i] > thr) t += std::abs(K0[i]) * qw[i];
            tails.push_back(t);
        }
        set.tail_R_slope = log2_slope(rexp, tails);
    }
    // Chebyshev domination: the mass of K_l beyond R never exceeds R^{-beta}
    // times its ||x||^beta-weighted mass. Holds pointwise on the grid, so the
    // certified inequality is exact; the attained envelope constant (minimal
    // C with tail <= C 2^{-l beta} R^{-beta}) is recorded alongside.
    double env = 0.0;
    bool cheb = true;
    const double rb = std::pow(tail_R, -beta);
    for (std::size_t i = 0; i < set.ells.size(); ++i) {
        const double sc = std::pow(2.0, -static_cast<double>(set.ells[i]) * beta);
        cheb = cheb && set.k_tail[i] <= rb * set.k_weighted[i] * (1.0 + 1e-12) &&
               set.l_tail[i] <= rb * set.l_weighted[i] * (1.0 + 1e-12);
        env = std::max(env, set.k_tail[i] / (sc * rb));
    }
    set.tail_envelope_constant = env;

    const double m2 = 2.0 * M;
    set.spectral_tol = spectral_tol;
    set.spectral_pass = spectral_ok;
    set.tail_chebyshev_pass = cheb;
    set.pass = spectral_ok && cheb &&
               set.slope_k_weighted <= -0.85 * beta &&
               set.slope_l_l1 <= 1.15 * m2 &&
               set.slope_l_weighted <= (m2 - beta) + 0.15 * std::abs(m2 - beta);
    return set;
}

GridFunction apply_multiplier(const TransformPlan& plan, const SymbolSpec& sym,
                              const GridFunction& f) {
    const auto& grid = plan.grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(sym.m(grid.node(i))) > sym.supnorm * (1.0 + 1e-10))
            throw std::runtime_error("apply_multiplier: symbol exceeds its sup-norm");
    }
    GridFunction out = multiply_symbol(plan, f, sym.m);
    const double nf = lp_norm(grid, f, 2.0);
    if (lp_norm(grid, out, 2.0) > sym.supnorm * nf * (1.0 + 1e-6))
        throw std::runtime_error("apply_multiplier: L2 bound violated");
    return out;
}

double default_delta(double hom_dim, double p, double s) {
    const double lo = hom_dim / p - hom_dim;
    const double hi = s - hom_dim;
    if (!(hi > lo))
        throw std::invalid_argument("default_delta: need s > hom/p");
    return 0.5 * (lo + hi);
}

TheoremReport theorem_harness(const TransformPlan& plan, const SymbolSpec& sym,
                              double p, double s,
                              const std::vector<AtomSpec>& atoms,
                              BallVolumeCache& volumes, double delta,
                              double constant_budget, double ratio_budget) {
    const double hom = plan.config().homogeneous_dimension();
    TheoremReport rep;
    rep.p = p;
    rep.s = s;
    rep.exploratory = !(s > hom / p);
    if (delta <= 0.0) delta = default_delta(hom, p, s);
    if (!rep.exploratory && !(hom / p < hom + delta && hom + delta < s))
        throw std::invalid_argument("theorem_harness: need hom/p < hom+delta < s");
    rep.delta = delta;
    rep.epsilon = 0.5 * (delta - hom * (1.0 / p - 1.0));
    if (!(rep.epsilon > 0.0))
        throw std::invalid_argument("theorem_harness: epsilon <= 0 for this (p, delta)");

    const auto hrep = hormander_norm(sym, s, 6, plan.config().dim);
    if (!hrep.resolved)
        throw std::runtime_error("theorem_harness: Hörmander norm UNRESOLVED");
    rep.M0 = hrep.M0;

    bool all_pass = true;
    for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
        const auto& a = atoms[ai];
        if (a.M % 2 != 0)
            throw std::invalid_argument("theorem_harness: atoms must have even order 2M");
        const int M = a.M / 2;
        rep.M = M;
        if (!(static_cast<double>(M) > hom * (2.0 - p) / (4.0 * p)) ||
            !(2.0 * M > hom / 2.0 + delta))
            throw std::invalid_argument("theorem_harness: M out of the proof's range");

        GridFunction Ta = apply_multiplier(plan, sym, a.a);
        // b' = T_m(Delta_k^M b), spectrally; then T_m a = Delta_k^M b'.
        GridFunction bhat = forward_transform(plan, a.b);
        for (std::size_t i = 0; i < bhat.size(); ++i) {
            const auto node = plan.grid.node(i);
            double n2 = 0.0;
            for (double v : node) n2 += v * v;
            bhat[i] *= sym.m(node) * std::pow(-n2, M);
        }
        GridFunction bprime = inverse_transform(plan, bhat);

        GridFunction mol = Ta, bs = bprime;
        for (auto& v : mol) v /= rep.M0;
        for (auto& v : bs) v /= rep.M0;
        const auto cert = verify_molecule(plan, mol, bs, a.ball, M, p, rep.epsilon,
                                          LadderMethod::spectral);
        TheoremCase tc;
        tc.atom_index = ai;
        tc.truncated = cert.truncated;
        const double cell_c = 1.0 - cert.worst_margin;
        const double glob_c = 1.0 - cert.global_margin;
        tc.molecule_constant = std::max(cell_c, glob_c > 0.0 ? std::sqrt(glob_c) : 0.0);
        tc.hp_ratio = hp_quasinorm(plan, Ta, p, volumes) / rep.M0;
        tc.pass = (constant_budget <= 0.0 || tc.molecule_constant <= constant_budget) &&
                  (ratio_budget <= 0.0 || tc.hp_ratio <= ratio_budget);
        all_pass = all_pass && tc.pass;
        rep.max_molecule_constant = std::max(rep.max_molecule_constant, tc.molecule_constant);
        rep.max_hp_ratio = std::max(rep.max_hp_ratio, tc.hp_ratio);
        rep.cases.push_back(tc);
    }
    rep.pass = all_pass;
    return rep;
}

} // namespace dunkl
