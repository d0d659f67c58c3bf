#include "dunkl/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dunkl/special.hpp"

namespace dunkl {

// ------------------------------------------------------------------- t-grid

std::vector<double> make_t_grid(double t_min, double t_max, double rho) {
    if (t_min <= 0.0 || rho <= 1.0 || t_max < t_min)
        throw std::invalid_argument("make_t_grid: need 0 < t_min <= t_max, rho > 1");
    std::vector<double> ts;
    for (double t = t_min; t <= t_max * (1.0 + 1e-12); t *= rho) ts.push_back(t);
    return ts;
}

std::vector<double> log_trapezoid_weights(const std::vector<double>& t_grid) {
    const int J = static_cast<int>(t_grid.size());
    std::vector<double> w(J, 0.0);
    if (J == 1) {
        w[0] = 1.0;
        return w;
    }
    for (int j = 0; j < J; ++j) {
        const double lo = j == 0 ? std::log(t_grid[0]) : std::log(t_grid[j - 1]);
        const double hi = j == J - 1 ? std::log(t_grid[J - 1]) : std::log(t_grid[j + 1]);
        w[j] = (hi - lo) / 2.0;
    }
    return w;
}

// ------------------------------------------------------------------ q field

HalfSpaceField q_field(const TransformPlan& plan, const GridFunction& f,
                       const std::vector<double>& t_grid) {
    HalfSpaceField field;
    field.t_grid = t_grid;
    const auto fhat = forward_transform(plan, f);
    // Precompute ||xi||^2 once per node.
    std::vector<double> n2(plan.grid.size());
    for (std::size_t i = 0; i < n2.size(); ++i) {
        const auto xi = plan.grid.node(i);
        double s = 0.0;
        for (double v : xi) s += v * v;
        n2[i] = s;
    }
    for (double t : t_grid) {
        GridFunction ghat(fhat.size());
        const double t2 = t * t;
        for (std::size_t i = 0; i < fhat.size(); ++i)
            ghat[i] = -t2 * n2[i] * std::exp(-t2 * n2[i]) * fhat[i];
        field.values.push_back(inverse_transform(plan, ghat));
    }
    return field;
}

double t2_norm_sq(const WeightedGrid& grid, const HalfSpaceField& field) {
    const auto wts = log_trapezoid_weights(field.t_grid);
    double total = 0.0;
    for (int j = 0; j < field.levels(); ++j) {
        double level = 0.0;
        const auto& F = field.values[j];
        for (std::size_t i = 0; i < F.size(); ++i)
            level += std::norm(F[i]) * grid.quad_weight(i);
        total += wts[j] * level;
    }
    return total;
}

// --------------------------------------------------------- conic functional

namespace {

// Local cell size at a node: the largest half-gap to its axis neighbours.
double cell_size(const WeightedGrid& grid, const std::vector<int>& multi) {
    double c = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
        const auto& nd = grid.axes[a].nodes;
        const int i = multi[a];
        const double lo = i > 0 ? nd[i] - nd[i - 1] : nd[i + 1] - nd[i];
        const double hi = i + 1 < static_cast<int>(nd.size()) ? nd[i + 1] - nd[i] : lo;
        c = std::max(c, std::max(lo, hi) / 2.0);
    }
    return c;
}

// Iterate all grid nodes within the axis-aligned box |y_a - x_a| < t,
// invoking fn(flat_index, node).
template <typename Fn>
void for_nodes_in_box(const WeightedGrid& grid, std::span<const double> x, double t,
                      Fn&& fn) {
    const int N = grid.dim();
    std::vector<int> lo(N), hi(N), idx(N);
    for (int a = 0; a < N; ++a) {
        const auto& nd = grid.axes[a].nodes;
        lo[a] = static_cast<int>(std::lower_bound(nd.begin(), nd.end(), x[a] - t) -
                                 nd.begin());
        hi[a] = static_cast<int>(std::upper_bound(nd.begin(), nd.end(), x[a] + t) -
                                 nd.begin());
        if (lo[a] >= hi[a]) return;
        idx[a] = lo[a];
    }
    std::vector<double> y(N);
    while (true) {
        for (int a = 0; a < N; ++a) y[a] = grid.axes[a].nodes[idx[a]];
        fn(grid.flatten(idx), y, idx);
        int a = N - 1;
        while (a >= 0 && ++idx[a] >= hi[a]) {
            idx[a] = lo[a];
            --a;
        }
        if (a < 0) break;
    }
}

} // namespace

GridFunction conic_functional(const WeightedGrid& grid, const HalfSpaceField& field,
                              BallVolumeCache& volumes, bool parallel) {
    const auto wts = log_trapezoid_weights(field.t_grid);
    const int J = field.levels();
    const std::size_t n = grid.size();

    // Ball volumes are memoized serially up-front so the parallel loop only
    // reads the cache (and the result is independent of thread count).
    std::vector<std::vector<double>> vol(n, std::vector<double>(J));
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = grid.node(i);
        for (int j = 0; j < J; ++j) vol[i][j] = volumes(x, field.t_grid[j]);
    }

    // Pad the bounding box enough to catch every half-weighted boundary cell.
    double max_half_cell = 0.0;
    for (const auto& ax : grid.axes)
        for (std::size_t i = 1; i < ax.nodes.size(); ++i)
            max_half_cell = std::max(max_half_cell, (ax.nodes[i] - ax.nodes[i - 1]) / 2.0);

    GridFunction out(n);
    const auto body = [&](std::size_t i) {
        const auto x = grid.node(i);
        double acc = 0.0;
        for (int j = 0; j < J; ++j) {
            const double t = field.t_grid[j];
            const auto& F = field.values[j];
            double slice = 0.0;
            for_nodes_in_box(
                grid, x, t + max_half_cell,
                [&](std::size_t flat, const std::vector<double>& y,
                    const std::vector<int>& multi) {
                    double d2 = 0.0;
                    for (int a = 0; a < grid.dim(); ++a)
                        d2 += (y[a] - x[a]) * (y[a] - x[a]);
                    const double d = std::sqrt(d2);
                    const double half_cell = cell_size(grid, multi) / 2.0;
                    double wgt;
                    if (d < t - half_cell)
                        wgt = 1.0;
                    else if (d < t + half_cell)
                        wgt = 0.5;
                    else
                        return;
                    slice += wgt * std::norm(F[flat]) * grid.quad_weight(flat);
                });
            acc += wts[j] * slice / vol[i][j];
        }
        out[i] = std::sqrt(acc);
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) body(i);
    }
    return out;
}

GridFunction square_function(const TransformPlan& plan, const GridFunction& f,
                             BallVolumeCache& volumes,
                             const std::vector<double>& t_grid) {
    return conic_functional(plan.grid, q_field(plan, f, t_grid), volumes,
                            plan.parallel);
}

double hp_quasinorm(const TransformPlan& plan, const GridFunction& f, double p,
                    BallVolumeCache& volumes, const std::vector<double>& t_grid) {
    if (p <= 0.0 || p > 1.0)
        throw std::invalid_argument("hp_quasinorm: need 0 < p <= 1");
    return lp_norm(plan.grid, square_function(plan, f, volumes, t_grid), p);
}

// ------------------------------------------------------------ Calderon pair

static double interp_profile(const std::vector<double>& us,
                             const std::vector<double>& gs, double u) {
    u = std::abs(u);
    if (us.empty() || u >= us.back()) return 0.0;
    const auto it = std::upper_bound(us.begin(), us.end(), u);
    std::size_t hi = static_cast<std::size_t>(it - us.begin());
    if (hi == 0) return gs.front();
    // 4-point Lagrange interpolation on the geometric table.
    if (hi < 2) hi = 2;
    if (hi > us.size() - 2) hi = us.size() - 2;
    const std::size_t s = hi - 2;
    double val = 0.0;
    for (int a = 0; a < 4; ++a) {
        double term = gs[s + static_cast<std::size_t>(a)];
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            term *= (u - us[s + static_cast<std::size_t>(b)]) /
                    (us[s + static_cast<std::size_t>(a)] -
                     us[s + static_cast<std::size_t>(b)]);
        }
        val += term;
    }
    return val;
}

double CalderonPair::fourier_phi(double u) const {
    return interp_profile(profile_u, profile_g, u);
}

double CalderonPair::fourier_psi(double u) const {
    return interp_profile(profile_u, profile_gpsi, u);
}

CalderonPair build_calderon_pair(const TransformPlan& plan, int M) {
    if (M < 1) throw std::invalid_argument("build_calderon_pair: M < 1");
    const auto& grid = plan.grid;
    CalderonPair pair;
    pair.M = M;

    GridFunction psi(grid.size(), 0.0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const auto x = grid.node(i);
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        if (n2 < 1.0) psi[i] = std::exp(-1.0 / (1.0 - n2));
    }
    // The grid copy of phi is the band-limited spectral projection of
    // Δ_k^M psi (the grid's frequency extent cannot carry the full phi).
    GridFunction phi = laplacian_power(plan, psi, M);

    // Dense radial profile of F phi = (-||xi||^2)^M F psi. The transform of
    // the radial psi reduces to a 1-D Hankel integral of order N/2 - 1 (N the
    // homogeneous dimension), which adaptive quadrature evaluates accurately
    // at every u — including far beyond the grid's resolvable frequencies,
    // where direct grid quadrature would return noise amplified by u^{2M}.
    // The overall constant is calibrated against the grid transform at a
    // moderate frequency. The geometric u-grid resolves the u^{2M} vanishing
    // at 0 and the slowly decaying bump tail at large u.
    const double hom = grid.config.homogeneous_dimension();
    const double nu = hom / 2.0 - 1.0;
    const auto hankel = [&](double u) {
        return integrate_adaptive(
            [&](double s) {
                return std::exp(-1.0 / (1.0 - s * s)) *
                       bessel_j_normalized(nu, s * u) * std::pow(s, hom - 1.0);
            },
            0.0, 1.0 - 1e-14);
    };
    std::vector<double> cal(grid.dim(), 0.0);
    cal[0] = 2.0;
    const double amp = transform_at(plan, psi, cal).real() / hankel(2.0);

    // Table layout: geometric near 0 (resolves the u^{2M} vanishing),
    // uniform beyond (F psi oscillates with unit frequency; interpolation
    // and the c_phi trapezoid need fixed sample density per period).
    std::vector<double> us{0.0};
    for (double u = 1e-3; u < 5.0; u *= 1.01) us.push_back(u);
    for (double u = 5.0; u <= 150.0 + 1e-9; u += 0.05) us.push_back(u);
    std::vector<double> gs(us.size(), 0.0);
    std::vector<double> gpsis(us.size(), 0.0);
    gpsis[0] = amp * hankel(0.0);
#pragma omp parallel for schedule(static) if (plan.parallel)
    for (long long q = 1; q < static_cast<long long>(us.size()); ++q) {
        const double u = us[static_cast<std::size_t>(q)];
        const double fpsi = amp * hankel(u);
        gpsis[static_cast<std::size_t>(q)] = fpsi;
        gs[static_cast<std::size_t>(q)] = std::pow(-u * u, M) * fpsi;
    }

    const double ck2 = plan.ck * plan.ck;
    // Normalization integral c_k^2 ∫ g(u)^2 u^2 e^{-u^2} du/u (trapezoid).
    double I = 0.0, cphi = 0.0;
    for (std::size_t q = 1; q + 1 < us.size(); ++q) {
        const double du = (us[q + 1] - us[q - 1]) / 2.0;
        const double g2u = gs[q] * gs[q] / us[q];
        I += ck2 * g2u * us[q] * us[q] * std::exp(-us[q] * us[q]) * du;
        cphi += ck2 * g2u * du;
    }
    if (I < 1e-12)
        throw std::runtime_error("build_calderon_pair: degenerate normalization");

    const double scale = 1.0 / std::sqrt(I);
    for (auto& v : psi) v *= scale;
    for (auto& v : phi) v *= scale;
    for (auto& g : gs) g *= scale;
    for (auto& g : gpsis) g *= scale;
    pair.psi = std::move(psi);
    pair.phi = std::move(phi);
    pair.psi_scale = scale;
    pair.c_phi = cphi * scale * scale;
    pair.profile_u = std::move(us);
    pair.profile_g = std::move(gs);
    pair.profile_gpsi = std::move(gpsis);
    return pair;
}

ReproResult reproduce(const TransformPlan& plan, const CalderonPair& pair,
                      const GridFunction& f, ReproRoute route,
                      const std::vector<double>& t_grid) {
    const auto wts = log_trapezoid_weights(t_grid);
    const double ck2 = plan.ck * plan.ck;
    const auto symbol = [&](std::span<const double> xi) {
        double n2 = 0.0;
        for (double v : xi) n2 += v * v;
        const double r = std::sqrt(n2);
        double acc = 0.0;
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
            const double g = pair.fourier_phi(t_grid[j] * r);
            if (route == ReproRoute::heat) {
                const double u2 = t_grid[j] * t_grid[j] * n2;
                acc += wts[j] * ck2 * g * g * u2 * std::exp(-u2);
            } else {
                acc += wts[j] * ck2 * g * g;
            }
        }
        if (route == ReproRoute::self) acc /= pair.c_phi;
        return std::complex<double>{acc, 0.0};
    };
    ReproResult res;
    res.reconstruction = multiply_symbol(plan, f, symbol);
    const double fn = lp_norm(plan.grid, f, 2.0);
    if (fn == 0.0) return res;
    GridFunction d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) d[i] = res.reconstruction[i] - f[i];
    res.rel_l2_error = lp_norm(plan.grid, d, 2.0) / fn;
    if (res.rel_l2_error > 0.1)
        throw std::runtime_error("reproduce: t-range too narrow (error > 0.1)");
    return res;
}

// -------------------------------------------------------- tent decomposition

namespace {

struct SampleRef {
    int t_index;
    std::size_t node_index;
};

// Minimal ball whose tent contains all (t, y) samples: per-axis midpoint of
// [min(y_a - t), max(y_a + t)], radius max ||y - c|| + t.
Ball minimal_tent_ball(const WeightedGrid& grid, const std::vector<double>& t_grid,
                       const std::vector<SampleRef>& samples) {
    const int N = grid.dim();
    std::vector<double> lo(N, 1e300), hi(N, -1e300);
    for (const auto& s : samples) {
        const auto y = grid.node(s.node_index);
        const double t = t_grid[static_cast<std::size_t>(s.t_index)];
        for (int a = 0; a < N; ++a) {
            lo[a] = std::min(lo[a], y[a] - t);
            hi[a] = std::max(hi[a], y[a] + t);
        }
    }
    Ball b;
    b.center.resize(N);
    for (int a = 0; a < N; ++a) b.center[a] = (lo[a] + hi[a]) / 2.0;
    double r = 0.0;
    for (const auto& s : samples) {
        const auto y = grid.node(s.node_index);
        double d2 = 0.0;
        for (int a = 0; a < N; ++a) d2 += (y[a] - b.center[a]) * (y[a] - b.center[a]);
        r = std::max(r, std::sqrt(d2) + t_grid[static_cast<std::size_t>(s.t_index)]);
    }
    b.radius = r * (1.0 + 1e-12) + 1e-300;
    return b;
}

// Maximal dyadic cubes of {nodes in omega}: returns a label per node
// (-1 outside omega), labels shared within one maximal cube.
std::vector<int> whitney_labels(const WeightedGrid& grid,
                                const std::vector<char>& in_omega) {
    const int N = grid.dim();
    const double L = grid.axes[0].extent;
    std::vector<int> label(grid.size(), -1);
    int next = 0;

    struct Cube {
        std::vector<double> lo, hi;
    };
    std::vector<Cube> stack{{std::vector<double>(N, -L), std::vector<double>(N, L)}};
    std::vector<int> ilo(N), ihi(N), idx(N);
    while (!stack.empty()) {
        const Cube c = stack.back();
        stack.pop_back();
        bool any_node = false, all_in = true, any_in = false;
        for (int a = 0; a < N; ++a) {
            const auto& nd = grid.axes[a].nodes;
            ilo[a] = static_cast<int>(std::lower_bound(nd.begin(), nd.end(), c.lo[a]) -
                                      nd.begin());
            ihi[a] = static_cast<int>(std::lower_bound(nd.begin(), nd.end(), c.hi[a]) -
                                      nd.begin());
        }
        // Scan the nodes inside the cube.
        std::vector<std::size_t> members;
        idx = ilo;
        bool nonempty = true;
        for (int a = 0; a < N; ++a)
            if (ilo[a] >= ihi[a]) nonempty = false;
        if (nonempty)
            while (true) {
                const std::size_t flat = grid.flatten(idx);
                any_node = true;
                if (in_omega[flat]) {
                    any_in = true;
                    members.push_back(flat);
                } else {
                    all_in = false;
                }
                int a = N - 1;
                while (a >= 0 && ++idx[a] >= ihi[a]) {
                    idx[a] = ilo[a];
                    --a;
                }
                if (a < 0) break;
            }
        if (!any_node || !any_in) continue;
        if (all_in || c.hi[0] - c.lo[0] < 1e-9) {
            for (std::size_t m : members) label[m] = next;
            ++next;
            continue;
        }
        // Split into 2^N children.
        for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
            Cube child = c;
            for (int a = 0; a < N; ++a) {
                const double mid = (c.lo[a] + c.hi[a]) / 2.0;
                if (mask & (1u << a))
                    child.lo[a] = mid;
                else
                    child.hi[a] = mid;
            }
            stack.push_back(std::move(child));
        }
    }
    return label;
}

} // namespace

TentDecomposition tent_decompose(const WeightedGrid& grid, const HalfSpaceField& field,
                                 double p, BallVolumeCache& volumes, bool parallel) {
    if (p <= 0.0 || p > 1.0)
        throw std::invalid_argument("tent_decompose: need 0 < p <= 1");
    const auto wts = log_trapezoid_weights(field.t_grid);
    const int J = field.levels();

    TentDecomposition dec;

    std::vector<SampleRef> all;
    for (int j = 0; j < J; ++j)
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (field.values[j][i] != std::complex<double>{0.0, 0.0})
                all.push_back({j, i});
    if (all.empty()) return dec;

    const auto AF = conic_functional(grid, field, volumes, parallel);
    GridFunction af_abs(AF.size());
    for (std::size_t i = 0; i < AF.size(); ++i) af_abs[i] = AF[i];
    dec.tp_norm = lp_norm(grid, af_abs, p);

    const auto emit = [&](const std::vector<SampleRef>& samples, const Ball& ball) {
        if (samples.empty()) return;
        double S = 0.0;
        for (const auto& s : samples)
            S += wts[static_cast<std::size_t>(s.t_index)] *
                 std::norm(field.values[s.t_index][s.node_index]) *
                 grid.quad_weight(s.node_index);
        if (S == 0.0) return;
        const double wB = volumes(ball.center, ball.radius);
        const double lambda = std::sqrt(S) * std::pow(wB, 1.0 / p - 0.5);
        TentAtom atom;
        atom.ball = ball;
        atom.square_integral = S / (lambda * lambda);
        for (const auto& s : samples)
            atom.samples.push_back(
                {s.t_index, s.node_index,
                 field.values[s.t_index][s.node_index] / lambda});
        dec.lambdas.push_back(lambda);
        dec.atoms.push_back(std::move(atom));
    };

    // Fast path: the whole field already fits one tent within the size bound.
    {
        const Ball b = minimal_tent_ball(grid, field.t_grid, all);
        const double S = t2_norm_sq(grid, field);
        const double wB = volumes(b.center, b.radius);
        if (S <= std::pow(wB, 1.0 - 2.0 / p) * (1.0 + 1e-6)) {
            emit(all, b);
            for (double l : dec.lambdas) dec.sum_lambda_p += std::pow(l, p);
            return dec;
        }
    }

    // Stopping-time construction over thresholds 2^i.
    double af_max = 0.0, af_min_pos = 1e300;
    for (const auto& v : AF) {
        const double a = v.real();
        af_max = std::max(af_max, a);
        if (a > 0.0) af_min_pos = std::min(af_min_pos, a);
    }
    const int i_max = static_cast<int>(std::floor(std::log2(af_max)));
    const int i_min =
        std::max(static_cast<int>(std::floor(std::log2(af_min_pos))) - 1, i_max - 40);

    // d_i(y): distance from node y to the nearest node outside Omega_i
    // (infinite when Omega_i is everything). Level i sample assignment:
    // the largest i with t <= d_i(y).
    const int n_levels = i_max - i_min + 1;
    std::vector<std::vector<char>> in_omega(static_cast<std::size_t>(n_levels),
                                            std::vector<char>(grid.size(), 0));
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n_levels),
                                          std::vector<double>(grid.size(), 0.0));
    for (int li = 0; li < n_levels; ++li) {
        const double thr = std::ldexp(1.0, i_min + li);
        auto& om = in_omega[static_cast<std::size_t>(li)];
        std::vector<std::size_t> outside;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            om[i] = AF[i].real() > thr ? 1 : 0;
            if (!om[i]) outside.push_back(i);
        }
        auto& dl = dist[static_cast<std::size_t>(li)];
        const auto body = [&](std::size_t i) {
            if (!om[i]) {
                dl[i] = 0.0;
                return;
            }
            if (outside.empty()) {
                dl[i] = 1e300;
                return;
            }
            const auto x = grid.node(i);
            double best = 1e300;
            for (std::size_t o : outside) {
                const auto z = grid.node(o);
                double d2 = 0.0;
                for (int a = 0; a < grid.dim(); ++a)
                    d2 += (x[a] - z[a]) * (x[a] - z[a]);
                best = std::min(best, d2);
            }
            dl[i] = std::sqrt(best);
        };
        if (parallel) {
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(grid.size()); ++i)
                body(static_cast<std::size_t>(i));
        } else {
            for (std::size_t i = 0; i < grid.size(); ++i) body(i);
        }
    }

    // Assign every sample to its level (or the base bucket).
    std::vector<std::vector<SampleRef>> level_samples(
        static_cast<std::size_t>(n_levels));
    std::vector<SampleRef> base;
    for (const auto& s : all) {
        const double t = field.t_grid[static_cast<std::size_t>(s.t_index)];
        int li = n_levels - 1;
        while (li >= 0 && t > dist[static_cast<std::size_t>(li)][s.node_index]) --li;
        if (li < 0)
            base.push_back(s);
        else
            level_samples[static_cast<std::size_t>(li)].push_back(s);
    }

    // Within each level, group by the Whitney cube of Omega_i containing y.
    for (int li = 0; li < n_levels; ++li) {
        auto& ls = level_samples[static_cast<std::size_t>(li)];
        if (ls.empty()) continue;
        const auto labels = whitney_labels(grid, in_omega[static_cast<std::size_t>(li)]);
        std::map<int, std::vector<SampleRef>> groups;
        for (const auto& s : ls) groups[labels[s.node_index]].push_back(s);
        for (auto& kv : groups)
            emit(kv.second, minimal_tent_ball(grid, field.t_grid, kv.second));
    }
    if (!base.empty()) {
        Ball b = minimal_tent_ball(grid, field.t_grid, base);
        // Anchor the leftover bucket at the origin (a single global ball).
        double r = 0.0;
        for (const auto& s : base) {
            const auto y = grid.node(s.node_index);
            double n2 = 0.0;
            for (double v : y) n2 += v * v;
            r = std::max(r, std::sqrt(n2) +
                                field.t_grid[static_cast<std::size_t>(s.t_index)]);
        }
        b.center.assign(static_cast<std::size_t>(grid.dim()), 0.0);
        b.radius = r * (1.0 + 1e-12) + 1e-300;
        emit(base, b);
    }

    for (double l : dec.lambdas) dec.sum_lambda_p += std::pow(l, p);
    return dec;
}

TentAtomCertificate verify_tent_atom(const WeightedGrid& grid,
                                     const std::vector<double>& t_grid,
                                     const TentAtom& atom, double p,
                                     BallVolumeCache& volumes) {
    TentAtomCertificate cert;
    if (atom.samples.empty()) {
        cert.pass = true;
        cert.support_margin = 1e300;
        cert.size_margin = 1e300;
        return cert;
    }
    const auto wts = log_trapezoid_weights(t_grid);
    double S = 0.0;
    double support_margin = 1e300;
    for (const auto& s : atom.samples) {
        const auto y = grid.node(s.node_index);
        const double t = t_grid[static_cast<std::size_t>(s.t_index)];
        double d2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a)
            d2 += (y[a] - atom.ball.center[a]) * (y[a] - atom.ball.center[a]);
        const auto multi = grid.unflatten(s.node_index);
        const double slack = 2.0 * cell_size(grid, multi);
        support_margin = std::min(
            support_margin, atom.ball.radius - t + slack - std::sqrt(d2));
        S += wts[static_cast<std::size_t>(s.t_index)] * std::norm(s.value) *
             grid.quad_weight(s.node_index);
    }
    const double bound =
        std::pow(volumes(atom.ball.center, atom.ball.radius), 1.0 - 2.0 / p);
    cert.support_margin = support_margin;
    cert.size_margin = (bound - S) / bound;
    cert.pass = support_margin >= -1e-9 && cert.size_margin >= -1e-6;
    return cert;
}

} // namespace dunkl
