#include "dunkl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace dunkl {

// ---------------------------------------------------------------- root system

double RootSystemConfig::homogeneous_dimension() const {
    double sum = 0.0;
    for (double k : multiplicities) sum += 2.0 * k;
    return dim + sum;
}

double RootSystemConfig::weight_at(std::span<const double> x) const {
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
        const double k = multiplicities[j];
        if (k != 0.0) w *= std::pow(2.0 * x[j] * x[j], k);
    }
    return w;
}

std::vector<double> RootSystemConfig::reflect(std::uint32_t mask,
                                              std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    for (int j = 0; j < dim; ++j)
        if (mask & (1u << j)) out[j] = -out[j];
    return out;
}

RootSystemConfig build_root_system(int n_axes, std::vector<double> multiplicities) {
    if (n_axes <= 0 || static_cast<int>(multiplicities.size()) != n_axes)
        throw std::invalid_argument("build_root_system: bad dimension/multiplicity count");
    for (double k : multiplicities)
        if (k < 0.0) throw std::invalid_argument("build_root_system: negative multiplicity");

    RootSystemConfig cfg;
    cfg.dim = n_axes;
    cfg.multiplicities = std::move(multiplicities);
    const double s = std::sqrt(2.0);
    for (int j = 0; j < n_axes; ++j) {
        std::vector<double> plus(n_axes, 0.0), minus(n_axes, 0.0);
        plus[j] = s;
        minus[j] = -s;
        cfg.roots.push_back(std::move(plus));
        cfg.roots.push_back(std::move(minus));
    }
    for (std::uint32_t m = 0; m < (1u << n_axes); ++m) cfg.group.push_back(m);
    return cfg;
}

double orbit_distance(const RootSystemConfig& cfg, std::span<const double> x,
                      std::span<const double> y) {
    // Sign flips act independently per axis, so the minimum over the group
    // splits into per-axis minima.
    double d2 = 0.0;
    for (int j = 0; j < cfg.dim; ++j) {
        const double a = x[j] - y[j], b = x[j] + y[j];
        d2 += std::min(a * a, b * b);
    }
    return std::sqrt(d2);
}

bool orbit_contains(const RootSystemConfig& cfg, const Ball& ball,
                    std::span<const double> z) {
    return orbit_distance(cfg, ball.center, z) < ball.radius;
}

// ------------------------------------------------------------------ axis grid

AxisGrid build_axis_grid(double multiplicity, double extent, int resolution,
                         int points_per_panel, int refine_levels) {
    if (extent <= 0.0 || resolution < 4)
        throw std::invalid_argument("build_axis_grid: need extent > 0, resolution >= 4");

    const double h = 1.0 / resolution;
    std::vector<std::pair<double, double>> panels;  // on (0, extent]
    double lo = h / std::ldexp(1.0, refine_levels);
    panels.emplace_back(0.0, lo);
    for (int lvl = refine_levels; lvl >= 1; --lvl)
        panels.emplace_back(h / std::ldexp(1.0, lvl), h / std::ldexp(1.0, lvl - 1));
    for (double a = h; a < extent - 1e-12; a += h)
        panels.emplace_back(a, std::min(a + h, extent));

    gsl_integration_glfixed_table* table =
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(points_per_panel));

    std::vector<std::pair<double, double>> half;  // (node, lebesgue weight)
    for (const auto& [a, b] : panels)
        for (int i = 0; i < points_per_panel; ++i) {
            double xi, wi;
            gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &xi, &wi, table);
            half.emplace_back(xi, wi);
        }
    gsl_integration_glfixed_table_free(table);
    std::sort(half.begin(), half.end());

    AxisGrid grid;
    grid.multiplicity = multiplicity;
    grid.extent = extent;
    const int m = static_cast<int>(half.size());
    grid.nodes.resize(2 * m);
    grid.quad_weights.resize(2 * m);
    for (int i = 0; i < m; ++i) {
        const auto [x, wl] = half[i];
        const double wfac =
            multiplicity == 0.0 ? 1.0 : std::pow(2.0 * x * x, multiplicity);
        grid.nodes[m + i] = x;
        grid.quad_weights[m + i] = wl * wfac;
        grid.nodes[m - 1 - i] = -x;
        grid.quad_weights[m - 1 - i] = wl * wfac;
    }
    return grid;
}

// -------------------------------------------------------------- weighted grid

std::size_t WeightedGrid::size() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.size());
    return n;
}

std::vector<int> WeightedGrid::unflatten(std::size_t flat) const {
    std::vector<int> multi(axes.size());
    for (int j = dim() - 1; j >= 0; --j) {
        const auto n = static_cast<std::size_t>(axes[j].size());
        multi[j] = static_cast<int>(flat % n);
        flat /= n;
    }
    return multi;
}

std::size_t WeightedGrid::flatten(std::span<const int> multi) const {
    std::size_t flat = 0;
    for (int j = 0; j < dim(); ++j)
        flat = flat * static_cast<std::size_t>(axes[j].size()) +
               static_cast<std::size_t>(multi[j]);
    return flat;
}

std::vector<double> WeightedGrid::node(std::size_t flat) const {
    const auto multi = unflatten(flat);
    std::vector<double> x(axes.size());
    for (int j = 0; j < dim(); ++j) x[j] = axes[j].nodes[multi[j]];
    return x;
}

double WeightedGrid::quad_weight(std::size_t flat) const {
    const auto multi = unflatten(flat);
    double w = 1.0;
    for (int j = 0; j < dim(); ++j) w *= axes[j].quad_weights[multi[j]];
    return w;
}

std::size_t WeightedGrid::reflect_index(std::size_t flat, int axis) const {
    auto multi = unflatten(flat);
    multi[axis] = axes[axis].mirror_index(multi[axis]);
    return flatten(multi);
}

WeightedGrid build_grid(const RootSystemConfig& cfg, double extent, int resolution,
                        int points_per_panel, int refine_levels) {
    WeightedGrid grid;
    grid.config = cfg;
    for (int j = 0; j < cfg.dim; ++j)
        grid.axes.push_back(build_axis_grid(cfg.multiplicities[j], extent, resolution,
                                            points_per_panel, refine_levels));
    return grid;
}

// ---------------------------------------------------------- norms / integrals

double lp_norm(const WeightedGrid& grid, const GridFunction& f, double p) {
    if (f.size() != grid.size()) throw std::invalid_argument("lp_norm: size mismatch");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f) m = std::max(m, std::abs(v));
        return m;
    }
    if (p <= 0.0) throw std::invalid_argument("lp_norm: p must be positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(f[i]);
        if (a > 0.0) sum += std::pow(a, p) * grid.quad_weight(i);
    }
    return std::pow(sum, 1.0 / p);
}

std::complex<double> integrate(const WeightedGrid& grid, const GridFunction& f) {
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * grid.quad_weight(i);
    return sum;
}

std::complex<double> inner_product(const WeightedGrid& grid, const GridFunction& f,
                                   const GridFunction& g) {
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += f[i] * std::conj(g[i]) * grid.quad_weight(i);
    return sum;
}

// ------------------------------------------------------- adaptive integration

namespace {
double gsl_callback(double x, void* params) {
    return (*static_cast<const std::function<double(double)>*>(params))(x);
}
} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol) {
    gsl_set_error_handler_off();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4096);
    gsl_function F;
    F.function = &gsl_callback;
    F.params = const_cast<std::function<double(double)>*>(&f);
    double result = 0.0, abserr = 0.0;
    // QAGS handles the endpoint/hyperplane singularities of |x|^{2k} slices.
    const int status =
        gsl_integration_qags(&F, a, b, 1e-14, rel_tol, 4096, ws, &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS && status != GSL_EROUND && status != GSL_EMAXITER)
        throw std::runtime_error("integrate_adaptive: quadrature failure");
    return result;
}

// ---------------------------------------------------------------- ball volume

namespace {

// ∫_{c-r}^{c+r} 2^k |x|^{2k} dx in closed form.
double segment_weight_measure(double k, double c, double r) {
    auto G = [k](double x) {
        return std::copysign(std::pow(std::abs(x), 2.0 * k + 1.0), x) / (2.0 * k + 1.0);
    };
    return std::pow(2.0, k) * (G(c + r) - G(c - r));
}

double ball_volume_rec(const RootSystemConfig& cfg, std::span<const double> center,
                       double r, int axis, double rel_tol) {
    const double k = cfg.multiplicities[axis];
    if (axis == cfg.dim - 1) return segment_weight_measure(k, center[axis], r);
    const double c = center[axis];
    const std::function<double(double)> slice = [&](double x) {
        const double s2 = r * r - (x - c) * (x - c);
        if (s2 <= 0.0) return 0.0;
        const double wfac = k == 0.0 ? 1.0 : std::pow(2.0 * x * x, k);
        return wfac * ball_volume_rec(cfg, center, std::sqrt(s2), axis + 1,
                                      std::max(rel_tol * 10.0, 1e-10));
    };
    return integrate_adaptive(slice, c - r, c + r, rel_tol);
}

} // namespace

double ball_volume(const RootSystemConfig& cfg, const Ball& ball) {
    if (ball.radius <= 0.0) throw std::invalid_argument("ball_volume: radius <= 0");
    if (static_cast<int>(ball.center.size()) != cfg.dim)
        throw std::invalid_argument("ball_volume: center dimension mismatch");
    return ball_volume_rec(cfg, ball.center, ball.radius, 0, 1e-11);
}

double ball_volume_surrogate(const RootSystemConfig& cfg, const Ball& ball) {
    double v = std::pow(ball.radius, cfg.dim);
    const double s = std::sqrt(2.0);
    for (int j = 0; j < cfg.dim; ++j)
        v *= std::pow(s * std::abs(ball.center[j]) + ball.radius,
                      2.0 * cfg.multiplicities[j]);
    return v;
}

double BallVolumeCache::operator()(std::span<const double> center, double radius) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the raw bits
    auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (double c : center) mix(c);
    mix(radius);
    if (auto it = memo_.find(h); it != memo_.end()) return it->second;
    const double v =
        ball_volume(*cfg_, Ball{std::vector<double>(center.begin(), center.end()), radius});
    memo_.emplace(h, v);
    return v;
}

// ----------------------------------------------------------- differentiation

namespace {

// Fornberg (1988) finite-difference weights for the m-th derivative at x0
// on the given nodes; returns one weight per node.
std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s)
                    c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int s = mn; s >= 1; --s)
                c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

} // namespace

GridFunction axis_derivative(const WeightedGrid& grid, const GridFunction& f,
                             int axis, int order) {
    if (f.size() != grid.size())
        throw std::invalid_argument("axis_derivative: size mismatch");
    if (order == 0) return f;
    const auto& nodes = grid.axes[axis].nodes;
    const int n = static_cast<int>(nodes.size());
    const int ns = std::min(n, order + 5);  // 4th-order accurate stencil

    // Per-position stencil start and weights, shared across all lines.
    std::vector<int> start(n);
    std::vector<std::vector<double>> weights(n);
    for (int i = 0; i < n; ++i) {
        int s = std::clamp(i - ns / 2, 0, n - ns);
        start[i] = s;
        weights[i] = fd_weights(nodes[i], std::span(nodes).subspan(s, ns), order);
    }

    std::size_t stride = 1;
    for (int j = axis + 1; j < grid.dim(); ++j)
        stride *= static_cast<std::size_t>(grid.axes[j].size());
    const std::size_t n_lines = grid.size() / static_cast<std::size_t>(n);

    GridFunction out(f.size());
    for (std::size_t line = 0; line < n_lines; ++line) {
        // Base flat index of this line: split `line` into the parts before
        // and after the differentiated axis.
        const std::size_t outer = line / stride, inner = line % stride;
        const std::size_t base = outer * stride * static_cast<std::size_t>(n) + inner;
        for (int i = 0; i < n; ++i) {
            std::complex<double> acc = 0.0;
            const auto& w = weights[i];
            for (int q = 0; q < ns; ++q)
                acc += w[q] * f[base + static_cast<std::size_t>(start[i] + q) * stride];
            out[base + static_cast<std::size_t>(i) * stride] = acc;
        }
    }
    return out;
}

double schwartz_seminorm(const WeightedGrid& grid, const GridFunction& f, int n) {
    if (n < 0 || n > 4)
        throw std::invalid_argument("schwartz_seminorm: supported orders are 0..4");
    const int N = grid.dim();

    double sup = 0.0;
    auto account = [&](const GridFunction& g) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = grid.node(i);
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            const double fac = std::pow(1.0 + std::sqrt(r2), n);
            sup = std::max(sup, fac * std::abs(g[i]));
        }
    };

    // Enumerate multi-indices with |alpha| <= n, differentiating axis by axis.
    std::function<void(int, int, const GridFunction&)> walk =
        [&](int axis, int budget, const GridFunction& g) {
            if (axis == N) {
                account(g);
                return;
            }
            GridFunction cur = g;
            for (int ord = 0; ord <= budget; ++ord) {
                if (ord > 0) cur = axis_derivative(grid, g, axis, ord);
                walk(axis + 1, budget - ord, cur);
            }
        };
    walk(0, n, f);
    return sup;
}

} // namespace dunkl
