#include "dunkl/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace dunkl {

namespace {

constexpr char kGridMagic[16] = "DUNKLGRID\0v1\0\0\0";
constexpr char kPlanMagic[16] = "DUNKLPLAN\0v1\0\0\0";
constexpr char kFieldMagic[16] = "DUNKLHSF\0v1\0\0\0\0";

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void magic(const char (&m)[16]) { out_.write(m, 16); }
    void u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), 8); }
    void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), 8); }
    void f64s(const std::vector<double>& v) {
        u64(v.size());
        out_.write(reinterpret_cast<const char*>(v.data()),
                   static_cast<std::streamsize>(v.size() * 8));
    }
    void c128s(const std::vector<std::complex<double>>& v) {
        u64(v.size());
        out_.write(reinterpret_cast<const char*>(v.data()),
                   static_cast<std::streamsize>(v.size() * 16));
    }
    void done() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for reading: " + path);
    }
    void magic(const char (&m)[16]) {
        char buf[16];
        in_.read(buf, 16);
        if (!in_ || std::memcmp(buf, m, 16) != 0)
            throw std::runtime_error("bad or mismatched file header");
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        in_.read(reinterpret_cast<char*>(&v), 8);
        check();
        return v;
    }
    double f64() {
        double v = 0;
        in_.read(reinterpret_cast<char*>(&v), 8);
        check();
        return v;
    }
    std::vector<double> f64s() {
        std::vector<double> v(u64());
        in_.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * 8));
        check();
        return v;
    }
    std::vector<std::complex<double>> c128s() {
        std::vector<std::complex<double>> v(u64());
        in_.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * 16));
        check();
        return v;
    }

private:
    void check() {
        if (!in_) throw std::runtime_error("truncated file");
    }
    std::ifstream in_;
};

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

} // namespace

std::uint64_t grid_hash(const WeightedGrid& grid) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const std::uint64_t dim = static_cast<std::uint64_t>(grid.dim());
    hash_bytes(h, &dim, 8);
    for (const auto& ax : grid.axes) {
        hash_bytes(h, &ax.multiplicity, 8);
        hash_bytes(h, &ax.extent, 8);
        hash_bytes(h, ax.nodes.data(), ax.nodes.size() * 8);
        hash_bytes(h, ax.quad_weights.data(), ax.quad_weights.size() * 8);
    }
    return h;
}

void save_grid(const WeightedGrid& grid, const std::string& path) {
    Writer w(path);
    w.magic(kGridMagic);
    w.u64(static_cast<std::uint64_t>(grid.dim()));
    for (const auto& ax : grid.axes) {
        w.f64(ax.multiplicity);
        w.f64(ax.extent);
        w.f64s(ax.nodes);
        w.f64s(ax.quad_weights);
    }
    w.done();
}

WeightedGrid load_grid(const std::string& path) {
    Reader r(path);
    r.magic(kGridMagic);
    const auto dim = static_cast<int>(r.u64());
    std::vector<double> mults;
    std::vector<AxisGrid> axes;
    for (int d = 0; d < dim; ++d) {
        AxisGrid ax;
        ax.multiplicity = r.f64();
        ax.extent = r.f64();
        ax.nodes = r.f64s();
        ax.quad_weights = r.f64s();
        mults.push_back(ax.multiplicity);
        axes.push_back(std::move(ax));
    }
    WeightedGrid grid;
    grid.config = build_root_system(dim, mults);
    grid.axes = std::move(axes);
    return grid;
}

void save_plan(const TransformPlan& plan, const std::string& path) {
    Writer w(path);
    w.magic(kPlanMagic);
    w.u64(grid_hash(plan.grid));
    w.f64(plan.ck);
    w.u64(plan.kernels.size());
    for (const auto& kernel : plan.kernels) w.c128s(kernel);
    w.done();
}

TransformPlan load_plan(const std::string& path, const WeightedGrid& grid) {
    Reader r(path);
    r.magic(kPlanMagic);
    if (r.u64() != grid_hash(grid))
        throw std::runtime_error("plan cache does not match this grid");
    TransformPlan plan;
    plan.grid = grid;
    plan.ck = r.f64();
    const auto naxes = r.u64();
    for (std::uint64_t j = 0; j < naxes; ++j) plan.kernels.push_back(r.c128s());
    return plan;
}

TransformPlan cached_plan(const WeightedGrid& grid, const std::string& cache_dir,
                          bool parallel) {
    if (cache_dir.empty()) return build_plan(grid, parallel);
    char name[64];
    std::snprintf(name, sizeof name, "plan-%016llx.dunklplan",
                  static_cast<unsigned long long>(grid_hash(grid)));
    const std::string path = cache_dir + "/" + name;
    try {
        auto plan = load_plan(path, grid);
        plan.parallel = parallel;
        return plan;
    } catch (const std::runtime_error&) {
        auto plan = build_plan(grid, parallel);
        save_plan(plan, path);
        return plan;
    }
}

void save_field(const HalfSpaceField& field, const std::string& path) {
    Writer w(path);
    w.magic(kFieldMagic);
    w.f64s(field.t_grid);
    w.u64(field.values.size());
    for (const auto& v : field.values) w.c128s(v);
    w.done();
}

HalfSpaceField load_field(const std::string& path) {
    Reader r(path);
    r.magic(kFieldMagic);
    HalfSpaceField field;
    field.t_grid = r.f64s();
    const auto levels = r.u64();
    for (std::uint64_t l = 0; l < levels; ++l) field.values.push_back(r.c128s());
    return field;
}

void export_tent_decomposition(const WeightedGrid& grid,
                               const std::vector<double>& t_grid,
                               const TentDecomposition& dec, double p,
                               BallVolumeCache& volumes, const std::string& path) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < dec.atoms.size(); ++i) {
        const auto& atom = dec.atoms[i];
        const auto cert = verify_tent_atom(grid, t_grid, atom, p, volumes);
        nlohmann::json rec;
        rec["ball"] = {{"center", atom.ball.center}, {"radius", atom.ball.radius}};
        rec["lambda"] = dec.lambdas[i];
        rec["l2"] = std::sqrt(atom.square_integral);
        rec["margins"] = {{"support", cert.support_margin},
                          {"size", cert.size_margin}};
        out.push_back(std::move(rec));
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << out.dump(2) << '\n';
}

SymbolSpec load_table_symbol(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open symbol table: " + path);
    nlohmann::json j;
    f >> j;
    auto xi = j.at("xi").get<std::vector<double>>();
    auto re = j.at("re").get<std::vector<double>>();
    auto im = j.value("im", std::vector<double>(xi.size(), 0.0));
    if (xi.size() < 2 || re.size() != xi.size() || im.size() != xi.size())
        throw std::runtime_error("symbol table needs matching xi/re/im columns");
    for (std::size_t i = 1; i < xi.size(); ++i)
        if (!(xi[i] > xi[i - 1]))
            throw std::runtime_error("symbol table xi column must ascend");

    double sup = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i)
        sup = std::max(sup, std::hypot(re[i], im[i]));

    SymbolSpec spec;
    spec.label = "table:" + path;
    spec.supnorm = sup;
    spec.m = [xi = std::move(xi), re = std::move(re),
              im = std::move(im)](std::span<const double> arg) {
        double u = 0.0;
        for (double v : arg) u += v * v;
        u = std::sqrt(u);
        if (u <= xi.front()) return std::complex<double>(re.front(), im.front());
        if (u >= xi.back()) return std::complex<double>(re.back(), im.back());
        const auto it = std::upper_bound(xi.begin(), xi.end(), u);
        const std::size_t hi = static_cast<std::size_t>(it - xi.begin());
        const double w = (u - xi[hi - 1]) / (xi[hi] - xi[hi - 1]);
        return std::complex<double>(re[hi - 1] + w * (re[hi] - re[hi - 1]),
                                    im[hi - 1] + w * (im[hi] - im[hi - 1]));
    };
    return spec;
}

SymbolSpec resolve_symbol(const std::string& label) {
    if (label.rfind("table:", 0) == 0) return load_table_symbol(label.substr(6));
    return builtin_symbol(label);
}

} // namespace dunkl
