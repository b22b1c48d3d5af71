#pragma once

// Scalar functions on metric graphs (piecewise linear through uniform
// per-edge samples) and on the plane (uniform node grids), plus the
// analytic families every experiment draws from.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "graphs.hpp"
#include "parallel.hpp"

namespace tracelab {

struct EdgeFunction {
    GraphPtr graph;
    // samples[e][i] = f(e(i * L_e / N_e)), i = 0..N_e.
    std::vector<std::vector<double>> samples;
    bool continuous = false;

    std::size_t cells(std::size_t e) const { return samples[e].size() - 1; }
    double spacing(std::size_t e) const { return graph->edges[e].length / static_cast<double>(cells(e)); }

    /// Linear interpolation at arclength s along edge e.
    double at(std::size_t e, double s) const
    {
        const auto& v = samples[e];
        const double t = s / spacing(e);
        if (t <= 0.0) return v.front();
        const auto n = cells(e);
        if (t >= static_cast<double>(n)) return v.back();
        const auto i = static_cast<std::size_t>(t);
        const double frac = t - static_cast<double>(i);
        return frac == 0.0 ? v[i] : std::lerp(v[i], v[i + 1], frac);
    }

    /// Samples of one junction side, ordered away from the shared vertex.
    std::vector<double> from_vertex(const JunctionEnd& end) const
    {
        std::vector<double> v = samples[end.edge];
        if (!end.from_start) std::reverse(v.begin(), v.end());
        return v;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : samples)
            for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

/// Largest value jump across any junction; 0 for continuous functions.
inline double max_junction_jump(const EdgeFunction& f)
{
    double m = 0.0;
    for (const Junction& j : f.graph->junctions) {
        const double a = f.from_vertex(j.first).front();
        const double b = f.from_vertex(j.second).front();
        m = std::max(m, std::abs(a - b));
    }
    return m;
}

/// Values on the nodes (x0 + i h, y0 + j h), i < nx, j < ny; row-major in j.
struct PlaneField {
    double x0 = 0.0;
    double y0 = 0.0;
    double h = 1.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;

    PlaneField() = default;
    PlaneField(double x0_, double y0_, double h_, std::size_t nx_, std::size_t ny_)
        : x0(x0_), y0(y0_), h(h_), nx(nx_), ny(ny_), values(nx_ * ny_, 0.0)
    {
        require(h > 0.0, "plane grid spacing must be positive");
        require(nx >= 2 && ny >= 2, "plane grid needs at least 2 nodes per axis");
    }

    /// Square grid covering a window; the spacing must divide the window.
    static PlaneField over(const Window& w, double h)
    {
        const long long n = integral_ratio(2.0 * w.half_width / h);
        require(n >= 1, "grid spacing " + std::to_string(h) + " does not divide window width " +
                            std::to_string(2.0 * w.half_width));
        return PlaneField(w.xmin(), w.ymin(), h, static_cast<std::size_t>(n) + 1, static_cast<std::size_t>(n) + 1);
    }

    double x(std::size_t i) const { return x0 + static_cast<double>(i) * h; }
    double y(std::size_t j) const { return y0 + static_cast<double>(j) * h; }
    double xmax() const { return x(nx - 1); }
    double ymax() const { return y(ny - 1); }
    double& at(std::size_t i, std::size_t j) { return values[j * nx + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }

    bool inside(Point p, double tol = 1e-9) const
    {
        const double s = tol * h;
        return p.x >= x0 - s && p.x <= xmax() + s && p.y >= y0 - s && p.y <= ymax() + s;
    }

    /// Bilinear interpolation; exact node values when p sits on a node.
    double interpolate(Point p) const
    {
        auto locate = [this](double u, double origin, std::size_t n, std::size_t& i, double& t) {
            double s = (u - origin) / h;
            const double r = std::round(s);
            if (std::abs(s - r) < 1e-9) s = r;
            s = std::clamp(s, 0.0, static_cast<double>(n - 1));
            i = std::min(static_cast<std::size_t>(s), n - 2);
            t = s - static_cast<double>(i);
        };
        std::size_t i = 0, j = 0;
        double tx = 0.0, ty = 0.0;
        locate(p.x, x0, nx, i, tx);
        locate(p.y, y0, ny, j, ty);
        const double b = tx == 0.0 ? at(i, j) : (tx == 1.0 ? at(i + 1, j) : std::lerp(at(i, j), at(i + 1, j), tx));
        if (ty == 0.0) return b;
        const double t =
            tx == 0.0 ? at(i, j + 1) : (tx == 1.0 ? at(i + 1, j + 1) : std::lerp(at(i, j + 1), at(i + 1, j + 1), tx));
        return ty == 1.0 ? t : std::lerp(b, t, ty);
    }
};

enum class FamilyKind { constant, linear, gaussian, cauchy, radial_power, smooth_step, harmonic2d, custom };

inline std::string to_string(FamilyKind k)
{
    switch (k) {
        case FamilyKind::constant: return "constant";
        case FamilyKind::linear: return "linear";
        case FamilyKind::gaussian: return "gaussian";
        case FamilyKind::cauchy: return "cauchy";
        case FamilyKind::radial_power: return "radial-power";
        case FamilyKind::smooth_step: return "smooth-step";
        case FamilyKind::harmonic2d: return "harmonic2d";
        case FamilyKind::custom: return "custom";
    }
    return "unknown";
}

/// The smooth step: 0 for x <= 0, 1 for x >= 1, 3x^2 - 2x^3 between.
inline double smooth_step(double x)
{
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

/// Analytic function of a plane point. `center` and `scale` act as
/// F(p) = profile(|p - center| / scale) for the radial families.
struct FunctionFamily {
    FamilyKind kind = FamilyKind::constant;
    double alpha = 1.0;         // radial_power exponent
    double scale = 1.0;         // radial width, step width
    Point center{};
    double ax = 1.0, by = 0.0;  // linear: ax * x + by * y + value
    double value = 0.0;         // constant value / linear offset
    std::vector<std::vector<double>> custom;  // per-edge samples for `custom`

    static FunctionFamily constant(double c) { return {.kind = FamilyKind::constant, .value = c, .custom = {}}; }
    static FunctionFamily linear(double a, double b, double c = 0.0)
    {
        return {.kind = FamilyKind::linear, .ax = a, .by = b, .value = c, .custom = {}};
    }
    static FunctionFamily gaussian(double s = 1.0, Point c = {})
    {
        return {.kind = FamilyKind::gaussian, .scale = s, .center = c, .custom = {}};
    }
    static FunctionFamily cauchy(double s = 1.0, Point c = {})
    {
        return {.kind = FamilyKind::cauchy, .scale = s, .center = c, .custom = {}};
    }
    static FunctionFamily radial_power(double a, double s = 1.0, Point c = {})
    {
        require(a > 0.0, "radial power exponent must be positive");
        return {.kind = FamilyKind::radial_power, .alpha = a, .scale = s, .center = c, .custom = {}};
    }
    static FunctionFamily step(double s = 1.0, Point c = {})
    {
        return {.kind = FamilyKind::smooth_step, .scale = s, .center = c, .custom = {}};
    }
    static FunctionFamily harmonic(Point c = {}) { return {.kind = FamilyKind::harmonic2d, .center = c, .custom = {}}; }

    bool analytic() const { return kind != FamilyKind::custom; }

    double operator()(Point p) const
    {
        const double dx = p.x - center.x, dy = p.y - center.y;
        const double r2 = (dx * dx + dy * dy) / (scale * scale);
        switch (kind) {
            case FamilyKind::constant: return value;
            case FamilyKind::linear: return ax * p.x + by * p.y + value;
            case FamilyKind::gaussian: return std::exp(-pi * r2);
            case FamilyKind::cauchy: return 1.0 / (1.0 + r2);
            case FamilyKind::radial_power: return std::pow(1.0 + r2, -alpha);
            case FamilyKind::smooth_step: return smooth_step(dx / scale);
            case FamilyKind::harmonic2d: return dx * dx - dy * dy;
            case FamilyKind::custom: break;
        }
        throw Rejection("custom samples have no pointwise formula");
    }
};

/// Sampling resolution: cells per edge, or cells per unit length.
struct Resolution {
    std::size_t n = 16;
    bool per_unit_length = false;

    static Resolution per_edge(std::size_t n) { return {n, false}; }
    static Resolution per_unit(std::size_t n) { return {n, true}; }

    std::size_t cells_for(double length) const
    {
        if (!per_unit_length) return n;
        return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(length * static_cast<double>(n))));
    }
};

inline EdgeFunction sample_on_graph(const FunctionFamily& fam, GraphPtr g, Resolution res)
{
    require(res.n >= 2 || res.per_unit_length, "resolution must be at least 2 cells per edge");
    EdgeFunction f;
    f.graph = g;
    f.samples.resize(g->edges.size());
    if (fam.kind == FamilyKind::custom) {
        require(fam.custom.size() == g->edges.size(), "custom samples given for " + std::to_string(fam.custom.size()) +
                                                          " edges, graph has " + std::to_string(g->edges.size()));
        for (std::size_t e = 0; e < g->edges.size(); ++e) {
            require(fam.custom[e].size() >= 3, "custom samples on edge " + std::to_string(e) + " need N >= 2 cells");
            if (!res.per_unit_length)
                require(fam.custom[e].size() == res.n + 1, "custom samples on edge " + std::to_string(e) + " have " +
                                                               std::to_string(fam.custom[e].size()) + " values, expected " +
                                                               std::to_string(res.n + 1));
            f.samples[e] = fam.custom[e];
        }
        return f;
    }
    parallel::for_each_index(g->edges.size(), [&](std::size_t e) {
        const Edge& ed = g->edges[e];
        const std::size_t n = res.cells_for(ed.length);
        auto& v = f.samples[e];
        v.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            v[i] = fam(ed.at_fraction(static_cast<double>(i) / static_cast<double>(n)));
    });
    f.continuous = true;
    return f;
}

inline EdgeFunction sample_on_graph(const FunctionFamily& fam, const MetricGraph& g, Resolution res)
{
    return sample_on_graph(fam, share(g), res);
}

inline PlaneField sample_plane(const FunctionFamily& fam, const Window& w, double h)
{
    PlaneField F = PlaneField::over(w, h);
    parallel::for_each_index(F.ny, [&](std::size_t j) {
        for (std::size_t i = 0; i < F.nx; ++i) F.at(i, j) = fam({F.x(i), F.y(j)});
    });
    return F;
}

/// Restricts a plane field to the graph: bilinear interpolation at every
/// edge sample point, exact where samples sit on plane nodes. When `res`
/// is omitted each segment gets length/h cells, which aligns samples with
/// the plane grid for graph-paper edges.
inline EdgeFunction trace_plane_to_graph(const PlaneField& F, GraphPtr g, std::optional<Resolution> res = std::nullopt)
{
    EdgeFunction f;
    f.graph = g;
    f.samples.resize(g->edges.size());
    for (std::size_t e = 0; e < g->edges.size(); ++e) {
        const Edge& ed = g->edges[e];
        require(F.inside(ed.start) && F.inside(ed.end), "edge " + std::to_string(e) + " from (" +
                                                            std::to_string(ed.start.x) + ", " + std::to_string(ed.start.y) +
                                                            ") lies outside the plane field window");
    }
    parallel::for_each_index(g->edges.size(), [&](std::size_t e) {
        const Edge& ed = g->edges[e];
        std::size_t n = 0;
        if (res) {
            n = res->cells_for(ed.length);
        } else {
            const long long k = integral_ratio(ed.length / F.h);
            n = k >= 2 ? static_cast<std::size_t>(k) : std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(ed.length / F.h)));
        }
        auto& v = f.samples[e];
        v.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            v[i] = F.interpolate(ed.at_fraction(static_cast<double>(i) / static_cast<double>(n)));
    });
    f.continuous = true;
    return f;
}

inline EdgeFunction trace_plane_to_graph(const PlaneField& F, const MetricGraph& g, std::optional<Resolution> res = std::nullopt)
{
    return trace_plane_to_graph(F, share(g), res);
}

/// Restriction of an edge function to the sub-graph kept by restrict_graph.
inline EdgeFunction restrict_function(const EdgeFunction& f, const Window& region)
{
    MetricGraph sub = restrict_graph(*f.graph, region);
    // Edge parents refer to the root graph; map them back through f's graph.
    std::map<std::size_t, std::size_t> by_parent;
    for (std::size_t e = 0; e < f.graph->edges.size(); ++e) by_parent[f.graph->edges[e].parent] = e;
    EdgeFunction out;
    out.continuous = f.continuous;
    out.samples.reserve(sub.edges.size());
    for (const Edge& e : sub.edges) out.samples.push_back(f.samples[by_parent.at(e.parent)]);
    out.graph = share(std::move(sub));
    return out;
}

// CSV: one row per sample, "edge,parameter,value".
inline void write_csv(const EdgeFunction& f, std::ostream& os)
{
    os << "edge,parameter,value\n";
    char buf[96];
    for (std::size_t e = 0; e < f.samples.size(); ++e) {
        const double h = f.spacing(e);
        for (std::size_t i = 0; i < f.samples[e].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", e, static_cast<double>(i) * h, f.samples[e][i]);
            os << buf;
        }
    }
}

inline EdgeFunction read_csv(GraphPtr g, std::istream& is)
{
    std::string line;
    std::getline(is, line);
    require(line.rfind("edge", 0) == 0, "edge-function CSV must start with the header edge,parameter,value");
    FunctionFamily fam;
    fam.kind = FamilyKind::custom;
    fam.custom.resize(g->edges.size());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        const auto e = static_cast<std::size_t>(std::stoull(a));
        require(e < g->edges.size(), "CSV references edge " + a + " beyond the graph");
        fam.custom[e].push_back(std::stod(c));
    }
    EdgeFunction f = sample_on_graph(fam, g, Resolution::per_unit(1));
    f.continuous = max_junction_jump(f) == 0.0;
    return f;
}

}  // namespace tracelab
