#pragma once

// Graph-paper trace profiles of plane fields across nested scales m^n,
// reconstruction from consistent traces, localization and pencils.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "extension.hpp"
#include "functions.hpp"
#include "graphs.hpp"
#include "parallel.hpp"
#include "seminorms.hpp"

namespace tracelab {

struct NormProfile {
    int m = 2;
    std::vector<int> levels;      // n, strictly decreasing
    std::vector<double> deltas;   // m^n
    std::vector<double> norms;    // squared trace norm per level
    std::vector<std::size_t> resolution;  // cells per edge per level
    double energy = 0.0;          // reference plane energy
    Window window{};

    double sup() const
    {
        double s = 0.0;
        for (double v : norms) s = std::max(s, v);
        return s;
    }
    double inf() const
    {
        double s = norms.empty() ? 0.0 : norms[0];
        for (double v : norms) s = std::min(s, v);
        return s;
    }
};

struct GpOptions {
    bool include_straight = true;
};

namespace detail {

inline void check_levels(int m, const std::vector<int>& levels)
{
    require(m >= 2, "graph-paper base m must be at least 2");
    require(!levels.empty(), "level list is empty");
    for (std::size_t k = 1; k < levels.size(); ++k)
        require(levels[k] < levels[k - 1], "levels must be strictly decreasing");
}

inline Window field_window(const PlaneField& F)
{
    require(F.nx == F.ny, "graph-paper experiments need a square plane window");
    const double r = 0.5 * (F.xmax() - F.x0);
    return Window(r, {F.x0 + r, F.y0 + r});
}

inline double level_delta(int m, int n) { return std::pow(static_cast<double>(m), n); }

inline void check_level_grid(double delta, double h, int n)
{
    const long long q = integral_ratio(delta / h);
    require(q >= 2, "level n = " + std::to_string(n) + " (delta = " + std::to_string(delta) +
                        ") is finer than two plane grid spacings or not aligned with spacing " + std::to_string(h));
}

}  // namespace detail

/// Squared graph-paper seminorm of the trace of F for each level n.
inline NormProfile trace_profile(const PlaneField& F, int m, const std::vector<int>& levels, const GpOptions& opt = {})
{
    detail::check_levels(m, levels);
    const Window w = detail::field_window(F);
    NormProfile p;
    p.m = m;
    p.levels = levels;
    p.window = w;
    NormOptions no;
    no.include_straight = opt.include_straight;
    for (int n : levels) {
        const double delta = detail::level_delta(m, n);
        detail::check_level_grid(delta, F.h, n);
        auto g = share(build_graph({FamilyTag::graph_paper, delta}, w));
        const auto f = trace_plane_to_graph(F, g);
        p.deltas.push_back(delta);
        p.norms.push_back(seminorm(f, NormKind::of(NormTag::graph_paper), no).value);
        p.resolution.push_back(f.cells(0));
    }
    p.energy = plane_energy(F).value;
    return p;
}

struct Reconstruction {
    PlaneField field;
    double energy = 0.0;                 // sum of the per-square energies
    std::vector<double> square_energies;  // finest squares, row-major
    std::vector<double> level_norms;
    double sup = 0.0;
    double ratio = 0.0;  // energy / sup
};

namespace detail {

struct LatticeKey {
    long long i, j;
    bool operator<(const LatticeKey& o) const { return i < o.i || (i == o.i && j < o.j); }
};

}  // namespace detail

/// Consistency-checks graph-paper data across levels and fills every finest
/// square harmonically. `levels` holds the level functions ordered from
/// coarse to fine, each on a GraphPaper graph.
inline Reconstruction reconstruct_from_traces(const std::vector<EdgeFunction>& levels, bool check_consistency = true)
{
    require(!levels.empty(), "no level data");
    for (const auto& f : levels)
        require(f.graph && f.graph->family == FamilyTag::graph_paper, "level data must live on graph paper");
    const EdgeFunction& fine = levels.back();
    const double delta = fine.graph->scale;
    const double h = fine.spacing(0);
    for (std::size_t k = 1; k < levels.size(); ++k)
        require(levels[k].graph->scale < levels[k - 1].graph->scale, "levels must go from coarse to fine");
    const long long q = integral_ratio(delta / h);
    require(q >= 2, "finest level needs at least 2 cells per edge");

    // Every sample sits on the lattice of spacing h.
    const Window w = fine.graph->window;
    const double ox = w.xmin(), oy = w.ymin();
    double scale = 0.0;
    for (const auto& f : levels) scale = std::max(scale, f.max_abs());
    const double tol = 1e-12 * std::max(1.0, scale);
    std::map<detail::LatticeKey, std::pair<double, std::size_t>> nodes;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const EdgeFunction& f = levels[l];
        for (std::size_t e = 0; e < f.samples.size(); ++e) {
            const Edge& ed = f.graph->edges[e];
            const std::size_t n = f.cells(e);
            for (std::size_t i = 0; i <= n; ++i) {
                const Point p = ed.at_fraction(static_cast<double>(i) / static_cast<double>(n));
                const double fi = (p.x - ox) / h, fj = (p.y - oy) / h;
                const detail::LatticeKey key{std::llround(fi), std::llround(fj)};
                require(std::abs(fi - static_cast<double>(key.i)) < 1e-9 && std::abs(fj - static_cast<double>(key.j)) < 1e-9,
                        "level " + std::to_string(l) + " samples are not aligned with the finest grid");
                auto [it, fresh] = nodes.emplace(key, std::make_pair(f.samples[e][i], l));
                if (!fresh && check_consistency && std::abs(it->second.first - f.samples[e][i]) > tol) {
                    char buf[200];
                    std::snprintf(buf, sizeof buf,
                                  "inconsistent traces: level %zu disagrees with level %zu at vertex (%.12g, %.12g) "
                                  "by %.3g",
                                  l, it->second.second, p.x, p.y, f.samples[e][i] - it->second.first);
                    throw Rejection(buf);
                }
            }
        }
    }

    const auto nq = static_cast<std::size_t>(q);
    const long long side = integral_ratio(2.0 * w.half_width / h);
    require(side >= 2, "window does not hold the finest grid");
    Reconstruction r;
    r.field = PlaneField(ox, oy, h, static_cast<std::size_t>(side) + 1, static_cast<std::size_t>(side) + 1);
    for (const auto& [key, v] : nodes) {
        if (key.i < 0 || key.j < 0 || key.i > side || key.j > side) continue;
        r.field.at(static_cast<std::size_t>(key.i), static_cast<std::size_t>(key.j)) = v.first;
    }

    // Squares of the finest graph paper whose four sides are present.
    const auto& g = *fine.graph;
    std::vector<std::pair<std::size_t, std::size_t>> squares;  // lower-left node
    std::map<detail::LatticeKey, int> corner_seen;
    for (const Point& v : g.vertices) corner_seen[{std::llround((v.x - ox) / h), std::llround((v.y - oy) / h)}] = 1;
    for (const auto& [key, _] : corner_seen) {
        const long long i = key.i, j = key.j;
        if (corner_seen.count({i + q, j}) && corner_seen.count({i, j + q}) && corner_seen.count({i + q, j + q}) &&
            i + q <= side && j + q <= side)
            squares.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    std::sort(squares.begin(), squares.end(), [](const auto& a, const auto& b) {
        return a.second < b.second || (a.second == b.second && a.first < b.first);
    });

    r.square_energies.assign(squares.size(), 0.0);
    parallel::for_each_index(squares.size(), [&](std::size_t s) {
        const auto [i0, j0] = squares[s];
        PlaneField block(r.field.x(i0), r.field.y(j0), h, nq + 1, nq + 1);
        for (std::size_t b = 0; b <= nq; ++b)
            for (std::size_t a = 0; a <= nq; ++a)
                if (a == 0 || b == 0 || a == nq || b == nq) block.at(a, b) = r.field.at(i0 + a, j0 + b);
        const auto filled = detail::fill_block(std::move(block));
        std::vector<double> cells;
        for (std::size_t b = 0; b < nq; ++b)
            for (std::size_t a = 0; a < nq; ++a) cells.push_back(cell_energy(filled.field, a, b));
        r.square_energies[s] = parallel::pairwise_sum(cells);
        for (std::size_t b = 1; b < nq; ++b)
            for (std::size_t a = 1; a < nq; ++a) r.field.at(i0 + a, j0 + b) = filled.field.at(a, b);
    });
    r.energy = parallel::pairwise_sum(r.square_energies);

    for (const auto& f : levels) r.level_norms.push_back(seminorm(f, NormKind::of(NormTag::graph_paper)).value);
    for (double v : r.level_norms) r.sup = std::max(r.sup, v);
    r.ratio = r.sup > 0.0 ? r.energy / r.sup : 0.0;
    return r;
}

/// Traces of F on GraphPaper(m^n) for each level, coarse to fine.
inline std::vector<EdgeFunction> level_traces(const PlaneField& F, int m, const std::vector<int>& levels)
{
    detail::check_levels(m, levels);
    const Window w = detail::field_window(F);
    std::vector<EdgeFunction> out;
    for (int n : levels) {
        const double delta = detail::level_delta(m, n);
        detail::check_level_grid(delta, F.h, n);
        out.push_back(trace_plane_to_graph(F, share(build_graph({FamilyTag::graph_paper, delta}, w))));
    }
    return out;
}

struct LocalizedComparison {
    double energy = 0.0;        // energy of the cells inside the region
    NormProfile profile;        // norms over edges inside the region
    double sup = 0.0;
    double ratio = 0.0;         // energy / sup
};

/// Energy and graph-paper norms restricted to a region.
inline LocalizedComparison localized_compare(const PlaneField& F, const Window& region, int m, const std::vector<int>& levels)
{
    detail::check_levels(m, levels);
    const Window w = detail::field_window(F);
    require(region.xmin() >= w.xmin() - 1e-12 && region.xmax() <= w.xmax() + 1e-12 &&
                region.ymin() >= w.ymin() - 1e-12 && region.ymax() <= w.ymax() + 1e-12,
            "region must lie inside the field window");
    LocalizedComparison out;
    std::vector<double> cells;
    for (std::size_t j = 0; j + 1 < F.ny; ++j)
        for (std::size_t i = 0; i + 1 < F.nx; ++i)
            if (region.contains({F.x(i), F.y(j)}) && region.contains({F.x(i + 1), F.y(j + 1)}))
                cells.push_back(cell_energy(F, i, j));
    require(!cells.empty(), "region holds no grid cell");
    out.energy = parallel::pairwise_sum(cells);
    NormProfile& p = out.profile;
    p.m = m;
    p.levels = levels;
    p.window = region;
    p.energy = out.energy;
    for (int n : levels) {
        const double delta = detail::level_delta(m, n);
        detail::check_level_grid(delta, F.h, n);
        auto g = share(restrict_graph(build_graph({FamilyTag::graph_paper, delta}, w), region));
        p.deltas.push_back(delta);
        if (g->edges.empty()) {
            p.norms.push_back(0.0);
            p.resolution.push_back(0);
            continue;
        }
        const auto f = trace_plane_to_graph(F, g);
        p.norms.push_back(seminorm(f, NormKind::of(NormTag::graph_paper)).value);
        p.resolution.push_back(f.cells(0));
    }
    out.sup = p.sup();
    out.ratio = out.sup > 0.0 ? out.energy / out.sup : 0.0;
    return out;
}

/// Pencil seminorm of the traces of F on horizontal lines y = k m^n.
inline NormProfile pencil_profile(const PlaneField& F, int m, const std::vector<int>& levels, const NormOptions& opt = {})
{
    detail::check_levels(m, levels);
    const Window w = detail::field_window(F);
    NormProfile p;
    p.m = m;
    p.levels = levels;
    p.window = w;
    for (int n : levels) {
        const double delta = detail::level_delta(m, n);
        detail::check_level_grid(delta, F.h, n);
        auto g = share(build_graph({FamilyTag::pencil, delta}, w));
        const auto f = trace_plane_to_graph(F, g);
        p.deltas.push_back(delta);
        p.norms.push_back(seminorm(f, NormKind::of(NormTag::pencil_tilde), opt).value);
        p.resolution.push_back(f.cells(0));
    }
    p.energy = plane_energy(F).value;
    return p;
}

struct LineDecayRow {
    int n = 0;
    double norm = 0.0;       // HalfLine of the trace on y = pi n
    double predicted = 0.0;  // (1 + pi^2 n^2)^{-2 alpha} times the n = 0 norm
};

/// HalfLine norms of F_alpha = (1 + x^2 + y^2)^{-alpha} on the lines y = pi n.
inline std::vector<LineDecayRow> falpha_line_profile(double alpha, const std::vector<int>& ns, double R, std::size_t per_unit)
{
    require(alpha > 0.0, "alpha must be positive");
    std::vector<LineDecayRow> rows;
    double base = 0.0;
    for (int n : ns) {
        const double yn = pi * n;
        auto g = share(build_graph({FamilyTag::interval_line}, Window(R, {0.0, yn})));
        const auto f = sample_on_graph(FunctionFamily::radial_power(alpha), g, Resolution::per_unit(per_unit));
        LineDecayRow r;
        r.n = n;
        r.norm = seminorm(f, NormKind::of(NormTag::half_line)).value;
        if (rows.empty()) base = r.norm / std::pow(1.0 + yn * yn, -2.0 * alpha);
        r.predicted = base * std::pow(1.0 + yn * yn, -2.0 * alpha);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace tracelab
