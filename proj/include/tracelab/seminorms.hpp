#pragma once

// Quadrature engine for the fractional seminorms of piecewise-linear edge
// functions. Every double integral is assembled cell pair by cell pair:
//   - same cell: closed form (the difference quotient is the cell slope);
//   - neighbouring cells: closed form for |x-y|^-p kernels, otherwise a
//     4x4 Gauss-Legendre rule on the bounded difference quotient;
//   - all other pairs: 4x4 Gauss-Legendre;
//   - a pair cut by a range restriction |x-y| <= rho: collapsed rule on
//     the triangle that survives.
// Single integrals against dx/x are exact on the first cell and use an
// 8-point rule elsewhere. Sums run through parallel::sum_terms so results
// do not depend on the thread count.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "functions.hpp"
#include "graphs.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace tracelab {

enum class NormTag { half_graph, half_line, tilde_half_line, integer_graph, square, graph_paper, circle, pencil_tilde, h_beta };

struct NormKind {
    NormTag tag = NormTag::half_line;
    double beta = 0.75;  // h_beta only

    static NormKind of(NormTag t) { return {t, 0.75}; }
    static NormKind h_beta(double b)
    {
        require(b > 0.5 && b < 1.0, "H^beta needs beta in (1/2, 1), got " + std::to_string(b));
        return {NormTag::h_beta, b};
    }
};

inline std::string to_string(NormTag t)
{
    switch (t) {
        case NormTag::half_graph: return "half-graph";
        case NormTag::half_line: return "half-line";
        case NormTag::tilde_half_line: return "tilde-half-line";
        case NormTag::integer_graph: return "integer-graph";
        case NormTag::square: return "square";
        case NormTag::graph_paper: return "graph-paper";
        case NormTag::circle: return "circle";
        case NormTag::pencil_tilde: return "pencil-tilde";
        case NormTag::h_beta: return "h-beta";
    }
    return "unknown";
}

/// How a window-truncated infinite line is completed outside the window.
enum class Exterior {
    none,                // integrate over the window only
    constant_extension,  // extend by the endpoint values, add the cross terms exactly
};

struct NormOptions {
    Exterior exterior = Exterior::constant_extension;
    bool include_straight = true;  // graph paper: keep the two straight-through sums
    bool refinement = false;       // also evaluate at half resolution
    double tilde_range = 1.0;      // restriction |x - y| <= range for tilde-half-line
};

struct NormTerm {
    std::string label;
    double value = 0.0;
};

struct NormReport {
    std::string kind;
    double value = 0.0;  // squared seminorm
    std::vector<NormTerm> breakdown;
    Window window{};
    std::size_t resolution = 0;  // largest cell count on an edge
    double spacing = 0.0;        // smallest sample spacing
    double refinement_estimate = std::numeric_limits<double>::quiet_NaN();

    double term(const std::string& label) const
    {
        for (const auto& t : breakdown)
            if (t.label == label) return t.value;
        return 0.0;
    }
};

inline nlohmann::json to_json(const NormReport& r, bool with_breakdown = true)
{
    nlohmann::json j;
    j["kind"] = r.kind;
    j["value"] = r.value;
    j["window"] = {{"half_width", r.window.half_width}, {"center", {r.window.center.x, r.window.center.y}}};
    j["resolution"] = r.resolution;
    j["spacing"] = r.spacing;
    j["refinement_estimate"] = std::isnan(r.refinement_estimate) ? nlohmann::json(nullptr) : nlohmann::json(r.refinement_estimate);
    if (with_breakdown) {
        auto& b = j["breakdown"] = nlohmann::json::object();
        for (const auto& t : r.breakdown) b[t.label] = t.value;
    }
    return j;
}

namespace kernels {

/// w = 1: the plain |x - y|^-p kernel.
struct Unit {
    static constexpr bool unit = true;
    static constexpr bool invariant = true;
    double operator()(double) const { return 1.0; }
};

/// Chordal distance on a circle of radius r: w(d) = d^2 / (2 r sin(d / 2r))^2.
struct Chord {
    static constexpr bool unit = false;
    static constexpr bool invariant = true;
    double radius = 1.0;
    double operator()(double d) const
    {
        const double a = d / (2.0 * radius);
        if (std::abs(a) < 1e-3) return 1.0 + a * a / 3.0 + a * a * a * a / 15.0;
        const double q = a / std::sin(a);
        return q * q;
    }
};

/// 1 / (4 sinh^2(d/2)) written as w(d) / d^2.
struct Sinh {
    static constexpr bool unit = false;
    static constexpr bool invariant = true;
    double operator()(double d) const
    {
        const double b = 0.5 * std::abs(d);
        if (b < 1e-3) return 1.0 - b * b / 3.0 + b * b * b * b / 15.0;
        if (b > 700.0) return 0.0;
        const double q = b / std::sinh(b);
        return q * q;
    }
};

/// Quadrant weight x y / (x + y)^2 (absolute coordinates, not translation invariant).
struct Quadrant {
    static constexpr bool unit = false;
    static constexpr bool invariant = false;
    double operator()(double x, double y) const
    {
        const double s = x + y;
        return s > 0.0 ? x * y / (s * s) : 0.0;
    }
};

}  // namespace kernels

namespace detail {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// int_0^1 int_0^1 u^2 (u+v)^-p and u v (u+v)^-p, via s = u+v, t = u/s.
struct NeighbourConstants {
    double i20 = 0.0;
    double i11 = 0.0;
};

inline NeighbourConstants neighbour_constants(double p)
{
    NeighbourConstants c;
    // s in [0, 1]: full t range.
    c.i20 = (1.0 / 3.0) / (4.0 - p);
    c.i11 = (1.0 / 6.0) / (4.0 - p);
    // s in [1, 2]: t in [1 - 1/s, 1/s].
    const auto& g = quad::gl20();
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double s = 1.0 + g.nodes[k];
        const double hi = 1.0 / s, lo = 1.0 - hi;
        const double g20 = (hi * hi * hi - lo * lo * lo) / 3.0;
        const double g11 = (hi * hi / 2.0 - hi * hi * hi / 3.0) - (lo * lo / 2.0 - lo * lo * lo / 3.0);
        const double ws = g.weights[k] * std::pow(s, 3.0 - p);
        c.i20 += ws * g20;
        c.i11 += ws * g11;
    }
    return c;
}

template <class W>
double weight_at(const W& w, double x, double y)
{
    if constexpr (W::invariant) {
        return w(y - x);
    } else {
        return w(x, y);
    }
}

inline double kernel_power(double d, double p)
{
    const double a = std::abs(d);
    return p == 2.0 ? 1.0 / (a * a) : std::exp(-p * std::log(a));
}

/// Double integral of |f(x) - f(y)|^2 w / |x - y|^p over [x0, x0 + N h]^2
/// (restricted to |x - y| <= range when range is finite) for the linear
/// interpolant of v. Rows (first cell index) are reduced pairwise.
template <class W>
double uniform_double_integral(std::span<const double> v, double h, double x0, double p, double range, const W& w,
                               bool parallel_rows)
{
    require(v.size() >= 2, "double integral needs at least one cell");
    require(p >= 2.0 && p < 3.0, "kernel exponent p must lie in [2, 3), got " + std::to_string(p));
    if constexpr (!W::unit) require(p == 2.0, "weighted kernels are only supported with p = 2");
    const std::size_t n = v.size() - 1;
    const auto& gl = quad::gl4();
    constexpr std::size_t q = 4;

    std::size_t k = n + 1;  // first offset that is out of range
    bool cut = false;       // offset k is cut by the restriction
    if (std::isfinite(range)) {
        const long long kk = integral_ratio(range / h);
        require(kk >= 2, "range restriction must be an integer multiple (>= 2) of the sample spacing");
        k = static_cast<std::size_t>(kk);
        cut = true;
    }

    std::vector<double> slope(n);
    std::vector<double> fq(n * q), xq(n * q);
    for (std::size_t i = 0; i < n; ++i) {
        slope[i] = (v[i + 1] - v[i]) / h;
        for (std::size_t a = 0; a < q; ++a) {
            fq[i * q + a] = v[i] + (v[i + 1] - v[i]) * gl.nodes[a];
            xq[i * q + a] = x0 + (static_cast<double>(i) + gl.nodes[a]) * h;
        }
    }

    const double h2 = h * h;
    const std::size_t far_max = std::min(n - 1, cut ? k - 1 : n - 1);

    // Translation-invariant kernels: tabulate weight * kernel * GL weights per offset.
    std::vector<double> table;
    std::array<double, q * q> tri_table{};
    if constexpr (W::invariant) {
        if (far_max >= 2) {
            table.assign((far_max + 1) * q * q, 0.0);
            for (std::size_t o = 2; o <= far_max; ++o)
                for (std::size_t a = 0; a < q; ++a)
                    for (std::size_t b = 0; b < q; ++b) {
                        const double d = (static_cast<double>(o) + gl.nodes[b] - gl.nodes[a]) * h;
                        table[(o * q + a) * q + b] = gl.weights[a] * gl.weights[b] * h2 * w(d) * kernel_power(d, p);
                    }
        }
        if (cut && k <= n - 1) {
            for (std::size_t a = 0; a < q; ++a)
                for (std::size_t b = 0; b < q; ++b) {
                    const double xi = gl.nodes[a], eta = gl.nodes[a] * gl.nodes[b];
                    const double d = (static_cast<double>(k) + eta - xi) * h;
                    tri_table[a * q + b] = gl.weights[a] * gl.weights[b] * gl.nodes[a] * h2 * w(d) * kernel_power(d, p);
                }
        }
    }

    NeighbourConstants nc{};
    if constexpr (W::unit) nc = neighbour_constants(p);
    const double hp = std::pow(h, 4.0 - p);
    const double diag_unit = 2.0 / ((3.0 - p) * (4.0 - p));

    auto row = [&](std::size_t i) {
        double acc = 0.0;
        // same cell
        if constexpr (W::unit) {
            acc += slope[i] * slope[i] * hp * diag_unit;
        } else {
            double s = 0.0;
            for (std::size_t a = 0; a < q; ++a)
                for (std::size_t b = 0; b < q; ++b)
                    s += gl.weights[a] * gl.weights[b] * weight_at(w, xq[i * q + a], xq[i * q + b]);
            acc += slope[i] * slope[i] * h2 * s;
        }
        double off = 0.0;
        // neighbouring cell
        if (i + 1 < n && (!cut || k >= 2)) {
            const std::size_t j = i + 1;
            if constexpr (W::unit) {
                const double s1 = slope[i], s2 = slope[j];
                off += hp * ((s1 * s1 + s2 * s2) * nc.i20 + 2.0 * s1 * s2 * nc.i11);
            } else {
                for (std::size_t a = 0; a < q; ++a)
                    for (std::size_t b = 0; b < q; ++b) {
                        const double dx = xq[j * q + b] - xq[i * q + a];
                        const double df = fq[j * q + b] - fq[i * q + a];
                        off += gl.weights[a] * gl.weights[b] * h2 * (df * df) / (dx * dx) *
                               weight_at(w, xq[i * q + a], xq[j * q + b]);
                    }
            }
        }
        // far cells
        const std::size_t last = std::min(far_max, n - 1 - i);
        for (std::size_t o = 2; o <= last; ++o) {
            const std::size_t j = i + o;
            double s = 0.0;
            if constexpr (W::invariant) {
                const double* t = &table[o * q * q];
                for (std::size_t a = 0; a < q; ++a) {
                    const double fa = fq[i * q + a];
                    for (std::size_t b = 0; b < q; ++b) {
                        const double df = fa - fq[j * q + b];
                        s += df * df * t[a * q + b];
                    }
                }
            } else {
                for (std::size_t a = 0; a < q; ++a)
                    for (std::size_t b = 0; b < q; ++b) {
                        const double d = xq[j * q + b] - xq[i * q + a];
                        const double df = fq[i * q + a] - fq[j * q + b];
                        s += gl.weights[a] * gl.weights[b] * h2 * df * df * kernel_power(d, p) *
                             weight_at(w, xq[i * q + a], xq[j * q + b]);
                    }
            }
            off += s;
        }
        // pair cut by the range restriction: keep eta <= xi
        if (cut && i + k <= n - 1) {
            const std::size_t j = i + k;
            double s = 0.0;
            for (std::size_t a = 0; a < q; ++a)
                for (std::size_t b = 0; b < q; ++b) {
                    const double xi = gl.nodes[a] * h, eta = gl.nodes[a] * gl.nodes[b] * h;
                    const double df = (v[i] + slope[i] * xi) - (v[j] + slope[j] * eta);
                    if constexpr (W::invariant) {
                        s += df * df * tri_table[a * q + b];
                    } else {
                        const double x = x0 + static_cast<double>(i) * h + xi;
                        const double y = x0 + static_cast<double>(j) * h + eta;
                        s += gl.weights[a] * gl.weights[b] * gl.nodes[a] * h2 * df * df * kernel_power(y - x, p) *
                             weight_at(w, x, y);
                    }
                }
            off += s;
        }
        return acc + 2.0 * off;
    };

    if (parallel_rows) return parallel::sum_terms(n, row);
    std::vector<double> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = row(i);
    return parallel::pairwise_sum(rows);
}

/// int_0^{t_last} d(t)^2 / t dt for the linear interpolant through (t_k, d_k),
/// t_0 = 0. Infinite when d(0) != 0.
inline double pl_square_over_t(std::span<const double> t, std::span<const double> d)
{
    if (d.front() != 0.0) return inf;
    static const quad::Rule g8 = quad::gauss_legendre(8);
    std::vector<double> cells(t.size() - 1, 0.0);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        const double a = t[k], b = t[k + 1], len = b - a;
        if (len <= 0.0) continue;
        if (k == 0 || a == 0.0) {
            const double beta = (d[k + 1] - d[k]) / len;
            cells[k] = beta * beta * b * b / 2.0;
            continue;
        }
        double s = 0.0;
        for (std::size_t m = 0; m < g8.nodes.size(); ++m) {
            const double u = g8.nodes[m];
            const double val = std::lerp(d[k], d[k + 1], u);
            s += g8.weights[m] * val * val / (a + u * len);
        }
        cells[k] = s * len;
    }
    return parallel::pairwise_sum(cells);
}

/// Exact int of the squared linear interpolant through (t_k, d_k).
inline double pl_square_integral(std::span<const double> t, std::span<const double> d)
{
    std::vector<double> cells(t.size() - 1);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        const double a = d[k], b = d[k + 1];
        cells[k] = (t[k + 1] - t[k]) * (a * a + a * b + b * b) / 3.0;
    }
    return parallel::pairwise_sum(cells);
}

inline std::vector<double> uniform_params(std::size_t n, double h)
{
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = static_cast<double>(i) * h;
    return t;
}

/// Cross term between a window end and its constant exterior:
/// 2 int_0^{min(L, rho)} (g(t) - g(0))^2 (1/t - 1/rho) dt, t measured from the end.
inline double exterior_end(std::span<const double> samples_from_end, double h, double range)
{
    const std::size_t n = samples_from_end.size() - 1;
    std::size_t m = n;
    if (std::isfinite(range)) {
        const long long k = integral_ratio(range / h);
        require(k >= 1, "range restriction must be a multiple of the sample spacing");
        m = std::min<std::size_t>(n, static_cast<std::size_t>(k));
    }
    std::vector<double> d(m + 1);
    for (std::size_t i = 0; i <= m; ++i) d[i] = samples_from_end[i] - samples_from_end[0];
    const auto t = uniform_params(m, h);
    double val = pl_square_over_t(t, d);
    if (std::isfinite(range)) val -= pl_square_integral(t, d) / range;
    return 2.0 * val;
}

/// Exterior completion for one line edge [start, end] extended by its end values.
inline double exterior_line(std::span<const double> v, double h, double range, double scale)
{
    std::vector<double> rev(v.rbegin(), v.rend());
    double val = exterior_end(v, h, range) + exterior_end(rev, h, range);
    const double length = h * static_cast<double>(v.size() - 1);
    const double jump = std::abs(v.front() - v.back());
    if (!std::isfinite(range)) {
        // Both exteriors see each other through the full kernel.
        if (jump > 1e-12 * std::max(1.0, scale)) val = inf;
    } else {
        require(length >= range, "window shorter than the range restriction");
    }
    return val;
}

}  // namespace detail

/// Double integral of |f(e(x)) - f(e(y))|^2 / |x - y|^p over one edge.
inline double edge_double_integral(const EdgeFunction& f, std::size_t e, std::size_t e2, double p)
{
    require(e < f.samples.size() && e2 < f.samples.size(), "edge index out of range");
    require(e == e2, "cross-edge double integrals are not part of any seminorm; pass the same edge twice");
    require(p < 3.0, "kernel exponent p >= 3 is not integrable against linear interpolants");
    return detail::uniform_double_integral(std::span<const double>(f.samples[e]), f.spacing(e), 0.0, p,
                                           detail::inf, kernels::Unit{}, true);
}

/// int_0^L |f(e(x)) - f(e'(x))|^2 / x dx along a junction pair, both sides
/// parameterized from the shared vertex. L defaults to the shorter edge.
inline double junction_integral(const EdgeFunction& f, const Junction& j, double length = -1.0)
{
    const auto a = f.from_vertex(j.first);
    const auto b = f.from_vertex(j.second);
    const double la = f.graph->edges[j.first.edge].length;
    const double lb = f.graph->edges[j.second.edge].length;
    const double L = length > 0.0 ? std::min({length, la, lb}) : std::min(la, lb);
    const double ha = f.spacing(j.first.edge), hb = f.spacing(j.second.edge);

    // Merged breakpoints of both interpolants on [0, L].
    std::vector<double> t;
    for (std::size_t i = 0; i < a.size() && static_cast<double>(i) * ha < L; ++i) t.push_back(static_cast<double>(i) * ha);
    for (std::size_t i = 1; i < b.size() && static_cast<double>(i) * hb < L; ++i) t.push_back(static_cast<double>(i) * hb);
    t.push_back(L);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(), [&](double x, double y) { return std::abs(x - y) <= 1e-12 * L; }), t.end());

    auto value = [](const std::vector<double>& s, double h, double x) {
        const double u = x / h;
        const auto i = std::min(static_cast<std::size_t>(u), s.size() - 2);
        const double fr = u - static_cast<double>(i);
        if (fr <= 1e-12) return s[i];
        if (fr >= 1.0 - 1e-12) return s[i + 1];
        return std::lerp(s[i], s[i + 1], fr);
    };
    std::vector<double> d(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) d[k] = value(a, ha, t[k]) - value(b, hb, t[k]);
    d[0] = a.front() - b.front();
    return detail::pl_square_over_t(t, d);
}

namespace detail {

inline void require_family(const MetricGraph& g, FamilyTag tag, NormTag kind)
{
    require(g.family == tag, "norm kind " + to_string(kind) + " needs a " + to_string(tag) + " graph, got " +
                                 to_string(g.family));
}

// Sum over edges of same-edge double integrals with one kernel.
template <class W>
double edges_sum(const EdgeFunction& f, const std::vector<std::size_t>& edges, double p, double range, const W& w)
{
    if (edges.size() == 1) {
        const std::size_t e = edges[0];
        return uniform_double_integral(std::span<const double>(f.samples[e]), f.spacing(e), 0.0, p, range, w, true);
    }
    return parallel::sum_terms(edges.size(), [&](std::size_t k) {
        const std::size_t e = edges[k];
        return uniform_double_integral(std::span<const double>(f.samples[e]), f.spacing(e), 0.0, p, range, w, false);
    });
}

inline std::vector<std::size_t> all_edges(const MetricGraph& g)
{
    std::vector<std::size_t> e(g.edges.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = i;
    return e;
}

template <class Pred>
double junctions_sum(const EdgeFunction& f, Pred&& keep)
{
    std::vector<const Junction*> js;
    for (const Junction& j : f.graph->junctions)
        if (keep(j)) js.push_back(&j);
    return parallel::sum_terms(js.size(), [&](std::size_t k) { return junction_integral(f, *js[k]); });
}

inline NormReport assemble(const EdgeFunction& f, const NormKind& kind, const NormOptions& opt)
{
    const MetricGraph& g = *f.graph;
    NormReport r;
    r.kind = to_string(kind.tag);
    r.window = g.window;
    r.spacing = inf;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        r.resolution = std::max(r.resolution, f.cells(e));
        r.spacing = std::min(r.spacing, f.spacing(e));
    }
    const bool complete = opt.exterior == Exterior::constant_extension;
    const double scale = f.max_abs();
    auto add = [&](const std::string& label, double v) { r.breakdown.push_back({label, v}); };

    switch (kind.tag) {
        case NormTag::half_line:
        case NormTag::tilde_half_line: {
            require_family(g, FamilyTag::interval_line, kind.tag);
            const double range = kind.tag == NormTag::tilde_half_line ? opt.tilde_range : inf;
            add("edge_double", edges_sum(f, {0}, 2.0, range, kernels::Unit{}));
            if (complete) add("exterior", exterior_line(f.samples[0], f.spacing(0), range, scale));
            break;
        }
        case NormTag::half_graph: {
            add("edge_double", edges_sum(f, all_edges(g), 2.0, inf, kernels::Unit{}));
            add("junction", junctions_sum(f, [](const Junction&) { return true; }));
            if (complete && g.family == FamilyTag::half_line_pair) {
                // Both half-lines continue past the window with their end values.
                double ext = 0.0;
                for (std::size_t e = 0; e < 2; ++e) {
                    std::vector<double> rev(f.samples[e].rbegin(), f.samples[e].rend());
                    ext += exterior_end(rev, f.spacing(e), inf);
                }
                if (std::abs(f.samples[0].back() - f.samples[1].back()) > 1e-12 * std::max(1.0, scale)) ext = inf;
                add("exterior", ext);
            }
            break;
        }
        case NormTag::integer_graph: {
            require_family(g, FamilyTag::integer_graph, kind.tag);
            add("edge_double", edges_sum(f, all_edges(g), 2.0, inf, kernels::Unit{}));
            add("junction", junctions_sum(f, [](const Junction&) { return true; }));
            break;
        }
        case NormTag::square: {
            require_family(g, FamilyTag::square, kind.tag);
            add("edge_double", edges_sum(f, all_edges(g), 2.0, inf, kernels::Unit{}));
            add("junction_corner", junctions_sum(f, [](const Junction& j) { return j.role == JunctionRole::corner_primary; }));
            break;
        }
        case NormTag::graph_paper: {
            require_family(g, FamilyTag::graph_paper, kind.tag);
            add("edge_double", edges_sum(f, all_edges(g), 2.0, inf, kernels::Unit{}));
            add("junction_corner", junctions_sum(f, [](const Junction& j) { return j.role == JunctionRole::corner_primary; }));
            if (opt.include_straight)
                add("junction_straight", junctions_sum(f, [](const Junction& j) { return j.role == JunctionRole::straight; }));
            break;
        }
        case NormTag::circle: {
            require_family(g, FamilyTag::circle, kind.tag);
            add("edge_double", edges_sum(f, {0}, 2.0, inf, kernels::Chord{g.edges[0].radius}));
            break;
        }
        case NormTag::pencil_tilde: {
            require_family(g, FamilyTag::pencil, kind.tag);
            const double delta = g.scale;
            add("line_tilde", edges_sum(f, all_edges(g), 2.0, delta, kernels::Unit{}));
            if (complete) {
                add("exterior", parallel::sum_terms(g.edges.size(), [&](std::size_t e) {
                        return exterior_line(f.samples[e], f.spacing(e), delta, scale);
                    }));
            }
            std::vector<std::size_t> order = all_edges(g);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return g.edges[a].start.y < g.edges[b].start.y; });
            add("line_difference", parallel::sum_terms(order.size() - 1, [&](std::size_t k) {
                    const auto& lo = f.samples[order[k]];
                    const auto& hi = f.samples[order[k + 1]];
                    require(lo.size() == hi.size(), "pencil lines must share one sample grid");
                    std::vector<double> d(lo.size());
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] = hi[i] - lo[i];
                    return pl_square_integral(uniform_params(d.size() - 1, f.spacing(order[k])), d) / delta;
                }));
            break;
        }
        case NormTag::h_beta: {
            add("edge_double", edges_sum(f, all_edges(g), 1.0 + 2.0 * kind.beta, inf, kernels::Unit{}));
            break;
        }
    }
    std::vector<double> parts;
    for (const auto& t : r.breakdown) parts.push_back(t.value);
    r.value = parallel::pairwise_sum(parts);
    return r;
}

inline EdgeFunction halve(const EdgeFunction& f)
{
    EdgeFunction c = f;
    for (auto& v : c.samples) {
        std::vector<double> s;
        for (std::size_t i = 0; i < v.size(); i += 2) s.push_back(v[i]);
        v = std::move(s);
    }
    return c;
}

}  // namespace detail

/// Squared seminorm of `f` of the given kind, with its term breakdown.
inline NormReport seminorm(const EdgeFunction& f, const NormKind& kind, const NormOptions& opt = {})
{
    require(f.graph != nullptr, "edge function has no graph");
    NormReport r = detail::assemble(f, kind, opt);
    if (opt.refinement) {
        bool even = true;
        for (std::size_t e = 0; e < f.samples.size(); ++e) even = even && f.cells(e) % 2 == 0 && f.cells(e) >= 4;
        if (even) {
            NormOptions coarse = opt;
            coarse.refinement = false;
            const double half = detail::assemble(detail::halve(f), kind, coarse).value;
            r.refinement_estimate = r.value > 0.0 ? std::abs(r.value - half) / r.value : 0.0;
        }
    }
    return r;
}

}  // namespace tracelab
