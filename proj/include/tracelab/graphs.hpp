#pragma once

// Metric graphs embedded in the plane and builders for the graph families
// used throughout the library (lines, half-line pairs, the integer graph,
// squares, graph paper, circles and pencils of parallel lines).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace tracelab {

enum class EdgeShape { segment, arc };

/// An edge with an arclength parameterization e(s), s in [0, length].
/// Segments run from vertex `a` to vertex `b`; arcs run counterclockwise
/// around `center` starting at angle `angle0`.
struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    double length = 0.0;
    EdgeShape shape = EdgeShape::segment;
    Point start{};
    Point end{};
    Point center{};
    double radius = 0.0;
    double angle0 = 0.0;
    // Index of this edge in the graph it was restricted from (own index otherwise).
    std::size_t parent = 0;

    /// Point at fraction t of the edge; t = 0 and t = 1 hit the endpoints exactly.
    Point at_fraction(double t) const
    {
        if (shape == EdgeShape::segment) return lerp(start, end, t);
        if (t == 0.0) return start;
        if (t == 1.0) return end;
        const double ang = angle0 + t * length / radius;
        return {center.x + radius * std::cos(ang), center.y + radius * std::sin(ang)};
    }

    Point at(double s) const { return at_fraction(s / length); }

    bool horizontal() const { return shape == EdgeShape::segment && start.y == end.y; }
    bool vertical() const { return shape == EdgeShape::segment && start.x == end.x; }
};

/// One side of a junction: the edge and whether junction parameter 0 is the
/// edge's own start (vertex `a`) or its end (vertex `b`).
struct JunctionEnd {
    std::size_t edge = 0;
    bool from_start = true;
};

/// How a junction pair enters the graph-paper norm.
enum class JunctionRole {
    corner_primary,  // horizontal-vertical pair weighted by the graph-paper norm
    corner_other,    // horizontal-vertical pair stored but unweighted there
    straight,        // the two continuations of one straight line
};

struct Junction {
    JunctionEnd first;
    JunctionEnd second;
    std::size_t vertex = 0;
    JunctionRole role = JunctionRole::straight;
};

enum class FamilyTag { interval_line, half_line_pair, integer_graph, square, graph_paper, circle, pencil, custom };

inline std::string to_string(FamilyTag t)
{
    switch (t) {
        case FamilyTag::interval_line: return "interval-line";
        case FamilyTag::half_line_pair: return "half-line-pair";
        case FamilyTag::integer_graph: return "integer-graph";
        case FamilyTag::square: return "square";
        case FamilyTag::graph_paper: return "graph-paper";
        case FamilyTag::circle: return "circle";
        case FamilyTag::pencil: return "pencil";
        case FamilyTag::custom: return "custom";
    }
    return "unknown";
}

struct GraphFamily {
    FamilyTag tag = FamilyTag::interval_line;
    double scale = 1.0;   // delta for square / graph paper / pencil / integer graph
    double radius = 1.0;  // circle
};

struct MetricGraph {
    std::vector<Point> vertices;
    std::vector<Edge> edges;
    std::vector<Junction> junctions;
    FamilyTag family = FamilyTag::custom;
    double scale = 1.0;
    Window window{};

    bool empty() const { return edges.empty(); }

    /// Value point of junction side `end` at distance s from the shared vertex.
    Point junction_point(const JunctionEnd& end, double s) const
    {
        const Edge& e = edges[end.edge];
        return end.from_start ? e.at(s) : e.at(e.length - s);
    }
};

using GraphPtr = std::shared_ptr<const MetricGraph>;

inline GraphPtr share(MetricGraph g) { return std::make_shared<const MetricGraph>(std::move(g)); }

namespace detail {

inline std::size_t add_segment(MetricGraph& g, std::size_t a, std::size_t b)
{
    Edge e;
    e.a = a;
    e.b = b;
    e.start = g.vertices[a];
    e.end = g.vertices[b];
    e.length = distance(e.start, e.end);
    e.parent = g.edges.size();
    g.edges.push_back(e);
    return g.edges.size() - 1;
}

// Integer lattice index range covering [lo, hi] at spacing delta.
inline std::pair<long long, long long> lattice_range(double lo, double hi, double delta)
{
    const double eps = 1e-9;
    const auto first = static_cast<long long>(std::ceil(lo / delta - eps));
    const auto last = static_cast<long long>(std::floor(hi / delta + eps));
    return {first, last};
}

// Direction of an incident edge as seen from a vertex.
enum Dir { right = 0, up = 1, left = 2, down = 3 };

inline void add_lattice_junctions(MetricGraph& g)
{
    // Incident edges per vertex, keyed by direction.
    std::vector<std::array<long long, 4>> incident(g.vertices.size());
    for (auto& arr : incident) arr.fill(-1);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        const bool hor = e.horizontal();
        // Edges are built with start at the lower-left end.
        incident[e.a][hor ? right : up] = static_cast<long long>(i);
        incident[e.b][hor ? left : down] = static_cast<long long>(i);
    }
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const auto& inc = incident[v];
        for (int d1 = 0; d1 < 4; ++d1) {
            for (int d2 = d1 + 1; d2 < 4; ++d2) {
                if (inc[d1] < 0 || inc[d2] < 0) continue;
                Junction j;
                j.first = {static_cast<std::size_t>(inc[d1]), d1 == right || d1 == up};
                j.second = {static_cast<std::size_t>(inc[d2]), d2 == right || d2 == up};
                j.vertex = v;
                if ((d1 == right && d2 == left) || (d1 == up && d2 == down)) {
                    j.role = JunctionRole::straight;
                } else if ((d1 == right && d2 == up) || (d1 == left && d2 == down)) {
                    j.role = JunctionRole::corner_primary;
                } else {
                    j.role = JunctionRole::corner_other;
                }
                g.junctions.push_back(j);
            }
        }
    }
}

inline void build_grid_paper(MetricGraph& g, const Window& w, double delta)
{
    const auto [i0, i1] = lattice_range(w.xmin(), w.xmax(), delta);
    const auto [j0, j1] = lattice_range(w.ymin(), w.ymax(), delta);
    require(i1 > i0 && j1 > j0,
            "window of half-width " + std::to_string(w.half_width) + " holds no full graph-paper cell of side " +
                std::to_string(delta));
    const std::size_t nx = static_cast<std::size_t>(i1 - i0 + 1);
    const std::size_t ny = static_cast<std::size_t>(j1 - j0 + 1);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            g.vertices.push_back({static_cast<double>(i0 + static_cast<long long>(i)) * delta,
                                  static_cast<double>(j0 + static_cast<long long>(j)) * delta});
    auto id = [nx](std::size_t i, std::size_t j) { return j * nx + i; };
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i + 1 < nx; ++i) add_segment(g, id(i, j), id(i + 1, j));
    for (std::size_t j = 0; j + 1 < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) add_segment(g, id(i, j), id(i, j + 1));
    add_lattice_junctions(g);
}

}  // namespace detail

/// Builds the truncation of a graph family to a window.
inline MetricGraph build_graph(const GraphFamily& family, const Window& window)
{
    using namespace detail;
    MetricGraph g;
    g.family = family.tag;
    g.scale = family.scale;
    g.window = window;
    const Point c = window.center;
    const double r = window.half_width;

    switch (family.tag) {
        case FamilyTag::interval_line: {
            g.vertices = {{c.x - r, c.y}, {c.x + r, c.y}};
            add_segment(g, 0, 1);
            break;
        }
        case FamilyTag::half_line_pair: {
            g.vertices = {c, {c.x + r, c.y}, {c.x - r, c.y}};
            add_segment(g, 0, 1);
            add_segment(g, 0, 2);
            g.junctions.push_back({{0, true}, {1, true}, 0, JunctionRole::straight});
            break;
        }
        case FamilyTag::integer_graph: {
            require(family.scale > 0.0, "integer graph spacing must be positive");
            const auto [k0, k1] = lattice_range(window.xmin(), window.xmax(), family.scale);
            require(k1 > k0, "window holds no full edge of the integer graph");
            for (long long k = k0; k <= k1; ++k) g.vertices.push_back({static_cast<double>(k) * family.scale, c.y});
            for (std::size_t i = 0; i + 1 < g.vertices.size(); ++i) add_segment(g, i, i + 1);
            for (std::size_t i = 1; i + 1 < g.vertices.size(); ++i)
                g.junctions.push_back({{i, true}, {i - 1, false}, i, JunctionRole::straight});
            break;
        }
        case FamilyTag::square: {
            const double d = family.scale;
            require(d > 0.0, "square side must be positive");
            require(2.0 * r >= d * (1.0 - 1e-12), "window too small for one square of side " + std::to_string(d));
            const Point o{c.x - 0.5 * d, c.y - 0.5 * d};
            g.vertices = {o, {o.x + d, o.y}, {o.x + d, o.y + d}, {o.x, o.y + d}};
            add_segment(g, 0, 1);  // bottom
            add_segment(g, 1, 2);  // right
            add_segment(g, 3, 2);  // top
            add_segment(g, 0, 3);  // left
            g.junctions = {
                {{0, true}, {3, true}, 0, JunctionRole::corner_primary},
                {{0, false}, {1, true}, 1, JunctionRole::corner_primary},
                {{1, false}, {2, false}, 2, JunctionRole::corner_primary},
                {{2, true}, {3, false}, 3, JunctionRole::corner_primary},
            };
            break;
        }
        case FamilyTag::graph_paper: {
            require(family.scale > 0.0, "graph paper spacing must be positive");
            build_grid_paper(g, window, family.scale);
            break;
        }
        case FamilyTag::circle: {
            require(family.radius > 0.0, "circle radius must be positive");
            g.vertices = {{c.x + family.radius, c.y}};
            Edge e;
            e.shape = EdgeShape::arc;
            e.center = c;
            e.radius = family.radius;
            e.length = 2.0 * pi * family.radius;
            e.start = e.end = g.vertices[0];
            g.edges.push_back(e);
            g.junctions.push_back({{0, true}, {0, false}, 0, JunctionRole::straight});
            break;
        }
        case FamilyTag::pencil: {
            const double d = family.scale;
            require(d > 0.0, "pencil spacing must be positive");
            const auto [k0, k1] = lattice_range(window.ymin(), window.ymax(), d);
            require(k1 > k0, "window holds fewer than two pencil lines at spacing " + std::to_string(d));
            for (long long k = k0; k <= k1; ++k) {
                const double y = static_cast<double>(k) * d;
                g.vertices.push_back({window.xmin(), y});
                g.vertices.push_back({window.xmax(), y});
                add_segment(g, g.vertices.size() - 2, g.vertices.size() - 1);
            }
            break;
        }
        case FamilyTag::custom: throw Rejection("custom graphs have no builder");
    }
    return g;
}

/// Keeps the edges contained in `region`, the junctions whose two edges
/// survive, and the vertices used by surviving edges.
inline MetricGraph restrict_graph(const MetricGraph& g, const Window& region)
{
    MetricGraph out;
    out.family = g.family;
    out.scale = g.scale;
    out.window = region;
    std::vector<long long> vmap(g.vertices.size(), -1), emap(g.edges.size(), -1);
    auto keep_vertex = [&](std::size_t v) {
        if (vmap[v] < 0) {
            vmap[v] = static_cast<long long>(out.vertices.size());
            out.vertices.push_back(g.vertices[v]);
        }
        return static_cast<std::size_t>(vmap[v]);
    };
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        bool inside = region.contains(e.start) && region.contains(e.end);
        if (inside && e.shape == EdgeShape::arc) {
            for (int k = 1; k < 64 && inside; ++k) inside = region.contains(e.at_fraction(k / 64.0));
        }
        if (!inside) continue;
        Edge copy = e;
        copy.a = keep_vertex(e.a);
        copy.b = keep_vertex(e.b);
        copy.parent = g.edges[i].parent;
        emap[i] = static_cast<long long>(out.edges.size());
        out.edges.push_back(copy);
    }
    for (const Junction& j : g.junctions) {
        if (emap[j.first.edge] < 0 || emap[j.second.edge] < 0) continue;
        Junction c = j;
        c.first.edge = static_cast<std::size_t>(emap[j.first.edge]);
        c.second.edge = static_cast<std::size_t>(emap[j.second.edge]);
        c.vertex = static_cast<std::size_t>(vmap[j.vertex] >= 0 ? vmap[j.vertex] : 0);
        out.junctions.push_back(c);
    }
    return out;
}

/// Checks the metric-graph invariants; returns an empty string when valid.
inline std::string validate(const MetricGraph& g, double tol = 1e-12)
{
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const Edge& e = g.edges[i];
        if (!(e.length > 0.0)) return "edge " + std::to_string(i) + " has nonpositive length";
        if (e.shape == EdgeShape::segment) {
            const double d = distance(e.start, e.end);
            if (std::abs(d - e.length) > tol * std::max(1.0, d))
                return "edge " + std::to_string(i) + " length differs from its embedded endpoint distance";
            if (!(e.start == g.vertices[e.a]) || !(e.end == g.vertices[e.b]))
                return "edge " + std::to_string(i) + " endpoints do not match its vertices";
        }
    }
    std::map<std::pair<std::size_t, std::size_t>, int> seen;
    for (std::size_t k = 0; k < g.junctions.size(); ++k) {
        const Junction& j = g.junctions[k];
        const Point p = g.junction_point(j.first, 0.0);
        const Point q = g.junction_point(j.second, 0.0);
        if (distance(p, q) > tol * std::max(1.0, std::hypot(p.x, p.y)))
            return "junction " + std::to_string(k) + " edges do not meet at parameter 0";
        auto key = std::minmax(j.first.edge, j.second.edge);
        if (j.first.edge != j.second.edge && ++seen[{key.first, key.second}] > 1)
            return "junction pair (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                   ") listed twice";
    }
    return {};
}

inline nlohmann::json to_json(const MetricGraph& g)
{
    nlohmann::json j;
    j["family"] = to_string(g.family);
    auto& v = j["vertices"] = nlohmann::json::array();
    for (const Point& p : g.vertices) v.push_back({p.x, p.y});
    auto& e = j["edges"] = nlohmann::json::array();
    for (const Edge& ed : g.edges) e.push_back({{"a", ed.a}, {"b", ed.b}, {"len", ed.length}});
    auto& jn = j["junctions"] = nlohmann::json::array();
    for (const Junction& x : g.junctions) jn.push_back({x.first.edge, x.second.edge});
    return j;
}

}  // namespace tracelab
