#pragma once

// Sierpinski gasket (SG) and carpet (SC) graph approximations, their graph
// energies, energy-minimizing extensions, H^beta trace profiles on SG edges
// and the carpet resistance scaling.
//
// Vertices carry integer lattice coordinates at the level's resolution:
//   SG: basis e1 = (1, 0), e2 = (1/2, sqrt 3 / 2), scale 2^-m;
//   SC: the square lattice at scale 3^-m.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "core.hpp"
#include "functions.hpp"
#include "graphs.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "seminorms.hpp"

namespace tracelab {

enum class FractalKind { sg, sc };

inline std::string to_string(FractalKind k) { return k == FractalKind::sg ? "SG" : "SC"; }

inline constexpr int sg_max_level = 8;
inline constexpr int sc_max_level = 5;

/// beta = 1/2 + log(5/3) / log 4.
inline double sg_beta() { return 0.5 + std::log(5.0 / 3.0) / std::log(4.0); }

/// beta = 1/2 + log r / log 9.
inline double sc_beta(double r) { return 0.5 + std::log(r) / std::log(9.0); }

struct FractalApprox {
    using Coord = std::pair<long long, long long>;
    struct Link {
        std::size_t a = 0;
        std::size_t b = 0;
        double conductance = 1.0;
    };

    FractalKind kind = FractalKind::sg;
    int level = 0;
    std::vector<Coord> coords;
    std::vector<Point> vertices;
    std::vector<std::vector<int>> words;           // cell addresses, digits 0..2 (SG) or 1..8 (SC)
    std::vector<std::vector<std::size_t>> cells;   // SG: corners q0 q1 q2; SC: ll lr ur ul
    std::vector<Link> edges;
    std::map<Coord, std::size_t> index;

    double edge_length() const { return std::pow(kind == FractalKind::sg ? 2.0 : 3.0, -level); }
    long long side() const { return kind == FractalKind::sg ? (1LL << level) : static_cast<long long>(std::llround(std::pow(3.0, level))); }

    std::size_t find(const Coord& c) const
    {
        const auto it = index.find(c);
        require(it != index.end(), "no vertex at lattice coordinates (" + std::to_string(c.first) + ", " +
                                       std::to_string(c.second) + ")");
        return it->second;
    }
};

using FractalPtr = std::shared_ptr<const FractalApprox>;

namespace detail {

inline std::size_t add_vertex(FractalApprox& a, FractalApprox::Coord c)
{
    const auto [it, fresh] = a.index.emplace(c, a.coords.size());
    if (fresh) {
        a.coords.push_back(c);
        if (a.kind == FractalKind::sg) {
            const double s = std::ldexp(1.0, -a.level);
            a.vertices.push_back({(static_cast<double>(c.first) + 0.5 * static_cast<double>(c.second)) * s,
                                  0.5 * std::sqrt(3.0) * static_cast<double>(c.second) * s});
        } else {
            const double s = 1.0 / static_cast<double>(a.side());
            a.vertices.push_back({static_cast<double>(c.first) * s, static_cast<double>(c.second) * s});
        }
    }
    return it->second;
}

inline constexpr std::array<std::array<long long, 2>, 3> sg_q{{{0, 0}, {1, 0}, {0, 1}}};
// SC digits 1..8 counterclockwise from the lower-left subsquare.
inline constexpr std::array<std::array<long long, 2>, 9> sc_q{{{0, 0}, {0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

}  // namespace detail

inline FractalApprox build_fractal(FractalKind kind, int m)
{
    require(m >= 0, "fractal level must be nonnegative");
    require(m <= (kind == FractalKind::sg ? sg_max_level : sc_max_level),
            to_string(kind) + " level " + std::to_string(m) + " exceeds the desk bound " +
                std::to_string(kind == FractalKind::sg ? sg_max_level : sc_max_level));
    FractalApprox a;
    a.kind = kind;
    a.level = m;
    const int base = kind == FractalKind::sg ? 3 : 8;
    const int first = kind == FractalKind::sg ? 0 : 1;
    std::size_t count = 1;
    for (int k = 0; k < m; ++k) count *= static_cast<std::size_t>(base);
    std::vector<int> w(static_cast<std::size_t>(m), first);
    std::map<std::pair<std::size_t, std::size_t>, double> sc_sides;
    for (std::size_t c = 0; c < count; ++c) {
        // word c in base `base`, most significant digit first
        std::size_t r = c;
        for (int k = m - 1; k >= 0; --k) {
            w[static_cast<std::size_t>(k)] = first + static_cast<int>(r % static_cast<std::size_t>(base));
            r /= static_cast<std::size_t>(base);
        }
        long long ox = 0, oy = 0;
        for (int k = 0; k < m; ++k) {
            const long long mult = kind == FractalKind::sg ? (1LL << (m - 1 - k)) : static_cast<long long>(std::llround(std::pow(3.0, m - 1 - k)));
            const auto& q = kind == FractalKind::sg ? detail::sg_q[static_cast<std::size_t>(w[static_cast<std::size_t>(k)])]
                                                    : detail::sc_q[static_cast<std::size_t>(w[static_cast<std::size_t>(k)])];
            ox += mult * q[0];
            oy += mult * q[1];
        }
        a.words.push_back(w);
        if (kind == FractalKind::sg) {
            std::vector<std::size_t> v;
            for (const auto& q : detail::sg_q) v.push_back(detail::add_vertex(a, {ox + q[0], oy + q[1]}));
            a.cells.push_back(v);
            a.edges.push_back({v[0], v[1], 1.0});
            a.edges.push_back({v[1], v[2], 1.0});
            a.edges.push_back({v[0], v[2], 1.0});
        } else {
            std::vector<std::size_t> v{detail::add_vertex(a, {ox, oy}), detail::add_vertex(a, {ox + 1, oy}),
                                       detail::add_vertex(a, {ox + 1, oy + 1}), detail::add_vertex(a, {ox, oy + 1})};
            a.cells.push_back(v);
            for (int s = 0; s < 4; ++s) {
                auto key = std::minmax(v[static_cast<std::size_t>(s)], v[static_cast<std::size_t>((s + 1) % 4)]);
                sc_sides[{key.first, key.second}] += 0.5;
            }
        }
    }
    for (const auto& [key, c] : sc_sides) a.edges.push_back({key.first, key.second, c});
    return a;
}

inline FractalPtr share(FractalApprox a) { return std::make_shared<const FractalApprox>(std::move(a)); }

/// The approximation as a metric graph (for export and H^beta norms).
inline MetricGraph to_metric_graph(const FractalApprox& a)
{
    MetricGraph g;
    g.family = FamilyTag::custom;
    g.scale = a.edge_length();
    g.vertices = a.vertices;
    g.window = Window(0.5, {0.5, 0.5});
    for (const auto& l : a.edges) detail::add_segment(g, l.a, l.b);
    return g;
}

struct VertexFunction {
    FractalPtr approx;
    std::vector<double> values;
};

inline VertexFunction sample_vertices(FractalPtr a, const FunctionFamily& fam)
{
    VertexFunction f{a, {}};
    for (const Point& p : a->vertices) f.values.push_back(fam(p));
    return f;
}

/// Restriction of f to a coarser level m (its vertices are a subset).
inline VertexFunction restrict_level(const VertexFunction& f, int m)
{
    const FractalApprox& fine = *f.approx;
    require(m >= 0 && m <= fine.level, "restriction level must lie in [0, " + std::to_string(fine.level) + "]");
    if (m == fine.level) return f;
    auto coarse = share(build_fractal(fine.kind, m));
    const long long ratio = fine.side() / coarse->side();
    VertexFunction out{coarse, std::vector<double>(coarse->coords.size())};
    for (std::size_t v = 0; v < coarse->coords.size(); ++v) {
        const auto [x, y] = coarse->coords[v];
        out.values[v] = f.values[fine.find({x * ratio, y * ratio})];
    }
    return out;
}

/// f o Phi_i on a gasket one level down (i in 0..2), or on a carpet (i in 1..8).
inline VertexFunction compose_cell(const VertexFunction& f, int i)
{
    const FractalApprox& a = *f.approx;
    require(a.level >= 1, "composition needs level >= 1");
    auto sub = share(build_fractal(a.kind, a.level - 1));
    long long ox = 0, oy = 0;
    if (a.kind == FractalKind::sg) {
        require(i >= 0 && i <= 2, "SG cell index must be 0, 1 or 2");
        ox = sub->side() * detail::sg_q[static_cast<std::size_t>(i)][0];
        oy = sub->side() * detail::sg_q[static_cast<std::size_t>(i)][1];
    } else {
        require(i >= 1 && i <= 8, "SC cell index must lie in 1..8");
        ox = sub->side() * detail::sc_q[static_cast<std::size_t>(i)][0];
        oy = sub->side() * detail::sc_q[static_cast<std::size_t>(i)][1];
    }
    VertexFunction out{sub, std::vector<double>(sub->coords.size())};
    for (std::size_t v = 0; v < sub->coords.size(); ++v)
        out.values[v] = f.values[a.find({sub->coords[v].first + ox, sub->coords[v].second + oy})];
    return out;
}

/// Weighted graph energy sum_e c_e |f(a) - f(b)|^2.
inline double graph_energy(const VertexFunction& f)
{
    const auto& e = f.approx->edges;
    std::vector<double> terms(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double d = f.values[e[k].a] - f.values[e[k].b];
        terms[k] = e[k].conductance * d * d;
    }
    return parallel::pairwise_sum(terms);
}

/// E_m(f): sum over cells of the squared differences of each unordered corner pair.
inline double sg_graph_energy(const VertexFunction& f, int m)
{
    require(f.approx->kind == FractalKind::sg, "sg_graph_energy needs gasket data");
    return graph_energy(restrict_level(f, m));
}

inline double sg_graph_energy(const VertexFunction& f) { return sg_graph_energy(f, f.approx->level); }

/// Grid energy of SC_m with conductance 1/2 per cell side.
inline double sc_graph_energy(const VertexFunction& f)
{
    require(f.approx->kind == FractalKind::sc, "sc_graph_energy needs carpet data");
    return graph_energy(f);
}

struct ExtensionResult {
    VertexFunction f;
    std::size_t iterations = 0;
    double residual = 0.0;
};

namespace detail {

/// Minimizes the graph energy with the vertices in `fixed` held at `values`.
inline ExtensionResult minimize_energy(FractalPtr a, const std::vector<char>& fixed, std::vector<double> values)
{
    const std::size_t n = a->coords.size();
    std::vector<long long> id(n, -1);
    std::size_t nfree = 0;
    for (std::size_t v = 0; v < n; ++v)
        if (!fixed[v]) id[v] = static_cast<long long>(nfree++);
    ExtensionResult out;
    if (nfree > 0) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> t;
        std::vector<double> b(nfree, 0.0);
        for (const auto& l : a->edges) {
            const long long ia = id[l.a], ib = id[l.b];
            if (ia >= 0) t.emplace_back(ia, ia, l.conductance);
            if (ib >= 0) t.emplace_back(ib, ib, l.conductance);
            if (ia >= 0 && ib >= 0) {
                t.emplace_back(ia, ib, -l.conductance);
                t.emplace_back(ib, ia, -l.conductance);
            } else if (ia >= 0) {
                b[static_cast<std::size_t>(ia)] += l.conductance * values[l.b];
            } else if (ib >= 0) {
                b[static_cast<std::size_t>(ib)] += l.conductance * values[l.a];
            }
        }
        const auto sol = linalg::conjugate_gradient(linalg::from_triplets(nfree, std::move(t)), b, 1e-13);
        for (std::size_t v = 0; v < n; ++v)
            if (id[v] >= 0) values[v] = sol.x[static_cast<std::size_t>(id[v])];
        out.iterations = sol.iterations;
        out.residual = sol.residual;
    }
    out.f = VertexFunction{std::move(a), std::move(values)};
    return out;
}

}  // namespace detail

/// Energy-minimizing extension of level-m data to level m2 >= m.
inline ExtensionResult sg_harmonic_extend(const VertexFunction& f, int m2)
{
    const FractalApprox& a = *f.approx;
    require(a.kind == FractalKind::sg, "sg_harmonic_extend needs gasket data");
    require(m2 >= a.level, "target level must not be coarser than the data");
    auto fine = share(build_fractal(FractalKind::sg, m2));
    const long long ratio = fine->side() / a.side();
    std::vector<char> fixed(fine->coords.size(), 0);
    std::vector<double> values(fine->coords.size(), 0.0);
    for (std::size_t v = 0; v < a.coords.size(); ++v) {
        const std::size_t w = fine->find({a.coords[v].first * ratio, a.coords[v].second * ratio});
        fixed[w] = 1;
        values[w] = f.values[v];
    }
    return detail::minimize_energy(fine, fixed, std::move(values));
}

/// Level-0 boundary data (q0, q1, q2) as a VertexFunction.
inline VertexFunction sg_boundary(double v0, double v1, double v2)
{
    auto a = share(build_fractal(FractalKind::sg, 0));
    VertexFunction f{a, std::vector<double>(3)};
    f.values[a->find({0, 0})] = v0;
    f.values[a->find({1, 0})] = v1;
    f.values[a->find({0, 1})] = v2;
    return f;
}

struct RenormalizedRow {
    int m = 0;
    double energy = 0.0;        // E_m
    double renormalized = 0.0;  // (5/3)^m E_m
};

struct RenormalizedProfile {
    std::vector<RenormalizedRow> rows;
    bool monotone = true;       // nondecreasing up to 1e-12 relative slack
    double limit_estimate = 0.0;  // last value plus last increment
};

inline RenormalizedProfile sg_renormalized_profile(const VertexFunction& f)
{
    require(f.approx->kind == FractalKind::sg, "profile needs gasket data");
    require(f.approx->level >= 2, "profile needs data at level >= 2");
    RenormalizedProfile p;
    for (int m = 0; m <= f.approx->level; ++m) {
        const double e = sg_graph_energy(f, m);
        p.rows.push_back({m, e, std::pow(5.0 / 3.0, m) * e});
    }
    for (std::size_t k = 1; k < p.rows.size(); ++k)
        if (p.rows[k].renormalized < p.rows[k - 1].renormalized * (1.0 - 1e-12) - 1e-300) p.monotone = false;
    const auto& last = p.rows.back();
    p.limit_estimate = last.renormalized + (last.renormalized - p.rows[p.rows.size() - 2].renormalized);
    return p;
}

struct HBetaRow {
    int m = 0;
    double norm = 0.0;          // sum over SG_m edges of the H^beta edge integrals
    double renormalized = 0.0;  // (5/3)^m E_m of the same data
};

/// Piecewise-linear traces of level-M data on the edges of SG_m.
inline EdgeFunction sg_edge_trace(const VertexFunction& f, int m)
{
    const FractalApprox& fine = *f.approx;
    require(fine.kind == FractalKind::sg, "edge traces need gasket data");
    require(m >= 0 && m <= fine.level, "edge level must not exceed the data level");
    const auto coarse = build_fractal(FractalKind::sg, m);
    const long long k = fine.side() / coarse.side();
    EdgeFunction out;
    out.graph = share(to_metric_graph(coarse));
    for (const auto& l : coarse.edges) {
        const auto [ax, ay] = coarse.coords[l.a];
        const auto [bx, by] = coarse.coords[l.b];
        std::vector<double> s;
        for (long long t = 0; t <= k; ++t) {
            const long long x = ax * k + (bx - ax) * t, y = ay * k + (by - ay) * t;
            s.push_back(f.values[fine.find({x, y})]);
        }
        out.samples.push_back(std::move(s));
    }
    out.continuous = true;
    return out;
}

/// H^beta(SG_m) norms of the edge traces of f for m = 0..depth.
inline std::vector<HBetaRow> h_beta_trace_profile(const VertexFunction& f, double beta, int depth)
{
    const NormKind kind = NormKind::h_beta(beta);
    require(depth >= 0 && depth < f.approx->level, "trace depth must be below the data level");
    std::vector<HBetaRow> rows;
    for (int m = 0; m <= depth; ++m) {
        const auto tr = sg_edge_trace(f, m);
        HBetaRow r;
        r.m = m;
        r.norm = seminorm(tr, kind).value;
        r.renormalized = std::pow(5.0 / 3.0, m) * sg_graph_energy(f, m);
        rows.push_back(r);
    }
    return rows;
}

struct ResistanceRow {
    int m = 0;
    double resistance = 0.0;
    double ratio = 0.0;  // R_m / R_{m-1}; 0 for m = 0
    std::size_t vertices = 0;
};

/// Left-right effective resistance of SC_m: 1 / min energy with x = 0 held
/// at 0 and x = 1 held at 1.
inline double sc_resistance(int m)
{
    auto a = share(build_fractal(FractalKind::sc, m));
    const long long n = a->side();
    std::vector<char> fixed(a->coords.size(), 0);
    std::vector<double> values(a->coords.size(), 0.0);
    for (std::size_t v = 0; v < a->coords.size(); ++v) {
        if (a->coords[v].first == 0) fixed[v] = 1;
        if (a->coords[v].first == n) {
            fixed[v] = 1;
            values[v] = 1.0;
        }
    }
    const auto ext = detail::minimize_energy(a, fixed, std::move(values));
    return 1.0 / sc_graph_energy(ext.f);
}

inline std::vector<ResistanceRow> sc_renorm_estimate(int max_level)
{
    require(max_level >= 1 && max_level <= sc_max_level, "carpet resistance levels must lie in 1.." + std::to_string(sc_max_level));
    std::vector<ResistanceRow> rows;
    for (int m = 0; m <= max_level; ++m) {
        ResistanceRow r;
        r.m = m;
        r.resistance = sc_resistance(m);
        r.ratio = rows.empty() ? 0.0 : r.resistance / rows.back().resistance;
        r.vertices = build_fractal(FractalKind::sc, m).coords.size();
        rows.push_back(r);
    }
    return rows;
}

}  // namespace tracelab
