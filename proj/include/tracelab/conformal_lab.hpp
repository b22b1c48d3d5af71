#pragma once

// Trace norms carried by conformal maps: the strip {0 < y < pi} with its
// two boundary lines, the sinh kernel, the quadrant, and the smooth step
// that separates the tilde norm from the full one.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "core.hpp"
#include "functions.hpp"
#include "graphs.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "seminorms.hpp"

namespace tracelab {

struct StripTrace {
    EdgeFunction f0;  // lower line
    EdgeFunction f1;  // upper line
};

struct StripNorm {
    double tilde0 = 0.0;
    double tilde1 = 0.0;
    double l2 = 0.0;  // int |f0 - f1|^2

    double total() const { return tilde0 + tilde1 + l2; }
};

namespace detail {

inline void require_line(const EdgeFunction& f, const char* what)
{
    require(f.graph && f.graph->edges.size() == 1 && f.graph->edges[0].horizontal() &&
                f.graph->edges[0].start.x < f.graph->edges[0].end.x,
            std::string(what) + " must live on a single left-to-right line");
}

inline void require_same_grid(const EdgeFunction& a, const EdgeFunction& b)
{
    require(a.samples[0].size() == b.samples[0].size() &&
                std::abs(a.graph->edges[0].start.x - b.graph->edges[0].start.x) < 1e-12 &&
                std::abs(a.graph->edges[0].length - b.graph->edges[0].length) < 1e-12,
            "both traces must share one window and resolution");
}

inline double l2_difference(const EdgeFunction& a, const EdgeFunction& b)
{
    std::vector<double> d(a.samples[0].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.samples[0][i] - b.samples[0][i];
    return pl_square_integral(uniform_params(d.size() - 1, a.spacing(0)), d);
}

}  // namespace detail

inline StripTrace make_strip_trace(EdgeFunction f0, EdgeFunction f1)
{
    detail::require_line(f0, "lower trace");
    detail::require_line(f1, "upper trace");
    detail::require_same_grid(f0, f1);
    return {std::move(f0), std::move(f1)};
}

/// (tilde norm of f0, tilde norm of f1, L^2 distance squared).
inline StripNorm strip_trace_norm(const StripTrace& t, const NormOptions& opt = {})
{
    detail::require_line(t.f0, "lower trace");
    detail::require_line(t.f1, "upper trace");
    detail::require_same_grid(t.f0, t.f1);
    StripNorm s;
    s.tilde0 = seminorm(t.f0, NormKind::of(NormTag::tilde_half_line), opt).value;
    s.tilde1 = seminorm(t.f1, NormKind::of(NormTag::tilde_half_line), opt).value;
    s.l2 = detail::l2_difference(t.f0, t.f1);
    return s;
}

namespace detail {

/// int_0^L (g(t) - g(0))^2 (coth(t/2) - 1) dt for samples ordered away from an end.
inline double sinh_exterior_end(std::span<const double> v, double h)
{
    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i] - v[0];
    const auto t = uniform_params(d.size() - 1, h);
    // coth(t/2) - 1 = 2/t + r(t) with r smooth
    const double singular = 2.0 * pl_square_over_t(t, d);
    const auto& gl = quad::gl4();
    const double smooth = parallel::sum_terms(d.size() - 1, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
            const double x = (static_cast<double>(i) + gl.nodes[a]) * h;
            const double g = d[i] + (d[i + 1] - d[i]) * gl.nodes[a];
            const double r = x < 1e-4 ? -1.0 + x / 6.0 : 1.0 / std::tanh(0.5 * x) - 1.0 - 2.0 / x;
            s += gl.weights[a] * g * g * r;
        }
        return s * h;
    });
    return singular + smooth;
}

}  // namespace detail

/// (1/4) int int |f(x) - f(y)|^2 / sinh^2((x - y)/2). With constant
/// extension the integral runs over the whole line, f held at its end
/// values outside the window.
inline NormReport sinh_kernel_report(const EdgeFunction& f, Exterior ext = Exterior::constant_extension)
{
    detail::require_line(f, "sinh kernel input");
    const auto& v = f.samples[0];
    const double h = f.spacing(0);
    NormReport r;
    r.kind = "sinh-kernel";
    r.window = f.graph->window;
    r.resolution = f.cells(0);
    r.spacing = h;
    const double inner = detail::uniform_double_integral(std::span<const double>(v), h, 0.0, 2.0, detail::inf,
                                                         kernels::Sinh{}, true);
    r.breakdown.push_back({"edge_double", inner});
    if (ext == Exterior::constant_extension) {
        std::vector<double> back(v.rbegin(), v.rend());
        const double L = f.graph->edges[0].length;
        const double jump = v.back() - v.front();
        const double cross = detail::sinh_exterior_end(v, h) + detail::sinh_exterior_end(back, h) -
                             2.0 * jump * jump * std::log1p(-std::exp(-L));
        r.breakdown.push_back({"exterior", cross});
    }
    r.value = 0.0;
    for (const auto& t : r.breakdown) r.value += t.value;
    return r;
}

inline double sinh_kernel_norm(const EdgeFunction& f, Exterior ext = Exterior::constant_extension)
{
    return sinh_kernel_report(f, ext).value;
}

/// Sinh-kernel form of the strip norm: both boundary lines plus the L^2 term.
inline double strip_sinh_total(const StripTrace& t, Exterior ext = Exterior::constant_extension)
{
    return sinh_kernel_norm(t.f0, ext) + sinh_kernel_norm(t.f1, ext) + sinh_kernel_norm(t.f1) + detail::l2_difference(t.f0, t.f1);
}

struct QuadrantNorm {
    double weighted0 = 0.0;  // int int |f0(x) - f0(y)|^2 xy / ((x+y)^2 (x-y)^2)
    double weighted1 = 0.0;
    double junction = 0.0;   // int |f0 - f1|^2 / x

    double total() const { return 4.0 * weighted0 + 4.0 * weighted1 + 2.0 * junction; }
};

/// The three quadrant integrals for traces on the two half-lines [0, R].
inline QuadrantNorm quadrant_trace_norm(const EdgeFunction& f0, const EdgeFunction& f1)
{
    detail::require_line(f0, "first half-line trace");
    detail::require_line(f1, "second half-line trace");
    detail::require_same_grid(f0, f1);
    require(std::abs(f0.graph->edges[0].start.x) < 1e-12, "half-line traces must start at 0");
    QuadrantNorm q;
    const double h = f0.spacing(0);
    q.weighted0 = detail::uniform_double_integral(std::span<const double>(f0.samples[0]), h, 0.0, 2.0, detail::inf,
                                                  kernels::Quadrant{}, true);
    q.weighted1 = detail::uniform_double_integral(std::span<const double>(f1.samples[0]), h, 0.0, 2.0, detail::inf,
                                                  kernels::Quadrant{}, true);
    std::vector<double> d(f0.samples[0].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = f0.samples[0][i] - f1.samples[0][i];
    q.junction = detail::pl_square_over_t(detail::uniform_params(d.size() - 1, h), d);
    return q;
}

struct GrowthRow {
    double R = 0.0;
    double full = 0.0;   // truncated full-kernel norm on [-R, R]^2
    double tilde = 0.0;  // tilde norm on [-R, R]
};

/// Full and tilde norms of a function family truncated to [-R, R] (no
/// exterior completion), per R.
inline std::vector<GrowthRow> counterexample_growth(const std::vector<double>& Rs, std::size_t per_unit = 16,
                                                    const FunctionFamily& fam = FunctionFamily::step())
{
    require(!Rs.empty(), "no window sizes given");
    for (std::size_t k = 1; k < Rs.size(); ++k) require(Rs[k] > Rs[k - 1], "window sizes must increase");
    NormOptions plain;
    plain.exterior = Exterior::none;
    std::vector<GrowthRow> rows;
    for (double R : Rs) {
        const auto f = sample_on_graph(fam, share(build_graph({FamilyTag::interval_line}, Window(R))),
                                       Resolution::per_unit(per_unit));
        rows.push_back({R, seminorm(f, NormKind::of(NormTag::half_line), plain).value,
                        seminorm(f, NormKind::of(NormTag::tilde_half_line), plain).value});
    }
    return rows;
}

/// Least-squares slope of the full norm against log R.
inline double log_slope(const std::vector<GrowthRow>& rows)
{
    require(rows.size() >= 2, "slope needs at least two windows");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double x = std::log(r.R);
        sx += x;
        sy += r.full;
        sxx += x * x;
        sxy += x * r.full;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tracelab
