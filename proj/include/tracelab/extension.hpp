#pragma once

// Plane energy, Poisson extension from a line, even reflection and the
// discrete harmonic fill of a square.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "functions.hpp"
#include "graphs.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

namespace tracelab {

struct EnergyReport {
    double value = 0.0;
    double spacing = 0.0;
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    std::size_t nx = 0, ny = 0;
    std::vector<double> cells;  // per cell, row-major in j, when requested
};

/// Energy of the grid cell with lower-left node (i, j): half the sum of the
/// squared differences along its four edges. On a cell of side h this is
/// the integral of |grad F|^2 for linear F; over a grid it is the
/// trapezoid-weighted edge energy, minimized by the 5-point harmonic field.
inline double cell_energy(const PlaneField& F, std::size_t i, std::size_t j)
{
    const double a = F.at(i, j), b = F.at(i + 1, j), c = F.at(i, j + 1), d = F.at(i + 1, j + 1);
    return 0.5 * ((b - a) * (b - a) + (d - c) * (d - c) + (c - a) * (c - a) + (d - b) * (d - b));
}

/// Discrete int |grad F|^2 over the field. Cells never straddle a node row,
/// so a seam at a grid row (y = 0 of a Poisson extension) is differenced
/// from each side separately.
inline EnergyReport plane_energy(const PlaneField& F, bool per_cell = false)
{
    require(F.nx >= 8 && F.ny >= 8, "plane_energy needs a grid of at least 8x8 nodes");
    EnergyReport r;
    r.spacing = F.h;
    r.xmin = F.x0;
    r.xmax = F.xmax();
    r.ymin = F.y0;
    r.ymax = F.ymax();
    r.nx = F.nx;
    r.ny = F.ny;
    const std::size_t cx = F.nx - 1, cy = F.ny - 1;
    std::vector<double> rows(cy);
    if (per_cell) r.cells.assign(cx * cy, 0.0);
    parallel::for_each_index(cy, [&](std::size_t j) {
        std::vector<double> row(cx);
        for (std::size_t i = 0; i < cx; ++i) row[i] = cell_energy(F, i, j);
        rows[j] = parallel::pairwise_sum(row);
        if (per_cell) std::copy(row.begin(), row.end(), r.cells.begin() + static_cast<std::ptrdiff_t>(j * cx));
    });
    r.value = parallel::pairwise_sum(rows);
    return r;
}

struct PoissonExtension {
    PlaneField field;
    std::vector<std::string> warnings;
    double left_value = 0.0;   // exterior value used left of the data
    double right_value = 0.0;  // and right of it
};

namespace detail {

// Antiderivatives in u = t - x of the Poisson kernel |y| / (pi (u^2 + y^2))
// and of u times it.
inline double poisson_a(double u, double ay) { return std::atan(u / ay) / pi; }
inline double poisson_b(double u, double ay) { return ay / (2.0 * pi) * std::log(u * u + ay * ay); }

}  // namespace detail

/// F(x, y) = (|y| / pi) int f(t) / ((x - t)^2 + y^2) dt, integrated exactly
/// for the linear interpolant of f; outside the data f continues with its
/// end values (closed-form kernel tails). F(x, 0) = f(x).
inline PoissonExtension poisson_extend(const EdgeFunction& f, double h, const Window& window)
{
    require(f.graph && f.graph->edges.size() == 1 && f.graph->edges[0].horizontal(),
            "poisson_extend needs a function on a single horizontal line");
    const Edge& e = f.graph->edges[0];
    require(e.start.x < e.end.x, "line must run left to right");
    const auto& v = f.samples[0];
    const std::size_t nf = v.size() - 1;
    const double hf = f.spacing(0);
    const double xa = e.start.x;
    const double va = v.front(), vb = v.back();

    PoissonExtension out;
    out.field = PlaneField::over(window, h);
    out.left_value = va;
    out.right_value = vb;
    const double scale = f.max_abs();
    if (std::max(std::abs(va), std::abs(vb)) > 1e-3 * scale)
        out.warnings.push_back("function does not decay at the window edges; exterior continued by the end values");

    PlaneField& F = out.field;
    const long long jmid = integral_ratio(-F.y0 / h);
    require(jmid >= 0 && static_cast<std::size_t>(jmid) < F.ny, "plane window must contain the line y = 0");
    const auto j0 = static_cast<std::size_t>(jmid);

    std::vector<double> slope(nf);
    for (std::size_t k = 0; k < nf; ++k) slope[k] = (v[k + 1] - v[k]) / hf;

    // Offsets t_k - x_i are multiples of hf when the plane nodes sit on the data grid.
    const long long q = integral_ratio(h / hf);
    const double shift_exact = (xa - F.x0) / hf;
    const auto shift = static_cast<long long>(std::llround(shift_exact));
    const bool aligned = q >= 1 && std::abs(shift_exact - static_cast<double>(shift)) < 1e-9;
    const long long q_or = aligned ? q : 0;
    const long long shift_or = aligned ? shift : 0;

    auto row_values = [&](std::size_t j) {
        const double ay = std::abs(F.y(j));
        const std::size_t nx = F.nx;
        if (aligned) {
            // offset index o = (t - x_i) / hf ranges over [shift - q (nx-1), shift + nf]
            const long long omin = shift_or - q_or * static_cast<long long>(nx - 1);
            const long long omax = shift_or + static_cast<long long>(nf);
            std::vector<double> A(static_cast<std::size_t>(omax - omin + 1)), B(A.size());
            for (std::size_t m = 0; m < A.size(); ++m) {
                const double u = static_cast<double>(omin + static_cast<long long>(m)) * hf;
                A[m] = detail::poisson_a(u, ay);
                B[m] = detail::poisson_b(u, ay);
            }
            for (std::size_t i = 0; i < nx; ++i) {
                const long long o = shift_or - q_or * static_cast<long long>(i) - omin;  // index of t_0 - x_i
                std::vector<double> terms(nf + 2);
                for (std::size_t k = 0; k < nf; ++k) {
                    const auto m = static_cast<std::size_t>(o) + k;
                    const double dA = A[m + 1] - A[m], dB = B[m + 1] - B[m];
                    const double rel = static_cast<double>(o + omin + static_cast<long long>(k)) * hf;  // t_k - x_i
                    terms[k] = v[k] * dA + slope[k] * (dB - rel * dA);
                }
                terms[nf] = va * (A[static_cast<std::size_t>(o)] + 0.5);
                terms[nf + 1] = vb * (0.5 - A[static_cast<std::size_t>(o) + nf]);
                F.at(i, j) = parallel::pairwise_sum(terms);
            }
            return;
        }
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = F.x(i);
            std::vector<double> terms(nf + 2);
            for (std::size_t k = 0; k < nf; ++k) {
                const double u0 = xa + static_cast<double>(k) * hf - x, u1 = u0 + hf;
                const double dA = detail::poisson_a(u1, ay) - detail::poisson_a(u0, ay);
                const double dB = detail::poisson_b(u1, ay) - detail::poisson_b(u0, ay);
                terms[k] = v[k] * dA + slope[k] * (dB - u0 * dA);
            }
            terms[nf] = va * (detail::poisson_a(xa - x, ay) + 0.5);
            terms[nf + 1] = vb * (0.5 - detail::poisson_a(e.end.x - x, ay));
            F.at(i, j) = parallel::pairwise_sum(terms);
        }
    };

    // Rows with y > 0 are computed; rows with y < 0 mirror them when possible.
    std::vector<std::size_t> todo;
    for (std::size_t j = 0; j < F.ny; ++j) {
        if (j == j0) continue;
        const bool mirrored = j < j0 && 2 * j0 - j < F.ny;
        if (!mirrored) todo.push_back(j);
    }
    parallel::for_each_index(todo.size(), [&](std::size_t k) { row_values(todo[k]); });
    for (std::size_t j = 0; j < j0; ++j)
        if (2 * j0 - j < F.ny)
            for (std::size_t i = 0; i < F.nx; ++i) F.at(i, j) = F.at(i, 2 * j0 - j);
    for (std::size_t i = 0; i < F.nx; ++i) {
        const double x = F.x(i);
        F.at(i, j0) = x <= xa ? va : (x >= e.end.x ? vb : f.at(0, x - xa));
    }
    return out;
}

/// Mirror of a field given on y >= 0 (its lowest row at y = 0).
inline PlaneField even_reflection(const PlaneField& upper)
{
    require(std::abs(upper.y0) <= 1e-12 * upper.h, "even_reflection needs a field whose lowest row is y = 0");
    PlaneField out(upper.x0, -upper.ymax(), upper.h, upper.nx, 2 * upper.ny - 1);
    for (std::size_t j = 0; j < out.ny; ++j) {
        const std::size_t src = j >= upper.ny - 1 ? j - (upper.ny - 1) : (upper.ny - 1) - j;
        for (std::size_t i = 0; i < out.nx; ++i) out.at(i, j) = upper.at(i, src);
    }
    return out;
}

/// Upper half (y >= 0) of a field whose window contains the row y = 0.
inline PlaneField upper_half(const PlaneField& F)
{
    const long long j0 = integral_ratio(-F.y0 / F.h);
    require(j0 >= 0 && static_cast<std::size_t>(j0) + 1 < F.ny, "field has no row at y = 0");
    PlaneField out(F.x0, 0.0, F.h, F.nx, F.ny - static_cast<std::size_t>(j0));
    for (std::size_t j = 0; j < out.ny; ++j)
        for (std::size_t i = 0; i < F.nx; ++i) out.at(i, j) = F.at(i, j + static_cast<std::size_t>(j0));
    return out;
}

struct HarmonicFill {
    PlaneField field;
    std::size_t iterations = 0;
    double residual = 0.0;
};

namespace detail {

/// Solves the 5-point Laplace equation inside a node block whose boundary
/// ring is already set in F.
inline HarmonicFill fill_block(PlaneField F)
{
    const std::size_t nx = F.nx, ny = F.ny;
    HarmonicFill out;
    if (nx <= 2 || ny <= 2) {
        out.field = std::move(F);
        return out;
    }
    const std::size_t mx = nx - 2, my = ny - 2;
    auto id = [&](std::size_t i, std::size_t j) { return (j - 1) * mx + (i - 1); };
    std::vector<std::tuple<std::size_t, std::size_t, double>> t;
    std::vector<double> b(mx * my, 0.0);
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const std::size_t r = id(i, j);
            t.emplace_back(r, r, 4.0);
            const std::size_t nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& q : nb) {
                if (q[0] == 0 || q[1] == 0 || q[0] + 1 == nx || q[1] + 1 == ny)
                    b[r] += F.at(q[0], q[1]);
                else
                    t.emplace_back(r, id(q[0], q[1]), -1.0);
            }
        }
    const auto A = linalg::from_triplets(mx * my, std::move(t));
    const auto sol = linalg::conjugate_gradient(A, b, 1e-12);
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i) F.at(i, j) = sol.x[id(i, j)];
    out.field = std::move(F);
    out.iterations = sol.iterations;
    out.residual = sol.residual;
    return out;
}

}  // namespace detail

/// Discrete harmonic extension of boundary data given on a square graph.
inline HarmonicFill harmonic_fill_square(const EdgeFunction& boundary, double h)
{
    require(boundary.graph && boundary.graph->family == FamilyTag::square, "harmonic_fill_square needs a square graph");
    const MetricGraph& g = *boundary.graph;
    const double delta = g.edges[0].length;
    const long long q = integral_ratio(delta / h);
    require(q >= 2, "square side must be an integer multiple (>= 2) of the grid spacing");
    require(max_junction_jump(boundary) <= 1e-12 * std::max(1.0, boundary.max_abs()),
            "boundary data must be continuous at the corners");
    const auto n = static_cast<std::size_t>(q);
    const Point o = g.vertices[0];
    PlaneField F(o.x, o.y, h, n + 1, n + 1);
    // Edges: bottom 0->1, right 1->2, top 3->2, left 0->3; all oriented left-to-right or bottom-to-top.
    for (std::size_t k = 0; k <= n; ++k) {
        const double s = static_cast<double>(k) * h;
        F.at(k, 0) = boundary.at(0, s);
        F.at(n, k) = boundary.at(1, s);
        F.at(k, n) = boundary.at(2, s);
        F.at(0, k) = boundary.at(3, s);
    }
    return detail::fill_block(std::move(F));
}

/// Max over interior nodes of |4 F - sum of the 4 neighbours|.
inline double laplacian_residual(const PlaneField& F)
{
    double m = 0.0;
    for (std::size_t j = 1; j + 1 < F.ny; ++j)
        for (std::size_t i = 1; i + 1 < F.nx; ++i)
            m = std::max(m, std::abs(4.0 * F.at(i, j) - F.at(i - 1, j) - F.at(i + 1, j) - F.at(i, j - 1) - F.at(i, j + 1)));
    return m;
}

// "# x0,y0,h,nx,ny" header, then x,y,value triplets.
inline void write_csv(const PlaneField& F, std::ostream& os)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "# x0=%.17g,y0=%.17g,h=%.17g,nx=%zu,ny=%zu\n", F.x0, F.y0, F.h, F.nx, F.ny);
    os << buf << "x,y,value\n";
    for (std::size_t j = 0; j < F.ny; ++j)
        for (std::size_t i = 0; i < F.nx; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", F.x(i), F.y(j), F.at(i, j));
            os << buf;
        }
}

}  // namespace tracelab
