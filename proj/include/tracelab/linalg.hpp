#pragma once

// Compressed sparse rows and unpreconditioned conjugate gradients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"

namespace tracelab::linalg {

struct Csr {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col;
    std::vector<double> val;

    void multiply(const std::vector<double>& x, std::vector<double>& y) const
    {
        y.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
            y[i] = s;
        }
    }
};

/// Assembles a CSR matrix from (row, col, value) triplets; duplicates add.
inline Csr from_triplets(std::size_t n, std::vector<std::tuple<std::size_t, std::size_t, double>> t)
{
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    Csr m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto [r, c, v] = t[k];
        require(r < n && c < n, "triplet outside the matrix");
        if (!m.col.empty() && k > 0 && std::get<0>(t[k - 1]) == r && std::get<1>(t[k - 1]) == c) {
            m.val.back() += v;
            continue;
        }
        m.col.push_back(c);
        m.val.push_back(v);
        ++m.row_ptr[r + 1];
    }
    for (std::size_t i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
    return parallel::pairwise_sum(p);
}

struct CgResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    double residual = 0.0;  // ||b - A x|| / ||b||
};

/// Solves A x = b for symmetric positive definite A from x = 0.
/// Rejects when the true relative residual ends above max(100 tol, 1e-10)
/// (the recurrence residual drifts from the true one near round-off).
inline CgResult conjugate_gradient(const Csr& A, const std::vector<double>& b, double tol = 1e-12,
                                   std::size_t max_iter = 0)
{
    require(b.size() == A.n, "right-hand side size mismatch");
    if (max_iter == 0) max_iter = std::max<std::size_t>(100, 10 * A.n);
    CgResult out;
    out.x.assign(A.n, 0.0);
    double bmax = 0.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    if (bmax == 0.0) return out;
    // Solve for b / max|b| so tiny data does not underflow.
    std::vector<double> bs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) bs[i] = b[i] / bmax;
    const double bnorm = std::sqrt(dot(bs, bs));
    std::vector<double> r = bs, p = bs, ap;
    double rr = dot(r, r);
    for (std::size_t it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= tol * bnorm) break;
        A.multiply(p, ap);
        const double alpha = rr / dot(p, ap);
        for (std::size_t i = 0; i < A.n; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < A.n; ++i) p[i] = r[i] + beta * p[i];
        out.iterations = it + 1;
    }
    // true residual
    A.multiply(out.x, ap);
    std::vector<double> res(A.n);
    for (std::size_t i = 0; i < A.n; ++i) res[i] = bs[i] - ap[i];
    out.residual = std::sqrt(dot(res, res)) / bnorm;
    for (double& v : out.x) v *= bmax;
    require(out.residual <= std::max(100.0 * tol, 1e-10), "conjugate gradients did not converge: relative residual " +
                                            std::to_string(out.residual) + " after " +
                                            std::to_string(out.iterations) + " iterations");
    return out;
}

}  // namespace tracelab::linalg
