#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"

namespace tracelab::quad {

/// Gauss-Legendre rule mapped to [0, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline Rule gauss_legendre(std::size_t n)
{
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev guess.
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

/// The fixed 4-point rule used for every off-diagonal cell pair.
inline const Rule& gl4()
{
    static const Rule r = gauss_legendre(4);
    return r;
}

inline const Rule& gl20()
{
    static const Rule r = gauss_legendre(20);
    return r;
}

}  // namespace tracelab::quad
