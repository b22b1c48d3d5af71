#pragma once

// Fourier-side line norms. The continuum transform
//   f^(xi) = int f(x) e^{-2 pi i xi x} dx
// is approximated by the trapezoid rule on the window, evaluated with FFTW
// at xi_k = k / (N h).

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <vector>

#include <fftw3.h>

#include "core.hpp"
#include "functions.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace tracelab {

struct LineSpectrum {
    std::vector<double> xi;                  // k / (N h), k = -N/2 .. N/2
    std::vector<std::complex<double>> amp;   // f^(xi_k)
    double dxi = 0.0;
    double spacing = 0.0;
    Window window{};
    std::size_t zero_index = 0;  // the xi = 0 bin, excluded from every norm

    std::size_t size() const { return xi.size(); }
};

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace detail

/// Continuum-scaled transform of a function on a single-line graph.
inline LineSpectrum line_spectrum(const EdgeFunction& f)
{
    require(f.graph && f.graph->edges.size() == 1 && f.graph->edges[0].shape == EdgeShape::segment,
            "line_spectrum needs a function on a single straight line");
    const Edge& e = f.graph->edges[0];
    require(e.horizontal(), "line_spectrum needs a horizontal line");
    const auto& v = f.samples[0];
    const std::size_t n = v.size() - 1;
    require(n >= 2 && n % 2 == 0, "line_spectrum needs an even number of cells");
    const double h = f.spacing(0);
    const double x0 = std::min(e.start.x, e.end.x);
    const bool reversed = e.start.x > e.end.x;

    // Periodic trapezoid: the two window ends share bin 0.
    std::vector<double> in(n);
    for (std::size_t j = 0; j < n; ++j) in[j] = reversed ? v[n - j] : v[j];
    in[0] = 0.5 * (v.front() + v.back());
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    LineSpectrum s;
    s.spacing = h;
    s.window = f.graph->window;
    s.dxi = 1.0 / (static_cast<double>(n) * h);
    const long long half = static_cast<long long>(n / 2);
    s.xi.reserve(n + 1);
    s.amp.reserve(n + 1);
    for (long long k = -half; k <= half; ++k) {
        const std::size_t idx = static_cast<std::size_t>(std::llabs(k));
        std::complex<double> x{out[idx][0], out[idx][1]};
        if (k < 0) x = std::conj(x);
        const double xi = static_cast<double>(k) * s.dxi;
        const double phase = -2.0 * pi * xi * x0;
        s.xi.push_back(xi);
        s.amp.push_back(h * x * std::polar(1.0, phase));
    }
    s.zero_index = static_cast<std::size_t>(half);
    return s;
}

namespace detail {

template <class Weight>
double weighted_spectral_sum(const LineSpectrum& s, Weight&& w)
{
    std::vector<double> terms(s.size(), 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k == s.zero_index) continue;
        const double end = (k == 0 || k + 1 == s.size()) ? 0.5 : 1.0;
        terms[k] = end * std::norm(s.amp[k]) * w(std::abs(s.xi[k]));
    }
    return s.dxi * parallel::pairwise_sum(terms);
}

}  // namespace detail

/// int |f^|^2 |xi| dxi over the nonzero frequencies.
inline double spectral_half_norm(const LineSpectrum& s)
{
    return detail::weighted_spectral_sum(s, [](double a) { return a; });
}

/// Weight |xi| for |xi| >= 1 and xi^2 below.
inline double spectral_tilde_norm(const LineSpectrum& s)
{
    return detail::weighted_spectral_sum(s, [](double a) { return a >= 1.0 ? a : a * a; });
}

/// sum |f^|^2 dxi, for Parseval checks.
inline double spectral_l2(const LineSpectrum& s)
{
    return detail::weighted_spectral_sum(s, [](double) { return 1.0; }) +
           s.dxi * std::norm(s.amp[s.zero_index]);
}

enum class KernelSide { half_doubled, full };

/// c = int |e^{2 pi i t} - 1|^2 / t^2 dt = int 4 sin^2(pi t) / t^2 dt.
/// 20-point Gauss-Legendre on unit intervals up to |t| = T, then the
/// asymptotic tail 2/T - 1/(pi^2 T^3) per side.
inline double kernel_constant(KernelSide side = KernelSide::half_doubled, int T = 1000)
{
    require(T >= 8, "kernel_constant needs a window T >= 8");
    const auto& g = quad::gl20();
    auto integrand = [](double t) {
        const double s = std::sin(pi * t);
        return 4.0 * s * s / (t * t);
    };
    auto unit = [&](double a) {
        double acc = 0.0;
        for (std::size_t k = 0; k < g.nodes.size(); ++k) acc += g.weights[k] * integrand(a + g.nodes[k]);
        return acc;
    };
    const double tail = 2.0 / T - 1.0 / (pi * pi * std::pow(static_cast<double>(T), 3));
    if (side == KernelSide::half_doubled) {
        std::vector<double> cells(static_cast<std::size_t>(T));
        for (int k = 0; k < T; ++k) cells[static_cast<std::size_t>(k)] = unit(k);
        return 2.0 * (parallel::pairwise_sum(cells) + tail);
    }
    std::vector<double> cells(static_cast<std::size_t>(2 * T));
    for (int k = -T; k < T; ++k) cells[static_cast<std::size_t>(k + T)] = unit(k);
    return parallel::pairwise_sum(cells) + 2.0 * tail;
}

inline void write_csv(const LineSpectrum& s, std::ostream& os)
{
    os << "xi,re,im\n";
    char buf[96];
    for (std::size_t k = 0; k < s.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.xi[k], s.amp[k].real(), s.amp[k].imag());
        os << buf;
    }
}

}  // namespace tracelab
