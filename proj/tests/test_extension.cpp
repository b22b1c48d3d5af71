#include <gtest/gtest.h>

#include <random>

#include <tracelab/extension.hpp>

using namespace tracelab;

namespace {

EdgeFunction line(const FunctionFamily& fam, double R, std::size_t per_unit)
{
    return sample_on_graph(fam, share(build_graph({FamilyTag::interval_line}, Window(R))), Resolution::per_unit(per_unit));
}

EdgeFunction square_boundary(const FunctionFamily& fam, double delta, std::size_t n)
{
    return sample_on_graph(fam, share(build_graph({FamilyTag::square, delta}, Window(0.5 * delta, {0.5 * delta, 0.5 * delta}))),
                           Resolution::per_edge(n));
}

}  // namespace

TEST(Extension, EnergyOfLinearField)
{
    const auto F = sample_plane(FunctionFamily::linear(1.0, 0.0), Window(0.5, {0.5, 0.5}), 1.0 / 16);
    EXPECT_NEAR(plane_energy(F).value, 1.0, 1e-13);
    const auto G = sample_plane(FunctionFamily::linear(2.0, -1.0), Window(1.0), 1.0 / 8);
    EXPECT_NEAR(plane_energy(G).value, 5.0 * 4.0, 1e-12);
}

TEST(Extension, EnergyBreakdownSums)
{
    const auto F = sample_plane(FunctionFamily::gaussian(), Window(2.0), 1.0 / 8);
    const auto r = plane_energy(F, true);
    double s = 0.0;
    for (double c : r.cells) s += c;
    EXPECT_NEAR(s, r.value, 1e-12 * r.value);
    EXPECT_EQ(r.cells.size(), 32u * 32u);
}

TEST(Extension, EnergyRejectsTinyGrid)
{
    EXPECT_THROW(plane_energy(sample_plane(FunctionFamily::gaussian(), Window(1.0), 0.5)), Rejection);
}

TEST(Extension, PoissonOfConstantIsConstant)
{
    const auto P = poisson_extend(line(FunctionFamily::constant(1.0), 2.0, 8), 1.0 / 8, Window(2.0));
    for (double v : P.field.values) EXPECT_NEAR(v, 1.0, 1e-13);
    EXPECT_FALSE(P.warnings.empty());
}

TEST(Extension, PoissonTraceIsData)
{
    const auto f = line(FunctionFamily::gaussian(), 4.0, 8);
    const auto P = poisson_extend(f, 1.0 / 8, Window(4.0));
    const std::size_t j0 = 32;
    for (std::size_t i = 0; i < P.field.nx; ++i) EXPECT_EQ(P.field.at(i, j0), f.samples[0][i]);
    EXPECT_TRUE(P.warnings.empty());
}

TEST(Extension, PoissonAlignedMatchesDirect)
{
    // the plane grid 1/6 is not a multiple of the data grid 1/8
    const auto f = line(FunctionFamily::cauchy(), 3.0, 8);
    const auto a = poisson_extend(f, 1.0 / 8, Window(3.0));
    const auto b = poisson_extend(f, 1.0 / 6, Window(3.0));
    const Point p{1.0, 1.0};
    EXPECT_NEAR(a.field.interpolate(p), b.field.interpolate(p), 1e-12);
}

TEST(Extension, PoissonIsSymmetricAndHarmonic)
{
    const auto P = poisson_extend(line(FunctionFamily::gaussian(), 4.0, 16), 1.0 / 16, Window(4.0));
    const auto& F = P.field;
    EXPECT_EQ(F.at(10, 5), F.at(10, F.ny - 1 - 5));
    // 5-point Laplacian of a smooth harmonic function is O(h^4) relative to the values
    double m = 0.0;
    for (std::size_t j = 70; j + 1 < F.ny; ++j)
        for (std::size_t i = 1; i + 1 < F.nx; ++i)
            m = std::max(m, std::abs(4.0 * F.at(i, j) - F.at(i - 1, j) - F.at(i + 1, j) - F.at(i, j - 1) - F.at(i, j + 1)));
    EXPECT_LT(m, 1e-4);
}

// The exact energy of the harmonic extension of e^{-pi x^2} to both
// half-planes is 2 (twice the Dirichlet-to-Neumann pairing 2 pi int |xi| |f^|^2).
TEST(Extension, PoissonEnergyOfGaussian)
{
    const auto P = poisson_extend(line(FunctionFamily::gaussian(), 8.0, 16), 1.0 / 16, Window(8.0));
    EXPECT_NEAR(plane_energy(P.field).value, 2.0, 0.02 * 2.0);
}

TEST(Extension, EvenReflection)
{
    PlaneField up(-1.0, 0.0, 0.125, 17, 9);
    for (std::size_t j = 0; j < up.ny; ++j)
        for (std::size_t i = 0; i < up.nx; ++i) up.at(i, j) = FunctionFamily::cauchy()({up.x(i), up.y(j) + 0.3});
    const auto full = even_reflection(up);
    EXPECT_EQ(full.ny, 17u);
    EXPECT_NEAR(plane_energy(full).value, 2.0 * plane_energy(up).value, 1e-12 * plane_energy(up).value);
    const auto back = upper_half(full);
    EXPECT_EQ(back.values, up.values);
    EXPECT_THROW(even_reflection(full), Rejection);
}

TEST(Extension, HarmonicFillLinearAndQuadratic)
{
    for (const auto& fam : {FunctionFamily::linear(1.0, 0.0), FunctionFamily::harmonic({0.3, 0.1})}) {
        const auto H = harmonic_fill_square(square_boundary(fam, 1.0, 16), 1.0 / 16);
        double err = 0.0;
        for (std::size_t j = 0; j < H.field.ny; ++j)
            for (std::size_t i = 0; i < H.field.nx; ++i)
                err = std::max(err, std::abs(H.field.at(i, j) - fam({H.field.x(i), H.field.y(j)})));
        EXPECT_LT(err, 1e-10);
        EXPECT_LT(laplacian_residual(H.field), 1e-10);
    }
}

TEST(Extension, HarmonicFillSecondOrder)
{
    // Re z^4 is harmonic but not discretely harmonic
    auto quartic = [](double x, double y) { return x * x * x * x - 6.0 * x * x * y * y + y * y * y * y; };
    double prev = 0.0;
    for (std::size_t n : {8u, 16u, 32u}) {
        const auto g = share(build_graph({FamilyTag::square, 1.0}, Window(0.5, {0.5, 0.5})));
        FunctionFamily c;
        c.kind = FamilyKind::custom;
        for (const auto& e : g->edges) {
            std::vector<double> v;
            for (std::size_t k = 0; k <= n; ++k) {
                const Point p = e.at_fraction(static_cast<double>(k) / static_cast<double>(n));
                v.push_back(quartic(p.x, p.y));
            }
            c.custom.push_back(v);
        }
        const auto H = harmonic_fill_square(sample_on_graph(c, g, Resolution::per_edge(n)), 1.0 / static_cast<double>(n));
        double err = 0.0;
        for (std::size_t j = 0; j < H.field.ny; ++j)
            for (std::size_t i = 0; i < H.field.nx; ++i)
                err = std::max(err, std::abs(H.field.at(i, j) - quartic(H.field.x(i), H.field.y(j))));
        if (prev > 0.0) {
            EXPECT_NEAR(prev / err, 4.0, 0.5);
        }
        prev = err;
    }
}

TEST(Extension, HarmonicFillMinimizesEnergy)
{
    const auto H = harmonic_fill_square(square_boundary(FunctionFamily::gaussian(0.7, {0.2, 0.4}), 1.0, 16), 1.0 / 16);
    const double e0 = plane_energy(H.field).value;
    std::mt19937 rng(7);
    std::normal_distribution<double> noise(0.0, 1e-3);
    for (int trial = 0; trial < 5; ++trial) {
        PlaneField G = H.field;
        for (std::size_t j = 1; j + 1 < G.ny; ++j)
            for (std::size_t i = 1; i + 1 < G.nx; ++i) G.at(i, j) += noise(rng);
        EXPECT_LE(e0, plane_energy(G).value + 1e-9);
    }
}

TEST(Extension, HarmonicFillConstant)
{
    const auto H = harmonic_fill_square(square_boundary(FunctionFamily::constant(3.0), 2.0, 16), 0.125);
    EXPECT_NEAR(plane_energy(H.field).value, 0.0, 1e-24);
    EXPECT_THROW(harmonic_fill_square(square_boundary(FunctionFamily::constant(3.0), 2.0, 16), 0.3), Rejection);
}
