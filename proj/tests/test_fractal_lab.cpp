#include <gtest/gtest.h>

#include <tracelab/fractal_lab.hpp>

using namespace tracelab;

namespace {

EdgeFunction single_edge(double length, const std::vector<double>& samples)
{
    MetricGraph g;
    g.vertices = {{0.0, 0.0}, {length, 0.0}};
    detail::add_segment(g, 0, 1);
    EdgeFunction f;
    f.graph = share(std::move(g));
    f.samples = {samples};
    return f;
}

}  // namespace

TEST(FractalLab, GasketCounts)
{
    const auto a0 = build_fractal(FractalKind::sg, 0);
    EXPECT_EQ(a0.coords.size(), 3u);
    EXPECT_EQ(a0.edges.size(), 3u);
    EXPECT_EQ(a0.cells.size(), 1u);
    const auto a1 = build_fractal(FractalKind::sg, 1);
    EXPECT_EQ(a1.coords.size(), 6u);
    EXPECT_EQ(a1.edges.size(), 9u);
    EXPECT_EQ(a1.cells.size(), 3u);
    const auto a4 = build_fractal(FractalKind::sg, 4);
    EXPECT_EQ(a4.cells.size(), 81u);
    EXPECT_EQ(a4.coords.size(), (81u * 3u + 3u) / 2u);
    EXPECT_DOUBLE_EQ(a4.edge_length(), 1.0 / 16.0);
    for (const auto& l : a4.edges) EXPECT_NEAR(distance(a4.vertices[l.a], a4.vertices[l.b]), 1.0 / 16.0, 1e-15);
    EXPECT_THROW(build_fractal(FractalKind::sg, 9), Rejection);
}

TEST(FractalLab, CarpetCounts)
{
    const auto a1 = build_fractal(FractalKind::sc, 1);
    EXPECT_EQ(a1.cells.size(), 8u);
    EXPECT_EQ(a1.coords.size(), 16u);
    EXPECT_EQ(build_fractal(FractalKind::sc, 2).coords.size(), 96u);
    EXPECT_EQ(build_fractal(FractalKind::sc, 3).coords.size(), 688u);
    EXPECT_THROW(build_fractal(FractalKind::sc, 6), Rejection);
}

TEST(FractalLab, ZeroLevelEnergy)
{
    EXPECT_DOUBLE_EQ(sg_graph_energy(sg_boundary(0.0, 0.0, 1.0)), 2.0);
    EXPECT_DOUBLE_EQ(sg_graph_energy(sg_boundary(3.0, 3.0, 3.0)), 0.0);
}

TEST(FractalLab, HarmonicMidpoints)
{
    const auto ext = sg_harmonic_extend(sg_boundary(0.0, 0.0, 1.0), 1);
    const auto& a = *ext.f.approx;
    EXPECT_NEAR(ext.f.values[a.find({1, 0})], 0.2, 1e-13);  // between q0 and q1
    EXPECT_NEAR(ext.f.values[a.find({1, 1})], 0.4, 1e-13);  // between q1 and q2
    EXPECT_NEAR(ext.f.values[a.find({0, 1})], 0.4, 1e-13);  // between q0 and q2
    EXPECT_NEAR(sg_graph_energy(ext.f), 1.2, 1e-13);
}

TEST(FractalLab, HarmonicRenormalizedEnergyIsConstant)
{
    const auto ext = sg_harmonic_extend(sg_boundary(0.0, 0.0, 1.0), 6);
    const auto p = sg_renormalized_profile(ext.f);
    for (const auto& r : p.rows) EXPECT_NEAR(r.renormalized, 2.0, 2e-12);
    EXPECT_TRUE(p.monotone);
}

TEST(FractalLab, ExtensionFromIntermediateLevel)
{
    auto a = share(build_fractal(FractalKind::sg, 2));
    auto f = sample_vertices(a, FunctionFamily::linear(1.0, 0.3));
    const double base = std::pow(5.0 / 3.0, 2) * sg_graph_energy(f);
    for (int m2 = 3; m2 <= 6; ++m2) {
        const auto ext = sg_harmonic_extend(f, m2);
        EXPECT_NEAR(std::pow(5.0 / 3.0, m2) * sg_graph_energy(ext.f) / base, 1.0, 1e-12);
    }
    const auto c = sg_harmonic_extend(sample_vertices(a, FunctionFamily::constant(2.0)), 4);
    for (double v : c.f.values) EXPECT_NEAR(v, 2.0, 1e-12);
}

TEST(FractalLab, RestrictedProfilesAreNondecreasing)
{
    auto a = share(build_fractal(FractalKind::sg, 7));
    for (const auto& fam : {FunctionFamily::linear(1.0, 0.0), FunctionFamily::gaussian(0.5, {0.3, 0.2}),
                            FunctionFamily::harmonic({0.5, 0.3})}) {
        const auto p = sg_renormalized_profile(sample_vertices(a, fam));
        EXPECT_TRUE(p.monotone);
        EXPECT_GT(p.rows.back().renormalized, 0.0);
    }
    const auto zero = sg_renormalized_profile(sample_vertices(a, FunctionFamily::constant(1.0)));
    for (const auto& r : zero.rows) EXPECT_EQ(r.renormalized, 0.0);
}

TEST(FractalLab, SelfSimilarDecomposition)
{
    auto a = share(build_fractal(FractalKind::sg, 6));
    const auto f = sample_vertices(a, FunctionFamily::gaussian(0.6, {0.4, 0.3}));
    const double whole = std::pow(5.0 / 3.0, 6) * sg_graph_energy(f);
    double parts = 0.0;
    for (int i = 0; i < 3; ++i) parts += (5.0 / 3.0) * std::pow(5.0 / 3.0, 5) * sg_graph_energy(compose_cell(f, i));
    EXPECT_NEAR(parts / whole, 1.0, 1e-12);
}

TEST(FractalLab, BetaIdentities)
{
    const double beta = sg_beta();
    EXPECT_NEAR(std::pow(2.0, 2.0 * beta - 1.0), 5.0 / 3.0, 1e-14);
    EXPECT_NEAR(4.0 / std::pow(2.0, 1.0 + 2.0 * beta), 3.0 / 5.0, 1e-14);
    EXPECT_NEAR(beta, 0.868482797083103, 1e-14);
    EXPECT_NEAR(std::pow(3.0, 2.0 * sc_beta(1.25) - 1.0), 1.25, 1e-14);
}

TEST(FractalLab, EdgeScaling)
{
    // an edge of length 2^-m carries the factor (2^{-m})^{2-p} = (5/3)^m
    const double p = 1.0 + 2.0 * sg_beta();
    std::vector<double> s;
    for (int k = 0; k <= 32; ++k) s.push_back(std::sin(0.1 * k) + 0.01 * k * k);
    const double unit = edge_double_integral(single_edge(1.0, s), 0, 0, p);
    for (int m = 1; m <= 4; ++m)
        EXPECT_NEAR(edge_double_integral(single_edge(std::ldexp(1.0, -m), s), 0, 0, p) / unit, std::pow(5.0 / 3.0, m), 1e-12);
    const double pc = 1.0 + 2.0 * sc_beta(1.25);
    const double unit_c = edge_double_integral(single_edge(1.0, s), 0, 0, pc);
    EXPECT_NEAR(edge_double_integral(single_edge(1.0 / 9.0, s), 0, 0, pc) / unit_c, 1.25 * 1.25, 1e-12);
}

TEST(FractalLab, HBetaProfileOfHarmonicFunction)
{
    const auto ext = sg_harmonic_extend(sg_boundary(0.0, 0.0, 1.0), 8);
    const auto rows = h_beta_trace_profile(ext.f, sg_beta(), 4);
    ASSERT_EQ(rows.size(), 5u);
    double lo = rows[0].norm, hi = rows[0].norm;
    for (const auto& r : rows) {
        EXPECT_TRUE(std::isfinite(r.norm));
        lo = std::min(lo, r.norm);
        hi = std::max(hi, r.norm);
        EXPECT_NEAR(r.renormalized, 2.0, 1e-11);
    }
    EXPECT_LT(hi / lo, 10.0);
    EXPECT_THROW(h_beta_trace_profile(ext.f, 0.4, 2), Rejection);
    const auto zero = h_beta_trace_profile(sample_vertices(ext.f.approx, FunctionFamily::constant(1.0)), sg_beta(), 2);
    for (const auto& r : zero) EXPECT_EQ(r.norm, 0.0);
}

TEST(FractalLab, CarpetEnergy)
{
    auto a = share(build_fractal(FractalKind::sc, 1));
    const auto x = sample_vertices(a, FunctionFamily::linear(1.0, 0.0));
    EXPECT_NEAR(sc_graph_energy(x), 8.0 / 9.0, 1e-15);
    auto two = x;
    for (double& v : two.values) v *= 2.0;
    EXPECT_NEAR(sc_graph_energy(two), 4.0 * sc_graph_energy(x), 1e-15);
    EXPECT_EQ(sc_graph_energy(sample_vertices(a, FunctionFamily::constant(5.0))), 0.0);
}

// Reference resistances from a sparse direct solve (scipy spsolve) on the same graphs.
TEST(FractalLab, CarpetResistance)
{
    const auto rows = sc_renorm_estimate(3);
    EXPECT_NEAR(rows[0].resistance, 1.0, 1e-12);
    EXPECT_NEAR(rows[1].resistance, 1.1818181818181817, 1e-10);
    EXPECT_NEAR(rows[2].resistance, 1.457605878981213, 1e-10);
    EXPECT_NEAR(rows[3].resistance, 1.819148047713802, 1e-10);
    EXPECT_LT(rows[2].ratio, rows[3].ratio);
    EXPECT_THROW(sc_renorm_estimate(6), Rejection);
}

TEST(FractalLab, MetricGraphExport)
{
    const auto g = to_metric_graph(build_fractal(FractalKind::sg, 2));
    EXPECT_EQ(g.edges.size(), 27u);
    EXPECT_TRUE(validate(g).empty());
    EXPECT_EQ(to_json(g)["edges"].size(), 27u);
}
