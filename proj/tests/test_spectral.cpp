#include <gtest/gtest.h>

#include <sstream>

#include <tracelab/seminorms.hpp>
#include <tracelab/spectral.hpp>

using namespace tracelab;

namespace {

EdgeFunction line(const FunctionFamily& fam, double R = 8.0, std::size_t per_unit = 32)
{
    return sample_on_graph(fam, share(build_graph({FamilyTag::interval_line}, Window(R))), Resolution::per_unit(per_unit));
}

}  // namespace

TEST(Spectral, GaussianIsItsOwnTransform)
{
    const auto s = line_spectrum(line(FunctionFamily::gaussian()));
    double worst = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (std::abs(s.xi[k]) <= 4.0) worst = std::max(worst, std::abs(std::abs(s.amp[k]) - std::exp(-pi * s.xi[k] * s.xi[k])));
    EXPECT_LT(worst, 1e-6);
    EXPECT_DOUBLE_EQ(s.xi[s.zero_index], 0.0);
}

TEST(Spectral, TranslationIsAPhase)
{
    const auto a = line_spectrum(line(FunctionFamily::gaussian()));
    const auto b = line_spectrum(line(FunctionFamily::gaussian(1.0, {1.0, 0.0})));
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(std::abs(a.amp[k]), std::abs(b.amp[k]), 1e-12);
}

TEST(Spectral, ConstantHasOnlyZeroFrequency)
{
    const auto s = line_spectrum(line(FunctionFamily::constant(2.0), 4.0, 8));
    EXPECT_NEAR(std::abs(s.amp[s.zero_index]), 16.0, 1e-12);
    EXPECT_NEAR(spectral_half_norm(s), 0.0, 1e-24);
    EXPECT_NEAR(spectral_tilde_norm(s), 0.0, 1e-24);
}

TEST(Spectral, GaussianNorms)
{
    const auto s = line_spectrum(line(FunctionFamily::gaussian()));
    // trapezoid error of the |xi| kink at 0 is -dxi^2/6 |f^(0)|^2
    EXPECT_NEAR(spectral_half_norm(s), 1.0 / (2.0 * pi) - s.dxi * s.dxi / 6.0, 5e-6);
    // 1D adaptive quadrature of the split weight against e^{-2 pi xi^2}
    EXPECT_NEAR(spectral_tilde_norm(s), 0.05624766977464323, 1e-5);
    const auto fine = line_spectrum(line(FunctionFamily::gaussian(), 32.0, 8));
    EXPECT_NEAR(spectral_half_norm(fine), 1.0 / (2.0 * pi), 5e-5);
    EXPECT_LE(spectral_tilde_norm(s), spectral_half_norm(s));
}

TEST(Spectral, Parseval)
{
    const auto f = line(FunctionFamily::cauchy(), 8.0, 16);
    const auto s = line_spectrum(f);
    double l2 = 0.0;
    const auto& v = f.samples[0];
    for (std::size_t i = 0; i + 1 < v.size(); ++i) l2 += (i == 0 ? 0.5 * (v.front() + v.back()) : v[i]) * (i == 0 ? 0.5 * (v.front() + v.back()) : v[i]);
    l2 *= f.spacing(0);
    EXPECT_NEAR(spectral_l2(s) / l2, 1.0, 1e-8);
}

TEST(Spectral, KernelConstant)
{
    const double c = kernel_constant();
    EXPECT_NEAR(c / (4.0 * pi * pi), 1.0, 1e-6);
    EXPECT_NEAR(kernel_constant(KernelSide::full) / c, 1.0, 1e-12);
}

TEST(Spectral, MatchesSpatialNorm)
{
    const auto f = line(FunctionFamily::gaussian());
    const double ratio = seminorm(f, NormKind::of(NormTag::half_line)).value / spectral_half_norm(line_spectrum(f));
    EXPECT_NEAR(ratio / kernel_constant(), 1.0, 0.02);
}

TEST(Spectral, RejectsNonLine)
{
    const auto g = share(build_graph({FamilyTag::half_line_pair}, Window(2.0)));
    EXPECT_THROW(line_spectrum(sample_on_graph(FunctionFamily::gaussian(), g, Resolution::per_edge(8))), Rejection);
}

TEST(Spectral, CsvHeader)
{
    std::stringstream ss;
    write_csv(line_spectrum(line(FunctionFamily::gaussian(), 2.0, 4)), ss);
    std::string first;
    std::getline(ss, first);
    EXPECT_EQ(first, "xi,re,im");
}
