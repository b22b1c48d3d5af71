// A short tour: line norms, the spectral check, a Poisson extension,
// graph-paper traces, the gasket and the carpet, and the strip.

#include <cmath>
#include <cstdio>

#include <tracelab/tracelab.hpp>

using namespace tracelab;

int main()
{
    parallel::set_threads(2);

    // Gaussian e^{-pi x^2} on [-8, 8], 64 samples per unit.
    const auto line = share(build_graph({FamilyTag::interval_line}, Window(8.0)));
    const auto f = sample_on_graph(FunctionFamily::gaussian(), line, Resolution::per_unit(64));

    const auto half = seminorm(f, NormKind::of(NormTag::half_line));
    const auto tilde = seminorm(f, NormKind::of(NormTag::tilde_half_line));
    std::printf("half-line  %.6f  (edge %.6f, exterior %.3g)\n", half.value, half.term("edge_double"), half.term("exterior"));
    std::printf("tilde      %.6f\n", tilde.value);

    const auto spec = line_spectrum(f);
    std::printf("spatial / spectral = %.4f, 4 pi^2 = %.4f, c = %.8f\n", half.value / spectral_half_norm(spec),
                4.0 * pi * pi, kernel_constant());

    // The same function on the two half-lines, glued at 0.
    const auto pair = share(build_graph({FamilyTag::half_line_pair}, Window(8.0)));
    const auto g = sample_on_graph(FunctionFamily::gaussian(), pair, Resolution::per_unit(64));
    std::printf("half-graph / half-line = %.4f\n", seminorm(g, NormKind::of(NormTag::half_graph)).value / half.value);

    // Poisson extension to the plane and its energy.
    const auto coarse = sample_on_graph(FunctionFamily::gaussian(), line, Resolution::per_unit(16));
    const auto ext = poisson_extend(coarse, 1.0 / 16.0, Window(4.0));
    std::printf("poisson energy %.4f on %zux%zu nodes\n", plane_energy(ext.field).value, ext.field.nx, ext.field.ny);

    // Graph-paper traces of a plane Gaussian and the reconstruction.
    const auto F = sample_plane(FunctionFamily::gaussian(), Window(2.0), 1.0 / 16.0);
    const std::vector<int> levels{0, -1, -2, -3};
    const auto prof = trace_profile(F, 2, levels);
    for (std::size_t k = 0; k < levels.size(); ++k)
        std::printf("  gp delta=%-7g norm %.5f\n", prof.deltas[k], prof.norms[k]);
    const auto rec = reconstruct_from_traces(level_traces(F, 2, levels));
    std::printf("plane energy %.5f, reconstructed %.5f\n", prof.energy, rec.energy);

    // Gasket: harmonic extension of (0, 0, 1) and its renormalized energies.
    const auto harm = sg_harmonic_extend(sg_boundary(0.0, 0.0, 1.0), 4).f;
    for (const auto& row : sg_renormalized_profile(harm).rows)
        std::printf("  SG m=%d  E=%.6f  (5/3)^m E=%.12f\n", row.m, row.energy, row.renormalized);
    std::printf("gasket beta %.12f\n", sg_beta());

    // Carpet resistances.
    for (const auto& row : sc_renorm_estimate(3))
        std::printf("  SC m=%d  R=%.6f  ratio %.4f\n", row.m, row.resistance, row.ratio);

    // Strip with the Gaussian on the lower line and zero on the upper one.
    const auto zero = sample_on_graph(FunctionFamily::constant(0.0), line, Resolution::per_unit(64));
    const auto strip = strip_trace_norm(make_strip_trace(f, zero));
    std::printf("strip: tilde %.5f + %.5f, L2 %.5f, sinh %.5f\n", strip.tilde0, strip.tilde1, strip.l2, sinh_kernel_norm(f));
    return 0;
}
