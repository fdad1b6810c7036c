// Deterministic random spectral fields for test corpora and perturbations.
// Coefficients are drawn as complex Gaussians with a power-law envelope in
// |xi|, Hermitian-symmetrized, zero-mean, and restricted to the dealiased
// band.  Everything is a pure function of (grid, spec, seed).
#pragma once

#include "nsf/grid.hpp"

#include <random>

namespace nsf {

struct RandomFieldSpec {
    int comps = 1;
    double slope = 0.0;    // |coef| ~ |xi|^{-slope}
    double xi_max = 0.0;   // 0 => 2/3 Nyquist
    double amplitude = 1.0;
};

// Gaussian spectral field; Hermitian, zero-mean, band-limited.
inline SpectralField random_spectral_field(const Grid& g, const RandomFieldSpec& spec,
                                           std::uint64_t seed)
{
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SpectralField F(g, spec.comps);
    const double cut = spec.xi_max > 0.0 ? spec.xi_max : (2.0 / 3.0) * g.xi_nyquist();
    for (int c = 0; c < spec.comps; ++c) {
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            if (!is_dealiased_index(g, ix, iy, iz)) continue;
            const double x0 = g.wavenumber(ix), x1 = g.wavenumber(iy), x2 = g.wavenumber(iz);
            const double r = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
            if (r == 0.0 || r > cut) continue;
            const double env = spec.amplitude * std::pow(r, -spec.slope);
            F.at(c, s) = env * cd(gauss(eng), gauss(eng));
        }
    }
    // Hermitian-symmetrize: keep the average of F(k) and conj F(-k).
    for (int c = 0; c < spec.comps; ++c) {
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            const std::size_t t =
                ijk_to_site(g, (g.N - ix) % g.N, (g.N - iy) % g.N, (g.N - iz) % g.N);
            if (t < s) continue;
            const cd a = F.at(c, s), b = F.at(c, t);
            const cd avg = 0.5 * (a + std::conj(b));
            F.at(c, s) = avg;
            F.at(c, t) = std::conj(avg);
        }
    }
    return F;
}

} // namespace nsf
