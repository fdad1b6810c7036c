// Periodic-box discretization of R^3: uniform N^3 lattice on [0,L)^3 with
// integer wavenumber triples k, k_i in (-N/2, N/2], and physical wavenumbers
// xi = 2*pi*k/L.
//
// Transform convention (continuum-matching quadrature):
//   forward:  u_hat(xi) = dx^3 * sum_x e^{-i x.xi} u(x)   ~ int e^{-i x.xi} u dx
//   inverse:  u(x)      = (1/L^3) * sum_xi e^{+i x.xi} u_hat(xi)
// Parseval:   int |u|^2 dx = (1/L^3) * sum_xi |u_hat(xi)|^2
// so L^2/Besov/Sobolev norms match continuum formulas with spectral weight
// 1/L^3 and no further factors.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace nsf {

using cd = std::complex<double>;

struct Grid {
    double L = 0.0; // box side length
    int N = 0;      // points per axis, even, >= 8

    std::size_t size() const { return static_cast<std::size_t>(N) * N * N; }
    double dx() const { return L / N; }
    double volume() const { return L * L * L; }
    // smallest nonzero |xi|
    double xi_min() const { return 2.0 * 3.14159265358979323846 / L; }
    // largest |xi| per axis (Nyquist)
    double xi_nyquist() const { return xi_min() * (N / 2); }

    // signed integer wavenumber for storage index 0..N-1
    int k_of_index(int idx) const { return idx <= N / 2 ? idx : idx - N; }
    // storage index for signed wavenumber in (-N/2, N/2]
    int index_of_k(int k) const { return k >= 0 ? k : k + N; }
    double wavenumber(int idx) const { return xi_min() * k_of_index(idx); }

    bool operator==(const Grid&) const = default;
};

// make_grid validates and returns the grid; rejects odd or tiny N, L <= 0.
Grid make_grid(double L, int N);

// C real-valued components sampled on the lattice.  Storage: component-major,
// then row-major (ix, iy, iz) with iz fastest.
struct PhysicalField {
    Grid grid;
    int comps = 1;
    std::vector<double> data;

    PhysicalField() = default;
    PhysicalField(const Grid& g, int c)
        : grid(g), comps(c), data(static_cast<std::size_t>(c) * g.size(), 0.0) {}

    double& at(int c, std::size_t site) { return data[c * grid.size() + site]; }
    double at(int c, std::size_t site) const { return data[c * grid.size() + site]; }
};

// C complex coefficients per lattice wavenumber, same layout as PhysicalField.
struct SpectralField {
    Grid grid;
    int comps = 1;
    std::vector<cd> data;

    SpectralField() = default;
    SpectralField(const Grid& g, int c)
        : grid(g), comps(c), data(static_cast<std::size_t>(c) * g.size(), cd(0.0, 0.0)) {}

    cd& at(int c, std::size_t site) { return data[c * grid.size() + site]; }
    cd at(int c, std::size_t site) const { return data[c * grid.size() + site]; }
};

// Iteration helper: flat site index -> (ix, iy, iz).
inline void site_to_ijk(const Grid& g, std::size_t site, int& ix, int& iy, int& iz)
{
    iz = static_cast<int>(site % g.N);
    iy = static_cast<int>((site / g.N) % g.N);
    ix = static_cast<int>(site / (static_cast<std::size_t>(g.N) * g.N));
}

inline std::size_t ijk_to_site(const Grid& g, int ix, int iy, int iz)
{
    return (static_cast<std::size_t>(ix) * g.N + iy) * g.N + iz;
}

// forward_transform: physical -> spectral with the dx^3 quadrature weight.
SpectralField forward_transform(const PhysicalField& f);

// inverse_transform: spectral -> physical.  Throws if Hermitian symmetry is
// violated beyond 1e-10 relative.
PhysicalField inverse_transform(const SpectralField& F);

// Same, skipping the symmetry check (hot paths that preserve symmetry by
// construction).
PhysicalField inverse_transform_unchecked(const SpectralField& F);

// Relative Hermitian-symmetry defect max|F(-k) - conj F(k)| / max|F|.
double hermitian_defect(const SpectralField& F);

// 2/3-rule dealiasing: zero every coefficient with any |k_i| > N/3.
SpectralField dealias(const SpectralField& F);
void dealias_inplace(SpectralField& F);
bool is_dealiased_index(const Grid& g, int ix, int iy, int iz);

// Spectral derivative d/dx_axis as i*xi multiplication; Nyquist planes are
// zeroed (no signed counterpart on the lattice).
SpectralField derivative(const SpectralField& F, int axis);

// L^2 norm over the box under the quadrature convention (all components).
double l2_norm(const PhysicalField& f);
double l2_norm_spectral(const SpectralField& F);

// max_site sqrt(sum_c f_c^2)
double max_abs(const PhysicalField& f);

bool all_finite(const PhysicalField& f);

} // namespace nsf
