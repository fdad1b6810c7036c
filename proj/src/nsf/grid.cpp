#include "nsf/grid.hpp"

#include "nsf/fft3.hpp"

#include <cmath>
#include <stdexcept>

namespace nsf {

Grid make_grid(double L, int N)
{
    if (!(L > 0.0)) throw std::invalid_argument("make_grid: box length must be positive");
    if (N < 8) throw std::invalid_argument("make_grid: need at least 8 points per axis");
    if (N % 2 != 0) throw std::invalid_argument("make_grid: N must be even");
    return Grid{L, N};
}

SpectralField forward_transform(const PhysicalField& f)
{
    const Grid& g = f.grid;
    SpectralField F(g, f.comps);
    const double w = g.dx() * g.dx() * g.dx();
    const std::size_t n = g.size();
    for (int c = 0; c < f.comps; ++c) {
        cd* out = F.data.data() + c * n;
        const double* in = f.data.data() + c * n;
        for (std::size_t s = 0; s < n; ++s) out[s] = cd(in[s], 0.0);
        dft3(out, g.N, -1);
        for (std::size_t s = 0; s < n; ++s) out[s] *= w;
    }
    return F;
}

double hermitian_defect(const SpectralField& F)
{
    const Grid& g = F.grid;
    double worst = 0.0, scale = 0.0;
    for (int c = 0; c < F.comps; ++c) {
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            const int jx = (g.N - ix) % g.N;
            const int jy = (g.N - iy) % g.N;
            const int jz = (g.N - iz) % g.N;
            const cd a = F.at(c, s);
            const cd b = F.at(c, ijk_to_site(g, jx, jy, jz));
            worst = std::max(worst, std::abs(a - std::conj(b)));
            scale = std::max(scale, std::abs(a));
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

static PhysicalField inverse_impl(const SpectralField& F)
{
    const Grid& g = F.grid;
    PhysicalField f(g, F.comps);
    const double w = 1.0 / g.volume();
    const std::size_t n = g.size();
    std::vector<cd> buf(n);
    for (int c = 0; c < F.comps; ++c) {
        const cd* in = F.data.data() + c * n;
        for (std::size_t s = 0; s < n; ++s) buf[s] = in[s];
        dft3(buf.data(), g.N, +1);
        double* out = f.data.data() + c * n;
        for (std::size_t s = 0; s < n; ++s) out[s] = buf[s].real() * w;
    }
    return f;
}

PhysicalField inverse_transform(const SpectralField& F)
{
    if (hermitian_defect(F) > 1e-10)
        throw std::runtime_error("inverse_transform: Hermitian symmetry violated");
    return inverse_impl(F);
}

PhysicalField inverse_transform_unchecked(const SpectralField& F)
{
    return inverse_impl(F);
}

bool is_dealiased_index(const Grid& g, int ix, int iy, int iz)
{
    const int cut = g.N / 3;
    return std::abs(g.k_of_index(ix)) <= cut && std::abs(g.k_of_index(iy)) <= cut &&
           std::abs(g.k_of_index(iz)) <= cut;
}

void dealias_inplace(SpectralField& F)
{
    const Grid& g = F.grid;
    const int cut = g.N / 3;
    std::vector<bool> keep(g.N);
    for (int i = 0; i < g.N; ++i) keep[i] = std::abs(g.k_of_index(i)) <= cut;
    for (int c = 0; c < F.comps; ++c) {
        for (int ix = 0; ix < g.N; ++ix)
            for (int iy = 0; iy < g.N; ++iy) {
                const bool keep_xy = keep[ix] && keep[iy];
                cd* row = F.data.data() + c * g.size() + ijk_to_site(g, ix, iy, 0);
                if (!keep_xy) {
                    for (int iz = 0; iz < g.N; ++iz) row[iz] = cd(0.0, 0.0);
                } else {
                    for (int iz = 0; iz < g.N; ++iz)
                        if (!keep[iz]) row[iz] = cd(0.0, 0.0);
                }
            }
    }
}

SpectralField dealias(const SpectralField& F)
{
    SpectralField G = F;
    dealias_inplace(G);
    return G;
}

SpectralField derivative(const SpectralField& F, int axis)
{
    if (axis < 0 || axis > 2) throw std::invalid_argument("derivative: axis out of range");
    const Grid& g = F.grid;
    SpectralField D(g, F.comps);
    for (int c = 0; c < F.comps; ++c) {
        for (std::size_t s = 0; s < g.size(); ++s) {
            int idx[3];
            site_to_ijk(g, s, idx[0], idx[1], idx[2]);
            if (g.k_of_index(idx[axis]) == g.N / 2) continue; // Nyquist
            const double xi = g.wavenumber(idx[axis]);
            D.at(c, s) = cd(0.0, xi) * F.at(c, s);
        }
    }
    return D;
}

double l2_norm(const PhysicalField& f)
{
    const double w = f.grid.dx() * f.grid.dx() * f.grid.dx();
    double sum = 0.0;
    for (double v : f.data) sum += v * v;
    return std::sqrt(sum * w);
}

double l2_norm_spectral(const SpectralField& F)
{
    double sum = 0.0;
    for (const cd& v : F.data) sum += std::norm(v);
    return std::sqrt(sum / F.grid.volume());
}

double max_abs(const PhysicalField& f)
{
    const std::size_t n = f.grid.size();
    double worst = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double q = 0.0;
        for (int c = 0; c < f.comps; ++c) {
            const double v = f.at(c, s);
            q += v * v;
        }
        worst = std::max(worst, q);
    }
    return std::sqrt(worst);
}

bool all_finite(const PhysicalField& f)
{
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace nsf
