#include "nsf/dyadic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nsf {

namespace {

inline double smooth_h(double x)
{
    return x > 0.0 ? std::exp(-1.0 / x) : 0.0;
}

inline double xi_radius(const Grid& g, std::size_t site)
{
    int ix, iy, iz;
    site_to_ijk(g, site, ix, iy, iz);
    const double x0 = g.wavenumber(ix), x1 = g.wavenumber(iy), x2 = g.wavenumber(iz);
    return std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
}

} // namespace

double lp_theta_radial(double r)
{
    constexpr double a = 0.75;       // == 1 up to here
    constexpr double b = 4.0 / 3.0;  // == 0 from here
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double hb = smooth_h(b - r);
    const double ha = smooth_h(r - a);
    return hb / (hb + ha);
}

double lp_phi_radial(double r)
{
    return lp_theta_radial(0.5 * r) - lp_theta_radial(r);
}

DyadicLadder build_ladder(const Grid& grid)
{
    const double xi_lo = grid.xi_min();
    const double xi_hi = (2.0 / 3.0) * grid.xi_nyquist();

    // smallest j with 2^j * (8/3) >= xi_lo
    const int j_min = static_cast<int>(std::ceil(std::log2(xi_lo * 3.0 / 8.0)));
    // largest j with 2^j * (3/4) <= xi_hi
    const int j_max = static_cast<int>(std::floor(std::log2(xi_hi * 4.0 / 3.0)));

    if (j_max - j_min + 1 < 2)
        throw std::runtime_error("build_ladder: grid too small to host two dyadic shells");

    DyadicLadder lad;
    lad.grid = grid;
    lad.j_min = j_min;
    lad.j_max = j_max;
    lad.weights.resize(lad.shells());
    for (int j = j_min; j <= j_max; ++j) {
        std::vector<double>& w = lad.weights[j - j_min];
        w.resize(grid.size());
        const double scale = std::ldexp(1.0, -j); // 2^-j
        for (std::size_t s = 0; s < grid.size(); ++s)
            w[s] = lp_phi_radial(scale * xi_radius(grid, s));
    }
    return lad;
}

SpectralField dyadic_block(const SpectralField& F, const DyadicLadder& ladder, int j)
{
    if (!ladder.in_range(j)) throw std::out_of_range("dyadic_block: j outside ladder range");
    if (!(F.grid == ladder.grid)) throw std::invalid_argument("dyadic_block: grid mismatch");
    SpectralField G(F.grid, F.comps);
    const std::vector<double>& w = ladder.weight(j);
    const std::size_t n = F.grid.size();
    for (int c = 0; c < F.comps; ++c)
        for (std::size_t s = 0; s < n; ++s) G.at(c, s) = w[s] * F.at(c, s);
    return G;
}

SpectralField low_cutoff(const SpectralField& F, const DyadicLadder& ladder, int j0)
{
    if (j0 < ladder.j_min || j0 > ladder.j_max + 1)
        throw std::out_of_range("low_cutoff: j0 outside ladder range");
    if (!(F.grid == ladder.grid)) throw std::invalid_argument("low_cutoff: grid mismatch");
    SpectralField G(F.grid, F.comps);
    const Grid& g = F.grid;
    const double scale = std::ldexp(1.0, -j0);
    for (std::size_t s = 0; s < g.size(); ++s) {
        const double r = xi_radius(g, s);
        if (r == 0.0) continue; // homogeneous operators ignore the mean
        const double w = lp_theta_radial(scale * r);
        if (w == 0.0) continue;
        for (int c = 0; c < F.comps; ++c) G.at(c, s) = w * F.at(c, s);
    }
    return G;
}

BesovResult besov_norm(const SpectralField& F, const DyadicLadder& ladder,
                       const BesovParams& p)
{
    if (!(F.grid == ladder.grid)) throw std::invalid_argument("besov_norm: grid mismatch");
    const Grid& g = F.grid;
    const double inv_vol = 1.0 / g.volume();

    BesovResult res;
    res.j_min = ladder.j_min;
    res.j_max = ladder.j_max;
    res.per_block.resize(ladder.shells(), 0.0);

    for (int c = 0; c < F.comps; ++c)
        if (std::abs(F.at(c, 0)) > 0.0) res.nonzero_mean = true;

    // Block L^2 norms and the covered-band check in one sweep.
    std::vector<double> acc(ladder.shells(), 0.0);
    double outside = 0.0, total = 0.0;
    for (std::size_t s = 1; s < g.size(); ++s) {
        double e = 0.0;
        for (int c = 0; c < F.comps; ++c) e += std::norm(F.at(c, s));
        if (e == 0.0) continue;
        total += e;
        double cover = 0.0;
        for (int jj = 0; jj < ladder.shells(); ++jj) {
            const double w = ladder.weights[jj][s];
            if (w != 0.0) {
                acc[jj] += w * w * e;
                cover += w;
            }
        }
        if (cover < 1.0 - 1e-9) outside += e;
    }
    // site 0 is xi=0 only for (0,0,0); other sites with s==0 index handled above
    if (total > 0.0 && outside / total > 1e-24) res.outside_band = true;

    for (int jj = 0; jj < ladder.shells(); ++jj)
        res.per_block[jj] = std::sqrt(acc[jj] * inv_vol);

    const bool r_inf = std::isinf(p.r);
    if (r_inf) {
        double worst = 0.0;
        for (int jj = 0; jj < ladder.shells(); ++jj) {
            const double term =
                std::pow(2.0, (ladder.j_min + jj) * p.s) * res.per_block[jj];
            worst = std::max(worst, term);
        }
        res.norm = worst;
    } else {
        double sum = 0.0;
        for (int jj = 0; jj < ladder.shells(); ++jj) {
            const double term =
                std::pow(2.0, (ladder.j_min + jj) * p.s) * res.per_block[jj];
            sum += std::pow(term, p.r);
        }
        res.norm = std::pow(sum, 1.0 / p.r);
    }
    return res;
}

double sobolev_norm(const SpectralField& F, double k)
{
    const Grid& g = F.grid;
    double sum = 0.0;
    for (std::size_t s = 1; s < g.size(); ++s) {
        const double r = xi_radius(g, s);
        if (r == 0.0) continue;
        double e = 0.0;
        for (int c = 0; c < F.comps; ++c) e += std::norm(F.at(c, s));
        if (e != 0.0) sum += std::pow(r, 2.0 * k) * e;
    }
    return std::sqrt(sum / g.volume());
}

double besov_sobolev_max(const SpectralField& F, const DyadicLadder& ladder,
                         const BesovParams& p, double k)
{
    return std::max(besov_norm(F, ladder, p).norm, sobolev_norm(F, k));
}

PhysicalField commutator_block(const PhysicalField& v, const PhysicalField& u,
                               const DyadicLadder& ladder, int j, int k_axis)
{
    if (v.comps != 1 || u.comps != 1)
        throw std::invalid_argument("commutator_block: scalar fields expected");
    if (!ladder.in_range(j)) throw std::out_of_range("commutator_block: j outside range");

    SpectralField u_hat = dealias(forward_transform(u));
    SpectralField du = derivative(u_hat, k_axis);          // d_k u
    PhysicalField du_phys = inverse_transform_unchecked(du);

    // v * d_k u, dealiased
    PhysicalField prod1 = du_phys;
    for (std::size_t s = 0; s < v.grid.size(); ++s) prod1.at(0, s) *= v.at(0, s);
    SpectralField t1 = dealias(forward_transform(prod1));
    SpectralField b1 = dyadic_block(t1, ladder, j); // Delta_j (v d_k u)

    // v * d_k Delta_j u, dealiased
    SpectralField bu = dyadic_block(u_hat, ladder, j);
    PhysicalField dbu = inverse_transform_unchecked(derivative(bu, k_axis));
    PhysicalField prod2 = dbu;
    for (std::size_t s = 0; s < v.grid.size(); ++s) prod2.at(0, s) *= v.at(0, s);
    SpectralField t2 = dealias(forward_transform(prod2));

    for (std::size_t s = 0; s < v.grid.size(); ++s) t1.at(0, s) = b1.at(0, s) - t2.at(0, s);
    return inverse_transform_unchecked(t1);
}

} // namespace nsf
