// Littlewood-Paley machinery on the lattice: the dyadic ladder phi(2^-j xi),
// block projections, low-frequency cutoffs, and homogeneous Besov/Sobolev
// norms.
//
// phi is the classical telescoping bump: phi(xi) = theta(xi/2) - theta(xi),
// theta(xi) = g(|xi|) with g == 1 on [0,3/4], g == 0 on [4/3,inf), and a
// C^inf monotone transition built from h(x) = exp(-1/x) for x>0.  Sums of
// phi over j telescope exactly, so the partition of unity holds to rounding
// on the covered range.  supp phi = {3/4 <= |xi| <= 8/3}.
#pragma once

#include "nsf/grid.hpp"

#include <optional>
#include <vector>

namespace nsf {

// smooth step: 1 for r <= 3/4, 0 for r >= 4/3
double lp_theta_radial(double r);
// phi(r) = theta(r/2) - theta(r), supported on [3/4, 8/3]
double lp_phi_radial(double r);

struct DyadicLadder {
    Grid grid;
    int j_min = 0;
    int j_max = -1;
    // weights[j - j_min][site] = phi(2^-j |xi(site)|)
    std::vector<std::vector<double>> weights;

    int shells() const { return j_max - j_min + 1; }
    const std::vector<double>& weight(int j) const { return weights[j - j_min]; }
    bool in_range(int j) const { return j >= j_min && j <= j_max; }
};

// Builds the ladder: j_min is the smallest j with 2^j*(8/3) >= xi_min and
// j_max the largest with 2^j*(3/4) <= (2/3)*Nyquist.  Throws when fewer than
// two shells fit.
DyadicLadder build_ladder(const Grid& grid);

// Block projection Delta_j: multiply coefficients by phi(2^-j xi).
SpectralField dyadic_block(const SpectralField& F, const DyadicLadder& ladder, int j);

// Low cutoff S_{j0} = sum_{j<j0} Delta_j.  Realized as the multiplier
// theta(2^-j0 |xi|), which the telescoping sum equals exactly; on the lattice
// there is no sub-ladder residue because no lattice point meets shells below
// j_min.
SpectralField low_cutoff(const SpectralField& F, const DyadicLadder& ladder, int j0);

struct BesovParams {
    double s = 0.0;
    double r = 2.0; // summability exponent in [1, inf]; use INFINITY for max
};

struct BesovResult {
    double norm = 0.0;
    std::vector<double> per_block; // ||Delta_j F||_{L^2}, j = j_min..j_max
    int j_min = 0;
    int j_max = -1;
    bool nonzero_mean = false;   // xi=0 coefficient was ignored
    bool outside_band = false;   // spectral content beyond the covered range
};

// Homogeneous Besov norm: l^r aggregation of 2^{js} ||Delta_j F||_{L^2}.
// The xi=0 coefficient is excluded (flagged when nonzero); content outside
// the partition range is flagged, not truncated silently.
BesovResult besov_norm(const SpectralField& F, const DyadicLadder& ladder,
                       const BesovParams& p);

// Homogeneous Sobolev norm (sum_{xi != 0} |xi|^{2k} |F|^2 / L^3)^{1/2}.
double sobolev_norm(const SpectralField& F, double k);

// max over the two norms; the acceptance norm for the periodic solver.
double besov_sobolev_max(const SpectralField& F, const DyadicLadder& ladder,
                         const BesovParams& p, double k);

// Commutator block [Delta_j, v d_k] u = Delta_j(v d_k u) - v d_k(Delta_j u),
// pseudo-spectral with 2/3 dealiasing on each product.  v, u scalar.
PhysicalField commutator_block(const PhysicalField& v, const PhysicalField& u,
                               const DyadicLadder& ladder, int j, int k_axis);

} // namespace nsf
