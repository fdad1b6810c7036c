// The linearization around (rho_inf, 0, theta_inf) in the scaled variables
// U = (sqrt(p1) sigma, m, sqrt(c_V/theta_inf) E): per-mode 5x5 symbol,
// eigenstructure, exact semigroup action, spectral-bound scans, and a
// continuum radial-quadrature decay probe.
//
// The symbol splits per mode into a shear pair (velocity components normal
// to xi, eigenvalue -(mu/rho_inf)|xi|^2 with multiplicity 2) and a 3x3
// longitudinal block in the basis (U_1, xihat.m, U_5):
//
//   M(r) = [      0         -i sqrt(p1) r     0    ]
//          [ -i sqrt(p1) r     -nu r^2     -i g r  ]
//          [      0            -i h r    -ktil r^2 ]
//
// with nu = (2mu + mu')/rho_inf, ktil = kappa/(c_V rho_inf),
// g = (p2/(c_V rho_inf)) sqrt(theta_inf/c_V), h = (p2/rho_inf) sqrt(c_V theta_inf).
// The couplings g and h differ by the factor c_V^2; the matrix is diagonally
// similar to the symmetric form with coupling sqrt(g h) =
// (p2/rho_inf) sqrt(theta_inf/c_V) on both sides, so eigenvalues coincide
// with the symmetric convention.  Dissipativity (Re lambda <= 0) and the
// exact match with the linearized equations are enforced by tests.
#pragma once

#include "nsf/dyadic.hpp"
#include "nsf/grid.hpp"
#include "nsf/model.hpp"
#include "nsf/params.hpp"

#include <Eigen/Dense>

#include <array>
#include <map>
#include <vector>

namespace nsf {

using Mat5 = Eigen::Matrix<cd, 5, 5>;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3d;

// Full 5x5 symbol of the linearized system at wavenumber xi.
Mat5 symbol_matrix(const Vec3& xi, const PhysicalParams& p);

// Longitudinal 3x3 block at radius r = |xi|.
Mat3 longitudinal_symbol(double r, const PhysicalParams& p);

// coefficients of the longitudinal characteristic cubic
//   lambda^3 + c2 lambda^2 + c1 lambda + c0 = 0
void longitudinal_cubic(double r, const PhysicalParams& p, double& c2, double& c1, double& c0);

double shear_eigenvalue(double r, const PhysicalParams& p);

// Eigenstructure of the longitudinal block: eigenvalues sorted by (Re, Im)
// ascending, spectral projections by the Lagrange product formula.  When two
// roots collide within 1e-12 (relative), `degenerate` is set and projections
// are unavailable (callers fall back to the dense matrix exponential).
struct RadialEigen {
    double r = 0.0;
    Mat3 M;
    std::array<cd, 3> lambda{};
    std::array<Mat3, 3> proj{};
    double shear = 0.0;
    bool degenerate = false;
};

RadialEigen radial_eigen(double r, const PhysicalParams& p);

// Per-wavenumber eigensystem of the full 5x5 symbol.
struct ModeSystem {
    Vec3 xi;
    Mat5 A;
    // 4 distinct eigenvalues sorted by (Re, Im); multiplicity[i] is 2 for the
    // shear pair, 1 otherwise.
    std::array<cd, 4> lambdas{};
    std::array<int, 4> multiplicity{};
    std::array<Mat5, 4> projections{};
    bool degenerate = false; // projections unavailable

    // e^{tA} from the spectral resolution (throws when degenerate).
    Mat5 propagator_resolution(double t) const;
};

ModeSystem eigendecompose(const Vec3& xi, const PhysicalParams& p);

// e^{tA} by Pade scaling-and-squaring on the 5x5 symbol.
Mat5 propagator_pade(const Mat5& A, double t);

// Exact per-mode semigroup action on a 5-component spectral state.  Uses a
// per-radius eigendecomposition cache; Hermitian symmetry of the input is
// preserved bitwise (propagator blocks are J-symmetrized).
class SemigroupCache {
public:
    SemigroupCache(const Grid& g, const PhysicalParams& p);
    EnergyState apply(const EnergyState& U, double t) const;

private:
    Grid grid_;
    PhysicalParams params_;
    std::vector<RadialEigen> by_k2_; // indexed by integer |k|^2
    std::vector<int> k2_of_site_;
};

EnergyState semigroup_apply(const EnergyState& U, double t, const PhysicalParams& p);

struct SpectralBounds {
    double r0 = 0.0;     // crossover radius
    double beta = 0.0;   // high-frequency spectral gap
    double c_low = 0.0;  // min of -Re lambda / |xi|^2 on (0, r0]
    double c_high = 0.0; // max of the same
};

struct ScanRow {
    double r = 0.0;
    std::array<double, 4> re{};
    std::array<double, 4> im{};
    std::array<double, 4> ratio{}; // -Re lambda / r^2
};

struct ScanResult {
    SpectralBounds bounds;
    std::vector<ScanRow> rows;
};

// Scans branches over the given radii (>= 200 log-spaced points expected).
// Throws when any Re lambda exceeds 1e-10 (dissipativity violation), naming
// the radius.  r0 is the largest radius r such that the ratio band
// max/min over (0, r] stays <= 10; beta = -max Re lambda beyond r0.
ScanResult spectral_bounds_scan(const PhysicalParams& p, const std::vector<double>& radii);

std::vector<double> log_spaced(double lo, double hi, int count);

// Radially symmetric initial profile for the continuum probe: the spectral
// amplitude  A(r) = r^{-s0-3/2} * step(r >= ir_cutoff) * exp(-r^2/(2 uv_width^2))
// realizes a Besov-type slope s0 (block norms ~ const * 2^{j s0}).
// Component amplitudes weight (U_1, longitudinal m, transverse m, U_5).
struct RadialProfile {
    double s0 = 0.0;
    double ir_cutoff = 1e-3;
    double uv_width = 1.0;
    bool pure_gaussian = false; // drop the power law and IR cutoff
    double amp_sigma = 1.0;
    double amp_long = 1.0;
    double amp_shear = 1.0;
    double amp_energy = 1.0;

    double envelope(double r) const;
};

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> norms;
};

// || e^{tA} V0 ||_{H^s} over R^3 by radial Gauss quadrature (the angular
// integral reduces to 4 pi by rotational invariance of the blocks).
// Throws when node doubling does not converge to 1e-6 relative.
DecayCurve continuum_decay_probe(double s, double s0, const RadialProfile& profile,
                                 const std::vector<double>& times, const PhysicalParams& p);

// Closed-form oracle for a shear-only Gaussian profile at s = s0 = 0
// (no IR cutoff, no power law):  amp^2/(2pi)^2 * (sqrt(pi)/4) * (2 mu t/rho_inf + 1/w^2)^{-3/2}.
double shear_gaussian_decay_oracle(double t, double amp, double uv_width,
                                   const PhysicalParams& p);

// Torus-side probe: high-pass V0 with (1 - S_{j0}) and record the L^2 norm
// of e^{tA} V0 at the given times.
DecayCurve high_freq_decay_probe(const EnergyState& V0, const DyadicLadder& ladder, int j0,
                                 const std::vector<double>& times, const PhysicalParams& p);

} // namespace nsf
