#include "nsf/linear_ops.hpp"

#include "nsf/matexp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nsf {

namespace {

constexpr double pi = 3.14159265358979323846;

struct Couplings {
    double sp1;  // sqrt(p1)
    double nu;   // (2mu + mu')/rho_inf
    double mu_r; // mu/rho_inf
    double ktil; // kappa/(c_V rho_inf)
    double g;    // momentum<-energy coupling
    double h;    // energy<-momentum coupling
};

Couplings couplings(const PhysicalParams& p)
{
    Couplings c;
    c.sp1 = std::sqrt(p.pc.p1);
    c.nu = (2.0 * p.mu + p.mu_prime) / p.rho_inf;
    c.mu_r = p.mu / p.rho_inf;
    c.ktil = p.kappa / (p.c_v * p.rho_inf);
    c.g = (p.pc.p2 / (p.c_v * p.rho_inf)) * std::sqrt(p.theta_inf / p.c_v);
    c.h = (p.pc.p2 / p.rho_inf) * std::sqrt(p.c_v * p.theta_inf);
    return c;
}

// Sort eigenvalues by (Re, Im) ascending, treating real parts equal within
// rounding as ties (conjugate pairs come out imaginary-ascending regardless
// of last-bit noise in the solver).
template <typename It>
void canonical_eig_sort(It first, It last, double scale)
{
    std::sort(first, last, [](const cd& a, const cd& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    const double tol = 1e-9 * std::max(scale, 1e-300);
    for (It i = first; i + 1 != last; ++i) {
        if (std::abs(i->real() - (i + 1)->real()) <= tol && i->imag() > (i + 1)->imag())
            std::iter_swap(i, i + 1);
    }
}

// J-symmetrization: enforce J E J = conj(E) with J = diag(1,-1,1), the
// discrete counterpart of A(-xi) = conj A(xi).  Keeps Hermitian symmetry of
// propagated fields bitwise.
Mat3 j_symmetrize(const Mat3& E)
{
    Mat3 R;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double sgn = ((i == 1) != (j == 1)) ? -1.0 : 1.0;
            R(i, j) = 0.5 * (E(i, j) + sgn * std::conj(E(i, j)));
        }
    return R;
}

} // namespace

Mat5 symbol_matrix(const Vec3& xi, const PhysicalParams& p)
{
    const Couplings c = couplings(p);
    const double r2 = xi.squaredNorm();
    Mat5 A = Mat5::Zero();
    const cd mi(0.0, -1.0);
    for (int i = 0; i < 3; ++i) {
        A(0, 1 + i) = mi * c.sp1 * xi[i];
        A(1 + i, 0) = mi * c.sp1 * xi[i];
        A(1 + i, 4) = mi * c.g * xi[i];
        A(4, 1 + i) = mi * c.h * xi[i];
        for (int j = 0; j < 3; ++j) {
            A(1 + i, 1 + j) = -((p.mu + p.mu_prime) / p.rho_inf) * xi[i] * xi[j];
            if (i == j) A(1 + i, 1 + j) += -c.mu_r * r2;
        }
    }
    A(4, 4) = -c.ktil * r2;
    return A;
}

Mat3 longitudinal_symbol(double r, const PhysicalParams& p)
{
    const Couplings c = couplings(p);
    Mat3 M = Mat3::Zero();
    const cd mi(0.0, -1.0);
    M(0, 1) = mi * c.sp1 * r;
    M(1, 0) = mi * c.sp1 * r;
    M(1, 1) = cd(-c.nu * r * r, 0.0);
    M(1, 2) = mi * c.g * r;
    M(2, 1) = mi * c.h * r;
    M(2, 2) = cd(-c.ktil * r * r, 0.0);
    return M;
}

void longitudinal_cubic(double r, const PhysicalParams& p, double& c2, double& c1, double& c0)
{
    const Couplings c = couplings(p);
    const double r2 = r * r;
    c2 = (c.nu + c.ktil) * r2;
    c1 = c.nu * c.ktil * r2 * r2 + (p.pc.p1 + c.g * c.h) * r2;
    c0 = p.pc.p1 * c.ktil * r2 * r2;
}

double shear_eigenvalue(double r, const PhysicalParams& p)
{
    return -(p.mu / p.rho_inf) * r * r;
}

RadialEigen radial_eigen(double r, const PhysicalParams& p)
{
    RadialEigen re;
    re.r = r;
    re.M = longitudinal_symbol(r, p);
    re.shear = shear_eigenvalue(r, p);

    Eigen::ComplexEigenSolver<Mat3> solver(re.M, /*computeEigenvectors=*/false);
    std::array<cd, 3> lam{solver.eigenvalues()(0), solver.eigenvalues()(1),
                          solver.eigenvalues()(2)};
    const double lam_scale =
        std::max({std::abs(lam[0]), std::abs(lam[1]), std::abs(lam[2])});
    canonical_eig_sort(lam.begin(), lam.end(), lam_scale);
    re.lambda = lam;

    const double scale = std::max({std::abs(lam[0]), std::abs(lam[1]), std::abs(lam[2]), 1e-300});
    const double sep = std::min({std::abs(lam[0] - lam[1]), std::abs(lam[0] - lam[2]),
                                 std::abs(lam[1] - lam[2])});
    if (sep < 1e-12 * scale) {
        re.degenerate = true;
        return re;
    }
    const Mat3 I = Mat3::Identity();
    for (int n = 0; n < 3; ++n) {
        Mat3 P = I;
        for (int m = 0; m < 3; ++m) {
            if (m == n) continue;
            P = P * ((re.M - lam[m] * I) / (lam[n] - lam[m]));
        }
        re.proj[n] = P;
    }
    return re;
}

ModeSystem eigendecompose(const Vec3& xi, const PhysicalParams& p)
{
    const double r = xi.norm();
    if (r == 0.0) throw std::invalid_argument("eigendecompose: xi must be nonzero");

    ModeSystem ms;
    ms.xi = xi;
    ms.A = symbol_matrix(xi, p);

    const RadialEigen re = radial_eigen(r, p);
    ms.degenerate = re.degenerate;

    const Vec3 unit = xi / r;
    // embedding of the longitudinal basis (U1, xihat.m, U5) into C^5
    Eigen::Matrix<double, 5, 3> B = Eigen::Matrix<double, 5, 3>::Zero();
    B(0, 0) = 1.0;
    for (int i = 0; i < 3; ++i) B(1 + i, 1) = unit[i];
    B(4, 2) = 1.0;

    Mat5 shear_proj = Mat5::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            shear_proj(1 + i, 1 + j) = (i == j ? 1.0 : 0.0) - unit[i] * unit[j];

    // collect (eigenvalue, multiplicity, projection) and sort by (Re, Im)
    struct Entry {
        cd lam;
        int mult;
        Mat5 proj;
    };
    std::vector<Entry> entries;
    entries.push_back({cd(re.shear, 0.0), 2, shear_proj});
    for (int n = 0; n < 3; ++n) {
        Mat5 P = Mat5::Zero();
        if (!re.degenerate) P = B.cast<cd>() * re.proj[n] * B.transpose().cast<cd>();
        entries.push_back({re.lambda[n], 1, P});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.lam.real() != b.lam.real()) return a.lam.real() < b.lam.real();
        return a.lam.imag() < b.lam.imag();
    });
    {
        double scale = 0.0;
        for (const Entry& e : entries) scale = std::max(scale, std::abs(e.lam));
        const double tol = 1e-9 * std::max(scale, 1e-300);
        for (std::size_t i = 0; i + 1 < entries.size(); ++i)
            if (std::abs(entries[i].lam.real() - entries[i + 1].lam.real()) <= tol &&
                entries[i].lam.imag() > entries[i + 1].lam.imag())
                std::swap(entries[i], entries[i + 1]);
    }
    for (int n = 0; n < 4; ++n) {
        ms.lambdas[n] = entries[n].lam;
        ms.multiplicity[n] = entries[n].mult;
        ms.projections[n] = entries[n].proj;
    }
    return ms;
}

Mat5 ModeSystem::propagator_resolution(double t) const
{
    if (degenerate)
        throw std::runtime_error("ModeSystem: spectral resolution unavailable "
                                 "(longitudinal eigenvalue collision)");
    Mat5 E = Mat5::Zero();
    for (int n = 0; n < 4; ++n) E += std::exp(t * lambdas[n]) * projections[n];
    return E;
}

Mat5 propagator_pade(const Mat5& A, double t)
{
    MatC M = t * A;
    return pade_expm(M);
}

SemigroupCache::SemigroupCache(const Grid& g, const PhysicalParams& p) : grid_(g), params_(p)
{
    const int half = g.N / 2;
    const int max_k2 = 3 * half * half;
    by_k2_.resize(max_k2 + 1);
    std::vector<char> seen(max_k2 + 1, 0);
    k2_of_site_.resize(g.size());
    const double base = g.xi_min();
    for (std::size_t s = 0; s < g.size(); ++s) {
        int ix, iy, iz;
        site_to_ijk(g, s, ix, iy, iz);
        const int kx = g.k_of_index(ix), ky = g.k_of_index(iy), kz = g.k_of_index(iz);
        const int k2 = kx * kx + ky * ky + kz * kz;
        k2_of_site_[s] = k2;
        if (k2 > 0 && !seen[k2]) {
            seen[k2] = 1;
            by_k2_[k2] = radial_eigen(base * std::sqrt(static_cast<double>(k2)), params_);
        }
    }
}

EnergyState SemigroupCache::apply(const EnergyState& U, double t) const
{
    if (t < 0.0) throw std::invalid_argument("semigroup_apply: t must be nonnegative");
    const Grid& g = U.U.grid;
    if (!(g == grid_)) throw std::invalid_argument("semigroup_apply: grid mismatch");
    if (t == 0.0) return U; // e^{0 A} = I exactly

    EnergyState out(g);
    const double base = g.xi_min();
    for (std::size_t s = 0; s < g.size(); ++s) {
        const int k2 = k2_of_site_[s];
        if (k2 == 0) { // A(0) = 0
            for (int c = 0; c < 5; ++c) out.U.at(c, s) = U.U.at(c, s);
            continue;
        }
        int ix, iy, iz;
        site_to_ijk(g, s, ix, iy, iz);
        const double x0 = g.wavenumber(ix), x1 = g.wavenumber(iy), x2 = g.wavenumber(iz);
        const double r = base * std::sqrt(static_cast<double>(k2));
        const RadialEigen& re = by_k2_[k2];

        Mat3 E3;
        if (!re.degenerate) {
            E3 = Mat3::Zero();
            for (int n = 0; n < 3; ++n) E3 += std::exp(t * re.lambda[n]) * re.proj[n];
        } else {
            E3 = pade_expm(MatC(t * re.M));
        }
        E3 = j_symmetrize(E3);
        const double esh = std::exp(t * re.shear);

        const bool nyq = g.k_of_index(ix) == g.N / 2 || g.k_of_index(iy) == g.N / 2 ||
                         g.k_of_index(iz) == g.N / 2;

        const double u0 = x0 / r, u1 = x1 / r, u2 = x2 / r;
        const cd m0 = U.U.at(1, s), m1 = U.U.at(2, s), m2 = U.U.at(3, s);
        const cd mL = u0 * m0 + u1 * m1 + u2 * m2;
        Eigen::Vector3cd w(U.U.at(0, s), mL, U.U.at(4, s));
        Eigen::Vector3cd wp;
        if (nyq) {
            // self-conjugate modes stay real: apply the real part of the block
            wp = E3.real().cast<cd>() * w;
        } else {
            wp = E3 * w;
        }
        const cd mLp = wp(1);
        out.U.at(0, s) = wp(0);
        out.U.at(4, s) = wp(2);
        out.U.at(1, s) = mLp * u0 + esh * (m0 - mL * u0);
        out.U.at(2, s) = mLp * u1 + esh * (m1 - mL * u1);
        out.U.at(3, s) = mLp * u2 + esh * (m2 - mL * u2);
    }
    return out;
}

EnergyState semigroup_apply(const EnergyState& U, double t, const PhysicalParams& p)
{
    SemigroupCache cache(U.U.grid, p);
    return cache.apply(U, t);
}

std::vector<double> log_spaced(double lo, double hi, int count)
{
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw std::invalid_argument("log_spaced: bad range");
    std::vector<double> out(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        out[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    return out;
}

ScanResult spectral_bounds_scan(const PhysicalParams& p, const std::vector<double>& radii)
{
    if (radii.size() < 2) throw std::invalid_argument("spectral_bounds_scan: need radii");

    ScanResult res;
    res.rows.reserve(radii.size());
    for (double r : radii) {
        const RadialEigen re = radial_eigen(r, p);
        ScanRow row;
        row.r = r;
        row.re[0] = re.shear;
        row.im[0] = 0.0;
        for (int n = 0; n < 3; ++n) {
            row.re[1 + n] = re.lambda[n].real();
            row.im[1 + n] = re.lambda[n].imag();
        }
        for (int n = 0; n < 4; ++n) {
            if (row.re[n] > 1e-10) {
                std::ostringstream os;
                os << "spectral_bounds_scan: dissipativity violated at |xi| = " << r
                   << " (Re lambda = " << row.re[n] << "); check the symbol signs";
                throw std::runtime_error(os.str());
            }
            row.ratio[n] = -row.re[n] / (r * r);
        }
        res.rows.push_back(row);
    }

    // largest r0 such that max/min of -Re lambda / r^2 over (0, r0] <= 10
    const double band_factor = 10.0;
    double running_max = 0.0, running_min = std::numeric_limits<double>::infinity();
    std::size_t last_ok = 0;
    std::vector<double> cum_max(res.rows.size()), cum_min(res.rows.size());
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        for (double q : res.rows[i].ratio) {
            running_max = std::max(running_max, q);
            running_min = std::min(running_min, q);
        }
        cum_max[i] = running_max;
        cum_min[i] = running_min;
        if (running_min > 0.0 && running_max / running_min <= band_factor) last_ok = i;
    }
    // keep at least one scan point above r0 so beta is well defined
    if (last_ok + 1 >= res.rows.size()) last_ok = res.rows.size() - 2;

    res.bounds.r0 = res.rows[last_ok].r;
    res.bounds.c_high = cum_max[last_ok];
    res.bounds.c_low = cum_min[last_ok];
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = last_ok + 1; i < res.rows.size(); ++i)
        for (double q : res.rows[i].re) worst = std::max(worst, q);
    res.bounds.beta = -worst;
    if (!(res.bounds.beta > 0.0) || !(res.bounds.c_low > 0.0))
        throw std::runtime_error("spectral_bounds_scan: no positive spectral gap found");
    return res;
}

double RadialProfile::envelope(double r) const
{
    const double uv = std::exp(-0.5 * r * r / (uv_width * uv_width));
    if (pure_gaussian) return uv;
    if (r < ir_cutoff) return 0.0;
    return std::pow(r, -s0 - 1.5) * uv;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
const double gl_x[16] = {-0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
                         -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
                         -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
                         0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
                         0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
                         0.9894009349916499};
const double gl_w[16] = {0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
                         0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
                         0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
                         0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                         0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
                         0.0271524594117541};

} // namespace

DecayCurve continuum_decay_probe(double s, double s0, const RadialProfile& profile,
                                 const std::vector<double>& times, const PhysicalParams& p)
{
    if (s < s0) throw std::invalid_argument("continuum_decay_probe: need s >= s0");
    if (!profile.pure_gaussian && std::abs(profile.s0 - s0) > 1e-12)
        throw std::invalid_argument("continuum_decay_probe: profile slope does not match s0");

    const double r_lo = profile.pure_gaussian ? 1e-4 : profile.ir_cutoff;
    const double r_hi = std::max(10.0 * profile.uv_width, r_lo * 4.0);
    const double ulo = std::log(r_lo), uhi = std::log(r_hi);

    auto evaluate = [&](int panels, std::vector<double>& out) {
        out.assign(times.size(), 0.0);
        const double du = (uhi - ulo) / panels;
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double ua = ulo + pnl * du;
            for (int q = 0; q < 16; ++q) {
                const double u = ua + 0.5 * du * (gl_x[q] + 1.0);
                const double r = std::exp(u);
                const double wq = 0.5 * du * gl_w[q] * r; // du -> dr Jacobian
                const double A = profile.envelope(r);
                if (A == 0.0) continue;
                const RadialEigen re = radial_eigen(r, p);
                const Eigen::Vector3cd w0(profile.amp_sigma * A, profile.amp_long * A,
                                          profile.amp_energy * A);
                for (std::size_t it = 0; it < times.size(); ++it) {
                    const double t = times[it];
                    Mat3 E3;
                    if (!re.degenerate) {
                        E3 = Mat3::Zero();
                        for (int n = 0; n < 3; ++n)
                            E3 += std::exp(t * re.lambda[n]) * re.proj[n];
                    } else {
                        E3 = pade_expm(MatC(t * re.M));
                    }
                    const Eigen::Vector3cd wt = E3 * w0;
                    const double esh = std::exp(t * re.shear) * profile.amp_shear * A;
                    const double dens = wt.squaredNorm() + esh * esh;
                    out[it] += wq * std::pow(r, 2.0 * s + 2.0) * dens;
                }
            }
        }
        const double ang = 4.0 * pi / std::pow(2.0 * pi, 3.0);
        for (double& v : out) v = std::sqrt(ang * v);
    };

    std::vector<double> coarse, fine;
    int panels = 64;
    evaluate(panels, coarse);
    for (;;) {
        panels *= 2;
        evaluate(panels, fine);
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double scale = std::max(std::abs(fine[i]), 1e-300);
            worst = std::max(worst, std::abs(fine[i] - coarse[i]) / scale);
        }
        if (worst <= 1e-6) break;
        if (panels >= 1 << 14)
            throw std::runtime_error("continuum_decay_probe: quadrature did not converge "
                                     "under node doubling");
        coarse = fine;
    }
    DecayCurve curve;
    curve.times = times;
    curve.norms = fine;
    return curve;
}

double shear_gaussian_decay_oracle(double t, double amp, double uv_width,
                                   const PhysicalParams& p)
{
    const double alpha = 2.0 * p.mu * t / p.rho_inf + 1.0 / (uv_width * uv_width);
    const double integral = amp * amp * std::sqrt(pi) / (4.0 * std::pow(alpha, 1.5));
    return std::sqrt(4.0 * pi / std::pow(2.0 * pi, 3.0) * integral);
}

DecayCurve high_freq_decay_probe(const EnergyState& V0, const DyadicLadder& ladder, int j0,
                                 const std::vector<double>& times, const PhysicalParams& p)
{
    EnergyState high(V0.U.grid);
    SpectralField low = low_cutoff(V0.U, ladder, j0);
    for (std::size_t i = 0; i < V0.U.data.size(); ++i)
        high.U.data[i] = V0.U.data[i] - low.data[i];
    // the mean has no dynamics and is not part of the high-frequency band
    for (int c = 0; c < 5; ++c) high.U.at(c, 0) = cd(0.0, 0.0);

    SemigroupCache cache(V0.U.grid, p);
    DecayCurve curve;
    curve.times = times;
    curve.norms.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        EnergyState Ut = cache.apply(high, times[i]);
        curve.norms[i] = l2_norm_spectral(Ut.U);
    }
    return curve;
}

} // namespace nsf
