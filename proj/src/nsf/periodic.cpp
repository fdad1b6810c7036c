#include "nsf/periodic.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nsf {

namespace {

constexpr double two_pi = 2.0 * 3.14159265358979323846;

SpectralField state_diff(const SpectralField& a, const SpectralField& b)
{
    SpectralField d = a;
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] -= b.data[i];
    return d;
}

} // namespace

double acceptance_norm(const SpectralField& U, const DyadicLadder& ladder)
{
    BesovParams bp;
    bp.s = 1.0;
    bp.r = std::numeric_limits<double>::infinity();
    return std::max(besov_norm(U, ladder, bp).norm, sobolev_norm(U, 4.0));
}

PeriodicSolution linear_periodic_solution(const Grid& grid, const ForceField& force,
                                          const PhysicalParams& p, const DyadicLadder& ladder)
{
    PeriodicSolution sol;
    sol.initial_point = EnergyState(grid);
    if (force.is_zero()) return sol;

    const double T = force.spec().period;
    const double omega = two_pi / T;

    for (std::size_t term = 0; term < force.spec().terms.size(); ++term) {
        const ForceSpec::Term& ft = force.spec().terms[term];
        const SpectralField& prof = force.term_profile(term);
        const cd ch = 0.5 * cd(ft.a, -ft.b); // w(t) = ch e^{i h w t} + conj
        const double hw = ft.harmonic * omega;

        for (std::size_t s = 0; s < grid.size(); ++s) {
            const cd amp = prof.at(ft.component, s);
            if (amp == cd(0.0, 0.0)) continue;
            int ix, iy, iz;
            site_to_ijk(grid, s, ix, iy, iz);
            const Vec3 xi(grid.wavenumber(ix), grid.wavenumber(iy), grid.wavenumber(iz));

            const Mat5 A = symbol_matrix(xi, p);
            Eigen::Matrix<cd, 5, 1> F = Eigen::Matrix<cd, 5, 1>::Zero();
            F(1 + ft.component) = p.rho_inf * force.spec().eps * amp;

            for (int sign = -1; sign <= 1; sign += 2) {
                const cd coeff = sign > 0 ? ch : std::conj(ch);
                Mat5 R = Mat5::Identity() * cd(0.0, sign * hw) - A;
                Eigen::JacobiSVD<Mat5> svd(R);
                const double cond =
                    svd.singularValues()(0) / svd.singularValues()(4);
                if (!(cond < 1e12)) {
                    std::ostringstream os;
                    os << "linear_periodic_solution: resolvent ill-conditioned at mode ("
                       << grid.k_of_index(ix) << "," << grid.k_of_index(iy) << ","
                       << grid.k_of_index(iz) << "), harmonic " << sign * ft.harmonic;
                    throw std::runtime_error(os.str());
                }
                const Eigen::Matrix<cd, 5, 1> resp = R.partialPivLu().solve(F);
                for (int c = 0; c < 5; ++c)
                    sol.initial_point.U.at(c, s) += coeff * resp(c);
            }
        }
    }

    // residual of the exact linear period map on the fixed point
    // Phi(U) - U = (e^{TA} - I) U + sum_k c_k (i k w - A)^{-1} (I - e^{TA}) F_k,
    // evaluated mode-by-mode on the force support.
    SpectralField err(grid, 5);
    for (std::size_t s = 0; s < grid.size(); ++s) {
        bool touched = false;
        for (int c = 0; c < 5 && !touched; ++c)
            touched = sol.initial_point.U.at(c, s) != cd(0.0, 0.0);
        if (!touched) continue;
        int ix, iy, iz;
        site_to_ijk(grid, s, ix, iy, iz);
        const Vec3 xi(grid.wavenumber(ix), grid.wavenumber(iy), grid.wavenumber(iz));
        const Mat5 A = symbol_matrix(xi, p);
        const Mat5 E = propagator_pade(A, T);
        Eigen::Matrix<cd, 5, 1> u;
        for (int c = 0; c < 5; ++c) u(c) = sol.initial_point.U.at(c, s);
        Eigen::Matrix<cd, 5, 1> acc = (E - Mat5::Identity()) * u;
        for (std::size_t term = 0; term < force.spec().terms.size(); ++term) {
            const ForceSpec::Term& ft = force.spec().terms[term];
            const cd amp = force.term_profile(term).at(ft.component, s);
            if (amp == cd(0.0, 0.0)) continue;
            const cd ch = 0.5 * cd(ft.a, -ft.b);
            const double hw = ft.harmonic * two_pi / T;
            Eigen::Matrix<cd, 5, 1> F = Eigen::Matrix<cd, 5, 1>::Zero();
            F(1 + ft.component) = p.rho_inf * force.spec().eps * amp;
            for (int sign = -1; sign <= 1; sign += 2) {
                const cd coeff = sign > 0 ? ch : std::conj(ch);
                const Mat5 R = Mat5::Identity() * cd(0.0, sign * hw) - A;
                acc += coeff * (R.partialPivLu().solve(
                                   Eigen::Matrix<cd, 5, 1>((Mat5::Identity() - E) * F)));
            }
        }
        for (int c = 0; c < 5; ++c) err.at(c, s) = acc(c);
    }
    sol.residual = acceptance_norm(err, ladder);
    sol.n_periods = 0;
    return sol;
}

PeriodicSolution poincare_iterate(const EtdStepper& stepper, const DyadicLadder& ladder,
                                  const PoincareOptions& opt,
                                  const EnergyState* initial_guess)
{
    const Grid& grid = stepper.grid();
    const double T = stepper.force().spec().period;
    const double dt = stepper.options().dt;
    const long long n_per = std::llround(T / dt);
    if (std::abs(n_per * dt - T) > 1e-9 * T)
        throw std::invalid_argument("poincare_iterate: period must be a multiple of dt");

    PeriodicSolution sol;
    EnergyState U = initial_guess ? *initial_guess : EnergyState(grid);
    if (opt.keep_samples) sol.samples.push_back(U);

    int rising = 0;
    double prev_d = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= opt.max_periods; ++n) {
        EnergyState prev = U;
        for (long long i = 0; i < n_per; ++i) U = stepper.step(U, i * dt);
        const double d = acceptance_norm(state_diff(U.U, prev.U), ladder);
        sol.decrements.push_back(d);
        if (opt.keep_samples) sol.samples.push_back(U);
        sol.n_periods = n;

        const double state_norm = acceptance_norm(U.U, ladder);
        if (state_norm > opt.delta_cap)
            throw std::runtime_error("poincare_iterate: state exceeded the delta cap "
                                     "(force too large)");
        if (d >= prev_d) {
            if (++rising >= 5)
                throw std::runtime_error(
                    "poincare_iterate: no contraction - force too large");
        } else {
            rising = 0;
        }
        prev_d = d;
        if (d < opt.tol) break;
    }

    sol.initial_point = U;
    // re-evolve one period for the periodicity residual and the trajectory
    Trajectory traj;
    EnergyState Uend = U;
    {
        std::vector<double> times;
        traj.norm_names = {"H1.0", "H4.0"};
        for (long long i = 0; i <= n_per; ++i) {
            if (i % opt.trajectory_cadence == 0 || i == n_per) {
                traj.times.push_back(i * dt);
                traj.norms.push_back({sobolev_norm(Uend.U, 1.0), sobolev_norm(Uend.U, 4.0)});
                traj.states.push_back(Uend);
            }
            if (i < n_per) Uend = stepper.step(Uend, i * dt);
        }
    }
    sol.period_trajectory = std::move(traj);
    sol.residual = acceptance_norm(state_diff(Uend.U, U.U), ladder);
    return sol;
}

CauchyReport cauchy_rate_report(const std::vector<EnergyState>& samples, double T,
                                const DyadicLadder& ladder)
{
    if (samples.size() < 10)
        throw std::invalid_argument("cauchy_rate_report: need >= 10 samples");

    CauchyReport rep;
    for (const EnergyState& s : samples)
        rep.delta_est = std::max(rep.delta_est, acceptance_norm(s.U, ladder));
    if (rep.delta_est == 0.0) {
        rep.degenerate = true;
        return rep;
    }

    double cmax = 0.0;
    std::vector<double> lx, ly;
    for (std::size_t n = 1; n < samples.size(); ++n) {
        for (std::size_t m = 0; m < n; ++m) {
            const double d = acceptance_norm(state_diff(samples[n].U, samples[m].U), ladder);
            const double idx = static_cast<double>(std::min(m, n - m));
            const double x = 1.0 + idx * T;
            cmax = std::max(cmax, d * std::pow(x, 0.25) / rep.delta_est);
            if (d > 0.0) {
                lx.push_back(std::log(x));
                ly.push_back(std::log(d));
            }
        }
    }
    rep.c_fit = cmax;
    if (lx.size() < 3) {
        rep.degenerate = true;
        return rep;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double nn = static_cast<double>(lx.size());
    const double denom = nn * sxx - sx * sx;
    rep.exponent_fit = denom != 0.0 ? (nn * sxy - sx * sy) / denom : 0.0;
    return rep;
}

} // namespace nsf
