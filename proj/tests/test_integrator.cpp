#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsf/integrator.hpp"
#include "nsf/linear_ops.hpp"
#include "nsf/rng.hpp"

#include <cmath>

using namespace nsf;

namespace {
constexpr double pi = 3.14159265358979323846;

double rel_diff(const SpectralField& a, const SpectralField& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(b.data[i]);
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

EnergyState small_random_state(const Grid& g, double amp, std::uint64_t seed)
{
    EnergyState U;
    U.U = random_spectral_field(g, {5, 1.0, 0.0, amp}, seed);
    return U;
}

PrimitiveState primitive_of(const EnergyState& U, const PhysicalParams& p)
{
    return recover_primitive(U, p);
}

double h1_gap(const EnergyState& a, const EnergyState& b)
{
    SpectralField d = a.U;
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] -= b.U.data[i];
    return sobolev_norm(d, 1.0);
}
}

TEST_CASE("linear exactness: the stepper with no source equals the semigroup")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    EnergyState U0 = small_random_state(g, 0.1, 99);

    for (double dt : {0.5, 0.05}) {
        IntegratorOptions opt;
        opt.dt = dt;
        opt.linear_only = true;
        ForceField no_force(g, ForceSpec{});
        EtdStepper stepper(g, p, no_force, opt);
        EnergyState U1 = stepper.step(U0, 0.0);
        EnergyState V1 = semigroup_apply(U0, dt, p);
        CHECK(rel_diff(U1.U, V1.U) < 1e-12);
    }
}

TEST_CASE("equilibrium is a fixed point of the full nonlinear stepper")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    EnergyState U0(g);
    IntegratorOptions opt;
    opt.dt = 0.01;
    ForceField no_force(g, ForceSpec{});
    EtdStepper stepper(g, p, no_force, opt);
    EnergyState U = U0;
    for (int i = 0; i < 10; ++i) U = stepper.step(U, i * opt.dt);
    for (const cd& z : U.U.data) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("self-convergence of ETDRK2 is at least second order")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    EnergyState U0 = small_random_state(g, 5e-3, 12345);
    ForceField no_force(g, ForceSpec{});

    auto run = [&](double dt) {
        IntegratorOptions opt;
        opt.dt = dt;
        EtdStepper stepper(g, p, no_force, opt);
        EnergyState U = U0;
        const long long n = std::llround(0.5 / dt);
        for (long long i = 0; i < n; ++i) U = stepper.step(U, i * dt);
        return U;
    };

    EnergyState a = run(0.05);
    EnergyState b = run(0.025);
    EnergyState c = run(0.0125);
    const double g1 = h1_gap(a, b);
    const double g2 = h1_gap(b, c);
    const double order = std::log2(g1 / g2);
    CHECK(order >= 1.8);
}

TEST_CASE("primitive oracle conserves mass and holds equilibrium")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    ForceField no_force(g, ForceSpec{});

    SUBCASE("equilibrium fixed point")
    {
        PrimitiveState s = equilibrium_state(g, p);
        PrimitiveState s2 = oracle_step_primitive(s, 0.0, 1e-3, no_force, p);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(s2.rho.at(0, i) == doctest::Approx(p.rho_inf).epsilon(1e-14));
            CHECK(s2.theta.at(0, i) == doctest::Approx(p.theta_inf).epsilon(1e-14));
        }
    }

    SUBCASE("mean density is conserved to 1e-13")
    {
        PhysicalParams pp = default_params();
        EnergyState U0 = small_random_state(g, 5e-3, 777);
        PrimitiveState s = primitive_of(U0, pp);
        double mean0 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) mean0 += s.rho.at(0, i);
        mean0 /= static_cast<double>(g.size());
        for (int i = 0; i < 200; ++i) s = oracle_step_primitive(s, i * 1e-3, 1e-3, no_force, pp);
        double mean1 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) mean1 += s.rho.at(0, i);
        mean1 /= static_cast<double>(g.size());
        CHECK(std::abs(mean1 - mean0) < 1e-13);
    }
}

TEST_CASE("u-transform consistency: d/dt U along the oracle matches the "
          "transformed system's right-hand side")
{
    // the certification of the implemented nonlinear terms against the
    // primitive equations: centered dU/dt on an oracle trajectory vs
    // A U + N(U), refined in dt
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    ForceField no_force(g, ForceSpec{});
    EnergyState U0 = small_random_state(g, 1e-2, 4242);

    auto residual_at = [&](double dt) {
        PrimitiveState sm = primitive_of(U0, p);
        PrimitiveState s0 = oracle_step_primitive(sm, 0.0, dt, no_force, p);
        PrimitiveState sp = oracle_step_primitive(s0, dt, dt, no_force, p);
        // centered difference of U across [0, 2 dt] at t = dt
        EnergyState Um = to_energy_state(sm, p, true);
        EnergyState Uc = to_energy_state(s0, p, true);
        EnergyState Up = to_energy_state(sp, p, true);

        SpectralField dudt(g, 5);
        for (std::size_t i = 0; i < dudt.data.size(); ++i)
            dudt.data[i] = (Up.U.data[i] - Um.U.data[i]) / (2.0 * dt);

        // right-hand side at the middle state
        NonlinearTerms nt = nonlinear_terms(recover_primitive(Uc, p), p);
        SemigroupCache cache(g, p);
        // A U via the exact semigroup derivative: (e^{h A} - e^{-h A})/(2h)
        // would reintroduce differencing error; use the symbol directly
        SpectralField AU(g, 5);
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            const Vec3 xi(g.wavenumber(ix), g.wavenumber(iy), g.wavenumber(iz));
            if (xi.norm() == 0.0) continue;
            const Mat5 A = symbol_matrix(xi, p);
            Eigen::Matrix<cd, 5, 1> u;
            for (int c = 0; c < 5; ++c) u(c) = Uc.U.at(c, s);
            const Eigen::Matrix<cd, 5, 1> au = A * u;
            for (int c = 0; c < 5; ++c) AU.at(c, s) = au(c);
        }
        SpectralField rhs = AU;
        for (std::size_t i = 0; i < rhs.data.size(); ++i)
            rhs.data[i] += nt.u_source.data[i];

        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < rhs.data.size(); ++i) {
            num += std::norm(dudt.data[i] - rhs.data[i]);
            den += std::norm(rhs.data[i]);
        }
        return std::sqrt(num / den);
    };

    const double r1 = residual_at(4e-3);
    const double r2 = residual_at(2e-3);
    const double r3 = residual_at(1e-3);
    CHECK(r1 < 1e-3);
    // O(dt^2) decay of the residual until the spectral floor
    CHECK(r1 / r2 > 3.0);
    CHECK(r2 / r3 > 3.0);
}

TEST_CASE("cross-integrator agreement at O(dt^2)")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    ForceField no_force(g, ForceSpec{});
    EnergyState U0 = small_random_state(g, 5e-3, 31415);

    auto gap_at = [&](double dt) {
        const double t_end = 0.25;
        const long long n = std::llround(t_end / dt);

        IntegratorOptions opt;
        opt.dt = dt;
        EtdStepper stepper(g, p, no_force, opt);
        EnergyState U = U0;
        PrimitiveState s = primitive_of(U0, p);
        for (long long i = 0; i < n; ++i) {
            U = stepper.step(U, i * dt);
            s = oracle_step_primitive(s, i * dt, dt, no_force, p);
        }
        EnergyState Uo = to_energy_state(s, p, true);
        return h1_gap(U, Uo);
    };

    const double g1 = gap_at(4e-3);
    const double g2 = gap_at(2e-3);
    const double g3 = gap_at(1e-3);
    CHECK(g1 / g2 > 3.0);
    CHECK(g2 / g3 > 3.0);
}

TEST_CASE("evolve records, stores, and respects t_end = 0")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    ForceField no_force(g, ForceSpec{});
    IntegratorOptions opt;
    opt.dt = 0.01;
    EtdStepper stepper(g, p, no_force, opt);
    EnergyState U0 = small_random_state(g, 1e-3, 5);

    NormRecordSpec rec;
    Trajectory t0 = evolve(U0, 0.0, 1, stepper, rec, nullptr, true);
    CHECK(t0.times.size() == 1);
    CHECK(t0.states.size() == 1);

    Trajectory t1 = evolve(U0, 0.1, 2, stepper, rec, nullptr, false);
    CHECK(t1.times.front() == 0.0);
    CHECK(t1.times.back() == doctest::Approx(0.1));
    CHECK(t1.states.empty());
    CHECK(t1.norms.size() == t1.times.size());
}

TEST_CASE("linear-only evolve matches the semigroup over time")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    ForceField no_force(g, ForceSpec{});
    IntegratorOptions opt;
    opt.dt = 0.02;
    opt.linear_only = true;
    EtdStepper stepper(g, p, no_force, opt);

    // low-frequency data
    EnergyState U0(g);
    for (int c = 0; c < 5; ++c) {
        U0.U.at(c, ijk_to_site(g, 1, 0, 0)) = cd(0.3, 0.0);
        U0.U.at(c, ijk_to_site(g, g.N - 1, 0, 0)) = cd(0.3, 0.0);
    }
    NormRecordSpec rec;
    rec.sobolev_k = {1.0};
    Trajectory traj = evolve(U0, 1.0, 10, stepper, rec, nullptr, false);
    SemigroupCache cache(g, p);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        EnergyState V = cache.apply(U0, traj.times[i]);
        CHECK(traj.norms[i][0] ==
              doctest::Approx(sobolev_norm(V.U, 1.0)).epsilon(1e-8));
    }
}

TEST_CASE("energy identity residual")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    ForceField no_force(g, ForceSpec{});

    SUBCASE("equilibrium trajectory has zero residual")
    {
        IntegratorOptions opt;
        opt.dt = 0.01;
        EtdStepper stepper(g, p, no_force, opt);
        Trajectory traj = evolve(EnergyState(g), 0.1, 1, stepper, {}, nullptr, true);
        auto res = energy_identity_residual(traj, 1, p);
        for (const auto& [t, r] : res) CHECK(r < 1e-14);
    }

    SUBCASE("residual decays at second order in the snapshot spacing")
    {
        EnergyState U0 = small_random_state(g, 1e-2, 2718);
        auto residual_scale = [&](double dt) {
            IntegratorOptions opt;
            opt.dt = dt;
            EtdStepper stepper(g, p, no_force, opt);
            Trajectory traj = evolve(U0, 16.0 * 0.004, 1, stepper, {}, nullptr, true);
            auto res = energy_identity_residual(traj, 1, p);
            double worst = 0.0;
            for (const auto& [t, r] : res) worst = std::max(worst, r);
            return worst;
        };
        const double r1 = residual_scale(0.004);
        const double r2 = residual_scale(0.002);
        CHECK(r1 / r2 > 3.0);
    }

    SUBCASE("residual scales like the cube of the amplitude on linear runs")
    {
        auto residual_for_amp = [&](double amp) {
            EnergyState U0 = small_random_state(g, amp, 606);
            IntegratorOptions opt;
            opt.dt = 0.002;
            opt.linear_only = true;
            EtdStepper stepper(g, p, no_force, opt);
            Trajectory traj = evolve(U0, 0.02, 1, stepper, {}, nullptr, true);
            auto res = energy_identity_residual(traj, 1, p);
            double worst = 0.0;
            for (const auto& [t, r] : res) worst = std::max(worst, r);
            return worst;
        };
        const double ra = residual_for_amp(1e-2);
        const double rb = residual_for_amp(1e-3);
        const double order = std::log10(ra / rb);
        CHECK(order >= 1.9); // at least amplitude^2, cubic expected
    }

    SUBCASE("residual needs at least three snapshots")
    {
        IntegratorOptions opt;
        opt.dt = 0.01;
        EtdStepper stepper(g, p, no_force, opt);
        Trajectory traj = evolve(EnergyState(g), 0.01, 1, stepper, {}, nullptr, true);
        CHECK_THROWS(energy_identity_residual(traj, 1, p));
        Trajectory traj2 = evolve(EnergyState(g), 0.05, 1, stepper, {}, nullptr, true);
        CHECK_THROWS(energy_identity_residual(traj2, 0, p));
        CHECK_THROWS(energy_identity_residual(traj2, 5, p));
    }
}
