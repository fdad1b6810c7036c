#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsf/model.hpp"
#include "nsf/params.hpp"
#include "nsf/rng.hpp"

#include <cmath>

using namespace nsf;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("pressure constants for the ideal gas at the unit reference")
{
    PhysicalParams p = default_params();
    CHECK(p.pc.p1 == 1.0);
    CHECK(p.pc.p2 == 1.0);
    CHECK(p.pc.q1 == 0.0);
    CHECK(p.pc.q2 == 1.0);
    // modified-energy prefactors
    CHECK(p.force_energy_weight() == doctest::Approx(2.0));
    CHECK(p.w_density() == doctest::Approx(1.0));
}

TEST_CASE("finite-difference path matches a polynomial law")
{
    // P = rho^2 theta + rho theta^2 through the table law (forced FD path)
    auto law = std::make_shared<TablePressureLaw>();
    law->terms = {{2, 1, 1.0}, {1, 2, 1.0}};
    PressureConstants pc = pressure_constants(*law, 1.5, 0.8);
    // p1 = 2 rho theta + theta^2, p2 = rho^2 + 2 rho theta,
    // q1 = 2 theta, q2 = 2 rho + 2 theta
    CHECK(pc.p1 == doctest::Approx(2 * 1.5 * 0.8 + 0.64).epsilon(1e-9));
    CHECK(pc.p2 == doctest::Approx(2.25 + 2 * 1.5 * 0.8).epsilon(1e-9));
    CHECK(pc.q1 == doctest::Approx(1.6).epsilon(1e-6));
    CHECK(pc.q2 == doctest::Approx(3.0 + 1.6).epsilon(1e-6));
}

TEST_CASE("stability conditions are enforced")
{
    // P = rho^2: theta-independent, p2 = 0
    auto law = std::make_shared<TablePressureLaw>();
    law->terms = {{2, 0, 1.0}};
    CHECK_THROWS_WITH_AS(pressure_constants(*law, 1.0, 1.0),
                         doctest::Contains("stability conditions"), std::runtime_error);

    CHECK_THROWS_WITH_AS(make_params(-1.0, 0.0, 1.0, 1.5, 1.0, 1.0,
                                     std::make_shared<IdealGasLaw>(1.0)),
                         doctest::Contains("thermodynamic"), std::runtime_error);
    CHECK_THROWS(make_params(1.0, -1.0, 1.0, 1.5, 1.0, 1.0,
                             std::make_shared<IdealGasLaw>(1.0)));
}

TEST_CASE("modified energy functional pointwise values")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 8);

    SUBCASE("equilibrium gives zero")
    {
        PrimitiveState s = equilibrium_state(g, p);
        PhysicalField e = energy_functional(s, p);
        for (double x : e.data) CHECK(x == 0.0);
    }

    SUBCASE("pure thermal offset: E = c_V rho_inf h")
    {
        PrimitiveState s = equilibrium_state(g, p);
        const double h = 0.01;
        for (std::size_t i = 0; i < g.size(); ++i) s.theta.at(0, i) += h;
        PhysicalField e = energy_functional(s, p);
        for (double x : e.data) CHECK(x == doctest::Approx(1.5 * h).epsilon(1e-12));
    }

    SUBCASE("uniform velocity with |v|^2 = 2: E = w_kinetic rho |v|^2 = 2")
    {
        PrimitiveState s = equilibrium_state(g, p);
        for (std::size_t i = 0; i < g.size(); ++i) {
            s.v.at(0, i) = 1.0;
            s.v.at(1, i) = 1.0;
        }
        PhysicalField e = energy_functional(s, p);
        for (double x : e.data) CHECK(x == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("energy state round trip")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);

    SUBCASE("zero state maps to zero")
    {
        EnergyState U(g);
        PrimitiveState s = recover_primitive(U, p);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(s.rho.at(0, i) == doctest::Approx(1.0));
            CHECK(s.theta.at(0, i) == doctest::Approx(1.0));
            CHECK(s.v.at(0, i) == doctest::Approx(0.0));
        }
    }

    SUBCASE("random small states round trip to 1e-10")
    {
        for (int trial = 0; trial < 100; ++trial) {
            SpectralField R = random_spectral_field(g, {5, 1.0, 0.0, 0.02}, 7000 + trial);
            EnergyState U;
            U.U = R;
            PrimitiveState s = recover_primitive(U, p);
            EnergyState U2 = to_energy_state(s, p);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < U.U.data.size(); ++i) {
                num += std::norm(U2.U.data[i] - U.U.data[i]);
                den += std::norm(U.U.data[i]);
            }
            CHECK(std::sqrt(num / std::max(den, 1e-300)) < 1e-10);
        }
    }

    SUBCASE("vacuum is rejected")
    {
        PrimitiveState s = equilibrium_state(g, p);
        EnergyState U = to_energy_state(s, p);
        // sigma = -rho_inf at the zero mode
        U.U.at(0, 0) = cd(-std::sqrt(p.pc.p1) * p.rho_inf * g.volume(), 0.0);
        CHECK_THROWS_WITH_AS(recover_primitive(U, p), doctest::Contains("vacuum"),
                             std::runtime_error);
    }
}

TEST_CASE("dissipation function")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);

    SUBCASE("zero velocity")
    {
        PhysicalField v(g, 3);
        PhysicalField psi = dissipation(v, p);
        for (double x : psi.data) CHECK(x == 0.0);
    }

    SUBCASE("single shear mode: Psi = mu (dv1/dx2)^2 pattern")
    {
        // v = (sin(x2), 0, 0): dv1/dx2 = cos(x2); D12 = cos(x2)/2
        // Psi = 2 mu (2 D12^2) = mu cos^2(x2)
        PhysicalField v(g, 3);
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            v.at(0, s) = std::sin(g.dx() * iy);
        }
        PhysicalField psi = dissipation(v, p);
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            const double c = std::cos(g.dx() * iy);
            CHECK(psi.at(0, s) == doctest::Approx(p.mu * c * c).epsilon(1e-9));
        }
    }

    SUBCASE("rigid rotation dissipates nothing")
    {
        // band-limited projection of omega x x on the torus: use the
        // divergence-free antisymmetric mode pair v = (sin(x2), -sin(x1), 0)?
        // that is not rigid; instead check the antisymmetric-gradient part of
        // a shear pair cancels: v = (sin(x2), -sin(x1), 0) has
        // D12 = (cos x2 - cos x1)/2 which vanishes on the diagonal x1 = x2.
        PhysicalField v(g, 3);
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            v.at(0, s) = std::sin(g.dx() * iy);
            v.at(1, s) = -std::sin(g.dx() * ix);
        }
        PhysicalField psi = dissipation(v, p);
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            if (ix != iy) continue;
            CHECK(std::abs(psi.at(0, s)) < 1e-9);
        }
        // and pointwise nonnegative when mu' >= 0
        for (double x : psi.data) CHECK(x >= -1e-12);
    }
}

TEST_CASE("time-periodic force")
{
    Grid g = make_grid(2.0 * pi, 16);
    ForceSpec spec;
    spec.period = 1.0;
    spec.eps = 1e-3;
    spec.terms.push_back({{1, 0, 0}, 0, 1, 1.0, 0.0});
    ForceField force(g, spec);

    SUBCASE("exact periodicity, bit for bit")
    {
        for (double t : {0.0, 0.25, 0.3125, 0.7}) {
            PhysicalField a = force.eval(t);
            PhysicalField b = force.eval(t + 1.0);
            for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == b.data[i]);
        }
    }

    SUBCASE("zero amplitude gives a zero field")
    {
        ForceSpec z = spec;
        z.eps = 0.0;
        ForceField zf(g, z);
        PhysicalField f = zf.eval(0.3);
        for (double x : f.data) CHECK(x == 0.0);
    }

    SUBCASE("pure cosine waveform vanishes at t = T/4")
    {
        PhysicalField f = force.eval(0.25);
        for (double x : f.data) CHECK(std::abs(x) < 1e-18);
    }
}

TEST_CASE("nonlinear terms at equilibrium vanish identically")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    PrimitiveState s = equilibrium_state(g, p);
    NonlinearTerms nt = nonlinear_terms(s, p);
    for (const cd& z : nt.momentum.data) CHECK(std::abs(z) == 0.0);
    for (const cd& z : nt.energy_div.data) CHECK(std::abs(z) == 0.0);
    for (const cd& z : nt.energy_src.data) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("momentum and divergence-form energy terms have zero mean")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    SpectralField R = random_spectral_field(g, {5, 1.0, 0.0, 0.05}, 31337);
    EnergyState U;
    U.U = R;
    PrimitiveState s = recover_primitive(U, p);
    NonlinearTerms nt = nonlinear_terms(s, p);

    const double scale = l2_norm_spectral(nt.momentum) + l2_norm_spectral(nt.energy_div);
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(nt.momentum.at(c, 0)) < 1e-12 * g.volume() * scale);
    CHECK(std::abs(nt.energy_div.at(0, 0)) < 1e-12 * g.volume() * scale);
}

TEST_CASE("shear-only state: pressure remainders vanish")
{
    PhysicalParams p = default_params();
    Grid g = make_grid(2.0 * pi, 16);
    // sigma = 0, eta = 0, v = single shear mode: Q1 = Q2 = 0 pointwise and
    // R = -E/(c_V rho_inf) with E = w_kinetic rho |v|^2; so the energy-src
    // assembly must see exactly the dissipation + viscous-work + R-route
    // terms.  We check the remainder identity through the recover map:
    PrimitiveState s = equilibrium_state(g, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
        int ix, iy, iz;
        site_to_ijk(g, i, ix, iy, iz);
        s.v.at(0, i) = 0.01 * std::sin(g.dx() * iy);
    }
    PhysicalField e = energy_functional(s, p);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double vv = s.v.at(0, i) * s.v.at(0, i);
        CHECK(e.at(0, i) == doctest::Approx(p.w_kinetic() * vv).epsilon(1e-12));
    }
}
