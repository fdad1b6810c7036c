#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsf/grid.hpp"
#include "nsf/rng.hpp"

#include <cmath>

using namespace nsf;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("make_grid validates and exposes the wavenumber map")
{
    Grid g = make_grid(2.0 * pi, 8);
    CHECK(g.wavenumber(0) == 0.0);
    // signed wavenumbers run over {-3..4} at unit spacing
    CHECK(g.k_of_index(1) == 1);
    CHECK(g.k_of_index(7) == -1);
    CHECK(g.k_of_index(4) == 4);
    CHECK(g.k_of_index(5) == -3);
    CHECK(g.wavenumber(1) == doctest::Approx(1.0));

    Grid g2 = make_grid(4.0 * pi, 16);
    CHECK(g2.xi_min() == doctest::Approx(0.5));

    CHECK_THROWS(make_grid(2.0 * pi, 7));
    CHECK_THROWS(make_grid(2.0 * pi, 6));
    CHECK_THROWS(make_grid(-1.0, 8));
    CHECK_THROWS(make_grid(0.0, 8));
}

TEST_CASE("forward transform of simple fields")
{
    Grid g = make_grid(2.0 * pi, 8);
    const double vol = g.volume();

    SUBCASE("constant field puts its mass at the zero mode")
    {
        PhysicalField f(g, 1);
        for (std::size_t s = 0; s < g.size(); ++s) f.at(0, s) = 1.0;
        SpectralField F = forward_transform(f);
        CHECK(F.at(0, 0).real() == doctest::Approx(vol).epsilon(1e-12));
        double rest = 0.0;
        for (std::size_t s = 1; s < g.size(); ++s) rest += std::abs(F.at(0, s));
        CHECK(rest < 1e-9 * vol);
    }

    SUBCASE("cos(x1) splits between +-e1")
    {
        PhysicalField f(g, 1);
        for (std::size_t s = 0; s < g.size(); ++s) {
            int ix, iy, iz;
            site_to_ijk(g, s, ix, iy, iz);
            f.at(0, s) = std::cos(g.dx() * ix);
        }
        SpectralField F = forward_transform(f);
        const std::size_t plus = ijk_to_site(g, 1, 0, 0);
        const std::size_t minus = ijk_to_site(g, g.N - 1, 0, 0);
        CHECK(F.at(0, plus).real() == doctest::Approx(vol / 2).epsilon(1e-12));
        CHECK(F.at(0, minus).real() == doctest::Approx(vol / 2).epsilon(1e-12));
    }
}

TEST_CASE("round trip and Parseval")
{
    Grid g = make_grid(2.0 * pi, 16);
    SpectralField F = random_spectral_field(g, {1, 1.0, 0.0, 1.0}, 42);

    PhysicalField f = inverse_transform(F);
    SpectralField F2 = forward_transform(f);
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
        num += std::norm(F2.at(0, s) - F.at(0, s));
        den += std::norm(F.at(0, s));
    }
    CHECK(std::sqrt(num / den) < 1e-12);

    CHECK(l2_norm(f) == doctest::Approx(l2_norm_spectral(F)).epsilon(1e-12));
}

TEST_CASE("inverse transform rejects broken Hermitian symmetry")
{
    Grid g = make_grid(2.0 * pi, 8);
    SpectralField F(g, 1);
    F.at(0, ijk_to_site(g, 1, 0, 0)) = cd(1.0, 0.5);
    // no conjugate partner
    CHECK_THROWS(inverse_transform(F));

    SUBCASE("zero field inverts to zero")
    {
        SpectralField Z(g, 1);
        PhysicalField z = inverse_transform(Z);
        for (double v : z.data) CHECK(v == 0.0);
    }

    SUBCASE("a Hermitian pair gives a cosine")
    {
        SpectralField P(g, 1);
        P.at(0, ijk_to_site(g, 1, 0, 0)) = cd(g.volume() / 2, 0.0);
        P.at(0, ijk_to_site(g, g.N - 1, 0, 0)) = cd(g.volume() / 2, 0.0);
        PhysicalField f = inverse_transform(P);
        int ix, iy, iz;
        for (std::size_t s = 0; s < g.size(); ++s) {
            site_to_ijk(g, s, ix, iy, iz);
            CHECK(f.at(0, s) == doctest::Approx(std::cos(g.dx() * ix)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dealias zeroes the top third and is idempotent")
{
    Grid g = make_grid(2.0 * pi, 12); // cut = 4
    SpectralField F(g, 1);
    // inside the 2/3 ball
    F.at(0, ijk_to_site(g, 2, 1, 0)) = cd(1.0, 0.0);
    F.at(0, ijk_to_site(g, g.N - 2, g.N - 1, 0)) = cd(1.0, 0.0);
    // at the Nyquist plane
    F.at(0, ijk_to_site(g, 6, 0, 0)) = cd(3.0, 0.0);
    // just beyond the cut
    F.at(0, ijk_to_site(g, 5, 0, 0)) = cd(2.0, 0.0);

    SpectralField D = dealias(F);
    CHECK(D.at(0, ijk_to_site(g, 2, 1, 0)) == cd(1.0, 0.0));
    CHECK(D.at(0, ijk_to_site(g, 6, 0, 0)) == cd(0.0, 0.0));
    CHECK(D.at(0, ijk_to_site(g, 5, 0, 0)) == cd(0.0, 0.0));

    SpectralField DD = dealias(D);
    for (std::size_t s = 0; s < g.size(); ++s) CHECK(DD.at(0, s) == D.at(0, s));
}

TEST_CASE("spectral derivative matches i xi for band-limited fields")
{
    Grid g = make_grid(2.0 * pi, 16);
    SpectralField F = random_spectral_field(g, {1, 1.0, 0.0, 1.0}, 7);
    PhysicalField f = inverse_transform(F);

    // differentiate in physical space via the transform pair
    SpectralField D = derivative(F, 0);
    PhysicalField df = inverse_transform(D);

    // compare against a centered finite difference at high order? No: use a
    // single mode where the derivative is exact.
    SpectralField single(g, 1);
    single.at(0, ijk_to_site(g, 2, 0, 0)) = cd(0.0, -g.volume() / 2);
    single.at(0, ijk_to_site(g, g.N - 2, 0, 0)) = cd(0.0, g.volume() / 2);
    // this is sin(2 x1); derivative is 2 cos(2 x1)
    PhysicalField ds = inverse_transform(derivative(single, 0));
    for (std::size_t s = 0; s < g.size(); ++s) {
        int ix, iy, iz;
        site_to_ijk(g, s, ix, iy, iz);
        CHECK(ds.at(0, s) ==
              doctest::Approx(2.0 * std::cos(2.0 * g.dx() * ix)).epsilon(1e-10));
    }
    (void)f;
    (void)df;
}
