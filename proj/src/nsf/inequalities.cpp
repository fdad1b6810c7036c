#include "nsf/inequalities.hpp"

#include "nsf/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nsf {

namespace {

const double inf = std::numeric_limits<double>::infinity();

double besov(const SpectralField& F, const DyadicLadder& lad, double s, double r)
{
    return besov_norm(F, lad, BesovParams{s, r}).norm;
}

// ratio for the interpolation inequality with s1=0, s2=1, theta=1/2, r=2
double interpolation_ratio(const SpectralField& F, const DyadicLadder& lad)
{
    const double lhs = besov(F, lad, 0.5, 2.0);
    const double rhs = std::sqrt(besov(F, lad, 0.0, inf) * besov(F, lad, 1.0, inf));
    return rhs > 0.0 ? lhs / rhs : 0.0;
}

double bilinear_ratio(const SpectralField& Fu, const SpectralField& Fv,
                      const DyadicLadder& lad)
{
    PhysicalField u = inverse_transform_unchecked(Fu);
    PhysicalField v = inverse_transform_unchecked(Fv);
    PhysicalField uv(u.grid, 1);
    for (std::size_t s = 0; s < u.grid.size(); ++s) uv.at(0, s) = u.at(0, s) * v.at(0, s);
    SpectralField uv_hat = dealias(forward_transform(uv));
    const double lhs = besov(uv_hat, lad, 0.5, 1.0);
    const double rhs = besov(Fu, lad, 1.0, 2.0) * besov(Fv, lad, 1.0, 2.0);
    return rhs > 0.0 ? lhs / rhs : 0.0;
}

double embedding_ratio(const SpectralField& F, const DyadicLadder& lad)
{
    PhysicalField u = inverse_transform_unchecked(F);
    double linf = 0.0;
    for (double x : u.data) linf = std::max(linf, std::abs(x));
    const double rhs = besov(F, lad, 1.5, 1.0);
    return rhs > 0.0 ? linf / rhs : 0.0;
}

double commutator_ratio(const SpectralField& Fv, const SpectralField& Fu,
                        const DyadicLadder& lad, double s, int k_axis)
{
    const Grid& g = Fv.grid;
    PhysicalField v = inverse_transform_unchecked(Fv);
    PhysicalField u = inverse_transform_unchecked(Fu);

    // l^2 aggregation of 2^{js} || [Delta_j, v d_k] u ||_{L^2}
    double sum = 0.0;
    for (int j = lad.j_min; j <= lad.j_max; ++j) {
        PhysicalField c = commutator_block(v, u, lad, j, k_axis);
        const double term = std::pow(2.0, j * s) * l2_norm(c);
        sum += term * term;
    }
    const double lhs = std::sqrt(sum);

    SpectralField grad_v(g, 3);
    for (int d = 0; d < 3; ++d) {
        SpectralField dv = derivative(Fv, d);
        for (std::size_t site = 0; site < g.size(); ++site)
            grad_v.at(d, site) = dv.at(0, site);
    }
    const double rhs = besov(grad_v, lad, 1.5, 1.0) * besov(Fu, lad, s, 2.0);
    return rhs > 0.0 ? lhs / rhs : 0.0;
}

} // namespace

InequalityReport check_inequalities(const Grid& grid, const DyadicLadder& ladder,
                                    const CorpusSpec& corpus)
{
    if (corpus.n_fields < 2) throw std::invalid_argument("check_inequalities: corpus too small");

    RandomFieldSpec spec;
    spec.comps = 1;
    spec.slope = corpus.slope;

    auto field = [&](int i) {
        return random_spectral_field(grid, spec, corpus.seed + static_cast<std::uint64_t>(i));
    };

    InequalityLine interp{"interpolation s=(0,1) theta=1/2", 0.0, 0.0};
    InequalityLine bilin{"bilinear B1*B1 -> B1/2", 0.0, 0.0};
    InequalityLine embed{"embedding B^{3/2}_{2,1} -> Linf", 0.0, 0.0};
    InequalityLine commut{"commutator s in {0, 1/2, 1}", 0.0, 0.0};

    const int n2 = 2 * corpus.n_fields;
    for (int i = 0; i < n2; ++i) {
        SpectralField F = field(i);
        const double ri = interpolation_ratio(F, ladder);
        const double re = embedding_ratio(F, ladder);
        SpectralField G = field(i + 1000000);
        const double rb = bilinear_ratio(F, G, ladder);
        double rc = 0.0;
        for (double s : {0.0, 0.5, 1.0})
            rc = std::max(rc, commutator_ratio(F, G, ladder, s, i % 3));

        auto update = [&](InequalityLine& line, double r) {
            if (i < corpus.n_fields) line.max_ratio = std::max(line.max_ratio, r);
            line.max_ratio_doubled = std::max(line.max_ratio_doubled, r);
        };
        update(interp, ri);
        update(bilin, rb);
        update(embed, re);
        update(commut, rc);
    }

    InequalityReport rep;
    rep.lines = {interp, bilin, embed, commut};

    // single-mode achievability for the interpolation inequality
    {
        SpectralField F(grid, 1);
        // one Hermitian pair at |k| = 2 (inside the ladder for any valid grid)
        const int kx = grid.index_of_k(2);
        const int mx = grid.index_of_k(-2);
        F.at(0, ijk_to_site(grid, kx, 0, 0)) = cd(grid.volume(), 0.0);
        F.at(0, ijk_to_site(grid, mx, 0, 0)) = cd(grid.volume(), 0.0);
        rep.interpolation_single_mode_ratio = interpolation_ratio(F, ladder);
    }
    return rep;
}

} // namespace nsf
