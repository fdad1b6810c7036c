#include "nsf/model.hpp"

#include <cmath>
#include <stdexcept>

namespace nsf {

namespace {

constexpr double two_pi = 2.0 * 3.14159265358979323846;

// dealiased forward transform of a single pointwise component
SpectralField fwd_d(const PhysicalField& f)
{
    SpectralField F = forward_transform(f);
    dealias_inplace(F);
    return F;
}

PhysicalField component(const PhysicalField& f, int c)
{
    PhysicalField g(f.grid, 1);
    const std::size_t n = f.grid.size();
    for (std::size_t s = 0; s < n; ++s) g.at(0, s) = f.at(c, s);
    return g;
}

// i xi . z for a 3-component spectral field (divergence)
void add_divergence(SpectralField& out, int out_c, const SpectralField& z, double factor)
{
    const Grid& g = out.grid;
    for (std::size_t s = 0; s < g.size(); ++s) {
        int ix, iy, iz;
        site_to_ijk(g, s, ix, iy, iz);
        if (g.k_of_index(ix) == g.N / 2 || g.k_of_index(iy) == g.N / 2 ||
            g.k_of_index(iz) == g.N / 2)
            continue;
        const cd div = cd(0.0, 1.0) * (g.wavenumber(ix) * z.at(0, s) +
                                       g.wavenumber(iy) * z.at(1, s) +
                                       g.wavenumber(iz) * z.at(2, s));
        out.at(out_c, s) += factor * div;
    }
}

// out_i += factor * i xi_i * q (gradient of a scalar)
void add_gradient(SpectralField& out, int base_c, const SpectralField& q, double factor)
{
    const Grid& g = out.grid;
    for (std::size_t s = 0; s < g.size(); ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        const cd qv = q.at(0, s);
        if (qv == cd(0.0, 0.0)) continue;
        for (int d = 0; d < 3; ++d) {
            if (g.k_of_index(idx[d]) == g.N / 2) continue;
            out.at(base_c + d, s) += factor * cd(0.0, g.wavenumber(idx[d])) * qv;
        }
    }
}

// out_i += A z = mu Lap z + (mu + mu') grad div z, spectral
void add_viscous_operator(SpectralField& out, int base_c, const SpectralField& z,
                          const PhysicalParams& p)
{
    const Grid& g = out.grid;
    const double mu = p.mu, muc = p.mu + p.mu_prime;
    for (std::size_t s = 0; s < g.size(); ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        double xi[3];
        bool nyq = false;
        for (int d = 0; d < 3; ++d) {
            if (g.k_of_index(idx[d]) == g.N / 2) nyq = true;
            xi[d] = g.wavenumber(idx[d]);
        }
        if (nyq) continue;
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        const cd xdotz = xi[0] * z.at(0, s) + xi[1] * z.at(1, s) + xi[2] * z.at(2, s);
        for (int d = 0; d < 3; ++d)
            out.at(base_c + d, s) += -mu * r2 * z.at(d, s) - muc * xi[d] * xdotz;
    }
}

} // namespace

PrimitiveState equilibrium_state(const Grid& g, const PhysicalParams& p)
{
    PrimitiveState s{PhysicalField(g, 1), PhysicalField(g, 3), PhysicalField(g, 1)};
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.rho.at(0, i) = p.rho_inf;
        s.theta.at(0, i) = p.theta_inf;
    }
    return s;
}

PhysicalField energy_functional(const PrimitiveState& s, const PhysicalParams& p)
{
    const Grid& g = s.rho.grid;
    PhysicalField e(g, 1);
    const double wk = p.w_kinetic();
    const double wd = p.w_density();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rho = s.rho.at(0, i);
        const double sigma = rho - p.rho_inf;
        const double eta = s.theta.at(0, i) - p.theta_inf;
        const double v0 = s.v.at(0, i), v1 = s.v.at(1, i), v2 = s.v.at(2, i);
        const double mv = rho * (v0 * v0 + v1 * v1 + v2 * v2);
        e.at(0, i) = wk * mv + p.c_v * rho * eta + wd * sigma * sigma;
    }
    return e;
}

EnergyState to_energy_state(const PrimitiveState& s, const PhysicalParams& p,
                            bool apply_dealias)
{
    const Grid& g = s.rho.grid;
    PhysicalField fields(g, 5);
    PhysicalField e = energy_functional(s, p);
    const double sp1 = std::sqrt(p.pc.p1);
    const double se = std::sqrt(p.c_v / p.theta_inf);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rho = s.rho.at(0, i);
        fields.at(0, i) = sp1 * (rho - p.rho_inf);
        fields.at(1, i) = rho * s.v.at(0, i);
        fields.at(2, i) = rho * s.v.at(1, i);
        fields.at(3, i) = rho * s.v.at(2, i);
        fields.at(4, i) = se * e.at(0, i);
    }
    EnergyState out;
    out.U = forward_transform(fields);
    if (apply_dealias) dealias_inplace(out.U);
    return out;
}

PrimitiveState recover_primitive(const EnergyState& U, const PhysicalParams& p)
{
    const Grid& g = U.U.grid;
    PhysicalField phys = inverse_transform_unchecked(U.U);
    PrimitiveState s{PhysicalField(g, 1), PhysicalField(g, 3), PhysicalField(g, 1)};
    const double isp1 = 1.0 / std::sqrt(p.pc.p1);
    const double ise = std::sqrt(p.theta_inf / p.c_v);
    const double wk = p.w_kinetic();
    const double wd = p.w_density();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double sigma = isp1 * phys.at(0, i);
        const double rho = p.rho_inf + sigma;
        if (!(rho > 0.0)) throw std::runtime_error("recover_primitive: vacuum state");
        const double m0 = phys.at(1, i), m1 = phys.at(2, i), m2 = phys.at(3, i);
        const double energy = ise * phys.at(4, i);
        const double v0 = m0 / rho, v1 = m1 / rho, v2 = m2 / rho;
        const double mv = m0 * v0 + m1 * v1 + m2 * v2;
        const double eta = (energy - wk * mv - wd * sigma * sigma) / (p.c_v * rho);
        const double theta = p.theta_inf + eta;
        if (!(theta > 0.0))
            throw std::runtime_error("recover_primitive: nonpositive temperature");
        s.rho.at(0, i) = rho;
        s.v.at(0, i) = v0;
        s.v.at(1, i) = v1;
        s.v.at(2, i) = v2;
        s.theta.at(0, i) = theta;
    }
    return s;
}

PhysicalField dissipation(const PhysicalField& v, const PhysicalParams& p)
{
    const Grid& g = v.grid;
    SpectralField vh = fwd_d(v);
    // symmetric gradient components D_ij, i <= j
    PhysicalField D[6];
    int pair = 0;
    int pi[6], pj[6];
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            SpectralField d(g, 1);
            for (std::size_t s = 0; s < g.size(); ++s) {
                int idx[3];
                site_to_ijk(g, s, idx[0], idx[1], idx[2]);
                cd val(0.0, 0.0);
                if (g.k_of_index(idx[i]) != g.N / 2)
                    val += cd(0.0, 0.5 * g.wavenumber(idx[i])) * vh.at(j, s);
                if (g.k_of_index(idx[j]) != g.N / 2)
                    val += cd(0.0, 0.5 * g.wavenumber(idx[j])) * vh.at(i, s);
                d.at(0, s) = val;
            }
            D[pair] = inverse_transform_unchecked(d);
            pi[pair] = i;
            pj[pair] = j;
            ++pair;
        }
    PhysicalField psi(g, 1);
    for (std::size_t s = 0; s < g.size(); ++s) {
        double sum2 = 0.0, divv = 0.0;
        for (int q = 0; q < 6; ++q) {
            const double d = D[q].at(0, s);
            sum2 += (pi[q] == pj[q] ? 1.0 : 2.0) * d * d;
            if (pi[q] == pj[q]) divv += d;
        }
        psi.at(0, s) = 2.0 * p.mu * sum2 + p.mu_prime * divv * divv;
    }
    return psi;
}

ForceField::ForceField(const Grid& g, const ForceSpec& spec) : grid_(g), spec_(spec)
{
    for (const ForceSpec::Term& t : spec_.terms) {
        SpectralField prof(g, 3);
        // cos(k.x) in the chosen component: V/2 at +-k
        const int kx = g.index_of_k(t.k[0]);
        const int ky = g.index_of_k(t.k[1]);
        const int kz = g.index_of_k(t.k[2]);
        const int mx = g.index_of_k(-t.k[0]);
        const int my = g.index_of_k(-t.k[1]);
        const int mz = g.index_of_k(-t.k[2]);
        const double half_vol = 0.5 * g.volume();
        prof.at(t.component, ijk_to_site(g, kx, ky, kz)) += cd(half_vol, 0.0);
        prof.at(t.component, ijk_to_site(g, mx, my, mz)) += cd(half_vol, 0.0);
        if (hermitian_defect(prof) > 1e-12)
            throw std::runtime_error("ForceField: profile not Hermitian");
        profiles_spec_.push_back(prof);
        profiles_phys_.push_back(inverse_transform_unchecked(prof));
    }
}

std::vector<double> ForceField::waveform(double t) const
{
    // reduce time first so t and t+T produce bit-identical phases
    const double tau = std::fmod(t, spec_.period);
    std::vector<double> w(spec_.terms.size());
    for (std::size_t i = 0; i < spec_.terms.size(); ++i) {
        const ForceSpec::Term& term = spec_.terms[i];
        const double phase = two_pi * term.harmonic * (tau / spec_.period);
        w[i] = spec_.eps * (term.a * std::cos(phase) + term.b * std::sin(phase));
    }
    return w;
}

PhysicalField ForceField::eval(double t) const
{
    PhysicalField f(grid_, 3);
    if (is_zero()) return f;
    const std::vector<double> w = waveform(t);
    for (std::size_t i = 0; i < profiles_phys_.size(); ++i) {
        if (w[i] == 0.0) continue;
        const PhysicalField& prof = profiles_phys_[i];
        for (std::size_t s = 0; s < f.data.size(); ++s) f.data[s] += w[i] * prof.data[s];
    }
    return f;
}

SpectralField ForceField::eval_spectral(double t) const
{
    SpectralField f(grid_, 3);
    if (is_zero()) return f;
    const std::vector<double> w = waveform(t);
    for (std::size_t i = 0; i < profiles_spec_.size(); ++i) {
        if (w[i] == 0.0) continue;
        const SpectralField& prof = profiles_spec_[i];
        for (std::size_t s = 0; s < f.data.size(); ++s) f.data[s] += w[i] * prof.data[s];
    }
    return f;
}

NonlinearTerms nonlinear_terms(const PrimitiveState& st, const PhysicalParams& p,
                               const ForceField* force, double t)
{
    const Grid& g = st.rho.grid;
    const std::size_t n = g.size();
    const double a = p.force_energy_weight(); // 1 + theta_inf q2/p2
    const double b2 = 2.0 * p.w_density();    // (p1/rho_inf)(1 + theta_inf(q2/p2 - q1/p1))
    const double p1 = p.pc.p1, p2 = p.pc.p2;
    const double pref = p.pressure->value(p.rho_inf, p.theta_inf);

    // pointwise fields
    PhysicalField sigma(g, 1), eta(g, 1), inv_dev_m(g, 3), m(g, 3);
    PhysicalField q1f(g, 1), q2f(g, 1), rfield(g, 1);
    PhysicalField mv(g, 1);
    double vmax2 = 0.0;
    {
        const double wk = p.w_kinetic();
        const double wd = p.w_density();
        for (std::size_t s = 0; s < n; ++s) {
            const double rho = st.rho.at(0, s);
            if (!(rho > 0.0)) throw std::runtime_error("nonlinear_terms: vacuum state");
            const double sig = rho - p.rho_inf;
            const double et = st.theta.at(0, s) - p.theta_inf;
            const double v0 = st.v.at(0, s), v1 = st.v.at(1, s), v2 = st.v.at(2, s);
            const double vv = v0 * v0 + v1 * v1 + v2 * v2;
            vmax2 = std::max(vmax2, vv);
            sigma.at(0, s) = sig;
            eta.at(0, s) = et;
            m.at(0, s) = rho * v0;
            m.at(1, s) = rho * v1;
            m.at(2, s) = rho * v2;
            const double idev = 1.0 / rho - 1.0 / p.rho_inf;
            inv_dev_m.at(0, s) = idev * m.at(0, s);
            inv_dev_m.at(1, s) = idev * m.at(1, s);
            inv_dev_m.at(2, s) = idev * m.at(2, s);
            const double theta = st.theta.at(0, s);
            const double pval = p.pressure->value(rho, theta);
            q1f.at(0, s) = pval - pref - p1 * sig - p2 * et;
            q2f.at(0, s) = theta * p.pressure->dtheta(rho, theta) - p.theta_inf * p2 -
                           p.theta_inf * p.pc.q1 * sig - (p2 + p.theta_inf * p.pc.q2) * et;
            const double energy =
                wk * rho * vv + p.c_v * rho * et + wd * sig * sig;
            rfield.at(0, s) = et - energy / (p.c_v * p.rho_inf);
            mv.at(0, s) = rho * vv; // m.v
        }
    }

    NonlinearTerms out;
    out.max_velocity = std::sqrt(vmax2);
    out.momentum = SpectralField(g, 3);
    out.energy_div = SpectralField(g, 1);
    out.energy_src = SpectralField(g, 1);

    // ---- momentum nonlinearity ----
    // -div(m (x) m / rho): m_i m_j / rho = rho v_i v_j
    {
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                PhysicalField w(g, 1);
                for (std::size_t s = 0; s < n; ++s)
                    w.at(0, s) = st.rho.at(0, s) * st.v.at(i, s) * st.v.at(j, s);
                SpectralField wh = fwd_d(w);
                // G_i -= i xi_j w, G_j -= i xi_i w
                for (std::size_t s = 0; s < n; ++s) {
                    int idx[3];
                    site_to_ijk(g, s, idx[0], idx[1], idx[2]);
                    const cd wv = wh.at(0, s);
                    if (wv == cd(0.0, 0.0)) continue;
                    if (g.k_of_index(idx[j]) != g.N / 2)
                        out.momentum.at(i, s) -= cd(0.0, g.wavenumber(idx[j])) * wv;
                    if (i != j && g.k_of_index(idx[i]) != g.N / 2)
                        out.momentum.at(j, s) -= cd(0.0, g.wavenumber(idx[i])) * wv;
                }
            }
    }

    SpectralField r_hat = fwd_d(rfield);
    SpectralField q1_hat = fwd_d(q1f);
    add_gradient(out.momentum, 0, r_hat, -p2); // -p2 grad R
    add_gradient(out.momentum, 0, q1_hat, -1.0); // -grad Q1

    SpectralField z_hat(g, 3);
    for (int c = 0; c < 3; ++c) {
        SpectralField zc = fwd_d(component(inv_dev_m, c));
        for (std::size_t s = 0; s < n; ++s) z_hat.at(c, s) = zc.at(0, s);
    }
    add_viscous_operator(out.momentum, 0, z_hat, p); // + A((1/rho - 1/rho_inf) m)

    // ---- energy equation, divergence/potential part ----
    for (int c = 0; c < 3; ++c) {
        PhysicalField w(g, 1);
        for (std::size_t s = 0; s < n; ++s) w.at(0, s) = eta.at(0, s) * m.at(c, s);
        SpectralField wh = fwd_d(w);
        SpectralField tmp(g, 3);
        for (std::size_t s = 0; s < n; ++s) tmp.at(c, s) = wh.at(0, s);
        add_divergence(out.energy_div, 0, tmp, -p.c_v); // -c_V div(eta m) (one comp at a time)
    }

    SpectralField sigv_hat(g, 3), etav_hat(g, 3);
    for (int c = 0; c < 3; ++c) {
        PhysicalField w1(g, 1), w2(g, 1);
        for (std::size_t s = 0; s < n; ++s) {
            w1.at(0, s) = sigma.at(0, s) * st.v.at(c, s);
            w2.at(0, s) = eta.at(0, s) * st.v.at(c, s);
        }
        SpectralField h1 = fwd_d(w1), h2 = fwd_d(w2);
        for (std::size_t s = 0; s < n; ++s) {
            sigv_hat.at(c, s) = h1.at(0, s);
            etav_hat.at(c, s) = h2.at(0, s);
        }
    }
    add_divergence(out.energy_div, 0, sigv_hat, -a * p1);
    add_divergence(out.energy_div, 0, etav_hat, -a * p2);

    {
        SpectralField smvv(g, 3);
        for (int c = 0; c < 3; ++c) {
            PhysicalField w(g, 1);
            for (std::size_t s = 0; s < n; ++s) w.at(0, s) = mv.at(0, s) * st.v.at(c, s);
            SpectralField wh = fwd_d(w);
            for (std::size_t s = 0; s < n; ++s) smvv.at(c, s) = wh.at(0, s);
        }
        add_divergence(out.energy_div, 0, smvv, -0.5 * a); // -(a/2) div((m.v) v)
    }

    // + kappa Lap R  and  - theta_inf p2 div((1/rho - 1/rho_inf) m)
    {
        for (std::size_t s = 0; s < n; ++s) {
            int idx[3];
            site_to_ijk(g, s, idx[0], idx[1], idx[2]);
            const double x0 = g.wavenumber(idx[0]), x1 = g.wavenumber(idx[1]),
                         x2 = g.wavenumber(idx[2]);
            const double r2 = x0 * x0 + x1 * x1 + x2 * x2;
            out.energy_div.at(0, s) -= p.kappa * r2 * r_hat.at(0, s);
        }
        add_divergence(out.energy_div, 0, z_hat, -p.theta_inf * p2);
    }

    // ---- energy equation, higher-order sources ----
    SpectralField v_hat = fwd_d(st.v);
    PhysicalField grad_q1 = inverse_transform_unchecked(
        [&] {
            SpectralField gq(g, 3);
            add_gradient(gq, 0, q1_hat, 1.0);
            return gq;
        }());
    PhysicalField div_sigv = inverse_transform_unchecked(
        [&] {
            SpectralField d(g, 1);
            add_divergence(d, 0, sigv_hat, 1.0);
            return d;
        }());
    PhysicalField av_phys = inverse_transform_unchecked(
        [&] {
            SpectralField av(g, 3);
            add_viscous_operator(av, 0, v_hat, p);
            return av;
        }());
    PhysicalField div_v = inverse_transform_unchecked(
        [&] {
            SpectralField d(g, 1);
            add_divergence(d, 0, v_hat, 1.0);
            return d;
        }());
    PhysicalField psi = dissipation(st.v, p);

    PhysicalField h2(g, 1);
    for (std::size_t s = 0; s < n; ++s) {
        const double vdotgq = st.v.at(0, s) * grad_q1.at(0, s) +
                              st.v.at(1, s) * grad_q1.at(1, s) +
                              st.v.at(2, s) * grad_q1.at(2, s);
        const double avv = av_phys.at(0, s) * st.v.at(0, s) +
                           av_phys.at(1, s) * st.v.at(1, s) +
                           av_phys.at(2, s) * st.v.at(2, s);
        h2.at(0, s) = -a * vdotgq - q2f.at(0, s) * div_v.at(0, s) -
                      b2 * sigma.at(0, s) * div_sigv.at(0, s) + a * avv + psi.at(0, s);
    }
    out.energy_src = fwd_d(h2);

    // ---- assembled Duhamel inhomogeneity in U variables ----
    out.u_source = SpectralField(g, 5);
    const double se = std::sqrt(p.c_v / p.theta_inf);
    for (std::size_t s = 0; s < n; ++s) {
        for (int c = 0; c < 3; ++c) out.u_source.at(1 + c, s) = out.momentum.at(c, s);
        out.u_source.at(4, s) = se * (out.energy_div.at(0, s) + out.energy_src.at(0, s));
    }
    if (force && !force->is_zero()) {
        SpectralField f_hat = force->eval_spectral(t);
        PhysicalField f_phys = force->eval(t);
        // rho f = rho_inf f + sigma f
        PhysicalField fm(g, 1);
        for (int c = 0; c < 3; ++c) {
            PhysicalField sf(g, 1);
            for (std::size_t s = 0; s < n; ++s) sf.at(0, s) = sigma.at(0, s) * f_phys.at(c, s);
            SpectralField sfh = fwd_d(sf);
            for (std::size_t s = 0; s < n; ++s)
                out.u_source.at(1 + c, s) += p.rho_inf * f_hat.at(c, s) + sfh.at(0, s);
        }
        for (std::size_t s = 0; s < n; ++s)
            fm.at(0, s) = f_phys.at(0, s) * m.at(0, s) + f_phys.at(1, s) * m.at(1, s) +
                          f_phys.at(2, s) * m.at(2, s);
        SpectralField fmh = fwd_d(fm);
        for (std::size_t s = 0; s < n; ++s)
            out.u_source.at(4, s) += se * a * fmh.at(0, s);
    }
    return out;
}

} // namespace nsf
