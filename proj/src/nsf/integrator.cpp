#include "nsf/integrator.hpp"

#include "nsf/matexp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nsf {

namespace {

Mat3 j_symmetrize3(const Mat3& E)
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

EtdStepper::EtdStepper(const Grid& grid, const PhysicalParams& params, const ForceField& force,
                       const IntegratorOptions& opt)
    : grid_(grid), params_(params), force_(force), opt_(opt)
{
    if (!(opt_.dt > 0.0)) throw std::invalid_argument("EtdStepper: dt must be positive");
    if (opt_.dt_max_floor <= 0.0 && !force_.is_zero())
        opt_.dt_max_floor = 1e-4 * force_.spec().period;

    const int half = grid_.N / 2;
    const int max_k2 = 3 * half * half;
    by_k2_.resize(max_k2 + 1);
    std::vector<char> seen(max_k2 + 1, 0);
    k2_of_site_.resize(grid_.size());
    const double base = grid_.xi_min();
    const double dt = opt_.dt;

    // zero mode: A = 0
    by_k2_[0].E = Mat3::Identity();
    by_k2_[0].P1 = Mat3::Identity();
    by_k2_[0].P2 = 0.5 * Mat3::Identity();
    seen[0] = 1;

    for (std::size_t s = 0; s < grid_.size(); ++s) {
        int ix, iy, iz;
        site_to_ijk(grid_, s, ix, iy, iz);
        const int kx = grid_.k_of_index(ix), ky = grid_.k_of_index(iy),
                  kz = grid_.k_of_index(iz);
        const int k2 = kx * kx + ky * ky + kz * kz;
        k2_of_site_[s] = k2;
        if (seen[k2]) continue;
        seen[k2] = 1;

        const double r = base * std::sqrt(static_cast<double>(k2));
        const RadialEigen re = radial_eigen(r, params_);
        Blocks b;
        if (!re.degenerate) {
            b.E = Mat3::Zero();
            b.P1 = Mat3::Zero();
            b.P2 = Mat3::Zero();
            for (int n = 0; n < 3; ++n) {
                const cd z = dt * re.lambda[n];
                b.E += std::exp(z) * re.proj[n];
                b.P1 += phi1_scalar(z) * re.proj[n];
                b.P2 += phi2_scalar(z) * re.proj[n];
            }
        } else {
            MatC E, P1, P2;
            matrix_phis(MatC(dt * re.M), E, P1, P2);
            b.E = E;
            b.P1 = P1;
            b.P2 = P2;
        }
        b.E = j_symmetrize3(b.E);
        b.P1 = j_symmetrize3(b.P1);
        b.P2 = j_symmetrize3(b.P2);
        const cd zs(dt * re.shear, 0.0);
        b.esh = std::exp(dt * re.shear);
        b.p1sh = phi1_scalar(zs).real();
        b.p2sh = phi2_scalar(zs).real();
        by_k2_[k2] = b;
    }
}

void EtdStepper::apply_blocks(const SpectralField& in, SpectralField& out, Which which) const
{
    const Grid& g = grid_;
    for (std::size_t s = 0; s < g.size(); ++s) {
        const int k2 = k2_of_site_[s];
        const Blocks& b = by_k2_[k2];
        const Mat3& M = which == Which::Propagate ? b.E : (which == Which::Phi1 ? b.P1 : b.P2);
        const double sh = which == Which::Propagate ? b.esh
                                                    : (which == Which::Phi1 ? b.p1sh : b.p2sh);
        if (k2 == 0) {
            for (int c = 0; c < 5; ++c)
                out.at(c, s) = (which == Which::Phi2 ? 0.5 : 1.0) * in.at(c, s);
            continue;
        }
        int ix, iy, iz;
        site_to_ijk(g, s, ix, iy, iz);
        const double x0 = g.wavenumber(ix), x1 = g.wavenumber(iy), x2 = g.wavenumber(iz);
        const double r = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
        const double u0 = x0 / r, u1 = x1 / r, u2 = x2 / r;

        const cd m0 = in.at(1, s), m1 = in.at(2, s), m2 = in.at(3, s);
        const cd mL = u0 * m0 + u1 * m1 + u2 * m2;
        const bool nyq = g.k_of_index(ix) == g.N / 2 || g.k_of_index(iy) == g.N / 2 ||
                         g.k_of_index(iz) == g.N / 2;
        Eigen::Vector3cd w(in.at(0, s), mL, in.at(4, s));
        Eigen::Vector3cd wp = nyq ? Eigen::Vector3cd(M.real().cast<cd>() * w) : Eigen::Vector3cd(M * w);
        out.at(0, s) = wp(0);
        out.at(4, s) = wp(2);
        const cd mLp = wp(1);
        out.at(1, s) = mLp * u0 + sh * (m0 - mL * u0);
        out.at(2, s) = mLp * u1 + sh * (m1 - mL * u1);
        out.at(3, s) = mLp * u2 + sh * (m2 - mL * u2);
    }
}

SpectralField EtdStepper::source(const EnergyState& U, double t, double* max_v) const
{
    if (opt_.linear_only) {
        SpectralField N(grid_, 5);
        if (!force_.is_zero()) {
            SpectralField f = force_.eval_spectral(t);
            for (int c = 0; c < 3; ++c)
                for (std::size_t s = 0; s < grid_.size(); ++s)
                    N.at(1 + c, s) = params_.rho_inf * f.at(c, s);
        }
        if (max_v) *max_v = 0.0;
        return N;
    }
    PrimitiveState prim = recover_primitive(U, params_);
    NonlinearTerms terms =
        nonlinear_terms(prim, params_, force_.is_zero() ? nullptr : &force_, t);
    if (max_v) *max_v = terms.max_velocity;
    return std::move(terms.u_source);
}

EnergyState EtdStepper::step(const EnergyState& U, double t) const
{
    double vmax = 0.0;
    SpectralField N1 = source(U, t, &vmax);
    if (!opt_.linear_only && vmax > 0.0) {
        double dt_max = opt_.cfl_factor * grid_.dx() / vmax;
        if (opt_.dt_max_floor > 0.0) dt_max = std::max(dt_max, opt_.dt_max_floor);
        if (opt_.dt > dt_max) {
            std::ostringstream os;
            os << "etd_step: dt = " << opt_.dt << " exceeds advective bound " << dt_max;
            throw std::runtime_error(os.str());
        }
    }

    const double dt = opt_.dt;
    EnergyState Ua(grid_);
    {
        SpectralField EU(grid_, 5), P1N(grid_, 5);
        apply_blocks(U.U, EU, Which::Propagate);
        apply_blocks(N1, P1N, Which::Phi1);
        for (std::size_t i = 0; i < EU.data.size(); ++i)
            Ua.U.data[i] = EU.data[i] + dt * P1N.data[i];
    }

    SpectralField N2 = source(Ua, t + dt, nullptr);
    EnergyState out(grid_);
    {
        SpectralField diff(grid_, 5);
        for (std::size_t i = 0; i < diff.data.size(); ++i)
            diff.data[i] = N2.data[i] - N1.data[i];
        SpectralField P2D(grid_, 5);
        apply_blocks(diff, P2D, Which::Phi2);
        for (std::size_t i = 0; i < out.U.data.size(); ++i)
            out.U.data[i] = Ua.U.data[i] + dt * P2D.data[i];
    }
    return out;
}

Trajectory evolve(const EnergyState& U0, double t_end, int cadence, const EtdStepper& stepper,
                  const NormRecordSpec& record, const DyadicLadder* ladder,
                  bool store_states)
{
    if (t_end < 0.0) throw std::invalid_argument("evolve: t_end must be nonnegative");
    if (cadence < 1) throw std::invalid_argument("evolve: cadence must be >= 1");
    const double dt = stepper.options().dt;
    const long long n_steps = std::llround(t_end / dt);
    if (std::abs(n_steps * dt - t_end) > 1e-9 * std::max(1.0, t_end))
        throw std::invalid_argument("evolve: t_end must be an integer multiple of dt");

    Trajectory traj;
    for (double k : record.sobolev_k) traj.norm_names.push_back("H" + std::to_string(k));
    for (const BesovParams& bp : record.besov)
        traj.norm_names.push_back("B" + std::to_string(bp.s) + "_" + std::to_string(bp.r));

    auto record_state = [&](double t, const EnergyState& U) {
        traj.times.push_back(t);
        std::vector<double> row;
        for (double k : record.sobolev_k) row.push_back(sobolev_norm(U.U, k));
        if (ladder)
            for (const BesovParams& bp : record.besov)
                row.push_back(besov_norm(U.U, *ladder, bp).norm);
        traj.norms.push_back(std::move(row));
        if (store_states) traj.states.push_back(U);
    };

    EnergyState U = U0;
    record_state(0.0, U);
    for (long long i = 0; i < n_steps; ++i) {
        U = stepper.step(U, i * dt);
        if ((i + 1) % cadence == 0 || i + 1 == n_steps) record_state((i + 1) * dt, U);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// primitive-variable RK4 oracle
// ---------------------------------------------------------------------------

namespace {

struct PrimitiveRhs {
    PhysicalField drho, dv, dtheta;
};

PrimitiveRhs primitive_rhs(const PrimitiveState& st, double t, const ForceField& force,
                           const PhysicalParams& p)
{
    const Grid& g = st.rho.grid;
    const std::size_t n = g.size();

    SpectralField v_hat = forward_transform(st.v);
    dealias_inplace(v_hat);

    // velocity gradients dv_i/dx_j
    PhysicalField gradv[3][3];
    for (int j = 0; j < 3; ++j) {
        SpectralField dj = derivative(v_hat, j);
        PhysicalField all = inverse_transform_unchecked(dj);
        for (int i = 0; i < 3; ++i) {
            gradv[i][j] = PhysicalField(g, 1);
            for (std::size_t s = 0; s < n; ++s) gradv[i][j].at(0, s) = all.at(i, s);
        }
    }

    // Laplacian and grad div of v
    SpectralField lap_v(g, 3), graddiv_v(g, 3);
    for (std::size_t s = 0; s < n; ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        double xi[3];
        bool nyq = false;
        for (int d = 0; d < 3; ++d) {
            xi[d] = g.wavenumber(idx[d]);
            if (g.k_of_index(idx[d]) == g.N / 2) nyq = true;
        }
        if (nyq) continue;
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        const cd divv = cd(0.0, 1.0) * (xi[0] * v_hat.at(0, s) + xi[1] * v_hat.at(1, s) +
                                        xi[2] * v_hat.at(2, s));
        for (int d = 0; d < 3; ++d) {
            lap_v.at(d, s) = -r2 * v_hat.at(d, s);
            graddiv_v.at(d, s) = cd(0.0, xi[d]) * divv;
        }
    }
    PhysicalField lap_v_p = inverse_transform_unchecked(lap_v);
    PhysicalField graddiv_v_p = inverse_transform_unchecked(graddiv_v);

    // theta derivatives
    SpectralField th_hat = forward_transform(st.theta);
    dealias_inplace(th_hat);
    PhysicalField grad_th[3];
    for (int d = 0; d < 3; ++d)
        grad_th[d] = inverse_transform_unchecked(derivative(th_hat, d));
    SpectralField lap_th(g, 1);
    for (std::size_t s = 0; s < n; ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        const double x0 = g.wavenumber(idx[0]), x1 = g.wavenumber(idx[1]),
                     x2 = g.wavenumber(idx[2]);
        lap_th.at(0, s) = -(x0 * x0 + x1 * x1 + x2 * x2) * th_hat.at(0, s);
    }
    PhysicalField lap_th_p = inverse_transform_unchecked(lap_th);

    // pressure gradient
    PhysicalField pfield(g, 1);
    for (std::size_t s = 0; s < n; ++s)
        pfield.at(0, s) = p.pressure->value(st.rho.at(0, s), st.theta.at(0, s));
    SpectralField p_hat = forward_transform(pfield);
    dealias_inplace(p_hat);
    PhysicalField grad_p[3];
    for (int d = 0; d < 3; ++d)
        grad_p[d] = inverse_transform_unchecked(derivative(p_hat, d));

    // mass flux divergence (spectral)
    PhysicalField m(g, 3);
    for (std::size_t s = 0; s < n; ++s)
        for (int d = 0; d < 3; ++d) m.at(d, s) = st.rho.at(0, s) * st.v.at(d, s);
    SpectralField m_hat = forward_transform(m);
    dealias_inplace(m_hat);
    SpectralField div_m(g, 1);
    for (std::size_t s = 0; s < n; ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        bool nyq = false;
        for (int d = 0; d < 3; ++d)
            if (g.k_of_index(idx[d]) == g.N / 2) nyq = true;
        if (nyq) continue;
        div_m.at(0, s) = cd(0.0, 1.0) * (g.wavenumber(idx[0]) * m_hat.at(0, s) +
                                         g.wavenumber(idx[1]) * m_hat.at(1, s) +
                                         g.wavenumber(idx[2]) * m_hat.at(2, s));
    }
    PhysicalField div_m_p = inverse_transform_unchecked(div_m);

    const bool has_force = !force.is_zero();
    PhysicalField f = has_force ? force.eval(t) : PhysicalField(g, 3);

    PrimitiveRhs rhs{PhysicalField(g, 1), PhysicalField(g, 3), PhysicalField(g, 1)};
    for (std::size_t s = 0; s < n; ++s) {
        const double rho = st.rho.at(0, s);
        if (!(rho > 0.0)) throw std::runtime_error("oracle_step_primitive: vacuum state");
        const double theta = st.theta.at(0, s);
        const double inv_rho = 1.0 / rho;

        rhs.drho.at(0, s) = -div_m_p.at(0, s);

        double divv = 0.0;
        for (int d = 0; d < 3; ++d) divv += gradv[d][d].at(0, s);

        for (int i = 0; i < 3; ++i) {
            double adv = 0.0;
            for (int j = 0; j < 3; ++j) adv += st.v.at(j, s) * gradv[i][j].at(0, s);
            rhs.dv.at(i, s) = -adv +
                              inv_rho * (p.mu * lap_v_p.at(i, s) +
                                         (p.mu + p.mu_prime) * graddiv_v_p.at(i, s)) -
                              inv_rho * grad_p[i].at(0, s) + (has_force ? f.at(i, s) : 0.0);
        }

        double advt = 0.0;
        for (int j = 0; j < 3; ++j) advt += st.v.at(j, s) * grad_th[j].at(0, s);
        // dissipation from the velocity gradient tensor
        double sum2 = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double dij = 0.5 * (gradv[i][j].at(0, s) + gradv[j][i].at(0, s));
                sum2 += dij * dij;
            }
        const double psi = 2.0 * p.mu * sum2 + p.mu_prime * divv * divv;

        rhs.dtheta.at(0, s) =
            -advt - theta * p.pressure->dtheta(rho, theta) * divv / (p.c_v * rho) +
            p.kappa * lap_th_p.at(0, s) / (p.c_v * rho) + psi / (p.c_v * rho);
    }

    // band-limit the tendencies so the state stays dealiased
    SpectralField t1 = forward_transform(rhs.drho);
    dealias_inplace(t1);
    rhs.drho = inverse_transform_unchecked(t1);
    SpectralField t2 = forward_transform(rhs.dv);
    dealias_inplace(t2);
    rhs.dv = inverse_transform_unchecked(t2);
    SpectralField t3 = forward_transform(rhs.dtheta);
    dealias_inplace(t3);
    rhs.dtheta = inverse_transform_unchecked(t3);
    return rhs;
}

PrimitiveState axpy(const PrimitiveState& s, double a, const PrimitiveRhs& k)
{
    PrimitiveState out = s;
    for (std::size_t i = 0; i < out.rho.data.size(); ++i)
        out.rho.data[i] += a * k.drho.data[i];
    for (std::size_t i = 0; i < out.v.data.size(); ++i) out.v.data[i] += a * k.dv.data[i];
    for (std::size_t i = 0; i < out.theta.data.size(); ++i)
        out.theta.data[i] += a * k.dtheta.data[i];
    return out;
}

} // namespace

PrimitiveState oracle_step_primitive(const PrimitiveState& s, double t, double dt,
                                     const ForceField& force, const PhysicalParams& p)
{
    const PrimitiveRhs k1 = primitive_rhs(s, t, force, p);
    const PrimitiveRhs k2 = primitive_rhs(axpy(s, 0.5 * dt, k1), t + 0.5 * dt, force, p);
    const PrimitiveRhs k3 = primitive_rhs(axpy(s, 0.5 * dt, k2), t + 0.5 * dt, force, p);
    const PrimitiveRhs k4 = primitive_rhs(axpy(s, dt, k3), t + dt, force, p);

    PrimitiveState out = s;
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < out.rho.data.size(); ++i)
        out.rho.data[i] += w * (k1.drho.data[i] + 2.0 * k2.drho.data[i] +
                                2.0 * k3.drho.data[i] + k4.drho.data[i]);
    for (std::size_t i = 0; i < out.v.data.size(); ++i)
        out.v.data[i] +=
            w * (k1.dv.data[i] + 2.0 * k2.dv.data[i] + 2.0 * k3.dv.data[i] + k4.dv.data[i]);
    for (std::size_t i = 0; i < out.theta.data.size(); ++i)
        out.theta.data[i] += w * (k1.dtheta.data[i] + 2.0 * k2.dtheta.data[i] +
                                  2.0 * k3.dtheta.data[i] + k4.dtheta.data[i]);
    if (!all_finite(out.rho) || !all_finite(out.v) || !all_finite(out.theta))
        throw std::runtime_error("oracle_step_primitive: state diverged");
    return out;
}

// ---------------------------------------------------------------------------
// energy identity diagnostics
// ---------------------------------------------------------------------------

namespace {

// <grad^l a, grad^l b> = (1/V) sum |xi|^{2l} Re(a conj b), all components
double graded_inner(const SpectralField& a, const SpectralField& b, int ell)
{
    const Grid& g = a.grid;
    double sum = 0.0;
    for (std::size_t s = 1; s < g.size(); ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        const double x0 = g.wavenumber(idx[0]), x1 = g.wavenumber(idx[1]),
                     x2 = g.wavenumber(idx[2]);
        const double r2 = x0 * x0 + x1 * x1 + x2 * x2;
        if (r2 == 0.0) continue;
        double dot = 0.0;
        for (int c = 0; c < a.comps; ++c)
            dot += (a.at(c, s) * std::conj(b.at(c, s))).real();
        sum += std::pow(r2, ell) * dot;
    }
    return sum / g.volume();
}

struct SnapshotData {
    SpectralField sigma_hat; // 1
    SpectralField v_hat;     // 3
    SpectralField eta_hat;   // 1
    SpectralField divv_hat;  // 1
    SpectralField r1_hat;    // 3
    SpectralField r2_hat;    // 1
    SpectralField div_sigv_hat; // 1
};

SnapshotData analyze_snapshot(const EnergyState& U, double t, const PhysicalParams& p,
                              const ForceField* force)
{
    const Grid& g = U.U.grid;
    const std::size_t n = g.size();
    PrimitiveState st = recover_primitive(U, p);

    SnapshotData d;
    PhysicalField sig(g, 1), eta(g, 1);
    for (std::size_t s = 0; s < n; ++s) {
        sig.at(0, s) = st.rho.at(0, s) - p.rho_inf;
        eta.at(0, s) = st.theta.at(0, s) - p.theta_inf;
    }
    d.sigma_hat = forward_transform(sig);
    dealias_inplace(d.sigma_hat);
    d.v_hat = forward_transform(st.v);
    dealias_inplace(d.v_hat);
    d.eta_hat = forward_transform(eta);
    dealias_inplace(d.eta_hat);

    // grad v tensor, div v, A v, grad eta, lap eta, grad sigma
    PhysicalField gradv[3][3];
    for (int j = 0; j < 3; ++j) {
        PhysicalField all = inverse_transform_unchecked(derivative(d.v_hat, j));
        for (int i = 0; i < 3; ++i) {
            gradv[i][j] = PhysicalField(g, 1);
            for (std::size_t s = 0; s < n; ++s) gradv[i][j].at(0, s) = all.at(i, s);
        }
    }
    SpectralField av_hat(g, 3);
    d.divv_hat = SpectralField(g, 1);
    SpectralField lap_eta(g, 1);
    for (std::size_t s = 0; s < n; ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        double xi[3];
        bool nyq = false;
        for (int dd = 0; dd < 3; ++dd) {
            xi[dd] = g.wavenumber(idx[dd]);
            if (g.k_of_index(idx[dd]) == g.N / 2) nyq = true;
        }
        if (nyq) continue;
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        const cd divv = cd(0.0, 1.0) * (xi[0] * d.v_hat.at(0, s) + xi[1] * d.v_hat.at(1, s) +
                                        xi[2] * d.v_hat.at(2, s));
        d.divv_hat.at(0, s) = divv;
        lap_eta.at(0, s) = -r2 * d.eta_hat.at(0, s);
        for (int dd = 0; dd < 3; ++dd)
            av_hat.at(dd, s) =
                -p.mu * r2 * d.v_hat.at(dd, s) + (p.mu + p.mu_prime) * cd(0.0, xi[dd]) * divv;
    }
    PhysicalField av = inverse_transform_unchecked(av_hat);
    PhysicalField lap_eta_p = inverse_transform_unchecked(lap_eta);
    PhysicalField grad_sig[3], grad_eta[3];
    for (int dd = 0; dd < 3; ++dd) {
        grad_sig[dd] = inverse_transform_unchecked(derivative(d.sigma_hat, dd));
        grad_eta[dd] = inverse_transform_unchecked(derivative(d.eta_hat, dd));
    }

    // Q1 and its gradient
    PhysicalField q1(g, 1);
    const double pref = p.pressure->value(p.rho_inf, p.theta_inf);
    for (std::size_t s = 0; s < n; ++s)
        q1.at(0, s) = p.pressure->value(st.rho.at(0, s), st.theta.at(0, s)) - pref -
                      p.pc.p1 * sig.at(0, s) - p.pc.p2 * eta.at(0, s);
    SpectralField q1_hat = forward_transform(q1);
    dealias_inplace(q1_hat);
    PhysicalField grad_q1[3];
    for (int dd = 0; dd < 3; ++dd)
        grad_q1[dd] = inverse_transform_unchecked(derivative(q1_hat, dd));

    PhysicalField psi = dissipation(st.v, p);

    const bool has_force = force && !force->is_zero();
    PhysicalField f = has_force ? force->eval(t) : PhysicalField(g, 3);

    // R1 = -v.grad v + (1/rho - 1/rho_inf) A v
    //      - (1/rho - 1/rho_inf)(p1 grad sigma + p2 grad eta) - grad Q1 / rho + f
    PhysicalField r1(g, 3);
    // R2 = -c_V v.grad eta - (theta dP/dtheta / rho - theta_inf p2 / rho_inf) div v
    //      + kappa (1/rho - 1/rho_inf) lap eta + psi / rho
    PhysicalField r2(g, 1);
    PhysicalField divv_p = inverse_transform_unchecked(d.divv_hat);
    for (std::size_t s = 0; s < n; ++s) {
        const double rho = st.rho.at(0, s);
        const double idev = 1.0 / rho - 1.0 / p.rho_inf;
        for (int i = 0; i < 3; ++i) {
            double adv = 0.0;
            for (int j = 0; j < 3; ++j) adv += st.v.at(j, s) * gradv[i][j].at(0, s);
            r1.at(i, s) = -adv + idev * av.at(i, s) -
                          idev * (p.pc.p1 * grad_sig[i].at(0, s) + p.pc.p2 * grad_eta[i].at(0, s)) -
                          grad_q1[i].at(0, s) / rho + (has_force ? f.at(i, s) : 0.0);
        }
        double advt = 0.0;
        for (int j = 0; j < 3; ++j) advt += st.v.at(j, s) * grad_eta[j].at(0, s);
        const double theta = st.theta.at(0, s);
        r2.at(0, s) = -p.c_v * advt -
                      (theta * p.pressure->dtheta(rho, theta) / rho -
                       p.theta_inf * p.pc.p2 / p.rho_inf) *
                          divv_p.at(0, s) +
                      p.kappa * idev * lap_eta_p.at(0, s) + psi.at(0, s) / rho;
    }
    d.r1_hat = forward_transform(r1);
    dealias_inplace(d.r1_hat);
    d.r2_hat = forward_transform(r2);
    dealias_inplace(d.r2_hat);

    // div(sigma v)
    PhysicalField sigv(g, 3);
    for (std::size_t s = 0; s < n; ++s)
        for (int dd = 0; dd < 3; ++dd) sigv.at(dd, s) = sig.at(0, s) * st.v.at(dd, s);
    SpectralField sigv_hat = forward_transform(sigv);
    dealias_inplace(sigv_hat);
    d.div_sigv_hat = SpectralField(g, 1);
    for (std::size_t s = 0; s < n; ++s) {
        int idx[3];
        site_to_ijk(g, s, idx[0], idx[1], idx[2]);
        bool nyq = false;
        for (int dd = 0; dd < 3; ++dd)
            if (g.k_of_index(idx[dd]) == g.N / 2) nyq = true;
        if (nyq) continue;
        d.div_sigv_hat.at(0, s) =
            cd(0.0, 1.0) * (g.wavenumber(idx[0]) * sigv_hat.at(0, s) +
                            g.wavenumber(idx[1]) * sigv_hat.at(1, s) +
                            g.wavenumber(idx[2]) * sigv_hat.at(2, s));
    }
    return d;
}

double weighted_energy(const SnapshotData& d, int ell, const PhysicalParams& p)
{
    const double w_sig = p.pc.p1 / (p.rho_inf * p.rho_inf);
    const double w_eta = p.c_v / p.theta_inf;
    return 0.5 * (w_sig * graded_inner(d.sigma_hat, d.sigma_hat, ell) +
                  graded_inner(d.v_hat, d.v_hat, ell) +
                  w_eta * graded_inner(d.eta_hat, d.eta_hat, ell));
}

} // namespace

std::vector<std::pair<double, double>>
energy_identity_residual(const Trajectory& traj, int ell, const PhysicalParams& p,
                         const ForceField* force)
{
    if (ell < 1 || ell > 4)
        throw std::invalid_argument("energy_identity_residual: ell must be in 1..4");
    if (traj.states.size() < 3)
        throw std::runtime_error("energy_identity_residual: need >= 3 stored snapshots "
                                 "(cadence too coarse)");
    const std::size_t m = traj.states.size();
    for (std::size_t i = 2; i < m; ++i) {
        const double h0 = traj.times[i - 1] - traj.times[i - 2];
        const double h1 = traj.times[i] - traj.times[i - 1];
        if (std::abs(h1 - h0) > 1e-9 * std::max(h0, h1))
            throw std::runtime_error("energy_identity_residual: nonuniform snapshot spacing");
    }
    const double h = traj.times[1] - traj.times[0];

    std::vector<double> energies(m);
    std::vector<SnapshotData> data(m);
    for (std::size_t i = 0; i < m; ++i) {
        data[i] = analyze_snapshot(traj.states[i], traj.times[i], p, force);
        energies[i] = weighted_energy(data[i], ell, p);
    }

    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const SnapshotData& d = data[i];
        const double ddt = (energies[i + 1] - energies[i - 1]) / (2.0 * h);
        const double dissip =
            (p.mu / p.rho_inf) * graded_inner(d.v_hat, d.v_hat, ell + 1) +
            ((p.mu + p.mu_prime) / p.rho_inf) * graded_inner(d.divv_hat, d.divv_hat, ell) +
            (p.kappa / (p.rho_inf * p.theta_inf)) * graded_inner(d.eta_hat, d.eta_hat, ell + 1);
        const double rhs =
            -(p.pc.p1 / (p.rho_inf * p.rho_inf)) *
                graded_inner(d.div_sigv_hat, d.sigma_hat, ell) +
            graded_inner(d.r1_hat, d.v_hat, ell) +
            (1.0 / p.theta_inf) * graded_inner(d.r2_hat, d.eta_hat, ell);
        out.emplace_back(traj.times[i], std::abs(ddt + dissip - rhs));
    }
    return out;
}

} // namespace nsf
