#include "nsf/params.hpp"

#include <cmath>
#include <stdexcept>

namespace nsf {

double PressureLaw::dtheta(double rho, double theta) const
{
    const double h = 1e-6 * (std::abs(theta) + 1.0);
    return (value(rho, theta + h) - value(rho, theta - h)) / (2.0 * h);
}

double TablePressureLaw::value(double rho, double theta) const
{
    double p = 0.0;
    for (const Term& t : terms) p += t.c * std::pow(rho, t.i) * std::pow(theta, t.j);
    return p;
}

double TablePressureLaw::dtheta(double rho, double theta) const
{
    double p = 0.0;
    for (const Term& t : terms) {
        if (t.j == 0) continue;
        p += t.c * t.j * std::pow(rho, t.i) * std::pow(theta, t.j - 1);
    }
    return p;
}

namespace {

// Richardson-extrapolated central difference, one variable at a time.
double central1(const std::function<double(double)>& f, double x, double h)
{
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

double central2(const std::function<double(double)>& f, double x, double h)
{
    const double d1 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    const double d2 = (f(x + h / 2) - 2.0 * f(x) + f(x - h / 2)) / (h * h / 4.0);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace

PressureConstants pressure_constants(const PressureLaw& law, double rho_inf, double theta_inf)
{
    PressureConstants pc;
    if (!law.analytic_derivatives(rho_inf, theta_inf, pc.p1, pc.p2, pc.q1, pc.q2)) {
        const double hr = 1e-5 * rho_inf;
        const double ht = 1e-5 * theta_inf;
        // second-derivative stencils need a larger step: round-off in the
        // second difference scales like eps/h^2
        const double hr2 = 1e-4 * rho_inf;
        const double ht2 = 1e-4 * theta_inf;
        auto frho = [&](double r) { return law.value(r, theta_inf); };
        auto ftheta = [&](double t) { return law.value(rho_inf, t); };
        pc.p1 = central1(frho, rho_inf, hr);
        pc.p2 = central1(ftheta, theta_inf, ht);
        pc.q1 = central2(frho, rho_inf, hr2);
        auto p2_of_rho = [&](double r) {
            auto g = [&](double t) { return law.value(r, t); };
            return central1(g, theta_inf, ht2);
        };
        pc.q2 = central1(p2_of_rho, rho_inf, hr2);
    }
    if (!(pc.p1 > 0.0) || !(pc.p2 > 0.0))
        throw std::runtime_error("pressure_constants: stability conditions violated "
                                 "(need dP/drho > 0 and dP/dtheta > 0 at the reference)");
    return pc;
}

PhysicalParams make_params(double mu, double mu_prime, double kappa, double c_v,
                           double rho_inf, double theta_inf,
                           std::shared_ptr<const PressureLaw> pressure)
{
    if (!(mu > 0.0) || !(2.0 * mu / 3.0 + mu_prime >= 0.0))
        throw std::runtime_error("make_params: thermodynamic restrictions violated "
                                 "(need mu > 0 and 2mu/3 + mu' >= 0)");
    if (!(kappa > 0.0) || !(c_v > 0.0))
        throw std::runtime_error("make_params: kappa and c_v must be positive");
    if (!(rho_inf > 0.0) || !(theta_inf > 0.0))
        throw std::runtime_error("make_params: reference state must be positive");
    if (!pressure) throw std::runtime_error("make_params: pressure law required");

    PhysicalParams p;
    p.mu = mu;
    p.mu_prime = mu_prime;
    p.kappa = kappa;
    p.c_v = c_v;
    p.rho_inf = rho_inf;
    p.theta_inf = theta_inf;
    p.pressure = std::move(pressure);
    p.pc = pressure_constants(*p.pressure, rho_inf, theta_inf);
    return p;
}

PhysicalParams default_params()
{
    return make_params(1.0, 0.0, 1.0, 1.5, 1.0, 1.0, std::make_shared<IdealGasLaw>(1.0));
}

} // namespace nsf
