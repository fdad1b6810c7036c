// Fluid constants, pressure laws and the reference-state derivatives
// (p1, p2, q1, q2) they induce.  Construction validates the thermodynamic
// restrictions (mu > 0, 2mu/3 + mu' >= 0, kappa, c_V > 0) and the stability
// conditions (p1 > 0, p2 > 0).
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nsf {

struct PressureLaw {
    virtual ~PressureLaw() = default;
    virtual double value(double rho, double theta) const = 0;
    // dP/dtheta at an arbitrary state (pointwise use in the nonlinear terms).
    virtual double dtheta(double rho, double theta) const;
    // Analytic reference derivatives if the law provides them; returns false
    // to request the finite-difference path.
    virtual bool analytic_derivatives(double /*rho*/, double /*theta*/, double& /*p1*/,
                                      double& /*p2*/, double& /*q1*/, double& /*q2*/) const
    {
        return false;
    }
    virtual std::string describe() const = 0;
};

// Ideal gas P = R rho theta.
struct IdealGasLaw final : PressureLaw {
    double R = 1.0;
    explicit IdealGasLaw(double R_) : R(R_) {}
    double value(double rho, double theta) const override { return R * rho * theta; }
    double dtheta(double rho, double /*theta*/) const override { return R * rho; }
    bool analytic_derivatives(double rho, double theta, double& p1, double& p2, double& q1,
                              double& q2) const override
    {
        p1 = R * theta;
        p2 = R * rho;
        q1 = 0.0;
        q2 = R;
        return true;
    }
    std::string describe() const override { return "ideal"; }
};

// User law given as a coefficient table of a bivariate polynomial
// P(rho, theta) = sum c * rho^i * theta^j.  Derivatives go through the
// finite-difference path, exercising the generic machinery.
struct TablePressureLaw final : PressureLaw {
    struct Term {
        int i = 0, j = 0;
        double c = 0.0;
    };
    std::vector<Term> terms;
    double value(double rho, double theta) const override;
    double dtheta(double rho, double theta) const override;
    std::string describe() const override { return "table"; }
};

struct PressureConstants {
    double p1 = 0.0; // d P / d rho
    double p2 = 0.0; // d P / d theta
    double q1 = 0.0; // d^2 P / d rho^2
    double q2 = 0.0; // d^2 P / (d rho d theta)
};

// Evaluates (p1, p2, q1, q2) at the reference state, analytically when the
// law offers it, otherwise by Richardson-extrapolated central differences
// with step h = 1e-5 * reference.  Throws when the stability conditions
// p1 > 0, p2 > 0 fail.
PressureConstants pressure_constants(const PressureLaw& law, double rho_inf, double theta_inf);

struct PhysicalParams {
    double mu = 1.0;
    double mu_prime = 0.0;
    double kappa = 1.0;
    double c_v = 1.5;
    double rho_inf = 1.0;
    double theta_inf = 1.0;
    std::shared_ptr<const PressureLaw> pressure;
    PressureConstants pc;

    // modified-energy weights:
    //   energy = w_kinetic * (m.v) + c_v * rho * eta + w_density * sigma^2
    double w_kinetic() const { return 0.5 * (1.0 + theta_inf * pc.q2 / pc.p2); }
    double w_density() const
    {
        return (pc.p1 / (2.0 * rho_inf)) *
               (1.0 + theta_inf * (pc.q2 / pc.p2 - pc.q1 / pc.p1));
    }
    // factor on the energy-equation force term, 1 + theta_inf q2/p2
    double force_energy_weight() const { return 2.0 * w_kinetic(); }
};

// Validates restrictions, computes derived constants.  Throws on violation.
PhysicalParams make_params(double mu, double mu_prime, double kappa, double c_v,
                           double rho_inf, double theta_inf,
                           std::shared_ptr<const PressureLaw> pressure);

// The configuration used throughout the test and experiment defaults:
// ideal gas R = 1, rho_inf = theta_inf = 1, mu = 1, mu' = 0, kappa = 1,
// c_V = 3/2 (gives p1 = p2 = 1 and O(1) spectra).
PhysicalParams default_params();

} // namespace nsf
