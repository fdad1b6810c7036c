// Construction of the time-periodic solution: evolve from zero data under
// the periodic force, sample at period multiples, detect the Cauchy limit of
// the period map, and validate periodicity.  A closed-form resolvent solution
// of the linearized problem serves as the oracle.
//
// The acceptance norm throughout is max(Besov(s=1, r=inf), Sobolev(k=4)) of
// the 5-component U state, the intersection norm used by the convergence
// analysis.
#pragma once

#include "nsf/dyadic.hpp"
#include "nsf/integrator.hpp"
#include "nsf/model.hpp"

#include <optional>
#include <vector>

namespace nsf {

struct PeriodicSolution {
    EnergyState initial_point;      // U_T(0), the fixed point of the period map
    double residual = 0.0;          // acceptance norm of Phi_T(U) - U
    int n_periods = 0;              // periods iterated
    std::vector<double> decrements; // d_n = ||U(nT) - U((n-1)T)||
    std::vector<EnergyState> samples; // U(nT), n = 0..n_periods (optional)
    Trajectory period_trajectory;   // one period from the fixed point
};

// acceptance norm ||.||_{B^1_{2,inf} /\ H^4}
double acceptance_norm(const SpectralField& U, const DyadicLadder& ladder);

// Closed-form linear periodic solution per mode:
//   U_T0(xi) = sum_k c_k (i k w I - A(xi))^{-1} F_k(xi),  w = 2 pi / T,
// the resolvent form of (I - e^{TA})^{-1} int_0^T e^{(T-tau)A} F(tau) dtau.
// Throws when a resolvent is ill-conditioned (> 1e12), naming the mode.
PeriodicSolution linear_periodic_solution(const Grid& grid, const ForceField& force,
                                          const PhysicalParams& p,
                                          const DyadicLadder& ladder);

struct PoincareOptions {
    double tol = 1e-6;
    int max_periods = 50;
    double delta_cap = 1.0;     // guard on the acceptance norm of the state
    bool keep_samples = true;
    int trajectory_cadence = 1; // cadence for the final one-period trajectory
};

// Fixed-point iteration of the period map from zero data (or a caller
// initial guess).  Stops when the decrement falls below tol; throws when the
// decrements fail to contract over 5 consecutive periods or the state leaves
// the delta cap.
PeriodicSolution poincare_iterate(const EtdStepper& stepper, const DyadicLadder& ladder,
                                  const PoincareOptions& opt,
                                  const EnergyState* initial_guess = nullptr);

struct CauchyReport {
    double c_fit = 0.0;        // smallest admissible C in
                               // d(n,m) <= C (1 + min(m, n-m) T)^{-1/4} delta
    double exponent_fit = 0.0; // OLS exponent of log d vs log(1 + min(m,n-m) T)
    double delta_est = 0.0;    // max recorded acceptance norm
    bool degenerate = false;   // all differences zero
};

// Two-index Cauchy check over all recorded samples U(nT).
CauchyReport cauchy_rate_report(const std::vector<EnergyState>& samples, double T,
                                const DyadicLadder& ladder);

} // namespace nsf
