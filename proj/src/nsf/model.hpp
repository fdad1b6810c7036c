// Physical model around the constant state (rho_inf, 0, theta_inf):
// the modified energy functional, the (sigma, m, E) <-> (rho, v, theta)
// maps, the nonlinear right-hand sides of the transformed system in scaled
// variables U = (sqrt(p1) sigma, m, sqrt(c_V/theta_inf) E), the dissipation
// function, and time-periodic forcing.
//
// The transformed system and the exact nonlinear terms are derived in
// docs/transformed-system.md; the u-consistency test in the acceptance suite
// certifies them against the primitive equations.
#pragma once

#include "nsf/grid.hpp"
#include "nsf/params.hpp"

#include <optional>

namespace nsf {

// (rho, v, theta) sampled on the grid; rho, theta pointwise positive.
struct PrimitiveState {
    PhysicalField rho;   // 1 component
    PhysicalField v;     // 3 components
    PhysicalField theta; // 1 component
};

// Spectral coefficients of U = (sqrt(p1) sigma, m, sqrt(c_V/theta_inf) E).
struct EnergyState {
    SpectralField U; // 5 components

    EnergyState() = default;
    explicit EnergyState(const Grid& g) : U(g, 5) {}
};

// Equilibrium primitive state on a grid.
PrimitiveState equilibrium_state(const Grid& g, const PhysicalParams& p);

// Modified energy density, pointwise:
//   E = w_kinetic m.v + c_V rho eta + w_density sigma^2.
PhysicalField energy_functional(const PrimitiveState& s, const PhysicalParams& p);

// Primitive -> U.  Pointwise products then transform; optionally dealiased.
EnergyState to_energy_state(const PrimitiveState& s, const PhysicalParams& p,
                            bool apply_dealias = false);

// U -> primitive.  Throws "vacuum state" when rho = rho_inf + sigma <= 0
// anywhere.  Exact pointwise inverse of to_energy_state (eta solves the
// energy relation, which is linear in eta).
PrimitiveState recover_primitive(const EnergyState& U, const PhysicalParams& p);

// Dissipation function Psi = 2 mu |D(v)|^2 + mu' (div v)^2 with D the
// symmetric velocity gradient (spectral derivatives).
PhysicalField dissipation(const PhysicalField& v, const PhysicalParams& p);

// Time-periodic external force: a sum of separable terms
//   eps * [a cos(2 pi h t/T) + b sin(2 pi h t/T)] * cos(k.x) e_component.
struct ForceSpec {
    struct Term {
        int k[3] = {0, 0, 0}; // integer lattice wavevector
        int component = 0;    // velocity component 0..2
        int harmonic = 1;     // temporal harmonic index
        double a = 0.0;       // cos coefficient
        double b = 0.0;       // sin coefficient
    };
    double period = 1.0;
    double eps = 0.0;
    std::vector<Term> terms;

    bool is_zero() const { return eps == 0.0 || terms.empty(); }
};

// Precomputed realization of a ForceSpec on a grid.
class ForceField {
public:
    ForceField() = default;
    ForceField(const Grid& g, const ForceSpec& spec);

    // eps * sum_m w_m(t) * profile_m, physical space; exactly T-periodic
    // (time is reduced with fmod, so t and t+T give identical bits).
    PhysicalField eval(double t) const;
    // same in spectral space (band-limited by construction)
    SpectralField eval_spectral(double t) const;

    const ForceSpec& spec() const { return spec_; }
    const Grid& grid() const { return grid_; }
    bool is_zero() const { return spec_.is_zero(); }

    // spectral spatial profile of term i (3 components, unit waveform)
    const SpectralField& term_profile(std::size_t i) const { return profiles_spec_[i]; }

private:
    Grid grid_;
    ForceSpec spec_;
    std::vector<PhysicalField> profiles_phys_;
    std::vector<SpectralField> profiles_spec_;
    std::vector<double> waveform(double t) const;
};

// Nonlinear right-hand sides of the transformed system, spectral and
// dealiased.  momentum ("G") and energy_div ("H1") are exact divergence /
// potential forms (zero mean); energy_src ("H2") collects the higher-order
// source terms.  u_source is the assembled 5-component Duhamel inhomogeneity
//   (0, G + rho f, sqrt(c_V/theta_inf) (H1 + H2 + fw * f.m))
// with fw = 1 + theta_inf q2/p2; it includes the force when one is passed.
struct NonlinearTerms {
    SpectralField momentum;   // 3 components
    SpectralField energy_div; // 1 component
    SpectralField energy_src; // 1 component
    SpectralField u_source;   // 5 components
    double max_velocity = 0.0;
};

NonlinearTerms nonlinear_terms(const PrimitiveState& s, const PhysicalParams& p,
                               const ForceField* force = nullptr, double t = 0.0);

} // namespace nsf
