// Time integration of the transformed system by ETDRK2 with the exact
// per-mode propagator, an independent primitive-variable RK4 oracle, and
// energy-identity diagnostics.
//
// ETDRK2 (one step, N the nonlinear + force source):
//   Ua   = e^{dt A} U  +  dt phi1(dt A) N(U, t)
//   U'   = Ua          +  dt phi2(dt A) [N(Ua, t+dt) - N(U, t)]
// With N = 0 this is the exact semigroup for any dt.  The propagator and
// phi matrices are cached per distinct |k|^2 (longitudinal 3x3 blocks plus
// shear scalars), so a step costs one pass over the lattice plus the
// nonlinear transforms.
#pragma once

#include "nsf/dyadic.hpp"
#include "nsf/grid.hpp"
#include "nsf/linear_ops.hpp"
#include "nsf/model.hpp"
#include "nsf/params.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nsf {

struct IntegratorOptions {
    double dt = 1e-2;
    bool linear_only = false;   // drop all nonlinear terms; keep rho_inf * f
    double cfl_factor = 0.25;   // dt_max = cfl_factor * dx / max|v|
    double dt_max_floor = 0.0;  // floor on dt_max (default 1e-4 * force period)
};

class EtdStepper {
public:
    EtdStepper(const Grid& grid, const PhysicalParams& params, const ForceField& force,
               const IntegratorOptions& opt);

    // One ETDRK2 step from local time t.  Throws on vacuum during recovery
    // and on violation of the advective dt bound.
    EnergyState step(const EnergyState& U, double t) const;

    // the Duhamel source (0, G + rho f, sqrt(c_V/theta_inf)(H + fw f.m)),
    // or the linearized force vector in linear-only mode
    SpectralField source(const EnergyState& U, double t, double* max_v = nullptr) const;

    const Grid& grid() const { return grid_; }
    const PhysicalParams& params() const { return params_; }
    const IntegratorOptions& options() const { return opt_; }
    const ForceField& force() const { return force_; }

private:
    Grid grid_;
    PhysicalParams params_;
    ForceField force_;
    IntegratorOptions opt_;

    struct Blocks {
        Mat3 E, P1, P2;
        double esh = 1.0, p1sh = 1.0, p2sh = 0.5;
    };
    std::vector<Blocks> by_k2_;
    std::vector<int> k2_of_site_;

    enum class Which { Propagate, Phi1, Phi2 };
    void apply_blocks(const SpectralField& in, SpectralField& out, Which which) const;
};

// Besov/Sobolev indices recorded along a trajectory.
struct NormRecordSpec {
    std::vector<double> sobolev_k = {1.0};
    std::vector<BesovParams> besov;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<EnergyState> states; // empty unless store_states
    std::vector<std::vector<double>> norms;
    std::vector<std::string> norm_names;
};

// Repeated etd_step with records every `cadence` steps (plus t = 0 and the
// final time).  t_end must be an integer multiple of dt (within rounding).
Trajectory evolve(const EnergyState& U0, double t_end, int cadence, const EtdStepper& stepper,
                  const NormRecordSpec& record, const DyadicLadder* ladder,
                  bool store_states);

// Classical RK4 pseudo-spectral step of the primitive system (test oracle).
PrimitiveState oracle_step_primitive(const PrimitiveState& s, double t, double dt,
                                     const ForceField& force, const PhysicalParams& p);

// Energy identity per derivative order ell (1..4): evaluates
//   d/dt 1/2 [ (p1/rho^2) |grad^l sigma|^2 + |grad^l v|^2 + (c_V/th) |grad^l eta|^2 ]
//   + (mu/rho) |grad^{l+1} v|^2 + ((mu+mu')/rho) |grad^l div v|^2
//   + (kappa/(rho th)) |grad^{l+1} eta|^2
//   - [ -(p1/rho^2) <grad^l div(sigma v), grad^l sigma> + <grad^l R1, grad^l v>
//       + (1/th) <grad^l R2, grad^l eta> ]
// along a stored trajectory (centered differencing in time) and returns
// |LHS - RHS| per interior snapshot.  Requires uniformly spaced snapshots.
std::vector<std::pair<double, double>>
energy_identity_residual(const Trajectory& traj, int ell, const PhysicalParams& p,
                         const ForceField* force = nullptr);

} // namespace nsf
