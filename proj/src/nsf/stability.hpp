// Decay-rate experiments around the periodic solution: perturbation
// generators targeting an L^p-embedded Besov class, co-evolution of base and
// perturbed trajectories, and log-log decay fits with a curvature flag that
// rejects exponential (box-tail) segments.
#pragma once

#include "nsf/dyadic.hpp"
#include "nsf/integrator.hpp"
#include "nsf/model.hpp"

#include <vector>

namespace nsf {

// s/2 + (3/2)(1/p - 1/2); throws outside 1 <= p <= 2 or when the exponent is
// nonpositive.
double predicted_exponent(double s, double p);

// Random-phase 5-component perturbation whose dyadic block norms follow
// 2^{-j s0_eff} with s0_eff = -3(1/p - 1/2) (the Besov class L^p embeds
// into).  Normalized so the B^{s0_eff}_{2,inf} norm equals `amplitude`;
// deterministic per seed.
EnergyState make_perturbation(const Grid& grid, const DyadicLadder& ladder, double p_target,
                              double amplitude, std::uint64_t seed);

struct FitResult {
    double exponent = 0.0; // slope of log(norm) vs log(1+t)
    double stderr_ = 0.0;
    double curvature = 0.0; // quadratic coefficient of the same fit
    bool curved = false;    // |curvature| beyond threshold: not a power law
    bool skipped = false;   // no usable data (e.g. zero series)
};

// OLS fit of log(values) against log(1+t) restricted to the window.
// Throws when fewer than 10 window samples or nonpositive values inside the
// window.  The curvature flag trips when the quadratic coefficient exceeds
// 0.1 in magnitude.
FitResult fit_decay_exponent(const std::vector<double>& times,
                             const std::vector<double>& values, double t_lo, double t_hi);

struct DecayExperiment {
    double p_target = 2.0;
    double amplitude = 1e-4;
    std::uint64_t seed = 1;
    std::vector<double> s_list = {1.0};
    double window_lo = 5.0;
    double window_hi = 0.0; // 0 => min(0.5 (L/2pi)^2, 200)
    int cadence = 1;
    bool linear_only = false;
};

struct DecayResult {
    struct PerS {
        double s = 0.0;
        FitResult fit;
        double predicted = 0.0;
    };
    std::vector<double> times;
    std::vector<std::vector<double>> norms; // norms[i][j]: time i, s_list[j]
    std::vector<PerS> fits;
    bool zero_perturbation = false;
};

// Co-evolves base and base+perturbation with identical steppers and fits the
// difference decay per requested Sobolev index.  In linear-only mode the
// difference solves the linear system, so it is sampled directly through the
// semigroup.  Throws "left stability regime" when the difference doubles.
DecayResult decay_experiment(const EtdStepper& stepper, const DyadicLadder& ladder,
                             const EnergyState& base, const EnergyState& perturbation,
                             const DecayExperiment& exp);

} // namespace nsf
