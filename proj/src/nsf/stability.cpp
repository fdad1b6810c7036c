#include "nsf/stability.hpp"

#include "nsf/linear_ops.hpp"
#include "nsf/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nsf {

double predicted_exponent(double s, double p)
{
    if (!(p >= 1.0 && p <= 2.0))
        throw std::invalid_argument("predicted_exponent: p must lie in [1, 2]");
    const double e = 0.5 * s + 1.5 * (1.0 / p - 0.5);
    if (!(e > 0.0))
        throw std::invalid_argument("predicted_exponent: outside theorem's range "
                                    "(nonpositive exponent)");
    return e;
}

EnergyState make_perturbation(const Grid& grid, const DyadicLadder& ladder, double p_target,
                              double amplitude, std::uint64_t seed)
{
    if (!(p_target >= 1.0 && p_target <= 2.0))
        throw std::invalid_argument("make_perturbation: p must lie in [1, 2]");
    EnergyState out(grid);
    if (amplitude == 0.0) return out;

    const double s0_eff = -3.0 * (1.0 / p_target - 0.5);
    RandomFieldSpec spec;
    spec.comps = 5;
    // |coef| ~ r^{-s0-3/2} makes the block norms follow 2^{-j s0}
    spec.slope = s0_eff + 1.5;
    spec.amplitude = 1.0;
    out.U = random_spectral_field(grid, spec, seed);

    BesovParams bp;
    bp.s = s0_eff;
    bp.r = std::numeric_limits<double>::infinity();
    const double norm = besov_norm(out.U, ladder, bp).norm;
    if (norm == 0.0) throw std::runtime_error("make_perturbation: degenerate field");
    const double scale = amplitude / norm;
    for (cd& z : out.U.data) z *= scale;
    return out;
}

FitResult fit_decay_exponent(const std::vector<double>& times,
                             const std::vector<double>& values, double t_lo, double t_hi)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0))
            throw std::runtime_error("fit_decay_exponent: nonpositive value in window");
        x.push_back(std::log1p(times[i]));
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 10)
        throw std::runtime_error("fit_decay_exponent: need >= 10 samples in window");

    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    FitResult fit;
    const double denom = n * sxx - sx * sx;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - intercept - fit.exponent * x[i];
        ss_res += r * r;
    }
    if (n > 2.0) fit.stderr_ = std::sqrt(ss_res / (n - 2.0) / (sxx - sx * sx / n));

    // quadratic fit y = q0 + q1 x + q2 x^2; q2 vanishes for power laws and
    // flags exponential (box-tail) segments
    {
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            s1 += xi;
            s2 += xi * xi;
            s3 += xi * xi * xi;
            s4 += xi * xi * xi * xi;
            t0 += y[i];
            t1 += xi * y[i];
            t2 += xi * xi * y[i];
        }
        Eigen::Matrix3d Mq;
        Mq << n, s1, s2, s1, s2, s3, s2, s3, s4;
        Eigen::Vector3d rhs(t0, t1, t2);
        Eigen::Vector3d q = Mq.fullPivLu().solve(rhs);
        fit.curvature = q(2);
    }
    fit.curved = std::abs(fit.curvature) > 0.1;
    return fit;
}

DecayResult decay_experiment(const EtdStepper& stepper, const DyadicLadder& ladder,
                             const EnergyState& base, const EnergyState& perturbation,
                             const DecayExperiment& exp)
{
    const Grid& grid = stepper.grid();
    DecayResult res;

    double pert_norm = 0.0;
    for (const cd& z : perturbation.U.data) pert_norm += std::norm(z);
    if (pert_norm == 0.0) {
        res.zero_perturbation = true;
        return res;
    }

    const double box_guard = 0.5 * std::pow(grid.L / (2.0 * 3.14159265358979323846), 2.0);
    const double t_hi = exp.window_hi > 0.0 ? exp.window_hi : std::min(box_guard, 200.0);
    if (t_hi > box_guard + 1e-9)
        throw std::invalid_argument("decay_experiment: window exceeds the box-effect guard");

    const double dt = stepper.options().dt;
    const long long n_steps = std::llround(t_hi / dt);

    auto record_norm = [&](const SpectralField& diff) {
        std::vector<double> row;
        row.reserve(exp.s_list.size());
        for (double s : exp.s_list) row.push_back(sobolev_norm(diff, s));
        return row;
    };

    std::vector<double> initial;
    if (exp.linear_only) {
        // difference dynamics is exactly linear: sample the semigroup
        SemigroupCache cache(grid, stepper.params());
        const int samples = 60;
        for (int i = 0; i <= samples; ++i) {
            const double t = t_hi * i / samples;
            EnergyState diff = cache.apply(perturbation, t);
            res.times.push_back(t);
            res.norms.push_back(record_norm(diff.U));
        }
        initial = res.norms.front();
    } else {
        EnergyState a = base;
        EnergyState b = base;
        for (std::size_t i = 0; i < b.U.data.size(); ++i)
            b.U.data[i] += perturbation.U.data[i];

        SpectralField diff0 = b.U;
        for (std::size_t i = 0; i < diff0.data.size(); ++i) diff0.data[i] -= a.U.data[i];
        res.times.push_back(0.0);
        res.norms.push_back(record_norm(diff0));
        initial = res.norms.front();

        for (long long i = 0; i < n_steps; ++i) {
            const double t = i * dt;
            a = stepper.step(a, t);
            b = stepper.step(b, t);
            if ((i + 1) % exp.cadence == 0 || i + 1 == n_steps) {
                SpectralField diff = b.U;
                for (std::size_t j = 0; j < diff.data.size(); ++j)
                    diff.data[j] -= a.U.data[j];
                res.times.push_back((i + 1) * dt);
                std::vector<double> row = record_norm(diff);
                for (std::size_t j = 0; j < row.size(); ++j)
                    if (row[j] > 2.0 * initial[j])
                        throw std::runtime_error("decay_experiment: left stability regime");
                res.norms.push_back(std::move(row));
            }
        }
    }

    for (std::size_t j = 0; j < exp.s_list.size(); ++j) {
        std::vector<double> series;
        series.reserve(res.times.size());
        for (const std::vector<double>& row : res.norms) series.push_back(row[j]);
        DecayResult::PerS per;
        per.s = exp.s_list[j];
        per.fit = fit_decay_exponent(res.times, series, exp.window_lo, t_hi);
        per.predicted = 0.0;
        try {
            per.predicted = predicted_exponent(exp.s_list[j], exp.p_target);
        } catch (const std::invalid_argument&) {
            per.predicted = std::numeric_limits<double>::quiet_NaN();
        }
        res.fits.push_back(per);
    }
    return res;
}

} // namespace nsf
