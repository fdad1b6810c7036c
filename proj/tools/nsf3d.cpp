// nsf3d: pseudo-spectral toolkit for the compressible Navier-Stokes-Fourier
// system on a periodic box.  Subcommands: spectrum, evolve, find-periodic,
// stability, besov, check-inequalities.  One config file drives everything;
// outputs are CSV, JSON and raw-f64 snapshots, byte-reproducible for a fixed
// config and seed.

#include "nsf/config.hpp"
#include "nsf/dyadic.hpp"
#include "nsf/inequalities.hpp"
#include "nsf/integrator.hpp"
#include "nsf/linear_ops.hpp"
#include "nsf/periodic.hpp"
#include "nsf/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using nlohmann::json;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0; // 0 = take from config
    int threads = 1;
};

nsf::RunConfig load(const GlobalArgs& g)
{
    if (g.config_path.empty()) throw std::runtime_error("--config is required");
    nsf::RunConfig cfg = nsf::load_config(g.config_path);
    if (g.seed != 0) cfg.seed = g.seed;
    std::filesystem::create_directories(g.out_dir);
    return cfg;
}

std::string outfile(const GlobalArgs& g, const std::string& name)
{
    return (std::filesystem::path(g.out_dir) / name).string();
}

void write_json(const json& j, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

int run_spectrum(const GlobalArgs& g)
{
    nsf::RunConfig cfg = load(g);
    const auto radii = nsf::log_spaced(cfg.spectrum.radius_min, cfg.spectrum.radius_max,
                                       cfg.spectrum.radius_count);
    nsf::ScanResult scan = nsf::spectral_bounds_scan(cfg.params, radii);

    std::vector<std::string> cols = {"xi"};
    for (int n = 1; n <= 4; ++n) cols.push_back("re_lambda" + std::to_string(n));
    for (int n = 1; n <= 4; ++n) cols.push_back("im_lambda" + std::to_string(n));
    for (int n = 1; n <= 4; ++n) cols.push_back("ratio" + std::to_string(n));
    std::vector<std::vector<double>> rows;
    for (const nsf::ScanRow& r : scan.rows) {
        std::vector<double> row = {r.r};
        for (double v : r.re) row.push_back(v);
        for (double v : r.im) row.push_back(v);
        for (double v : r.ratio) row.push_back(v);
        rows.push_back(std::move(row));
    }
    nsf::emit_timeseries(cols, rows, outfile(g, "spectrum.csv"));
    write_json(json{{"r0", scan.bounds.r0},
                    {"beta", scan.bounds.beta},
                    {"c_low", scan.bounds.c_low},
                    {"c_high", scan.bounds.c_high}},
               outfile(g, "spectrum.json"));
    std::cout << "r0 = " << scan.bounds.r0 << ", beta = " << scan.bounds.beta
              << ", c_low = " << scan.bounds.c_low << ", c_high = " << scan.bounds.c_high
              << "\n";
    return 0;
}

int run_evolve(const GlobalArgs& g, double t_end_override, double dt_override, int cadence,
               bool linear_only, const std::string& record_spec, bool snapshots)
{
    nsf::RunConfig cfg = load(g);
    if (t_end_override > 0.0) cfg.t_end = t_end_override;
    if (dt_override > 0.0) cfg.integrator.dt = dt_override;
    if (cadence > 0) cfg.cadence = cadence;
    if (linear_only) cfg.integrator.linear_only = true;

    nsf::NormRecordSpec rec;
    rec.sobolev_k.clear();
    if (record_spec.empty()) {
        rec.sobolev_k = {1.0};
    } else {
        // comma list like "s=1,s=4,b=0.5:inf"
        std::stringstream ss(record_spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.rfind("s=", 0) == 0) {
                rec.sobolev_k.push_back(std::stod(item.substr(2)));
            } else if (item.rfind("b=", 0) == 0) {
                const std::string rest = item.substr(2);
                const auto colon = rest.find(':');
                nsf::BesovParams bp;
                bp.s = std::stod(rest.substr(0, colon));
                bp.r = (colon == std::string::npos || rest.substr(colon + 1) == "inf")
                           ? std::numeric_limits<double>::infinity()
                           : std::stod(rest.substr(colon + 1));
                rec.besov.push_back(bp);
            } else {
                throw std::runtime_error("--record: bad item '" + item + "'");
            }
        }
    }

    nsf::DyadicLadder ladder = nsf::build_ladder(cfg.grid);
    nsf::ForceField force(cfg.grid, cfg.force);
    nsf::EtdStepper stepper(cfg.grid, cfg.params, force, cfg.integrator);
    nsf::EnergyState U0(cfg.grid);
    nsf::Trajectory traj =
        nsf::evolve(U0, cfg.t_end, cfg.cadence, stepper, rec, &ladder, snapshots);

    std::vector<std::string> cols = {"t"};
    for (const std::string& n : traj.norm_names) cols.push_back(n);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<double> row = {traj.times[i]};
        for (double v : traj.norms[i]) row.push_back(v);
        rows.push_back(std::move(row));
    }
    nsf::emit_timeseries(cols, rows, outfile(g, "evolve.csv"));
    if (snapshots && !traj.states.empty()) {
        nsf::PhysicalField last = nsf::inverse_transform_unchecked(traj.states.back().U);
        nsf::save_snapshot(last, traj.times.back(), outfile(g, "final_state.f64"));
    }
    std::cout << "evolved to t = " << cfg.t_end << ", " << traj.times.size()
              << " records -> evolve.csv\n";
    return 0;
}

int run_find_periodic(const GlobalArgs& g, double tol, int max_periods, bool linear_only)
{
    nsf::RunConfig cfg = load(g);
    if (tol > 0.0) cfg.periodic.tol = tol;
    if (max_periods > 0) cfg.periodic.max_periods = max_periods;
    if (linear_only) cfg.integrator.linear_only = true;

    nsf::DyadicLadder ladder = nsf::build_ladder(cfg.grid);
    nsf::ForceField force(cfg.grid, cfg.force);
    nsf::EtdStepper stepper(cfg.grid, cfg.params, force, cfg.integrator);

    nsf::PoincareOptions opt;
    opt.tol = cfg.periodic.tol;
    opt.max_periods = cfg.periodic.max_periods;
    opt.delta_cap = cfg.periodic.delta_cap;
    nsf::PeriodicSolution sol = nsf::poincare_iterate(stepper, ladder, opt);

    json j = {{"residual", sol.residual}, {"n_periods", sol.n_periods}};
    if (sol.samples.size() >= 10) {
        nsf::CauchyReport rep =
            nsf::cauchy_rate_report(sol.samples, force.spec().period, ladder);
        j["C_fit"] = rep.c_fit;
        j["exponent_fit"] = rep.exponent_fit;
        j["delta_est"] = rep.delta_est;
    }
    write_json(j, outfile(g, "periodic.json"));

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sol.decrements.size(); ++i)
        rows.push_back({static_cast<double>(i + 1), sol.decrements[i]});
    nsf::emit_timeseries({"n", "decrement"}, rows, outfile(g, "periodic_history.csv"));

    nsf::PhysicalField u0 = nsf::inverse_transform_unchecked(sol.initial_point.U);
    nsf::save_snapshot(u0, 0.0, outfile(g, "periodic_state.f64"));
    std::cout << "periodic residual = " << sol.residual << " after " << sol.n_periods
              << " periods\n";
    return sol.residual < cfg.periodic.tol * 10.0 ? 0 : 1;
}

int run_stability(const GlobalArgs& g, double p_override, double amplitude,
                  const std::string& s_list, const std::string& window, bool linear_only)
{
    nsf::RunConfig cfg = load(g);
    if (p_override > 0.0) cfg.stability.p = p_override;
    if (amplitude > 0.0) cfg.stability.amplitude = amplitude;
    if (!s_list.empty()) {
        cfg.stability.s_list.clear();
        std::stringstream ss(s_list);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.stability.s_list.push_back(std::stod(item));
    }
    if (!window.empty()) {
        const auto colon = window.find(':');
        if (colon == std::string::npos) throw std::runtime_error("--window: need lo:hi");
        cfg.stability.window_lo = std::stod(window.substr(0, colon));
        cfg.stability.window_hi = std::stod(window.substr(colon + 1));
    }
    if (linear_only) cfg.integrator.linear_only = true;

    nsf::DyadicLadder ladder = nsf::build_ladder(cfg.grid);
    nsf::ForceField force(cfg.grid, cfg.force);
    nsf::EtdStepper stepper(cfg.grid, cfg.params, force, cfg.integrator);

    nsf::EnergyState base(cfg.grid);
    if (!cfg.integrator.linear_only && !force.is_zero()) {
        nsf::PoincareOptions popt;
        popt.tol = cfg.periodic.tol;
        popt.max_periods = cfg.periodic.max_periods;
        popt.delta_cap = cfg.periodic.delta_cap;
        popt.keep_samples = false;
        base = nsf::poincare_iterate(stepper, ladder, popt).initial_point;
    }

    nsf::DecayExperiment exp;
    exp.p_target = cfg.stability.p;
    exp.amplitude = cfg.stability.amplitude;
    exp.seed = cfg.seed;
    exp.s_list = cfg.stability.s_list;
    exp.window_lo = cfg.stability.window_lo;
    exp.window_hi = cfg.stability.window_hi;
    exp.linear_only = cfg.integrator.linear_only;
    exp.cadence = cfg.cadence;

    nsf::EnergyState pert =
        nsf::make_perturbation(cfg.grid, ladder, exp.p_target, exp.amplitude, cfg.seed);
    nsf::DecayResult res = nsf::decay_experiment(stepper, ladder, base, pert, exp);

    std::vector<std::string> cols = {"t"};
    for (double s : exp.s_list) cols.push_back("H" + std::to_string(s));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        std::vector<double> row = {res.times[i]};
        for (double v : res.norms[i]) row.push_back(v);
        rows.push_back(std::move(row));
    }
    nsf::emit_timeseries(cols, rows, outfile(g, "stability.csv"));

    json verdicts = json::array();
    bool all_pass = true;
    for (const auto& per : res.fits) {
        const double fitted = -per.fit.exponent;
        const bool pass = std::isfinite(per.predicted) &&
                          std::abs(fitted - per.predicted) <= 0.2 * per.predicted &&
                          !per.fit.curved;
        all_pass = all_pass && pass;
        verdicts.push_back({{"s", per.s},
                            {"fitted", fitted},
                            {"predicted", per.predicted},
                            {"stderr", per.fit.stderr_},
                            {"curvature", per.fit.curvature},
                            {"pass", pass}});
        std::cout << "s = " << per.s << ": fitted " << fitted << ", predicted "
                  << per.predicted << (pass ? " [pass]" : " [fail]") << "\n";
    }
    write_json(verdicts, outfile(g, "stability.json"));
    return all_pass ? 0 : 1;
}

int run_besov(const GlobalArgs& g, const std::string& input, double s, const std::string& r,
              const std::string& ladder_range)
{
    nsf::RunConfig cfg = load(g);
    nsf::Snapshot snap = nsf::load_snapshot(input);
    nsf::DyadicLadder ladder = nsf::build_ladder(snap.field.grid);
    if (!ladder_range.empty()) {
        const auto colon = ladder_range.find(':');
        if (colon == std::string::npos) throw std::runtime_error("--ladder-range: need lo:hi");
        const int lo = std::stoi(ladder_range.substr(0, colon));
        const int hi = std::stoi(ladder_range.substr(colon + 1));
        if (lo < ladder.j_min || hi > ladder.j_max || lo > hi)
            throw std::runtime_error("--ladder-range outside the grid's ladder");
        nsf::DyadicLadder trimmed;
        trimmed.grid = ladder.grid;
        trimmed.j_min = lo;
        trimmed.j_max = hi;
        trimmed.weights.assign(ladder.weights.begin() + (lo - ladder.j_min),
                               ladder.weights.begin() + (hi - ladder.j_min + 1));
        ladder = std::move(trimmed);
    }

    nsf::BesovParams bp;
    bp.s = s;
    bp.r = (r == "inf") ? std::numeric_limits<double>::infinity() : std::stod(r);

    nsf::SpectralField F = nsf::forward_transform(snap.field);
    nsf::BesovResult res = nsf::besov_norm(F, ladder, bp);
    json j = {{"norm", res.norm},
              {"j_min", res.j_min},
              {"j_max", res.j_max},
              {"per_block", res.per_block},
              {"nonzero_mean", res.nonzero_mean},
              {"outside_band", res.outside_band}};
    std::cout << j.dump(2) << "\n";
    (void)cfg;
    return 0;
}

int run_check_inequalities(const GlobalArgs& g)
{
    nsf::RunConfig cfg = load(g);
    nsf::DyadicLadder ladder = nsf::build_ladder(cfg.grid);
    nsf::CorpusSpec corpus;
    corpus.n_fields = cfg.inequalities.fields;
    corpus.slope = cfg.inequalities.slope;
    corpus.seed = cfg.seed;
    nsf::InequalityReport rep = nsf::check_inequalities(cfg.grid, ladder, corpus);

    json lines = json::array();
    bool stable = true;
    for (const nsf::InequalityLine& line : rep.lines) {
        const bool ok = std::isfinite(line.max_ratio_doubled) && line.growth() < 0.10;
        stable = stable && ok;
        lines.push_back({{"name", line.name},
                         {"max_ratio", line.max_ratio},
                         {"max_ratio_doubled", line.max_ratio_doubled},
                         {"growth", line.growth()},
                         {"stable", ok}});
        std::cout << line.name << ": max ratio " << line.max_ratio << " -> "
                  << line.max_ratio_doubled << " (growth " << 100.0 * line.growth()
                  << "%)\n";
    }
    write_json(json{{"lines", lines},
                    {"interpolation_single_mode_ratio",
                     rep.interpolation_single_mode_ratio}},
               outfile(g, "inequalities.json"));
    return stable ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pseudo-spectral compressible Navier-Stokes-Fourier toolkit"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "path to the JSON run configuration");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "override the config seed");
    app.add_option("--threads", g.threads, "worker threads for co-evolving trajectories");

    auto* spectrum = app.add_subcommand("spectrum", "scan the linearized symbol's branches");

    double t_end = 0.0, dt = 0.0;
    int cadence = 0;
    bool linear_only = false, snapshots = false;
    std::string record;
    auto* evolve = app.add_subcommand("evolve", "integrate the transformed system");
    evolve->add_option("--t-end", t_end, "final time");
    evolve->add_option("--dt", dt, "time step");
    evolve->add_option("--cadence", cadence, "steps between records");
    evolve->add_flag("--linear-only", linear_only, "disable nonlinear terms");
    evolve->add_option("--record", record, "norms to record, e.g. s=1,s=4,b=0.5:inf");
    evolve->add_flag("--snapshots", snapshots, "write the final state snapshot");

    double tol = 0.0;
    int max_periods = 0;
    bool fp_linear = false;
    auto* findp = app.add_subcommand("find-periodic", "fixed point of the period map");
    findp->add_option("--tol", tol, "decrement tolerance");
    findp->add_option("--max-periods", max_periods, "iteration cap");
    findp->add_flag("--linear-only", fp_linear, "linearized dynamics");

    double p_target = 0.0, amplitude = 0.0;
    std::string s_list, window;
    bool st_linear = false;
    auto* stability = app.add_subcommand("stability", "perturbation decay experiment");
    stability->add_option("--p", p_target, "L^p class of the perturbation (1..2)");
    stability->add_option("--amplitude", amplitude, "perturbation amplitude");
    stability->add_option("--s-list", s_list, "comma list of Sobolev indices");
    stability->add_option("--window", window, "fit window lo:hi");
    stability->add_flag("--linear-only", st_linear, "linearized dynamics");

    std::string input, rr = "2", ladder_range;
    double bs = 0.5;
    auto* besov = app.add_subcommand("besov", "Besov norm of a snapshot");
    besov->add_option("--input", input, "snapshot file")->required();
    besov->add_option("--s", bs, "regularity index");
    besov->add_option("--r", rr, "summability exponent or 'inf'");
    besov->add_option("--ladder-range", ladder_range, "restrict shells, lo:hi");

    auto* ineq = app.add_subcommand("check-inequalities", "corpus inequality ratios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) return run_spectrum(g);
        if (evolve->parsed())
            return run_evolve(g, t_end, dt, cadence, linear_only, record, snapshots);
        if (findp->parsed()) return run_find_periodic(g, tol, max_periods, fp_linear);
        if (stability->parsed())
            return run_stability(g, p_target, amplitude, s_list, window, st_linear);
        if (besov->parsed()) return run_besov(g, input, bs, rr, ladder_range);
        if (ineq->parsed()) return run_check_inequalities(g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
