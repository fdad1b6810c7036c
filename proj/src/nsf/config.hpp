// Configuration loading with strict schema validation, snapshot persistence
// (JSON header + raw little-endian f64), and CSV time-series output.  One
// config file drives every subcommand; subcommand blocks are optional and
// filled with defaults.
#pragma once

#include "nsf/grid.hpp"
#include "nsf/integrator.hpp"
#include "nsf/model.hpp"
#include "nsf/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nsf {

struct SpectrumConfig {
    double radius_min = 1e-3;
    double radius_max = 16.0;
    int radius_count = 200;
};

struct PeriodicConfig {
    double tol = 1e-6;
    int max_periods = 50;
    double delta_cap = 1.0;
};

struct StabilityConfig {
    double p = 2.0;
    double amplitude = 1e-4;
    std::vector<double> s_list = {1.0};
    double window_lo = 5.0;
    double window_hi = 0.0; // 0 => guard default
};

struct BesovConfig {
    double s = 0.5;
    double r = 2.0;
};

struct InequalitiesConfig {
    int fields = 100;
    double slope = 1.0;
};

struct RunConfig {
    Grid grid{6.283185307179586, 32};
    PhysicalParams params;
    ForceSpec force;
    IntegratorOptions integrator;
    double t_end = 1.0;
    int cadence = 1;
    PeriodicConfig periodic;
    StabilityConfig stability;
    SpectrumConfig spectrum;
    BesovConfig besov;
    InequalitiesConfig inequalities;
    std::uint64_t seed = 1;
};

// Parses and validates; unknown keys are rejected with their full path,
// constraint violations name the offending key.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Physical-field snapshot: one-line JSON header
//   {"version":1,"L":...,"N":...,"C":...,"time":...,
//    "layout":"row-major","dtype":"f64-le"}
// followed by C*N^3 raw little-endian doubles (component-major).
void save_snapshot(const PhysicalField& f, double time, const std::string& path);
struct Snapshot {
    PhysicalField field;
    double time = 0.0;
};
Snapshot load_snapshot(const std::string& path);

// CSV with a header row, stable column order, 17 significant digits.
void emit_timeseries(const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const std::string& path);

} // namespace nsf
