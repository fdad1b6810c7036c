#include "nsf/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nsf {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw std::runtime_error("config: " + path + ": " + what);
}

void require_keys(const json& j, const std::string& path,
                  const std::set<std::string>& allowed)
{
    if (!j.is_object()) fail(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback)
{
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

std::shared_ptr<const PressureLaw> parse_pressure(const json& j, const std::string& path)
{
    require_keys(j, path, {"type", "R", "coeffs"});
    const std::string type = get_or<std::string>(j, "type", "ideal");
    if (type == "ideal") {
        return std::make_shared<IdealGasLaw>(get_or<double>(j, "R", 1.0));
    }
    if (type == "table") {
        if (!j.contains("coeffs")) fail(path + ".coeffs", "required for table laws");
        auto law = std::make_shared<TablePressureLaw>();
        for (std::size_t i = 0; i < j.at("coeffs").size(); ++i) {
            const json& c = j.at("coeffs").at(i);
            require_keys(c, path + ".coeffs[" + std::to_string(i) + "]", {"i", "j", "c"});
            law->terms.push_back({c.at("i").get<int>(), c.at("j").get<int>(),
                                  c.at("c").get<double>()});
        }
        return law;
    }
    fail(path + ".type", "must be \"ideal\" or \"table\"");
}

} // namespace

RunConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: parse error: ") + e.what());
    }

    require_keys(j, "config",
                 {"grid", "params", "force", "integrator", "periodic", "stability",
                  "spectrum", "besov", "inequalities", "seed"});

    RunConfig cfg;

    if (!j.contains("grid")) fail("config.grid", "required");
    {
        const json& g = j.at("grid");
        require_keys(g, "grid", {"L", "N"});
        const double L = get_or<double>(g, "L", 2.0 * 3.14159265358979323846);
        const int N = get_or<int>(g, "N", 32);
        try {
            cfg.grid = make_grid(L, N);
        } catch (const std::exception& e) {
            fail("grid", e.what());
        }
    }

    if (!j.contains("params")) fail("config.params", "required");
    {
        const json& p = j.at("params");
        require_keys(p, "params",
                     {"mu", "mu_prime", "kappa", "c_v", "rho_inf", "theta_inf", "pressure"});
        std::shared_ptr<const PressureLaw> law =
            p.contains("pressure") ? parse_pressure(p.at("pressure"), "params.pressure")
                                   : std::make_shared<IdealGasLaw>(1.0);
        try {
            cfg.params = make_params(get_or<double>(p, "mu", 1.0),
                                     get_or<double>(p, "mu_prime", 0.0),
                                     get_or<double>(p, "kappa", 1.0),
                                     get_or<double>(p, "c_v", 1.5),
                                     get_or<double>(p, "rho_inf", 1.0),
                                     get_or<double>(p, "theta_inf", 1.0), law);
        } catch (const std::exception& e) {
            fail("params", e.what());
        }
    }

    if (j.contains("force")) {
        const json& f = j.at("force");
        require_keys(f, "force", {"T", "eps", "modes"});
        cfg.force.period = get_or<double>(f, "T", 1.0);
        cfg.force.eps = get_or<double>(f, "eps", 0.0);
        if (!(cfg.force.period > 0.0)) fail("force.T", "must be positive");
        if (f.contains("modes")) {
            for (std::size_t i = 0; i < f.at("modes").size(); ++i) {
                const json& m = f.at("modes").at(i);
                const std::string mp = "force.modes[" + std::to_string(i) + "]";
                require_keys(m, mp, {"k", "a", "b", "component", "harmonic"});
                ForceSpec::Term t;
                if (!m.contains("k") || m.at("k").size() != 3) fail(mp + ".k", "need 3 ints");
                for (int d = 0; d < 3; ++d) t.k[d] = m.at("k").at(d).get<int>();
                t.a = get_or<double>(m, "a", 1.0);
                t.b = get_or<double>(m, "b", 0.0);
                t.component = get_or<int>(m, "component", 0);
                t.harmonic = get_or<int>(m, "harmonic", 1);
                if (t.component < 0 || t.component > 2) fail(mp + ".component", "must be 0..2");
                if (t.harmonic < 1) fail(mp + ".harmonic", "must be >= 1");
                for (int d = 0; d < 3; ++d)
                    if (std::abs(t.k[d]) > cfg.grid.N / 3)
                        fail(mp + ".k", "mode outside the dealiased band");
                cfg.force.terms.push_back(t);
            }
        }
    }

    if (j.contains("integrator")) {
        const json& it = j.at("integrator");
        require_keys(it, "integrator",
                     {"dt", "t_end", "cadence", "linear_only", "cfl_factor"});
        cfg.integrator.dt = get_or<double>(it, "dt", 1e-2);
        cfg.t_end = get_or<double>(it, "t_end", 1.0);
        cfg.cadence = get_or<int>(it, "cadence", 1);
        cfg.integrator.linear_only = get_or<bool>(it, "linear_only", false);
        cfg.integrator.cfl_factor = get_or<double>(it, "cfl_factor", 0.25);
        if (!(cfg.integrator.dt > 0.0)) fail("integrator.dt", "must be positive");
        if (cfg.cadence < 1) fail("integrator.cadence", "must be >= 1");
    }

    if (j.contains("periodic")) {
        const json& p = j.at("periodic");
        require_keys(p, "periodic", {"tol", "max_periods", "delta_cap"});
        cfg.periodic.tol = get_or<double>(p, "tol", 1e-6);
        cfg.periodic.max_periods = get_or<int>(p, "max_periods", 50);
        cfg.periodic.delta_cap = get_or<double>(p, "delta_cap", 1.0);
    }

    if (j.contains("stability")) {
        const json& s = j.at("stability");
        require_keys(s, "stability", {"p", "amplitude", "s_list", "window"});
        cfg.stability.p = get_or<double>(s, "p", 2.0);
        cfg.stability.amplitude = get_or<double>(s, "amplitude", 1e-4);
        if (s.contains("s_list"))
            cfg.stability.s_list = s.at("s_list").get<std::vector<double>>();
        if (s.contains("window")) {
            if (s.at("window").size() != 2) fail("stability.window", "need [lo, hi]");
            cfg.stability.window_lo = s.at("window").at(0).get<double>();
            cfg.stability.window_hi = s.at("window").at(1).get<double>();
        }
        if (!(cfg.stability.p >= 1.0 && cfg.stability.p <= 2.0))
            fail("stability.p", "must lie in [1, 2]");
    }

    if (j.contains("spectrum")) {
        const json& s = j.at("spectrum");
        require_keys(s, "spectrum", {"radius_min", "radius_max", "radius_count"});
        cfg.spectrum.radius_min = get_or<double>(s, "radius_min", 1e-3);
        cfg.spectrum.radius_max = get_or<double>(s, "radius_max", 16.0);
        cfg.spectrum.radius_count = get_or<int>(s, "radius_count", 200);
        if (cfg.spectrum.radius_count < 2) fail("spectrum.radius_count", "must be >= 2");
    }

    if (j.contains("besov")) {
        const json& b = j.at("besov");
        require_keys(b, "besov", {"s", "r"});
        cfg.besov.s = get_or<double>(b, "s", 0.5);
        cfg.besov.r = get_or<double>(b, "r", 2.0);
    }

    if (j.contains("inequalities")) {
        const json& q = j.at("inequalities");
        require_keys(q, "inequalities", {"fields", "slope"});
        cfg.inequalities.fields = get_or<int>(q, "fields", 100);
        cfg.inequalities.slope = get_or<double>(q, "slope", 1.0);
    }

    cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void save_snapshot(const PhysicalField& f, double time, const std::string& path)
{
    json header = {{"version", 1},      {"L", f.grid.L},
                   {"N", f.grid.N},     {"C", f.comps},
                   {"time", time},      {"layout", "row-major"},
                   {"dtype", "f64-le"}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_snapshot: write failed for " + path);
}

Snapshot load_snapshot(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_snapshot: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_snapshot: missing header");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("load_snapshot: bad header: ") + e.what());
    }
    if (!header.contains("version") || header.at("version").get<int>() != 1)
        throw std::runtime_error("load_snapshot: unsupported version");

    Snapshot snap;
    const double L = header.at("L").get<double>();
    const int N = header.at("N").get<int>();
    const int C = header.at("C").get<int>();
    snap.time = header.at("time").get<double>();
    snap.field = PhysicalField(make_grid(L, N), C);
    in.read(reinterpret_cast<char*>(snap.field.data.data()),
            static_cast<std::streamsize>(snap.field.data.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != snap.field.data.size() * sizeof(double))
        throw std::runtime_error("load_snapshot: truncated file");
    return snap;
}

void emit_timeseries(const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_timeseries: cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << (i ? "," : "") << columns[i];
    out << '\n';
    char buf[64];
    for (const std::vector<double>& row : rows) {
        if (row.size() != columns.size())
            throw std::runtime_error("emit_timeseries: ragged row");
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("emit_timeseries: write failed for " + path);
}

} // namespace nsf
