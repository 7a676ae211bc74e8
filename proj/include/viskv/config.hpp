#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "viskv/csv.hpp"
#include "viskv/errors.hpp"
#include "viskv/modal.hpp"
#include "viskv/model.hpp"

namespace viskv {

enum class Scenario {
    Flux,
    Modes,
    Simulate,
    Oracle,
    Energy,
    StabilityCheck,
    StabilityRegion,
    SingularLimit,
};

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Flux: return "flux";
        case Scenario::Modes: return "modes";
        case Scenario::Simulate: return "simulate";
        case Scenario::Oracle: return "oracle";
        case Scenario::Energy: return "energy";
        case Scenario::StabilityCheck: return "stability-check";
        case Scenario::StabilityRegion: return "stability-region";
        case Scenario::SingularLimit: return "singular-limit";
    }
    return "?";
}

inline Scenario parse_scenario(std::string_view name) {
    if (name == "flux") return Scenario::Flux;
    if (name == "modes") return Scenario::Modes;
    if (name == "simulate") return Scenario::Simulate;
    if (name == "oracle") return Scenario::Oracle;
    if (name == "energy") return Scenario::Energy;
    if (name == "stability-check") return Scenario::StabilityCheck;
    if (name == "stability-region") return Scenario::StabilityRegion;
    if (name == "singular-limit") return Scenario::SingularLimit;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

/// Effective run parameters. Defaults reproduce the rod-loading setup of the
/// "moravec2007" preset: time step tau/1000, horizon 10 tau, 21 modes.
struct RunConfig {
    Scenario scenario{Scenario::Simulate};
    std::string preset{"moravec2007"};

    MusclePhysical physical{};
    bool tau_explicit{false};

    // Direct coefficient overrides; scenario-dependent defaults apply when unset.
    std::optional<double> c1, c2, d1, d2, cp;

    int n_per_delay{1000};
    int horizon_delays{10};
    int modes{21};
    int nx{200};

    Lifting lifting{Lifting::Plain};
    ForcingRow forcing_row{ForcingRow::Velocity};
    bool parallel{true};
    bool fit{false};

    std::vector<double> epsilons{0.0, 0.1, 0.2, 0.5};
    std::vector<int> ks{0, 1, 2};

    int region_res{40};
    double region_c2_lo{0.005}, region_c2_hi{0.1};
    double region_d1_lo{0.05}, region_d1_hi{1.0};
    double region_d2_lo{0.005}, region_d2_hi{0.1};

    double tau0{0.1};
    int tau_points{4};
    double horizon{1.0}; // absolute horizon (s) for the singular-limit sweep

    int x_points{50};
    int t_stride{0}; // 0 = pick ~100 output rows
    int energy_stride{1};

    std::string out_path;
};

namespace detail {

inline double parse_number(std::string_view v, const std::string& key, int line) {
    double out{};
    const char* b = v.data();
    const char* e = v.data() + v.size();
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e)
        throw ConfigError("line " + std::to_string(line) + ": invalid value for key '" + key +
                          "': '" + std::string(v) + "'");
    return out;
}

inline int parse_int(std::string_view v, const std::string& key, int line) {
    int out{};
    const char* b = v.data();
    const char* e = v.data() + v.size();
    const auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e)
        throw ConfigError("line " + std::to_string(line) + ": invalid value for key '" + key +
                          "': '" + std::string(v) + "'");
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

} // namespace detail

inline void apply_preset(RunConfig& cfg, const std::string& name, int line = 0) {
    if (name == "moravec2007") {
        cfg.physical = MusclePhysical{5.33e-3, 1.06e3, 2.00e4, 2.00e7, 0.1, 1.0052e4, 0.0};
        cfg.physical.tau = cfg.physical.retardation_time();
        cfg.tau_explicit = false;
        cfg.c1.reset();
        cfg.c2.reset();
        cfg.d1.reset();
        cfg.d2.reset();
        cfg.cp.reset();
    } else if (name == "unit") {
        cfg.physical = MusclePhysical{1.0, 1.0, 1.0, 1.0, 0.1, 1.0, 1.0};
        cfg.tau_explicit = false;
        cfg.c1 = 1.0;
        cfg.c2 = 0.1;
        cfg.d1 = 1.0;
        cfg.d2 = 0.1;
        cfg.cp = 1.0;
    } else {
        throw ConfigError("line " + std::to_string(line) + ": unknown preset '" + name + "'");
    }
    cfg.preset = name;
}

/// Applies one key=value pair. `line` feeds error messages (0 for --set).
inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
    using detail::parse_int;
    using detail::parse_number;
    auto bad_key = [&]() {
        throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    };

    if (key == "preset") {
        apply_preset(cfg, value, line);
    } else if (key == "L") {
        cfg.physical.L = parse_number(value, key, line);
    } else if (key == "rho") {
        cfg.physical.rho = parse_number(value, key, line);
    } else if (key == "E") {
        cfg.physical.E = parse_number(value, key, line);
        if (!cfg.tau_explicit) cfg.physical.tau = cfg.physical.retardation_time();
    } else if (key == "eta") {
        cfg.physical.eta = parse_number(value, key, line);
        if (!cfg.tau_explicit) cfg.physical.tau = cfg.physical.retardation_time();
    } else if (key == "epsilon") {
        cfg.physical.epsilon = parse_number(value, key, line);
    } else if (key == "f") {
        cfg.physical.f = parse_number(value, key, line);
    } else if (key == "tau") {
        cfg.physical.tau = parse_number(value, key, line);
        cfg.tau_explicit = true;
    } else if (key == "n_per_delay") {
        cfg.n_per_delay = parse_int(value, key, line);
    } else if (key == "horizon_delays") {
        cfg.horizon_delays = parse_int(value, key, line);
    } else if (key == "modes") {
        cfg.modes = parse_int(value, key, line);
    } else if (key == "nx") {
        cfg.nx = parse_int(value, key, line);
    } else if (key == "c1") {
        cfg.c1 = parse_number(value, key, line);
    } else if (key == "c2") {
        cfg.c2 = parse_number(value, key, line);
    } else if (key == "d1") {
        cfg.d1 = parse_number(value, key, line);
    } else if (key == "d2") {
        cfg.d2 = parse_number(value, key, line);
    } else if (key == "cp") {
        cfg.cp = parse_number(value, key, line);
    } else if (key == "epsilons") {
        cfg.epsilons.clear();
        for (auto piece : detail::split(value, ','))
            cfg.epsilons.push_back(parse_number(piece, key, line));
        if (cfg.epsilons.empty())
            throw ConfigError("line " + std::to_string(line) + ": empty list for key 'epsilons'");
    } else if (key == "ks") {
        cfg.ks.clear();
        for (auto piece : detail::split(value, ','))
            cfg.ks.push_back(parse_int(piece, key, line));
        if (cfg.ks.empty())
            throw ConfigError("line " + std::to_string(line) + ": empty list for key 'ks'");
    } else if (key == "region_res") {
        cfg.region_res = parse_int(value, key, line);
    } else if (key == "region_c2_lo") {
        cfg.region_c2_lo = parse_number(value, key, line);
    } else if (key == "region_c2_hi") {
        cfg.region_c2_hi = parse_number(value, key, line);
    } else if (key == "region_d1_lo") {
        cfg.region_d1_lo = parse_number(value, key, line);
    } else if (key == "region_d1_hi") {
        cfg.region_d1_hi = parse_number(value, key, line);
    } else if (key == "region_d2_lo") {
        cfg.region_d2_lo = parse_number(value, key, line);
    } else if (key == "region_d2_hi") {
        cfg.region_d2_hi = parse_number(value, key, line);
    } else if (key == "tau0") {
        cfg.tau0 = parse_number(value, key, line);
    } else if (key == "tau_points") {
        cfg.tau_points = parse_int(value, key, line);
    } else if (key == "horizon") {
        cfg.horizon = parse_number(value, key, line);
    } else if (key == "x_points") {
        cfg.x_points = parse_int(value, key, line);
    } else if (key == "t_stride") {
        cfg.t_stride = parse_int(value, key, line);
    } else if (key == "energy_stride") {
        cfg.energy_stride = parse_int(value, key, line);
    } else {
        bad_key();
    }
}

/// Parses a plain-text key=value config. '#' starts a comment; blank lines
/// are skipped; unknown keys and malformed values raise ConfigError with the
/// offending line number.
inline RunConfig parse_config(const std::string& text, Scenario scenario) {
    RunConfig cfg;
    apply_preset(cfg, "moravec2007");
    cfg.scenario = scenario;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" +
                              std::string(line) + "'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        apply_key(cfg, key, value, line_no);
        if (pos > text.size()) break;
    }
    return cfg;
}

/// All effective parameters as printable strings, the provenance block of
/// every output file.
inline std::map<std::string, std::string> effective_parameters(const RunConfig& cfg) {
    std::map<std::string, std::string> m;
    m["preset"] = cfg.preset;
    m["L"] = format_double(cfg.physical.L);
    m["rho"] = format_double(cfg.physical.rho);
    m["E"] = format_double(cfg.physical.E);
    m["eta"] = format_double(cfg.physical.eta);
    m["epsilon"] = format_double(cfg.physical.epsilon);
    m["f"] = format_double(cfg.physical.f);
    m["tau"] = format_double(cfg.physical.tau);
    if (cfg.c1) m["c1"] = format_double(*cfg.c1);
    if (cfg.c2) m["c2"] = format_double(*cfg.c2);
    if (cfg.d1) m["d1"] = format_double(*cfg.d1);
    if (cfg.d2) m["d2"] = format_double(*cfg.d2);
    if (cfg.cp) m["cp"] = format_double(*cfg.cp);
    m["n_per_delay"] = std::to_string(cfg.n_per_delay);
    m["horizon_delays"] = std::to_string(cfg.horizon_delays);
    m["modes"] = std::to_string(cfg.modes);
    m["nx"] = std::to_string(cfg.nx);
    m["lifting"] = cfg.lifting == Lifting::Plain ? "plain" : "split";
    m["forcing_row"] = cfg.forcing_row == ForcingRow::Velocity ? "velocity" : "position";
    m["parallel"] = cfg.parallel ? "1" : "0";
    {
        std::string eps;
        for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
            if (i) eps += ',';
            eps += format_double(cfg.epsilons[i]);
        }
        m["epsilons"] = eps;
    }
    {
        std::string ks;
        for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
            if (i) ks += ',';
            ks += std::to_string(cfg.ks[i]);
        }
        m["ks"] = ks;
    }
    m["region_res"] = std::to_string(cfg.region_res);
    m["region_c2"] = format_double(cfg.region_c2_lo) + ":" + format_double(cfg.region_c2_hi);
    m["region_d1"] = format_double(cfg.region_d1_lo) + ":" + format_double(cfg.region_d1_hi);
    m["region_d2"] = format_double(cfg.region_d2_lo) + ":" + format_double(cfg.region_d2_hi);
    m["tau0"] = format_double(cfg.tau0);
    m["tau_points"] = std::to_string(cfg.tau_points);
    m["horizon"] = format_double(cfg.horizon);
    m["x_points"] = std::to_string(cfg.x_points);
    m["t_stride"] = std::to_string(cfg.t_stride);
    m["energy_stride"] = std::to_string(cfg.energy_stride);
    return m;
}

} // namespace viskv
