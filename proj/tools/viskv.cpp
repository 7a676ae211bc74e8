// viskv - delayed Kelvin-Voigt viscoelastic wave toolkit.
//
// Usage: viskv <scenario> [--config FILE] [--set key=value]... [--out PATH]
// Scenarios: flux, modes, simulate, oracle, energy, stability-check,
//            stability-region, singular-limit.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "viskv/app.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw viskv::ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"delayed Kelvin-Voigt viscoelastic wave toolkit"};
    app.require_subcommand(0);

    std::string scenario_arg;
    std::string config_path;
    std::string out_path;
    std::vector<std::string> sets;
    std::string lifting_arg = "plain";
    std::string forcing_row_arg = "velocity";
    bool serial = false;
    bool fit = false;

    app.add_option("scenario", scenario_arg,
                   "flux | modes | simulate | oracle | energy | stability-check | "
                   "stability-region | singular-limit")
        ->required();
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--set", sets, "override a config key, e.g. --set epsilon=0.2");
    app.add_option("--out", out_path, "output CSV path (default viskv_<scenario>.csv)");
    app.add_option("--lifting", lifting_arg, "boundary lifting: plain | split");
    app.add_option("--forcing-row", forcing_row_arg,
                   "row the modal source is applied to: velocity | position");
    app.add_flag("--serial", serial, "disable worker threads");
    app.add_flag("--fit", fit, "energy scenario: fit the exponential decay rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return viskv::kExitConfigError;
    }

    try {
        const viskv::Scenario scenario = viskv::parse_scenario(scenario_arg);
        const std::string text = config_path.empty() ? std::string() : read_file(config_path);
        viskv::RunConfig cfg = viskv::parse_config(text, scenario);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw viskv::ConfigError("--set expects key=value, got '" + kv + "'");
            viskv::apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1), 0);
        }
        if (lifting_arg == "plain")
            cfg.lifting = viskv::Lifting::Plain;
        else if (lifting_arg == "split")
            cfg.lifting = viskv::Lifting::KinkSplit;
        else
            throw viskv::ConfigError("--lifting expects plain or split");
        if (forcing_row_arg == "velocity")
            cfg.forcing_row = viskv::ForcingRow::Velocity;
        else if (forcing_row_arg == "position")
            cfg.forcing_row = viskv::ForcingRow::Position;
        else
            throw viskv::ConfigError("--forcing-row expects velocity or position");
        cfg.parallel = !serial;
        cfg.fit = fit;
        if (!out_path.empty()) cfg.out_path = out_path;
        viskv::run(cfg);
        return 0;
    } catch (const viskv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return viskv::kExitConfigError;
    } catch (const viskv::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return viskv::kExitDomainError;
    } catch (const viskv::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return viskv::kExitNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
