#include "kcav/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kcav/errors.hpp"

namespace kcav {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, const std::string& key, int line) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
        throw ConfigError("unparsable number '" + value + "' for key '" + key + "'", line);
    return x;
}

int parse_int(const std::string& value, const std::string& key, int line) {
    const double x = parse_number(value, key, line);
    const int n = static_cast<int>(x);
    if (double(n) != x)
        throw ConfigError("expected integer for key '" + key + "'", line);
    return n;
}

void check_param_invariant(const std::string& key, double value, int line) {
    if ((key == "kappa_a" || key == "kappa_b") && !(value > 0))
        throw ConfigError(key + " > 0 required", line);
    if (key == "drive" && value < 0) throw ConfigError("drive >= 0 required", line);
    if ((key == "nbar_a" || key == "nbar_b") && value < 0)
        throw ConfigError(key + " >= 0 required", line);
}

void apply_axis_key(AxisSpec& axis, const std::string& suffix, const ConfigEntry& e) {
    if (suffix == "name") {
        if (!is_param_field(trim(e.value)))
            throw ConfigError("axis name '" + trim(e.value) + "' is not a SystemParams field",
                              e.line);
        axis.name = trim(e.value);
    } else if (suffix == "start") {
        axis.start = parse_number(e.value, e.key, e.line);
    } else if (suffix == "stop") {
        axis.stop = parse_number(e.value, e.key, e.line);
    } else if (suffix == "count") {
        axis.count = parse_int(e.value, e.key, e.line);
        if (axis.count < 2) throw ConfigError("axis count >= 2 required", e.line);
    } else {
        throw ConfigError("unknown key '" + e.key + "'", e.line);
    }
}

}  // namespace

std::vector<ConfigEntry> read_config_entries(const std::string& text) {
    std::vector<ConfigEntry> entries;
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value, got '" + line + "'", line_no);
        ConfigEntry entry{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (entry.key.empty()) throw ConfigError("empty key", line_no);
        entries.push_back(std::move(entry));
    }
    return entries;
}

SweepSpec resolve_config(const std::vector<ConfigEntry>& entries) {
    Scenario scenario = Scenario::custom;
    for (const auto& e : entries) {
        if (e.key != "scenario") continue;
        const auto s = scenario_from_name(e.value);
        if (!s) throw ConfigError("unknown scenario '" + e.value + "'", e.line);
        scenario = *s;
    }

    SweepSpec spec = scenario_preset(scenario);
    for (const auto& e : entries) {
        if (e.key == "scenario") continue;
        if (e.key == "out") {
            if (e.value.empty()) throw ConfigError("empty output path", e.line);
            spec.output_path = e.value;
        } else if (e.key == "method") {
            const auto m = method_from_name(e.value);
            if (!m) throw ConfigError("unknown method '" + e.value + "'", e.line);
            spec.method = *m;
        } else if (is_param_field(e.key)) {
            const double x = parse_number(e.value, e.key, e.line);
            check_param_invariant(e.key, x, e.line);
            set_param_field(spec.base_params, e.key, x);
        } else if (e.key == "n_max_a" || e.key == "n_max_b") {
            const int n = parse_int(e.value, e.key, e.line);
            if (n < 1) throw ConfigError(e.key + " >= 1 required", e.line);
            (e.key == "n_max_a" ? spec.truncation.n_max_a : spec.truncation.n_max_b) = n;
        } else if (e.key.rfind("axis1_", 0) == 0) {
            apply_axis_key(spec.axis1, e.key.substr(6), e);
        } else if (e.key.rfind("axis2_", 0) == 0) {
            if (!spec.axis2) spec.axis2 = AxisSpec{};
            apply_axis_key(*spec.axis2, e.key.substr(6), e);
        } else {
            throw ConfigError("unknown key '" + e.key + "'", e.line);
        }
    }

    try {
        spec.base_params.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what(), 0);
    }
    if (scenario == Scenario::custom && (spec.axis1.name.empty() || spec.axis1.count < 2))
        throw ConfigError("custom scenario requires axis1_name/axis1_start/axis1_stop/axis1_count",
                          0);
    return spec;
}

SweepSpec parse_config(const std::string& text) {
    return resolve_config(read_config_entries(text));
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Steady-state photon statistics of a driven linear cavity coupled to a "
                 "Kerr cavity: parameter sweeps emitted as CSV"};
    app.name("kcav");
    std::string config_path, scenario, out_path;
    std::vector<std::string> overrides;
    bool list_scenarios = false;
    app.add_option("--config", config_path, "flat key=value configuration file");
    app.add_option("--scenario", scenario, "scenario preset name (see --list-scenarios)");
    app.add_option("--out", out_path, "output CSV path");
    app.add_option("--set", overrides, "override a config key, e.g. --set drive=0.05");
    app.add_flag("--list-scenarios", list_scenarios, "print scenario names and exit");

    std::vector<const char*> argv{"kcav"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "kcav: " << e.what() << '\n';
        return 1;
    }

    if (list_scenarios) {
        for (const auto& name : scenario_names()) std::cout << name << '\n';
        return 0;
    }
    if (config_path.empty() && scenario.empty()) {
        std::cerr << "kcav: nothing to do; pass --scenario, --config or --list-scenarios\n";
        return 1;
    }

    std::vector<ConfigEntry> entries;
    if (!config_path.empty()) {
        std::ifstream file(config_path, std::ios::binary);
        if (!file) {
            std::cerr << "kcav: config file not found: " << config_path << '\n';
            return 1;
        }
        std::ostringstream text;
        text << file.rdbuf();
        try {
            entries = read_config_entries(text.str());
        } catch (const ConfigError& e) {
            std::cerr << "kcav: " << config_path << ": " << e.what() << '\n';
            return 1;
        }
    }
    if (!scenario.empty()) entries.push_back({"scenario", scenario, 0});
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "kcav: --set expects key=value, got '" << kv << "'\n";
            return 1;
        }
        entries.push_back({kv.substr(0, eq), kv.substr(eq + 1), 0});
    }
    if (!out_path.empty()) entries.push_back({"out", out_path, 0});

    SweepSpec spec;
    try {
        spec = resolve_config(entries);
    } catch (const std::exception& e) {
        std::cerr << "kcav: " << e.what() << '\n';
        return 1;
    }

    try {
        const SweepResult result = run_sweep(spec);
        write_csv(result, spec.output_path);
        write_metadata(result, spec.output_path);
        std::cout << "wrote " << spec.output_path << " (" << result.rows.size() << " rows, "
                  << result.metadata.failed_points << " failed points, "
                  << format_float(result.metadata.wall_clock_seconds) << " s)\n";
    } catch (const std::exception& e) {
        std::cerr << "kcav: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args);
}

}  // namespace kcav
