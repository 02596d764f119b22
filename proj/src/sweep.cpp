#include "kcav/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "kcav/conditions.hpp"
#include "kcav/errors.hpp"
#include "kcav/lindblad.hpp"
#include "kcav/perturbative.hpp"

namespace kcav {

namespace {

struct ScenarioInfo {
    Scenario scenario;
    const char* name;
};

constexpr ScenarioInfo kScenarios[] = {
    {Scenario::fig2_occupations, "fig2_occupations"},
    {Scenario::fig2_g2, "fig2_g2"},
    {Scenario::fig3_surface, "fig3_surface"},
    {Scenario::fig4_jc, "fig4_jc"},
    {Scenario::fig5_unconventional_small, "fig5_unconventional_small"},
    {Scenario::fig6_unconventional_large, "fig6_unconventional_large"},
    {Scenario::fig7_thermal, "fig7_thermal"},
    {Scenario::custom, "custom"},
};

constexpr std::pair<Method, const char*> kMethods[] = {
    {Method::master_equation, "master_equation"},
    {Method::perturbative_dme, "perturbative_dme"},
    {Method::amplitude, "amplitude"},
    {Method::interference_split, "interference_split"},
};

}  // namespace

const char* scenario_name(Scenario s) {
    for (const auto& info : kScenarios)
        if (info.scenario == s) return info.name;
    return "unknown";
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
    for (const auto& info : kScenarios)
        if (name == info.name) return info.scenario;
    return std::nullopt;
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& info : kScenarios) names.emplace_back(info.name);
    return names;
}

const char* method_name(Method m) {
    for (const auto& [method, name] : kMethods)
        if (method == m) return name;
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    for (const auto& [method, mname] : kMethods)
        if (name == mname) return method;
    return std::nullopt;
}

bool is_param_field(const std::string& name) {
    static const char* fields[] = {"delta_a", "delta_b", "kerr",   "hop",   "drive",
                                   "kappa_a", "kappa_b", "nbar_a", "nbar_b"};
    for (const char* f : fields)
        if (name == f) return true;
    return false;
}

void set_param_field(Params& p, const std::string& name, double value) {
    if (name == "delta_a") p.delta_a = value;
    else if (name == "delta_b") p.delta_b = value;
    else if (name == "kerr") p.kerr = value;
    else if (name == "hop") p.hop = value;
    else if (name == "drive") p.drive = value;
    else if (name == "kappa_a") p.kappa_a = value;
    else if (name == "kappa_b") p.kappa_b = value;
    else if (name == "nbar_a") p.nbar_a = value;
    else if (name == "nbar_b") p.nbar_b = value;
    else throw std::invalid_argument("unknown parameter field '" + name + "'");
}

double get_param_field(const Params& p, const std::string& name) {
    if (name == "delta_a") return p.delta_a;
    if (name == "delta_b") return p.delta_b;
    if (name == "kerr") return p.kerr;
    if (name == "hop") return p.hop;
    if (name == "drive") return p.drive;
    if (name == "kappa_a") return p.kappa_a;
    if (name == "kappa_b") return p.kappa_b;
    if (name == "nbar_a") return p.nbar_a;
    if (name == "nbar_b") return p.nbar_b;
    throw std::invalid_argument("unknown parameter field '" + name + "'");
}

SweepSpec scenario_preset(Scenario s) {
    SweepSpec spec;
    spec.scenario = s;
    spec.truncation = {3, 3};
    spec.output_path = std::string(scenario_name(s)) + ".csv";

    Params p;  // kappa_a = kappa_b = 1 reference-rate defaults
    switch (s) {
        case Scenario::fig2_occupations:
        case Scenario::fig2_g2:
            p.kerr = 25;
            p.hop = 50;
            p.drive = 0.1;
            spec.base_params = p;
            spec.axis1 = {"delta_a", -100.0, 60.0, 1601};
            spec.method = Method::master_equation;
            break;
        case Scenario::fig3_surface:
            p.drive = 0.1;
            spec.base_params = p;
            spec.axis1 = {"hop", 0.0, 100.0, 41};
            spec.axis2 = AxisSpec{"kerr", 0.0, 50.0, 41};
            spec.method = Method::master_equation;
            break;
        case Scenario::fig4_jc:
            // Reference rate is the hopping strength J.
            p.hop = 1.0;
            p.kappa_a = 0.05;
            p.kappa_b = 0.05;
            p.drive = 0.005;
            spec.base_params = p;
            spec.axis1 = {"delta_a", -3.0, 3.0, 601};
            spec.method = Method::master_equation;
            break;
        case Scenario::fig5_unconventional_small:
            // the interference null needs one cutoff above the default (3,3),
            // which distorts g2 there by orders of magnitude
            p.hop = 50;
            p.drive = 0.1;
            spec.base_params = p;
            spec.truncation = {4, 4};
            spec.axis1 = {"delta_a", 0.0, 0.6, 61};
            spec.axis2 = AxisSpec{"kerr", 1.0e-4, 2.0e-4, 11};
            spec.method = Method::master_equation;
            break;
        case Scenario::fig6_unconventional_large:
            p.hop = 50;
            p.drive = 0.1;
            spec.base_params = p;
            spec.truncation = {4, 4};
            spec.axis1 = {"delta_a", -100.0, -80.0, 41};
            spec.axis2 = AxisSpec{"kerr", 120.0, 130.0, 21};
            spec.method = Method::master_equation;
            break;
        case Scenario::fig7_thermal:
            p.hop = 50;
            p.drive = 0.1;
            spec.base_params = p;
            spec.axis1 = {"nbar_b", 0.0, 0.1, 51};
            spec.method = Method::master_equation;
            break;
        case Scenario::custom:
            p.kerr = 25;
            p.hop = 50;
            p.drive = 0.1;
            spec.base_params = p;
            spec.axis1 = {};  // must be supplied by the configuration
            spec.method = Method::master_equation;
            break;
    }
    return spec;
}

std::string format_float(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

struct PointOutcome {
    std::vector<double> values;
    int status = 0;
};

// status codes recorded in the diagnostics column
constexpr int kStatusOk = 0;
constexpr int kStatusInvalidParams = 1;
constexpr int kStatusSolver = 2;
constexpr int kStatusUndefinedCorrelation = 3;
constexpr int kStatusDegenerate = 4;
constexpr int kStatusOther = 9;

int classify_failure() {
    try {
        throw;
    } catch (const UndefinedCorrelationError&) {
        return kStatusUndefinedCorrelation;
    } catch (const NonUniqueSteadyStateError&) {
        return kStatusSolver;
    } catch (const ConvergenceError&) {
        return kStatusSolver;
    } catch (const DegenerateCubicError&) {
        return kStatusDegenerate;
    } catch (const RootNotFoundError&) {
        return kStatusDegenerate;
    } catch (const ResonanceSingularityError&) {
        return kStatusDegenerate;
    } catch (const std::invalid_argument&) {
        return kStatusInvalidParams;
    } catch (const std::exception&) {
        return kStatusOther;
    }
}

struct Occupations {
    double rho11, rho44, rho66;
};

Occupations bare_occupations(const DensityMatrix<double>& rho) {
    const Truncation& t = rho.truncation;
    return {rho.entries(t.index(0, 0), t.index(0, 0)).real(),
            rho.entries(t.index(1, 0), t.index(1, 0)).real(),
            rho.entries(t.index(2, 0), t.index(2, 0)).real()};
}

double amplitude_g2(const AmplitudeSet<double>& amp) {
    const double n1 = std::norm(amp.c10);
    if (!(n1 > 1e-14))
        throw UndefinedCorrelationError("amplitude g2: |C10|^2 below floor");
    return 2.0 * std::norm(amp.c20) / (n1 * n1);
}

double noninterference_g2(const InterferenceSplit<double>& split) {
    if (!(split.rho44_direct > 1e-14))
        throw UndefinedCorrelationError("noninterference g2: rho44 below floor");
    return 2.0 * split.rho66_direct / (split.rho44_direct * split.rho44_direct);
}

using PointFn = std::function<PointOutcome(double, std::optional<double>)>;

struct Evaluator {
    std::vector<std::string> header;
    PointFn point;
};

// Thermal points converge through a truncation ladder; exactly at the
// interference null the pair moment sits at the double-precision noise floor,
// so the convergence certificate is retried in long-double arithmetic.
double thermal_g2(const Params& p, const Truncation& t0) {
    try {
        return converged_g2(p, t0).first;
    } catch (const ConvergenceError&) {
        SystemParams<long double> q{p.delta_a, p.delta_b, p.kerr,   p.hop,   p.drive,
                                    p.kappa_a, p.kappa_b, p.nbar_a, p.nbar_b};
        return static_cast<double>(converged_g2(q, t0).first);
    }
}

Evaluator make_evaluator(const SweepSpec& spec) {
    const Params base = spec.base_params;
    const Truncation trunc = spec.truncation;

    auto solve = [trunc](const Params& p) { return solve_steady_state(p, trunc); };

    switch (spec.scenario) {
        case Scenario::fig2_occupations:
            return {{"delta_over_kappa", "rho11", "rho44", "rho66", "rho44_noninterference",
                     "rho66_noninterference", "status"},
                    [=](double delta, std::optional<double>) {
                        Params p = base;
                        p.delta_a = p.delta_b = delta;
                        const auto occ = bare_occupations(solve(p).rho);
                        const auto split = interference_decomposition(p);
                        return PointOutcome{{occ.rho11, occ.rho44, occ.rho66,
                                             split.rho44_direct, split.rho66_direct},
                                            kStatusOk};
                    }};
        case Scenario::fig2_g2:
            return {{"delta_over_kappa", "g2_numeric", "g2_perturbative", "g2_noninterference",
                     "status"},
                    [=](double delta, std::optional<double>) {
                        Params p = base;
                        p.delta_a = p.delta_b = delta;
                        const double g2n = g2_zero(solve(p).rho);
                        const double g2p = g2_approx(dme_steady_state(p));
                        const double g2i = noninterference_g2(interference_decomposition(p));
                        return PointOutcome{{g2n, g2p, g2i}, kStatusOk};
                    }};
        case Scenario::fig3_surface:
            return {{"k_over_kappa", "j_over_kappa", "rho44", "rho66", "g2", "status"},
                    [=](double hop, std::optional<double> kerr) {
                        Params p = base;
                        p.hop = hop;
                        p.kerr = *kerr;
                        p.delta_a = p.delta_b =
                            -(p.kerr + std::sqrt(p.kerr * p.kerr + 4.0 * hop * hop)) / 2.0;
                        const auto report = solve(p);
                        const auto occ = bare_occupations(report.rho);
                        return PointOutcome{{occ.rho44, occ.rho66, g2_zero(report.rho)},
                                            kStatusOk};
                    }};
        case Scenario::fig4_jc:
            return {{"delta_over_hop", "g2_coupled_k2", "g2_jc_k2", "g2_coupled_k4", "g2_jc_k4",
                     "g2_coupled_k20", "g2_jc_k20", "status"},
                    [=](double delta, std::optional<double>) {
                        PointOutcome out;
                        // H_JC depends on K only through delta_b + K = delta_a,
                        // so the JC value is shared by the three K columns.
                        Params pjc = base;
                        pjc.delta_a = delta;
                        pjc.kerr = 2.0 * base.hop;
                        pjc.delta_b = delta - pjc.kerr;
                        const double g2jc = jc_g2(pjc, trunc.n_max_a);
                        for (double ratio : {2.0, 4.0, 20.0}) {
                            Params p = base;
                            p.kerr = ratio * base.hop;
                            p.delta_a = delta;
                            p.delta_b = delta - p.kerr;
                            out.values.push_back(g2_zero(solve(p).rho));
                            out.values.push_back(g2jc);
                        }
                        return out;
                    }};
        case Scenario::fig5_unconventional_small:
        case Scenario::fig6_unconventional_large:
            return {{"k_over_kappa", "delta_over_kappa", "g2_numeric", "g2_amplitude", "status"},
                    [=](double delta, std::optional<double> kerr) {
                        Params p = base;
                        p.kerr = *kerr;
                        p.delta_a = p.delta_b = delta;
                        const double g2n = g2_zero(solve(p).rho);
                        const double g2a = amplitude_g2(amplitude_steady_state(p));
                        return PointOutcome{{g2n, g2a}, kStatusOk};
                    }};
        case Scenario::fig7_thermal:
            return {{"nbar_b", "g2_conventional", "g2_unconventional", "status"},
                    [=](double nbar, std::optional<double>) {
                        Params conv = base;
                        conv.kerr = 25;
                        conv.delta_a = conv.delta_b =
                            -(conv.kerr + std::sqrt(conv.kerr * conv.kerr +
                                                    4.0 * conv.hop * conv.hop)) /
                            2.0;
                        conv.nbar_b = nbar;
                        Params unconv = base;
                        unconv.kerr = 1.54e-4;
                        unconv.delta_a = unconv.delta_b = 0.288;
                        unconv.nbar_b = nbar;
                        const double g2c = thermal_g2(conv, trunc);
                        const double g2u = thermal_g2(unconv, trunc);
                        return PointOutcome{{g2c, g2u}, kStatusOk};
                    }};
        case Scenario::custom:
            break;
    }

    // custom scenario: axes map directly onto the named parameter fields
    std::vector<std::string> header;
    if (spec.axis2) header.push_back(spec.axis2->name);
    header.push_back(spec.axis1.name);

    auto apply_axes = [=](double a1, std::optional<double> a2) {
        Params p = base;
        set_param_field(p, spec.axis1.name, a1);
        if (spec.axis2) set_param_field(p, spec.axis2->name, *a2);
        p.validate();
        return p;
    };

    PointFn fn;
    switch (spec.method) {
        case Method::master_equation:
            header.insert(header.end(), {"g2", "rho11", "rho44", "rho66"});
            fn = [=](double a1, std::optional<double> a2) {
                const auto report = solve(apply_axes(a1, a2));
                const auto occ = bare_occupations(report.rho);
                return PointOutcome{{g2_zero(report.rho), occ.rho11, occ.rho44, occ.rho66},
                                    kStatusOk};
            };
            break;
        case Method::perturbative_dme:
            header.insert(header.end(), {"g2_approx", "rho44", "rho66"});
            fn = [=](double a1, std::optional<double> a2) {
                const auto dme = dme_steady_state(apply_axes(a1, a2));
                return PointOutcome{{g2_approx(dme), dme.rho44(), dme.rho66()}, kStatusOk};
            };
            break;
        case Method::amplitude:
            header.insert(header.end(), {"g2_amplitude", "abs_c10", "abs_c01", "abs_c20",
                                         "abs_c11", "abs_c02"});
            fn = [=](double a1, std::optional<double> a2) {
                const auto amp = general_amplitude_steady_state(apply_axes(a1, a2));
                return PointOutcome{{amplitude_g2(amp), std::abs(amp.c10), std::abs(amp.c01),
                                     std::abs(amp.c20), std::abs(amp.c11), std::abs(amp.c02)},
                                    kStatusOk};
            };
            break;
        case Method::interference_split:
            header.insert(header.end(), {"rho44_direct", "rho44_interference", "rho66_direct",
                                         "rho66_interference"});
            fn = [=](double a1, std::optional<double> a2) {
                const auto split = interference_decomposition(apply_axes(a1, a2));
                return PointOutcome{{split.rho44_direct, split.rho44_interference,
                                     split.rho66_direct, split.rho66_interference},
                                    kStatusOk};
            };
            break;
    }
    header.push_back("status");
    return {std::move(header), std::move(fn)};
}

void validate_spec(const SweepSpec& spec) {
    spec.base_params.validate();
    spec.truncation.validate();
    if (spec.axis1.name.empty() || spec.axis1.count < 2)
        throw std::invalid_argument("sweep: axis1 requires a field name and count >= 2");
    if (!is_param_field(spec.axis1.name))
        throw std::invalid_argument("sweep: axis1 name '" + spec.axis1.name +
                                    "' is not a SystemParams field");
    if (spec.axis2) {
        if (spec.axis2->name.empty() || spec.axis2->count < 2)
            throw std::invalid_argument("sweep: axis2 requires a field name and count >= 2");
        if (!is_param_field(spec.axis2->name))
            throw std::invalid_argument("sweep: axis2 name '" + spec.axis2->name +
                                        "' is not a SystemParams field");
    }
    const bool uses_master_equation =
        spec.scenario != Scenario::custom || spec.method == Method::master_equation;
    if (uses_master_equation && spec.truncation.n_max_a < 2)
        throw std::invalid_argument("sweep: n_max_a >= 2 required to resolve |2,0>");
    if (spec.output_path.empty())
        throw std::invalid_argument("sweep: output path must not be empty");
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    validate_spec(spec);
    const auto start = std::chrono::steady_clock::now();
    Evaluator evaluator = make_evaluator(spec);

    const int n1 = spec.axis1.count;
    const int n2 = spec.axis2 ? spec.axis2->count : 1;
    const int total = n1 * n2;
    const int value_columns = static_cast<int>(evaluator.header.size()) -
                              (spec.axis2 ? 2 : 1) - 1;

    SweepResult result;
    result.header = evaluator.header;
    result.rows.reserve(total);
    int failed = 0;

    for (int i2 = 0; i2 < n2; ++i2) {
        const std::optional<double> a2 =
            spec.axis2 ? std::optional<double>(spec.axis2->value(i2)) : std::nullopt;
        for (int i1 = 0; i1 < n1; ++i1) {
            const double a1 = spec.axis1.value(i1);
            std::vector<double> row;
            if (a2) row.push_back(*a2);
            row.push_back(a1);
            PointOutcome outcome;
            try {
                outcome = evaluator.point(a1, a2);
            } catch (...) {
                outcome.values.assign(value_columns, 0.0);
                outcome.status = classify_failure();
            }
            if (outcome.status != kStatusOk) ++failed;
            if (10 * failed > total)
                throw std::runtime_error(
                    "run_sweep: aborted, more than 10% of grid points failed (" +
                    std::to_string(failed) + " of " + std::to_string(total) + ")");
            row.insert(row.end(), outcome.values.begin(), outcome.values.end());
            row.push_back(double(outcome.status));
            result.rows.push_back(std::move(row));
        }
    }

    result.metadata.version = kArtifactVersion;
    result.metadata.resolved = spec;
    result.metadata.failed_points = failed;
    result.metadata.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string to_csv(const SweepResult& result) {
    std::string out;
    for (std::size_t i = 0; i < result.header.size(); ++i) {
        if (i) out += ',';
        out += result.header[i];
    }
    out += '\n';
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_float(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("write_csv: cannot open '" + path + "'");
    file << to_csv(result);
    if (!file) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

void write_metadata(const SweepResult& result, const std::string& csv_path) {
    const std::string path = csv_path + ".meta.txt";
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("write_metadata: cannot open '" + path + "'");
    const SweepSpec& spec = result.metadata.resolved;
    file << "version=" << result.metadata.version << '\n';
    file << "scenario=" << scenario_name(spec.scenario) << '\n';
    file << "method=" << method_name(spec.method) << '\n';
    file << "output=" << csv_path << '\n';
    for (const char* f : {"delta_a", "delta_b", "kerr", "hop", "drive", "kappa_a", "kappa_b",
                          "nbar_a", "nbar_b"})
        file << f << '=' << format_float(get_param_field(spec.base_params, f)) << '\n';
    file << "n_max_a=" << spec.truncation.n_max_a << '\n';
    file << "n_max_b=" << spec.truncation.n_max_b << '\n';
    file << "axis1=" << spec.axis1.name << ':' << format_float(spec.axis1.start) << ':'
         << format_float(spec.axis1.stop) << ':' << spec.axis1.count << '\n';
    if (spec.axis2)
        file << "axis2=" << spec.axis2->name << ':' << format_float(spec.axis2->start) << ':'
             << format_float(spec.axis2->stop) << ':' << spec.axis2->count << '\n';
    file << "rows=" << result.rows.size() << '\n';
    file << "failed_points=" << result.metadata.failed_points << '\n';
    file << "wall_clock_seconds=" << format_float(result.metadata.wall_clock_seconds) << '\n';
    if (!file) throw std::runtime_error("write_metadata: write failed for '" + path + "'");
}

}  // namespace kcav
