#ifndef KCAV_SWEEP_HPP
#define KCAV_SWEEP_HPP

// Declarative parameter sweeps: scenario presets that reproduce the
// reference-figure datasets, a deterministic grid runner, and CSV / metadata
// emission.

#include <optional>
#include <string>
#include <vector>

#include "kcav/fock.hpp"
#include "kcav/model.hpp"

namespace kcav {

inline constexpr const char* kArtifactVersion = "kcav/1.0.0";

using Params = SystemParams<double>;

enum class Scenario {
    fig2_occupations,
    fig2_g2,
    fig3_surface,
    fig4_jc,
    fig5_unconventional_small,
    fig6_unconventional_large,
    fig7_thermal,
    custom,
};

enum class Method {
    master_equation,
    perturbative_dme,
    amplitude,
    interference_split,
};

const char* scenario_name(Scenario s);
std::optional<Scenario> scenario_from_name(const std::string& name);
std::vector<std::string> scenario_names();

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// One sweep axis; `name` must be a SystemParams field name.
struct AxisSpec {
    std::string name;
    double start = 0;
    double stop = 0;
    int count = 0;

    double value(int i) const {
        return count < 2 ? start : start + (stop - start) * double(i) / double(count - 1);
    }
};

struct SweepSpec {
    Scenario scenario = Scenario::custom;
    Params base_params{};
    AxisSpec axis1;
    std::optional<AxisSpec> axis2;
    Method method = Method::master_equation;
    Truncation truncation{3, 3};
    std::string output_path;
};

struct SweepMetadata {
    std::string version;
    SweepSpec resolved;
    double wall_clock_seconds = 0;
    int failed_points = 0;
};

struct SweepResult {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    SweepMetadata metadata;
};

// Fully populated spec for a scenario (grid, base parameters, output path).
SweepSpec scenario_preset(Scenario s);

// Reads/writes a SystemParams field by name; unknown names are an error.
bool is_param_field(const std::string& name);
void set_param_field(Params& p, const std::string& name, double value);
double get_param_field(const Params& p, const std::string& name);

// Evaluates the spec on its grid in deterministic order (axis2-major,
// axis1-minor).  Per-point failures are recorded in the trailing `status`
// column; more than 10% failed points aborts the run.
SweepResult run_sweep(const SweepSpec& spec);

// Fixed 17-significant-digit decimal float format used in all emitted text.
std::string format_float(double x);

std::string to_csv(const SweepResult& result);
void write_csv(const SweepResult& result, const std::string& path);
void write_metadata(const SweepResult& result, const std::string& csv_path);

}  // namespace kcav

#endif
