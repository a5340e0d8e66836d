#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "celab/backward.hpp"
#include "celab/cover.hpp"
#include "celab/orbit.hpp"

namespace celab {

struct MapSpec {
    Polynomial numerator;
    Polynomial denominator{std::vector<Complex>{Complex(1, 0)}};
    std::vector<JuliaOverride> julia_overrides;
    std::string name;              // registry name when taken from the registry
    std::optional<Complex> param;  // family parameter (multicrit)
};

struct RunConfig {
    MapSpec map;
    int forward_N = 200;
    int backward_n = 10;
    int cover_depth = 10;
    double scale_R = 0.1;
    double scale_R_prime = 0.01;
    double tce_r = 0.3;
    int tce_M = 1;
    int tce_P = 2;
    std::optional<SpherePoint> tce_z; // defaults to the Julia sampling anchor
    double expshrink_r = 0.1;
    std::string expshrink_anchor = "auto"; // "auto" | "random" | "re,im"
    int base_samples = 4;
    int branch_samples = 16;
    int circle_samples = 256;
    int julia_samples = 64;
    int julia_horizon = 200;
    std::optional<double> sr_C; // default: min of the distance series
    std::uint64_t seed = 0;
    long long branch_cap = 2000000;
    // Execution-only fields, excluded from the semantic echo in reports.
    int threads = 0;
    std::string out_dir = "out";
};

/// Strict parse: unknown keys are rejected with their JSON path.
RunConfig parse_config(const std::string& json_text);

/// "re,im" or "inf".
SpherePoint parse_point(const std::string& text);

struct RegistryEntry {
    std::string name;
    std::string description;
};

std::vector<RegistryEntry> registry();
MapSpec registry_map(const std::string& name, std::optional<Complex> param = {});

struct Consistency {
    // Normalized growth exponents: log lambda1, mu_max * log lambda2, log lambda_exp.
    std::optional<double> e_ce;
    std::optional<double> e_ce2;
    std::optional<double> e_expshrink;
    std::optional<double> gap_ce_ce2;
    std::optional<double> gap_ce_expshrink;
    std::optional<double> gap_ce2_expshrink;
};

struct EquivalenceReport {
    int degree = 0;
    CriticalSet crit;
    bool vacuous = false;
    std::string verdict_note;

    std::optional<CEEstimate> ce; // binding aggregate over Crit'
    std::vector<std::pair<SpherePoint, CEEstimate>> ce_by_crit;
    std::optional<CE2Estimate> ce2;
    std::vector<std::pair<SpherePoint, CE2Estimate>> ce2_by_crit;
    std::optional<SREstimate> sr; // fitted on the pointwise-min distance series
    std::vector<std::pair<SpherePoint, SrDistances>> sr_by_crit;
    std::optional<ExpShrinkEstimate> expshrink;
    std::optional<FirstReturnBound> first_return;
    std::optional<TceResult> tce;

    std::optional<OrbitSeries> orbit;
    std::optional<SpherePoint> orbit_z0;

    std::optional<Consistency> consistency;
    std::map<std::string, std::string> errors; // estimator name -> message
    std::vector<std::string> warnings;
};

enum class RunPart { orbit, ce, ce2, sr, expshrink, tce, equiv };

/// Runs the selected estimators. equiv never aborts on a failing estimator
/// (recorded under errors); single-estimator parts propagate their error.
EquivalenceReport run_part(const RunConfig& cfg, RunPart part,
                           std::optional<SpherePoint> orbit_z0 = {});

inline EquivalenceReport run_equivalence(const RunConfig& cfg) {
    return run_part(cfg, RunPart::equiv);
}

struct EmitPaths {
    std::filesystem::path report_json;
    std::filesystem::path series_csv;
    std::filesystem::path plots_svg;
};

/// Writes report.json (validated against the bundled schema), series.csv and
/// plots.svg into cfg.out_dir. Byte-stable for identical config and seed.
EmitPaths emit_report(const EquivalenceReport& rep, const RunConfig& cfg);

std::string report_to_json_string(const EquivalenceReport& rep, const RunConfig& cfg);
std::string series_to_csv_string(const EquivalenceReport& rep);
std::string plots_to_svg_string(const EquivalenceReport& rep);

/// The report schema (also shipped at share/report.schema.json).
const std::string& report_schema_json();

/// Minimal structural JSON-schema check (type/properties/required/items/enum).
/// Throws NumericError with a path on mismatch. json_text/schema_text are JSON.
void validate_against_schema(const std::string& json_text, const std::string& schema_text);

} // namespace celab
