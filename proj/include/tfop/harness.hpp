#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfop/norms.hpp"
#include "tfop/operators.hpp"
#include "tfop/schatten.hpp"

namespace tfop {

// --- configuration ------------------------------------------------------------

struct PhaseConfig {
    std::string family = "bilinear";  // bilinear | quadratic | perturbed | zero
    double coupling = 1.0;            // quadratic: off-diagonal scale
    double eps = 0.0;                 // perturbed: trig amplitude
    double trig_freq = 1.0;           // perturbed: base frequency
};

struct AmplitudeConfig {
    std::vector<double> center{0.0};
    std::vector<double> spread{1.0};
    std::vector<double> modulation{0.0};
    double amplitude = 1.0;
};

struct WeightsConfig {
    WeightSpec omega = WeightSpec::one(6);
    WeightSpec v = WeightSpec::one(6);
    WeightSpec omega1 = WeightSpec::one(2);
    WeightSpec omega2 = WeightSpec::one(2);
};

struct OutputConfig {
    std::string dir = "tfop_out";
    std::vector<std::string> formats{"json"};
};

struct ExperimentConfig {
    std::string experiment = "identity_suite";
    GridSpec grid = GridSpec::self_dual(1, 8);
    PhaseConfig phase;
    AmplitudeConfig amplitude;
    WeightsConfig weights;
    double p = 2.0, q = 2.0, r = 2.0, s = 2.0;
    std::uint64_t seed = 12345;
    OutputConfig output;

    static ExperimentConfig defaults(const std::string& experiment);
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string canonical_json() const;
};

PhaseSpec build_phase(const PhaseConfig& pc, int n);

// --- reports --------------------------------------------------------------------

struct ReportRecord {
    std::string name;    // stable check/metric id
    std::string detail;  // what the number is
    double value = 0.0;
    double tolerance = std::numeric_limits<double>::quiet_NaN();  // NaN: plain metric
    int pass = -1;                                                // -1 n/a, 0 fail, 1 pass
};

struct Report {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string config_echo;  // canonical config JSON
    std::vector<ReportRecord> records;

    bool all_pass() const;
    void add_check(const std::string& name, const std::string& detail, double value,
                   double tolerance);
    void add_metric(const std::string& name, const std::string& detail, double value);
};

std::string report_to_json(const Report& rep);
std::string report_to_csv(const Report& rep);

// Writes report.json / report.csv under out_dir; byte-identical across runs
// at a fixed seed.
std::vector<std::string> emit_report(const Report& rep, const std::string& out_dir,
                                     const std::vector<std::string>& formats);

// --- experiments -----------------------------------------------------------------

struct BoundReport {
    double lhs = 0.0;         // empirical operator norm (lower bound for p != 2)
    double d = 0.0;           // nondegeneracy value
    double amp_norm = 0.0;    // sup-L1 modulation norm of the amplitude
    double phase_norm = 0.0;  // sum of second-derivative sup-L1 norms
    double ratio = 0.0;       // lhs * d / (amp_norm * exp(phase_norm))
    std::string metadata;
    Report report;
};

BoundReport run_bound_experiment(const ExperimentConfig& cfg);
Report run_schatten_experiment(const ExperimentConfig& cfg);
Report run_norm_audits(const ExperimentConfig& cfg);
Report run_kernel_identities(const ExperimentConfig& cfg);
Report run_reformulation_study(const ExperimentConfig& cfg);

// The identity suite: every cross-module check at its module tolerance.
Report run_verification_suite(const ExperimentConfig& cfg);

Report run_experiment(const ExperimentConfig& cfg);

}  // namespace tfop
