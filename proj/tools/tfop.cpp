// Command-line driver for the experiment runner.
//
// Exit codes: 0 pass, 1 config error, 2 numerical failure, 3 verification
// failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "tfop/harness.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON experiment config");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--format", opts.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", opts.seed, "RNG seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
}

// `verify` runs whichever verification-style experiment the config names
// (identity_suite by default); the other subcommands force their experiment.
tfop::ExperimentConfig load_config(const std::string& experiment, const CommonOpts& opts,
                                   bool force_experiment = true) {
    tfop::ExperimentConfig cfg = opts.config_path.empty()
                                     ? tfop::ExperimentConfig::defaults(experiment)
                                     : tfop::ExperimentConfig::from_json_file(opts.config_path);
    if (force_experiment || cfg.experiment.empty()) cfg.experiment = experiment;
    if (opts.seed_set) cfg.seed = opts.seed;
    if (!opts.out_dir.empty()) cfg.output.dir = opts.out_dir;
    if (!opts.format.empty()) cfg.output.formats = {opts.format};
    return cfg;
}

int run_and_emit(const tfop::ExperimentConfig& cfg) {
    const tfop::Report rep = tfop::run_experiment(cfg);
    for (const auto& r : rep.records) {
        if (r.pass >= 0)
            std::printf("[%s] %-34s %.6e (tol %.1e)\n", r.pass ? "pass" : "FAIL", r.name.c_str(),
                        r.value, r.tolerance);
        else
            std::printf("[  --] %-34s %.6e\n", r.name.c_str(), r.value);
    }
    const auto written = tfop::emit_report(rep, cfg.output.dir, cfg.output.formats);
    for (const auto& p : written) std::printf("wrote %s\n", p.c_str());
    if (!rep.all_pass()) {
        std::printf("verification FAILED\n");
        return 3;
    }
    std::printf("all checks passed\n");
    return 0;
}

int run_report_convert(const std::string& in_path, const std::string& out_dir,
                       const std::string& format) {
    std::ifstream in(in_path);
    if (!in) throw tfop::config_error("cannot open report file '" + in_path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw tfop::config_error(std::string("report parse error: ") + e.what());
    }
    tfop::Report rep;
    try {
        rep.experiment = j.at("experiment").get<std::string>();
        rep.seed = j.at("seed").get<std::uint64_t>();
        rep.config_echo = j.at("config").dump();
        for (const auto& r : j.at("records")) {
            tfop::ReportRecord rec;
            rec.name = r.at("name").get<std::string>();
            rec.detail = r.at("detail").get<std::string>();
            rec.value = r.at("value").get<double>();
            rec.tolerance = r.at("tolerance").is_null()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : r.at("tolerance").get<double>();
            rec.pass = r.at("pass").is_null() ? -1 : (r.at("pass").get<bool>() ? 1 : 0);
            rep.records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw tfop::config_error(std::string("report field error: ") + e.what());
    }
    const auto written = tfop::emit_report(rep, out_dir, {format});
    for (const auto& p : written) std::printf("wrote %s\n", p.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-frequency operator toolkit"};
    app.require_subcommand(1);

    CommonOpts verify_opts, bound_opts, schatten_opts, norms_opts;
    auto* verify = app.add_subcommand("verify", "run the identity verification suite");
    attach_common(verify, verify_opts);
    auto* bound = app.add_subcommand("bound", "operator-norm bound ratio report");
    attach_common(bound, bound_opts);
    auto* schatten = app.add_subcommand("schatten", "singular spectra and Schatten decay");
    attach_common(schatten, schatten_opts);
    auto* norms = app.add_subcommand("norms", "weight and norm audits");
    attach_common(norms, norms_opts);

    std::string rep_in, rep_out = "tfop_out", rep_fmt = "csv";
    auto* report = app.add_subcommand("report", "re-emit an existing report");
    report->add_option("--in", rep_in, "existing report.json")->required();
    report->add_option("--out", rep_out, "output directory");
    report->add_option("--format", rep_fmt, "target format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed())
            return run_and_emit(load_config("identity_suite", verify_opts,
                                            /*force_experiment=*/verify_opts.config_path.empty()));
        if (bound->parsed()) return run_and_emit(load_config("bound_2_7", bound_opts));
        if (schatten->parsed())
            return run_and_emit(load_config("schatten_decay", schatten_opts));
        if (norms->parsed()) return run_and_emit(load_config("norm_audits", norms_opts));
        if (report->parsed()) return run_report_convert(rep_in, rep_out, rep_fmt);
    } catch (const tfop::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const tfop::numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
