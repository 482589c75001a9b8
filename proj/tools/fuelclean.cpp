// Batch front end: synth, run, score.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fuelclean/fuelclean.hpp"

namespace fs = std::filesystem;
using namespace fuelclean;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kDataError = 2;

struct RunArgs {
    std::string trace;
    std::string config;
    std::string out = ".";
    std::optional<std::string> truth;
};

struct SynthArgs {
    std::size_t n = 100000;
    std::size_t refills = 37;
    std::uint64_t seed = 0;
    double tank = 80.0;
    synth::NoiseProfile profile;
    std::string out = ".";
};

struct ScoreArgs {
    std::string report;
    std::string truth;
    Index tolerance = evaluation::kDefaultMatchTolerance;
};

std::string summarize(const Trace& trace, const PipelineResult& r) {
    std::size_t spectral = 0, removed = 0;
    for (const auto& w : r.windows) {
        spectral += w.method == clustering::ClusterMethod::Spectral ? 1 : 0;
        removed += w.removed;
    }
    double consumed = 0.0, refilled = 0.0;
    for (const auto& s : r.segments) consumed += s.consumed_volume;
    for (const auto& e : r.events) refilled += e.detected_volume;

    std::ostringstream out;
    out << "samples: " << trace.size() << '\n'
        << "missing_or_zero_repaired: " << preprocess::zeros_to_missing(trace).missing_count() << '\n'
        << "white_noise_marks: " << r.white_noise.size() << '\n'
        << "cluster_windows: " << r.windows.size() << '\n'
        << "spectral_windows: " << spectral << '\n'
        << "clustered_points_removed: " << removed << '\n'
        << "wavelet_lag: " << r.wavelet_lag << '\n'
        << "median_wavelet_lag: " << r.median_wavelet_lag << '\n'
        << "peaks_cluster: " << r.branches[0].peaks.size() << '\n'
        << "peaks_cluster_wavelet: " << r.branches[1].peaks.size() << '\n'
        << "peaks_cluster_median: " << r.branches[2].peaks.size() << '\n'
        << "peaks_cluster_median_wavelet: " << r.branches[3].peaks.size() << '\n'
        << "first_validation: " << r.first_validation.size() << '\n'
        << "second_validation: " << r.second_validation.size() << '\n'
        << "validated: " << r.validated.size() << '\n'
        << "refills: " << r.events.size() << '\n'
        << "refilled_volume: " << format_number(refilled) << '\n'
        << "consumed_volume: " << format_number(consumed) << '\n';
    return out.str();
}

int cmd_run(const RunArgs& args) {
    PipelineConfig config;
    try {
        if (!args.config.empty()) config = load_config(args.config);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    try {
        const Trace trace = load_trace(args.trace);
        std::optional<GroundTruth> truth;
        if (args.truth) truth = GroundTruth{{}, load_truth(*args.truth), {}};
        const auto r = run_pipeline(trace, config);

        const fs::path out(args.out);
        fs::create_directories(out);
        evaluation::write_refill_report(r.events, truth, out / "refills.csv", config.match_tolerance);
        write_consumption(r.segments, out / "consumption.csv");
        write_series(trace, r.stages.preprocessed, out / "preprocessed.csv");
        write_series(trace, r.stages.clustered, out / "clustered.csv");
        write_series(trace, r.stages.wavelet, out / "wavelet.csv");
        write_series(trace, r.stages.median, out / "median.csv");
        write_series(trace, r.stages.final, out / "final.csv");
        csv_detail::write_text(out / "summary.txt", summarize(trace, r) + "config:\n" + format_config(config));
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}

int cmd_synth(const SynthArgs& args) {
    try {
        const auto truth = synth::generate_clean(args.n, args.tank, args.refills, args.seed);
        auto profile = args.profile;
        profile.seed = args.seed;
        const auto trace = synth::corrupt(truth, profile);
        const fs::path out(args.out);
        fs::create_directories(out);
        write_trace(trace, out / "trace.csv");
        write_truth(truth.refills, out / "truth.csv");
    } catch (const Error& e) {
        std::cerr << "invalid flags: " << e.what() << '\n';
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "write failed: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}

int cmd_score(const ScoreArgs& args) {
    try {
        const auto detected = load_refill_report(args.report);
        const auto truth = load_truth(args.truth);
        std::cout << evaluation::format_score(evaluation::score(detected, truth, args.tolerance));
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuel-level trace denoising and refill detection"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Denoise a trace and extract refills and consumption");
    run_cmd->add_option("trace", run.trace, "Trace CSV (index,level)")->required();
    run_cmd->add_option("--config", run.config, "Config file of key = value lines");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--truth", run.truth, "Truth CSV (index,volume) to fill the report's error columns");

    SynthArgs syn;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a labelled synthetic trace");
    synth_cmd->add_option("--n", syn.n, "Samples")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--refills", syn.refills, "Injected refills")->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--seed", syn.seed, "Seed for schedule and noise");
    synth_cmd->add_option("--tank", syn.tank, "Tank capacity in litres")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--white-sigma", syn.profile.white_sigma, "White noise sigma")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--spike-prob", syn.profile.spike_prob, "Spike probability")->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--spike-max", syn.profile.spike_max, "Largest spike")->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--stuck-prob", syn.profile.stuck_prob, "Stuck segment probability")
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--zero-prob", syn.profile.zero_prob, "Zero reading probability")
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--out", syn.out, "Output directory");

    ScoreArgs sc;
    auto* score_cmd = app.add_subcommand("score", "Score a refill report against truth");
    score_cmd->add_option("report", sc.report, "Refill report CSV")->required();
    score_cmd->add_option("truth", sc.truth, "Truth CSV (index,volume)")->required();
    score_cmd->add_option("--tolerance", sc.tolerance, "Matching tolerance in samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    if (*run_cmd) return cmd_run(run);
    if (*synth_cmd) return cmd_synth(syn);
    return cmd_score(sc);
}
