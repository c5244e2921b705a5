// Command-line front end: design, enumerate, baseline, eval.
//
// Exit codes: 0 success, 1 error, 2 design finished through the trim
// fallback (artifacts still written), 3 enumeration cap exceeded,
// 4 nested-array construction failure.

#include <omp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsebeam/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sparsebeam;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    std::optional<std::uint64_t> seed;
    std::optional<double> sweep_deg;
    std::optional<double> mu_lower, mu_upper, gamma, epsilon, tol;
    std::optional<int> max_iters;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config = true) {
    auto* cfg = cmd->add_option("--config", f.config_path, "scenario config (JSON)")->envname("SPARSEBEAM_CONFIG");
    if (needs_config) cfg->required();
    cmd->add_option("--out", f.out_dir, "output directory")->envname("SPARSEBEAM_OUT")->required();
    cmd->add_option("--jobs", f.jobs, "worker threads (0 = all)")->envname("SPARSEBEAM_JOBS");
    cmd->add_option("--seed", f.seed, "seed override")->envname("SPARSEBEAM_SEED");
    cmd->add_option("--sweep-deg", f.sweep_deg, "beampattern sweep step in degrees")->envname("SPARSEBEAM_SWEEP_DEG");
    cmd->add_option("--mu-lower", f.mu_lower, "bisection lower limit")->envname("SPARSEBEAM_MU_LOWER");
    cmd->add_option("--mu-upper", f.mu_upper, "bisection upper limit")->envname("SPARSEBEAM_MU_UPPER");
    cmd->add_option("--gamma", f.gamma, "sparsity threshold")->envname("SPARSEBEAM_GAMMA");
    cmd->add_option("--epsilon", f.epsilon, "reweighting epsilon")->envname("SPARSEBEAM_EPSILON");
    cmd->add_option("--tol", f.tol, "solver tolerance (sets eps_abs and eps_rel)")->envname("SPARSEBEAM_TOL");
    cmd->add_option("--max-iters", f.max_iters, "solver iteration limit")->envname("SPARSEBEAM_MAX_ITERS");
}

RunConfig load_with_overrides(const CommonFlags& f) {
    RunConfig cfg = load_config_file(f.config_path);
    if (f.seed) cfg.seed = *f.seed;
    if (f.sweep_deg) cfg.sweep_deg = *f.sweep_deg;
    if (f.mu_lower) cfg.controller.mu_lower = *f.mu_lower;
    if (f.mu_upper) cfg.controller.mu_upper = *f.mu_upper;
    if (f.gamma) cfg.controller.gamma = *f.gamma;
    if (f.epsilon) cfg.epsilon = *f.epsilon;
    if (f.tol) {
        cfg.solver.eps_abs = *f.tol;
        cfg.solver.eps_rel = *f.tol;
    }
    if (f.max_iters) cfg.solver.max_iters = *f.max_iters;
    cfg.solver.validate();
    cfg.controller.validate();
    return cfg;
}

void prepare_out(const std::string& dir) { fs::create_directories(dir); }

double now_ms(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// beampattern CSVs scaled to the physical power level alpha * R
void write_pattern_set(const std::string& dir, const std::string& suffix, const DesignResult& result,
                       const ArrayGrid& grid, double sweep_deg) {
    DesignResult scaled = result;
    scaled.composite *= result.alpha;
    for (HermitianMatrix& rl : scaled.constituents) rl *= result.alpha;
    const std::vector<Angle> sweep = sweep_angles(sweep_deg);
    const ConstituentPatterns patterns = constituent_beampatterns(scaled, grid, sweep);
    write_beampattern_csv(dir + "/beampattern_composite" + suffix + ".csv", patterns.composite);
    for (size_t l = 0; l < patterns.per_target.size(); ++l)
        write_beampattern_csv(dir + "/beampattern_target_" + std::to_string(l + 1) + suffix + ".csv",
                              patterns.per_target[l]);
}

json baseline_block(const DesignProblem& dp, const SelectionMask& mask, const RunConfig& cfg,
                    const std::string& name) {
    const OracleResult oracle = fixed_support_optimum(dp, mask);
    const DesignResult result = scale_power(fixed_support_design(dp, mask), cfg.scenario.total_power);
    const DroopReport droop =
        target_gain_droop(result.composite, cfg.scenario.grid, cfg.scenario.targets, cfg.sweep_deg);
    const CrossCorrReport cc = cross_corr_report(result.composite, cfg.scenario.grid, cfg.scenario.targets, name);
    return {{"name", name},        {"mask_bits", mask.bits()},          {"value", oracle.value},
            {"alpha", result.alpha}, {"droop", droop_to_json(droop)},   {"crosscorr", crosscorr_to_json(cc)}};
}

int cmd_design(const CommonFlags& flags, const std::string& dump_path) {
    const RunConfig cfg = load_with_overrides(flags);
    prepare_out(flags.out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    const DesignProblem dp = assemble(cfg.scenario);
    const double t_assemble = now_ms(t0);

    if (!dump_path.empty()) {
        const ConeProgram prog = build_sdr(dp, ReweightState::ones(dp.n(), cfg.epsilon),
                                           0.5 * (cfg.controller.mu_lower + cfg.controller.mu_upper));
        std::ofstream out(dump_path);
        prog.dump(out);
    }

    const SparseDesignOutcome outcome =
        sparse_design(dp, cfg.controller, ReweightState::ones(dp.n(), cfg.epsilon), cfg.solver);
    const double t_design = now_ms(t0) - t_assemble;

    DesignResult result = resolve_reduced(dp, outcome.mask, cfg.solver);
    result = scale_power(result, cfg.scenario.total_power);
    const double t_resolve = now_ms(t0) - t_assemble - t_design;

    write_pattern_set(flags.out_dir, "", result, cfg.scenario.grid, cfg.sweep_deg);
    const DroopReport droop = target_gain_droop(result.composite, cfg.scenario.grid, cfg.scenario.targets, cfg.sweep_deg);
    const CrossCorrReport cc = cross_corr_report(result.composite, cfg.scenario.grid, cfg.scenario.targets, "design");
    write_crosscorr_json(flags.out_dir + "/crosscorr.json", cc);
    write_trace_log(flags.out_dir + "/trace.log", outcome.trace);

    json baselines;
    baselines["ula"] = baseline_block(dp, ula_mask(dp.n(), cfg.scenario.budget_p), cfg, "ula");
    try {
        baselines["nested"] = baseline_block(dp, nested_mask(dp.n(), cfg.scenario.budget_p), cfg, "nested");
    } catch (const ConstructionError& e) {
        baselines["nested"] = {{"name", "nested"}, {"error", e.what()}};
    }
    baselines["random"] = baseline_block(dp, random_mask(dp.n(), cfg.scenario.budget_p, cfg.seed), cfg, "random");

    // enumeration gap, when a prior `enumerate` left its summary here
    const std::string enum_path = flags.out_dir + "/enumeration.json";
    json design_extra;
    if (fs::exists(enum_path)) {
        std::ifstream in(enum_path);
        json enum_summary = json::parse(in, nullptr, false);
        if (!enum_summary.is_discarded() && enum_summary.contains("best_value")) {
            baselines["enumeration"] = enum_summary;
            design_extra["objective_db_vs_enum"] =
                10.0 * std::log10(result.objective / enum_summary.at("best_value").get<double>());
        }
    }

    const json timings = {{"assemble", t_assemble},
                          {"sparse_design", t_design},
                          {"resolve", t_resolve},
                          {"total", now_ms(t0)}};
    json report = design_report(cfg, result, outcome, baselines, timings);
    report["design"]["droop"] = droop_to_json(droop);
    report["design"]["crosscorr"] = crosscorr_to_json(cc);
    for (auto& [key, value] : design_extra.items()) report["design"][key] = value;
    write_text_file(flags.out_dir + "/report.json", report.dump(2) + "\n");

    std::cout << "design: mask " << result.mask.bits() << " objective " << fmt9(result.objective)
              << (outcome.trimmed ? " (trim fallback)" : "") << "\n";
    return outcome.trimmed ? 2 : 0;
}

int cmd_enumerate(const CommonFlags& flags, long long cap) {
    const RunConfig cfg = load_with_overrides(flags);
    prepare_out(flags.out_dir);
    const DesignProblem dp = assemble(cfg.scenario);

    EnumerationOptions opts;
    opts.cap = cap;
    opts.keep_table = true;
    opts.jobs = flags.jobs;
    const EnumerationOutcome outcome = enumerate_best(dp, cfg.scenario.budget_p, opts);

    write_enumeration_csv(flags.out_dir + "/enumeration.csv", outcome.table, dp.n(), outcome.best.value);
    json summary = {{"count", outcome.table.size()},
                    {"best_mask_bits", outcome.best.mask.bits()},
                    {"best_value", outcome.best.value},
                    {"worst_mask_bits", outcome.worst.mask.bits()},
                    {"worst_value", outcome.worst.value}};

    const std::string report_path = flags.out_dir + "/report.json";
    if (fs::exists(report_path)) {
        std::ifstream in(report_path);
        json report = json::parse(in, nullptr, false);
        if (!report.is_discarded() && report.contains("design")) {
            const double obj = report.at("design").at("objective").get<double>();
            summary["sdr_mask_bits"] = report.at("design").at("mask_bits");
            summary["sdr_gap_db"] = 10.0 * std::log10(obj / outcome.best.value);
        }
    }
    write_text_file(flags.out_dir + "/enumeration.json", summary.dump(2) + "\n");
    std::cout << "enumerate: best " << outcome.best.mask.bits() << " value " << fmt9(outcome.best.value);
    if (summary.contains("sdr_gap_db")) std::cout << " sdr_gap_db " << fmt9(summary["sdr_gap_db"].get<double>());
    std::cout << "\n";
    return 0;
}

int cmd_baseline(const CommonFlags& flags, const std::string& which, const std::string& mask_bits) {
    const RunConfig cfg = load_with_overrides(flags);
    prepare_out(flags.out_dir);
    const DesignProblem dp = assemble(cfg.scenario);
    const int n = dp.n();
    const int p = cfg.scenario.budget_p;

    std::optional<SelectionMask> mask;
    if (which == "ula") {
        mask = ula_mask(n, p);
    } else if (which == "nested") {
        mask = nested_mask(n, p);  // ConstructionError mapped to exit 4 below
    } else if (which == "random") {
        mask = random_mask(n, p, cfg.seed);
    } else if (which == "explicit-mask") {
        if (static_cast<int>(mask_bits.size()) != n)
            throw ValidationError("--mask: need a 0/1 string of length " + std::to_string(n));
        std::vector<bool> active(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            if (mask_bits[static_cast<size_t>(k)] != '0' && mask_bits[static_cast<size_t>(k)] != '1')
                throw ValidationError("--mask: need a 0/1 string");
            active[static_cast<size_t>(k)] = mask_bits[static_cast<size_t>(k)] == '1';
        }
        mask = SelectionMask(std::move(active));
    } else {
        throw ValidationError("--which: expected ula, nested, random, or explicit-mask");
    }

    const OracleResult oracle = fixed_support_optimum(dp, *mask);
    const DesignResult result = scale_power(fixed_support_design(dp, *mask), cfg.scenario.total_power);
    const DroopReport droop = target_gain_droop(result.composite, cfg.scenario.grid, cfg.scenario.targets, cfg.sweep_deg);
    const CrossCorrReport cc = cross_corr_report(result.composite, cfg.scenario.grid, cfg.scenario.targets, which);

    const std::string suffix = "_" + which;
    write_pattern_set(flags.out_dir, suffix, result, cfg.scenario.grid, cfg.sweep_deg);
    write_crosscorr_json(flags.out_dir + "/crosscorr" + suffix + ".json", cc);
    write_text_file(flags.out_dir + "/report" + suffix + ".json",
                    baseline_report(cfg, which, oracle, result, droop, cc).dump(2) + "\n");

    std::cout << "baseline " << which << ": mask " << mask->bits() << " value " << fmt9(oracle.value) << " droop_db "
              << fmt9(droop.droop_db) << "\n";
    return 0;
}

int cmd_eval(const std::string& report_path, const std::string& out_dir, std::optional<double> sweep_override) {
    std::ifstream in(report_path);
    if (!in) throw ValidationError("--report: cannot read " + report_path);
    json report = json::parse(in, nullptr, false);
    if (report.is_discarded()) throw ParseError("report: not valid JSON");
    const Scenario scenario = validate_report(report);
    prepare_out(out_dir);

    const bool is_design = report.contains("design");
    const json& block = is_design ? report.at("design") : report.at("baseline");
    const double sweep_deg = sweep_override ? *sweep_override : report.value("sweep_deg", 0.25);
    const double alpha = block.at("alpha").get<double>();

    DesignResult result{SelectionMask::all_true(scenario.n()),
                        std::vector<HermitianMatrix>(),
                        cmatrix_from_json(block.at("composite")),
                        alpha,
                        0.0,
                        std::vector<ComplexVector>(),
                        std::vector<double>(),
                        std::vector<bool>()};
    for (const json& c : block.at("constituents")) result.constituents.push_back(cmatrix_from_json(c));

    const std::string suffix = is_design ? "" : "_" + block.at("name").get<std::string>();
    write_pattern_set(out_dir, suffix, result, scenario.grid, sweep_deg);
    const CrossCorrReport cc =
        cross_corr_report(result.composite, scenario.grid, scenario.targets, is_design ? "design" : block.at("name").get<std::string>());
    write_crosscorr_json(out_dir + "/crosscorr" + suffix + ".json", cc);
    std::cout << "eval: artifacts rebuilt in " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse transmit-beamformer design toolkit"};
    app.require_subcommand(1);

    CommonFlags design_flags, enum_flags, base_flags;
    std::string dump_path, which = "ula", mask_bits;
    long long cap = 1'000'000;
    std::string eval_report, eval_out;
    std::optional<double> eval_sweep;

    CLI::App* design = app.add_subcommand("design", "run the full sparse design pipeline");
    add_common(design, design_flags);
    design->add_option("--dump-program", dump_path, "write the first SDR cone program to a text file");

    CLI::App* enumerate = app.add_subcommand("enumerate", "exhaustive scan over all P-subsets");
    add_common(enumerate, enum_flags);
    enumerate->add_option("--cap", cap, "largest allowed subset count")->envname("SPARSEBEAM_CAP");

    CLI::App* baseline = app.add_subcommand("baseline", "evaluate a fixed array layout");
    add_common(baseline, base_flags);
    baseline->add_option("--which", which, "ula | nested | random | explicit-mask");
    baseline->add_option("--mask", mask_bits, "0/1 string for --which explicit-mask");

    CLI::App* eval = app.add_subcommand("eval", "rebuild evaluation artifacts from a stored report");
    eval->add_option("--report", eval_report, "stored report.json")->required();
    eval->add_option("--out", eval_out, "output directory")->required();
    eval->add_option("--sweep-deg", eval_sweep, "beampattern sweep step in degrees");

    CLI11_PARSE(app, argc, argv);

    try {
        const CommonFlags* active = design->parsed() ? &design_flags : enumerate->parsed() ? &enum_flags : &base_flags;
        if (active->jobs > 0) omp_set_num_threads(active->jobs);
        if (design->parsed()) return cmd_design(design_flags, dump_path);
        if (enumerate->parsed()) return cmd_enumerate(enum_flags, cap);
        if (baseline->parsed()) return cmd_baseline(base_flags, which, mask_bits);
        if (eval->parsed()) return cmd_eval(eval_report, eval_out, eval_sweep);
    } catch (const SizeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConstructionError& e) {
        std::cerr << "error: " << e.what() << " (pass --which explicit-mask with --mask)\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
