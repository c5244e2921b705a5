#include "sparsebeam/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace sparsebeam {

using nlohmann::json;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

json scenario_to_json(const Scenario& s) {
    json targets = json::array();
    for (const WeightedAngle& t : s.targets) targets.push_back({{"deg", t.angle.deg()}, {"weight", t.weight}});
    json undesired = json::array();
    for (const WeightedAngle& u : s.undesired) undesired.push_back({{"deg", u.angle.deg()}, {"weight", u.weight}});
    return {{"grid", {{"n", s.grid.n}, {"spacing_ratio", s.grid.spacing_ratio}}},
            {"budget_p", s.budget_p},
            {"total_power", s.total_power},
            {"targets", targets},
            {"undesired", undesired},
            {"trace_reg", s.trace_reg}};
}

Scenario scenario_from_report(const json& j) {
    Scenario s;
    s.grid.n = j.at("grid").at("n").get<int>();
    s.grid.spacing_ratio = j.at("grid").at("spacing_ratio").get<double>();
    s.budget_p = j.at("budget_p").get<int>();
    s.total_power = j.at("total_power").get<double>();
    for (const json& t : j.at("targets"))
        s.targets.push_back({Angle::degrees(t.at("deg").get<double>()), t.at("weight").get<double>()});
    for (const json& u : j.at("undesired"))
        s.undesired.push_back({Angle::degrees(u.at("deg").get<double>()), u.at("weight").get<double>()});
    s.trace_reg = j.at("trace_reg").get<std::vector<double>>();
    s.validate();
    return s;
}

json cmatrix_to_json(const HermitianMatrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json re_row = json::array(), im_row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return {{"re", re}, {"im", im}};
}

HermitianMatrix cmatrix_from_json(const json& j) {
    const json& re = j.at("re");
    const json& im = j.at("im");
    const Eigen::Index n = static_cast<Eigen::Index>(re.size());
    HermitianMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j2 = 0; j2 < n; ++j2)
            m(i, j2) = {re[static_cast<size_t>(i)][static_cast<size_t>(j2)].get<double>(),
                        im[static_cast<size_t>(i)][static_cast<size_t>(j2)].get<double>()};
    return m;
}

json cvector_to_json(const ComplexVector& v) {
    json re = json::array(), im = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        re.push_back(v(k).real());
        im.push_back(v(k).imag());
    }
    return {{"re", re}, {"im", im}};
}

json crosscorr_to_json(const CrossCorrReport& rep) {
    json pairs = json::array();
    for (const CrossCorrPair& p : rep.pairs)
        pairs.push_back({{"l", p.l},
                         {"lp", p.lp},
                         {"theta_l_deg", p.theta_l_deg},
                         {"theta_lp_deg", p.theta_lp_deg},
                         {"value", p.value}});
    return {{"tag", rep.tag}, {"pairs", pairs}};
}

json droop_to_json(const DroopReport& d) {
    return {{"droop_db", d.droop_db},
            {"sweep_max_power", d.sweep_max_power},
            {"target_powers", d.target_powers},
            {"step_deg", d.step_deg}};
}

json trace_record_to_json(const TrialRecord& t) {
    return {{"step", t.step},
            {"mu", t.mu},
            {"reweight_iters", t.reweight_iters},
            {"cardinality", t.cardinality},
            {"objective", t.objective},
            {"primal_residual", t.primal_residual},
            {"dual_residual", t.dual_residual},
            {"gap", t.gap},
            {"iterations", t.iterations},
            {"status", t.status}};
}

json design_report(const RunConfig& cfg, const DesignResult& result, const SparseDesignOutcome& outcome,
                   const json& baselines, const json& timings) {
    json constituents = json::array();
    for (const HermitianMatrix& rl : result.constituents) constituents.push_back(cmatrix_to_json(rl));
    json vectors = json::array();
    for (const ComplexVector& rv : result.rank1_vectors) vectors.push_back(cvector_to_json(rv));

    json design = {{"mask_bits", result.mask.bits()},
                   {"mask_indices", result.mask.indices()},
                   {"cardinality", result.mask.count()},
                   {"mu_final", outcome.mu_final},
                   {"trimmed", outcome.trimmed},
                   {"cardinality_monotone", outcome.cardinality_monotone},
                   {"objective", result.objective},
                   {"alpha", result.alpha},
                   {"rank_ratios", result.rank_ratios},
                   {"rank1_fallback", result.rank1_fallback},
                   {"composite", cmatrix_to_json(result.composite)},
                   {"constituents", constituents},
                   {"rank1_vectors", vectors}};

    json solver = {{"solves", outcome.solver_stats.solves},
                   {"total_iterations", outcome.solver_stats.total_iterations},
                   {"refactorizations", outcome.solver_stats.refactorizations},
                   {"settings",
                    {{"max_iters", cfg.solver.max_iters},
                     {"eps_abs", cfg.solver.eps_abs},
                     {"eps_rel", cfg.solver.eps_rel},
                     {"over_relaxation", cfg.solver.over_relaxation},
                     {"scaling_enabled", cfg.solver.scaling_enabled},
                     {"check_interval", cfg.solver.check_interval}}}};

    json controller = {{"mu_lower", cfg.controller.mu_lower},
                       {"mu_upper", cfg.controller.mu_upper},
                       {"gamma", cfg.controller.gamma},
                       {"epsilon", cfg.epsilon},
                       {"max_bisection_steps", cfg.controller.max_bisection_steps},
                       {"max_reweight_iters", cfg.controller.max_reweight_iters}};

    return {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
            {"scenario", scenario_to_json(cfg.scenario)},
            {"sweep_deg", cfg.sweep_deg},
            {"seed", cfg.seed},
            {"controller", controller},
            {"design", design},
            {"baselines", baselines},
            {"solver", solver},
            {"timings_ms", timings}};
}

json baseline_report(const RunConfig& cfg, const std::string& name, const OracleResult& oracle,
                     const DesignResult& result, const DroopReport& droop, const CrossCorrReport& crosscorr) {
    json constituents = json::array();
    for (const HermitianMatrix& rl : result.constituents) constituents.push_back(cmatrix_to_json(rl));
    return {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
            {"scenario", scenario_to_json(cfg.scenario)},
            {"sweep_deg", cfg.sweep_deg},
            {"seed", cfg.seed},
            {"baseline",
             {{"name", name},
              {"mask_bits", oracle.mask.bits()},
              {"mask_indices", oracle.mask.indices()},
              {"value", oracle.value},
              {"alpha", result.alpha},
              {"composite", cmatrix_to_json(result.composite)},
              {"constituents", constituents},
              {"droop", droop_to_json(droop)},
              {"crosscorr", crosscorr_to_json(crosscorr)}}}};
}

Scenario validate_report(const json& report) {
    const Scenario s = scenario_from_report(report.at("scenario"));
    const json* block = nullptr;
    if (report.contains("design"))
        block = &report.at("design");
    else if (report.contains("baseline"))
        block = &report.at("baseline");
    else
        throw ValidationError("report: neither a design nor a baseline block present");

    const std::string bits = block->at("mask_bits").get<std::string>();
    if (static_cast<int>(bits.size()) != s.n())
        throw ValidationError("report: mask_bits length does not match scenario grid");
    const HermitianMatrix composite = cmatrix_from_json(block->at("composite"));
    if (composite.rows() != s.n())
        throw ValidationError("report: composite dimension does not match scenario grid");
    const double alpha = block->at("alpha").get<double>();
    const double tr = composite.trace().real();
    if (std::abs(alpha * tr - s.total_power) > 1e-8 * std::max(1.0, s.total_power))
        throw ValidationError("report: alpha * trace(composite) does not reproduce total_power");
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void write_beampattern_csv(const std::string& path, const BeampatternResult& bp) {
    std::string text = "theta_deg,power,gain_db\n";
    for (const BeampatternSample& s : bp.samples)
        text += fmt9(s.theta_deg) + "," + fmt9(s.power) + "," + fmt9(s.gain_db) + "\n";
    write_text_file(path, text);
}

void write_crosscorr_json(const std::string& path, const CrossCorrReport& rep) {
    write_text_file(path, crosscorr_to_json(rep).dump(2) + "\n");
}

void write_enumeration_csv(const std::string& path, const std::vector<EnumerationRow>& table, int n,
                           double best_value) {
    std::string text = "mask_bits,value,value_db_rel_best\n";
    for (const EnumerationRow& row : table) {
        std::string bits(static_cast<size_t>(n), '0');
        for (int k = 0; k < n; ++k)
            if ((row.mask_bits >> k) & 1) bits[static_cast<size_t>(k)] = '1';
        const double db = 10.0 * std::log10(row.value / best_value);
        text += bits + "," + fmt9(row.value) + "," + fmt9(db) + "\n";
    }
    write_text_file(path, text);
}

void write_trace_log(const std::string& path, const std::vector<TrialRecord>& trace) {
    std::string text;
    for (const TrialRecord& t : trace) text += trace_record_to_json(t).dump() + "\n";
    write_text_file(path, text);
}

}  // namespace sparsebeam
