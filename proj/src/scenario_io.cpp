#include "sparsebeam/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sparsebeam {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw ParseError(where + ": unknown field \"" + key + "\"");
}

double number_at(const json& j, const std::string& field) {
    if (!j.is_number()) throw ParseError(field + ": expected a number");
    return j.get<double>();
}

int int_at(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ParseError(field + ": expected an integer");
    return j.get<int>();
}

std::vector<WeightedAngle> parse_directions(const json& arr, const std::string& field) {
    if (!arr.is_array()) throw ParseError(field + ": expected an array of {deg, weight} objects");
    std::vector<WeightedAngle> out;
    int k = 0;
    for (const json& e : arr) {
        const std::string where = field + "[" + std::to_string(k) + "]";
        if (!e.is_object()) throw ParseError(where + ": expected an object");
        reject_unknown_keys(e, {"deg", "weight"}, where);
        if (!e.contains("deg")) throw ParseError(where + ".deg: required");
        const double deg = number_at(e.at("deg"), where + ".deg");
        double weight = 1.0;
        if (e.contains("weight")) weight = number_at(e.at("weight"), where + ".weight");
        out.push_back({Angle::degrees(deg), weight});
        ++k;
    }
    return out;
}

Scenario scenario_from_json(const json& root) {
    if (!root.is_object()) throw ParseError("config: expected a JSON object");
    reject_unknown_keys(root,
                        {"grid", "budget_p", "total_power", "targets", "undesired", "trace_reg", "solver",
                         "controller", "sweep_deg", "seed"},
                        "config");

    Scenario s;
    if (!root.contains("grid")) throw ParseError("grid: required");
    const json& grid = root.at("grid");
    if (!grid.is_object()) throw ParseError("grid: expected an object");
    reject_unknown_keys(grid, {"n", "spacing_ratio"}, "grid");
    if (!grid.contains("n")) throw ParseError("grid.n: required");
    s.grid.n = int_at(grid.at("n"), "grid.n");
    if (grid.contains("spacing_ratio")) s.grid.spacing_ratio = number_at(grid.at("spacing_ratio"), "grid.spacing_ratio");

    if (!root.contains("budget_p")) throw ParseError("budget_p: required");
    s.budget_p = int_at(root.at("budget_p"), "budget_p");
    if (root.contains("total_power")) s.total_power = number_at(root.at("total_power"), "total_power");

    if (!root.contains("targets")) throw ParseError("targets: required");
    s.targets = parse_directions(root.at("targets"), "targets");
    if (root.contains("undesired")) s.undesired = parse_directions(root.at("undesired"), "undesired");

    s.trace_reg.assign(s.targets.size(), 1.0);
    if (root.contains("trace_reg")) {
        const json& tr = root.at("trace_reg");
        if (tr.is_number()) {
            s.trace_reg.assign(s.targets.size(), tr.get<double>());
        } else if (tr.is_array()) {
            if (tr.size() != s.targets.size())
                throw ParseError("trace_reg: need one entry per target (" + std::to_string(s.targets.size()) + ")");
            for (size_t i = 0; i < tr.size(); ++i)
                s.trace_reg[i] = number_at(tr[i], "trace_reg[" + std::to_string(i) + "]");
        } else {
            throw ParseError("trace_reg: expected a number or an array");
        }
    }

    s.validate();
    return s;
}

json parse_text(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw ParseError("config: not valid JSON");
    return root;
}

}  // namespace

Scenario load_scenario(const std::string& text) { return scenario_from_json(parse_text(text)); }

RunConfig load_config(const std::string& text) {
    const json root = parse_text(text);
    RunConfig cfg;
    cfg.scenario = scenario_from_json(root);

    if (root.contains("solver")) {
        const json& sv = root.at("solver");
        if (!sv.is_object()) throw ParseError("solver: expected an object");
        reject_unknown_keys(sv, {"max_iters", "eps_abs", "eps_rel", "over_relaxation", "scaling_enabled", "check_interval"},
                            "solver");
        if (sv.contains("max_iters")) cfg.solver.max_iters = int_at(sv.at("max_iters"), "solver.max_iters");
        if (sv.contains("eps_abs")) cfg.solver.eps_abs = number_at(sv.at("eps_abs"), "solver.eps_abs");
        if (sv.contains("eps_rel")) cfg.solver.eps_rel = number_at(sv.at("eps_rel"), "solver.eps_rel");
        if (sv.contains("over_relaxation"))
            cfg.solver.over_relaxation = number_at(sv.at("over_relaxation"), "solver.over_relaxation");
        if (sv.contains("scaling_enabled")) {
            if (!sv.at("scaling_enabled").is_boolean()) throw ParseError("solver.scaling_enabled: expected a boolean");
            cfg.solver.scaling_enabled = sv.at("scaling_enabled").get<bool>();
        }
        if (sv.contains("check_interval")) cfg.solver.check_interval = int_at(sv.at("check_interval"), "solver.check_interval");
    }
    cfg.solver.validate();

    if (root.contains("controller")) {
        const json& ct = root.at("controller");
        if (!ct.is_object()) throw ParseError("controller: expected an object");
        reject_unknown_keys(ct, {"mu_lower", "mu_upper", "gamma", "epsilon", "max_bisection_steps", "max_reweight_iters"},
                            "controller");
        if (ct.contains("mu_lower")) cfg.controller.mu_lower = number_at(ct.at("mu_lower"), "controller.mu_lower");
        if (ct.contains("mu_upper")) cfg.controller.mu_upper = number_at(ct.at("mu_upper"), "controller.mu_upper");
        if (ct.contains("gamma")) cfg.controller.gamma = number_at(ct.at("gamma"), "controller.gamma");
        if (ct.contains("epsilon")) {
            const double eps = number_at(ct.at("epsilon"), "controller.epsilon");
            if (!(eps > 0.0)) throw ParseError("controller.epsilon: must be positive");
            cfg.epsilon = eps;
        }
        if (ct.contains("max_bisection_steps"))
            cfg.controller.max_bisection_steps = int_at(ct.at("max_bisection_steps"), "controller.max_bisection_steps");
        if (ct.contains("max_reweight_iters"))
            cfg.controller.max_reweight_iters = int_at(ct.at("max_reweight_iters"), "controller.max_reweight_iters");
    }
    cfg.controller.validate();

    if (root.contains("sweep_deg")) {
        cfg.sweep_deg = number_at(root.at("sweep_deg"), "sweep_deg");
        if (!(cfg.sweep_deg > 0.0) || cfg.sweep_deg > 180.0) throw ParseError("sweep_deg: must lie in (0, 180]");
    }
    if (root.contains("seed")) {
        const json& sd = root.at("seed");
        if (!sd.is_number_integer() || sd.get<long long>() < 0) throw ParseError("seed: expected a nonnegative integer");
        cfg.seed = sd.get<std::uint64_t>();
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

}  // namespace sparsebeam
