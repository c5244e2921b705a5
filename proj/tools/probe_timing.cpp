// scratch probe: iteration counts and wall times for representative solves
#include <chrono>
#include <cstdio>

#include "sparsebeam/design.hpp"
#include "sparsebeam/oracle.hpp"

using namespace sparsebeam;

int main() {
    Scenario s;
    s.grid = {5, 0.5};
    s.targets = {{Angle::degrees(80.0), 1.0}, {Angle::degrees(120.0), 0.8}};
    s.undesired = {{Angle::degrees(30.0), 1.2}};
    s.trace_reg = {1.0, 1.0};
    s.budget_p = 3;
    s.total_power = 2.0;
    const DesignProblem dp = assemble(s);

    {
        const auto t0 = std::chrono::steady_clock::now();
        const ConeProgram p = build_sdr(dp, ReweightState::ones(5), 0.5);
        ConeWorkspace ws(p, SolverSettings{});
        const ConeSolution sol = ws.solve(p.c);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        std::printf("small sdr (n=5,L=2): status %s iters %ld time %.1f ms rp %.2e rd %.2e gap %.2e\n",
                    to_string(sol.status), sol.iterations, ms, sol.primal_residual, sol.dual_residual, sol.gap);
        const ConeSolution warm = ws.solve(p.c * 1.05, sol);
        std::printf("  warm re-solve: iters %ld\n", warm.iterations);
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        SparsityController ctrl;
        const SparseDesignOutcome out = sparse_design(dp, ctrl, ReweightState::ones(5), SolverSettings{});
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        std::printf("small pipeline: mask %s trials %zu total_iters %ld solves %d refactor %d time %.1f ms\n",
                    out.mask.bits().c_str(), out.trace.size(), out.solver_stats.total_iterations,
                    out.solver_stats.solves, out.solver_stats.refactorizations, ms);
        for (size_t i = 0; i < out.trace.size(); i += 5)
            std::printf("  trial %2d mu %.4f card %d rw %d iters %ld\n", out.trace[i].step, out.trace[i].mu,
                        out.trace[i].cardinality, out.trace[i].reweight_iters, out.trace[i].iterations);
    }
    {
        Scenario p18;
        p18.grid = {18, 0.5};
        for (double deg : {40.0, 50.0, 65.0}) p18.targets.push_back({Angle::degrees(deg), 1.0});
        for (double deg : {25.0, 60.0, 110.0, 120.0}) p18.undesired.push_back({Angle::degrees(deg), 1.0});
        p18.trace_reg.assign(3, 1.0);
        p18.budget_p = 10;
        const DesignProblem dpp = assemble(p18);
        const auto t0 = std::chrono::steady_clock::now();
        const ConeProgram p = build_sdr(dpp, ReweightState::ones(18), 1.505);
        const double t_build = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        ConeWorkspace ws(p, SolverSettings{});
        const double t_ws = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        const ConeSolution sol = ws.solve(p.c);
        const double t_solve = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        std::printf("paper sdr: build %.0f ms, workspace %.0f ms, solve %.0f ms, status %s iters %ld\n", t_build,
                    t_ws - t_build, t_solve - t_ws, to_string(sol.status), sol.iterations);
        const Eigen::MatrixXd rt = extract_envelope(sol.x, SdrLayout{18, 3});
        std::printf("  support at gamma=1e-5: %d sensors\n", support_of(rt, 1e-5).count());
        const ConeSolution warm = ws.solve(p.c, sol);
        std::printf("  warm identical re-solve: iters %ld\n", warm.iterations);
    }
    return 0;
}
