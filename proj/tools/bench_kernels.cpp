// Timing comparison of the OpenMP kernels against their serial reference
// paths: cone projection, subset enumeration, beampattern sweep. Outputs a
// small table; verifies that both paths agree before timing.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "sparsebeam/cone.hpp"
#include "sparsebeam/evaluation.hpp"
#include "sparsebeam/oracle.hpp"
#include "sparsebeam/scenario_io.hpp"

using namespace sparsebeam;

namespace {

double median_ms(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

template <typename F>
double time_ms(F&& fn, int reps) {
    std::vector<double> samples;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        samples.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return median_ms(std::move(samples));
}

Scenario paper_scenario() {
    Scenario s;
    s.grid = {18, 0.5};
    for (double deg : {40.0, 50.0, 65.0}) s.targets.push_back({Angle::degrees(deg), 1.0});
    for (double deg : {25.0, 60.0, 110.0, 120.0}) s.undesired.push_back({Angle::degrees(deg), 1.0});
    s.trace_reg.assign(3, 1.0);
    s.budget_p = 10;
    s.total_power = 1.0;
    return s;
}

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-22s %12.3f %12.3f %9.2fx   %s\n", name, serial_ms, parallel_ms, serial_ms / parallel_ms,
                match ? "outputs match" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-22s %12s %12s %10s\n", "kernel", "serial ms", "omp ms", "speedup");

    const DesignProblem dp = assemble(paper_scenario());

    {  // cone projection on an SDR-shaped slack vector
        const ConeProgram prog = build_sdr(dp, ReweightState::ones(18), 1.0);
        std::mt19937_64 gen(42);
        std::normal_distribution<double> dist;
        Eigen::VectorXd s(prog.cones.total_dim());
        for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = dist(gen);
        const Eigen::VectorXd ref = project_cone_serial(s, prog.cones);
        const Eigen::VectorXd par = project_cone(s, prog.cones);
        const bool match = (ref - par).cwiseAbs().maxCoeff() == 0.0;
        const double t_ser = time_ms([&] { (void)project_cone_serial(s, prog.cones); }, 21);
        const double t_par = time_ms([&] { (void)project_cone(s, prog.cones); }, 21);
        row("project_cone", t_ser, t_par, match);
    }

    {  // exhaustive enumeration, C(18,10) = 43758 subsets
        EnumerationOptions opts;
        const EnumerationOutcome ref = enumerate_best_serial(dp, 10, opts);
        const EnumerationOutcome par = enumerate_best(dp, 10, opts);
        const bool match = ref.best.mask == par.best.mask && ref.best.value == par.best.value &&
                           ref.worst.mask == par.worst.mask && ref.worst.value == par.worst.value;
        const double t_ser = time_ms([&] { (void)enumerate_best_serial(dp, 10, opts); }, 5);
        const double t_par = time_ms([&] { (void)enumerate_best(dp, 10, opts); }, 5);
        row("enumerate_best", t_ser, t_par, match);
    }

    {  // beampattern sweep at 0.05 deg (3601 angles)
        const HermitianMatrix r = fixed_support_design(dp, ula_mask(18, 10)).composite;
        const std::vector<Angle> sweep = sweep_angles(0.05);
        const BeampatternResult ref = beampattern_serial(r, dp.scenario.grid, sweep);
        const BeampatternResult par = beampattern(r, dp.scenario.grid, sweep);
        bool match = ref.samples.size() == par.samples.size();
        for (size_t i = 0; match && i < ref.samples.size(); ++i)
            match = ref.samples[i].power == par.samples[i].power;
        const double t_ser = time_ms([&] { (void)beampattern_serial(r, dp.scenario.grid, sweep); }, 11);
        const double t_par = time_ms([&] { (void)beampattern(r, dp.scenario.grid, sweep); }, 11);
        row("beampattern_sweep", t_ser, t_par, match);
    }

    return 0;
}
