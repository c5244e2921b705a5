#ifndef SPARSEBEAM_EVALUATION_HPP
#define SPARSEBEAM_EVALUATION_HPP

#include <span>
#include <string>
#include <vector>

#include "sparsebeam/design.hpp"
#include "sparsebeam/hermitian.hpp"
#include "sparsebeam/model.hpp"

namespace sparsebeam {

struct BeampatternSample {
    double theta_deg = 0.0;
    double power = 0.0;    // a(theta)^H R a(theta)
    double gain_db = 0.0;  // 10 log10(power / sweep max); NaN when the pattern is zero
};

struct BeampatternResult {
    std::vector<BeampatternSample> samples;
    std::vector<std::string> warnings;  // non-PSD input, all-zero pattern
};

// 0..180 inclusive at the given step.
std::vector<Angle> sweep_angles(double step_deg);

// Directed power across the sweep, normalized to the sweep maximum.
// OpenMP across angles; the serial variant is the reference.
BeampatternResult beampattern(const HermitianMatrix& r, const ArrayGrid& grid, std::span<const Angle> angles);
BeampatternResult beampattern_serial(const HermitianMatrix& r, const ArrayGrid& grid, std::span<const Angle> angles);

struct ConstituentPatterns {
    std::vector<BeampatternResult> per_target;
    BeampatternResult composite;
};

// Per-constituent patterns; verifies that constituent powers superpose to
// the composite (the quadratic form is linear in R).
ConstituentPatterns constituent_beampatterns(const DesignResult& result, const ArrayGrid& grid,
                                             std::span<const Angle> angles);

// |a^H R b| / sqrt((a^H R a)(b^H R b)), in [0, 1] by Cauchy-Schwarz.
double cross_corr(const HermitianMatrix& r, const ArrayGrid& grid, Angle theta_a, Angle theta_b);

struct CrossCorrPair {
    int l = 0, lp = 0;  // 1-based target indices
    double theta_l_deg = 0.0, theta_lp_deg = 0.0;
    double value = 0.0;
};

struct CrossCorrReport {
    std::string tag;  // which design/baseline produced R
    std::vector<CrossCorrPair> pairs;
};

CrossCorrReport cross_corr_report(const HermitianMatrix& r, const ArrayGrid& grid,
                                  std::span<const WeightedAngle> targets, std::string tag);

struct DroopReport {
    double droop_db = 0.0;  // sweep-max dB minus mean target dB
    double sweep_max_power = 0.0;
    std::vector<double> target_powers;
    double step_deg = 0.0;
};

// Gap between the strongest sweep direction and the average target gain.
DroopReport target_gain_droop(const HermitianMatrix& r, const ArrayGrid& grid,
                              std::span<const WeightedAngle> targets, double step_deg = 0.25);

}  // namespace sparsebeam

#endif
