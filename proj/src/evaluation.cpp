#include "sparsebeam/evaluation.hpp"

#include <cmath>
#include <limits>

namespace sparsebeam {

namespace {

constexpr double kPsdTol = 1e-8;  // relative PSD slack before warning

double directed_power(const HermitianMatrix& r, const ComplexVector& a) {
    const std::complex<double> q = a.dot(r * a);  // a^H R a
    return q.real();
}

BeampatternResult sweep_impl(const HermitianMatrix& r, const ArrayGrid& grid, std::span<const Angle> angles,
                             bool parallel) {
    grid.validate();
    if (r.rows() != grid.n || r.cols() != grid.n)
        throw DimensionError("beampattern: matrix dimension does not match grid");

    BeampatternResult out;
    const double scale = std::max(1.0, r.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -kPsdTol * scale)
        out.warnings.push_back("input matrix is not PSD within tolerance (min eigenvalue " +
                               std::to_string(es.eigenvalues()(0)) + ")");

    const int count = static_cast<int>(angles.size());
    out.samples.resize(static_cast<size_t>(count));
    auto eval_one = [&](int i) {
        const ComplexVector a = steering_vector(angles[static_cast<size_t>(i)], grid);
        const std::complex<double> q = a.dot(r * a);  // imaginary residue (< 1e-10 for Hermitian R) clipped
        out.samples[static_cast<size_t>(i)] = {angles[static_cast<size_t>(i)].deg(), std::max(q.real(), 0.0), 0.0};
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < count; ++i) eval_one(i);
    } else {
        for (int i = 0; i < count; ++i) eval_one(i);
    }

    double peak = 0.0;
    for (const BeampatternSample& s : out.samples) peak = std::max(peak, s.power);
    if (peak > 0.0) {
        for (BeampatternSample& s : out.samples)
            s.gain_db = s.power > 0.0 ? 10.0 * std::log10(s.power / peak)
                                      : -std::numeric_limits<double>::infinity();
    } else {
        for (BeampatternSample& s : out.samples) s.gain_db = std::numeric_limits<double>::quiet_NaN();
        out.warnings.push_back("pattern is identically zero; gains undefined");
    }
    return out;
}

}  // namespace

std::vector<Angle> sweep_angles(double step_deg) {
    if (!(step_deg > 0.0) || step_deg > 180.0) throw ValidationError("sweep step: must lie in (0, 180]");
    const int count = static_cast<int>(std::llround(180.0 / step_deg));
    std::vector<Angle> out;
    out.reserve(static_cast<size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) out.push_back(Angle::degrees(std::min(180.0, i * step_deg)));
    return out;
}

BeampatternResult beampattern(const HermitianMatrix& r, const ArrayGrid& grid, std::span<const Angle> angles) {
    return sweep_impl(r, grid, angles, true);
}

BeampatternResult beampattern_serial(const HermitianMatrix& r, const ArrayGrid& grid,
                                     std::span<const Angle> angles) {
    return sweep_impl(r, grid, angles, false);
}

ConstituentPatterns constituent_beampatterns(const DesignResult& result, const ArrayGrid& grid,
                                             std::span<const Angle> angles) {
    ConstituentPatterns out{{}, beampattern(result.composite, grid, angles)};
    for (const HermitianMatrix& rl : result.constituents) out.per_target.push_back(beampattern(rl, grid, angles));

    for (size_t i = 0; i < out.composite.samples.size(); ++i) {
        double sum = 0.0;
        for (const BeampatternResult& bp : out.per_target) sum += bp.samples[i].power;
        const double ref = out.composite.samples[i].power;
        if (std::abs(sum - ref) > 1e-8 * std::max(1.0, std::abs(ref)))
            throw NumericError("constituent_beampatterns: constituent powers do not superpose to the composite at " +
                               std::to_string(out.composite.samples[i].theta_deg) + " deg");
    }
    return out;
}

double cross_corr(const HermitianMatrix& r, const ArrayGrid& grid, Angle theta_a, Angle theta_b) {
    grid.validate();
    if (r.rows() != grid.n || r.cols() != grid.n)
        throw DimensionError("cross_corr: matrix dimension does not match grid");
    const ComplexVector a = steering_vector(theta_a, grid);
    const ComplexVector b = steering_vector(theta_b, grid);
    const double pa = directed_power(r, a);
    const double pb = directed_power(r, b);
    // n * trace bounds the directed power; below 1e-12 of that the ratio is noise
    const double floor = 1e-12 * std::max(grid.n * r.trace().real(), 1e-300);
    if (!(pa > floor) || !(pb > floor))
        throw DegenerateError("cross_corr: zero directed power at " +
                              std::to_string(pa > floor ? theta_b.deg() : theta_a.deg()) + " deg");
    const double cross = std::abs(a.dot(r * b));
    return cross / (std::sqrt(pa) * std::sqrt(pb));
}

CrossCorrReport cross_corr_report(const HermitianMatrix& r, const ArrayGrid& grid,
                                  std::span<const WeightedAngle> targets, std::string tag) {
    CrossCorrReport rep{std::move(tag), {}};
    const int count = static_cast<int>(targets.size());
    for (int l = 0; l < count; ++l) {
        for (int lp = l + 1; lp < count; ++lp) {
            const double v = cross_corr(r, grid, targets[static_cast<size_t>(l)].angle, targets[static_cast<size_t>(lp)].angle);
            rep.pairs.push_back({l + 1, lp + 1, targets[static_cast<size_t>(l)].angle.deg(),
                                 targets[static_cast<size_t>(lp)].angle.deg(), v});
        }
    }
    return rep;
}

DroopReport target_gain_droop(const HermitianMatrix& r, const ArrayGrid& grid,
                              std::span<const WeightedAngle> targets, double step_deg) {
    if (targets.empty()) throw ValidationError("target_gain_droop: at least one target required");
    const std::vector<Angle> sweep = sweep_angles(step_deg);
    const BeampatternResult bp = beampattern(r, grid, sweep);
    double peak = 0.0;
    for (const BeampatternSample& s : bp.samples) peak = std::max(peak, s.power);
    if (!(peak > 0.0)) throw DegenerateError("target_gain_droop: pattern is identically zero");

    DroopReport out{0.0, peak, {}, step_deg};
    double mean_db = 0.0;
    for (const WeightedAngle& t : targets) {
        const ComplexVector a = steering_vector(t.angle, grid);
        const double p = directed_power(r, a);
        if (!(p > 0.0)) throw DegenerateError("target_gain_droop: zero power toward a target");
        out.target_powers.push_back(p);
        mean_db += 10.0 * std::log10(p);
    }
    mean_db /= static_cast<double>(targets.size());
    out.droop_db = 10.0 * std::log10(peak) - mean_db;
    return out;
}

}  // namespace sparsebeam
