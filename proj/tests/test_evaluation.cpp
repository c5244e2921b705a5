#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sparsebeam/evaluation.hpp"
#include "sparsebeam/oracle.hpp"

using namespace sparsebeam;
using doctest::Approx;

namespace {

std::mt19937_64 gen(2024);
std::normal_distribution<double> dist;

HermitianMatrix random_psd(int n) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = {dist(gen), dist(gen)};
    return (m * m.adjoint()).eval();
}

}  // namespace

TEST_CASE("flat and matched patterns") {
    const ArrayGrid grid{4, 0.5};
    const std::vector<Angle> sweep = sweep_angles(1.0);

    SUBCASE("identity matrix radiates n everywhere") {
        const BeampatternResult bp = beampattern(HermitianMatrix::Identity(4, 4), grid, sweep);
        REQUIRE(bp.samples.size() == 181);
        for (const BeampatternSample& s : bp.samples) {
            CHECK(s.power == Approx(4.0).epsilon(1e-12));
            CHECK(s.gain_db == Approx(0.0).epsilon(1e-12));
        }
        CHECK(bp.warnings.empty());
    }
    SUBCASE("outer product of a steering vector peaks at n^2 toward it") {
        const Angle theta0 = Angle::degrees(60.0);
        const HermitianMatrix r = outer(steering_vector(theta0, grid));
        const BeampatternResult bp = beampattern(r, grid, sweep);
        double max_power = 0.0;
        double at_theta0 = 0.0;
        for (const BeampatternSample& s : bp.samples) {
            max_power = std::max(max_power, s.power);
            if (s.theta_deg == 60.0) at_theta0 = s.power;
        }
        CHECK(at_theta0 == Approx(16.0).epsilon(1e-10));
        CHECK(max_power == Approx(16.0).epsilon(1e-10));
    }
    SUBCASE("zero matrix degenerates with a warning") {
        const BeampatternResult bp = beampattern(HermitianMatrix::Zero(4, 4), grid, sweep);
        CHECK(!bp.warnings.empty());
        CHECK(std::isnan(bp.samples[0].gain_db));
    }
    SUBCASE("indefinite input carries a warning") {
        HermitianMatrix bad = -HermitianMatrix::Identity(4, 4);
        const BeampatternResult bp = beampattern(bad, grid, sweep);
        CHECK(!bp.warnings.empty());
    }
}

TEST_CASE("sweep maxima normalize to exactly 0 dB") {
    const ArrayGrid grid{6, 0.5};
    for (int trial = 0; trial < 10; ++trial) {
        const HermitianMatrix r = random_psd(6);
        const BeampatternResult bp = beampattern(r, grid, sweep_angles(0.5));
        double max_db = -1e300;
        for (const BeampatternSample& s : bp.samples) max_db = std::max(max_db, s.gain_db);
        CHECK(max_db == 0.0);
    }
}

TEST_CASE("parallel sweep equals the serial reference bitwise") {
    const ArrayGrid grid{8, 0.5};
    const HermitianMatrix r = random_psd(8);
    const std::vector<Angle> sweep = sweep_angles(0.25);
    const BeampatternResult a = beampattern(r, grid, sweep);
    const BeampatternResult b = beampattern_serial(r, grid, sweep);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].power == b.samples[i].power);
        CHECK(a.samples[i].gain_db == b.samples[i].gain_db);
    }
}

TEST_CASE("constituents superpose to the composite") {
    Scenario s;
    s.grid = {6, 0.5};
    s.targets = {{Angle::degrees(70.0), 1.0}, {Angle::degrees(110.0), 1.0}};
    s.undesired = {{Angle::degrees(30.0), 1.0}};
    s.trace_reg = {1.0, 1.0};
    s.budget_p = 4;
    const DesignProblem dp = assemble(s);
    const DesignResult design = fixed_support_design(dp, ula_mask(6, 4));

    const std::vector<Angle> sweep = sweep_angles(1.0);
    const ConstituentPatterns patterns = constituent_beampatterns(design, s.grid, sweep);
    REQUIRE(patterns.per_target.size() == 2);

    SUBCASE("single constituent equals the composite") {
        Scenario lone = s;
        lone.targets.pop_back();
        lone.trace_reg.pop_back();
        const DesignProblem dpl = assemble(lone);
        const DesignResult dl = fixed_support_design(dpl, ula_mask(6, 4));
        const ConstituentPatterns pl = constituent_beampatterns(dl, s.grid, sweep);
        for (size_t i = 0; i < pl.composite.samples.size(); ++i)
            CHECK(pl.per_target[0].samples[i].power == Approx(pl.composite.samples[i].power).epsilon(1e-12));
    }
    SUBCASE("a corrupted constituent list is caught") {
        DesignResult broken = design;
        broken.constituents[0] *= 2.0;
        CHECK_THROWS_AS(constituent_beampatterns(broken, s.grid, sweep), NumericError);
    }
}

TEST_CASE("cross correlation") {
    const ArrayGrid grid{4, 0.5};
    const Angle broadside = Angle::degrees(90.0);
    const Angle endfire = Angle::degrees(0.0);

    SUBCASE("identity matrix decorrelates orthogonal steering vectors") {
        // a(90) = ones, a(0) alternates sign: the direct sum cancels
        CHECK(cross_corr(HermitianMatrix::Identity(4, 4), grid, broadside, endfire) == Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("same angle correlates perfectly") {
        const HermitianMatrix r = random_psd(4) + HermitianMatrix::Identity(4, 4);
        CHECK(cross_corr(r, grid, broadside, broadside) == Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("rank-1 matched matrix zeroes the cross term against an orthogonal direction") {
        const HermitianMatrix r = outer(steering_vector(broadside, grid)) + outer(steering_vector(endfire, grid));
        CHECK(cross_corr(r, grid, broadside, endfire) == Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("zero directed power is degenerate") {
        const HermitianMatrix r = outer(steering_vector(broadside, grid));
        CHECK_THROWS_AS(cross_corr(r, grid, broadside, endfire), DegenerateError);
    }
    SUBCASE("symmetry and Cauchy-Schwarz on random PSD matrices") {
        std::uniform_real_distribution<double> deg(1.0, 179.0);
        for (int trial = 0; trial < 50; ++trial) {
            const HermitianMatrix r = random_psd(4) + 1e-6 * HermitianMatrix::Identity(4, 4);
            const Angle a = Angle::degrees(deg(gen));
            const Angle b = Angle::degrees(deg(gen));
            const double ab = cross_corr(r, grid, a, b);
            const double ba = cross_corr(r, grid, b, a);
            CHECK(std::abs(ab - ba) < 1e-12);
            CHECK(ab <= 1.0 + 1e-9);
            CHECK(ab >= 0.0);
        }
    }
}

TEST_CASE("cross correlation report covers every target pair") {
    std::vector<WeightedAngle> targets = {{Angle::degrees(40.0), 1.0},
                                          {Angle::degrees(50.0), 1.0},
                                          {Angle::degrees(65.0), 1.0}};
    const CrossCorrReport rep =
        cross_corr_report(HermitianMatrix::Identity(6, 6), {6, 0.5}, targets, "test");
    REQUIRE(rep.pairs.size() == 3);
    CHECK(rep.pairs[0].l == 1);
    CHECK(rep.pairs[0].lp == 2);
    CHECK(rep.pairs[2].l == 2);
    CHECK(rep.pairs[2].lp == 3);
    CHECK(rep.tag == "test");
}

TEST_CASE("target gain droop") {
    const ArrayGrid grid{6, 0.5};
    std::vector<WeightedAngle> one_target = {{Angle::degrees(75.0), 1.0}};

    SUBCASE("matched rank-1 pattern droops zero") {
        const HermitianMatrix r = outer(steering_vector(Angle::degrees(75.0), grid));
        const DroopReport d = target_gain_droop(r, grid, one_target, 0.25);
        CHECK(d.droop_db == Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("flat pattern droops zero") {
        const DroopReport d = target_gain_droop(HermitianMatrix::Identity(6, 6), grid, one_target, 0.5);
        CHECK(d.droop_db == Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("steering away from the target costs gain") {
        const HermitianMatrix r = outer(steering_vector(Angle::degrees(120.0), grid));
        const DroopReport d = target_gain_droop(r, grid, one_target, 0.25);
        CHECK(d.droop_db > 3.0);
    }
}

TEST_CASE("evaluation metrics are scale invariant") {
    const ArrayGrid grid{5, 0.5};
    std::vector<WeightedAngle> targets = {{Angle::degrees(60.0), 1.0}, {Angle::degrees(100.0), 1.0}};
    std::uniform_real_distribution<double> alpha_dist(1e-3, 1e3);
    for (int trial = 0; trial < 10; ++trial) {
        const HermitianMatrix r = random_psd(5) + 1e-9 * HermitianMatrix::Identity(5, 5);
        const double alpha = alpha_dist(gen);
        const HermitianMatrix scaled = alpha * r;

        const BeampatternResult a = beampattern(r, grid, sweep_angles(2.0));
        const BeampatternResult b = beampattern(scaled, grid, sweep_angles(2.0));
        for (size_t i = 0; i < a.samples.size(); ++i)
            CHECK(a.samples[i].gain_db == Approx(b.samples[i].gain_db).epsilon(1e-9));

        CHECK(cross_corr(r, grid, targets[0].angle, targets[1].angle) ==
              Approx(cross_corr(scaled, grid, targets[0].angle, targets[1].angle)).epsilon(1e-9));
        CHECK(target_gain_droop(r, grid, targets, 1.0).droop_db ==
              Approx(target_gain_droop(scaled, grid, targets, 1.0).droop_db).epsilon(1e-9));
    }
}

TEST_CASE("mirror symmetry holds for real matrices") {
    const ArrayGrid grid{5, 0.5};
    const BeampatternResult bp = beampattern(HermitianMatrix::Identity(5, 5), grid, sweep_angles(0.5));
    const size_t count = bp.samples.size();
    for (size_t i = 0; i < count; ++i) {
        const BeampatternSample& lo = bp.samples[i];
        const BeampatternSample& hi = bp.samples[count - 1 - i];
        CHECK(lo.power == Approx(hi.power).epsilon(1e-12));
    }
}

TEST_CASE("sweep grid construction") {
    CHECK(sweep_angles(0.25).size() == 721);
    CHECK(sweep_angles(0.5).size() == 361);
    CHECK(sweep_angles(1.0).front().deg() == 0.0);
    CHECK(sweep_angles(1.0).back().deg() == 180.0);
    CHECK_THROWS_AS(sweep_angles(0.0), ValidationError);
}
