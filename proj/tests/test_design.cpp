#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sparsebeam/design.hpp"
#include "sparsebeam/oracle.hpp"

using namespace sparsebeam;
using doctest::Approx;

namespace {

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

Scenario small_scenario() {
    Scenario s;
    s.grid = {5, 0.5};
    s.targets = {{Angle::degrees(80.0), 1.0}, {Angle::degrees(120.0), 0.8}};
    s.undesired = {{Angle::degrees(30.0), 1.2}};
    s.trace_reg = {1.0, 1.0};
    s.budget_p = 3;
    s.total_power = 2.0;
    return s;
}

}  // namespace

TEST_CASE("assemble forms the per-target matrices") {
    SUBCASE("single target at broadside, single undesired at endfire") {
        Scenario s;
        s.grid = {3, 0.5};
        s.targets = {{Angle::degrees(90.0), 1.0}};
        s.undesired = {{Angle::degrees(0.0), 1.0}};
        s.trace_reg = {1.0};
        s.budget_p = 3;
        const DesignProblem dp = assemble(s);

        const ComplexVector v = steering_vector(Angle::degrees(0.0), s.grid);  // [1, -1, 1]
        const HermitianMatrix expected_q = v * v.adjoint() + HermitianMatrix::Identity(3, 3);
        CHECK((dp.qmat[0] - expected_q).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(dp.qmat[0](0, 0).real() == Approx(2.0));
        CHECK(dp.qmat[0](1, 0).real() == Approx(-1.0));
        CHECK((dp.a_outer[0] - HermitianMatrix::Ones(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("no undesired and a lone target leaves only the trace term") {
        Scenario s;
        s.grid = {4, 0.5};
        s.targets = {{Angle::degrees(75.0), 1.0}};
        s.trace_reg = {0.7};
        s.budget_p = 2;
        const DesignProblem dp = assemble(s);
        CHECK((dp.qmat[0] - 0.7 * HermitianMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("paper scenario trace identity: 18 + 6 * 18 = 126 per target") {
        const DesignProblem dp = assemble(paper_scenario());
        for (int l = 0; l < 3; ++l) CHECK(dp.qmat[static_cast<size_t>(l)].trace().real() == Approx(126.0).epsilon(1e-12));
    }
    SUBCASE("structural invariants") {
        const DesignProblem dp = assemble(small_scenario());
        for (int l = 0; l < dp.num_targets(); ++l) {
            const HermitianMatrix& al = dp.a_outer[static_cast<size_t>(l)];
            CHECK(is_hermitian(al, 1e-10));
            CHECK(al.trace().real() == Approx(dp.n()));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(al);
            CHECK(ea.eigenvalues()(0) >= -1e-10);                       // PSD
            CHECK(ea.eigenvalues()(dp.n() - 2) < 1e-10);                // rank 1
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eq(dp.qmat[static_cast<size_t>(l)]);
            CHECK(eq.eigenvalues()(0) >= 1.0 - 1e-10);                  // rho shift
        }
    }
}

TEST_CASE("sdr program layout and cone census") {
    const DesignProblem dp = assemble(paper_scenario());
    const ConeProgram p = build_sdr(dp, ReweightState::ones(18), 1.0);

    int nonneg_rows = 0, soc_blocks = 0, psd_blocks = 0;
    for (const ConeBlock& b : p.cones.blocks) {
        if (b.kind == ConeKind::NonNeg) nonneg_rows += b.dim;
        if (b.kind == ConeKind::SecondOrder) {
            CHECK(b.dim == 3);
            ++soc_blocks;
        }
        if (b.kind == ConeKind::PsdTriangle) {
            CHECK(b.dim == 36);
            ++psd_blocks;
        }
    }
    CHECK(nonneg_rows == 3);
    CHECK(soc_blocks == 513);
    CHECK(psd_blocks == 3);
    CHECK(p.cones.total_dim() == 3 + 513 * 3 + 3 * svec_dim(36));
    CHECK(p.c.size() == 3 * 18 * 18 + svec_dim(18));
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("scalar sdr solves to the constraint floor") {
    // one sensor, one target: R >= 1 with objective (q + mu u) R
    DesignProblem dp;
    dp.scenario.grid = {1, 0.5};  // hand-built problem, no assemble() validation
    dp.scenario.targets = {{Angle::degrees(90.0), 1.0}};
    dp.scenario.trace_reg = {1.0};
    dp.scenario.budget_p = 1;
    ComplexVector a(1);
    a << 1.0;
    dp.target_vectors = {a};
    dp.a_outer = {outer(a)};
    dp.qmat = {2.0 * HermitianMatrix::Identity(1, 1)};

    const double mu = 0.5;
    const ConeProgram p = build_sdr(dp, ReweightState::ones(1), mu);
    const ConeSolution sol = solve(p, SolverSettings{});
    REQUIRE(sol.status == SolveStatus::Optimal);
    const SdrLayout layout{1, 1};
    CHECK(sol.x(layout.re_index(0, 0, 0)) == Approx(1.0).epsilon(1e-4));
    CHECK(sol.x(layout.rt_index(0, 0)) == Approx(1.0).epsilon(1e-4));
    CHECK(p.c.dot(sol.x) == Approx(2.5).epsilon(1e-4));
}

TEST_CASE("mu = 0 sdr agrees with the closed-form oracle on the full grid") {
    const DesignProblem dp = assemble(small_scenario());
    const ConeProgram p = build_sdr(dp, ReweightState::ones(dp.n()), 0.0);
    const ConeSolution sol = solve(p, SolverSettings{});
    REQUIRE(sol.status == SolveStatus::Optimal);
    const OracleResult oracle = fixed_support_optimum(dp, SelectionMask::all_true(dp.n()));
    CHECK(p.c.dot(sol.x) == Approx(oracle.value).epsilon(1e-5));
}

TEST_CASE("reweight update inverts the envelope") {
    const ReweightState st = ReweightState::ones(3, 0.05);
    SUBCASE("zero envelope saturates at 1/epsilon") {
        const ReweightState next = update_reweight(st, Eigen::MatrixXd::Zero(3, 3));
        CHECK((next.u.array() - 20.0).abs().maxCoeff() < 1e-12);
        CHECK(next.iteration == 1);
    }
    SUBCASE("0.95 entry maps to exactly one") {
        Eigen::MatrixXd rt = Eigen::MatrixXd::Zero(3, 3);
        rt(0, 0) = 0.95;
        const ReweightState next = update_reweight(st, rt);
        CHECK(next.u(0, 0) == Approx(1.0));
        CHECK(next.u(1, 1) == Approx(20.0));
    }
    SUBCASE("symmetric in, symmetric out") {
        Eigen::MatrixXd rt(3, 3);
        rt << 0.3, 0.1, 0.0, 0.1, 0.5, 0.2, 0.0, 0.2, 0.9;
        const ReweightState next = update_reweight(st, rt);
        CHECK((next.u - next.u.transpose().eval()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("support thresholding is scale free") {
    Eigen::MatrixXd rt = Eigen::MatrixXd::Zero(3, 3);
    rt(0, 0) = 1.0;
    rt(1, 1) = 1e-9;
    rt(2, 2) = 1.0;
    const SelectionMask m = support_of(rt, 1e-5);
    CHECK(m.bits() == "101");

    SUBCASE("equal entries keep everything") {
        CHECK(support_of(Eigen::MatrixXd::Constant(4, 4, 0.3), 1e-5).count() == 4);
    }
    SUBCASE("a row just above the threshold stays active") {
        Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(2, 2);
        r2(0, 0) = 1.0;
        r2(1, 1) = 2e-5;  // 2 * gamma * max
        CHECK(support_of(r2, 1e-5).count() == 2);
    }
    SUBCASE("all-zero envelope is degenerate") {
        CHECK_THROWS_AS(support_of(Eigen::MatrixXd::Zero(2, 2), 1e-5), DegenerateError);
    }
    SUBCASE("scaling the envelope changes nothing") {
        Eigen::MatrixXd r3(2, 2);
        r3 << 1.0, 0.0, 0.0, 1e-7;
        CHECK(support_of(r3, 1e-5) == support_of((1e6 * r3).eval(), 1e-5));
    }
}

TEST_CASE("sparse design on the trivial full-budget case") {
    Scenario s = small_scenario();
    s.budget_p = s.grid.n;
    const DesignProblem dp = assemble(s);
    SparsityController ctrl;
    const SparseDesignOutcome outcome = sparse_design(dp, ctrl, ReweightState::ones(dp.n()), SolverSettings{});
    CHECK(outcome.mask.count() == s.grid.n);
    CHECK_FALSE(outcome.trimmed);
    CHECK(!outcome.trace.empty());
}

TEST_CASE("bisection exhaustion without a viable mask raises a budget error") {
    Scenario s;
    s.grid = {4, 0.5};
    s.targets = {{Angle::degrees(90.0), 1.0}};
    s.undesired = {{Angle::degrees(70.0), 3.0}};  // asymmetry keeps one row dominant
    s.trace_reg = {1.0};
    s.budget_p = 3;
    const DesignProblem dp = assemble(s);
    SparsityController ctrl;
    ctrl.gamma = 0.9;  // threshold so aggressive only near-peak rows survive
    ctrl.max_bisection_steps = 3;
    CHECK_THROWS_AS(sparse_design(dp, ctrl, ReweightState::ones(dp.n()), SolverSettings{}), BudgetError);
}

TEST_CASE("sdr pipeline recovers the enumerated-best pair") {
    // undesired phases cancel across the index gap 3 (cos = +-1/3), making
    // {0, 3} the unique best 2-subset; derived by enumeration below.
    Scenario s;
    s.grid = {4, 0.5};
    s.targets = {{Angle::degrees(90.0), 1.0}};
    s.undesired = {{Angle::degrees(std::acos(1.0 / 3.0) * 180.0 / 3.14159265358979323846), 4.0},
                   {Angle::degrees(std::acos(-1.0 / 3.0) * 180.0 / 3.14159265358979323846), 4.0}};
    s.trace_reg = {1.0};
    s.budget_p = 2;
    const DesignProblem dp = assemble(s);

    const EnumerationOutcome enumerated = enumerate_best_serial(dp, 2);
    CHECK(enumerated.best.mask.bits() == "1001");

    SparsityController ctrl;
    const SparseDesignOutcome outcome = sparse_design(dp, ctrl, ReweightState::ones(dp.n()), SolverSettings{});
    CHECK(outcome.mask == enumerated.best.mask);
}

TEST_CASE("resolve_reduced closed forms") {
    SUBCASE("full mask, lone target, identity qmat") {
        Scenario s;
        s.grid = {4, 0.5};
        s.targets = {{Angle::degrees(65.0), 1.0}};
        s.trace_reg = {1.0};
        s.budget_p = 4;
        const DesignProblem dp = assemble(s);
        const DesignResult r = resolve_reduced(dp, SelectionMask::all_true(4), SolverSettings{});
        CHECK(r.objective == Approx(0.25).epsilon(1e-4));  // 1/n
        const ComplexVector a = dp.target_vectors[0];
        const HermitianMatrix expected = (a * a.adjoint()) / 16.0;  // a a^H / n^2
        CHECK((r.composite - expected).cwiseAbs().maxCoeff() < 1e-4);
        CHECK(r.rank_ratios[0] <= 1e-3);
    }
    SUBCASE("single-sensor mask gives unit diagonal") {
        const DesignProblem dp = assemble(small_scenario());
        const SelectionMask m = SelectionMask::from_indices(5, std::vector<int>{2});
        const DesignResult r = resolve_reduced(dp, m, SolverSettings{});
        for (int l = 0; l < dp.num_targets(); ++l) {
            CHECK(std::abs(r.constituents[static_cast<size_t>(l)](2, 2)) == Approx(1.0).epsilon(1e-4));
            // everything off the active sensor stays zero
            HermitianMatrix off = r.constituents[static_cast<size_t>(l)];
            off(2, 2) = 0.0;
            CHECK(off.cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("matches the oracle on a nontrivial mask") {
        const DesignProblem dp = assemble(small_scenario());
        const SelectionMask m = SelectionMask::from_indices(5, std::vector<int>{0, 2, 4});
        const DesignResult r = resolve_reduced(dp, m, SolverSettings{});
        const OracleResult oracle = fixed_support_optimum(dp, m);
        CHECK(r.objective == Approx(oracle.value).epsilon(1e-4));
    }
}

TEST_CASE("group sparsity and constraint activity after the pipeline") {
    const DesignProblem dp = assemble(small_scenario());
    SparsityController ctrl;
    const SparseDesignOutcome outcome = sparse_design(dp, ctrl, ReweightState::ones(dp.n()), SolverSettings{});
    const DesignResult result = resolve_reduced(dp, outcome.mask, SolverSettings{});

    for (int l = 0; l < dp.num_targets(); ++l) {
        const HermitianMatrix& rl = result.constituents[static_cast<size_t>(l)];
        double off_mass = 0.0;
        for (int i = 0; i < dp.n(); ++i)
            for (int j = 0; j < dp.n(); ++j)
                if (!outcome.mask[i] || !outcome.mask[j]) off_mass += std::norm(rl(i, j));
        CHECK(std::sqrt(off_mass) <= 1e-8 * rl.norm());

        const double activity = (rl * dp.a_outer[static_cast<size_t>(l)]).trace().real();
        CHECK(activity >= 1.0 - 1e-6);
        CHECK(activity == Approx(1.0).epsilon(1e-5));  // active at mu = 0
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(result.composite);
    CHECK(es.eigenvalues()(0) >= -1e-8 * result.composite.trace().real());
}

TEST_CASE("power scaling") {
    const DesignProblem dp = assemble(small_scenario());
    DesignResult r = resolve_reduced(dp, SelectionMask::all_true(5), SolverSettings{});

    const double tr = r.composite.trace().real();
    DesignResult scaled = scale_power(r, 1.0);
    CHECK(scaled.alpha == Approx(1.0 / tr).epsilon(1e-12));
    CHECK(scaled.alpha * tr == Approx(1.0).epsilon(1e-10));

    DesignResult same = scale_power(r, tr);
    CHECK(same.alpha == Approx(1.0).epsilon(1e-12));

    SUBCASE("half power on a trace-2 composite") {
        DesignResult toy = r;
        toy.composite = 2.0 * HermitianMatrix::Identity(5, 5) / 5.0 * 5.0;  // trace 10
        toy.composite = HermitianMatrix::Identity(5, 5) * 0.4;              // trace 2
        toy = scale_power(toy, 1.0);
        CHECK(toy.alpha == Approx(0.5));
    }
}

TEST_CASE("weight rescaling leaves the mask fixed and scales the objective") {
    Scenario base = small_scenario();
    Scenario scaled = base;
    const double factor = 3.7;
    for (WeightedAngle& w : scaled.targets) w.weight *= factor;
    for (WeightedAngle& w : scaled.undesired) w.weight *= factor;
    for (double& rho : scaled.trace_reg) rho *= factor;

    const DesignProblem dp1 = assemble(base);
    const DesignProblem dp2 = assemble(scaled);
    SparsityController ctrl;
    const SparseDesignOutcome o1 = sparse_design(dp1, ctrl, ReweightState::ones(dp1.n()), SolverSettings{});
    const SparseDesignOutcome o2 = sparse_design(dp2, ctrl, ReweightState::ones(dp2.n()), SolverSettings{});
    CHECK(o1.mask == o2.mask);

    const OracleResult v1 = fixed_support_optimum(dp1, o1.mask);
    const OracleResult v2 = fixed_support_optimum(dp2, o1.mask);
    CHECK(v2.value == Approx(factor * v1.value).epsilon(1e-10));
}
