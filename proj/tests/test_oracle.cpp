#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sparsebeam/oracle.hpp"

using namespace sparsebeam;
using doctest::Approx;

namespace {

std::mt19937_64 gen(99);

Scenario random_scenario(int n, int targets, int undesired) {
    std::uniform_real_distribution<double> deg(5.0, 175.0);
    std::uniform_real_distribution<double> weight(0.2, 2.0);
    Scenario s;
    s.grid = {n, 0.5};
    std::vector<double> used;
    auto fresh_angle = [&]() {
        for (;;) {
            const double d = deg(gen);
            bool clash = false;
            for (double u : used)
                if (std::abs(u - d) < 2.0) clash = true;
            if (!clash) {
                used.push_back(d);
                return d;
            }
        }
    };
    for (int l = 0; l < targets; ++l) s.targets.push_back({Angle::degrees(fresh_angle()), weight(gen)});
    for (int q = 0; q < undesired; ++q) s.undesired.push_back({Angle::degrees(fresh_angle()), weight(gen)});
    s.trace_reg.assign(static_cast<size_t>(targets), 1.0);
    s.budget_p = std::max(1, n / 2);
    return s;
}

SelectionMask random_support(int n) {
    std::vector<bool> active(static_cast<size_t>(n), false);
    int count = 0;
    for (int k = 0; k < n; ++k) {
        active[static_cast<size_t>(k)] = (gen() & 1u) != 0;
        if (active[static_cast<size_t>(k)]) ++count;
    }
    if (count == 0) active[static_cast<size_t>(gen() % n)] = true;
    return SelectionMask(std::move(active));
}

}  // namespace

TEST_CASE("closed form on the identity qmat") {
    Scenario s;
    s.grid = {6, 0.5};
    s.targets = {{Angle::degrees(50.0), 1.0}};
    s.trace_reg = {1.0};
    s.budget_p = 6;
    const DesignProblem dp = assemble(s);
    const OracleResult r = fixed_support_optimum(dp, SelectionMask::all_true(6));
    CHECK(r.value == Approx(1.0 / 6.0).epsilon(1e-12));  // 1 / ||a||^2
    const ComplexVector expected = dp.target_vectors[0] / 6.0;
    CHECK((r.per_target_vectors[0] - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scalar support value equals the diagonal qmat entry") {
    // min R*q s.t. R*|a_k|^2 >= 1 with |a_k| = 1 gives R = 1, value = q
    const Scenario s = random_scenario(5, 2, 2);
    const DesignProblem dp = assemble(s);
    const SelectionMask m = SelectionMask::from_indices(5, std::vector<int>{3});
    const OracleResult r = fixed_support_optimum(dp, m);
    double expected = 0.0;
    for (int l = 0; l < dp.num_targets(); ++l) expected += dp.qmat[static_cast<size_t>(l)](3, 3).real();
    CHECK(r.value == Approx(expected).epsilon(1e-10));
}

TEST_CASE("oracle stationarity: Q r = a / (a^H Q^-1 a)") {
    for (int trial = 0; trial < 20; ++trial) {
        const Scenario s = random_scenario(7, 2, 2);
        const DesignProblem dp = assemble(s);
        const SelectionMask m = random_support(7);
        const OracleResult r = fixed_support_optimum(dp, m);
        const std::vector<int> idx = m.indices();
        const int p = m.count();
        for (int l = 0; l < dp.num_targets(); ++l) {
            Eigen::MatrixXcd q(p, p);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) q(i, j) = dp.qmat[static_cast<size_t>(l)](idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
            const ComplexVector a = restrict_to(dp.target_vectors[static_cast<size_t>(l)], m);
            const ComplexVector& rv = r.per_target_vectors[static_cast<size_t>(l)];
            const double ahr = (a.dot(rv)).real();  // a^H r = 1 at the optimum
            CHECK(ahr == Approx(1.0).epsilon(1e-10));
            const double d = (a.dot(q.inverse() * a)).real();  // a^H Q^-1 a
            const ComplexVector residual = q * rv - a / d;
            CHECK(residual.cwiseAbs().maxCoeff() < 1e-10 * q.norm());
        }
    }
}

TEST_CASE("oracle value lower-bounds feasible constructions and the conic solver agrees") {
    const Scenario s = random_scenario(6, 2, 2);
    const DesignProblem dp = assemble(s);
    const SelectionMask m = SelectionMask::from_indices(6, std::vector<int>{0, 2, 3, 5});
    const OracleResult oracle = fixed_support_optimum(dp, m);

    SUBCASE("feasible scaled outer products never beat it") {
        std::normal_distribution<double> dist;
        for (int trial = 0; trial < 40; ++trial) {
            double value = 0.0;
            for (int l = 0; l < dp.num_targets(); ++l) {
                const ComplexVector a = restrict_to(dp.target_vectors[static_cast<size_t>(l)], m);
                const int p = m.count();
                ComplexVector r(p);
                for (int k = 0; k < p; ++k) r(k) = {dist(gen), dist(gen)};
                const double floor = std::norm(a.dot(r));
                if (floor < 1e-12) continue;
                r /= std::sqrt(floor);  // now Tr(R a a^H) = 1
                Eigen::MatrixXcd q(p, p);
                const std::vector<int> idx = m.indices();
                for (int i = 0; i < p; ++i)
                    for (int j = 0; j < p; ++j)
                        q(i, j) = dp.qmat[static_cast<size_t>(l)](idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
                value += (r.adjoint() * q * r)(0).real();
            }
            CHECK(value >= oracle.value - 1e-9);
        }
    }
    SUBCASE("independent conic solve lands on the same value") {
        const DesignResult resolved = resolve_reduced(dp, m, SolverSettings{});
        CHECK(resolved.objective == Approx(oracle.value).epsilon(1e-5));
    }
}

TEST_CASE("rho = 0 exposes the singular support") {
    Scenario s;
    s.grid = {4, 0.5};
    s.targets = {{Angle::degrees(90.0), 1.0}};
    s.trace_reg = {0.0};  // no trace regularization: Qmat is rank deficient
    s.budget_p = 2;
    const DesignProblem dp = assemble(s);
    CHECK_THROWS_AS(fixed_support_optimum(dp, SelectionMask::all_true(4)), SingularityError);
}

TEST_CASE("enumeration over a symmetric scenario ties to the first mask") {
    Scenario s;
    s.grid = {4, 0.5};
    s.targets = {{Angle::degrees(90.0), 1.0}};  // all-ones steering: every pair ties
    s.trace_reg = {1.0};
    s.budget_p = 2;
    const DesignProblem dp = assemble(s);
    const EnumerationOutcome out = enumerate_best_serial(dp, 2, {});
    CHECK(out.best.value == Approx(0.5).epsilon(1e-12));  // 1 / (a^H a) = 1/2 per 2-subset
    CHECK(out.best.mask.bits() == "1100");                // lexicographic tie-break
    CHECK(out.worst.value == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("enumeration with the full budget reduces to one configuration") {
    const Scenario s = random_scenario(6, 2, 1);
    const DesignProblem dp = assemble(s);
    const EnumerationOutcome out = enumerate_best(dp, 6, {});
    CHECK(out.best.mask.count() == 6);
    CHECK(out.best.value == Approx(fixed_support_optimum(dp, SelectionMask::all_true(6)).value));
}

TEST_CASE("parallel enumeration equals the serial reference") {
    const Scenario s = random_scenario(10, 2, 2);
    const DesignProblem dp = assemble(s);
    EnumerationOptions opts;
    opts.keep_table = true;
    const EnumerationOutcome par = enumerate_best(dp, 4, opts);
    const EnumerationOutcome ser = enumerate_best_serial(dp, 4, opts);
    CHECK(par.best.mask == ser.best.mask);
    CHECK(par.best.value == ser.best.value);  // identical arithmetic, identical bits
    CHECK(par.worst.mask == ser.worst.mask);
    REQUIRE(par.table.size() == ser.table.size());
    for (size_t i = 0; i < par.table.size(); ++i) {
        CHECK(par.table[i].mask_bits == ser.table[i].mask_bits);
        CHECK(par.table[i].value == ser.table[i].value);
    }
}

TEST_CASE("enumeration dominance over sampled and structured masks") {
    const Scenario s = random_scenario(9, 2, 2);
    const DesignProblem dp = assemble(s);
    const int p = 4;
    const EnumerationOutcome out = enumerate_best(dp, p, {});
    const double best = out.best.value;
    const double worst = out.worst.value;

    std::vector<SelectionMask> samples = {ula_mask(9, p), nested_mask(9, p), random_mask(9, p, 5),
                                          random_mask(9, p, 17)};
    for (const SelectionMask& m : samples) {
        const double v = fixed_support_optimum(dp, m).value;
        CHECK(best <= v + 1e-12);
        CHECK(worst >= v - 1e-12);
    }
}

TEST_CASE("enumeration cap") {
    const Scenario s = random_scenario(18, 2, 1);
    const DesignProblem dp = assemble(s);
    EnumerationOptions opts;
    opts.cap = 100;
    CHECK_THROWS_AS(enumerate_best(dp, 10, opts), SizeError);
}

TEST_CASE("structured baseline layouts") {
    CHECK(ula_mask(18, 10).bits() == "111111111100000000");
    CHECK(nested_mask(12, 6).indices() == std::vector<int>{0, 1, 2, 3, 7, 11});
    // the paper grid: outer sensors at 5, 11, 17; the two that overflow pack
    // onto the largest free slots
    CHECK(nested_mask(18, 10).indices() == std::vector<int>{0, 1, 2, 3, 4, 5, 11, 15, 16, 17});
    CHECK(nested_mask(18, 10).count() == 10);

    SUBCASE("random masks are reproducible and seed-sensitive") {
        const SelectionMask a = random_mask(18, 10, 7);
        const SelectionMask b = random_mask(18, 10, 7);
        CHECK(a == b);
        CHECK(a.count() == 10);
        bool any_different = false;
        for (std::uint64_t seed = 0; seed < 8 && !any_different; ++seed)
            any_different = !(random_mask(18, 10, seed) == a);
        CHECK(any_different);
    }
    SUBCASE("bounds checking") {
        CHECK_THROWS_AS(ula_mask(4, 5), ValidationError);
        CHECK_THROWS_AS(nested_mask(4, 0), ValidationError);
    }
}

TEST_CASE("combination counting") {
    CHECK(combination_count(18, 10) == 43758);
    CHECK(combination_count(4, 2) == 6);
    CHECK(combination_count(5, 0) == 1);
    CHECK(combination_count(5, 5) == 1);
    CHECK(combination_count(3, 4) == 0);
    CHECK(combination_count(200, 100) >= 1'000'000'000LL);  // saturates, does not overflow
}
