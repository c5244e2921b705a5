#ifndef SPARSEBEAM_ORACLE_HPP
#define SPARSEBEAM_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "sparsebeam/design.hpp"
#include "sparsebeam/model.hpp"

namespace sparsebeam {

struct OracleResult {
    SelectionMask mask;
    double value = 0.0;                          // mu = 0 objective on the support
    std::vector<ComplexVector> per_target_vectors;  // r_l restricted to the support
};

// Closed-form optimum of the fixed-support design: per target
// r_l = Q^-1 a / (a^H Q^-1 a), value_l = 1 / (a^H Q^-1 a), attained at rank 1.
OracleResult fixed_support_optimum(const DesignProblem& dp, const SelectionMask& mask);

// The same optimum packaged as a DesignResult (constituents r_l r_l^H
// re-embedded into the full grid); what the baseline comparisons evaluate.
DesignResult fixed_support_design(const DesignProblem& dp, const SelectionMask& mask);

// C(n, p), saturating at a large sentinel instead of overflowing.
long long combination_count(int n, int p);

struct EnumerationRow {
    std::uint64_t mask_bits = 0;  // bit k set <=> sensor k active
    double value = 0.0;
};

struct EnumerationOptions {
    long long cap = 1'000'000;  // refuse instances with more subsets
    bool keep_table = false;    // collect the full sorted table
    int jobs = 0;               // 0 = all hardware threads; 1 = serial reference path
};

struct EnumerationOutcome {
    OracleResult best;
    OracleResult worst;
    std::vector<EnumerationRow> table;  // sorted by (value, mask lex) when kept
};

// Exhaustive scan over all P-subsets in lexicographic order; OpenMP over
// contiguous chunks of the subset sequence, min/max merge is associative so
// chunking cannot change the outcome. Ties go to the lexicographically
// smallest mask.
EnumerationOutcome enumerate_best(const DesignProblem& dp, int budget_p, const EnumerationOptions& opts = {});
// Single linear scan, the reference the chunked kernel is checked against.
EnumerationOutcome enumerate_best_serial(const DesignProblem& dp, int budget_p, const EnumerationOptions& opts = {});

// Baseline layouts used for comparison sweeps.
SelectionMask ula_mask(int n, int p);
// Two-level nested layout: ceil(p/2) dense positions, the rest at
// (n1+1)*k - 1; positions past the grid are packed onto the largest free
// indices above the dense level.
SelectionMask nested_mask(int n, int p);
SelectionMask random_mask(int n, int p, std::uint64_t seed);

}  // namespace sparsebeam

#endif
