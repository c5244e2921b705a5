#ifndef SPARSEBEAM_DESIGN_HPP
#define SPARSEBEAM_DESIGN_HPP

#include <string>
#include <vector>

#include "sparsebeam/cone.hpp"
#include "sparsebeam/hermitian.hpp"
#include "sparsebeam/model.hpp"

namespace sparsebeam {

// Per-target data of the design objective: A_l = a_l a_l^H and
// Qmat_l = sum_q w_q a_q a_q^H + sum_{l'!=l} w_l' a_l' a_l'^H + rho_l I.
struct DesignProblem {
    Scenario scenario;
    std::vector<ComplexVector> target_vectors;  // a_l
    std::vector<HermitianMatrix> a_outer;       // A_l, PSD rank 1, trace n
    std::vector<HermitianMatrix> qmat;          // Qmat_l, PSD (PD when rho_l > 0)

    int n() const { return scenario.n(); }
    int num_targets() const { return scenario.num_targets(); }
};

DesignProblem assemble(const Scenario& s);

// Reweighting state U, updated as U <- 1/(R~ + epsilon) entrywise.
struct ReweightState {
    Eigen::MatrixXd u;
    double epsilon = 0.05;
    int iteration = 0;

    static ReweightState ones(int n, double epsilon = 0.05);
};

ReweightState update_reweight(const ReweightState& st, const Eigen::MatrixXd& r_tilde);

struct SparsityController {
    double mu_lower = 0.01;
    double mu_upper = 3.0;
    double gamma = 1e-5;  // relative sparsity threshold
    int max_bisection_steps = 40;
    int max_reweight_iters = 12;

    void validate() const;
};

// Variable layout of the SDR: for each target an n x n Hermitian matrix
// (real lower triangle column-major, then strict-lower imaginary parts),
// then the shared nonnegative envelope R~ (lower triangle column-major).
struct SdrLayout {
    int n = 0;
    int num_targets = 0;

    int herm_params() const { return n * n; }
    int re_index(int l, int i, int j) const;  // i >= j
    int im_index(int l, int i, int j) const;  // i > j
    int rt_index(int i, int j) const;         // i >= j
    int num_vars() const { return num_targets * herm_params() + svec_dim(n); }
};

// The rank-relaxed group-sparse program: minimize
//   sum_l <Qmat_l, R_l> + mu <U, R~>
// s.t. Tr(R_l A_l) >= 1, R~_{ij} >= |R_l[i][j]|, R_l PSD.
ConeProgram build_sdr(const DesignProblem& dp, const ReweightState& st, double mu);
// Objective vector alone; the constraint data does not depend on (mu, U),
// which is what lets one ConeWorkspace serve the whole sparsity search.
Eigen::VectorXd sdr_objective(const DesignProblem& dp, const ReweightState& st, double mu);

HermitianMatrix extract_constituent(const Eigen::VectorXd& x, const SdrLayout& layout, int l);
Eigen::MatrixXd extract_envelope(const Eigen::VectorXd& x, const SdrLayout& layout);

// Sensor k active iff its R~ row max exceeds gamma * max-entry(R~).
SelectionMask support_of(const Eigen::MatrixXd& r_tilde, double gamma);

struct TrialRecord {
    int step = 0;
    double mu = 0.0;
    int reweight_iters = 0;
    int cardinality = 0;
    double objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    long iterations = 0;
    std::string status;
};

struct SparseDesignOutcome {
    double mu_final;
    SelectionMask mask;
    bool trimmed;                   // exact-P fallback was applied
    bool cardinality_monotone;      // observed across the bisection trace
    std::vector<TrialRecord> trace;
    ConeWorkspace::Stats solver_stats;
};

// Bisection on mu (Table-style search): inner reweighting until the
// thresholded mask is stable, raise mu when too many sensors survive,
// lower it when too few; on exhaustion trim the closest-from-above mask
// to exactly P by dropping the smallest R~ row masses (lowest index first).
SparseDesignOutcome sparse_design(const DesignProblem& dp, const SparsityController& ctrl,
                                  const ReweightState& st0, const SolverSettings& solver);

struct DesignResult {
    SelectionMask mask;
    std::vector<HermitianMatrix> constituents;  // full n x n, zero off support
    HermitianMatrix composite;                  // sum of constituents
    double alpha = 1.0;                         // total-power scale
    double objective = 0.0;                     // sum_l <Qmat_l, R_l>
    std::vector<ComplexVector> rank1_vectors;   // r_l = sqrt(lambda1) v, full length
    std::vector<double> rank_ratios;            // lambda2/lambda1 per constituent
    std::vector<bool> rank1_fallback;           // projection fallback applied
};

// mu = 0 resolve on a fixed support; decouples into one PSD program per
// target, re-embedded into the full grid afterwards.
DesignResult resolve_reduced(const DesignProblem& dp, const SelectionMask& mask, const SolverSettings& solver);

// alpha such that alpha * trace(composite) = total_power.
DesignResult scale_power(DesignResult result, double total_power);

}  // namespace sparsebeam

#endif
