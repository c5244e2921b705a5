#ifndef SPARSEBEAM_CONE_HPP
#define SPARSEBEAM_CONE_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <vector>

#include "sparsebeam/errors.hpp"
#include "sparsebeam/hermitian.hpp"

namespace sparsebeam {

enum class ConeKind { Zero, NonNeg, SecondOrder, PsdTriangle };

struct ConeBlock {
    ConeKind kind;
    int dim;  // slack length; for PsdTriangle the matrix dimension
};

// Slack entries a block occupies: d(d+1)/2 for PsdTriangle, dim otherwise.
int block_slack_dim(const ConeBlock& blk);

struct ConeSpec {
    std::vector<ConeBlock> blocks;

    int total_dim() const;
    void validate() const;
};

// sqrt(2)-scaled lower-triangle vectorization, column-major, so that
// dot(svec(X), svec(Y)) == Frobenius inner product <X, Y>.
int svec_dim(int d);
Eigen::VectorXd svec(const RealSymmetric& x);
RealSymmetric unsvec(const Eigen::VectorXd& v, int d);

struct SolverSettings {
    int max_iters = 50000;
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    double over_relaxation = 1.6;  // in (1, 2)
    bool scaling_enabled = true;   // Ruiz-style diagonal equilibration
    int check_interval = 25;       // iterations between residual checks

    void validate() const;
};

enum class SolveStatus { Optimal, MaxIters, Infeasible, Unbounded };

const char* to_string(SolveStatus s);

struct ConeSolution {
    SolveStatus status = SolveStatus::MaxIters;
    Eigen::VectorXd x;  // primal
    Eigen::VectorXd y;  // dual, in K*; c + A^T y ~ 0 at optimum
    Eigen::VectorXd s;  // slack, in K; A x + s = b at optimum
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;  // c^T x + b^T y
    long iterations = 0;
};

using RowMajorMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Standard form: minimize c^T x  s.t.  A x + s = b,  s in K.
struct ConeProgram {
    Eigen::VectorXd c;
    RowMajorMatrixXd A;
    Eigen::VectorXd b;
    ConeSpec cones;

    void validate() const;
    // Plain-text dump (variables, A row-major, b, c, cone list) for
    // external cross-checking.
    void dump(std::ostream& os) const;
};

// Per-block Euclidean projection onto K. OpenMP across blocks; the serial
// variant is the reference the parallel one is tested against.
Eigen::VectorXd project_cone(const Eigen::VectorXd& s, const ConeSpec& cones);
Eigen::VectorXd project_cone_serial(const Eigen::VectorXd& s, const ConeSpec& cones);
// Projection onto the dual cone K* (Zero rows become free).
Eigen::VectorXd project_dual_cone(const Eigen::VectorXd& y, const ConeSpec& cones);

// ADMM splitting solver with a cached factorization of the reduced KKT
// matrix sigma*I + A^T diag(rho) A. One workspace supports repeated solves
// against the same (A, b, cones) with changing objective c; the sparsity
// search exploits this, since only mu and U move between trials.
class ConeWorkspace {
  public:
    ConeWorkspace(const ConeProgram& p, const SolverSettings& settings);
    ~ConeWorkspace();
    ConeWorkspace(ConeWorkspace&&) noexcept;
    ConeWorkspace& operator=(ConeWorkspace&&) noexcept;

    ConeSolution solve(const Eigen::VectorXd& c);
    ConeSolution solve(const Eigen::VectorXd& c, const ConeSolution& warm);

    struct Stats {
        long total_iterations = 0;
        int solves = 0;
        int refactorizations = 0;
    };
    const Stats& stats() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot solve, deterministic (fixed zero initialization).
ConeSolution solve(const ConeProgram& p, const SolverSettings& settings);

}  // namespace sparsebeam

#endif
