#include "sparsebeam/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace sparsebeam {

namespace {

constexpr double kRankRatioLimit = 1e-3;  // beyond this the rank-1 projection kicks in

// Lower-triangle column-major offset of (i, j), i >= j, within an n x n triangle.
int tri_index(int n, int i, int j) { return j * n - j * (j - 1) / 2 + (i - j); }

// Strict lower triangle, i > j.
int strict_tri_index(int n, int i, int j) { return j * (n - 1) - j * (j - 1) / 2 + (i - j - 1); }

// <Q, R> objective coefficients over one Hermitian parameter block.
void add_inner_product_coeffs(const HermitianMatrix& q, int l, const SdrLayout& layout, double scale,
                              Eigen::VectorXd& out) {
    const int n = layout.n;
    for (int j = 0; j < n; ++j) {
        out(layout.re_index(l, j, j)) += scale * q(j, j).real();
        for (int i = j + 1; i < n; ++i) {
            out(layout.re_index(l, i, j)) += 2.0 * scale * q(i, j).real();
            out(layout.im_index(l, i, j)) += 2.0 * scale * q(i, j).imag();
        }
    }
}

}  // namespace

DesignProblem assemble(const Scenario& s) {
    s.validate();
    DesignProblem dp;
    dp.scenario = s;
    const int n = s.n();
    const int targets = s.num_targets();

    std::vector<ComplexVector> target_steer(targets);
    for (int l = 0; l < targets; ++l) target_steer[l] = steering_vector(s.targets[l].angle, s.grid);

    HermitianMatrix undesired_gram = HermitianMatrix::Zero(n, n);
    for (const WeightedAngle& wa : s.undesired) {
        const ComplexVector a = steering_vector(wa.angle, s.grid);
        undesired_gram += wa.weight * (a * a.adjoint());
    }

    dp.target_vectors = target_steer;
    dp.a_outer.reserve(targets);
    dp.qmat.reserve(targets);
    for (int l = 0; l < targets; ++l) {
        dp.a_outer.push_back(outer(target_steer[l]));
        HermitianMatrix q = undesired_gram;
        for (int lp = 0; lp < targets; ++lp) {
            if (lp == l) continue;
            q += s.targets[lp].weight * (target_steer[lp] * target_steer[lp].adjoint());
        }
        q += s.trace_reg[static_cast<size_t>(l)] * HermitianMatrix::Identity(n, n);
        dp.qmat.push_back(0.5 * (q + q.adjoint().eval()));
    }
    return dp;
}

ReweightState ReweightState::ones(int n, double epsilon) {
    ReweightState st;
    st.u = Eigen::MatrixXd::Ones(n, n);
    st.epsilon = epsilon;
    st.iteration = 0;
    return st;
}

ReweightState update_reweight(const ReweightState& st, const Eigen::MatrixXd& r_tilde) {
    if (r_tilde.rows() != st.u.rows() || r_tilde.cols() != st.u.cols())
        throw DimensionError("update_reweight: envelope size does not match state");
    ReweightState next;
    next.epsilon = st.epsilon;
    next.iteration = st.iteration + 1;
    next.u = (r_tilde.cwiseMax(0.0).array() + st.epsilon).inverse().matrix();
    next.u = 0.5 * (next.u + next.u.transpose().eval());
    return next;
}

void SparsityController::validate() const {
    if (!(mu_lower > 0.0) || !(mu_upper > mu_lower))
        throw ValidationError("controller: need 0 < mu_lower < mu_upper");
    if (!(gamma > 0.0)) throw ValidationError("controller.gamma: must be positive");
    if (max_bisection_steps < 1 || max_reweight_iters < 1)
        throw ValidationError("controller: iteration limits must be >= 1");
}

int SdrLayout::re_index(int l, int i, int j) const { return l * herm_params() + tri_index(n, i, j); }

int SdrLayout::im_index(int l, int i, int j) const {
    return l * herm_params() + svec_dim(n) + strict_tri_index(n, i, j);
}

int SdrLayout::rt_index(int i, int j) const { return num_targets * herm_params() + tri_index(n, i, j); }

Eigen::VectorXd sdr_objective(const DesignProblem& dp, const ReweightState& st, double mu) {
    if (mu < 0.0) throw ValidationError("mu: must be >= 0");
    const int n = dp.n();
    if (st.u.rows() != n || st.u.cols() != n)
        throw DimensionError("sdr_objective: reweight matrix size does not match grid");
    const SdrLayout layout{n, dp.num_targets()};
    Eigen::VectorXd c = Eigen::VectorXd::Zero(layout.num_vars());
    for (int l = 0; l < dp.num_targets(); ++l) add_inner_product_coeffs(dp.qmat[static_cast<size_t>(l)], l, layout, 1.0, c);
    for (int j = 0; j < n; ++j) {
        c(layout.rt_index(j, j)) += mu * st.u(j, j);
        for (int i = j + 1; i < n; ++i) c(layout.rt_index(i, j)) += 2.0 * mu * st.u(i, j);
    }
    return c;
}

ConeProgram build_sdr(const DesignProblem& dp, const ReweightState& st, double mu) {
    const int n = dp.n();
    const int targets = dp.num_targets();
    const SdrLayout layout{n, targets};
    const int nvars = layout.num_vars();
    const double r2 = std::sqrt(2.0);

    ConeProgram p;
    p.cones.blocks.push_back({ConeKind::NonNeg, targets});
    for (int l = 0; l < targets; ++l)
        for (int j = 0; j < n; ++j)
            for (int i = j; i < n; ++i) p.cones.blocks.push_back({ConeKind::SecondOrder, 3});
    for (int l = 0; l < targets; ++l) p.cones.blocks.push_back({ConeKind::PsdTriangle, 2 * n});

    const int m = p.cones.total_dim();
    p.A = RowMajorMatrixXd::Zero(m, nvars);
    p.b = Eigen::VectorXd::Zero(m);

    int row = 0;
    // directed-power floors: Tr(R_l A_l) >= 1
    for (int l = 0; l < targets; ++l) {
        const HermitianMatrix& al = dp.a_outer[static_cast<size_t>(l)];
        for (int j = 0; j < n; ++j) {
            p.A(row, layout.re_index(l, j, j)) = -al(j, j).real();
            for (int i = j + 1; i < n; ++i) {
                p.A(row, layout.re_index(l, i, j)) = -2.0 * al(i, j).real();
                p.A(row, layout.im_index(l, i, j)) = -2.0 * al(i, j).imag();
            }
        }
        p.b(row) = -1.0;
        ++row;
    }
    // envelope: (R~_{ij}, Re R_l[i][j], Im R_l[i][j]) in a second-order cone
    for (int l = 0; l < targets; ++l) {
        for (int j = 0; j < n; ++j) {
            for (int i = j; i < n; ++i) {
                p.A(row, layout.rt_index(i, j)) = -1.0;
                p.A(row + 1, layout.re_index(l, i, j)) = -1.0;
                if (i > j) p.A(row + 2, layout.im_index(l, i, j)) = -1.0;
                row += 3;
            }
        }
    }
    // PSD: slack carries svec of the real embedding [[Re, -Im], [Im, Re]]
    for (int l = 0; l < targets; ++l) {
        for (int jj = 0; jj < 2 * n; ++jj) {
            for (int ii = jj; ii < 2 * n; ++ii) {
                const double scale = ii == jj ? 1.0 : r2;
                if (ii < n) {
                    p.A(row, layout.re_index(l, ii, jj)) = -scale;
                } else if (jj < n) {
                    const int i = ii - n, j = jj;
                    if (i > j)
                        p.A(row, layout.im_index(l, i, j)) = -scale;
                    else if (i < j)
                        p.A(row, layout.im_index(l, j, i)) = scale;
                    // i == j: structural zero on the diagonal of Im
                } else {
                    p.A(row, layout.re_index(l, ii - n, jj - n)) = -scale;
                }
                ++row;
            }
        }
    }

    p.c = sdr_objective(dp, st, mu);
    return p;
}

HermitianMatrix extract_constituent(const Eigen::VectorXd& x, const SdrLayout& layout, int l) {
    const int n = layout.n;
    HermitianMatrix r(n, n);
    for (int j = 0; j < n; ++j) {
        r(j, j) = x(layout.re_index(l, j, j));
        for (int i = j + 1; i < n; ++i) {
            const std::complex<double> v(x(layout.re_index(l, i, j)), x(layout.im_index(l, i, j)));
            r(i, j) = v;
            r(j, i) = std::conj(v);
        }
    }
    return r;
}

Eigen::MatrixXd extract_envelope(const Eigen::VectorXd& x, const SdrLayout& layout) {
    const int n = layout.n;
    Eigen::MatrixXd rt(n, n);
    for (int j = 0; j < n; ++j) {
        rt(j, j) = x(layout.rt_index(j, j));
        for (int i = j + 1; i < n; ++i) {
            rt(i, j) = x(layout.rt_index(i, j));
            rt(j, i) = rt(i, j);
        }
    }
    return rt;
}

SelectionMask support_of(const Eigen::MatrixXd& r_tilde, double gamma) {
    if (r_tilde.rows() != r_tilde.cols()) throw DimensionError("support_of: square matrix required");
    const double peak = r_tilde.maxCoeff();
    if (!(peak > 0.0)) throw DegenerateError("support_of: envelope is identically zero");
    const int n = static_cast<int>(r_tilde.rows());
    std::vector<bool> active(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) active[static_cast<size_t>(k)] = r_tilde.row(k).maxCoeff() > gamma * peak;
    return SelectionMask(std::move(active));
}

SparseDesignOutcome sparse_design(const DesignProblem& dp, const SparsityController& ctrl,
                                  const ReweightState& st0, const SolverSettings& solver) {
    ctrl.validate();
    solver.validate();
    const int n = dp.n();
    const int budget = dp.scenario.budget_p;
    if (budget > n) throw ValidationError("budget_p: exceeds grid size");

    // The search only consumes support patterns; solves sitting on a
    // cardinality boundary can drift near tolerance for tens of thousands
    // of iterations without moving the support, so the search phase gets a
    // tighter iteration budget. The mu = 0 resolve keeps the full budget.
    SolverSettings search = solver;
    search.max_iters = std::min(solver.max_iters, 8000);

    ConeProgram prog = build_sdr(dp, st0, 0.5 * (ctrl.mu_lower + ctrl.mu_upper));
    ConeWorkspace workspace(prog, search);
    const SdrLayout layout{n, dp.num_targets()};

    std::vector<TrialRecord> trace;
    std::optional<ConeSolution> carry;        // most recent solution
    std::optional<ConeSolution> carry_fresh;  // last solution under U = ones; mu moves
                                              // little between trials, so this is the
                                              // natural warm start for a trial's first solve

    struct Candidate {
        SelectionMask mask;
        Eigen::MatrixXd r_tilde;
        double mu;
        int cardinality;
    };
    std::optional<Candidate> closest_above;
    std::optional<SelectionMask> exact;
    double mu_exact = 0.0;

    double lo = ctrl.mu_lower, hi = ctrl.mu_upper;
    for (int step = 1; step <= ctrl.max_bisection_steps && !exact; ++step) {
        // a collapsed bracket means every remaining trial re-solves the same
        // floats; that is exhaustion, not progress
        if (hi - lo <= 1e-9 * std::max(1.0, hi)) break;
        const double mu = 0.5 * (lo + hi);
        ReweightState st = st0;  // reweighting restarts at every trial
        std::optional<SelectionMask> prev_mask;
        Eigen::MatrixXd r_tilde;
        TrialRecord rec;
        rec.step = step;
        rec.mu = mu;

        for (int it = 1; it <= ctrl.max_reweight_iters; ++it) {
            const Eigen::VectorXd c = sdr_objective(dp, st, mu);
            const std::optional<ConeSolution>& warm = (it == 1 && carry_fresh) ? carry_fresh : carry;
            ConeSolution sol = warm ? workspace.solve(c, *warm) : workspace.solve(c);
            if (sol.status == SolveStatus::Infeasible || sol.status == SolveStatus::Unbounded)
                throw NumericError("sparse_design: solver reported " + std::string(to_string(sol.status)) +
                                   " at mu=" + std::to_string(mu));
            r_tilde = extract_envelope(sol.x, layout).cwiseMax(0.0);
            rec.reweight_iters = it;
            rec.objective = c.dot(sol.x);
            rec.primal_residual = sol.primal_residual;
            rec.dual_residual = sol.dual_residual;
            rec.gap = sol.gap;
            rec.iterations += sol.iterations;
            rec.status = to_string(sol.status);
            if (it == 1) carry_fresh = sol;
            carry = std::move(sol);

            SelectionMask mask = support_of(r_tilde, ctrl.gamma);
            if (prev_mask && mask == *prev_mask) break;  // stable support: bisection has its answer
            prev_mask = std::move(mask);
            st = update_reweight(st, r_tilde);
        }

        const SelectionMask& mask = *prev_mask;
        rec.cardinality = mask.count();
        trace.push_back(rec);

        if (rec.cardinality == budget) {
            exact = mask;
            mu_exact = mu;
        } else if (rec.cardinality > budget) {
            if (!closest_above || rec.cardinality <= closest_above->cardinality)
                closest_above = Candidate{mask, r_tilde, mu, rec.cardinality};
            lo = mu;  // not sparse enough: raise the penalty
        } else {
            hi = mu;  // overshot: relax the penalty
        }
    }

    // monotone-cardinality observation (reported, never asserted)
    std::vector<std::pair<double, int>> by_mu;
    by_mu.reserve(trace.size());
    for (const TrialRecord& t : trace) by_mu.emplace_back(t.mu, t.cardinality);
    std::sort(by_mu.begin(), by_mu.end());
    bool monotone = true;
    for (size_t i = 1; i < by_mu.size(); ++i)
        if (by_mu[i].second > by_mu[i - 1].second) monotone = false;

    if (exact)
        return {mu_exact, *exact, false, monotone, std::move(trace), workspace.stats()};

    if (!closest_above)
        throw BudgetError("sparse_design: no trial reached cardinality >= " + std::to_string(budget) +
                          "; widen the mu range");

    // trim to exactly P: drop the smallest R~ row masses, lowest index first
    std::vector<int> active = closest_above->mask.indices();
    std::vector<std::pair<double, int>> mass;
    mass.reserve(active.size());
    for (int k : active) mass.emplace_back(closest_above->r_tilde.row(k).sum(), k);
    std::sort(mass.begin(), mass.end());
    std::vector<bool> keep(static_cast<size_t>(n), false);
    for (size_t i = mass.size() - static_cast<size_t>(budget); i < mass.size(); ++i)
        keep[static_cast<size_t>(mass[i].second)] = true;
    return {closest_above->mu, SelectionMask(std::move(keep)), true, monotone, std::move(trace), workspace.stats()};
}

DesignResult resolve_reduced(const DesignProblem& dp, const SelectionMask& mask, const SolverSettings& solver) {
    solver.validate();
    const int n = dp.n();
    if (mask.size() != n) throw DimensionError("resolve_reduced: mask length does not match grid");
    const int p = mask.count();
    const std::vector<int> idx = mask.indices();
    const int targets = dp.num_targets();
    const SdrLayout reduced{p, 1};
    const double r2 = std::sqrt(2.0);

    DesignResult out{mask,
                     std::vector<HermitianMatrix>(),
                     HermitianMatrix::Zero(n, n),
                     1.0,
                     0.0,
                     std::vector<ComplexVector>(),
                     std::vector<double>(),
                     std::vector<bool>()};

    for (int l = 0; l < targets; ++l) {
        HermitianMatrix q(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) q(i, j) = dp.qmat[static_cast<size_t>(l)](idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        const ComplexVector a = restrict_to(dp.target_vectors[static_cast<size_t>(l)], mask);
        const HermitianMatrix a_out = outer(a);

        // one decoupled program: min <q, R> s.t. Tr(R a a^H) >= 1, R PSD
        ConeProgram prog;
        prog.cones.blocks.push_back({ConeKind::NonNeg, 1});
        prog.cones.blocks.push_back({ConeKind::PsdTriangle, 2 * p});
        const int m = prog.cones.total_dim();
        const int nvars = reduced.herm_params();  // no envelope block at mu = 0
        prog.A = RowMajorMatrixXd::Zero(m, nvars);
        prog.b = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(nvars);

        for (int j = 0; j < p; ++j) {
            prog.A(0, reduced.re_index(0, j, j)) = -a_out(j, j).real();
            c(reduced.re_index(0, j, j)) = q(j, j).real();
            for (int i = j + 1; i < p; ++i) {
                prog.A(0, reduced.re_index(0, i, j)) = -2.0 * a_out(i, j).real();
                prog.A(0, reduced.im_index(0, i, j)) = -2.0 * a_out(i, j).imag();
                c(reduced.re_index(0, i, j)) = 2.0 * q(i, j).real();
                c(reduced.im_index(0, i, j)) = 2.0 * q(i, j).imag();
            }
        }
        prog.b(0) = -1.0;
        int row = 1;
        for (int jj = 0; jj < 2 * p; ++jj) {
            for (int ii = jj; ii < 2 * p; ++ii) {
                const double scale = ii == jj ? 1.0 : r2;
                if (ii < p) {
                    prog.A(row, reduced.re_index(0, ii, jj)) = -scale;
                } else if (jj < p) {
                    const int i = ii - p, j = jj;
                    if (i > j)
                        prog.A(row, reduced.im_index(0, i, j)) = -scale;
                    else if (i < j)
                        prog.A(row, reduced.im_index(0, j, i)) = scale;
                } else {
                    prog.A(row, reduced.re_index(0, ii - p, jj - p)) = -scale;
                }
                ++row;
            }
        }
        prog.c = c;

        ConeSolution sol = solve(prog, solver);
        if (sol.status != SolveStatus::Optimal)
            throw NumericError("resolve_reduced: solver finished with status " + std::string(to_string(sol.status)) +
                               " for target " + std::to_string(l));

        HermitianMatrix r_reduced = extract_constituent(sol.x, reduced, 0);
        double contribution = c.dot(sol.x);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r_reduced);
        if (es.info() != Eigen::Success) throw NumericError("resolve_reduced: eigensolver failed");
        const double l1 = es.eigenvalues()(p - 1);
        const double l2 = p > 1 ? std::max(es.eigenvalues()(p - 2), 0.0) : 0.0;
        if (!(l1 > 0.0)) throw DegenerateError("resolve_reduced: constituent collapsed to zero");
        const double ratio = l2 / l1;

        EigPair pe = principal_eigpair(r_reduced);
        double lead = pe.value;
        bool fallback = false;
        if (ratio > kRankRatioLimit) {
            // rank-1 projection; restore Tr(R A) >= 1 by rescaling if needed
            fallback = true;
            HermitianMatrix r1 = lead * (pe.vector * pe.vector.adjoint());
            const double t = (r1 * a_out).trace().real();
            if (t < 1.0 && t > 0.0) {
                r1 /= t;
                lead /= t;
            }
            r_reduced = r1;
            contribution = (r_reduced * q).trace().real();
        }

        HermitianMatrix full = HermitianMatrix::Zero(n, n);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) full(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]) = r_reduced(i, j);
        ComplexVector r_vec = ComplexVector::Zero(n);
        const double amp = std::sqrt(lead);
        for (int i = 0; i < p; ++i) r_vec(idx[static_cast<size_t>(i)]) = amp * pe.vector(i);

        out.constituents.push_back(full);
        out.composite += full;
        out.objective += contribution;
        out.rank1_vectors.push_back(std::move(r_vec));
        out.rank_ratios.push_back(ratio);
        out.rank1_fallback.push_back(fallback);
    }
    out.composite = 0.5 * (out.composite + out.composite.adjoint().eval());
    return out;
}

DesignResult scale_power(DesignResult result, double total_power) {
    if (!(total_power > 0.0)) throw ValidationError("total_power: must be positive");
    const double tr = result.composite.trace().real();
    if (!(tr > 0.0)) throw DegenerateError("scale_power: composite has nonpositive trace");
    result.alpha = total_power / tr;
    return result;
}

}  // namespace sparsebeam
