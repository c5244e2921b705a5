#include "sparsebeam/cone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

namespace sparsebeam {

namespace {

// Internal constants of the splitting scheme; SolverSettings carries only
// the user-facing knobs.
constexpr double kSigma = 1e-6;           // primal regularization
constexpr double kRhoInit = 0.1;          // initial penalty
constexpr double kRhoZeroFactor = 1e3;    // extra weight on Zero-cone rows
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoTrigger = 5.0;       // residual imbalance that triggers an update
constexpr double kRhoMaxStep = 10.0;      // bounded update ratio
constexpr double kGapRhoStep = 3.0;       // penalty raise when only the gap lags
constexpr int kGapBumpLimit = 8;          // gap-driven raises per solve
constexpr int kRhoMinSpacing = 100;       // iterations between penalty updates
constexpr int kRuizPasses = 10;
constexpr double kEpsInfeas = 1e-5;       // certificate tolerance (best effort)
constexpr double kTiny = 1e-12;

double inf_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

struct SparseRows {
    std::vector<int> indptr;   // size rows+1
    std::vector<int> indices;  // column of each stored entry
    std::vector<double> data;
    int rows = 0, cols = 0;

    static SparseRows from_dense(const RowMajorMatrixXd& a) {
        SparseRows s;
        s.rows = static_cast<int>(a.rows());
        s.cols = static_cast<int>(a.cols());
        s.indptr.assign(static_cast<size_t>(s.rows) + 1, 0);
        for (int i = 0; i < s.rows; ++i) {
            for (int j = 0; j < s.cols; ++j) {
                if (a(i, j) != 0.0) {
                    s.indices.push_back(j);
                    s.data.push_back(a(i, j));
                }
            }
            s.indptr[static_cast<size_t>(i) + 1] = static_cast<int>(s.indices.size());
        }
        return s;
    }

    SparseRows transposed() const {
        SparseRows t;
        t.rows = cols;
        t.cols = rows;
        t.indptr.assign(static_cast<size_t>(cols) + 1, 0);
        for (int c : indices) t.indptr[static_cast<size_t>(c) + 1]++;
        for (int j = 0; j < cols; ++j) t.indptr[static_cast<size_t>(j) + 1] += t.indptr[static_cast<size_t>(j)];
        t.indices.resize(indices.size());
        t.data.resize(data.size());
        std::vector<int> fill(t.indptr.begin(), t.indptr.end() - 1);
        for (int i = 0; i < rows; ++i) {
            for (int k = indptr[static_cast<size_t>(i)]; k < indptr[static_cast<size_t>(i) + 1]; ++k) {
                int j = indices[static_cast<size_t>(k)];
                int pos = fill[static_cast<size_t>(j)]++;
                t.indices[static_cast<size_t>(pos)] = i;
                t.data[static_cast<size_t>(pos)] = data[static_cast<size_t>(k)];
            }
        }
        return t;
    }

    // out = M v; each output entry is one serial dot product, so results do
    // not depend on thread count.
    void multiply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
        out.resize(rows);
        for (int i = 0; i < rows; ++i) {
            double acc = 0.0;
            for (int k = indptr[static_cast<size_t>(i)]; k < indptr[static_cast<size_t>(i) + 1]; ++k)
                acc += data[static_cast<size_t>(k)] * v(indices[static_cast<size_t>(k)]);
            out(i) = acc;
        }
    }
};

struct BlockLayout {
    ConeKind kind;
    int dim;     // matrix dim for PsdTriangle
    int offset;  // start inside the slack vector
    int len;     // slack entries
};

std::vector<BlockLayout> layout_blocks(const ConeSpec& cones) {
    std::vector<BlockLayout> out;
    int off = 0;
    for (const ConeBlock& b : cones.blocks) {
        int len = block_slack_dim(b);
        out.push_back({b.kind, b.dim, off, len});
        off += len;
    }
    return out;
}

void project_block(const BlockLayout& blk, const double* in, double* out, bool dual) {
    switch (blk.kind) {
        case ConeKind::Zero:
            if (dual) {  // dual of {0} is the free cone
                std::copy(in, in + blk.len, out);
            } else {
                std::fill(out, out + blk.len, 0.0);
            }
            break;
        case ConeKind::NonNeg:
            for (int i = 0; i < blk.len; ++i) out[i] = std::max(in[i], 0.0);
            break;
        case ConeKind::SecondOrder: {
            const double t = in[0];
            double nz = 0.0;
            for (int i = 1; i < blk.len; ++i) nz += in[i] * in[i];
            nz = std::sqrt(nz);
            if (nz <= t) {
                std::copy(in, in + blk.len, out);
            } else if (nz <= -t) {
                std::fill(out, out + blk.len, 0.0);
            } else {
                const double beta = 0.5 * (nz + t);
                out[0] = beta;
                const double scale = beta / nz;
                for (int i = 1; i < blk.len; ++i) out[i] = scale * in[i];
            }
            break;
        }
        case ConeKind::PsdTriangle: {
            Eigen::Map<const Eigen::VectorXd> v(in, blk.len);
            RealSymmetric m = unsvec(v, blk.dim);
            Eigen::VectorXd proj = svec(project_psd(m));
            std::copy(proj.data(), proj.data() + blk.len, out);
            break;
        }
    }
}

Eigen::VectorXd project_impl(const Eigen::VectorXd& s, const ConeSpec& cones, bool dual, bool parallel) {
    const std::vector<BlockLayout> blocks = layout_blocks(cones);
    if (!blocks.empty() && blocks.back().offset + blocks.back().len != s.size())
        throw DimensionError("project_cone: slack length does not match cone spec");
    if (blocks.empty() && s.size() != 0)
        throw DimensionError("project_cone: slack length does not match cone spec");
    Eigen::VectorXd out(s.size());
    const int nb = static_cast<int>(blocks.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < nb; ++i)
            project_block(blocks[static_cast<size_t>(i)], s.data() + blocks[static_cast<size_t>(i)].offset,
                          out.data() + blocks[static_cast<size_t>(i)].offset, dual);
    } else {
        for (int i = 0; i < nb; ++i)
            project_block(blocks[static_cast<size_t>(i)], s.data() + blocks[static_cast<size_t>(i)].offset,
                          out.data() + blocks[static_cast<size_t>(i)].offset, dual);
    }
    return out;
}

}  // namespace

int block_slack_dim(const ConeBlock& blk) {
    return blk.kind == ConeKind::PsdTriangle ? svec_dim(blk.dim) : blk.dim;
}

int ConeSpec::total_dim() const {
    int total = 0;
    for (const ConeBlock& b : blocks) total += block_slack_dim(b);
    return total;
}

void ConeSpec::validate() const {
    for (const ConeBlock& b : blocks) {
        if (b.dim < 1) throw DimensionError("cone block dimension must be >= 1");
        if (b.kind == ConeKind::SecondOrder && b.dim < 2)
            throw DimensionError("second-order cone blocks need dimension >= 2");
    }
}

int svec_dim(int d) { return d * (d + 1) / 2; }

Eigen::VectorXd svec(const RealSymmetric& x) {
    const int d = static_cast<int>(x.rows());
    Eigen::VectorXd v(svec_dim(d));
    const double r2 = std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < d; ++j) {
        v(k++) = x(j, j);
        for (int i = j + 1; i < d; ++i) v(k++) = r2 * x(i, j);
    }
    return v;
}

RealSymmetric unsvec(const Eigen::VectorXd& v, int d) {
    if (v.size() != svec_dim(d)) throw DimensionError("unsvec: length does not match matrix dimension");
    RealSymmetric x(d, d);
    const double inv_r2 = 1.0 / std::sqrt(2.0);
    int k = 0;
    for (int j = 0; j < d; ++j) {
        x(j, j) = v(k++);
        for (int i = j + 1; i < d; ++i) {
            const double val = inv_r2 * v(k++);
            x(i, j) = val;
            x(j, i) = val;
        }
    }
    return x;
}

void SolverSettings::validate() const {
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0))
        throw ValidationError("solver.eps_abs/eps_rel: must be positive");
    if (!(over_relaxation > 1.0) || !(over_relaxation < 2.0))
        throw ValidationError("solver.over_relaxation: must lie in (1, 2)");
    if (max_iters < 1) throw ValidationError("solver.max_iters: must be >= 1");
    if (check_interval < 1) throw ValidationError("solver.check_interval: must be >= 1");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

void ConeProgram::validate() const {
    cones.validate();
    const int m = cones.total_dim();
    if (A.rows() != m || b.size() != m)
        throw DimensionError("cone program: rows(A)=" + std::to_string(A.rows()) + ", len(b)=" +
                             std::to_string(b.size()) + " must both equal total slack dimension " + std::to_string(m));
    if (A.cols() != c.size())
        throw DimensionError("cone program: cols(A) != len(c)");
    if (!A.allFinite() || !b.allFinite() || !c.allFinite())
        throw ValidationError("cone program: entries must be finite");
}

void ConeProgram::dump(std::ostream& os) const {
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    os << "cone_program\nvariables " << c.size() << "\nrows " << A.rows() << "\ncones";
    for (const ConeBlock& blk : cones.blocks) {
        switch (blk.kind) {
            case ConeKind::Zero: os << " zero:"; break;
            case ConeKind::NonNeg: os << " nonneg:"; break;
            case ConeKind::SecondOrder: os << " soc:"; break;
            case ConeKind::PsdTriangle: os << " psd:"; break;
        }
        os << blk.dim;
    }
    os << "\nc";
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        os << ' ';
        put(c(j));
    }
    os << "\nb";
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        os << ' ';
        put(b(i));
    }
    os << "\nA\n";
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (j) os << ' ';
            put(A(i, j));
        }
        os << '\n';
    }
}

Eigen::VectorXd project_cone(const Eigen::VectorXd& s, const ConeSpec& cones) {
    return project_impl(s, cones, /*dual=*/false, /*parallel=*/true);
}

Eigen::VectorXd project_cone_serial(const Eigen::VectorXd& s, const ConeSpec& cones) {
    return project_impl(s, cones, /*dual=*/false, /*parallel=*/false);
}

Eigen::VectorXd project_dual_cone(const Eigen::VectorXd& y, const ConeSpec& cones) {
    return project_impl(y, cones, /*dual=*/true, /*parallel=*/true);
}

struct ConeWorkspace::Impl {
    int n = 0, m = 0;
    SolverSettings settings;
    ConeSpec cones;
    std::vector<BlockLayout> blocks;

    // original data (unscaled)
    RowMajorMatrixXd A;
    Eigen::VectorXd b, c_current;

    // equilibration
    Eigen::VectorXd d_scale, e_scale;  // x = D x_hat, s = E^-1 s_hat
    RowMajorMatrixXd A_hat;
    Eigen::VectorXd b_hat;
    SparseRows rows_hat, cols_hat;  // A_hat and A_hat^T

    double norm_a_max = 0.0;

    // penalty and cached factorization
    double rho_bar = kRhoInit;
    Eigen::VectorXd rho;  // per row
    long last_rho_update = 0;

    // sigma*I + A^T diag(rho) A is diagonal plus one rank-1 term per dense
    // row whenever every other row is a single-entry selector (true for
    // every SDR program this project builds); then a Woodbury solve
    // replaces the dense factorization.
    bool woodbury = false;
    std::vector<int> dense_rows;
    Eigen::VectorXd kkt_diag_inv;      // 1 / d
    Eigen::MatrixXd w_g;               // n x k, the scaled dense rows
    Eigen::MatrixXd w_gd;              // (G ./ d)
    Eigen::LLT<Eigen::MatrixXd> w_llt; // I_k + G^T (G ./ d)
    Eigen::LLT<Eigen::MatrixXd> llt;   // dense fallback

    Stats stat;

    explicit Impl(const ConeProgram& p, const SolverSettings& s) : settings(s) {
        p.validate();
        s.validate();
        cones = p.cones;
        blocks = layout_blocks(cones);
        n = static_cast<int>(p.c.size());
        m = static_cast<int>(p.A.rows());
        A = p.A;
        b = p.b;
        norm_a_max = (m > 0 && n > 0) ? A.cwiseAbs().maxCoeff() : 0.0;
        equilibrate();
        rows_hat = SparseRows::from_dense(A_hat);
        cols_hat = rows_hat.transposed();
        detect_structure();
        set_rho(kRhoInit);
    }

    void detect_structure() {
        dense_rows.clear();
        for (int i = 0; i < m; ++i) {
            const int nnz = rows_hat.indptr[static_cast<size_t>(i) + 1] - rows_hat.indptr[static_cast<size_t>(i)];
            if (nnz > 1) dense_rows.push_back(i);
        }
        woodbury = !dense_rows.empty() && static_cast<int>(dense_rows.size()) <= std::max(8, n / 16) &&
                   static_cast<long long>(n) > 64;
        if (dense_rows.empty() && n > 0) woodbury = true;  // purely diagonal
    }

    void equilibrate() {
        d_scale = Eigen::VectorXd::Ones(n);
        e_scale = Eigen::VectorXd::Ones(m);
        A_hat = A;
        if (settings.scaling_enabled && m > 0 && n > 0) {
            for (int pass = 0; pass < kRuizPasses; ++pass) {
                Eigen::VectorXd dc(n), de(m);
                for (int j = 0; j < n; ++j) {
                    double cn = A_hat.col(j).cwiseAbs().maxCoeff();
                    dc(j) = cn > kTiny ? 1.0 / std::sqrt(cn) : 1.0;
                }
                for (int i = 0; i < m; ++i) {
                    double rn = A_hat.row(i).cwiseAbs().maxCoeff();
                    de(i) = rn > kTiny ? 1.0 / std::sqrt(rn) : 1.0;
                }
                // SOC/PSD blocks need one uniform row scale to stay cones
                for (const BlockLayout& blk : blocks) {
                    if (blk.kind == ConeKind::SecondOrder || blk.kind == ConeKind::PsdTriangle) {
                        double logsum = 0.0;
                        for (int i = 0; i < blk.len; ++i) logsum += std::log(de(blk.offset + i));
                        const double g = std::exp(logsum / blk.len);
                        for (int i = 0; i < blk.len; ++i) de(blk.offset + i) = g;
                    }
                }
                A_hat = de.asDiagonal() * A_hat * dc.asDiagonal();
                d_scale = d_scale.cwiseProduct(dc);
                e_scale = e_scale.cwiseProduct(de);
            }
        }
        b_hat = e_scale.cwiseProduct(b);
    }

    void set_rho(double new_rho_bar) {
        rho_bar = std::clamp(new_rho_bar, kRhoMin, kRhoMax);
        rho.resize(m);
        for (const BlockLayout& blk : blocks) {
            const double r = blk.kind == ConeKind::Zero ? kRhoZeroFactor * rho_bar : rho_bar;
            for (int i = 0; i < blk.len; ++i) rho(blk.offset + i) = r;
        }
        factorize();
    }

    void factorize() {
        if (woodbury) {
            Eigen::VectorXd d = Eigen::VectorXd::Constant(n, kSigma);
            for (int i = 0; i < m; ++i) {
                const int begin = rows_hat.indptr[static_cast<size_t>(i)];
                if (rows_hat.indptr[static_cast<size_t>(i) + 1] - begin != 1) continue;
                const double v = rows_hat.data[static_cast<size_t>(begin)];
                d(rows_hat.indices[static_cast<size_t>(begin)]) += rho(i) * v * v;
            }
            kkt_diag_inv = d.cwiseInverse();
            const int k = static_cast<int>(dense_rows.size());
            w_g.resize(n, k);
            for (int c = 0; c < k; ++c) {
                const int i = dense_rows[static_cast<size_t>(c)];
                Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
                for (int kk = rows_hat.indptr[static_cast<size_t>(i)]; kk < rows_hat.indptr[static_cast<size_t>(i) + 1]; ++kk)
                    col(rows_hat.indices[static_cast<size_t>(kk)]) = rows_hat.data[static_cast<size_t>(kk)];
                w_g.col(c) = std::sqrt(rho(i)) * col;
            }
            w_gd = kkt_diag_inv.asDiagonal() * w_g;
            Eigen::MatrixXd cap = Eigen::MatrixXd::Identity(k, k);
            cap.noalias() += w_g.transpose() * w_gd;
            w_llt.compute(cap);
            if (k > 0 && w_llt.info() != Eigen::Success)
                throw NumericError("cone solver: Woodbury capacitance factorization failed");
        } else {
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n, n);
            // sigma*I + A^T diag(rho) A accumulated from sparse rows
            for (int i = 0; i < m; ++i) {
                const double r = rho(i);
                for (int k = rows_hat.indptr[static_cast<size_t>(i)]; k < rows_hat.indptr[static_cast<size_t>(i) + 1]; ++k) {
                    const int j1 = rows_hat.indices[static_cast<size_t>(k)];
                    const double v1 = r * rows_hat.data[static_cast<size_t>(k)];
                    for (int k2 = rows_hat.indptr[static_cast<size_t>(i)]; k2 <= k; ++k2) {
                        const int j2 = rows_hat.indices[static_cast<size_t>(k2)];
                        kkt(j1, j2) += v1 * rows_hat.data[static_cast<size_t>(k2)];
                    }
                }
            }
            kkt.diagonal().array() += kSigma;
            llt.compute(kkt.selfadjointView<Eigen::Lower>());
            if (llt.info() != Eigen::Success)
                throw NumericError("cone solver: factorization of the reduced KKT matrix failed");
        }
        stat.refactorizations++;
    }

    void kkt_solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& out) const {
        if (woodbury) {
            out = kkt_diag_inv.cwiseProduct(rhs);
            const int k = static_cast<int>(dense_rows.size());
            if (k > 0) {
                const Eigen::VectorXd t = w_llt.solve(w_g.transpose() * out);
                out.noalias() -= w_gd * t;
            }
        } else {
            out = llt.solve(rhs);
        }
    }

    struct Residuals {
        double prim = 0.0, dual = 0.0, gap = 0.0;
        double prim_tol = 0.0, dual_tol = 0.0, gap_tol = 0.0;
        double prim_rel = 0.0, dual_rel = 0.0;
        bool optimal() const { return prim <= prim_tol && dual <= dual_tol && std::abs(gap) <= gap_tol; }
        bool residuals_settled() const { return prim <= 0.25 * prim_tol && dual <= 0.25 * dual_tol; }
    };

    // Residuals from scratch against the unscaled data; the matvecs run on
    // the sparse scaled copy and are unscaled analytically.
    Residuals residuals(const Eigen::VectorXd& x, const Eigen::VectorXd& s, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& x_hat, const Eigen::VectorXd& y_hat, double gamma,
                        Eigen::VectorXd& buf_m, Eigen::VectorXd& buf_n) const {
        Residuals r;
        rows_hat.multiply(x_hat, buf_m);  // A x = E^-1 (A_hat x_hat)
        const Eigen::VectorXd ax = buf_m.cwiseQuotient(e_scale);
        cols_hat.multiply(y_hat, buf_n);  // A^T y = -(1/gamma) D^-1 (A_hat^T y_hat)
        const Eigen::VectorXd aty = -(1.0 / gamma) * buf_n.cwiseQuotient(d_scale);
        const double norm_ax = inf_norm(ax);
        const double norm_s = inf_norm(s);
        const double norm_b = inf_norm(b);
        const double norm_c = inf_norm(c_current);
        const double norm_aty = inf_norm(aty);
        r.prim = inf_norm(ax + s - b);
        r.dual = inf_norm(c_current + aty);
        const double ctx = c_current.dot(x);
        const double bty = b.dot(y);
        r.gap = ctx + bty;
        r.prim_tol = settings.eps_abs + settings.eps_rel * std::max({norm_ax, norm_s, norm_b});
        r.dual_tol = settings.eps_abs + settings.eps_rel * std::max(norm_c, norm_aty);
        r.gap_tol = settings.eps_abs + settings.eps_rel * std::max(std::abs(ctx), std::abs(bty));
        r.prim_rel = r.prim / std::max({norm_ax, norm_s, norm_b, 1.0});
        r.dual_rel = r.dual / std::max({norm_c, norm_aty, 1.0});
        return r;
    }

    bool primal_infeasible(const Eigen::VectorXd& dy_hat, double gamma, Eigen::VectorXd& buf_n) const {
        const Eigen::VectorXd dy = -(1.0 / gamma) * e_scale.cwiseProduct(dy_hat);
        const double ny = inf_norm(dy);
        if (ny <= 1e-10) return false;
        cols_hat.multiply(dy_hat, buf_n);
        const Eigen::VectorXd aty = -(1.0 / gamma) * buf_n.cwiseQuotient(d_scale);
        if (inf_norm(aty) > kEpsInfeas * ny * std::max(1.0, norm_a_max)) return false;
        if (b.dot(dy) >= -kEpsInfeas * ny) return false;
        Eigen::VectorXd proj = project_dual_cone(dy, cones);
        return inf_norm(dy - proj) <= kEpsInfeas * ny;
    }

    bool dual_infeasible(const Eigen::VectorXd& dx_hat, Eigen::VectorXd& buf_m) const {
        const Eigen::VectorXd dx = d_scale.cwiseProduct(dx_hat);
        const double nx = inf_norm(dx);
        if (nx <= 1e-10) return false;
        if (c_current.dot(dx) >= -kEpsInfeas * nx) return false;
        rows_hat.multiply(dx_hat, buf_m);
        const Eigen::VectorXd dir = -buf_m.cwiseQuotient(e_scale);  // s moves along -A dx, must stay in K
        Eigen::VectorXd proj = project_cone_serial(dir, cones);
        return inf_norm(dir - proj) <= kEpsInfeas * std::max(nx, inf_norm(dir));
    }

    ConeSolution run(const Eigen::VectorXd& c, const ConeSolution* warm) {
        if (c.size() != n) throw DimensionError("cone solve: objective length mismatch");
        if (!c.allFinite()) throw ValidationError("cone solve: objective entries must be finite");
        c_current = c;
        stat.solves++;

        // per-solve cost scaling on top of the fixed equilibration
        const Eigen::VectorXd dc = d_scale.cwiseProduct(c);
        double gamma = 1.0;
        const double cn = inf_norm(dc);
        if (cn > kTiny) gamma = 1.0 / std::clamp(cn, 1e-6, 1e6);
        const Eigen::VectorXd c_hat = gamma * dc;

        Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd s_hat = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd y_hat = Eigen::VectorXd::Zero(m);  // internal sign: reported dual is -y_hat
        if (warm != nullptr && warm->x.size() == n && warm->s.size() == m && warm->y.size() == m) {
            x_hat = warm->x.cwiseQuotient(d_scale);
            s_hat = e_scale.cwiseProduct(warm->s);
            y_hat = -(gamma / 1.0) * warm->y.cwiseQuotient(e_scale);
        }

        Eigen::VectorXd w1(m), rhs(n), x_tilde(n), ax(m), s_tilde(m), u(m), w(m);
        Eigen::VectorXd x_prev(n), y_prev(m);
        Eigen::VectorXd buf_m(m), buf_n(n);
        const double alpha = settings.over_relaxation;

        ConeSolution sol;
        long iter = 0;
        auto finalize = [&](SolveStatus st, const Residuals& r) {
            sol.status = st;
            sol.iterations = iter;
            sol.primal_residual = r.prim;
            sol.dual_residual = r.dual;
            sol.gap = r.gap;
            stat.total_iterations += iter;
            return sol;
        };

        Residuals res;
        double gap_at_last_bump = 0.0;  // later bumps need a stagnant gap
        int gap_bumps = 0;
        while (iter < settings.max_iters) {
            ++iter;
            x_prev = x_hat;
            y_prev = y_hat;

            // prox step on the affine constraint: solve for x_tilde, s_tilde = b - A x_tilde
            w1 = rho.cwiseProduct(b_hat - s_hat) + y_hat;
            cols_hat.multiply(w1, rhs);
            rhs.noalias() += kSigma * x_hat - c_hat;
            kkt_solve(rhs, x_tilde);
            rows_hat.multiply(x_tilde, ax);
            s_tilde = b_hat - ax;

            x_hat = alpha * x_tilde + (1.0 - alpha) * x_hat;
            u = alpha * s_tilde + (1.0 - alpha) * s_hat;
            w = u + y_hat.cwiseQuotient(rho);
            s_hat = project_cone(w, cones);
            y_hat += rho.cwiseProduct(u - s_hat);

            if (iter % settings.check_interval == 0 || iter == settings.max_iters) {
                sol.x = d_scale.cwiseProduct(x_hat);
                sol.s = s_hat.cwiseQuotient(e_scale);
                sol.y = -(1.0 / gamma) * e_scale.cwiseProduct(y_hat);
                if (!sol.x.allFinite() || !sol.s.allFinite() || !sol.y.allFinite())
                    throw NumericError("cone solver: NaN/Inf in iterates at iteration " + std::to_string(iter), iter);
                res = residuals(sol.x, sol.s, sol.y, x_hat, y_hat, gamma, buf_m, buf_n);
                static const bool debug = std::getenv("SPARSEBEAM_SOLVER_DEBUG") != nullptr;
                if (debug && iter % (settings.check_interval * 20) == 0)
                    std::fprintf(stderr, "  iter %6ld rho %.3g rp %.3e (%.3e) rd %.3e (%.3e) gap %.3e (%.3e)\n",
                                 iter, rho_bar, res.prim, res.prim_tol, res.dual, res.dual_tol, res.gap, res.gap_tol);
                if (res.optimal()) return finalize(SolveStatus::Optimal, res);

                if (primal_infeasible(y_hat - y_prev, gamma, buf_n)) return finalize(SolveStatus::Infeasible, res);
                if (dual_infeasible(x_hat - x_prev, buf_m)) return finalize(SolveStatus::Unbounded, res);

                if (iter - last_rho_update >= kRhoMinSpacing && iter < settings.max_iters) {
                    if (res.residuals_settled() && std::abs(res.gap) > res.gap_tol &&
                        std::abs(res.gap) > 0.5 * gap_at_last_bump && gap_bumps < kGapBumpLimit) {
                        // feasibility converged but complementarity stalls: raise the penalty
                        set_rho(rho_bar * kGapRhoStep);
                        last_rho_update = iter;
                        gap_at_last_bump = std::abs(res.gap);
                        ++gap_bumps;
                    } else {
                        const double ratio = std::sqrt(std::max(res.prim_rel, kTiny) / std::max(res.dual_rel, kTiny));
                        if (ratio > kRhoTrigger || ratio < 1.0 / kRhoTrigger) {
                            const double step = std::clamp(ratio, 1.0 / kRhoMaxStep, kRhoMaxStep);
                            set_rho(rho_bar * step);
                            last_rho_update = iter;
                        }
                    }
                }
            }
        }
        return finalize(SolveStatus::MaxIters, res);
    }
};

ConeWorkspace::ConeWorkspace(const ConeProgram& p, const SolverSettings& settings)
    : impl_(std::make_unique<Impl>(p, settings)) {}
ConeWorkspace::~ConeWorkspace() = default;
ConeWorkspace::ConeWorkspace(ConeWorkspace&&) noexcept = default;
ConeWorkspace& ConeWorkspace::operator=(ConeWorkspace&&) noexcept = default;

ConeSolution ConeWorkspace::solve(const Eigen::VectorXd& c) { return impl_->run(c, nullptr); }

ConeSolution ConeWorkspace::solve(const Eigen::VectorXd& c, const ConeSolution& warm) {
    return impl_->run(c, &warm);
}

const ConeWorkspace::Stats& ConeWorkspace::stats() const { return impl_->stat; }

ConeSolution solve(const ConeProgram& p, const SolverSettings& settings) {
    ConeWorkspace ws(p, settings);
    return ws.solve(p.c);
}

}  // namespace sparsebeam
