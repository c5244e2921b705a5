#include "sparsebeam/hermitian.hpp"

#include <cmath>

namespace sparsebeam {

bool is_hermitian(const HermitianMatrix& h, double tol) {
    if (h.rows() != h.cols()) return false;
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_symmetric(const RealSymmetric& s, double tol) {
    if (s.rows() != s.cols()) return false;
    return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol;
}

HermitianMatrix outer(const ComplexVector& v) {
    if (v.size() == 0) throw DimensionError("outer: empty vector");
    return v * v.adjoint();
}

RealSymmetric embed_real(const HermitianMatrix& h) {
    const Eigen::Index n = h.rows();
    RealSymmetric s(2 * n, 2 * n);
    const Eigen::MatrixXd re = h.real();
    const Eigen::MatrixXd im = h.imag();
    s.topLeftCorner(n, n) = re;
    s.topRightCorner(n, n) = -im;
    s.bottomLeftCorner(n, n) = im;
    s.bottomRightCorner(n, n) = re;
    return s;
}

HermitianMatrix extract_hermitian(const RealSymmetric& s, double tol_struct) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0)
        throw DimensionError("extract_hermitian: need an even-dimension square matrix");
    const Eigen::Index n = s.rows() / 2;
    const auto s11 = s.topLeftCorner(n, n);
    const auto s12 = s.topRightCorner(n, n);
    const auto s21 = s.bottomLeftCorner(n, n);
    const auto s22 = s.bottomRightCorner(n, n);

    double dev = (s11 - s22).cwiseAbs().maxCoeff();
    dev = std::max(dev, (s12 + s21).cwiseAbs().maxCoeff());
    dev = std::max(dev, (s21 + s21.transpose()).cwiseAbs().maxCoeff());  // Im part antisymmetric
    if (dev > tol_struct)
        throw StructureError("extract_hermitian: embedding structure deviates by " + std::to_string(dev), dev);

    Eigen::MatrixXd re = 0.5 * (s11 + s22);
    Eigen::MatrixXd im = 0.5 * (s21 - s12);
    im = 0.5 * (im - im.transpose().eval());
    HermitianMatrix h(n, n);
    h.real() = 0.5 * (re + re.transpose());
    h.imag() = im;
    return h;
}

EigSym eig_sym(const RealSymmetric& s) {
    if (s.rows() != s.cols()) throw DimensionError("eig_sym: square matrix required");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    double shift = 0.0;
    if (es.info() != Eigen::Success) {
        // The QL iteration can stall on otherwise benign inputs (denormal
        // entries, pathological shift cycles). Flush tiny entries first;
        // then retry with a diagonal shift, which leaves the eigenvectors
        // untouched and moves every eigenvalue by exactly the shift.
        if (!s.allFinite()) throw NumericError("eig_sym: input contains NaN/Inf");
        const double scale = std::max(s.cwiseAbs().maxCoeff(), 1e-300);
        RealSymmetric cleaned = (s.cwiseAbs().array() < 1e-16 * scale).select(0.0, s);
        es.compute(cleaned);
        for (int attempt = 0; es.info() != Eigen::Success && attempt < 3; ++attempt) {
            shift = scale * (attempt == 0 ? 1e-13 : attempt == 1 ? 1e-10 : 1e-7);
            es.compute(cleaned + shift * Eigen::MatrixXd::Identity(s.rows(), s.cols()));
        }
        if (es.info() != Eigen::Success)
            throw NumericError("eig_sym: eigensolver failed to converge (dim " + std::to_string(s.rows()) + ")");
    }
    const Eigen::Index n = s.rows();
    EigSym out;
    out.values = (es.eigenvalues().array() - shift).reverse();
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    return out;
}

RealSymmetric project_psd(const RealSymmetric& s) {
    EigSym e = eig_sym(s);
    Eigen::VectorXd clipped = e.values.cwiseMax(0.0);
    RealSymmetric out = e.vectors * clipped.asDiagonal() * e.vectors.transpose();
    return 0.5 * (out + out.transpose());
}

EigPair principal_eigpair(const HermitianMatrix& h) {
    if (h.rows() != h.cols()) throw DimensionError("principal_eigpair: square matrix required");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    double shift = 0.0;
    if (es.info() != Eigen::Success) {
        if (!h.allFinite()) throw NumericError("principal_eigpair: input contains NaN/Inf");
        const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
        for (int attempt = 0; es.info() != Eigen::Success && attempt < 3; ++attempt) {
            shift = scale * (attempt == 0 ? 1e-13 : attempt == 1 ? 1e-10 : 1e-7);
            es.compute(h + shift * HermitianMatrix::Identity(h.rows(), h.cols()));
        }
        if (es.info() != Eigen::Success) throw NumericError("principal_eigpair: eigensolver failed to converge");
    }
    const Eigen::Index n = h.rows();
    EigPair out;
    out.value = es.eigenvalues()(n - 1) - shift;
    ComplexVector v = es.eigenvectors().col(n - 1);
    // deterministic phase: rotate so the first largest-modulus entry is real nonnegative
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        double m = std::abs(v(k));
        if (m > best + 1e-15) {
            best = m;
            imax = k;
        }
    }
    if (best > 0.0) v *= std::conj(v(imax)) / best;
    out.vector = v / v.norm();
    return out;
}

}  // namespace sparsebeam
