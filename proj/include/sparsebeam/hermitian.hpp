#ifndef SPARSEBEAM_HERMITIAN_HPP
#define SPARSEBEAM_HERMITIAN_HPP

#include <Eigen/Dense>

#include "sparsebeam/errors.hpp"
#include "sparsebeam/model.hpp"

namespace sparsebeam {

// Carriers for the matrix algebra. Construction sites guarantee the
// contracts (Hermitian / symmetric to 1e-12); is_hermitian / is_symmetric
// check them where inputs cross an API boundary.
using HermitianMatrix = Eigen::MatrixXcd;
using RealSymmetric = Eigen::MatrixXd;

bool is_hermitian(const HermitianMatrix& h, double tol = 1e-12);
bool is_symmetric(const RealSymmetric& s, double tol = 1e-12);

// v v^H, Hermitian PSD of rank <= 1.
HermitianMatrix outer(const ComplexVector& v);

// 2n x 2n block matrix [[Re(H), -Im(H)], [Im(H), Re(H)]].
// Symmetric; PSD iff H is PSD; trace doubles.
RealSymmetric embed_real(const HermitianMatrix& h);

// Left inverse of embed_real (blocks averaged). Throws StructureError,
// carrying the max deviation, when S strays from the embedding pattern
// by more than tol_struct.
HermitianMatrix extract_hermitian(const RealSymmetric& s, double tol_struct = 1e-6);

struct EigSym {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // orthonormal columns, vectors.col(i) <-> values(i)
};

EigSym eig_sym(const RealSymmetric& s);

// Frobenius-nearest PSD matrix: clip negative eigenvalues, reconstruct.
RealSymmetric project_psd(const RealSymmetric& s);

struct EigPair {
    double value = 0.0;
    ComplexVector vector;  // unit norm; largest-modulus entry real nonnegative
};

EigPair principal_eigpair(const HermitianMatrix& h);

}  // namespace sparsebeam

#endif
