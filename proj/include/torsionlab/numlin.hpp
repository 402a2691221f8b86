#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "errors.hpp"

namespace torsionlab::numlin {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Default relative rank/kernel threshold; all modules inherit it.
inline constexpr double kRankTol = 1e-10;
// Relative residual threshold for span-membership checks.
inline constexpr double kSpanTol = 1e-8;

// Ordered list of vectors in C^ambient, stored as matrix columns.
struct Basis {
    CMatrix vectors;

    Basis() = default;
    explicit Basis(CMatrix v) : vectors(std::move(v)) {}

    Eigen::Index ambient_dim() const { return vectors.rows(); }
    Eigen::Index size() const { return vectors.cols(); }

    static Basis standard(Eigen::Index n) {
        return Basis(CMatrix::Identity(n, n));
    }
    static Basis empty(Eigen::Index ambient) {
        return Basis(CMatrix::Zero(ambient, 0));
    }
};

// det L where v_i = sum_j L_ij w_j. Throws SpanMismatch if v does not lie in
// span(w) within tol (relative residual), DimensionMismatch on shape clash.
cdouble coordinate_change_det(const Basis& v, const Basis& w,
                              double tol = kSpanTol);

// Rotates the two orthonormal blocks by a common unit scalar so that the
// coordinate-change determinant of [w | u] against v becomes real and strictly
// positive. Every vector is multiplied by exp(-i phi / dim) where phi is the
// phase of the uncorrected determinant.
std::pair<Basis, Basis> phase_corrected_bases(const Basis& w_basis,
                                              const Basis& wperp_basis,
                                              const Basis& v,
                                              double tol = kSpanTol);

struct EigenSystem {
    RVector values;   // ascending
    CMatrix vectors;  // orthonormal columns, phase-canonicalized
};

// Eigendecomposition of a Hermitian matrix. Deterministic: eigenvalue ties are
// broken by lexicographic comparison of the (phase-canonicalized) vectors.
EigenSystem hermitian_spectrum(const CMatrix& a, double tol = kRankTol);

// Orthonormal basis of the numerical kernel: eigenvectors of A*A with
// eigenvalue < tol * lambda_max.
Basis kernel_basis(const CMatrix& a, double tol = kRankTol);

// ---- shared dense plumbing used by the higher modules ----

// Orthonormal basis of the column span (SVD based, rank cut at tol * smax).
Basis orthonormal_columns(const CMatrix& a, double tol = kRankTol);

// Orthonormal basis of span(within) ∩ span(sub)^perp; `within` may be the
// full space (pass identity).
Basis orthogonal_complement(const Basis& within, const Basis& sub,
                            double tol = kRankTol);

// Singular values above tol * smax, descending. Empty input gives empty list.
RVector positive_singular_values(const CMatrix& a, double tol = kRankTol);

// Minimal-norm least-squares solution X of A X = B.
CMatrix least_squares(const CMatrix& a, const CMatrix& b);

bool is_orthonormal(const CMatrix& vectors, double tol);

}  // namespace torsionlab::numlin
