#include "torsionlab/numlin.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace torsionlab::numlin {

namespace {

// Lexicographic columnwise order on (re, im) pairs, used only to break exact
// eigenvalue ties deterministically.
bool column_less(const CMatrix& m, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const cdouble x = m(i, a), y = m(i, b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return false;
}

// Multiplies each column by a unit scalar making its largest-modulus entry
// real positive. Keeps orthonormality; makes degenerate-eigenspace output
// reproducible enough for lexicographic tie-breaking.
void canonicalize_phases(CMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double a = std::abs(m(i, j));
            if (a > best) { best = a; imax = i; }
        }
        if (best > 0) {
            const cdouble ph = m(imax, j) / best;
            m.col(j) /= ph;
        }
    }
}

}  // namespace

cdouble coordinate_change_det(const Basis& v, const Basis& w, double tol) {
    if (v.size() != w.size())
        throw DimensionMismatch("bases have different lengths (" +
                                std::to_string(v.size()) + " vs " +
                                std::to_string(w.size()) + ")");
    if (v.ambient_dim() != w.ambient_dim())
        throw DimensionMismatch("bases live in different ambient spaces");
    if (v.size() == 0) return cdouble(1.0, 0.0);

    // Solve W * Lt = V columnwise; L = Lt^T, det L = det Lt.
    const CMatrix lt = least_squares(w.vectors, v.vectors);
    const double resid = (w.vectors * lt - v.vectors).norm();
    const double scale = std::max(1.0, v.vectors.norm());
    if (resid > tol * scale)
        throw SpanMismatch("projection residual " + std::to_string(resid) +
                           " exceeds tolerance");
    return lt.determinant();
}

std::pair<Basis, Basis> phase_corrected_bases(const Basis& w_basis,
                                              const Basis& wperp_basis,
                                              const Basis& v, double tol) {
    if (!is_orthonormal(w_basis.vectors, 1e-9) ||
        !is_orthonormal(wperp_basis.vectors, 1e-9))
        throw NotOrthonormal("input blocks must be orthonormal");
    if (w_basis.size() && wperp_basis.size() &&
        (w_basis.vectors.adjoint() * wperp_basis.vectors).norm() > 1e-9)
        throw NotOrthonormal("input blocks must be mutually orthogonal");
    const Eigen::Index total = w_basis.size() + wperp_basis.size();
    if (total != v.size())
        throw SpanMismatch("block sizes do not match the target basis");
    if (total == 0) return {w_basis, wperp_basis};

    CMatrix concat(v.ambient_dim(), total);
    concat << w_basis.vectors, wperp_basis.vectors;
    const cdouble det = coordinate_change_det(Basis(concat), v, tol);
    const double phi = std::arg(det);
    const cdouble rot = std::exp(cdouble(0.0, -phi / static_cast<double>(total)));
    Basis w2(w_basis.vectors * rot), u2(wperp_basis.vectors * rot);
    return {std::move(w2), std::move(u2)};
}

EigenSystem hermitian_spectrum(const CMatrix& a, double tol) {
    if (a.rows() != a.cols())
        throw NotHermitian("matrix is not square");
    const double scale = a.norm();
    if ((a - a.adjoint()).norm() > tol * std::max(1.0, scale))
        throw NotHermitian("Hermitian defect above tolerance");
    if (a.rows() == 0) return {RVector(0), CMatrix(0, 0)};

    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
    RVector values = es.eigenvalues();
    CMatrix vectors = es.eigenvectors();
    canonicalize_phases(vectors);

    // stable tie-break inside numerically equal eigenvalue groups
    const double tie = tol * std::max(1.0, values.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> order(static_cast<size_t>(values.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) {
                         if (std::abs(values[x] - values[y]) > tie)
                             return values[x] < values[y];
                         return column_less(vectors, x, y);
                     });
    EigenSystem out;
    out.values.resize(values.size());
    out.vectors.resize(vectors.rows(), vectors.cols());
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        out.values[j] = values[order[static_cast<size_t>(j)]];
        out.vectors.col(j) = vectors.col(order[static_cast<size_t>(j)]);
    }
    return out;
}

Basis kernel_basis(const CMatrix& a, double tol) {
    const Eigen::Index n = a.cols();
    if (n == 0) return Basis::empty(0);
    if (a.rows() == 0) return Basis::standard(n);

    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    if (smax <= 0.0) return Basis::standard(n);
    const double cut = std::sqrt(tol) * smax;  // sigma^2 < tol * lambda_max
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    return Basis(svd.matrixV().rightCols(n - rank));
}

Basis orthonormal_columns(const CMatrix& a, double tol) {
    if (a.cols() == 0 || a.rows() == 0) return Basis::empty(a.rows());
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    if (smax <= 0.0) return Basis::empty(a.rows());
    // absolute floor keeps the rank of numerically-zero inputs at zero,
    // matching positive_singular_values
    const double cut = tol * std::max(1.0, smax);
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    return Basis(svd.matrixU().leftCols(rank));
}

Basis orthogonal_complement(const Basis& within, const Basis& sub, double tol) {
    if (within.size() == 0) return Basis::empty(within.ambient_dim());
    CMatrix proj = within.vectors;
    if (sub.size()) {
        proj -= sub.vectors * (sub.vectors.adjoint() * within.vectors);
    }
    return orthonormal_columns(proj, std::max(tol, 1e-12));
}

RVector positive_singular_values(const CMatrix& a, double tol) {
    if (a.rows() == 0 || a.cols() == 0) return RVector(0);
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    if (smax <= 0.0) return RVector(0);
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > tol * std::max(1.0, smax)) ++rank;
    return s.head(rank);
}

CMatrix least_squares(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows())
        throw DimensionMismatch("incompatible rows in least squares solve");
    if (a.cols() == 0) return CMatrix::Zero(0, b.cols());
    if (a.rows() == 0) return CMatrix::Zero(a.cols(), b.cols());
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(b);
}

bool is_orthonormal(const CMatrix& vectors, double tol) {
    if (vectors.cols() == 0) return true;
    const CMatrix gram = vectors.adjoint() * vectors;
    return (gram - CMatrix::Identity(gram.rows(), gram.cols())).norm() <=
           tol * std::max<double>(1.0, static_cast<double>(gram.rows()));
}

}  // namespace torsionlab::numlin
