#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "torsionlab/numlin.hpp"
#include "torsionlab/rng.hpp"

using namespace torsionlab;
using numlin::Basis;
using numlin::cdouble;
using numlin::CMatrix;

namespace {
const cdouble kI(0.0, 1.0);

double norm_of(const CMatrix& m) { return m.norm(); }
}  // namespace

TEST_CASE("coordinate change determinant on explicit bases", "[numlin]") {
    const Basis std2 = Basis::standard(2);
    REQUIRE(std::abs(numlin::coordinate_change_det(std2, std2) - 1.0) < 1e-14);

    // v = w * M written column by column: det equals det M
    CMatrix m(2, 2);
    m << cdouble(2.0, 1.0), cdouble(0.0, -1.0), cdouble(1.0, 0.0), cdouble(3.0, 2.0);
    const Basis v(CMatrix(CMatrix::Identity(2, 2) * m));
    const cdouble got = numlin::coordinate_change_det(v, std2);
    REQUIRE(std::abs(got - m.determinant()) < 1e-12);

    // common unitary rotation leaves the determinant unchanged
    Rng rng(7);
    const CMatrix u = rng.unitary(2);
    const Basis vu(CMatrix(u * v.vectors)), wu(CMatrix(u * std2.vectors));
    REQUIRE(std::abs(numlin::coordinate_change_det(vu, wu) - got) < 1e-12);
}

TEST_CASE("coordinate change determinant rejects bad inputs", "[numlin]") {
    CMatrix e1 = CMatrix::Zero(2, 1), e2 = CMatrix::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    REQUIRE_THROWS_AS(numlin::coordinate_change_det(Basis(e2), Basis(e1)), SpanMismatch);

    const Basis a = Basis::standard(2), b = Basis::standard(3);
    REQUIRE_THROWS_AS(numlin::coordinate_change_det(a, b), DimensionMismatch);
}

TEST_CASE("phase corrected pair yields a real positive determinant", "[numlin]") {
    Rng rng(11);
    const CMatrix u = rng.unitary(3);
    const Basis target(u);
    Basis w(CMatrix(u.leftCols(1) * std::polar(1.0, 0.9)));
    Basis wperp(CMatrix(u.rightCols(2) * std::polar(1.0, -0.4)));

    auto [cw, cp] = numlin::phase_corrected_bases(w, wperp, target);
    REQUIRE(numlin::is_orthonormal(cw.vectors, 1e-12));
    REQUIRE(numlin::is_orthonormal(cp.vectors, 1e-12));

    CMatrix joined(3, 3);
    joined << cw.vectors, cp.vectors;
    const cdouble det = numlin::coordinate_change_det(Basis(joined), target);
    REQUIRE(det.real() > 0.0);
    REQUIRE(std::abs(det.imag()) < 1e-12);

    // correction is a common unit scalar: direction of each column survives
    REQUIRE(std::abs(std::abs((w.vectors.adjoint() * cw.vectors)(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("hermitian spectrum is ascending, orthonormal, deterministic", "[numlin]") {
    CMatrix a(2, 2);
    a << 2.0, kI, -kI, 2.0;  // eigenvalues 1 and 3
    const auto sys = numlin::hermitian_spectrum(a);
    REQUIRE(sys.values.size() == 2);
    REQUIRE(std::abs(sys.values(0) - 1.0) < 1e-12);
    REQUIRE(std::abs(sys.values(1) - 3.0) < 1e-12);
    REQUIRE(numlin::is_orthonormal(sys.vectors, 1e-12));
    for (Eigen::Index j = 0; j < 2; ++j) {
        const CMatrix resid = a * sys.vectors.col(j) - sys.values(j) * sys.vectors.col(j);
        REQUIRE(norm_of(resid) < 1e-12);
    }

    const auto again = numlin::hermitian_spectrum(a);
    REQUIRE(norm_of(sys.vectors - again.vectors) == 0.0);

    CMatrix bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    REQUIRE_THROWS_AS(numlin::hermitian_spectrum(bad), NotHermitian);
}

TEST_CASE("kernel, column span, complement, singular values", "[numlin]") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    const Basis ker = numlin::kernel_basis(a);
    REQUIRE(ker.size() == 1);
    REQUIRE(norm_of(a * ker.vectors) < 1e-12);

    const Basis span = numlin::orthonormal_columns(a);
    REQUIRE(span.size() == 1);
    REQUIRE(std::abs(std::abs(span.vectors(0, 0)) - 1.0) < 1e-12);

    const Basis zker = numlin::kernel_basis(CMatrix::Zero(3, 3));
    REQUIRE(zker.size() == 3);
    REQUIRE(numlin::positive_singular_values(CMatrix::Zero(3, 3)).size() == 0);

    const auto sv = numlin::positive_singular_values(a);
    REQUIRE(sv.size() == 1);
    REQUIRE(std::abs(sv(0) - 1.0) < 1e-14);

    CMatrix e1 = CMatrix::Zero(3, 1);
    e1(0, 0) = 1.0;
    const Basis comp = numlin::orthogonal_complement(Basis::standard(3), Basis(e1));
    REQUIRE(comp.size() == 2);
    REQUIRE(numlin::is_orthonormal(comp.vectors, 1e-12));
    REQUIRE(norm_of(e1.adjoint() * comp.vectors) < 1e-12);
}

TEST_CASE("least squares solves and degenerates gracefully", "[numlin]") {
    CMatrix a(2, 2);
    a << 2.0, 1.0, 0.0, 3.0;
    CMatrix b(2, 1);
    b << 5.0, 6.0;
    const CMatrix x = numlin::least_squares(a, b);
    REQUIRE(norm_of(a * x - b) < 1e-12);

    // minimal-norm solution of the underdetermined row system [1 1] x = 2
    CMatrix row(1, 2), rhs(1, 1);
    row << 1.0, 1.0;
    rhs << 2.0;
    const CMatrix xm = numlin::least_squares(row, rhs);
    REQUIRE(std::abs(xm(0, 0) - 1.0) < 1e-12);
    REQUIRE(std::abs(xm(1, 0) - 1.0) < 1e-12);

    const CMatrix none = numlin::least_squares(CMatrix::Zero(2, 0), b);
    REQUIRE(none.rows() == 0);
    REQUIRE(none.cols() == 1);
}

TEST_CASE("orthonormality predicate", "[numlin]") {
    REQUIRE(numlin::is_orthonormal(CMatrix::Identity(3, 3), 1e-12));
    CMatrix skew(2, 1);
    skew << 1.0, 1.0;
    REQUIRE_FALSE(numlin::is_orthonormal(skew, 1e-12));
}

TEST_CASE("rng unitaries are unitary and seed stable", "[numlin]") {
    Rng a(123), b(123);
    const CMatrix ua = a.unitary(4), ub = b.unitary(4);
    REQUIRE(norm_of(ua - ub) == 0.0);
    REQUIRE(norm_of(ua.adjoint() * ua - CMatrix::Identity(4, 4)) < 1e-12);
}
