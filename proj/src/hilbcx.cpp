#include "torsionlab/hilbcx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace torsionlab::hilbcx {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<double> positive_eigenvalues(const CMatrix& h, double rank_tol) {
    std::vector<double> out;
    if (h.rows() == 0) return out;
    const numlin::EigenSystem es = numlin::hermitian_spectrum(h, 1e-9);
    const double mx = std::max(es.values.maxCoeff(), 0.0);
    if (mx <= 0.0) return out;
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
        if (es.values[i] > rank_tol * mx) out.push_back(es.values[i]);
    return out;
}

// r x r block submatrix selection
CMatrix select_blocks(const CMatrix& m, const std::vector<int>& rows,
                      const std::vector<int>& cols, Eigen::Index r) {
    CMatrix out(static_cast<Eigen::Index>(rows.size()) * r,
                static_cast<Eigen::Index>(cols.size()) * r);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            out.block(static_cast<Eigen::Index>(i) * r,
                      static_cast<Eigen::Index>(j) * r, r, r) =
                m.block(rows[i] * r, cols[j] * r, r, r);
    return out;
}

FiniteHilbertComplex pad_to_degree(FiniteHilbertComplex c, int m) {
    c.dims.resize(static_cast<size_t>(m) + 1, 0);
    for (int k = static_cast<int>(c.d.size()); k < m; ++k)
        c.d.push_back(CMatrix::Zero(c.dims[static_cast<size_t>(k) + 1],
                                    c.dims[static_cast<size_t>(k)]));
    return c;
}

int require_valid_rank(const localsys::LocalSystem& l) {
    if (l.rank <= 0) throw InvalidSystem("local system rank must be positive");
    return l.rank;
}

}  // namespace

void FiniteHilbertComplex::check(double tol) const {
    if (dims.empty()) {
        if (!d.empty()) throw DimensionMismatch("differentials without degrees");
        return;
    }
    if (d.size() + 1 != dims.size())
        throw DimensionMismatch("expected one differential per adjacent degree pair");
    for (size_t k = 0; k < d.size(); ++k)
        if (d[k].rows() != dims[k + 1] || d[k].cols() != dims[k])
            throw DimensionMismatch("differential " + std::to_string(k) +
                                    " has the wrong shape");
    for (size_t k = 0; k + 1 < d.size(); ++k) {
        const double comp = (d[k + 1] * d[k]).norm();
        const double scale = std::max(1.0, d[k + 1].norm() * d[k].norm());
        if (comp > tol * scale)
            throw ExactnessFailure("differential does not square to zero at degree " +
                                   std::to_string(k));
    }
}

CMatrix laplacian(const FiniteHilbertComplex& c, int k) {
    if (k < 0 || k > c.top_degree())
        throw DegreeOutOfRange("laplacian degree " + std::to_string(k));
    const Eigen::Index n = c.dims[static_cast<size_t>(k)];
    CMatrix lap = CMatrix::Zero(n, n);
    if (k < c.top_degree()) {
        const CMatrix& dk = c.d[static_cast<size_t>(k)];
        lap += dk.adjoint() * dk;
    }
    if (k > 0) {
        const CMatrix& dkm = c.d[static_cast<size_t>(k) - 1];
        lap += dkm * dkm.adjoint();
    }
    return lap;
}

double log_torsion(const FiniteHilbertComplex& c, double rank_tol) {
    double s = 0.0;
    for (int k = 0; k <= c.top_degree(); ++k) {
        const auto lam = positive_eigenvalues(laplacian(c, k), rank_tol);
        double zp = 0.0;
        for (double v : lam) zp -= std::log(v);
        s += 0.5 * (k % 2 == 0 ? 1.0 : -1.0) * k * zp;
    }
    return s;
}

double torsion(const FiniteHilbertComplex& c, double rank_tol) {
    return std::exp(log_torsion(c, rank_tol));
}

CohomologySpace harmonic_cohomology(const FiniteHilbertComplex& c, int k,
                                    double rank_tol) {
    const CMatrix lap = laplacian(c, k);
    CohomologySpace out;
    out.degree = k;
    if (lap.rows() == 0) {
        out.harmonic_basis = Basis::empty(0);
        return out;
    }
    const numlin::EigenSystem es = numlin::hermitian_spectrum(lap, 1e-9);
    const double mx = std::max(es.values.maxCoeff(), 0.0);
    const double cut = mx > 0.0 ? rank_tol * mx : rank_tol;
    Eigen::Index count = 0;
    while (count < es.values.size() && es.values[count] <= cut) ++count;
    out.harmonic_basis = Basis(es.vectors.leftCols(count));
    return out;
}

std::vector<Eigen::Index> betti_profile(const FiniteHilbertComplex& c,
                                        double rank_tol) {
    std::vector<Eigen::Index> out;
    for (int k = 0; k <= c.top_degree(); ++k)
        out.push_back(harmonic_cohomology(c, k, rank_tol).dim());
    return out;
}

FiniteHilbertComplex build_twisted_complex(const simplicial::SimplicialComplex& k,
                                           const localsys::LocalSystem& l) {
    const int r = require_valid_rank(l);
    localsys::require_valid(k, l);
    FiniteHilbertComplex c;
    const int m = k.dim();
    for (int deg = 0; deg <= m; ++deg)
        c.dims.push_back(static_cast<Eigen::Index>(k.count(deg)) * r);
    for (int deg = 0; deg < m; ++deg)
        c.d.push_back(localsys::twisted_coboundary(k, l, deg));
    return c;
}

FiniteHilbertComplex build_relative_complex(const simplicial::SimplicialComplex& on,
                                            const simplicial::SimplicialComplex& w,
                                            const localsys::LocalSystem& l) {
    const int r = require_valid_rank(l);
    localsys::require_valid(on, l);
    for (int deg = 0; deg <= w.dim(); ++deg)
        for (const auto& s : w.simplices(deg))
            if (on.index_of(deg, s) < 0)
                throw NotSubcomplex("relative subcomplex not contained in the base");
    const int m = on.dim();
    std::vector<std::vector<int>> keep(static_cast<size_t>(std::max(m + 1, 0)));
    FiniteHilbertComplex c;
    for (int deg = 0; deg <= m; ++deg) {
        const auto& lst = on.simplices(deg);
        for (size_t i = 0; i < lst.size(); ++i)
            if (!w.contains(lst[i]))
                keep[static_cast<size_t>(deg)].push_back(static_cast<int>(i));
        c.dims.push_back(
            static_cast<Eigen::Index>(keep[static_cast<size_t>(deg)].size()) * r);
    }
    for (int deg = 0; deg < m; ++deg) {
        const CMatrix full = localsys::twisted_coboundary(on, l, deg);
        c.d.push_back(select_blocks(full, keep[static_cast<size_t>(deg) + 1],
                                    keep[static_cast<size_t>(deg)], r));
    }
    return c;
}

SplitCochainComplex build_split_complex(const simplicial::SplitComplex& split,
                                        const localsys::LocalSystem& l) {
    const int r = require_valid_rank(l);
    localsys::require_valid(split.total, l);
    const int m = split.total.dim();
    SplitCochainComplex out;
    out.rank = r;
    out.part1_only.resize(static_cast<size_t>(m) + 1);
    out.part2_only.resize(static_cast<size_t>(m) + 1);
    out.interface.resize(static_cast<size_t>(m) + 1);

    // stored position -> index in the total complex, and the sqrt(2) scale of
    // the interface chart
    std::vector<std::vector<int>> tot_index(static_cast<size_t>(m) + 1);
    std::vector<std::vector<double>> scale(static_cast<size_t>(m) + 1);
    for (int deg = 0; deg <= m; ++deg) {
        const size_t kd = static_cast<size_t>(deg);
        for (const auto& s : split.part1.simplices(deg))
            if (!split.in_interface(s)) out.part1_only[kd].push_back(s);
        for (const auto& s : split.part2.simplices(deg))
            if (!split.in_interface(s)) out.part2_only[kd].push_back(s);
        for (const auto& s : split.interface.simplices(deg))
            out.interface[kd].push_back(s);

        auto push = [&](const simplicial::Simplex& s, double sc) {
            const int ti = split.total.index_of(deg, s);
            if (ti < 0) throw CoverageGap("part simplex missing from total");
            tot_index[kd].push_back(ti);
            scale[kd].push_back(sc);
        };
        for (const auto& s : out.part1_only[kd]) push(s, 1.0);
        for (const auto& s : out.part2_only[kd]) push(s, 1.0);
        for (const auto& s : out.interface[kd]) push(s, kSqrt2);
        if (static_cast<int>(tot_index[kd].size()) != split.total.count(deg))
            throw CoverageGap("split blocks do not cover the total complex");
        out.complex.dims.push_back(
            static_cast<Eigen::Index>(tot_index[kd].size()) * r);
    }

    // stored differential: conjugate the twisted coboundary of the total
    // complex by the reorder + interface-scale chart
    for (int deg = 0; deg < m; ++deg) {
        const size_t kd = static_cast<size_t>(deg);
        const CMatrix full = localsys::twisted_coboundary(split.total, l, deg);
        CMatrix d = CMatrix::Zero(out.complex.dims[kd + 1], out.complex.dims[kd]);
        for (size_t p = 0; p < tot_index[kd + 1].size(); ++p)
            for (size_t q = 0; q < tot_index[kd].size(); ++q)
                d.block(static_cast<Eigen::Index>(p) * r,
                        static_cast<Eigen::Index>(q) * r, r, r) =
                    (scale[kd + 1][p] / scale[kd][q]) *
                    full.block(tot_index[kd + 1][p] * r, tot_index[kd][q] * r, r, r);
        out.complex.d.push_back(std::move(d));
    }
    out.complex.check(1e-10);
    return out;
}

void check_ses(const ShortExactSequence& s, double tol) {
    const size_t degs = s.b.dims.size();
    if (s.a.dims.size() != degs || s.c.dims.size() != degs ||
        s.alpha.size() != degs || s.beta.size() != degs)
        throw DimensionMismatch("short exact sequence degree ranges differ");
    for (size_t k = 0; k < degs; ++k) {
        const CMatrix& al = s.alpha[k];
        const CMatrix& be = s.beta[k];
        if (al.rows() != s.b.dims[k] || al.cols() != s.a.dims[k] ||
            be.rows() != s.c.dims[k] || be.cols() != s.b.dims[k])
            throw DimensionMismatch("sequence maps have wrong shapes at degree " +
                                    std::to_string(k));
        if (al.cols()) {
            const CMatrix gram = al.adjoint() * al;
            if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).norm() >
                tol * std::max<double>(1.0, static_cast<double>(gram.rows())))
                throw ExactnessFailure("inclusion is not isometric at degree " +
                                       std::to_string(k));
        }
        if ((be * al).norm() > tol)
            throw ExactnessFailure("composite of the sequence maps is nonzero");
        const Eigen::Index rank_beta =
            numlin::positive_singular_values(be, numlin::kRankTol).size();
        if (rank_beta != s.b.dims[k] - s.a.dims[k])
            throw ExactnessFailure("image/kernel dimensions do not match at degree " +
                                   std::to_string(k));
    }
    for (size_t k = 0; k + 1 < degs; ++k) {
        const double ca =
            (s.alpha[k + 1] * s.a.d[k] - s.b.d[k] * s.alpha[k]).norm();
        const double cb =
            (s.beta[k + 1] * s.b.d[k] - s.c.d[k] * s.beta[k]).norm();
        const double scale = std::max(1.0, s.b.d[k].norm());
        if (std::max(ca, cb) > tol * scale)
            throw ExactnessFailure("sequence maps are not chain maps at degree " +
                                   std::to_string(k));
    }
}

std::pair<ShortExactSequence, ShortExactSequence> assemble_ses(
    const simplicial::SplitComplex& split, const localsys::LocalSystem& l) {
    const int r = require_valid_rank(l);
    const int m = split.total.dim();
    const SplitCochainComplex sp = build_split_complex(split, l);

    ShortExactSequence un, pr;
    un.b = sp.complex;
    pr.b = sp.complex;
    un.a = pad_to_degree(build_relative_complex(split.part1, split.interface, l), m);
    un.c = pad_to_degree(build_twisted_complex(split.part2, l), m);
    pr.a = pad_to_degree(build_relative_complex(split.part2, split.interface, l), m);
    pr.c = pad_to_degree(build_twisted_complex(split.part1, l), m);

    for (int deg = 0; deg <= m; ++deg) {
        const size_t kd = static_cast<size_t>(deg);
        const Eigen::Index na = static_cast<Eigen::Index>(sp.part1_only[kd].size());
        const Eigen::Index nb = static_cast<Eigen::Index>(sp.part2_only[kd].size());
        const Eigen::Index nw = static_cast<Eigen::Index>(sp.interface[kd].size());
        const Eigen::Index nall = (na + nb + nw) * r;

        std::map<simplicial::Simplex, Eigen::Index> pos1, pos2, posw;
        for (Eigen::Index i = 0; i < na; ++i)
            pos1[sp.part1_only[kd][static_cast<size_t>(i)]] = i;
        for (Eigen::Index i = 0; i < nb; ++i)
            pos2[sp.part2_only[kd][static_cast<size_t>(i)]] = na + i;
        for (Eigen::Index i = 0; i < nw; ++i)
            posw[sp.interface[kd][static_cast<size_t>(i)]] = na + nb + i;

        CMatrix a_un = CMatrix::Zero(nall, na * r);
        a_un.topRows(na * r) = CMatrix::Identity(na * r, na * r);
        CMatrix a_pr = CMatrix::Zero(nall, nb * r);
        a_pr.middleRows(na * r, nb * r) = CMatrix::Identity(nb * r, nb * r);

        auto restriction = [&](const simplicial::SimplicialComplex& part,
                               const std::map<simplicial::Simplex, Eigen::Index>& own) {
            const auto& lst = part.simplices(deg);
            CMatrix b = CMatrix::Zero(static_cast<Eigen::Index>(lst.size()) * r, nall);
            for (size_t i = 0; i < lst.size(); ++i) {
                const bool shared = split.in_interface(lst[i]);
                const Eigen::Index j =
                    shared ? posw.at(lst[i]) : own.at(lst[i]);
                const double f = shared ? 1.0 / kSqrt2 : 1.0;
                b.block(static_cast<Eigen::Index>(i) * r, j * r, r, r) =
                    f * CMatrix::Identity(r, r);
            }
            return b;
        };
        un.alpha.push_back(std::move(a_un));
        un.beta.push_back(restriction(split.part2, pos2));
        pr.alpha.push_back(std::move(a_pr));
        pr.beta.push_back(restriction(split.part1, pos1));
    }
    check_ses(un);
    check_ses(pr);
    return {std::move(un), std::move(pr)};
}

LongExactSequence long_exact_sequence(const ShortExactSequence& ses,
                                      double rank_tol) {
    const int m = ses.b.top_degree();
    std::vector<CMatrix> ha, hb, hc;
    for (int k = 0; k <= m; ++k) {
        ha.push_back(harmonic_cohomology(ses.a, k, rank_tol).harmonic_basis.vectors);
        hb.push_back(harmonic_cohomology(ses.b, k, rank_tol).harmonic_basis.vectors);
        hc.push_back(harmonic_cohomology(ses.c, k, rank_tol).harmonic_basis.vectors);
    }
    LongExactSequence les;
    for (int k = 0; k <= m; ++k) {
        les.dims.push_back(ha[static_cast<size_t>(k)].cols());
        les.dims.push_back(hb[static_cast<size_t>(k)].cols());
        les.dims.push_back(hc[static_cast<size_t>(k)].cols());
    }
    for (int k = 0; k <= m; ++k) {
        const size_t kd = static_cast<size_t>(k);
        les.maps.push_back(hb[kd].adjoint() * ses.alpha[kd] * ha[kd]);
        les.maps.push_back(hc[kd].adjoint() * ses.beta[kd] * hb[kd]);
        if (k < m) {
            // connecting map: lift through beta, apply d, pull back through
            // alpha, project to harmonics
            const CMatrix& hk = hc[kd];
            const CMatrix lift = numlin::least_squares(ses.beta[kd], hk);
            const CMatrix db = ses.b.d[kd] * lift;
            const CMatrix pre = numlin::least_squares(ses.alpha[kd + 1], db);
            const double res1 = (ses.beta[kd] * lift - hk).norm();
            const double res2 = (ses.alpha[kd + 1] * pre - db).norm();
            if (std::max(res1, res2) > 1e-8 * (1.0 + hk.norm()))
                throw ZigZagBreakdown("lift residuals " + std::to_string(res1) +
                                      ", " + std::to_string(res2));
            les.maps.push_back(ha[kd + 1].adjoint() * pre);
        } else {
            les.maps.push_back(CMatrix::Zero(0, hc[kd].cols()));
        }
    }
    return les;
}

double exactness_defect(const LongExactSequence& les, double rank_tol) {
    double worst = 0.0;
    const int n = les.node_count();
    for (int i = 0; i < n; ++i) {
        const Eigen::Index d = les.dims[static_cast<size_t>(i)];
        if (d == 0) continue;
        const CMatrix& mo = les.maps[static_cast<size_t>(i)];
        if (i >= 1) {
            const CMatrix& mi = les.maps[static_cast<size_t>(i) - 1];
            worst = std::max(worst, (mo * mi).norm());
        }
        const Eigen::Index rin =
            i >= 1 ? numlin::positive_singular_values(
                         les.maps[static_cast<size_t>(i) - 1], rank_tol)
                         .size()
                   : 0;
        const Eigen::Index rout =
            numlin::positive_singular_values(mo, rank_tol).size();
        if (rin != d - rout) worst = std::max(worst, 1.0);
    }
    return worst;
}

std::vector<CMatrix> node_reference_bases(const LongExactSequence& les) {
    const int n = les.node_count();
    std::vector<CMatrix> lifts, refs;
    for (int i = 0; i < n; ++i)
        lifts.push_back(
            numlin::orthonormal_columns(les.maps[static_cast<size_t>(i)].adjoint())
                .vectors);
    for (int i = 0; i < n; ++i) {
        const Eigen::Index d = les.dims[static_cast<size_t>(i)];
        const CMatrix img =
            i >= 1 ? CMatrix(les.maps[static_cast<size_t>(i) - 1] *
                             lifts[static_cast<size_t>(i) - 1])
                   : CMatrix::Zero(d, 0);
        CMatrix ref(d, lifts[static_cast<size_t>(i)].cols() + img.cols());
        ref << lifts[static_cast<size_t>(i)], img;
        refs.push_back(std::move(ref));
    }
    return refs;
}

std::vector<CMatrix> node_reference_bases(const LongExactSequence& les, Rng& rng) {
    const int n = les.node_count();
    std::vector<CMatrix> lifts;
    for (int i = 0; i < n; ++i) {
        const Eigen::Index d = les.dims[static_cast<size_t>(i)];
        CMatrix lift =
            numlin::orthonormal_columns(les.maps[static_cast<size_t>(i)].adjoint())
                .vectors;
        const Eigen::Index k = lift.cols();
        if (k > 0) {
            // any complement of ker(out) is an admissible lift block
            const CMatrix ker = numlin::orthogonal_complement(
                                    Basis::standard(d), Basis(lift))
                                    .vectors;
            const CMatrix mix = rng.complex_gaussian(k, k);
            CMatrix next = lift * mix;
            if (ker.cols() > 0)
                next += ker * rng.complex_gaussian(ker.cols(), k);
            lift = std::move(next);
        }
        lifts.push_back(std::move(lift));
    }
    std::vector<CMatrix> refs;
    for (int i = 0; i < n; ++i) {
        const Eigen::Index d = les.dims[static_cast<size_t>(i)];
        const CMatrix img =
            i >= 1 ? CMatrix(les.maps[static_cast<size_t>(i) - 1] *
                             lifts[static_cast<size_t>(i) - 1])
                   : CMatrix::Zero(d, 0);
        CMatrix ref(d, lifts[static_cast<size_t>(i)].cols() + img.cols());
        ref << lifts[static_cast<size_t>(i)], img;
        refs.push_back(std::move(ref));
    }
    return refs;
}

PhaseCorrectedNode phase_corrected_node(const LongExactSequence& les, int node,
                                        const std::vector<CMatrix>& refs) {
    const Eigen::Index d = les.dims[static_cast<size_t>(node)];
    PhaseCorrectedNode out;
    if (d == 0) {
        out.basis = CMatrix(0, 0);
        return out;
    }
    CMatrix img_on(d, 0);
    if (node >= 1)
        img_on = numlin::orthonormal_columns(
                     les.maps[static_cast<size_t>(node) - 1])
                     .vectors;
    out.image_dim = img_on.cols();
    const CMatrix perp =
        img_on.cols() > 0
            ? numlin::orthogonal_complement(Basis::standard(d), Basis(img_on))
                  .vectors
            : CMatrix(CMatrix::Identity(d, d));
    CMatrix b(d, perp.cols() + img_on.cols());
    b << perp, img_on;
    const cdouble det = numlin::coordinate_change_det(
        Basis(b), Basis(refs[static_cast<size_t>(node)]));
    const double phi = std::arg(det);
    b *= std::exp(cdouble(0.0, -phi / static_cast<double>(d)));
    const cdouble det2 = numlin::coordinate_change_det(
        Basis(b), Basis(refs[static_cast<size_t>(node)]));
    if (!(std::abs(det2.imag()) <= 1e-9 * std::max(1.0, std::abs(det2)) &&
          det2.real() > 0.0))
        throw ExactnessFailure("phase correction did not produce a positive change");
    out.basis = std::move(b);
    out.det = det2.real();
    return out;
}

double les_torsion(const LongExactSequence& les) {
    if (exactness_defect(les) > 1e-6)
        throw ExactnessFailure("sequence is not exact within tolerance");
    const auto refs = node_reference_bases(les);
    double logtau = 0.0;
    for (int i = 0; i < les.node_count(); ++i) {
        const PhaseCorrectedNode pc = phase_corrected_node(les, i, refs);
        const int k = LongExactSequence::degree_of(i);
        const int role = LongExactSequence::role_of(i);
        int e = (k % 2 == 0) ? 1 : -1;
        if (role == 1) e = -e;
        logtau += e * std::log(pc.det);
    }
    return std::exp(logtau);
}

double les_torsion_log_sv(const LongExactSequence& les) {
    double logtau = 0.0;
    for (int i = 0; i < les.node_count(); ++i) {
        double ls = 0.0;
        if (i >= 1) {
            const numlin::RVector s = numlin::positive_singular_values(
                les.maps[static_cast<size_t>(i) - 1]);
            for (Eigen::Index j = 0; j < s.size(); ++j) ls += std::log(s[j]);
        }
        const int k = LongExactSequence::degree_of(i);
        const int role = LongExactSequence::role_of(i);
        int e = (k % 2 == 0) ? 1 : -1;
        if (role == 1) e = -e;
        logtau += -e * ls;
    }
    return logtau;
}

FiniteHilbertComplex les_as_complex(const LongExactSequence& les) {
    FiniteHilbertComplex c;
    c.dims = les.dims;
    for (size_t i = 0; i + 1 < les.maps.size(); ++i) c.d.push_back(les.maps[i]);
    return c;
}

int nu_sign(const LongExactSequence& les) {
    const int mp1 = les.degree_count();
    long long tot = 0;
    for (int k = 0; k < mp1; ++k) {
        const long long sk = (k % 2 == 0) ? 1 : -1;
        for (int role = 0; role < 3; ++role) {
            const long long d = numlin::positive_singular_values(
                                    les.maps[static_cast<size_t>(3 * k + role)])
                                    .size();
            tot += d * (d + sk) / 2;  // d(d +- 1) is always even
        }
    }
    std::vector<long long> hrel, hsp, habs;
    for (int k = 0; k < mp1; ++k) {
        hrel.push_back(les.dims[static_cast<size_t>(3 * k)]);
        hsp.push_back(les.dims[static_cast<size_t>(3 * k) + 1]);
        habs.push_back(les.dims[static_cast<size_t>(3 * k) + 2]);
    }
    long long pre_sp = 0, pre_abs = 0;
    for (int k = 0; k < mp1; ++k) {
        tot += hrel[static_cast<size_t>(k)] * pre_sp;
        tot += hrel[static_cast<size_t>(k)] * pre_abs;
        tot += hsp[static_cast<size_t>(k)] * pre_abs;
        pre_sp += hsp[static_cast<size_t>(k)];
        pre_abs += habs[static_cast<size_t>(k)];
    }
    return static_cast<int>(tot % 2);
}

LongExactSequence generate_exact_les(Rng& rng,
                                     const std::vector<Eigen::Index>& dims,
                                     double smin, double smax) {
    const size_t n = dims.size();
    std::vector<Eigen::Index> ranks;
    Eigen::Index r = 0;
    for (size_t i = 0; i < n; ++i) {
        r = dims[i] - r;
        if (r < 0)
            throw InfeasibleProfile("alternating rank peel went negative at node " +
                                    std::to_string(i));
        ranks.push_back(r);
    }
    if (!ranks.empty() && ranks.back() != 0)
        throw InfeasibleProfile("profile does not close (trailing rank " +
                                std::to_string(ranks.back()) + ")");
    std::vector<CMatrix> q;
    for (size_t i = 0; i < n; ++i) q.push_back(rng.unitary(dims[i]));

    LongExactSequence les;
    les.dims = dims;
    for (size_t i = 0; i + 1 < n; ++i) {
        const Eigen::Index rin = i >= 1 ? ranks[i - 1] : 0;
        const Eigen::Index ri = ranks[i];
        if (ri > 0) {
            CMatrix s = CMatrix::Zero(ri, ri);
            for (Eigen::Index j = 0; j < ri; ++j)
                s(j, j) = std::exp(rng.uniform(std::log(smin), std::log(smax)));
            les.maps.push_back(q[i + 1].leftCols(ri) * s *
                               q[i].middleCols(rin, ri).adjoint());
        } else {
            les.maps.push_back(CMatrix::Zero(dims[i + 1], dims[i]));
        }
    }
    if (!dims.empty()) les.maps.push_back(CMatrix::Zero(0, dims.back()));
    return les;
}

std::vector<Eigen::Index> sample_feasible_profile(Rng& rng, int m,
                                                  Eigen::Index max_rank,
                                                  bool palindromic) {
    const int n_maps = 3 * m + 2;
    std::vector<Eigen::Index> r(static_cast<size_t>(n_maps));
    for (auto& v : r) v = rng.uniform_int(0, max_rank);
    if (palindromic) {
        // mirror rank pairs so dim sp_k = dim sp_{m-k}
        for (int k = 0; k <= m; ++k) {
            const int kk = m - k;
            if (kk <= k) continue;
            const Eigen::Index tgt = r[static_cast<size_t>(3 * k)] +
                                     r[static_cast<size_t>(3 * k) + 1];
            const Eigen::Index a = rng.uniform_int(0, tgt);
            r[static_cast<size_t>(3 * kk)] = a;
            r[static_cast<size_t>(3 * kk) + 1] = tgt - a;
        }
    }
    std::vector<Eigen::Index> dims;
    for (int i = 0; i < 3 * (m + 1); ++i) {
        const Eigen::Index rin = i >= 1 ? r[static_cast<size_t>(i) - 1] : 0;
        const Eigen::Index rout = i < n_maps ? r[static_cast<size_t>(i)] : 0;
        dims.push_back(rin + rout);
    }
    return dims;
}

DualityInstance generate_duality_instance(std::uint64_t seed, int m,
                                          const std::vector<Eigen::Index>& profile,
                                          Eigen::Index max_rank) {
    if (m < 0) throw InfeasibleProfile("negative top degree");
    Rng rng(seed);
    const std::vector<Eigen::Index> dims =
        profile.empty() ? sample_feasible_profile(rng, m, max_rank, true)
                        : profile;
    if (static_cast<int>(dims.size()) != 3 * (m + 1))
        throw InfeasibleProfile("profile must list 3(m+1) node dimensions");

    DualityInstance inst;
    inst.m = m;
    inst.les_h = generate_exact_les(rng, dims);
    for (int k = 0; k <= m; ++k) {
        inst.hrel.push_back(dims[static_cast<size_t>(3 * k)]);
        inst.hsp.push_back(dims[static_cast<size_t>(3 * k) + 1]);
        inst.habs.push_back(dims[static_cast<size_t>(3 * k) + 2]);
    }
    for (int k = 0; k <= m; ++k) {
        inst.gamma_rel.push_back(rng.unitary(inst.hrel[static_cast<size_t>(k)]));
        inst.gamma_split.push_back(rng.unitary(inst.hsp[static_cast<size_t>(k)]));
        inst.gamma_abs.push_back(rng.unitary(inst.habs[static_cast<size_t>(k)]));
    }

    // primed sequence defined by conjugating the adjoints: the duality squares
    // then commute exactly
    LongExactSequence& lesp = inst.les_hprime;
    for (int j = 0; j <= m; ++j) {
        lesp.dims.push_back(inst.habs[static_cast<size_t>(m - j)]);
        lesp.dims.push_back(inst.hsp[static_cast<size_t>(m - j)]);
        lesp.dims.push_back(inst.hrel[static_cast<size_t>(m - j)]);
    }
    lesp.maps.assign(static_cast<size_t>(3 * (m + 1)), CMatrix());
    for (int k = 0; k <= m; ++k) {
        const size_t sk = static_cast<size_t>(k);
        const CMatrix& a = inst.les_h.maps[3 * sk];
        const CMatrix& b = inst.les_h.maps[3 * sk + 1];
        const int j = m - k;
        lesp.maps[static_cast<size_t>(3 * j)] =
            inst.gamma_split[sk] * b.adjoint() * inst.gamma_abs[sk].adjoint();
        lesp.maps[static_cast<size_t>(3 * j) + 1] =
            inst.gamma_rel[sk] * a.adjoint() * inst.gamma_split[sk].adjoint();
        if (k < m) {
            const CMatrix& dd = inst.les_h.maps[3 * sk + 2];
            const int jj = m - k - 1;
            lesp.maps[static_cast<size_t>(3 * jj) + 2] =
                inst.gamma_abs[sk] * dd.adjoint() *
                inst.gamma_rel[sk + 1].adjoint();
        }
    }
    lesp.maps.back() = CMatrix::Zero(0, lesp.dims.back());
    return inst;
}

double diagram_commutation_defect(const DualityInstance& inst) {
    double worst = 0.0;
    const int m = inst.m;
    for (int k = 0; k <= m; ++k) {
        const size_t sk = static_cast<size_t>(k);
        const int j = m - k;
        worst = std::max(worst,
                         (inst.les_hprime.maps[static_cast<size_t>(3 * j)] *
                              inst.gamma_abs[sk] -
                          inst.gamma_split[sk] *
                              inst.les_h.maps[3 * sk + 1].adjoint())
                             .norm());
        worst = std::max(worst,
                         (inst.les_hprime.maps[static_cast<size_t>(3 * j) + 1] *
                              inst.gamma_split[sk] -
                          inst.gamma_rel[sk] *
                              inst.les_h.maps[3 * sk].adjoint())
                             .norm());
        if (k < m) {
            const int jj = m - k - 1;
            worst = std::max(
                worst, (inst.les_hprime.maps[static_cast<size_t>(3 * jj) + 2] *
                            inst.gamma_rel[sk + 1] -
                        inst.gamma_abs[sk] *
                            inst.les_h.maps[3 * sk + 2].adjoint())
                           .norm());
        }
    }
    return worst;
}

}  // namespace torsionlab::hilbcx
