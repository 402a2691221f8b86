#include "torsionlab/gluelab.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace torsionlab::gluelab {

namespace {

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

FiniteHilbertComplex pad_to(FiniteHilbertComplex c, int top) {
    if (c.dims.empty()) c.dims.push_back(0);  // empty interface
    while (c.top_degree() < top) {
        c.d.push_back(CMatrix::Zero(0, c.dims.back()));
        c.dims.push_back(0);
    }
    return c;
}

FiniteHilbertComplex direct_sum(const FiniteHilbertComplex& a,
                                const FiniteHilbertComplex& b) {
    if (a.dims.size() != b.dims.size())
        throw DegreeMismatch("direct sum needs equal degree ranges");
    FiniteHilbertComplex out;
    for (size_t k = 0; k < a.dims.size(); ++k)
        out.dims.push_back(a.dims[k] + b.dims[k]);
    for (size_t k = 0; k + 1 < a.dims.size(); ++k) {
        CMatrix d = CMatrix::Zero(out.dims[k + 1], out.dims[k]);
        d.topLeftCorner(a.dims[k + 1], a.dims[k]) = a.d[k];
        d.bottomRightCorner(b.dims[k + 1], b.dims[k]) = b.d[k];
        out.d.push_back(std::move(d));
    }
    return out;
}

bool sv_gap_ok(const CMatrix& m, double ratio) {
    const auto sv = numlin::positive_singular_values(m);
    return sv.size() == 0 || sv(sv.size() - 1) >= ratio * sv(0);
}

bool well_conditioned(const simplicial::SplitComplex& split,
                      const localsys::LocalSystem& l, double ratio) {
    const auto [ses, ses_pr] = hilbcx::assemble_ses(split, l);
    for (const FiniteHilbertComplex* c :
         {&ses.a, &ses.b, &ses.c, &ses_pr.a, &ses_pr.c})
        for (const CMatrix& d : c->d)
            if (!sv_gap_ok(d, ratio)) return false;
    for (const hilbcx::LongExactSequence& les :
         {hilbcx::long_exact_sequence(ses), hilbcx::long_exact_sequence(ses_pr)})
        for (const CMatrix& m : les.maps)
            if (!sv_gap_ok(m, ratio)) return false;
    return true;
}

// all nonempty subsimplices of a sorted vertex tuple
void close_faces(const simplicial::Simplex& s,
                 std::set<simplicial::Simplex>& out) {
    const size_t n = s.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        simplicial::Simplex face;
        for (size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) face.push_back(s[static_cast<size_t>(i)]);
        out.insert(std::move(face));
    }
}

}  // namespace

double l2_det_norm(const detline::DetLineElement& el) {
    double norm = std::abs(el.scalar);
    for (int k = 0; k <= el.top_degree(); ++k) {
        const CMatrix& b = el.bases[static_cast<size_t>(k)];
        if (b.rows() != b.cols())
            throw BasisMismatch("determinant-line block at degree " +
                                std::to_string(k) + " is not square");
        const double d = b.cols() == 0 ? 1.0 : std::abs(b.determinant());
        norm *= std::pow(d, el.exponent(k));
    }
    return norm;
}

double reidemeister_norm(const FiniteHilbertComplex& c,
                         const detline::DetLineElement& el) {
    const auto betti = hilbcx::betti_profile(c);
    if (el.bases.size() != betti.size())
        throw DegreeMismatch("element degree range does not match the complex");
    for (size_t k = 0; k < betti.size(); ++k)
        if (el.bases[k].rows() != betti[k] || el.bases[k].cols() != betti[k])
            throw BasisMismatch("element block at degree " + std::to_string(k) +
                                " does not fill the cohomology");
    return l2_det_norm(el) / hilbcx::torsion(c);
}

GluingReport verify_lesch(const simplicial::SplitComplex& split,
                          const localsys::LocalSystem& l, double tol) {
    const auto sp = hilbcx::build_split_complex(split, l);
    const auto [ses, ses_pr] = hilbcx::assemble_ses(split, l);
    const auto les = hilbcx::long_exact_sequence(ses);
    const auto les_pr = hilbcx::long_exact_sequence(ses_pr);

    GluingReport r;
    r.tau_split = hilbcx::torsion(sp.complex);
    r.tau_rel1 = hilbcx::torsion(ses.a);
    r.tau_abs2 = hilbcx::torsion(ses.c);
    r.tau_rel2 = hilbcx::torsion(ses_pr.a);
    r.tau_abs1 = hilbcx::torsion(ses_pr.c);
    r.tau_hc = hilbcx::les_torsion(les);
    r.tau_hc_primed = hilbcx::les_torsion(les_pr);
    r.euler_chi_n =
        sp.rank * simplicial::euler_characteristic(split.interface);
    const double anomaly = std::exp2(-0.5 * r.euler_chi_n);
    const double rhs = r.tau_rel1 * r.tau_abs2 * r.tau_hc * anomaly;
    const double rhs_pr = r.tau_rel2 * r.tau_abs1 * r.tau_hc_primed * anomaly;
    r.residual = rel_err(r.tau_split, rhs);
    r.residual_primed = rel_err(r.tau_split, rhs_pr);
    r.consistency = std::abs(rhs - rhs_pr) / r.tau_split;
    r.signs.nu = hilbcx::nu_sign(les);
    r.signs.nu_prime = hilbcx::nu_sign(les_pr);
    r.tolerance = tol;
    r.pass = r.residual <= tol;
    r.pass_primed = r.residual_primed <= tol;
    r.profile = les.dims;
    return r;
}

NormGluingReport verify_comb_gluing_norms(const simplicial::SplitComplex& split,
                                          const localsys::LocalSystem& l,
                                          const detline::DetLineElement& x,
                                          const detline::DetLineElement& y,
                                          double tol) {
    const auto sp = hilbcx::build_split_complex(split, l);
    const auto [ses, ses_pr] = hilbcx::assemble_ses(split, l);
    const auto les = hilbcx::long_exact_sequence(ses);
    const auto les_pr = hilbcx::long_exact_sequence(ses_pr);

    NormGluingReport r;
    r.euler_chi_n =
        sp.rank * simplicial::euler_characteristic(split.interface);
    r.tolerance = tol;
    const double two_plus = std::exp2(0.5 * r.euler_chi_n);
    const double two_minus = std::exp2(-0.5 * r.euler_chi_n);

    const auto glued = detline::psi(les, x, y);
    r.lhs = reidemeister_norm(sp.complex, glued);
    const double nx = reidemeister_norm(ses.a, x);
    const double ny = reidemeister_norm(ses.c, y);
    r.rhs_plus = two_plus * nx * ny;
    r.rhs_minus = two_minus * nx * ny;
    r.residual_plus = rel_err(r.lhs, r.rhs_plus);
    r.residual_minus = rel_err(r.lhs, r.rhs_minus);
    r.plus_holds = r.residual_plus <= tol;
    r.minus_holds = r.residual_minus <= tol;

    // the intermediate factorization through the sequence torsion, plain
    // L2 determinant norms on both sides
    r.l2_factor_residual = rel_err(
        l2_det_norm(glued),
        hilbcx::les_torsion(les) * l2_det_norm(x) * l2_det_norm(y));

    const auto tp = detline::phase_corrected_towers(les_pr);
    const auto glued_pr = detline::psi(les_pr, tp.x, tp.y);
    r.lhs_primed = reidemeister_norm(sp.complex, glued_pr);
    const double nxp = reidemeister_norm(ses_pr.a, tp.x);
    const double nyp = reidemeister_norm(ses_pr.c, tp.y);
    r.rhs_plus_primed = two_plus * nxp * nyp;
    r.rhs_minus_primed = two_minus * nxp * nyp;
    r.residual_plus_primed = rel_err(r.lhs_primed, r.rhs_plus_primed);
    r.residual_minus_primed = rel_err(r.lhs_primed, r.rhs_minus_primed);
    r.plus_holds_primed = r.residual_plus_primed <= tol;
    r.minus_holds_primed = r.residual_minus_primed <= tol;
    return r;
}

NormGluingReport verify_comb_gluing_norms(const simplicial::SplitComplex& split,
                                          const localsys::LocalSystem& l,
                                          double tol) {
    const auto [ses, ses_pr] = hilbcx::assemble_ses(split, l);
    const auto les = hilbcx::long_exact_sequence(ses);
    const auto t = detline::phase_corrected_towers(les);
    return verify_comb_gluing_norms(split, l, t.x, t.y, tol);
}

AnticipationReport verify_anticipation_isometries(
    const simplicial::SplitComplex& split, const localsys::LocalSystem& l,
    double tol) {
    const auto [ses, ses_pr] = hilbcx::assemble_ses(split, l);
    const int top = ses.b.top_degree();

    hilbcx::ShortExactSequence antic;
    antic.a = direct_sum(ses.a, ses_pr.a);
    antic.b = ses.b;
    antic.c = pad_to(
        hilbcx::build_twisted_complex(
            split.interface,
            localsys::restrict_local_system(split.total, l, split.interface)),
        top);

    AnticipationReport r;
    r.tolerance = tol;
    std::vector<CMatrix> thetas;
    for (int k = 0; k <= top; ++k) {
        const Eigen::Index nab = antic.a.dims[static_cast<size_t>(k)];
        const Eigen::Index nw = antic.c.dims[static_cast<size_t>(k)];
        const Eigen::Index nall = antic.b.dims[static_cast<size_t>(k)];
        if (nall != nab + nw)
            throw DimensionMismatch(
                "interface blocks do not complement the part blocks");
        CMatrix alpha = CMatrix::Zero(nall, nab);
        alpha.topRows(nab) = CMatrix::Identity(nab, nab);
        CMatrix beta = CMatrix::Zero(nw, nall);
        beta.rightCols(nw) = CMatrix::Identity(nw, nw);
        thetas.push_back(beta.adjoint());
        antic.alpha.push_back(std::move(alpha));
        antic.beta.push_back(std::move(beta));
    }
    // exactness, isometric inclusion, and the chain-map property of the
    // interface projection
    hilbcx::check_ses(antic, tol);

    for (int k = 0; k <= top; ++k) {
        const size_t kd = static_cast<size_t>(k);
        const CMatrix& th = thetas[kd];
        const CMatrix& al = antic.alpha[kd];
        const CMatrix& be = antic.beta[kd];
        const Eigen::Index nw = th.cols();
        const Eigen::Index nall = th.rows();
        r.beta_theta_residual = std::max(
            r.beta_theta_residual,
            (be * th - CMatrix::Identity(nw, nw)).norm());
        r.theta_isometry_residual = std::max(
            r.theta_isometry_residual,
            (th.adjoint() * th - CMatrix::Identity(nw, nw)).norm());
        r.complement_residual = std::max(
            r.complement_residual,
            (th * th.adjoint() + al * al.adjoint() -
             CMatrix::Identity(nall, nall))
                .norm());
        r.beta_isometry_residual = std::max(
            r.beta_isometry_residual,
            (be * be.adjoint() - CMatrix::Identity(nw, nw)).norm());
    }

    const auto les = hilbcx::long_exact_sequence(antic);
    r.tau_split = hilbcx::torsion(antic.b);
    r.tau_parts = hilbcx::torsion(antic.a);
    r.tau_interface = hilbcx::torsion(antic.c);
    r.tau_les = hilbcx::les_torsion(les);
    r.multiplicativity_residual = rel_err(
        r.tau_split, r.tau_parts * r.tau_interface * r.tau_les);
    r.pass = r.beta_theta_residual <= tol && r.theta_isometry_residual <= tol &&
             r.complement_residual <= tol && r.beta_isometry_residual <= tol &&
             r.multiplicativity_residual <= tol;
    return r;
}

double circle_torsion_oracle(double theta) {
    const double value = std::abs(1.0 - std::polar(1.0, theta));
    if (value < 1e-12)
        throw DegenerateHolonomy(
            "holonomy 1 has nonzero cohomology, no analytic oracle");
    return value;
}

localsys::LocalSystem circle_flat_system(int n_edges, double theta) {
    if (n_edges < 3)
        throw WrongDimension("circle needs at least 3 edges");
    localsys::LocalSystem l;
    l.rank = 1;
    CMatrix one = CMatrix::Identity(1, 1);
    for (int i = 0; i + 1 < n_edges; ++i) l.transport[{i, i + 1}] = one;
    CMatrix wrap(1, 1);
    wrap(0, 0) = std::polar(1.0, theta);
    l.transport[{0, n_edges - 1}] = wrap;
    return l;
}

CircleCmReport verify_circle_cheeger_mueller(double theta,
                                             const std::vector<int>& subdivisions,
                                             double tol) {
    CircleCmReport r;
    r.theta = theta;
    r.subdivisions = subdivisions;
    r.tolerance = tol;
    r.oracle = circle_torsion_oracle(theta);
    for (int n : subdivisions) {
        const auto circle = simplicial::make_circle(n);
        const auto sys = circle_flat_system(n, theta);
        const double tau =
            hilbcx::torsion(hilbcx::build_twisted_complex(circle, sys));
        r.torsions.push_back(tau);
        r.worst_residual =
            std::max(r.worst_residual, rel_err(tau, r.oracle));
    }
    for (size_t i = 0; i < r.torsions.size(); ++i)
        for (size_t j = i + 1; j < r.torsions.size(); ++j)
            r.pairwise_residual =
                std::max(r.pairwise_residual,
                         std::abs(r.torsions[i] - r.torsions[j]) / r.oracle);
    r.pass = r.worst_residual <= tol && r.pairwise_residual <= tol;
    return r;
}

ScalarGluingReport scalar_gluing_check(int n_edges, int arc_edges, double theta,
                                       double tol) {
    const auto split = simplicial::make_split_circle(n_edges, arc_edges);
    const auto sys = circle_flat_system(n_edges, theta);

    ScalarGluingReport r;
    r.tolerance = tol;
    r.gluing = verify_lesch(split, sys, tol);
    r.oracle_applicable = std::abs(1.0 - std::polar(1.0, theta)) >= 1e-12;
    if (r.oracle_applicable) {
        r.oracle = circle_torsion_oracle(theta);
        // on the acyclic path the total-complex torsion is the oracle, and
        // the interface chart converts it into the split torsion
        const double predicted =
            r.oracle * std::exp2(-0.5 * r.gluing.euler_chi_n);
        r.oracle_residual = rel_err(r.gluing.tau_split, predicted);
    }
    r.pass = r.gluing.pass && r.gluing.pass_primed &&
             (!r.oracle_applicable || r.oracle_residual <= tol);
    return r;
}

std::pair<simplicial::SplitComplex, localsys::LocalSystem> random_split_instance(
    std::uint64_t seed, const SynthOptions& opt) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const int nv = static_cast<int>(
            rng.uniform_int(4, std::max(4, opt.max_vertices)));
        auto pick_simplex = [&](int size) {
            std::set<int> vs;
            while (static_cast<int>(vs.size()) < size)
                vs.insert(static_cast<int>(rng.uniform_int(0, nv - 1)));
            return simplicial::Simplex(vs.begin(), vs.end());
        };

        std::set<simplicial::Simplex> cells;
        const int ntri = static_cast<int>(rng.uniform_int(0, 2));
        const int nedge = static_cast<int>(rng.uniform_int(2, 4));
        for (int i = 0; i < ntri; ++i) cells.insert(pick_simplex(3));
        for (int i = 0; i < nedge; ++i) cells.insert(pick_simplex(2));
        if (cells.size() < 2) continue;

        std::set<simplicial::Simplex> all;
        for (const auto& c : cells) close_faces(c, all);
        if (static_cast<int>(all.size()) > opt.max_simplices) continue;

        const auto total = simplicial::build_complex(
            std::vector<simplicial::Simplex>(all.begin(), all.end()));
        if (total.count(1) == 0) continue;

        // partition the top cells into two nonempty groups, parts are the
        // face closures
        std::vector<simplicial::Simplex> tops(cells.begin(), cells.end());
        const auto ncut = rng.uniform_int(
            1, static_cast<std::int64_t>(tops.size()) - 1);
        for (size_t i = tops.size(); i > 1; --i)
            std::swap(tops[i - 1],
                      tops[static_cast<size_t>(rng.uniform_int(
                          0, static_cast<std::int64_t>(i) - 1))]);
        std::set<simplicial::Simplex> m1, m2;
        for (size_t i = 0; i < tops.size(); ++i)
            close_faces(tops[i], static_cast<std::int64_t>(i) < ncut ? m1 : m2);
        const auto split = simplicial::split_input(
            total, std::vector<simplicial::Simplex>(m1.begin(), m1.end()),
            std::vector<simplicial::Simplex>(m2.begin(), m2.end()));

        // flat phases: closed against every face boundary
        const auto& edges = total.simplices(1);
        const Eigen::Index ne = static_cast<Eigen::Index>(edges.size());
        Eigen::VectorXd phi(ne);
        if (total.dim() >= 2 && total.count(2) > 0) {
            const CMatrix b2 = simplicial::boundary_matrix(total, 2);
            const auto ker = numlin::kernel_basis(CMatrix(b2.transpose()));
            if (ker.size() == 0)
                phi.setZero();
            else
                phi = (ker.vectors *
                       rng.complex_gaussian(ker.size(), 1))
                          .real();
        } else {
            for (Eigen::Index i = 0; i < ne; ++i) phi(i) = rng.uniform(-1.0, 1.0);
        }
        const double peak = phi.cwiseAbs().maxCoeff();
        if (peak > 0)
            phi *= opt.max_phase * rng.uniform(0.3, 1.0) / peak;

        const Eigen::Index rank = opt.rank;
        const CMatrix frame = rng.unitary(rank);
        Eigen::VectorXd kappa(rank);
        kappa(0) = 1.0;
        for (Eigen::Index j = 1; j < rank; ++j) kappa(j) = rng.uniform(-1.0, 1.0);
        std::map<int, CMatrix> gauge;
        for (const auto& v : total.simplices(0))
            gauge[v[0]] = rng.unitary(rank);

        localsys::LocalSystem l;
        l.rank = static_cast<int>(rank);
        for (Eigen::Index e = 0; e < ne; ++e) {
            const int a = edges[static_cast<size_t>(e)][0];
            const int b = edges[static_cast<size_t>(e)][1];
            CMatrix d = CMatrix::Zero(rank, rank);
            for (Eigen::Index j = 0; j < rank; ++j)
                d(j, j) = std::polar(1.0, phi(e) * kappa(j));
            l.transport[{a, b}] =
                gauge.at(a) * frame * d * frame.adjoint() * gauge.at(b).adjoint();
        }
        if (!localsys::validate_local_system(total, l).pass) continue;
        if (opt.min_sv_ratio > 0) {
            try {
                if (!well_conditioned(split, l, opt.min_sv_ratio)) continue;
            } catch (const Error&) {
                continue;
            }
        }
        return {split, l};
    }
    throw InvalidSystem("could not sample a flat split instance");
}

GluingReport verify_lesch_random(std::uint64_t seed, const SynthOptions& opt,
                                 double tol) {
    const auto [split, l] = random_split_instance(seed, opt);
    GluingReport r = verify_lesch(split, l, tol);
    r.seed = seed;
    return r;
}

}  // namespace torsionlab::gluelab
