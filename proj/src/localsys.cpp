#include "torsionlab/localsys.hpp"

#include <cmath>

namespace torsionlab::localsys {

namespace {

std::string edge_str(int a, int b) {
    return std::to_string(a) + "-" + std::to_string(b);
}

}  // namespace

CMatrix LocalSystem::transport_into(int to, int from) const {
    const auto key = std::make_pair(std::min(to, from), std::max(to, from));
    auto it = transport.find(key);
    if (it == transport.end())
        throw MissingEdge(edge_str(key.first, key.second));
    if (to < from) return it->second;
    return it->second.inverse();
}

bool LocalSystem::has_edge(int a, int b) const {
    return transport.count({std::min(a, b), std::max(a, b)}) > 0;
}

LocalSystem trivial_system(int rank) {
    LocalSystem l;
    l.rank = rank;
    return l;
}

ValidationReport validate_local_system(const simplicial::SimplicialComplex& k,
                                       const LocalSystem& l, double tol) {
    ValidationReport rep;
    const Eigen::Index n = l.rank;
    for (const auto& e : k.simplices(1)) {
        auto it = l.transport.find({e[0], e[1]});
        if (it == l.transport.end()) throw MissingEdge(edge_str(e[0], e[1]));
        const CMatrix& t = it->second;
        if (t.rows() != n || t.cols() != n)
            throw InvalidSystem("transport on " + edge_str(e[0], e[1]) +
                                " has wrong shape");
        const double defect =
            (t.adjoint() * t - CMatrix::Identity(n, n)).norm();
        rep.unitarity_defect = std::max(rep.unitarity_defect, defect);
    }
    // flatness: around [v0,v1,v2], T(v0<-v1) T(v1<-v2) = T(v0<-v2)
    for (const auto& tri : k.simplices(2)) {
        const CMatrix cycle = l.transport_into(tri[0], tri[2]).inverse() *
                              l.transport_into(tri[0], tri[1]) *
                              l.transport_into(tri[1], tri[2]);
        const double defect = (cycle - CMatrix::Identity(n, n)).norm();
        rep.holonomy_defect = std::max(rep.holonomy_defect, defect);
    }
    rep.pass = rep.unitarity_defect <= tol && rep.holonomy_defect <= tol;
    return rep;
}

void require_valid(const simplicial::SimplicialComplex& k, const LocalSystem& l,
                   double tol) {
    const ValidationReport rep = validate_local_system(k, l, tol);
    if (!rep.pass)
        throw InvalidSystem("unitarity defect " +
                            std::to_string(rep.unitarity_defect) +
                            ", holonomy defect " +
                            std::to_string(rep.holonomy_defect));
}

LocalSystem restrict_local_system(const simplicial::SimplicialComplex& k,
                                  const LocalSystem& l,
                                  const simplicial::SimplicialComplex& sub) {
    LocalSystem out;
    out.rank = l.rank;
    for (const auto& e : sub.simplices(1)) {
        if (k.index_of(1, e) < 0)
            throw NotSubcomplex("edge " + edge_str(e[0], e[1]) +
                                " not in the ambient complex");
        auto it = l.transport.find({e[0], e[1]});
        if (it == l.transport.end()) throw MissingEdge(edge_str(e[0], e[1]));
        out.transport[{e[0], e[1]}] = it->second;
    }
    return out;
}

CMatrix twisted_coboundary(const simplicial::SimplicialComplex& k,
                           const LocalSystem& l, int degree) {
    if (degree < 0 || degree >= k.dim())
        throw DegreeOutOfRange("coboundary degree " + std::to_string(degree));
    const Eigen::Index r = l.rank;
    if (r <= 0) throw InvalidSystem("rank must be positive");
    const auto& rows = k.simplices(degree + 1);
    const auto& cols = k.simplices(degree);
    CMatrix d = CMatrix::Zero(static_cast<Eigen::Index>(rows.size()) * r,
                              static_cast<Eigen::Index>(cols.size()) * r);
    for (size_t j = 0; j < rows.size(); ++j) {
        const simplicial::Simplex& s = rows[j];
        for (size_t i = 0; i < s.size(); ++i) {
            simplicial::Simplex face = s;
            face.erase(face.begin() + static_cast<long>(i));
            const int ci = k.index_of(degree, face);
            CMatrix blk;
            try {
                blk = (i == 0)
                          ? l.transport_into(s[0], s[1])
                          : CMatrix((i % 2 == 0 ? 1.0 : -1.0) *
                                    CMatrix::Identity(r, r));
            } catch (const MissingEdge& e) {
                throw InvalidSystem(e.what());
            }
            d.block(static_cast<Eigen::Index>(j) * r, ci * r, r, r) += blk;
        }
    }
    return d;
}

cdouble poincare_pairing_dim1(const simplicial::SimplicialComplex& k,
                              const std::vector<double>& cycle_coeffs,
                              const LocalSystem& l, const CVector& f,
                              const CVector& g) {
    if (k.dim() != 1)
        throw WrongDimension("pairing defined for 1-dimensional complexes");
    const Eigen::Index r = l.rank;
    const auto& verts = k.simplices(0);
    const auto& edges = k.simplices(1);
    if (cycle_coeffs.size() != edges.size())
        throw WrongDimension("cycle coefficient count mismatch");
    if (f.size() != static_cast<Eigen::Index>(verts.size()) * r ||
        g.size() != static_cast<Eigen::Index>(edges.size()) * r)
        throw WrongDimension("cochain size mismatch");

    // closedness: sum_e c_e (target - source) = 0 per vertex
    std::vector<double> div(verts.size(), 0.0);
    for (size_t e = 0; e < edges.size(); ++e) {
        div[static_cast<size_t>(k.index_of(0, {edges[e][1]}))] += cycle_coeffs[e];
        div[static_cast<size_t>(k.index_of(0, {edges[e][0]}))] -= cycle_coeffs[e];
    }
    for (double v : div)
        if (std::abs(v) > 1e-12)
            throw NotClosedCycle("boundary of the supplied cycle is nonzero");

    cdouble acc(0.0, 0.0);
    for (size_t e = 0; e < edges.size(); ++e) {
        if (cycle_coeffs[e] == 0.0) continue;
        const int base = k.index_of(0, {edges[e][0]});
        const CVector fv = f.segment(base * r, r);
        const CVector ge = g.segment(static_cast<Eigen::Index>(e) * r, r);
        acc += cycle_coeffs[e] * fv.dot(ge);  // dot conjugates the first slot
    }
    return acc;
}

}  // namespace torsionlab::localsys
