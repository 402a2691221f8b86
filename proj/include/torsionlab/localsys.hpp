#pragma once

#include <map>
#include <utility>

#include "numlin.hpp"
#include "simplicial.hpp"

namespace torsionlab::localsys {

using numlin::CMatrix;
using numlin::CVector;
using numlin::cdouble;

// Unitary parallel transport on oriented edges. For a sorted edge (a, b),
// a < b, the stored matrix carries fiber values at b into the fiber at a
// (the direction the twisted coboundary consumes). Reversal is the inverse.
struct LocalSystem {
    int rank = 0;
    std::map<std::pair<int, int>, CMatrix> transport;

    // transport into `to` from `from`; the edge must exist
    CMatrix transport_into(int to, int from) const;
    bool has_edge(int a, int b) const;
};

LocalSystem trivial_system(int rank);

struct ValidationReport {
    double unitarity_defect = 0.0;
    double holonomy_defect = 0.0;
    bool pass = false;
};

// Reports the worst unitarity defect over edges and the worst holonomy defect
// around 2-simplices; passes iff both are within tol.
ValidationReport validate_local_system(const simplicial::SimplicialComplex& k,
                                       const LocalSystem& l, double tol = 1e-9);

// Throws InvalidSystem when validation fails; gate used by complex builders.
void require_valid(const simplicial::SimplicialComplex& k, const LocalSystem& l,
                   double tol = 1e-9);

LocalSystem restrict_local_system(const simplicial::SimplicialComplex& k,
                                  const LocalSystem& l,
                                  const simplicial::SimplicialComplex& sub);

// Block matrix of the twisted coboundary d_k : C^k -> C^{k+1},
//   (df)([v0..v_{k+1}]) = T(v0<-v1) f([v1..]) + sum_{i>=1} (-1)^i f([..vhat_i..]).
// Cochain values are based at the least vertex of each simplex.
CMatrix twisted_coboundary(const simplicial::SimplicialComplex& k,
                           const LocalSystem& l, int degree);

// sum_e coeff(e) <f(least vertex of e), g(e)> for a 1-dimensional complex
// with a closed fundamental cycle. Descends to cohomology when the system is
// flat and unitary.
cdouble poincare_pairing_dim1(const simplicial::SimplicialComplex& k,
                              const std::vector<double>& cycle_coeffs,
                              const LocalSystem& l, const CVector& f,
                              const CVector& g);

}  // namespace torsionlab::localsys
