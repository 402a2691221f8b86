#pragma once

// Deterministic fixtures shared by the test binaries. Circle systems store
// identity transport on the interior edges and put the whole holonomy on the
// wrap edge (0, n-1), so the loop 0 -> 1 -> ... -> n-1 -> 0 transports by
// exactly the given matrix.

#include <complex>
#include <cstdint>

#include "torsionlab/localsys.hpp"
#include "torsionlab/rng.hpp"
#include "torsionlab/simplicial.hpp"

namespace torsionlab::testfix {

using numlin::cdouble;
using numlin::CMatrix;

inline localsys::LocalSystem circle_system(int n_edges, const CMatrix& holonomy) {
    localsys::LocalSystem sys;
    sys.rank = static_cast<int>(holonomy.rows());
    const CMatrix id = CMatrix::Identity(holonomy.rows(), holonomy.cols());
    for (int i = 0; i + 1 < n_edges; ++i) sys.transport[{i, i + 1}] = id;
    sys.transport[{0, n_edges - 1}] = holonomy;
    return sys;
}

inline localsys::LocalSystem identity_system(const simplicial::SimplicialComplex& k,
                                             int rank) {
    localsys::LocalSystem sys;
    sys.rank = rank;
    if (k.dim() >= 1)
        for (const auto& e : k.simplices(1))
            sys.transport[{e[0], e[1]}] = CMatrix::Identity(rank, rank);
    return sys;
}

inline localsys::LocalSystem circle_system(int n_edges, double theta) {
    CMatrix u(1, 1);
    u(0, 0) = std::polar(1.0, theta);
    return circle_system(n_edges, u);
}

// Unitary with eigenvalues e^{i theta}, e^{-i theta/2} in a seeded random frame.
inline CMatrix rank2_holonomy(double theta, std::uint64_t seed) {
    Rng rng(seed);
    const CMatrix q = rng.unitary(2);
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = std::polar(1.0, theta);
    d(1, 1) = std::polar(1.0, -theta / 2.0);
    return q * d * q.adjoint();
}

// Conjugates every stored transport by independent per-vertex unitaries.
// Gauge-equivalent systems share all torsion quantities.
inline localsys::LocalSystem gauge_scramble(const simplicial::SimplicialComplex& k,
                                            const localsys::LocalSystem& l, Rng& rng) {
    std::vector<CMatrix> g;
    g.reserve(k.simplices(0).size());
    for (size_t v = 0; v < k.simplices(0).size(); ++v) g.push_back(rng.unitary(l.rank));
    auto gauge_at = [&](int v) -> const CMatrix& {
        return g[static_cast<size_t>(k.index_of(0, {v}))];
    };
    localsys::LocalSystem out;
    out.rank = l.rank;
    for (const auto& [edge, m] : l.transport)
        out.transport[edge] = gauge_at(edge.first) * m * gauge_at(edge.second).adjoint();
    return out;
}

}  // namespace torsionlab::testfix
