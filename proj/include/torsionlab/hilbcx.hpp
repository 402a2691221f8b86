#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "localsys.hpp"
#include "numlin.hpp"
#include "rng.hpp"
#include "simplicial.hpp"

namespace torsionlab::hilbcx {

using numlin::Basis;
using numlin::cdouble;
using numlin::CMatrix;

// Cochain complex of standard finite-dimensional Hilbert spaces
//   C^0 -> C^1 -> ... -> C^m,   coordinates orthonormal in every degree.
struct FiniteHilbertComplex {
    std::vector<Eigen::Index> dims;  // dims[k] = dim C^k
    std::vector<CMatrix> d;          // d[k]: C^k -> C^{k+1}; size dims.size()-1

    int top_degree() const { return static_cast<int>(dims.size()) - 1; }
    // shape consistency and d_{k+1} d_k = 0 within tol
    void check(double tol = 1e-10) const;
};

struct CohomologySpace {
    int degree = 0;
    Basis harmonic_basis;  // orthonormal, inside C^degree
    Eigen::Index dim() const { return harmonic_basis.size(); }
};

// Delta_k = d_k* d_k + d_{k-1} d_{k-1}*
CMatrix laplacian(const FiniteHilbertComplex& c, int k);

// log tau = 1/2 sum_k (-1)^k k zeta'(0, Delta_k), zeta'(0) = -sum_{lambda>0} log lambda
double log_torsion(const FiniteHilbertComplex& c,
                   double rank_tol = numlin::kRankTol);
double torsion(const FiniteHilbertComplex& c,
               double rank_tol = numlin::kRankTol);

CohomologySpace harmonic_cohomology(const FiniteHilbertComplex& c, int k,
                                    double rank_tol = numlin::kRankTol);
std::vector<Eigen::Index> betti_profile(const FiniteHilbertComplex& c,
                                        double rank_tol = numlin::kRankTol);

FiniteHilbertComplex build_twisted_complex(const simplicial::SimplicialComplex& k,
                                           const localsys::LocalSystem& l);

// Cochains on `on` vanishing on the subcomplex `w`; differential is the
// compression of the twisted coboundary of `on`.
FiniteHilbertComplex build_relative_complex(const simplicial::SimplicialComplex& on,
                                            const simplicial::SimplicialComplex& w,
                                            const localsys::LocalSystem& l);

// Pairs (f, g) of cochains on the two parts agreeing on the interface.
// Coordinate layout per degree: [part1-only][part2-only][interface], and the
// interface block stores sqrt(2) * value so that standard coordinates are
// orthonormal for the part1 + part2 inner product (interface weight 2).
struct SplitCochainComplex {
    FiniteHilbertComplex complex;
    int rank = 1;
    // per degree, the simplices backing each coordinate block (sorted)
    std::vector<std::vector<simplicial::Simplex>> part1_only;
    std::vector<std::vector<simplicial::Simplex>> part2_only;
    std::vector<std::vector<simplicial::Simplex>> interface;
};

SplitCochainComplex build_split_complex(const simplicial::SplitComplex& split,
                                        const localsys::LocalSystem& l);

// 0 -> A --alpha--> B --beta--> C -> 0, degreewise
struct ShortExactSequence {
    FiniteHilbertComplex a, b, c;
    std::vector<CMatrix> alpha;  // A^k -> B^k
    std::vector<CMatrix> beta;   // B^k -> C^k
};

// chain-map property, alpha isometric onto image, beta alpha = 0, and
// rank(beta) = dim B - dim A per degree; throws ExactnessFailure
void check_ses(const ShortExactSequence& s, double tol = 1e-9);

// unprimed: 0 -> C(part1, interface) -> C# -> C(part2) -> 0; the primed
// mirror swaps the roles of the parts. Relative/absolute complexes are padded
// with zero degrees up to the total dimension so all degrees align.
std::pair<ShortExactSequence, ShortExactSequence> assemble_ses(
    const simplicial::SplitComplex& split, const localsys::LocalSystem& l);

// Node i = 3k + role: role 0 = relative, 1 = glued, 2 = absolute, cohomology
// degree k. Graded as a complex starting at node 0.
struct LongExactSequence {
    std::vector<Eigen::Index> dims;  // per node
    std::vector<CMatrix> maps;       // maps[i]: node i -> node i+1;
                                     // size = node count, last has 0 rows

    int node_count() const { return static_cast<int>(dims.size()); }
    int degree_count() const { return node_count() / 3; }  // m + 1
    static int role_of(int node) { return node % 3; }
    static int degree_of(int node) { return node / 3; }
};

LongExactSequence long_exact_sequence(const ShortExactSequence& ses,
                                      double rank_tol = numlin::kRankTol);

// worst of: consecutive-composite norms and the rank conditions
// rank(in) = dim - rank(out) at every node (violation scores 1.0)
double exactness_defect(const LongExactSequence& les, double rank_tol = 1e-9);

// Reference exactness basis per node: [lift block | image block] where the
// lifts are an orthonormal basis of (ker out)^perp and the image block is the
// incoming map applied to the previous node's lifts. The rng overload draws
// random admissible lifts instead (images recomputed accordingly); any such
// choice must give the same Phi action.
std::vector<CMatrix> node_reference_bases(const LongExactSequence& les);
std::vector<CMatrix> node_reference_bases(const LongExactSequence& les, Rng& rng);

struct PhaseCorrectedNode {
    CMatrix basis;           // orthonormal [image-perp | image] columns
    double det = 1.0;        // coordinate change vs the reference basis, > 0
    Eigen::Index image_dim = 0;
};

// Orthonormal basis respecting the orthogonal decomposition (image ^perp
// first, image span last), rotated by a global phase so the coordinate
// change against refs[node] is real positive.
PhaseCorrectedNode phase_corrected_node(const LongExactSequence& les, int node,
                                        const std::vector<CMatrix>& refs);

// tau(H): product of coordinate-change determinants of the phase-corrected
// bases, exponent (-1)^k on relative/absolute nodes and (-1)^{k+1} on glued
// nodes. Strictly positive. Throws ExactnessFailure when the sequence is not
// exact enough to factor.
double les_torsion(const LongExactSequence& les);

// cross-check route: -(per-node incoming log singular value sums), signed
double les_torsion_log_sv(const LongExactSequence& les);

// the sequence itself viewed as an acyclic complex (zeta route cross-check)
FiniteHilbertComplex les_as_complex(const LongExactSequence& les);

// The reordering/cancellation sign: for every degree k a term
// d(d + (-1)^k)/2 over d = rank(alpha*_k), rank(beta*_k), rank(delta*_k),
// plus the pairwise reordering products of lower-degree tower dimensions.
// Returns nu mod 2.
int nu_sign(const LongExactSequence& les);

// Exact sequence with prescribed node dimensions and well-conditioned maps
// (singular values log-uniform in [smin, smax]); InfeasibleProfile when the
// alternating rank peel goes negative or does not close.
LongExactSequence generate_exact_les(Rng& rng,
                                     const std::vector<Eigen::Index>& dims,
                                     double smin = 0.1, double smax = 10.0);

// Sample node dims from map ranks <= max_rank; palindromic mirrors the rank
// pairs so the glued tower satisfies dim sp_k = dim sp_{m-k} as in the
// geometric setting.
std::vector<Eigen::Index> sample_feasible_profile(Rng& rng, int m,
                                                  Eigen::Index max_rank = 2,
                                                  bool palindromic = true);

// Two exact sequences intertwined by unitary duality maps: the primed one is
// defined by conjugating the adjoints of the unprimed maps, so the duality
// squares commute by construction.
struct DualityInstance {
    int m = 1;
    LongExactSequence les_h;       // rel_k -> sp_k -> abs_k -> rel_{k+1} ...
    LongExactSequence les_hprime;  // same shape with dims mirrored
    std::vector<CMatrix> gamma_rel;    // rel_k  -> abs'_{m-k}
    std::vector<CMatrix> gamma_split;  // sp_k   -> sp'_{m-k}
    std::vector<CMatrix> gamma_abs;    // abs_k  -> rel'_{m-k}
    std::vector<Eigen::Index> hrel, hsp, habs;  // tower dims per degree
};

// profile: 3(m+1) node dims, or empty to sample one (palindromic, ranks <= max_rank)
DualityInstance generate_duality_instance(std::uint64_t seed, int m,
                                          const std::vector<Eigen::Index>& profile = {},
                                          Eigen::Index max_rank = 2);

// max residual of the three duality squares (zero by construction)
double diagram_commutation_defect(const DualityInstance& inst);

}  // namespace torsionlab::hilbcx
