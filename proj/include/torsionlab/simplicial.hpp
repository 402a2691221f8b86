#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "numlin.hpp"

namespace torsionlab::simplicial {

// Vertex tuple, strictly increasing. Orientation is the induced ordering.
using Simplex = std::vector<int>;

struct SimplicialComplex {
    // by_dim[k]: lexicographically sorted list of k-simplices
    std::vector<std::vector<Simplex>> by_dim;

    int dim() const { return static_cast<int>(by_dim.size()) - 1; }
    int count(int k) const {
        return (k >= 0 && k <= dim()) ? static_cast<int>(by_dim[static_cast<size_t>(k)].size()) : 0;
    }
    const std::vector<Simplex>& simplices(int k) const;
    // -1 when absent
    int index_of(int k, const Simplex& s) const;
    bool contains(const Simplex& s) const;
    int vertex_count() const { return count(0); }
    std::vector<Simplex> all_simplices() const;

private:
    friend SimplicialComplex build_complex(const std::vector<Simplex>&);
    std::vector<std::map<Simplex, int>> index_;
};

// Validates closure under faces, strict vertex ordering, and uniqueness.
SimplicialComplex build_complex(const std::vector<Simplex>& simplices);

// Parses {"simplices": {"0": [[v], ...], "1": [[v,w], ...], ...}}.
SimplicialComplex load_complex(const nlohmann::json& document);

// Signed face incidences: entry (face, simplex) = (-1)^i when the face omits
// vertex position i. Valid for 1 <= k <= dim.
numlin::CMatrix boundary_matrix(const SimplicialComplex& k_complex, int k);

int euler_characteristic(const SimplicialComplex& k_complex);

struct SplitComplex {
    SimplicialComplex total;
    SimplicialComplex part1;
    SimplicialComplex part2;
    SimplicialComplex interface;

    bool in_part1(const Simplex& s) const;
    bool in_part2(const Simplex& s) const;
    bool in_interface(const Simplex& s) const;
};

// markers: the full simplex lists of the two parts (all dimensions).
SplitComplex split_input(const SimplicialComplex& total,
                         const std::vector<Simplex>& part1_marks,
                         const std::vector<Simplex>& part2_marks);

// ---- built-in generators (deterministic fixtures) ----

// n >= 3 vertices 0..n-1, edges (i,i+1) and (0,n-1)
SimplicialComplex make_circle(int n_edges);
// n+1 vertices, edges (i,i+1)
SimplicialComplex make_interval(int n_edges);
SimplicialComplex make_s0();
// circle split into the arc on edges 0..arc1_edges-1 and the complementary
// arc; interface = two vertices {0, arc1_edges}
SplitComplex make_split_circle(int n_edges, int arc1_edges);
// interval split at an interior vertex; interface = one point
SplitComplex make_split_interval(int n_edges, int cut_vertex);

}  // namespace torsionlab::simplicial
