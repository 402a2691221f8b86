#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "gauge.hpp"
#include "hilbcx.hpp"
#include "localsys.hpp"
#include "simplicial.hpp"

namespace torsionlab::cli {

// input documents: key order irrelevant
using json = nlohmann::json;
// reports: insertion order is the emission order
using ojson = nlohmann::ordered_json;

struct JobSpec {
    std::string command;  // torsion, glue-check, les, refined-split, gauge,
                          // circle-cm, synth-suite
    std::string input_path;  // required by file-driven commands
    std::uint64_t seed = 1;
    double tol = 1e-9;        // identity residual bound
    double rank_tol = 1e-10;  // spectral rank threshold
    std::string out_path;     // written atomically when nonempty
};

// worker cap: TORSIONLAB_THREADS when set, hardware concurrency otherwise
int thread_budget();

struct Results {
    std::string command;
    ojson inputs = ojson::object();
    std::uint64_t seed = 0;
    ojson tolerances = ojson::object();
    ojson quantities = ojson::object();
    ojson residuals = ojson::object();
    bool pass = true;  // empty results hold vacuously
};

// {command, inputs, seed, tolerances, quantities, residuals, pass} plus a
// trailing timestamp; everything but the timestamp is a pure function of the
// results
ojson emit_report(const Results& r);

// canonical text: one object key per line, scalar arrays inline, floats with
// 17 significant digits and always carrying a decimal point or exponent
std::string render_report(const ojson& report);

// write via a sibling temp file and rename; IoFailure on any step
void write_atomic(const std::string& path, const std::string& text);

// read + parse; MalformedDocument names the problem
json load_document(const std::string& path);

// ---- document pieces <-> domain types ----
// matrices are rows of [re, im] pairs

numlin::CMatrix parse_matrix(const json& m);
json matrix_to_json(const numlin::CMatrix& m);

json complex_to_json(const simplicial::SimplicialComplex& k);

// {"rank": n, "edges": {"a-b": matrix}}, keys sorted a<b
localsys::LocalSystem parse_local_system(const json& doc);
json local_system_to_json(const localsys::LocalSystem& l);

// needs "complex" and "split": {"part1": [simplex...], "part2": [...]}
simplicial::SplitComplex parse_split(const json& doc);
json split_to_json(const simplicial::SplitComplex& split);

// needs "hilbert_complex": {"dims": [..], "d": [matrix per consecutive
// degree pair, [] for a zero block]}
hilbcx::FiniteHilbertComplex parse_hilbert_complex(const json& doc);

// {"x_grid": [..], "y_shape": [..], "y_steps": [..],
//  "omega0": [x][y]matrix, "omega_tan": [dir][x][y]matrix}
gauge::CollarConnection parse_collar(const json& doc);
json collar_to_json(const gauge::CollarConnection& conn);

// report for one job, no output side effects; throws on malformed input
ojson run_report(const JobSpec& job);

// full pipeline: report to stdout and optionally --out.
// 0 = identities hold, 1 = an identity violated, 2 = malformed input
int run(const JobSpec& job);

}  // namespace torsionlab::cli
