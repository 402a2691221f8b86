#include <CLI11.hpp>

#include "torsionlab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "torsionlab: exact torsion, gluing, and temporal-gauge identity "
        "checks for triangulated split spaces"};
    torsionlab::cli::JobSpec job;
    app.add_option("command", job.command,
                   "torsion | glue-check | les | refined-split | gauge | "
                   "circle-cm | synth-suite")
        ->required();
    app.add_option("--input", job.input_path, "input JSON document");
    app.add_option("--seed", job.seed, "seed for synthesized instances");
    app.add_option("--tol", job.tol, "identity residual bound (default 1e-9)");
    app.add_option("--rank-tol", job.rank_tol,
                   "spectral rank threshold (default 1e-10)");
    app.add_option("--out", job.out_path, "write the report here atomically");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are malformed input
    }
    return torsionlab::cli::run(job);
}
