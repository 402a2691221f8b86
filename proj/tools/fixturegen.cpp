// Regenerates the bundled fixture documents. Deterministic: identical bytes
// on every run, so the committed fixtures diff cleanly.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>

#include "torsionlab/cli.hpp"
#include "torsionlab/gauge.hpp"
#include "torsionlab/gluelab.hpp"
#include "torsionlab/localsys.hpp"
#include "torsionlab/simplicial.hpp"

using namespace torsionlab;
using cli::json;
using numlin::CMatrix;

namespace {

namespace fs = std::filesystem;

void save(const fs::path& dir, const std::string& name, const json& doc) {
    // ordered copy keeps the canonical renderer happy; plain json iterates
    // its keys sorted, so the bytes are reproducible
    cli::write_atomic((dir / name).string(),
                      cli::render_report(cli::ojson::parse(doc.dump())));
    std::printf("wrote %s\n", (dir / name).string().c_str());
}

localsys::LocalSystem circle_system(int n, double theta, int rank) {
    localsys::LocalSystem l;
    l.rank = rank;
    const CMatrix id = CMatrix::Identity(rank, rank);
    for (int i = 0; i + 1 < n; ++i) l.transport[{i, i + 1}] = id;
    l.transport[{0, n - 1}] =
        std::exp(std::complex<double>(0.0, theta)) * id;
    return l;
}

localsys::LocalSystem interval_system(int n_edges, int rank) {
    localsys::LocalSystem l;
    l.rank = rank;
    for (int i = 0; i < n_edges; ++i)
        l.transport[{i, i + 1}] = CMatrix::Identity(rank, rank);
    return l;
}

json circle_doc(int n, double theta, int rank) {
    json doc;
    doc["complex"] = cli::complex_to_json(simplicial::make_circle(n));
    doc["local_system"] = cli::local_system_to_json(circle_system(n, theta, rank));
    return doc;
}

json split_circle_doc(int n, int arc1, double theta) {
    json doc = cli::split_to_json(simplicial::make_split_circle(n, arc1));
    doc["local_system"] = cli::local_system_to_json(circle_system(n, theta, 1));
    return doc;
}

json split_interval_doc(int n, int cut, int rank) {
    json doc = cli::split_to_json(simplicial::make_split_interval(n, cut));
    doc["local_system"] = cli::local_system_to_json(interval_system(n, rank));
    return doc;
}

// first seeded instance whose 1-skeleton has a vertex on >= 3 edges
json nonmanifold_doc() {
    for (std::uint64_t seed = 1; seed < 4096; ++seed) {
        const auto [split, l] = gluelab::random_split_instance(seed);
        std::map<int, int> degree;
        for (const auto& e : split.total.simplices(1)) {
            ++degree[e[0]];
            ++degree[e[1]];
        }
        int peak = 0;
        for (const auto& [v, d] : degree) peak = std::max(peak, d);
        if (peak < 3) continue;
        json doc = cli::split_to_json(split);
        doc["local_system"] = cli::local_system_to_json(l);
        doc["seed"] = seed;
        return doc;
    }
    throw InvalidSystem("no non-manifold instance in the scanned seed range");
}

json broken_nonflat_doc() {
    using simplicial::Simplex;
    const auto total = simplicial::build_complex(
        {{0}, {1}, {2}, {3}, {0, 1}, {0, 2}, {1, 2}, {0, 3}, {2, 3}, {0, 1, 2}});
    const auto split = simplicial::split_input(
        total, {{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}},
        {{0}, {2}, {3}, {0, 3}, {2, 3}});
    localsys::LocalSystem l;
    l.rank = 1;
    const CMatrix id = CMatrix::Identity(1, 1);
    for (const auto& e : total.simplices(1)) l.transport[{e[0], e[1]}] = id;
    // nontrivial phase on one triangle edge: holonomy around (0,1,2) != 1
    l.transport[{0, 1}] = std::exp(std::complex<double>(0.0, 0.3)) * id;
    json doc = cli::split_to_json(split);
    doc["local_system"] = cli::local_system_to_json(l);
    return doc;
}

json collar_doc() {
    gauge::CollarSpec spec;
    spec.h = 4e-3;
    spec.half_width = 0.02;
    spec.y_count = 32;
    const auto conn = gauge::scrambled_flat_connection(spec);
    // the curvature residual of this discretization level sits at ~1.2e-5
    // (fourth-order transverse stencils); the certificate bound must admit it
    return json{{"collar", cli::collar_to_json(conn)},
                {"flatness_tol", 2e-5}};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? argv[1] : "fixtures";
    fs::create_directories(dir);
    const double pi = std::numbers::pi;

    save(dir, "circle_trivial_3.json", circle_doc(3, 0.0, 1));
    save(dir, "circle_trivial_7.json", circle_doc(7, 0.0, 1));
    save(dir, "circle_trivial_20.json", circle_doc(20, 0.0, 1));
    save(dir, "circle_twisted_3.json", circle_doc(3, pi, 1));
    save(dir, "circle_twisted_7.json", circle_doc(7, pi / 2, 1));
    save(dir, "circle_twisted_20.json", circle_doc(20, 2 * pi / 3, 1));
    save(dir, "split_circle_pi.json", split_circle_doc(6, 3, pi));
    save(dir, "split_circle_halfpi.json", split_circle_doc(4, 2, pi / 2));
    save(dir, "split_circle_twothirds.json", split_circle_doc(5, 2, 2 * pi / 3));
    save(dir, "split_interval_4_2.json", split_interval_doc(4, 2, 1));
    save(dir, "split_interval_5_3.json", split_interval_doc(5, 3, 2));
    save(dir, "split_nonmanifold.json", nonmanifold_doc());
    save(dir, "broken_nonflat_split.json", broken_nonflat_doc());
    save(dir, "two_term.json",
         json::parse(R"({"hilbert_complex": {"dims": [1, 1],
                         "d": [[[[2.0, 0.0]]]]}})"));
    save(dir, "collar_field.json", collar_doc());
    return 0;
}
