#include "torsionlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <utility>
#include <vector>

#include "torsionlab/detline.hpp"
#include "torsionlab/gluelab.hpp"
#include "torsionlab/rng.hpp"

namespace torsionlab::cli {

namespace {

using numlin::CMatrix;

// 17 significant digits, always recognizably floating point
std::string fmt17(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

bool is_scalar_array(const ojson& a) {
    return std::all_of(a.begin(), a.end(), [](const ojson& v) {
        return !v.is_array() && !v.is_object();
    });
}

void render_value(const ojson& v, std::string& out, int indent) {
    const std::string pad(static_cast<size_t>(indent) * 2, ' ');
    switch (v.type()) {
        case ojson::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            size_t i = 0;
            for (auto it = v.begin(); it != v.end(); ++it, ++i) {
                out += pad + "  " + ojson(it.key()).dump() + ": ";
                render_value(it.value(), out, indent + 1);
                if (i + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "}";
            return;
        }
        case ojson::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            if (is_scalar_array(v)) {
                out += "[";
                for (size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ", ";
                    render_value(v[i], out, indent);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < v.size(); ++i) {
                out += pad + "  ";
                render_value(v[i], out, indent + 1);
                if (i + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "]";
            return;
        }
        case ojson::value_t::string:
            out += v.dump();
            return;
        case ojson::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            return;
        case ojson::value_t::number_integer:
            out += std::to_string(v.get<std::int64_t>());
            return;
        case ojson::value_t::number_unsigned:
            out += std::to_string(v.get<std::uint64_t>());
            return;
        case ojson::value_t::number_float:
            out += fmt17(v.get<double>());
            return;
        default:
            out += "null";
            return;
    }
}

std::string iso_utc_now() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const json& need(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key))
        throw MalformedDocument(std::string("missing field: ") + key);
    return doc.at(key);
}

double need_number(const json& v, const char* what) {
    if (!v.is_number()) throw MalformedDocument(std::string(what) + " must be a number");
    return v.get<double>();
}

std::int64_t need_integer(const json& v, const char* what) {
    if (!v.is_number_integer())
        throw MalformedDocument(std::string(what) + " must be an integer");
    return v.get<std::int64_t>();
}

std::vector<double> number_list(const json& v, const char* what) {
    if (!v.is_array()) throw MalformedDocument(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(need_number(x, what));
    return out;
}

std::vector<simplicial::Simplex> simplex_list(const json& v, const char* what) {
    if (!v.is_array()) throw MalformedDocument(std::string(what) + " must be an array");
    std::vector<simplicial::Simplex> out;
    for (const auto& js : v) {
        if (!js.is_array())
            throw MalformedDocument(std::string(what) + ": simplex entry not an array");
        simplicial::Simplex s;
        for (const auto& x : js)
            s.push_back(static_cast<int>(need_integer(x, "vertex id")));
        out.push_back(std::move(s));
    }
    return out;
}

std::pair<int, int> parse_edge_key(const std::string& key) {
    const auto dash = key.find('-');
    if (dash == std::string::npos)
        throw MalformedDocument("edge key must be \"a-b\" with a < b: " + key);
    int a = 0, b = 0;
    const char* s = key.c_str();
    auto ra = std::from_chars(s, s + dash, a);
    auto rb = std::from_chars(s + dash + 1, s + key.size(), b);
    if (ra.ec != std::errc() || rb.ec != std::errc() || ra.ptr != s + dash ||
        rb.ptr != s + key.size() || a >= b)
        throw MalformedDocument("edge key must be \"a-b\" with a < b: " + key);
    return {a, b};
}

json grid_to_json(const std::vector<std::vector<CMatrix>>& field) {
    json rows = json::array();
    for (const auto& slice : field) {
        json col = json::array();
        for (const auto& m : slice) col.push_back(matrix_to_json(m));
        rows.push_back(std::move(col));
    }
    return rows;
}

std::vector<std::vector<CMatrix>> parse_grid(const json& v, const char* what) {
    if (!v.is_array()) throw MalformedDocument(std::string(what) + " must be an array");
    std::vector<std::vector<CMatrix>> out;
    for (const auto& slice : v) {
        if (!slice.is_array())
            throw MalformedDocument(std::string(what) + " slices must be arrays");
        std::vector<CMatrix> col;
        for (const auto& m : slice) col.push_back(parse_matrix(m));
        out.push_back(std::move(col));
    }
    return out;
}

}  // namespace

int thread_budget() {
    const int hw =
        static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* s = std::getenv("TORSIONLAB_THREADS")) {
        int v = 0;
        auto r = std::from_chars(s, s + std::strlen(s), v);
        if (r.ec != std::errc() || *r.ptr != '\0' || v < 1)
            throw MalformedDocument("TORSIONLAB_THREADS must be a positive integer");
        return std::min(v, 256);
    }
    return std::min(hw, 256);
}

ojson emit_report(const Results& r) {
    ojson doc;
    doc["command"] = r.command;
    doc["inputs"] = r.inputs;
    doc["seed"] = r.seed;
    doc["tolerances"] = r.tolerances;
    doc["quantities"] = r.quantities;
    doc["residuals"] = r.residuals;
    doc["pass"] = r.pass;
    doc["timestamp"] = iso_utc_now();  // excluded from the identity contract
    return doc;
}

std::string render_report(const ojson& report) {
    std::string out;
    render_value(report, out, 0);
    out += "\n";
    return out;
}

void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoFailure("cannot open " + tmp.string());
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!f.flush()) throw IoFailure("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoFailure("cannot move report into place: " + ec.message());
}

json load_document(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MalformedDocument("cannot read input file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded())
        throw MalformedDocument("input is not valid JSON: " + path);
    return doc;
}

CMatrix parse_matrix(const json& m) {
    if (!m.is_array()) throw MalformedDocument("matrix must be an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(m.size());
    Eigen::Index cols = -1;
    CMatrix out;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = m[static_cast<size_t>(i)];
        if (!row.is_array()) throw MalformedDocument("matrix row must be an array");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            out = CMatrix::Zero(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw MalformedDocument("matrix rows have unequal lengths");
        }
        for (Eigen::Index j = 0; j < cols; ++j) {
            const auto& e = row[static_cast<size_t>(j)];
            if (!e.is_array() || e.size() != 2)
                throw MalformedDocument("matrix entry must be [re, im]");
            out(i, j) = numlin::cdouble(need_number(e[0], "matrix entry"),
                                        need_number(e[1], "matrix entry"));
        }
    }
    if (rows == 0) out = CMatrix::Zero(0, 0);
    return out;
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json complex_to_json(const simplicial::SimplicialComplex& k) {
    json by_dim = json::object();
    for (int deg = 0; deg <= k.dim(); ++deg) {
        json lst = json::array();
        for (const auto& s : k.simplices(deg)) lst.push_back(s);
        by_dim[std::to_string(deg)] = std::move(lst);
    }
    return json{{"simplices", std::move(by_dim)}};
}

localsys::LocalSystem parse_local_system(const json& doc) {
    const json& sys = need(doc, "local_system");
    localsys::LocalSystem l;
    const auto rank = need_integer(need(sys, "rank"), "local_system.rank");
    if (rank < 1) throw MalformedDocument("local_system.rank must be positive");
    l.rank = static_cast<int>(rank);
    const json& edges = need(sys, "edges");
    if (!edges.is_object())
        throw MalformedDocument("local_system.edges must be an object");
    for (const auto& [key, value] : edges.items()) {
        const auto edge = parse_edge_key(key);
        CMatrix t = parse_matrix(value);
        if (t.rows() != l.rank || t.cols() != l.rank)
            throw MalformedDocument("transport for " + key +
                                    " does not match the declared rank");
        l.transport[edge] = std::move(t);
    }
    return l;
}

json local_system_to_json(const localsys::LocalSystem& l) {
    json edges = json::object();
    for (const auto& [edge, t] : l.transport)
        edges[std::to_string(edge.first) + "-" + std::to_string(edge.second)] =
            matrix_to_json(t);
    return json{{"rank", l.rank}, {"edges", std::move(edges)}};
}

simplicial::SplitComplex parse_split(const json& doc) {
    const auto total = simplicial::load_complex(need(doc, "complex"));
    const json& split = need(doc, "split");
    return simplicial::split_input(
        total, simplex_list(need(split, "part1"), "split.part1"),
        simplex_list(need(split, "part2"), "split.part2"));
}

json split_to_json(const simplicial::SplitComplex& split) {
    return json{{"complex", complex_to_json(split.total)},
                {"split", json{{"part1", split.part1.all_simplices()},
                               {"part2", split.part2.all_simplices()}}}};
}

hilbcx::FiniteHilbertComplex parse_hilbert_complex(const json& doc) {
    const json& spec = need(doc, "hilbert_complex");
    hilbcx::FiniteHilbertComplex c;
    for (const auto& v : need(spec, "dims")) {
        const auto n = need_integer(v, "hilbert_complex.dims");
        if (n < 0) throw MalformedDocument("hilbert_complex.dims must be >= 0");
        c.dims.push_back(n);
    }
    if (c.dims.empty())
        throw MalformedDocument("hilbert_complex.dims must be nonempty");
    const json& maps = need(spec, "d");
    if (!maps.is_array() || maps.size() + 1 != c.dims.size())
        throw MalformedDocument(
            "hilbert_complex.d needs one matrix per consecutive degree pair");
    for (size_t k = 0; k + 1 < c.dims.size(); ++k) {
        const auto& m = maps[k];
        CMatrix d = (m.is_array() && m.empty())
                        ? CMatrix::Zero(c.dims[k + 1], c.dims[k])
                        : parse_matrix(m);
        if (d.rows() != c.dims[k + 1] || d.cols() != c.dims[k])
            throw MalformedDocument("hilbert_complex.d[" + std::to_string(k) +
                                    "] shape disagrees with dims");
        c.d.push_back(std::move(d));
    }
    c.check();
    return c;
}

gauge::CollarConnection parse_collar(const json& doc) {
    gauge::CollarConnection conn;
    conn.x_grid = number_list(need(doc, "x_grid"), "collar.x_grid");
    if (doc.contains("y_shape"))
        for (const auto& v : doc.at("y_shape"))
            conn.y_shape.push_back(need_integer(v, "collar.y_shape"));
    if (doc.contains("y_steps"))
        conn.y_steps = number_list(doc.at("y_steps"), "collar.y_steps");
    conn.omega0 = parse_grid(need(doc, "omega0"), "collar.omega0");
    const json& tan = need(doc, "omega_tan");
    if (!tan.is_array())
        throw MalformedDocument("collar.omega_tan must be an array");
    for (const auto& dir : tan)
        conn.omega_tan.push_back(parse_grid(dir, "collar.omega_tan"));
    return conn;
}

json collar_to_json(const gauge::CollarConnection& conn) {
    json doc;
    doc["x_grid"] = conn.x_grid;
    doc["y_shape"] = conn.y_shape;
    doc["y_steps"] = conn.y_steps;
    doc["omega0"] = grid_to_json(conn.omega0);
    json tan = json::array();
    for (const auto& dir : conn.omega_tan) tan.push_back(grid_to_json(dir));
    doc["omega_tan"] = std::move(tan);
    return doc;
}

namespace {

Results base_results(const JobSpec& job) {
    Results r;
    r.command = job.command;
    r.seed = job.seed;
    r.inputs["input"] =
        job.input_path.empty() ? ojson(nullptr) : ojson(job.input_path);
    r.tolerances["identity"] = job.tol;
    r.tolerances["rank"] = job.rank_tol;
    return r;
}

Results cmd_torsion(const JobSpec& job, const json& doc) {
    Results r = base_results(job);
    hilbcx::FiniteHilbertComplex c;
    if (doc.contains("hilbert_complex")) {
        c = parse_hilbert_complex(doc);
        r.inputs["source"] = "hilbert_complex";
    } else {
        const auto k = simplicial::load_complex(need(doc, "complex"));
        c = hilbcx::build_twisted_complex(k, parse_local_system(doc));
        r.inputs["source"] = "twisted_complex";
    }
    r.inputs["dims"] = c.dims;
    r.quantities["torsion"] = hilbcx::torsion(c, job.rank_tol);
    r.quantities["log_torsion"] = hilbcx::log_torsion(c, job.rank_tol);
    const auto betti = hilbcx::betti_profile(c, job.rank_tol);
    std::int64_t chi = 0;
    for (size_t k = 0; k < betti.size(); ++k) {
        r.quantities["betti_" + std::to_string(k)] =
            static_cast<std::int64_t>(betti[k]);
        chi += (k % 2 ? -1 : 1) * static_cast<std::int64_t>(betti[k]);
    }
    r.quantities["euler_characteristic"] = chi;
    return r;
}

Results cmd_glue_check(const JobSpec& job, const json& doc) {
    Results r = base_results(job);
    const auto split = parse_split(doc);
    const auto l = parse_local_system(doc);
    const auto rep = gluelab::verify_lesch(split, l, job.tol);
    r.tolerances["consistency"] = 10.0 * job.tol;
    r.quantities["tau_split"] = rep.tau_split;
    r.quantities["tau_rel1"] = rep.tau_rel1;
    r.quantities["tau_abs2"] = rep.tau_abs2;
    r.quantities["tau_rel2"] = rep.tau_rel2;
    r.quantities["tau_abs1"] = rep.tau_abs1;
    r.quantities["tau_les"] = rep.tau_hc;
    r.quantities["tau_les_primed"] = rep.tau_hc_primed;
    r.quantities["euler_chi_interface"] =
        static_cast<std::int64_t>(rep.euler_chi_n);
    r.quantities["anomaly"] = std::exp2(-0.5 * rep.euler_chi_n);
    r.quantities["nu"] = static_cast<std::int64_t>(rep.signs.nu);
    r.quantities["nu_primed"] = static_cast<std::int64_t>(rep.signs.nu_prime);
    r.residuals["gluing"] = rep.residual;
    r.residuals["gluing_primed"] = rep.residual_primed;
    r.residuals["consistency"] = rep.consistency;
    r.pass = rep.pass && rep.pass_primed && rep.consistency <= 10.0 * job.tol;
    return r;
}

Results cmd_les(const JobSpec& job, const json& doc) {
    Results r = base_results(job);
    const auto split = parse_split(doc);
    const auto l = parse_local_system(doc);
    const auto ses = hilbcx::assemble_ses(split, l);
    const auto les = hilbcx::long_exact_sequence(ses.first, job.rank_tol);
    const double tau = hilbcx::les_torsion(les);
    const double log_sv = hilbcx::les_torsion_log_sv(les);
    const double defect = hilbcx::exactness_defect(les, job.tol);
    r.inputs["profile"] = les.dims;
    r.quantities["tau_les"] = tau;
    r.quantities["tau_les_from_singular_values"] = std::exp(log_sv);
    r.quantities["nu"] = static_cast<std::int64_t>(hilbcx::nu_sign(les));
    r.residuals["zeta_vs_singular_values"] =
        std::abs(std::log(tau) - log_sv);
    r.residuals["exactness"] = defect;
    r.pass = std::abs(std::log(tau) - log_sv) <= job.tol && defect <= job.tol;
    return r;
}

Results cmd_refined_split(const JobSpec& job, const json& doc) {
    Results r = base_results(job);
    const int m =
        doc.is_object() && doc.contains("m")
            ? static_cast<int>(need_integer(doc.at("m"), "m"))
            : 1;
    const Eigen::Index max_rank =
        doc.is_object() && doc.contains("max_rank")
            ? need_integer(doc.at("max_rank"), "max_rank")
            : 2;
    const auto inst = hilbcx::generate_duality_instance(job.seed, m, {}, max_rank);
    Rng rng(job.seed ^ 0x9e3779b97f4a7c15ull);
    const auto chk = detline::splitting_identity_check(inst, rng);
    const numlin::cdouble phi = detline::les_tau_via_phi(inst.les_h);
    r.inputs["m"] = m;
    r.inputs["profile"] = inst.les_h.dims;
    r.tolerances["mirror"] = 10.0 * job.tol;
    r.tolerances["ratio"] = 100.0 * job.tol;
    r.quantities["tau"] = chk.tau;
    r.quantities["tau_primed"] = chk.tau_prime;
    r.quantities["ratio_re"] = chk.ratio.real();
    r.quantities["ratio_im"] = chk.ratio.imag();
    r.quantities["nu"] = static_cast<std::int64_t>(chk.ledger.nu);
    r.quantities["splitting_sign"] =
        static_cast<std::int64_t>(chk.ledger.splitting_sign);
    r.quantities["observed_sign"] =
        static_cast<std::int64_t>(chk.ledger.observed_sign);
    r.quantities["sign_residual"] =
        static_cast<std::int64_t>(chk.ledger.residual());
    r.quantities["predicted_sign_residual"] =
        static_cast<std::int64_t>(chk.ledger.predicted_residual());
    const double mirror = std::abs(chk.tau - chk.tau_prime) / chk.tau;
    const double phi_res = std::abs(phi - numlin::cdouble(chk.tau, 0.0)) / chk.tau;
    r.residuals["tau_mirror"] = mirror;
    r.residuals["phi_vs_tau"] = phi_res;
    r.residuals["ratio_modulus"] = chk.ratio_modulus_error;
    r.residuals["ratio_imag"] = chk.ratio_imag_rel;
    r.pass = mirror <= 10.0 * job.tol && phi_res <= job.tol &&
             chk.ratio_modulus_error <= 100.0 * job.tol &&
             chk.ratio_imag_rel <= 100.0 * job.tol &&
             chk.ledger.discrepancy_explained();
    return r;
}

Results cmd_gauge(const JobSpec& job, const json& doc) {
    Results r = base_results(job);
    const auto conn = parse_collar(need(doc, "collar"));
    gauge::require_valid(conn);
    const double flat_tol = doc.contains("flatness_tol")
                                ? need_number(doc.at("flatness_tol"), "flatness_tol")
                                : 1e-6;
    const double scale = doc.contains("threshold_scale")
                             ? need_number(doc.at("threshold_scale"), "threshold_scale")
                             : 1.0;
    const auto cert = gauge::flatness_certificate(conn, flat_tol);
    const auto g = gauge::solve_temporal_gauge(conn);
    const auto rep =
        gauge::verify_temporal(gauge::transform_connection(conn, g), cert, scale);
    r.inputs["x_count"] = static_cast<std::int64_t>(conn.x_count());
    r.inputs["y_count"] = static_cast<std::int64_t>(conn.y_count());
    r.inputs["rank"] = static_cast<std::int64_t>(conn.fiber_rank());
    r.tolerances["flatness"] = flat_tol;
    r.tolerances["temporal"] = rep.threshold;
    r.quantities["step"] = conn.step();
    r.quantities["max_curvature"] = cert.max_curvature;
    r.quantities["unitarity_drift"] = g.unitarity_drift;
    r.quantities["threshold"] = rep.threshold;
    r.residuals["temporal_omega0"] = rep.max_omega0;
    r.residuals["tangential_variation"] = rep.max_tangential_variation;
    r.pass = rep.pass;
    return r;
}

Results cmd_circle_cm(const JobSpec& job, const json& doc) {
    Results r = base_results(job);
    const double theta = doc.is_object() && doc.contains("theta")
                             ? need_number(doc.at("theta"), "theta")
                             : std::numbers::pi;
    std::vector<int> subs = {3, 7, 20};
    if (doc.is_object() && doc.contains("subdivisions")) {
        subs.clear();
        for (const auto& v : doc.at("subdivisions"))
            subs.push_back(static_cast<int>(need_integer(v, "subdivisions")));
    }
    const auto rep = gluelab::verify_circle_cheeger_mueller(theta, subs, job.tol);
    r.inputs["theta"] = theta;
    r.inputs["subdivisions"] = subs;
    r.quantities["oracle"] = rep.oracle;
    for (size_t i = 0; i < subs.size(); ++i)
        r.quantities["torsion_" + std::to_string(subs[i])] = rep.torsions[i];
    r.residuals["oracle_worst"] = rep.worst_residual;
    r.residuals["pairwise"] = rep.pairwise_residual;
    r.pass = rep.pass;
    return r;
}

Results cmd_synth_suite(const JobSpec& job, const json& doc) {
    Results r = base_results(job);
    std::int64_t count = 50;
    gluelab::SynthOptions opt;
    if (doc.is_object()) {
        if (doc.contains("count")) count = need_integer(doc.at("count"), "count");
        if (doc.contains("max_vertices"))
            opt.max_vertices =
                static_cast<int>(need_integer(doc.at("max_vertices"), "max_vertices"));
        if (doc.contains("max_simplices"))
            opt.max_simplices = static_cast<int>(
                need_integer(doc.at("max_simplices"), "max_simplices"));
        if (doc.contains("rank"))
            opt.rank = need_integer(doc.at("rank"), "rank");
        if (doc.contains("max_phase"))
            opt.max_phase = need_number(doc.at("max_phase"), "max_phase");
        if (doc.contains("min_sv_ratio"))
            opt.min_sv_ratio = need_number(doc.at("min_sv_ratio"), "min_sv_ratio");
    }
    if (count < 1) throw MalformedDocument("count must be positive");

    std::vector<gluelab::GluingReport> reports(static_cast<size_t>(count));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_lock;
    const int workers =
        static_cast<int>(std::min<std::int64_t>(thread_budget(), count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::int64_t i = next++; i < count; i = next++) {
                try {
                    reports[static_cast<size_t>(i)] = gluelab::verify_lesch_random(
                        job.seed + static_cast<std::uint64_t>(i), opt, job.tol);
                } catch (...) {
                    std::scoped_lock hold(error_lock);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    double worst = 0.0, worst_primed = 0.0, worst_consistency = 0.0;
    std::int64_t failures = 0;
    std::uint64_t worst_seed = job.seed;
    for (const auto& rep : reports) {
        if (rep.residual > worst) {
            worst = rep.residual;
            worst_seed = rep.seed;
        }
        worst_primed = std::max(worst_primed, rep.residual_primed);
        worst_consistency = std::max(worst_consistency, rep.consistency);
        if (!(rep.pass && rep.pass_primed)) ++failures;
    }
    r.inputs["count"] = count;
    r.tolerances["consistency"] = 10.0 * job.tol;
    r.quantities["failures"] = failures;
    r.quantities["worst_seed"] = worst_seed;
    r.residuals["gluing_worst"] = worst;
    r.residuals["gluing_primed_worst"] = worst_primed;
    r.residuals["consistency_worst"] = worst_consistency;
    r.pass = failures == 0 && worst_consistency <= 10.0 * job.tol;
    return r;
}

Results error_results(const JobSpec& job, const std::string& message) {
    Results r = base_results(job);
    r.inputs["error"] = message;
    r.pass = false;
    return r;
}

}  // namespace

ojson run_report(const JobSpec& job) {
    if (!(job.tol > 0.0) || !(job.rank_tol > 0.0))
        throw MalformedDocument("tolerances must be positive");
    static const std::vector<std::string> file_commands = {"torsion",
                                                           "glue-check", "les",
                                                           "gauge"};
    json doc;
    if (!job.input_path.empty()) doc = load_document(job.input_path);
    if (std::find(file_commands.begin(), file_commands.end(), job.command) !=
            file_commands.end() &&
        job.input_path.empty())
        throw MalformedDocument(job.command + " requires --input");

    Results r;
    if (job.command == "torsion")
        r = cmd_torsion(job, doc);
    else if (job.command == "glue-check")
        r = cmd_glue_check(job, doc);
    else if (job.command == "les")
        r = cmd_les(job, doc);
    else if (job.command == "refined-split")
        r = cmd_refined_split(job, doc);
    else if (job.command == "gauge")
        r = cmd_gauge(job, doc);
    else if (job.command == "circle-cm")
        r = cmd_circle_cm(job, doc);
    else if (job.command == "synth-suite")
        r = cmd_synth_suite(job, doc);
    else
        throw MalformedDocument("unknown command: " + job.command);
    return emit_report(r);
}

int run(const JobSpec& job) {
    ojson report;
    int code = 0;
    try {
        report = run_report(job);
        code = report.at("pass").get<bool>() ? 0 : 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        report = emit_report(error_results(job, e.what()));
        code = 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        report = emit_report(error_results(job, e.what()));
        code = 2;
    }
    const std::string text = render_report(report);
    std::fputs(text.c_str(), stdout);
    if (!job.out_path.empty()) {
        try {
            write_atomic(job.out_path, text);
        } catch (const Error& e) {
            std::fprintf(stderr, "%s\n", e.what());
            code = 2;
        }
    }
    return code;
}

}  // namespace torsionlab::cli
