#include "torsionlab/gauge.hpp"

#include <cmath>
#include <string>

#include "torsionlab/rng.hpp"

namespace torsionlab::gauge {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

int zero_index(const std::vector<double>& grid) {
    for (size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i]) <= 1e-12) return static_cast<int>(i);
    throw ShapeMismatch("x grid must contain 0");
}

// cubic interpolation at the midpoint of interval [i, i+1]
CMatrix midpoint(const std::vector<CMatrix>& f, int i) {
    const int n = static_cast<int>(f.size());
    const size_t k = static_cast<size_t>(i);
    if (i == 0)
        return (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
    if (i == n - 2)
        return (5.0 * f[k + 1] + 15.0 * f[k] - 5.0 * f[k - 1] + f[k - 2]) / 16.0;
    return (-f[k - 1] + 9.0 * f[k] + 9.0 * f[k + 1] - f[k + 2]) / 16.0;
}

// fourth-order d/dx at sample i, one-sided stencils at the ends
CMatrix fd_x(const std::vector<CMatrix>& f, int i, double h) {
    const int n = static_cast<int>(f.size());
    const size_t k = static_cast<size_t>(i);
    const double s = 12.0 * h;
    if (i == 0)
        return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] -
                3.0 * f[4]) /
               s;
    if (i == 1)
        return (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / s;
    if (i == n - 2)
        return (3.0 * f[k + 1] + 10.0 * f[k] - 18.0 * f[k - 1] +
                6.0 * f[k - 2] - f[k - 3]) /
               s;
    if (i == n - 1)
        return (25.0 * f[k] - 48.0 * f[k - 1] + 36.0 * f[k - 2] -
                16.0 * f[k - 3] + 3.0 * f[k - 4]) /
               s;
    return (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / s;
}

// row-major periodic neighbor along one axis
int y_neighbor(const std::vector<int>& shape, int iy, int axis, int offset) {
    int stride = 1;
    for (size_t d = shape.size(); d > static_cast<size_t>(axis) + 1; --d)
        stride *= shape[d - 1];
    const int extent = shape[static_cast<size_t>(axis)];
    const int coord = (iy / stride) % extent;
    const int wrapped = ((coord + offset) % extent + extent) % extent;
    return iy + (wrapped - coord) * stride;
}

// fourth-order periodic d/dy_axis at site iy of one x slice
CMatrix fd_y(const std::vector<CMatrix>& slice, const std::vector<int>& shape,
             int iy, int axis, double hy) {
    auto at = [&](int off) -> const CMatrix& {
        return slice[static_cast<size_t>(y_neighbor(shape, iy, axis, off))];
    };
    return (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * hy);
}

CMatrix rk4_step(const CMatrix& g, const CMatrix& w_a, const CMatrix& w_mid,
                 const CMatrix& w_b, double step) {
    const CMatrix k1 = -(w_a * g);
    const CMatrix k2 = -(w_mid * (g + 0.5 * step * k1));
    const CMatrix k3 = -(w_mid * (g + 0.5 * step * k2));
    const CMatrix k4 = -(w_b * (g + step * k3));
    return g + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_field_shape(const std::vector<std::vector<CMatrix>>& field,
                       int nx, int ny, Eigen::Index rank, const char* name) {
    if (static_cast<int>(field.size()) != nx)
        throw ShapeMismatch(std::string(name) + ": x extent mismatch");
    for (const auto& slice : field) {
        if (static_cast<int>(slice.size()) != ny)
            throw ShapeMismatch(std::string(name) + ": y extent mismatch");
        for (const CMatrix& m : slice)
            if (m.rows() != rank || m.cols() != rank)
                throw ShapeMismatch(std::string(name) + ": fiber rank mismatch");
    }
}

std::vector<CMatrix> x_column(const std::vector<std::vector<CMatrix>>& field,
                              int iy) {
    std::vector<CMatrix> col;
    col.reserve(field.size());
    for (const auto& slice : field) col.push_back(slice[static_cast<size_t>(iy)]);
    return col;
}

CMatrix random_skew(Rng& rng, Eigen::Index n) {
    const CMatrix b = rng.complex_gaussian(n, n);
    CMatrix k = 0.5 * (b - b.adjoint());
    const double norm = k.norm();
    if (norm > 0) k *= 0.8 / norm;
    return k;
}

std::vector<double> centered_grid(double h, double half_width) {
    const int m = std::max(2, static_cast<int>(std::lround(half_width / h)));
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(2 * m + 1));
    for (int j = -m; j <= m; ++j) grid.push_back(j * h);
    return grid;
}

}  // namespace

void require_valid(const CollarConnection& conn, double skew_tol) {
    if (conn.x_count() < 5)
        throw ShapeMismatch("need at least 5 x samples");
    const double h = conn.step();
    if (h <= 0) throw ShapeMismatch("x grid must increase");
    for (int i = 0; i + 1 < conn.x_count(); ++i) {
        const double d = conn.x_grid[static_cast<size_t>(i) + 1] -
                         conn.x_grid[static_cast<size_t>(i)];
        if (std::abs(d - h) > 1e-9 * std::max(1.0, h))
            throw ShapeMismatch("x grid must be uniform");
    }
    zero_index(conn.x_grid);
    if (conn.y_steps.size() != conn.y_shape.size() ||
        conn.omega_tan.size() != conn.y_shape.size())
        throw ShapeMismatch("one extent, step and field per tangential direction");
    for (size_t d = 0; d < conn.y_shape.size(); ++d) {
        if (conn.y_shape[d] < 5)
            throw ShapeMismatch("periodic axes need at least 5 sites");
        if (conn.y_steps[d] <= 0) throw ShapeMismatch("y step must be positive");
    }
    const Eigen::Index rank = conn.fiber_rank();
    if (rank == 0) throw ShapeMismatch("empty connection");
    const int ny = conn.y_count();
    check_field_shape(conn.omega0, conn.x_count(), ny, rank, "omega0");
    for (size_t d = 0; d < conn.omega_tan.size(); ++d)
        check_field_shape(conn.omega_tan[d], conn.x_count(), ny, rank,
                          "omega_tan");

    auto check_skew = [&](const CMatrix& m) {
        if ((m + m.adjoint()).norm() > skew_tol * std::max(1.0, m.norm()))
            throw InvalidSystem("connection values must be skew-Hermitian");
    };
    for (const auto& slice : conn.omega0)
        for (const CMatrix& m : slice) check_skew(m);
    for (const auto& field : conn.omega_tan)
        for (const auto& slice : field)
            for (const CMatrix& m : slice) check_skew(m);
}

GaugeField solve_temporal_gauge(const CollarConnection& conn,
                                double drift_tol) {
    require_valid(conn);
    const int nx = conn.x_count();
    const int ny = conn.y_count();
    const double h = conn.step();
    const int i0 = zero_index(conn.x_grid);
    const Eigen::Index rank = conn.fiber_rank();
    const CMatrix id = CMatrix::Identity(rank, rank);

    GaugeField out;
    out.g.assign(static_cast<size_t>(nx),
                 std::vector<CMatrix>(static_cast<size_t>(ny)));
    for (int iy = 0; iy < ny; ++iy) {
        const auto w = x_column(conn.omega0, iy);
        std::vector<CMatrix> mids;
        mids.reserve(static_cast<size_t>(nx) - 1);
        for (int i = 0; i + 1 < nx; ++i) mids.push_back(midpoint(w, i));

        const size_t ky = static_cast<size_t>(iy);
        out.g[static_cast<size_t>(i0)][ky] = id;
        for (int i = i0; i + 1 < nx; ++i)
            out.g[static_cast<size_t>(i) + 1][ky] =
                rk4_step(out.g[static_cast<size_t>(i)][ky],
                         w[static_cast<size_t>(i)], mids[static_cast<size_t>(i)],
                         w[static_cast<size_t>(i) + 1], h);
        for (int i = i0; i > 0; --i)
            out.g[static_cast<size_t>(i) - 1][ky] =
                rk4_step(out.g[static_cast<size_t>(i)][ky],
                         w[static_cast<size_t>(i)],
                         mids[static_cast<size_t>(i) - 1],
                         w[static_cast<size_t>(i) - 1], -h);
    }

    for (const auto& slice : out.g)
        for (const CMatrix& g : slice)
            out.unitarity_drift = std::max(out.unitarity_drift,
                                           (g.adjoint() * g - id).norm());
    if (out.unitarity_drift > drift_tol)
        throw StepTooLarge("unitarity drift " +
                           std::to_string(out.unitarity_drift) +
                           " exceeds the bound; reduce the step");
    return out;
}

CollarConnection transform_connection(const CollarConnection& conn,
                                      const GaugeField& gauge) {
    require_valid(conn);
    const int nx = conn.x_count();
    const int ny = conn.y_count();
    const Eigen::Index rank = conn.fiber_rank();
    check_field_shape(gauge.g, nx, ny, rank, "gauge");
    const double h = conn.step();

    CollarConnection out = conn;
    for (int iy = 0; iy < ny; ++iy) {
        const size_t ky = static_cast<size_t>(iy);
        const auto gcol = x_column(gauge.g, iy);
        for (int i = 0; i < nx; ++i) {
            const size_t kx = static_cast<size_t>(i);
            const CMatrix inv = gcol[kx].inverse();
            out.omega0[kx][ky] =
                inv * conn.omega0[kx][ky] * gcol[kx] + inv * fd_x(gcol, i, h);
        }
    }
    for (size_t d = 0; d < conn.omega_tan.size(); ++d) {
        const double hy = conn.y_steps[d];
        for (int i = 0; i < nx; ++i) {
            const size_t kx = static_cast<size_t>(i);
            for (int iy = 0; iy < ny; ++iy) {
                const size_t ky = static_cast<size_t>(iy);
                const CMatrix inv = gauge.g[kx][ky].inverse();
                out.omega_tan[d][kx][ky] =
                    inv * conn.omega_tan[d][kx][ky] * gauge.g[kx][ky] +
                    inv * fd_y(gauge.g[kx], conn.y_shape, iy,
                               static_cast<int>(d), hy);
            }
        }
    }
    return out;
}

FlatnessCertificate flatness_certificate(const CollarConnection& conn,
                                         double tol) {
    require_valid(conn);
    const int nx = conn.x_count();
    const int ny = conn.y_count();
    const double h = conn.step();

    FlatnessCertificate cert;
    cert.tol = tol;
    const size_t dirs = conn.omega_tan.size();
    for (size_t d = 0; d < dirs; ++d) {
        const double hy = conn.y_steps[d];
        for (int iy = 0; iy < ny; ++iy) {
            const auto tan_col = x_column(conn.omega_tan[d], iy);
            const size_t ky = static_cast<size_t>(iy);
            for (int i = 0; i < nx; ++i) {
                const size_t kx = static_cast<size_t>(i);
                const CMatrix& w0 = conn.omega0[kx][ky];
                const CMatrix& wd = conn.omega_tan[d][kx][ky];
                const CMatrix f = fd_x(tan_col, i, h) -
                                  fd_y(conn.omega0[kx], conn.y_shape, iy,
                                       static_cast<int>(d), hy) +
                                  w0 * wd - wd * w0;
                cert.max_curvature = std::max(cert.max_curvature, f.norm());
            }
        }
    }
    for (size_t d = 0; d < dirs; ++d)
        for (size_t e = d + 1; e < dirs; ++e)
            for (int i = 0; i < nx; ++i) {
                const size_t kx = static_cast<size_t>(i);
                for (int iy = 0; iy < ny; ++iy) {
                    const size_t ky = static_cast<size_t>(iy);
                    const CMatrix& wd = conn.omega_tan[d][kx][ky];
                    const CMatrix& we = conn.omega_tan[e][kx][ky];
                    const CMatrix f =
                        fd_y(conn.omega_tan[e][kx], conn.y_shape, iy,
                             static_cast<int>(d), conn.y_steps[d]) -
                        fd_y(conn.omega_tan[d][kx], conn.y_shape, iy,
                             static_cast<int>(e), conn.y_steps[e]) +
                        wd * we - we * wd;
                    cert.max_curvature = std::max(cert.max_curvature, f.norm());
                }
            }
    return cert;
}

TemporalReport verify_temporal(const CollarConnection& conn_g,
                               const FlatnessCertificate& cert, double scale) {
    if (cert.max_curvature > cert.tol)
        throw NotFlatInput("curvature " + std::to_string(cert.max_curvature) +
                           " exceeds the certificate tolerance");
    const double h = conn_g.step();
    TemporalReport r;
    r.threshold = scale * h * h;
    for (const auto& slice : conn_g.omega0)
        for (const CMatrix& m : slice)
            r.max_omega0 = std::max(r.max_omega0, m.norm());
    for (const auto& field : conn_g.omega_tan)
        for (size_t i = 0; i + 1 < field.size(); ++i)
            for (size_t iy = 0; iy < field[i].size(); ++iy)
                r.max_tangential_variation =
                    std::max(r.max_tangential_variation,
                             (field[i + 1][iy] - field[i][iy]).norm() / h);
    r.pass = r.max_omega0 <= r.threshold &&
             r.max_tangential_variation <= r.threshold;
    return r;
}

CMatrix skew_exponential(const CMatrix& k, double t) {
    if (k.rows() != k.cols()) throw ShapeMismatch("generator must be square");
    const CMatrix h = cdouble(0.0, -1.0) * k;
    const auto es = numlin::hermitian_spectrum(h);
    CMatrix phases = CMatrix::Zero(k.rows(), k.cols());
    for (Eigen::Index j = 0; j < k.rows(); ++j)
        phases(j, j) = std::polar(1.0, t * es.values(j));
    return es.vectors * phases * es.vectors.adjoint();
}

CollarConnection constant_generator_connection(const CMatrix& a, double h,
                                               double half_width) {
    CollarConnection conn;
    conn.x_grid = centered_grid(h, half_width);
    conn.omega0.assign(conn.x_grid.size(), {a});
    return conn;
}

namespace {

struct FixtureFrame {
    CMatrix k1, k2;
    std::vector<double> y;  // site angles
    CollarConnection base;  // grid + zero fields
};

FixtureFrame make_frame(const CollarSpec& spec) {
    Rng rng(spec.seed);
    FixtureFrame f;
    f.k1 = random_skew(rng, spec.rank);
    f.k2 = random_skew(rng, spec.rank);
    f.base.x_grid = centered_grid(spec.h, spec.half_width);
    f.base.y_shape = {spec.y_count};
    f.base.y_steps = {kTwoPi / spec.y_count};
    for (int iy = 0; iy < spec.y_count; ++iy)
        f.y.push_back(kTwoPi * iy / spec.y_count);
    const CMatrix zero = CMatrix::Zero(spec.rank, spec.rank);
    f.base.omega0.assign(f.base.x_grid.size(),
                         std::vector<CMatrix>(static_cast<size_t>(spec.y_count),
                                              zero));
    f.base.omega_tan.assign(1, f.base.omega0);
    return f;
}

// x-independent tangential generator of the temporal fixture
CMatrix tangential_field(const FixtureFrame& f, double y) {
    return (0.6 + 0.25 * std::sin(y)) * f.k1 + 0.3 * std::cos(y) * f.k2;
}

}  // namespace

CollarConnection temporal_flat_connection(const CollarSpec& spec) {
    FixtureFrame f = make_frame(spec);
    CollarConnection conn = f.base;
    for (size_t i = 0; i < conn.x_grid.size(); ++i)
        for (int iy = 0; iy < spec.y_count; ++iy)
            conn.omega_tan[0][i][static_cast<size_t>(iy)] =
                tangential_field(f, f.y[static_cast<size_t>(iy)]);
    return conn;
}

CollarConnection scrambled_flat_connection(const CollarSpec& spec) {
    FixtureFrame f = make_frame(spec);
    CollarConnection conn = f.base;
    for (size_t i = 0; i < conn.x_grid.size(); ++i) {
        const double x = conn.x_grid[i];
        for (int iy = 0; iy < spec.y_count; ++iy) {
            const size_t ky = static_cast<size_t>(iy);
            const double y = f.y[ky];
            const double a = 0.5 + 0.2 * std::sin(y);
            const double b = 0.3 * std::cos(y);
            const double da = 0.2 * std::cos(y);
            const double db = -0.3 * std::sin(y);
            // u = P Q with P = exp(-x a K1), Q = exp(-x b K2);
            // omega_u = u^{-1} omega u + u^{-1} du, all terms closed-form
            const CMatrix p = skew_exponential(f.k1, -x * a);
            const CMatrix q = skew_exponential(f.k2, -x * b);
            const CMatrix k1q = q.adjoint() * f.k1 * q;
            const CMatrix u = p * q;
            conn.omega0[i][ky] = -a * k1q - b * f.k2;
            conn.omega_tan[0][i][ky] =
                u.adjoint() * tangential_field(f, y) * u - x * da * k1q -
                x * db * f.k2;
        }
    }
    return conn;
}

}  // namespace torsionlab::gauge
