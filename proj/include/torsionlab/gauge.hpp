#pragma once

#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "numlin.hpp"

namespace torsionlab::gauge {

using numlin::cdouble;
using numlin::CMatrix;

// Connection samples on a collar (-eps, eps) x N. The x grid is uniform and
// must contain 0; N is discretized as a periodic lattice, one axis per
// tangential direction, sites indexed row-major. All matrices are n x n
// skew-Hermitian (Lie algebra of the unitary group).
struct CollarConnection {
    std::vector<double> x_grid;
    std::vector<int> y_shape;      // periodic extents, one per direction
    std::vector<double> y_steps;   // lattice spacing, one per direction
    // omega0[ix][iy]: the dx component
    std::vector<std::vector<CMatrix>> omega0;
    // omega_tan[dir][ix][iy]: the dy_dir components
    std::vector<std::vector<std::vector<CMatrix>>> omega_tan;

    int x_count() const { return static_cast<int>(x_grid.size()); }
    int direction_count() const { return static_cast<int>(y_shape.size()); }
    int y_count() const {
        int n = 1;
        for (int e : y_shape) n *= e;
        return n;
    }
    double step() const {
        return x_grid.size() > 1 ? x_grid[1] - x_grid[0] : 0.0;
    }
    Eigen::Index fiber_rank() const {
        return omega0.empty() || omega0[0].empty() ? 0 : omega0[0][0].rows();
    }
};

// Structural validation: >= 5 uniform x samples containing 0, >= 5 sites per
// periodic axis (the fourth-order stencils need them), matching shapes, and
// skew-Hermitian values within skew_tol. Throws ShapeMismatch / InvalidSystem.
void require_valid(const CollarConnection& conn, double skew_tol = 1e-8);

// Gauge transformation samples; g[ix][iy], g(0, y) = identity exactly.
struct GaugeField {
    std::vector<std::vector<CMatrix>> g;
    double unitarity_drift = 0.0;  // max over the grid of |g* g - I|
};

// Integrates dg/dx = -omega0 g outward from x = 0 for every y site
// independently, classical RK4 with cubic midpoint resampling of omega0.
// Global accuracy O(h^4). Throws StepTooLarge when the unitarity drift of
// the result exceeds drift_tol.
GaugeField solve_temporal_gauge(const CollarConnection& conn,
                                double drift_tol = 1e-6);

// omega_g = g^{-1} omega g + g^{-1} dg with fourth-order finite differences
// (one-sided at the x ends, periodic in y). Throws ShapeMismatch.
CollarConnection transform_connection(const CollarConnection& conn,
                                      const GaugeField& gauge);

// Curvature samples F_{0i} = d_x omega_i - d_{y_i} omega_0 + [omega_0, omega_i]
// and F_{ij} over the whole grid, fourth-order differences; max norm reported.
// The certificate is the caller's attestation that the input is flat at the
// sampled resolution.
struct FlatnessCertificate {
    double max_curvature = 0.0;
    double tol = 1e-6;
};

FlatnessCertificate flatness_certificate(const CollarConnection& conn,
                                         double tol = 1e-6);

// Temporal-gauge structure check on a transformed connection: the dx
// component must vanish and the tangential components must be x-independent.
// Residuals are held to scale * h^2. Throws NotFlatInput when the certificate
// does not attest flatness.
struct TemporalReport {
    double max_omega0 = 0.0;             // worst |omega_0| sample
    double max_tangential_variation = 0.0;  // worst |d omega_i / dx| sample
    double threshold = 0.0;
    bool pass = false;
};

TemporalReport verify_temporal(const CollarConnection& conn_g,
                               const FlatnessCertificate& cert,
                               double scale = 1.0);

// exp(t k) for skew-Hermitian k, via the spectrum of the Hermitian -i k
CMatrix skew_exponential(const CMatrix& k, double t);

// ---- deterministic fixtures ----

struct CollarSpec {
    double h = 1e-3;
    double half_width = 0.05;
    int y_count = 64;       // sites on one periodic axis
    Eigen::Index rank = 2;
    std::uint64_t seed = 5;
};

// omega0 = a at every sample, no tangential directions; exact gauge
// g(x) = exp(-x a)
CollarConnection constant_generator_connection(const CMatrix& a, double h,
                                               double half_width);

// already-temporal flat connection: omega0 = 0, one tangential component
// omega_1(y) independent of x
CollarConnection temporal_flat_connection(const CollarSpec& spec);

// the same connection pushed through the analytic gauge
// u(x,y) = exp(-x a(y) K1) exp(-x b(y) K2); stays flat, no longer temporal
CollarConnection scrambled_flat_connection(const CollarSpec& spec);

}  // namespace torsionlab::gauge
