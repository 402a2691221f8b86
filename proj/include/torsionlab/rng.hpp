#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "numlin.hpp"

namespace torsionlab {

// Deterministic generator for fixtures and synthetic instances. Normal
// deviates use an explicit Box-Muller transform because the distribution
// adapters in the standard library are implementation-defined; seed-stable
// output across toolchains is part of the reproducibility contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return std::ldexp(static_cast<double>(engine_() >> 11), -53);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // inclusive integer range
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    numlin::cdouble complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

    numlin::CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols) {
        numlin::CMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_normal();
        return m;
    }

    // Haar-ish unitary via QR with phase-normalized diagonal.
    numlin::CMatrix unitary(Eigen::Index n) {
        if (n == 0) return numlin::CMatrix(0, 0);
        const numlin::CMatrix a = complex_gaussian(n, n);
        Eigen::HouseholderQR<numlin::CMatrix> qr(a);
        numlin::CMatrix q = qr.householderQ();
        const numlin::CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index j = 0; j < n; ++j) {
            const numlin::cdouble d = r(j, j);
            const double ad = std::abs(d);
            q.col(j) *= (ad > 0 ? d / ad : numlin::cdouble(1, 0));
        }
        return q;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace torsionlab
