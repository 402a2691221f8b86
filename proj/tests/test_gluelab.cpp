#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "fixtures.hpp"
#include "torsionlab/gluelab.hpp"

using namespace torsionlab;
using hilbcx::FiniteHilbertComplex;
using numlin::cdouble;
using numlin::CMatrix;

namespace {

constexpr double kPi = 3.14159265358979323846;

CMatrix scalar_mat(cdouble v) { return CMatrix::Constant(1, 1, v); }

// two disjoint segments, parts with no shared simplices
simplicial::SplitComplex disjoint_segments() {
    const auto total = simplicial::build_complex(
        {{0}, {1}, {2}, {3}, {0, 1}, {2, 3}});
    return simplicial::split_input(total, {{0}, {1}, {0, 1}},
                                   {{2}, {3}, {2, 3}});
}

// two disjoint 3-edge circles; twisted holonomies make every complex in the
// gluing sequence acyclic
std::pair<simplicial::SplitComplex, localsys::LocalSystem> disjoint_circles(
    double theta1, double theta2) {
    std::vector<simplicial::Simplex> part1{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}};
    std::vector<simplicial::Simplex> part2{{3}, {4}, {5}, {3, 4}, {4, 5}, {3, 5}};
    std::vector<simplicial::Simplex> all = part1;
    all.insert(all.end(), part2.begin(), part2.end());
    const auto total = simplicial::build_complex(all);
    localsys::LocalSystem sys;
    sys.rank = 1;
    sys.transport[{0, 1}] = scalar_mat(1.0);
    sys.transport[{1, 2}] = scalar_mat(1.0);
    sys.transport[{0, 2}] = scalar_mat(std::polar(1.0, theta1));
    sys.transport[{3, 4}] = scalar_mat(1.0);
    sys.transport[{4, 5}] = scalar_mat(1.0);
    sys.transport[{3, 5}] = scalar_mat(std::polar(1.0, theta2));
    return {simplicial::split_input(total, part1, part2), sys};
}

}  // namespace

TEST_CASE("determinant-line norms") {
    SECTION("alternating determinant product") {
        detline::DetLineElement el;
        el.scalar = cdouble(3.0, 4.0);  // modulus 5
        el.bases = {scalar_mat(2.0), scalar_mat(cdouble(0.0, 4.0))};
        // degree 0 enters directly, degree 1 inverted
        CHECK(gluelab::l2_det_norm(el) == Catch::Approx(5.0 * 2.0 / 4.0));
        el.bases[1] = CMatrix::Zero(2, 1);
        CHECK_THROWS_AS(gluelab::l2_det_norm(el), BasisMismatch);
    }

    SECTION("empty blocks contribute 1") {
        detline::DetLineElement el;
        el.scalar = cdouble(0.0, -2.5);
        el.bases = {CMatrix::Zero(0, 0), CMatrix::Zero(0, 0)};
        CHECK(gluelab::l2_det_norm(el) == Catch::Approx(2.5));
    }

    SECTION("torsion-normalized norm on the trivial circle") {
        const auto circle = simplicial::make_circle(3);
        const auto c = hilbcx::build_twisted_complex(
            circle, testfix::identity_system(circle, 1));
        REQUIRE(hilbcx::torsion(c) == Catch::Approx(3.0).epsilon(1e-12));
        detline::DetLineElement el;
        el.scalar = 5.0;
        el.bases = {scalar_mat(2.0), scalar_mat(4.0)};
        CHECK(gluelab::reidemeister_norm(c, el) ==
              Catch::Approx(5.0 * 2.0 / 4.0 / 3.0).epsilon(1e-12));

        detline::DetLineElement wrong = el;
        wrong.bases = {scalar_mat(1.0)};
        CHECK_THROWS_AS(gluelab::reidemeister_norm(c, wrong), DegreeMismatch);
        wrong.bases = {CMatrix::Identity(2, 2), scalar_mat(1.0)};
        CHECK_THROWS_AS(gluelab::reidemeister_norm(c, wrong), BasisMismatch);
    }

    SECTION("norm homogeneity is exact") {
        const auto circle = simplicial::make_circle(4);
        const auto c = hilbcx::build_twisted_complex(
            circle, testfix::identity_system(circle, 1));
        detline::DetLineElement el;
        el.scalar = cdouble(0.7, -0.3);
        el.bases = {scalar_mat(cdouble(1.1, 0.2)), scalar_mat(cdouble(0.4, 0.9))};
        const double base = gluelab::reidemeister_norm(c, el);
        detline::DetLineElement scaled = el;
        scaled.scalar *= cdouble(-6.0, 0.0);
        CHECK(gluelab::reidemeister_norm(c, scaled) ==
              Catch::Approx(6.0 * base).epsilon(1e-12));
    }
}

TEST_CASE("torsion gluing on split circles") {
    SECTION("trivial rank-1 split of the 3-edge circle") {
        const auto r = gluelab::verify_lesch(simplicial::make_split_circle(3, 1),
                                             testfix::circle_system(3, 0.0),
                                             1e-10);
        CHECK(r.euler_chi_n == 2);  // anomaly factor 1/2
        CHECK(r.tau_rel1 == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(r.tau_abs2 == Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(r.tau_hc == Catch::Approx(std::sqrt(5.0)).epsilon(1e-12));
        CHECK(r.tau_split ==
              Catch::Approx(std::sqrt(15.0) / 2.0).epsilon(1e-12));
        CHECK(r.residual <= 1e-10);
        CHECK(r.residual_primed <= 1e-10);
        CHECK(r.consistency <= 1e-10);
        CHECK(r.pass);
        CHECK(r.pass_primed);
        CHECK(r.profile ==
              std::vector<Eigen::Index>{0, 1, 1, 1, 1, 0});
    }

    SECTION("quarter-turn holonomy is acyclic") {
        const auto r = gluelab::verify_lesch(simplicial::make_split_circle(4, 2),
                                             testfix::circle_system(4, kPi / 2),
                                             1e-10);
        CHECK(r.tau_split ==
              Catch::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
        CHECK(r.residual <= 1e-10);
        CHECK(r.residual_primed <= 1e-10);
        // total complex acyclic, the arcs still carry cohomology
        CHECK(r.profile == std::vector<Eigen::Index>{0, 0, 1, 1, 0, 0});
        CHECK(r.pass);
        CHECK(r.pass_primed);
    }

    SECTION("third-turn holonomy on an uneven split") {
        const auto r = gluelab::verify_lesch(simplicial::make_split_circle(5, 2),
                                             testfix::circle_system(5, 2 * kPi / 3),
                                             1e-10);
        CHECK(r.tau_split ==
              Catch::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
        CHECK(r.residual <= 1e-10);
        CHECK(r.residual_primed <= 1e-10);
        CHECK(r.pass);
        CHECK(r.pass_primed);
    }

    SECTION("disjoint parts have no anomaly") {
        localsys::LocalSystem sys;
        sys.rank = 1;
        sys.transport[{0, 1}] = scalar_mat(1.0);
        sys.transport[{2, 3}] = scalar_mat(1.0);
        const auto r = gluelab::verify_lesch(disjoint_segments(), sys, 1e-10);
        CHECK(r.euler_chi_n == 0);
        CHECK(r.tau_split == Catch::Approx(2.0).epsilon(1e-12));
        CHECK(r.residual <= 1e-10);
        CHECK(r.residual_primed <= 1e-10);
        CHECK(r.pass);
    }
}

TEST_CASE("torsion gluing on random split complexes") {
    double worst = 0.0;
    double worst_consistency = 0.0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto r = gluelab::verify_lesch_random(seed);
        REQUIRE(r.seed == seed);
        worst = std::max({worst, r.residual, r.residual_primed});
        worst_consistency = std::max(worst_consistency, r.consistency);
        if (!(r.pass && r.pass_primed)) {
            CAPTURE(seed, r.residual, r.residual_primed);
            FAIL("gluing identity failed on a random instance");
        }
    }
    CHECK(worst <= 1e-9);
    CHECK(worst_consistency <= 1e-9);
}

TEST_CASE("random split instances are deterministic and well formed") {
    const auto [split_a, sys_a] = gluelab::random_split_instance(42);
    const auto [split_b, sys_b] = gluelab::random_split_instance(42);
    REQUIRE(sys_a.rank == 2);
    REQUIRE(sys_a.transport.size() == sys_b.transport.size());
    for (const auto& [edge, m] : sys_a.transport) {
        const auto it = sys_b.transport.find(edge);
        REQUIRE(it != sys_b.transport.end());
        CHECK((m - it->second).norm() == 0.0);
    }
    CHECK(split_a.total.all_simplices() == split_b.total.all_simplices());
    CHECK(localsys::validate_local_system(split_a.total, sys_a).pass);
    CHECK(split_a.total.all_simplices().size() <= 12);

    // the conditioning gate keeps every positive singular value of the
    // sequence complexes well above the rank cutoff
    const auto [ses, ses_pr] = hilbcx::assemble_ses(split_a, sys_a);
    for (const FiniteHilbertComplex* c : {&ses.a, &ses.b, &ses.c, &ses_pr.c}) {
        for (const auto& d : c->d) {
            const auto sv = numlin::positive_singular_values(d);
            if (sv.size())
                CHECK(sv(sv.size() - 1) >= 1e-3 * sv(0));
        }
    }
}

TEST_CASE("norm gluing identity") {
    SECTION("trivial split circle, phase-corrected elements") {
        const auto r = gluelab::verify_comb_gluing_norms(
            simplicial::make_split_circle(6, 2), testfix::circle_system(6, 0.0),
            1e-10);
        CHECK(r.euler_chi_n == 2);
        CHECK(r.residual_plus <= 1e-10);
        CHECK(r.residual_plus_primed <= 1e-10);
        CHECK(r.plus_holds);
        CHECK(r.plus_holds_primed);
        // the other placement misses by exactly 2^{chi}
        CHECK_FALSE(r.minus_holds);
        CHECK(r.residual_minus == Catch::Approx(3.0).epsilon(1e-10));
        CHECK(r.l2_factor_residual <= 1e-12);
    }

    SECTION("scaling one factor scales both sides") {
        const auto split = simplicial::make_split_circle(6, 2);
        const auto sys = testfix::circle_system(6, 0.0);
        const auto [ses, ses_pr] = hilbcx::assemble_ses(split, sys);
        const auto les = hilbcx::long_exact_sequence(ses);
        const auto t = detline::phase_corrected_towers(les);
        const auto base =
            gluelab::verify_comb_gluing_norms(split, sys, t.x, t.y, 1e-10);
        detline::DetLineElement x3 = t.x;
        x3.scalar *= 3.0;
        const auto scaled =
            gluelab::verify_comb_gluing_norms(split, sys, x3, t.y, 1e-10);
        CHECK(scaled.lhs == Catch::Approx(3.0 * base.lhs).epsilon(1e-12));
        CHECK(scaled.rhs_plus ==
              Catch::Approx(3.0 * base.rhs_plus).epsilon(1e-12));
        CHECK(scaled.residual_plus <= 1e-10);
    }

    SECTION("acyclic case reduces to the torsion identity") {
        const auto [split, sys] = disjoint_circles(kPi / 2, 2 * kPi / 3);
        const auto g = gluelab::verify_lesch(split, sys, 1e-10);
        REQUIRE(g.profile == std::vector<Eigen::Index>{0, 0, 0, 0, 0, 0});
        REQUIRE(g.euler_chi_n == 0);

        const auto [ses, ses_pr] = hilbcx::assemble_ses(split, sys);
        const auto les = hilbcx::long_exact_sequence(ses);
        const auto t = detline::phase_corrected_towers(les);
        for (const auto& b : t.x.bases) CHECK(b.rows() == 0);
        for (const auto& b : t.y.bases) CHECK(b.rows() == 0);

        const auto r = gluelab::verify_comb_gluing_norms(split, sys, 1e-10);
        CHECK(r.plus_holds);
        CHECK(r.plus_holds_primed);
        CHECK(r.minus_holds);  // no two-power at chi = 0
        CHECK(r.l2_factor_residual <= 1e-12);
        // empty cohomology: the norms are inverse torsions and the identity
        // is the gluing formula rearranged
        CHECK(r.lhs == Catch::Approx(g.tau_hc / g.tau_split).epsilon(1e-12));
        CHECK(r.rhs_plus ==
              Catch::Approx(1.0 / (g.tau_rel1 * g.tau_abs2)).epsilon(1e-12));
    }

    SECTION("random instances satisfy the plus placement") {
        for (std::uint64_t seed = 100; seed < 140; ++seed) {
            const auto [split, sys] = gluelab::random_split_instance(seed);
            const auto r = gluelab::verify_comb_gluing_norms(split, sys, 1e-9);
            CAPTURE(seed, r.residual_plus, r.residual_plus_primed);
            CHECK(r.plus_holds);
            CHECK(r.plus_holds_primed);
            CHECK(r.l2_factor_residual <= 1e-10);
        }
    }
}

TEST_CASE("metric-compatible interface sequence") {
    SECTION("trivial split circle") {
        const auto r = gluelab::verify_anticipation_isometries(
            simplicial::make_split_circle(3, 1), testfix::circle_system(3, 0.0),
            1e-10);
        // the retraction relation holds without arithmetic
        CHECK(r.beta_theta_residual == 0.0);
        CHECK(r.theta_isometry_residual <= 1e-12);
        CHECK(r.complement_residual <= 1e-12);
        CHECK(r.beta_isometry_residual <= 1e-12);
        CHECK(r.multiplicativity_residual <= 1e-10);
        CHECK(r.pass);
    }

    SECTION("rank-2 twisted split") {
        const auto split = simplicial::make_split_circle(5, 2);
        const auto sys =
            testfix::circle_system(5, testfix::rank2_holonomy(1.3, 99));
        const auto r = gluelab::verify_anticipation_isometries(split, sys, 1e-9);
        CHECK(r.beta_theta_residual == 0.0);
        CHECK(r.theta_isometry_residual <= 1e-12);
        CHECK(r.multiplicativity_residual <= 1e-9);
        CHECK(r.pass);
    }

    SECTION("empty interface pads to a zero complex") {
        localsys::LocalSystem sys;
        sys.rank = 1;
        sys.transport[{0, 1}] = scalar_mat(1.0);
        sys.transport[{2, 3}] = scalar_mat(1.0);
        const auto r = gluelab::verify_anticipation_isometries(
            disjoint_segments(), sys, 1e-10);
        CHECK(r.tau_interface == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(r.multiplicativity_residual <= 1e-10);
        CHECK(r.pass);
    }

    SECTION("random instances, anomaly-free multiplicativity") {
        for (std::uint64_t seed = 200; seed < 240; ++seed) {
            const auto [split, sys] = gluelab::random_split_instance(seed);
            const auto r =
                gluelab::verify_anticipation_isometries(split, sys, 1e-9);
            CAPTURE(seed, r.multiplicativity_residual);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("circle torsion oracle") {
    CHECK(gluelab::circle_torsion_oracle(kPi) ==
          Catch::Approx(2.0).epsilon(1e-15));
    CHECK(gluelab::circle_torsion_oracle(kPi / 3) ==
          Catch::Approx(1.0).epsilon(1e-15));
    CHECK(gluelab::circle_torsion_oracle(1e-5) ==
          Catch::Approx(1e-5).epsilon(1e-5));
    CHECK_THROWS_AS(gluelab::circle_torsion_oracle(0.0), DegenerateHolonomy);
    CHECK_THROWS_AS(gluelab::circle_torsion_oracle(2 * kPi),
                    DegenerateHolonomy);

    // strictly increasing on (0, pi]
    double prev = 0.0;
    for (int i = 1; i <= 16; ++i) {
        const double v = gluelab::circle_torsion_oracle(kPi * i / 16.0);
        CHECK(v > prev);
        prev = v;
    }

    // the generated system matches the shared fixture convention
    const auto sys = gluelab::circle_flat_system(5, 0.8);
    const auto ref = testfix::circle_system(5, 0.8);
    REQUIRE(sys.transport.size() == ref.transport.size());
    for (const auto& [edge, m] : ref.transport)
        CHECK((sys.transport.at(edge) - m).norm() == 0.0);
    CHECK_THROWS_AS(gluelab::circle_flat_system(2, 1.0), WrongDimension);
}

TEST_CASE("circle torsion against the oracle across subdivisions") {
    SECTION("half-turn holonomy") {
        const auto r =
            gluelab::verify_circle_cheeger_mueller(kPi, {3, 7, 20}, 1e-10);
        REQUIRE(r.torsions.size() == 3);
        for (double t : r.torsions)
            CHECK(t == Catch::Approx(2.0).epsilon(1e-12));
        CHECK(r.worst_residual <= 1e-10);
        CHECK(r.pairwise_residual <= 1e-10);
        CHECK(r.pass);
    }

    SECTION("third-turn holonomy on the minimal triangulation") {
        const auto r =
            gluelab::verify_circle_cheeger_mueller(2 * kPi / 3, {3}, 1e-10);
        CHECK(r.torsions.at(0) ==
              Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(r.pass);
    }

    SECTION("quarter and sixth turns") {
        for (double theta : {kPi / 2, kPi / 3}) {
            const auto r =
                gluelab::verify_circle_cheeger_mueller(theta, {3, 7, 20}, 1e-10);
            CAPTURE(theta, r.worst_residual);
            CHECK(r.pass);
        }
    }

    SECTION("trivial holonomy is rejected") {
        CHECK_THROWS_AS(gluelab::verify_circle_cheeger_mueller(0.0, {3}, 1e-10),
                        DegenerateHolonomy);
    }
}

TEST_CASE("scalar gluing with the oracle substituted") {
    SECTION("half turn, arcs of one and two edges") {
        const auto r = gluelab::scalar_gluing_check(3, 1, kPi, 1e-10);
        CHECK(r.oracle_applicable);
        CHECK(r.oracle == Catch::Approx(2.0).epsilon(1e-12));
        CHECK(r.oracle_residual <= 1e-10);
        CHECK(r.gluing.residual <= 1e-10);
        CHECK(r.pass);
    }

    SECTION("quarter turn") {
        const auto r = gluelab::scalar_gluing_check(4, 2, kPi / 2, 1e-10);
        CHECK(r.oracle == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
        CHECK(r.oracle_residual <= 1e-10);
        CHECK(r.pass);
    }

    SECTION("trivial holonomy skips the oracle, keeps the identity") {
        const auto r = gluelab::scalar_gluing_check(4, 2, 0.0, 1e-10);
        CHECK_FALSE(r.oracle_applicable);
        CHECK(r.oracle == 0.0);
        CHECK(r.gluing.residual <= 1e-10);
        CHECK(r.gluing.pass);
        CHECK(r.gluing.pass_primed);
        CHECK(r.pass);
    }
}
