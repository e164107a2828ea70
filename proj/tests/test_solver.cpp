#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ppts/distribution.hpp"
#include "ppts/errors.hpp"
#include "ppts/solver.hpp"

using namespace ppts;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("validate_alpha rejects disorder and exterior points") {
    const SupportInterval s(0.0, 1.0);
    CHECK_NOTHROW(validate_alpha({0.2, 0.8}, s));
    CHECK_THROWS_AS(validate_alpha({}, s), std::invalid_argument);
    CHECK_THROWS_AS(validate_alpha({0.8, 0.2}, s), std::invalid_argument);
    CHECK_THROWS_AS(validate_alpha({0.5, 0.5}, s), std::invalid_argument);
    CHECK_THROWS_AS(validate_alpha({0.0, 0.5}, s), std::invalid_argument);
    CHECK_THROWS_AS(validate_alpha({0.5, 1.0}, s), std::invalid_argument);
    CHECK_THROWS_AS(validate_alpha({std::nan("")}, s), std::invalid_argument);
}

TEST_CASE("midpoints pads pairwise means with the support ends") {
    auto m = midpoints({0.25, 0.75}, SupportInterval(0.0, 1.0));
    REQUIRE(m.size() == 3);
    CHECK(m[0] == 0.0);
    CHECK(m[1] == 0.5);
    CHECK(m[2] == 1.0);

    auto half = midpoints({1.0, 3.0}, SupportInterval(0.0, ExtendedBound::pos_infinity()));
    CHECK(half[0] == 0.0);
    CHECK(half[1] == 2.0);
    CHECK(half[2] == kInf);
}

TEST_CASE("residual vanishes exactly at the uniform solution") {
    const DistributionModel m = catalog_make("uniform");
    auto g = residual(m, {0.25, 0.75});
    REQUIRE(g.size() == 2);
    CHECK(std::abs(g[0]) < 1e-16);
    CHECK(std::abs(g[1]) < 1e-16);

    auto off = residual(m, {0.2, 0.7});
    CHECK(std::abs(off[0]) > 1e-3);
}

TEST_CASE("jacobian of the uniform model matches hand values") {
    const DistributionModel m = catalog_make("uniform");
    auto J = jacobian(m, {0.25, 0.75});
    REQUIRE(J.diag.size() == 2);
    REQUIRE(J.offdiag.size() == 1);
    CHECK(J.diag[0] == Catch::Approx(0.375).margin(1e-15));
    CHECK(J.diag[1] == Catch::Approx(0.375).margin(1e-15));
    CHECK(J.offdiag[0] == Catch::Approx(-0.125).margin(1e-15));
}

TEST_CASE("initial_guess follows the support shape") {
    auto e = initial_guess(catalog_make("exponential"), 4);
    REQUIRE(e.size() == 4);
    CHECK(e[0] == Catch::Approx(1.0));
    CHECK(e[1] == Catch::Approx(4.0 / 3.0));
    CHECK(e[2] == Catch::Approx(5.0 / 3.0));
    CHECK(e[3] == Catch::Approx(2.0));

    auto u = initial_guess(catalog_make("uniform"), 3);
    CHECK(u[0] == Catch::Approx(0.25));
    CHECK(u[1] == Catch::Approx(0.5));
    CHECK(u[2] == Catch::Approx(0.75));

    auto n4 = initial_guess(catalog_make("normal"), 4);
    CHECK(n4[0] == Catch::Approx(-2.0));
    CHECK(n4[1] == Catch::Approx(-1.0));
    CHECK(n4[2] == Catch::Approx(1.0));
    CHECK(n4[3] == Catch::Approx(2.0));

    auto n3 = initial_guess(catalog_make("normal"), 3);
    CHECK(n3[0] == Catch::Approx(-1.0));
    CHECK(n3[1] == 0.0);
    CHECK(n3[2] == Catch::Approx(1.0));

    CHECK(initial_guess(catalog_make("normal"), 1) == Alpha{0.0});
    CHECK(initial_guess(catalog_make("exponential"), 1) == Alpha{1.0});
    CHECK(initial_guess(catalog_make("uniform"), 1) == Alpha{0.5});

    // Quartiles of N(3, 2): 3 -+ 2 * 0.67448975.
    auto shifted = initial_guess(affine_model(catalog_make("normal"), AffineMap(3.0, 2.0)), 2);
    CHECK(shifted[0] == Catch::Approx(1.65102050).margin(1e-6));
    CHECK(shifted[1] == Catch::Approx(4.34897950).margin(1e-6));

    CHECK_THROWS_AS(initial_guess(catalog_make("normal"), 0), std::invalid_argument);
}

TEST_CASE("uniform points sit at odd multiples of the half cell width") {
    const DistributionModel m = catalog_make("uniform");
    for (int n = 1; n <= 4; ++n) {
        SolverReport r = newton_solve(m, n);
        for (int j = 0; j < n; ++j) {
            CHECK(r.points[j] == Catch::Approx((2.0 * j + 1.0) / (2.0 * n)).margin(1e-14));
        }
        CHECK(r.distortion == Catch::Approx(1.0 / (12.0 * n * n)).epsilon(1e-12));
        CHECK(r.residual_inf_norm < 1e-15);
    }
}

TEST_CASE("normal two-point solution is plus and minus sqrt(2/pi)") {
    SolverReport r = newton_solve(catalog_make("normal"), 2);
    CHECK(r.path == SolvePath::symmetric_n2);
    CHECK(r.iterations == 0);
    CHECK(r.points[0] == Catch::Approx(-0.7978845608028654).epsilon(1e-15));
    CHECK(r.points[1] == Catch::Approx(0.7978845608028654).epsilon(1e-15));
    CHECK(r.distortion == Catch::Approx(1.0 - 2.0 / std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("double-exponential small point sets are integers") {
    SolverReport two = newton_solve(catalog_make("double-exponential"), 2);
    CHECK(two.points[0] == Catch::Approx(-1.0).epsilon(1e-13));
    CHECK(two.points[1] == Catch::Approx(1.0).epsilon(1e-13));

    SolverReport three = newton_solve(catalog_make("double-exponential"), 3);
    CHECK(three.path == SolvePath::symmetric_n3);
    CHECK(three.points[0] == Catch::Approx(-2.0).epsilon(1e-12));
    CHECK(three.points[1] == 0.0);
    CHECK(three.points[2] == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exponential one-point solution is the mean with unit distortion") {
    SolverReport r = newton_solve(catalog_make("exponential"), 1);
    CHECK(r.path == SolvePath::explicit_mean);
    CHECK(r.points[0] == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(r.distortion == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(r.iterations == 0);
}

TEST_CASE("solve paths match n parity and model symmetry") {
    CHECK(newton_solve(catalog_make("normal"), 6).path == SolvePath::symmetric_even);
    CHECK(newton_solve(catalog_make("normal"), 7).path == SolvePath::symmetric_odd);
    CHECK(newton_solve(catalog_make("exponential"), 5).path == SolvePath::general);
    CHECK(newton_solve(catalog_make("gamma"), 1).path == SolvePath::explicit_mean);

    NewtonConfig forced;
    forced.force_general = true;
    CHECK(newton_solve(catalog_make("normal"), 4, forced).path == SolvePath::general);
}

TEST_CASE("forcing the general path reproduces the reduced solutions") {
    NewtonConfig forced;
    forced.force_general = true;
    for (int n : {2, 3, 4, 7}) {
        SolverReport reduced = newton_solve(catalog_make("normal"), n);
        SolverReport general = newton_solve(catalog_make("normal"), n, forced);
        REQUIRE(general.points.size() == reduced.points.size());
        for (std::size_t i = 0; i < reduced.points.size(); ++i) {
            CHECK(general.points[i] == Catch::Approx(reduced.points[i]).margin(1e-12));
        }
    }
}

TEST_CASE("mirrored solutions negate exactly") {
    for (int n : {4, 5, 8, 9}) {
        SolverReport r = newton_solve(catalog_make("student-t"), n);
        for (int j = 0; j < n / 2; ++j) {
            CHECK(r.points[j] == -r.points[n - 1 - j]);
        }
        if (n % 2 == 1) {
            CHECK(r.points[n / 2] == 0.0);
        }
    }
}

TEST_CASE("student-t two-point solution is plus and minus sqrt(3)/pi doubled") {
    SolverReport r = newton_solve(catalog_make("student-t"), 2);
    const double expect = 2.0 * std::numbers::sqrt3 / std::numbers::pi;
    CHECK(r.points[1] == Catch::Approx(expect).epsilon(1e-14));
}

TEST_CASE("shifted and scaled normal matches the pushforward of the base solution") {
    const AffineMap map(3.0, 2.0);
    SolverReport direct = newton_solve(affine_model(catalog_make("normal"), map), 2);
    CHECK(direct.path == SolvePath::general);
    CHECK(direct.points[0] == Catch::Approx(1.4042308783942692).epsilon(1e-12));
    CHECK(direct.points[1] == Catch::Approx(4.5957691216057308).epsilon(1e-12));

    SolverReport base = newton_solve(catalog_make("normal"), 2);
    auto [mapped, v] = affine_pushforward(base.points, base.distortion, map);
    CHECK(direct.points[0] == Catch::Approx(mapped[0]).margin(1e-10));
    CHECK(direct.points[1] == Catch::Approx(mapped[1]).margin(1e-10));
    CHECK(direct.distortion == Catch::Approx(v).epsilon(1e-9));
}

TEST_CASE("reports converge to tiny residuals across representative models") {
    for (const char* family : {"normal", "exponential", "gamma", "beta1", "logistic"}) {
        SolverReport r = newton_solve(catalog_make(family), 5);
        INFO(family);
        CHECK(r.residual_inf_norm < 1e-15);
        CHECK(r.iterations <= 60);
        for (std::size_t i = 1; i < r.points.size(); ++i) {
            CHECK(r.points[i - 1] < r.points[i]);
        }
    }
}

TEST_CASE("newton_solve validates n") {
    const DistributionModel m = catalog_make("normal");
    CHECK_THROWS_AS(newton_solve(m, 0), std::invalid_argument);
    CHECK_THROWS_AS(newton_solve(m, -3), std::invalid_argument);
    CHECK_THROWS_AS(newton_solve(m, 10001), std::invalid_argument);
}

TEST_CASE("iteration budget exhaustion raises ConvergenceError") {
    NewtonConfig cfg;
    cfg.residual_tol = 1e-300;
    cfg.max_iterations = 3;
    CHECK_THROWS_AS(newton_solve(catalog_make("gamma"), 4, cfg), ConvergenceError);
    try {
        newton_solve(catalog_make("gamma"), 4, cfg);
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations == 3);
        CHECK(e.residual_norm > 0.0);
    }
}

TEST_CASE("reduction entry points reject unsuitable models and n") {
    const DistributionModel expo = catalog_make("exponential");
    CHECK_THROWS_AS(solve_symmetric_n2(expo), std::invalid_argument);
    CHECK_THROWS_AS(solve_symmetric_n3(expo), std::invalid_argument);
    const DistributionModel norm = catalog_make("normal");
    CHECK_THROWS_AS(solve_symmetric_even(norm, 5), std::invalid_argument);
    CHECK_THROWS_AS(solve_symmetric_even(norm, 2), std::invalid_argument);
    CHECK_THROWS_AS(solve_symmetric_odd(norm, 4), std::invalid_argument);
    CHECK_THROWS_AS(solve_symmetric_odd(norm, 3), std::invalid_argument);
}

TEST_CASE("distortion integrates squared distance to the nearest point") {
    const DistributionModel m = catalog_make("uniform");
    CHECK(distortion(m, {0.25, 0.75}) == Catch::Approx(1.0 / 48.0).epsilon(1e-13));
    CHECK(distortion(m, {0.5}) == Catch::Approx(1.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("solve path names render for reports") {
    CHECK(std::string(to_string(SolvePath::explicit_mean)) == "explicit-mean");
    CHECK(std::string(to_string(SolvePath::symmetric_n2)) == "symmetric-n2");
    CHECK(std::string(to_string(SolvePath::symmetric_n3)) == "symmetric-n3");
    CHECK(std::string(to_string(SolvePath::symmetric_even)) == "symmetric-even");
    CHECK(std::string(to_string(SolvePath::symmetric_odd)) == "symmetric-odd");
    CHECK(std::string(to_string(SolvePath::general)) == "general");
}
