#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ppts/distribution.hpp"
#include "ppts/quadrature.hpp"

using namespace ppts;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Probe intervals per support shape, including tails and straddles.
std::vector<std::pair<double, double>> probe_intervals(const SupportInterval& s) {
    if (s.bounded()) {
        const double lo = s.lower();
        const double span = s.upper() - s.lower();
        return {{lo, lo + 0.3 * span},
                {lo + 0.25 * span, lo + 0.9 * span},
                {lo, lo + span}};
    }
    if (std::isfinite(s.lower())) {
        const double lo = s.lower();
        return {{lo, lo + 0.8}, {lo + 0.3, lo + 2.0}, {lo + 1.5, kInf}, {lo, kInf}};
    }
    return {{-1.3, 0.4}, {0.2, 2.5}, {-kInf, -0.7}, {1.1, kInf}, {-kInf, kInf}};
}

void check_moments_match_quadrature(const DistributionModel& m) {
    for (auto [lo, hi] : probe_intervals(m.support())) {
        INFO(m.name() << " on [" << lo << ", " << hi << "]");
        const double mass = probability_mass(m, lo, hi);
        const double mass_q = integrate([&](double x) { return m.pdf(x); }, lo, hi).value;
        CHECK(std::abs(mass - mass_q) < 1e-11);

        const double first = partial_expectation(m, lo, hi);
        const double first_q =
            integrate([&](double x) { return x * m.pdf(x); }, lo, hi).value;
        CHECK(std::abs(first - first_q) < 1e-11);

        const double second = partial_second_moment_about(m, 0.3, lo, hi);
        const double second_q =
            integrate([&](double x) { return (x - 0.3) * (x - 0.3) * m.pdf(x); }, lo, hi)
                .value;
        CHECK(std::abs(second - second_q) < 1e-10);
    }
}

}  // namespace

TEST_CASE("catalog lists nine families and builds each") {
    REQUIRE(catalog_families().size() == 9);
    for (const std::string& family : catalog_families()) {
        const DistributionModel m = catalog_make(family);
        CHECK(m.name() == family);
        const double total =
            probability_mass(m, m.support().lower(), m.support().upper());
        CHECK(total == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("closed-form moments agree with direct quadrature across the catalog") {
    for (const std::string& family : catalog_families()) {
        check_moments_match_quadrature(catalog_make(family));
    }
    check_moments_match_quadrature(catalog_make("student-t", {{"k", 5.0}}));
    check_moments_match_quadrature(catalog_make("gamma", {{"a", 0.7}, {"b", 2.5}}));
    check_moments_match_quadrature(catalog_make("beta1", {{"r", 2.5}, {"s", 1.7}}));
}

TEST_CASE("normal half-line moments take their textbook values") {
    const DistributionModel m = catalog_make("normal");
    CHECK(partial_expectation(m, 0.0, kInf) ==
          Catch::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(probability_mass(m, 0.0, kInf) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(partial_second_moment_about(m, 0.0, -kInf, kInf) ==
          Catch::Approx(1.0).epsilon(1e-13));
    CHECK(m.symmetric_about_zero());
}

TEST_CASE("exponential has unit mean and unit variance") {
    const DistributionModel m = catalog_make("exponential");
    CHECK(partial_expectation(m, 0.0, kInf) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(partial_second_moment_about(m, 1.0, 0.0, kInf) ==
          Catch::Approx(1.0).epsilon(1e-13));
    CHECK_FALSE(m.symmetric_about_zero());
}

TEST_CASE("double-exponential second moment is two") {
    const DistributionModel m = catalog_make("double-exponential");
    CHECK(partial_second_moment_about(m, 0.0, -kInf, kInf) ==
          Catch::Approx(2.0).epsilon(1e-13));
    CHECK(partial_expectation(m, -kInf, kInf) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("default gamma has mean sqrt(2)") {
    const DistributionModel m = catalog_make("gamma");
    CHECK(partial_expectation(m, 0.0, kInf) ==
          Catch::Approx(std::numbers::sqrt2).epsilon(1e-13));
}

TEST_CASE("default beta1 variance is one twentieth") {
    const DistributionModel m = catalog_make("beta1");
    CHECK(partial_expectation(m, 0.0, 1.0) == Catch::Approx(0.5).epsilon(1e-13));
    CHECK(partial_second_moment_about(m, 0.5, 0.0, 1.0) ==
          Catch::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("default logistic has unit variance") {
    const DistributionModel m = catalog_make("logistic");
    CHECK(partial_second_moment_about(m, 0.0, -kInf, kInf) ==
          Catch::Approx(1.0).epsilon(1e-12));
    const double a = m.parameters().at("a");
    CHECK(partial_expectation(m, 0.0, kInf) ==
          Catch::Approx(a * std::numbers::ln2).epsilon(1e-13));
}

TEST_CASE("student-t with three degrees of freedom has second moment three") {
    const DistributionModel m = catalog_make("student-t");
    CHECK(m.parameters().at("k") == 3.0);
    CHECK(partial_second_moment_about(m, 0.0, -kInf, kInf) ==
          Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("moment operators reject malformed intervals") {
    const DistributionModel m = catalog_make("exponential");
    CHECK_THROWS_AS(probability_mass(m, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(probability_mass(m, -0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(partial_expectation(m, -1.0, -0.5), std::invalid_argument);
    CHECK(probability_mass(m, 0.7, 0.7) == 0.0);
}

TEST_CASE("pdf is zero outside the open support and at non-finite points") {
    const DistributionModel m = catalog_make("uniform");
    CHECK(m.pdf(0.5) == 1.0);
    CHECK(m.pdf(-0.1) == 0.0);
    CHECK(m.pdf(1.0) == 0.0);
    CHECK(m.pdf(kInf) == 0.0);
    CHECK(m.pdf(std::nan("")) == 0.0);
}

TEST_CASE("family constraints are enforced with named messages") {
    CHECK_THROWS_WITH(catalog_make("gamma", {{"a", -1.0}}),
                      "gamma: requires a > 0 and b > 0");
    CHECK_THROWS_WITH(catalog_make("beta2", {{"s", 2.0}}),
                      "beta2: requires s > 2 (finite second moment)");
    CHECK_THROWS_WITH(catalog_make("student-t", {{"k", 2.0}}),
                      "student-t: requires integer k >= 3 (finite variance)");
    CHECK_THROWS_WITH(catalog_make("student-t", {{"k", 3.5}}),
                      "student-t: requires integer k >= 3 (finite variance)");
    CHECK_THROWS_WITH(catalog_make("logistic", {{"a", 0.0}}), "logistic: requires a > 0");
    CHECK_THROWS_WITH(catalog_make("beta1", {{"r", 0.0}}),
                      "beta1: requires r > 0 and s > 0");
    CHECK_THROWS_AS(catalog_make("normal", {{"mu", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(catalog_make("gamma", {{"shape", 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(catalog_make("cauchy"), std::invalid_argument);
}

TEST_CASE("make_custom spot-checks normalization and symmetry") {
    auto triangle = [](double x) { return 1.0 - std::abs(x); };
    const DistributionModel ok = make_custom("triangle", SupportInterval(-1.0, 1.0),
                                             triangle, true);
    CHECK(probability_mass(ok, -1.0, 1.0) == Catch::Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(make_custom("bad-mass", SupportInterval(-1.0, 1.0),
                                [](double) { return 1.0; }, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_custom("bad-symmetry", SupportInterval(-1.0, 1.0),
                                [](double x) { return 0.5 + 0.25 * x; }, true),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_custom("bad-support", SupportInterval(0.0, 1.0),
                                [](double) { return 1.0; }, true),
                    std::invalid_argument);
}

TEST_CASE("affine_model transforms density, support and moments") {
    const DistributionModel base = catalog_make("normal");
    const AffineMap map(3.0, 2.0);
    const DistributionModel shifted = affine_model(base, map);
    CHECK(shifted.parameters().at("mu") == 3.0);
    CHECK(shifted.parameters().at("sigma") == 2.0);
    CHECK_FALSE(shifted.symmetric_about_zero());
    CHECK(shifted.pdf(3.0) == Catch::Approx(base.pdf(0.0) / 2.0).epsilon(1e-15));
    CHECK(probability_mass(shifted, 1.0, 5.0) ==
          Catch::Approx(probability_mass(base, -1.0, 1.0)).epsilon(1e-14));
    CHECK(partial_expectation(shifted, -kInf, kInf) == Catch::Approx(3.0).epsilon(1e-14));
    check_moments_match_quadrature(shifted);

    const DistributionModel scaled = affine_model(catalog_make("uniform"), AffineMap(0.0, 2.0));
    CHECK(scaled.support().lower() == 0.0);
    CHECK(scaled.support().upper() == 2.0);
    CHECK(probability_mass(scaled, 0.0, 1.0) == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("affine_pushforward maps points and rescales the distortion") {
    auto [points, v] = affine_pushforward({-1.0, 1.0}, 0.25, AffineMap(3.0, 2.0));
    REQUIRE(points.size() == 2);
    CHECK(points[0] == 1.0);
    CHECK(points[1] == 5.0);
    CHECK(v == 1.0);
}
