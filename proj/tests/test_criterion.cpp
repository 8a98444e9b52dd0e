#include <gtest/gtest.h>

#include <cmath>

#include "dtqm/criterion.hpp"
#include "dtqm/errors.hpp"

using namespace dtqm;

namespace {

const PhysicalConstants kC = PhysicalConstants::make(1.0, 0.5, 1.0);
const DomainBox kBox{{-5.0, -5.0}, {5.0, 5.0}};

}  // namespace

TEST(Criterion, LowDiscrepancyPointsAreDeterministicAndInCube) {
    const auto a = low_discrepancy_points(200, 4);
    const auto b = low_discrepancy_points(200, 4);
    EXPECT_EQ(a, b);
    double mean = 0.0;
    for (const auto& p : a) {
        for (double v : p) {
            EXPECT_GE(v, 0.0);
            EXPECT_LT(v, 1.0);
            mean += v;
        }
    }
    EXPECT_NEAR(mean / 800.0, 0.5, 0.01);
}

TEST(Criterion, StandardActionIsConstant) {
    const auto report = check_criterion(standard_action(kC, Potential::harmonic(1.0, 1.0)), kBox);
    EXPECT_EQ(report.samples, 1024u);
    EXPECT_EQ(report.det.min, -2.0);
    EXPECT_EQ(report.det.max, -2.0);
    EXPECT_DOUBLE_EQ(report.det.mean, -2.0);
    EXPECT_EQ(report.det.relative_spread, 0.0);
    EXPECT_TRUE(report.is_constant);
    EXPECT_FALSE(report.trace_linearized.has_value());
}

TEST(Criterion, GaugedReportEqualsStandard) {
    const auto a = check_criterion(standard_action(kC, Potential::quartic(0.2)), kBox);
    const auto b = check_criterion(gauged_action(kC, Potential::quartic(0.2), GaugeFunction::quadratic(3.0)), kBox);
    EXPECT_EQ(a.det.min, b.det.min);
    EXPECT_EQ(a.det.max, b.det.max);
    EXPECT_EQ(a.det.mean, b.det.mean);
    EXPECT_EQ(a.is_constant, b.is_constant);
}

TEST(Criterion, QuarticProbeIsNotConstant) {
    const DomainBox unit{{0.0, 0.0}, {1.0, 1.0}};
    const auto report = check_criterion(quartic_action(kC, Potential::zero(), 0.1), unit);
    EXPECT_GE(report.det.min, -3.2);
    EXPECT_LE(report.det.max, -2.0);
    EXPECT_LT(report.det.min, -3.1);
    EXPECT_GT(report.det.max, -2.01);
    // Hand formula -2 - 1.2 (x - y)^2 with (x, y) uniform on the unit square:
    // mean = -2 - 1.2 / 6 = -2.2.
    EXPECT_NEAR(report.det.mean, -2.2, 2e-3);
    EXPECT_NEAR(report.det.relative_spread, (report.det.max - report.det.min) / 2.2, 2e-3);
    // Corners are approached but never sampled, so the range sits just below 1.2.
    EXPECT_GT(report.det.relative_spread, 1.09 / 2.2);
    EXPECT_LT(report.det.relative_spread, 1.2 / 2.2);
    EXPECT_FALSE(report.is_constant);
}

TEST(Criterion, SineProbeIsNotConstant) {
    const auto report = check_criterion(sine_action(kC, 1.0), kBox);
    EXPECT_FALSE(report.is_constant);
}

TEST(Criterion, ToleranceMonotone) {
    const DomainBox small{{-0.01, 0}, {0.01, 0}};
    const auto model = quartic_action(kC, Potential::zero(), 0.1);
    bool seen_true = false;
    for (double tol : {1e-12, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1.0}) {
        const bool c = check_criterion(model, small, 256, tol).is_constant;
        if (seen_true) EXPECT_TRUE(c) << tol;
        seen_true = seen_true || c;
    }
    EXPECT_TRUE(seen_true);
}

TEST(Criterion, TwoDimensionalDeterminant) {
    const auto c = PhysicalConstants::make(1.0, 0.5, 1.0);
    const auto plain = check_criterion(standard_action(c, Potential::cosine(1.0, 1.0), 2), kBox);
    EXPECT_EQ(plain.det.min, 4.0);
    EXPECT_TRUE(plain.is_constant);

    const auto field = check_criterion(
        vector_potential_action_2d(c, Potential::zero(), PairFunction::bilinear(0.5), PairFunction::zero()), kBox);
    ASSERT_TRUE(field.trace_linearized.has_value());
    EXPECT_EQ(*field.trace_linearized, 0.0);
    // Bilinear A1 gives off-diagonals +-1/4: det = 4 + 1/16, still constant.
    EXPECT_DOUBLE_EQ(field.det.mean, 4.0625);
}

TEST(Criterion, LinearizedTrace) {
    const auto c = PhysicalConstants::make(1.0, 0.5, 1.0);
    for (const auto& [a1, a2] : {std::pair{PairFunction::bilinear(1.0), PairFunction::quadratic_linear(0.3)},
                                 std::pair{PairFunction::sine_product(2.0), PairFunction::bilinear(-1.0)},
                                 std::pair{PairFunction::quadratic_linear(1.5), PairFunction::sine_product(0.7)}}) {
        const auto model = vector_potential_action_2d(c, Potential::harmonic(1.0, 1.0), a1, a2);
        EXPECT_LT(check_linearized(model, kBox), 1e-10);
    }
    const auto zero = vector_potential_action_2d(c, Potential::zero(), PairFunction::zero(), PairFunction::zero());
    EXPECT_EQ(check_linearized(zero, kBox), 0.0);

    // s = eps (x1 - y1)^4 has d^2 s / dx1 dy1 = -12 eps (x1 - y1)^2.
    const double eps = 0.01;
    const DomainBox unit{{0.0, 0.0}, {1.0, 1.0}};
    const double probe = max_linearized_trace(
        [eps](const Point& x, const Point& y) {
            Mat2 h{};
            h[0][0] = -12.0 * eps * (x[0] - y[0]) * (x[0] - y[0]);
            return h;
        },
        unit, 1024);
    EXPECT_GT(probe, 0.1);
    EXPECT_LE(probe, 12.0 * eps);

    EXPECT_THROW(check_linearized(standard_action(c, Potential::zero(), 2), kBox), PreconditionError);
}

TEST(Criterion, Preconditions) {
    const auto model = standard_action(kC, Potential::zero());
    EXPECT_THROW(check_criterion(model, kBox, 8), PreconditionError);
    EXPECT_THROW(check_criterion(model, DomainBox{{1.0, 0}, {1.0, 0}}), PreconditionError);
}

TEST(Criterion, NonFiniteDeterminantReportsCoordinates) {
    const auto model = standard_action(PhysicalConstants::make(1e308, 1e-300, 1.0), Potential::zero());
    try {
        check_criterion(model, kBox, 16);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("x=("), std::string::npos);
    }
}
