#include "polydecay/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace polydecay;

TEST(GridSpec, RejectsInvalidParameters) {
    EXPECT_THROW(GridSpec(3, 1.0, 8), PreconditionError);
    EXPECT_THROW(GridSpec(1, 0.0, 8), PreconditionError);
    EXPECT_THROW(GridSpec(1, -2.0, 8), PreconditionError);
    EXPECT_THROW(GridSpec(1, INFINITY, 8), PreconditionError);
    EXPECT_THROW(GridSpec(1, 1.0, 12), PreconditionError);
    EXPECT_THROW(GridSpec(1, 1.0, 1), PreconditionError);
    EXPECT_NO_THROW(GridSpec(2, 1.0, 2));
}

TEST(GridSpec, NodesAndFrequencies) {
    GridSpec g(1, 10.0, 8);
    EXPECT_DOUBLE_EQ(g.spacing(), 2.5);
    EXPECT_DOUBLE_EQ(g.node(0), -10.0);
    EXPECT_DOUBLE_EQ(g.node(g.origin_index()), 0.0);
    EXPECT_DOUBLE_EQ(g.frequency(g.origin_index()), 0.0);
    EXPECT_DOUBLE_EQ(g.frequency(0), -std::numbers::pi * 4 / 10.0);
    EXPECT_DOUBLE_EQ(g.nyquist(), std::numbers::pi * 8 / 20.0);
    EXPECT_EQ(g.wavenumber(7), 3);

    GridSpec g2(2, 1.0, 4);
    EXPECT_EQ(g2.size(), 16u);
    auto p = g2.point(1 * 4 + 3);
    EXPECT_DOUBLE_EQ(p[0], g2.node(1));
    EXPECT_DOUBLE_EQ(p[1], g2.node(3));
}

TEST(Sample, RejectsNonFiniteValues) {
    GridSpec g(1, 1.0, 8);
    try {
        sample([](double x) { return 1.0 / x; }, g);
        FAIL() << "expected NonFiniteSample";
    } catch (const NonFiniteSample& e) {
        EXPECT_EQ(e.node(), g.origin_index());
    }
    EXPECT_THROW(sample([](double) { return std::nan(""); }, g), NonFiniteSample);
}

TEST(Sample, ScalarGeneratorNeedsOneDimension) {
    EXPECT_THROW(sample([](double) { return 1.0; }, GridSpec(2, 1.0, 4)), PreconditionError);
}

// Gaussian e^{-x^2/2} has transform sqrt(2 pi) e^{-xi^2/2}.
TEST(Transform, GaussianMatchesClosedForm1D) {
    GridSpec g(1, 40.0, 4096);
    Field v = forward_transform(sample([](double x) { return std::exp(-0.5 * x * x); }, g));
    double worst = 0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        double xi = g.frequency(i);
        worst = std::max(worst, std::abs(v[i] - std::sqrt(2 * std::numbers::pi) * std::exp(-0.5 * xi * xi)));
    }
    EXPECT_LT(worst, 1e-13);
}

TEST(Transform, GaussianMatchesClosedForm2D) {
    GridSpec g(2, 20.0, 256);
    Field v = forward_transform(sample([](const Point& x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])); }, g));
    double worst = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Point xi = g.frequency_point(i);
        worst = std::max(worst, std::abs(v[i] - 2 * std::numbers::pi * std::exp(-0.5 * (xi[0] * xi[0] + xi[1] * xi[1]))));
    }
    EXPECT_LT(worst, 1e-12);
}

// A shifted Gaussian picks up the phase e^{-i x0 xi}: checks the sign convention.
TEST(Transform, TranslationGivesPhase) {
    GridSpec g(1, 40.0, 2048);
    const double x0 = 2.0;
    Field v = forward_transform(sample([x0](double x) { return std::exp(-0.5 * (x - x0) * (x - x0)); }, g));
    for (std::size_t i : {g.origin_index() + 3, g.origin_index() - 7}) {
        double xi = g.frequency(i);
        complex expected = std::sqrt(2 * std::numbers::pi) * std::exp(-0.5 * xi * xi) * std::exp(complex(0, -x0 * xi));
        EXPECT_LT(std::abs(v[i] - expected), 1e-13);
    }
}

TEST(Transform, InverseRoundTripAndParseval) {
    std::mt19937 rng(7);
    std::normal_distribution<double> n;
    for (int dim : {1, 2}) {
        GridSpec g(dim, 3.0, dim == 1 ? 64 : 16);
        Field u(g, Domain::space);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = complex(n(rng), n(rng));
        Field back = inverse_transform(forward_transform(u));
        double err = 0;
        for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(back[i] - u[i]));
        EXPECT_LT(err, 1e-13);

        // ||u||^2 = (2 pi)^-n sum |u^|^2 dxi^n
        Field spec = forward_transform(u);
        double s = 0;
        for (auto z : spec.values()) s += std::norm(z);
        s *= std::pow(g.frequency_spacing() / (2 * std::numbers::pi), dim);
        EXPECT_NEAR(std::sqrt(s), l2_norm(u), 1e-12 * l2_norm(u));
    }
}

TEST(Transform, DomainChecks) {
    GridSpec g(1, 1.0, 8);
    Field u(g, Domain::space);
    EXPECT_THROW(inverse_transform(u), PreconditionError);
    EXPECT_THROW(forward_transform(forward_transform(u)), PreconditionError);
}

TEST(Norms, RectangleRuleValues) {
    GridSpec g(1, 30.0, 2048);
    Field u = sample([](double x) { return std::exp(-0.5 * x * x); }, g);
    EXPECT_NEAR(l2_norm(u), std::pow(std::numbers::pi, 0.25), 1e-12);
    EXPECT_NEAR(l1_norm(u), std::sqrt(2 * std::numbers::pi), 1e-12);
    EXPECT_LT(l2_norm_within(u, 1.0), l2_norm(u));
    EXPECT_EQ(l2_norm_within(u, -1.0), 0.0);
}

TEST(Shift, MovesValuesByWholeNodes) {
    GridSpec g(1, 8.0, 16);
    Field u = coordinate(g, 0);
    Field s = shift(u, {3, 0});
    for (std::size_t i = 3; i < g.points(); ++i) EXPECT_EQ(s[i], u[i - 3]);
    EXPECT_EQ(s[0], u[13]);

    GridSpec g2(2, 8.0, 8);
    Field v = coordinate(g2, 1);
    Field t = shift(v, {0, -1});
    EXPECT_EQ(t[2 * 8 + 0], v[2 * 8 + 1]);
}

TEST(FieldArithmetic, ChecksOperands) {
    Field a(GridSpec(1, 1.0, 8), Domain::space);
    Field b(GridSpec(1, 2.0, 8), Domain::space);
    Field c(GridSpec(1, 1.0, 8), Domain::frequency);
    EXPECT_THROW(a += b, PreconditionError);
    EXPECT_THROW(a -= c, PreconditionError);
    EXPECT_THROW(Field(GridSpec(1, 1.0, 8), std::vector<complex>(3), Domain::space), PreconditionError);
}
