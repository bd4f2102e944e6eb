#include "polydecay/besselwave.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace polydecay;

namespace {

std::vector<double> sample_points() {
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(0.1 + (20.0 - 0.1) * i / 199.0);
    return xs;
}

double k_half(double x) { return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x); }

}  // namespace

TEST(Nonlinearity, EvaluationAndValidation) {
    Nonlinearity F({{2, 1.0}, {3, complex(0, 2)}});
    EXPECT_NEAR(std::abs(F(2.0) - complex(4.0, 16.0)), 0.0, 1e-14);
    EXPECT_FALSE(F.is_monomial());
    EXPECT_EQ(F.leading().first, 3);
    EXPECT_THROW(Nonlinearity({{1, 1.0}}), PreconditionError);
    EXPECT_THROW(Nonlinearity().leading(), PreconditionError);
    EXPECT_TRUE(Nonlinearity({{2, 0.0}, {4, 1.5}}).is_monomial());

    GridSpec g(1, 4.0, 16);
    Field u = coordinate(g, 0);
    Field v = evaluate_nonlinearity(Nonlinearity::monomial(3, 8.0), u);
    for (std::size_t i = 0; i < g.points(); ++i) EXPECT_NEAR(std::abs(v[i] - 8.0 * std::pow(u[i], 3)), 0.0, 1e-12);
}

TEST(Bessel, HalfIntegerOrdersMatchBoost) {
    for (int num : {-9, -5, -1, 1, 3, 5, 7, 9}) {
        for (double x : sample_points()) {
            double ref = boost::math::cyl_bessel_k(0.5 * num, x);
            EXPECT_NEAR(bessel_k_half(HalfIntegerOrder(num), x), ref, 1e-12 * ref) << "nu = " << num << "/2, x = " << x;
        }
    }
    EXPECT_THROW(HalfIntegerOrder(4), PreconditionError);
    EXPECT_THROW(bessel_k_half(HalfIntegerOrder(1), 0.0), PreconditionError);
}

TEST(Bessel, RecurrenceAndClosedForms) {
    for (double x : sample_points()) {
        for (int num = 1; num <= 7; num += 2) {
            double lo = bessel_k_half(HalfIntegerOrder(num - 2), x);
            double mid = bessel_k_half(HalfIntegerOrder(num), x);
            double hi = bessel_k_half(HalfIntegerOrder(num + 2), x);
            double rhs = (num / x) * mid + lo;
            EXPECT_NEAR(hi, rhs, 1e-12 * std::abs(rhs));
        }
        double k12 = k_half(x);
        double k32 = (1.0 / x + 1.0) * k12;
        double k52 = (3.0 / (x * x) + 3.0 / x + 1.0) * k12;
        EXPECT_NEAR(bessel_k_half(HalfIntegerOrder(1), x), k12, 1e-12 * k12);
        EXPECT_NEAR(bessel_k_half(HalfIntegerOrder(3), x), k32, 1e-12 * k32);
        EXPECT_NEAR(bessel_k_half(HalfIntegerOrder(5), x), k52, 1e-12 * k52);
    }
}

TEST(Bessel, QuadratureOracle) {
    for (double x : sample_points()) {
        double ref = k_half(x);
        EXPECT_NEAR(bessel_k_quadrature(0.5, x), ref, 1e-10 * ref) << "x = " << x;
    }
    for (double nu : {0.0, 1.0, 2.5, 4.0}) {
        double ref = boost::math::cyl_bessel_k(nu, 3.0);
        EXPECT_NEAR(bessel_k_quadrature(nu, 3.0), ref, 1e-10 * ref);
    }
}

TEST(Bessel, PolynomialCoefficients) {
    EXPECT_EQ(bessel_polynomial(0), (std::vector<double>{1.0}));
    EXPECT_EQ(bessel_polynomial(1), (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(bessel_polynomial(2), (std::vector<double>{1.0, 3.0, 3.0}));
    EXPECT_EQ(bessel_polynomial(3), (std::vector<double>{1.0, 6.0, 15.0, 15.0}));
    EXPECT_EQ(bessel_polynomial(4), (std::vector<double>{1.0, 10.0, 45.0, 105.0, 105.0}));
    EXPECT_THROW(bessel_polynomial(-1), PreconditionError);
}

// F[(1+x^2)^-1] = pi e^{-|xi|}; higher lambda against direct quadrature of
// 2 int_0^inf cos(x xi) (1+x^2)^-lambda dx.
TEST(PowerLaw, ClosedFormTransforms) {
    for (double xi : {0.1, 0.5, 1.0, 3.0, -2.0}) {
        double r = std::abs(xi);
        EXPECT_NEAR(ft_power_law(1, xi), std::numbers::pi * std::exp(-r), 1e-14);
        EXPECT_NEAR(ft_power_law(2, xi), 0.5 * std::numbers::pi * (1.0 + r) * std::exp(-r), 1e-14);
        EXPECT_NEAR(ft_power_law(3, xi), std::numbers::pi / 8.0 * (3.0 + 3.0 * r + r * r) * std::exp(-r), 1e-14);
    }
    EXPECT_THROW(ft_power_law(0, 1.0), PreconditionError);
    EXPECT_THROW(ft_power_law(1, 0.0), PreconditionError);
}

TEST(PowerLaw, GridTransformAgreesAwayFromOrigin) {
    GridSpec g(1, 200.0, 1 << 15);
    Field v = forward_transform(sample([](double x) { return 1.0 / (1.0 + x * x); }, g));
    double worst = 0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        double xi = g.frequency(i);
        if (xi == 0.0 || std::abs(xi) > 5.0) continue;
        double ref = ft_power_law(1, xi);
        worst = std::max(worst, std::abs(v[i] - ref) / ref);
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(ExactCases, CatalogValues) {
    auto cases = catalog();
    ASSERT_EQ(cases.size(), 2u);
    EXPECT_EQ(cases[0].label, "benjamin-ono");
    EXPECT_EQ(cases[1].label, "cubic");
    EXPECT_DOUBLE_EQ(cases[0].solution(0.0), 2.0);
    EXPECT_DOUBLE_EQ(cases[0].solution(1.0), 1.0);
    EXPECT_DOUBLE_EQ(cases[1].solution(1.0), 0.5);
    EXPECT_DOUBLE_EQ(benjamin_ono_case(2.0).solution(0.5), 2.0);
    EXPECT_THROW(benjamin_ono_case(0.0), PreconditionError);
    for (const auto& c : cases) EXPECT_DOUBLE_EQ(c.predicted_pointwise_decay, 2.0);
}

TEST(ExactCases, ResidualBoundsAndRefinement) {
    for (const auto& c : {benjamin_ono_case(), cubic_case(), generate_example(2), generate_example(4)}) {
        double coarse = verify_exact(c, GridSpec(1, 100.0, 1 << 14));
        double fine = verify_exact(c, GridSpec(1, 200.0, 1 << 15));
        EXPECT_LE(coarse, 5e-3) << c.label;
        EXPECT_GE(coarse / fine, 3.0) << c.label;
    }
    EXPECT_LT(verify_exact(benjamin_ono_case(2.0), GridSpec(1, 100.0, 1 << 14)), 5e-3);
}

TEST(ExactCases, MismatchedEquationIsDetected) {
    auto c = cubic_case();
    c.nonlinearity = Nonlinearity::monomial(3, 7.0);
    EXPECT_GT(verify_exact(c, GridSpec(1, 100.0, 1 << 14)), 0.05);
}

TEST(ExactCases, DegenerateSolutionRejected) {
    auto c = benjamin_ono_case();
    c.solution = [](double) { return 0.0; };
    EXPECT_THROW(verify_exact(c, GridSpec(1, 100.0, 1024)), DegenerateInput);
    EXPECT_THROW(verify_exact(c, GridSpec(2, 10.0, 16)), PreconditionError);
}

TEST(Generator, ReproducesKnownSymbols) {
    auto k2 = generate_example(2);
    EXPECT_DOUBLE_EQ(k2.symbol.p0().real(), 1.0);
    ASSERT_EQ(k2.symbol.terms().size(), 1u);
    EXPECT_DOUBLE_EQ(k2.symbol.terms()[0].order, 1.0);
    EXPECT_EQ(k2.nonlinearity.leading(), (std::pair<int, complex>{2, 2.0}));

    auto k3 = generate_example(3);
    EXPECT_EQ(k3.symbol.p0(), complex(3.0));
    ASSERT_EQ(k3.symbol.terms().size(), 2u);
    EXPECT_DOUBLE_EQ(k3.symbol.terms()[0].order, 1.0);
    EXPECT_EQ(k3.symbol.terms()[0].c_plus, complex(3.0));
    EXPECT_FALSE(k3.symbol.terms()[0].is_polynomial());
    EXPECT_DOUBLE_EQ(k3.symbol.terms()[1].order, 2.0);
    EXPECT_EQ(k3.symbol.terms()[1].c_plus, complex(1.0));
    EXPECT_TRUE(k3.symbol.terms()[1].is_polynomial());
    EXPECT_EQ(k3.nonlinearity.leading(), (std::pair<int, complex>{3, 8.0}));
    for (double xi : {-3.0, 0.5, 2.0}) EXPECT_NEAR(std::abs(k3.symbol(xi) - cubic_case().symbol(xi)), 0.0, 1e-14);

    auto k4 = generate_example(4);
    for (double xi : {-1.5, 0.25, 4.0}) {
        double r = std::abs(xi);
        EXPECT_NEAR(k4.symbol(xi).real(), r * r * r + 6 * r * r + 15 * r + 15, 1e-12);
    }
    EXPECT_EQ(k4.nonlinearity.leading(), (std::pair<int, complex>{4, 48.0}));
    EXPECT_THROW(generate_example(1), PreconditionError);
}

// Oracle for the generator: the transform identity F(u^k) = (F_k)^-1 p F(u)
// checked with the power-law closed forms, independent of any grid.
TEST(Generator, TransformIdentityHoldsPointwise) {
    for (int k = 2; k <= 6; ++k) {
        auto c = generate_example(k);
        const double Fk = c.nonlinearity.leading().second.real();
        for (double xi : {0.2, 1.0, 3.7, 9.0}) {
            double lhs = Fk * ft_power_law(k, xi);
            double rhs = c.symbol(xi).real() * ft_power_law(1, xi);
            EXPECT_NEAR(lhs, rhs, 1e-11 * std::abs(rhs)) << "k = " << k << ", xi = " << xi;
        }
    }
}
