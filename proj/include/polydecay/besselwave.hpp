#pragma once

// Half-integer modified Bessel functions K_{N/2}, the Fourier transform of
// (1 + x^2)^-lambda, and exact solitary-wave profiles of the form
// c / (1 + b x^2) for nonlocal equations p(D)u = F(u).

#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"
#include "polydecay/multiplier.hpp"
#include "polydecay/nonlinearity.hpp"
#include "polydecay/symbols.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace polydecay {

/// nu = numerator / 2 with an odd numerator.
struct HalfIntegerOrder {
    int numerator = 1;

    explicit HalfIntegerOrder(int n) : numerator(n) {
        if (n % 2 == 0) throw PreconditionError("half-integer order needs an odd numerator, got " + std::to_string(n));
    }
    double value() const noexcept { return 0.5 * numerator; }
};

/// K_nu(x) for half-integer nu: K_{1/2}(x) = sqrt(pi / 2x) e^-x, K_nu = K_-nu
/// and upward recurrence K_{nu+1} = (2 nu / x) K_nu + K_{nu-1}.
inline double bessel_k_half(HalfIntegerOrder nu, double x) {
    if (!(x > 0.0)) throw PreconditionError("bessel_k_half needs x > 0");
    const int steps = (std::abs(nu.numerator) - 1) / 2;  // |nu| = steps + 1/2
    double prev = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);  // K_{-1/2} = K_{1/2}
    double cur = prev;
    for (int j = 0; j < steps; ++j) {
        double order = j + 0.5;
        double next = (2.0 * order / x) * cur + prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// K_nu(x) from the integral representation int_0^inf e^{-x cosh t} cosh(nu t) dt.
/// Independent of the recurrence; used as an oracle.
inline double bessel_k_quadrature(double nu, double x) {
    if (!(x > 0.0)) throw PreconditionError("bessel_k_quadrature needs x > 0");
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [nu, x](double t) {
        double c = std::cosh(t);
        if (!std::isfinite(c)) return 0.0;
        return 0.5 * (std::exp(nu * t - x * c) + std::exp(-nu * t - x * c));
    };
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

/// Coefficients q_0..q_j of Q_j with K_{j+1/2}(x) = Q_j(1/x) K_{1/2}(x),
/// from Q_{j+1}(y) = (2j + 1) y Q_j(y) + Q_{j-1}(y), Q_{-1} = Q_0 = 1.
inline std::vector<double> bessel_polynomial(int j) {
    if (j < 0) throw PreconditionError("bessel_polynomial needs j >= 0");
    std::vector<double> prev{1.0}, cur{1.0};
    for (int i = 0; i < j; ++i) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t c = 0; c < cur.size(); ++c) next[c + 1] += double(2 * i + 1) * cur[c];
        for (std::size_t c = 0; c < prev.size(); ++c) next[c] += prev[c];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// Fourier transform of (1 + x^2)^-lambda in one dimension for integer
/// lambda >= 1, evaluated at xi != 0.
inline double ft_power_law(int lambda, double xi) {
    if (lambda < 1) throw PreconditionError("ft_power_law supports integer lambda >= 1 only");
    if (xi == 0.0) throw PreconditionError("ft_power_law is evaluated at xi != 0");
    double r = std::abs(xi);
    return 2.0 * std::sqrt(std::numbers::pi) / factorial(lambda - 1) * std::pow(0.5 * r, lambda - 0.5) *
           bessel_k_half(HalfIntegerOrder(2 * lambda - 1), r);
}

struct ExactSolutionCase {
    std::string label;
    PolyhomogeneousSymbol symbol;
    Nonlinearity nonlinearity;
    std::function<double(double)> forcing;  ///< empty when f = 0
    std::function<double(double)> solution;
    double predicted_pointwise_decay = 0.0;
};

/// (|D| + c)u = u^2 with u = 2c / (1 + c^2 x^2).
inline ExactSolutionCase benjamin_ono_case(double c = 1.0) {
    if (!(c > 0.0)) throw PreconditionError("Benjamin-Ono wave speed must be positive");
    return {"benjamin-ono",
            PolyhomogeneousSymbol(1, c, {HomogeneousTerm::abs_power(1.0)}),
            Nonlinearity::monomial(2, 1.0),
            {},
            [c](double x) { return 2.0 * c / (1.0 + c * c * x * x); },
            2.0};
}

/// D^2 u + 3|D| u + 3u = 8 u^3 with u = 1 / (1 + x^2).
inline ExactSolutionCase cubic_case() {
    return {"cubic",
            PolyhomogeneousSymbol(1, 3.0, {HomogeneousTerm::abs_power(1.0, 3.0), HomogeneousTerm::monomial(2)}),
            Nonlinearity::monomial(3, 8.0),
            {},
            [](double x) { return 1.0 / (1.0 + x * x); },
            2.0};
}

/// Higher-order examples with solution 1 / (1 + x^2): the symbol is
/// sum_i q_i |xi|^{k-1-i} with q_i the coefficients of Q_{k-1}, and
/// F(u) = (k-1)! 2^{k-1} u^k, obtained by dividing the transform of u^k by
/// that of u.
inline ExactSolutionCase generate_example(int k) {
    if (k < 2) throw PreconditionError("generate_example needs k >= 2");
    auto q = bessel_polynomial(k - 1);
    std::vector<HomogeneousTerm> terms;
    for (int i = k - 2; i >= 0; --i) {
        int order = k - 1 - i;
        HomogeneousTerm t = order % 2 == 0 ? HomogeneousTerm::monomial(order, q[std::size_t(i)])
                                           : HomogeneousTerm::abs_power(order, q[std::size_t(i)]);
        terms.push_back(t);
    }
    return {"generated-k" + std::to_string(k),
            PolyhomogeneousSymbol(1, q[std::size_t(k - 1)], std::move(terms)),
            Nonlinearity::monomial(k, factorial(k - 1) * std::exp2(k - 1)),
            {},
            [](double x) { return 1.0 / (1.0 + x * x); },
            2.0};
}

inline std::vector<ExactSolutionCase> catalog(double benjamin_ono_speed = 1.0) {
    return {benjamin_ono_case(benjamin_ono_speed), cubic_case()};
}

/// || p(D)u - f - F(u) || / ||u|| over |x| <= L/2.
inline double verify_exact(const ExactSolutionCase& c, const GridSpec& grid) {
    if (grid.dimension() != 1) throw PreconditionError("exact cases are one-dimensional");
    Field u = sample(c.solution, grid);
    Field r = apply(c.symbol, u) - evaluate_nonlinearity(c.nonlinearity, u);
    if (c.forcing) r -= sample(c.forcing, grid);
    const double radius = 0.5 * grid.half_length();
    double denom = l2_norm_within(u, radius);
    if (denom == 0.0) throw DegenerateInput("verify_exact: solution has zero norm on the trusted region");
    return l2_norm_within(r, radius) / denom;
}

}  // namespace polydecay
