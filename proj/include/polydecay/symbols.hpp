#pragma once

// Polyhomogeneous symbols p(xi) = p0 + sum_j p_{m_j}(xi) with positively
// homogeneous terms. In one dimension a term of order m is determined by its
// values on the two-point sphere {+1, -1}:
//     q(xi) = c_plus * xi^m        for xi > 0,
//     q(xi) = c_minus * (-xi)^m    for xi < 0.
// In two dimensions only radial terms a |xi|^m are represented.

#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace polydecay {

struct HomogeneousTerm {
    double order = 0.0;
    complex c_plus{};
    complex c_minus{};
    int dimension = 1;

    static HomogeneousTerm one_d(double order, complex c_plus, complex c_minus) {
        return {order, c_plus, c_minus, 1};
    }
    /// coeff * |xi|^order in one dimension.
    static HomogeneousTerm abs_power(double order, complex coeff = 1.0) {
        return {order, coeff, coeff, 1};
    }
    /// coeff * xi^k for a nonnegative integer k.
    static HomogeneousTerm monomial(int k, complex coeff = 1.0) {
        return {double(k), coeff, (k % 2 ? -1.0 : 1.0) * coeff, 1};
    }
    /// a * |xi|^order in two dimensions.
    static HomogeneousTerm radial(double order, complex a) { return {order, a, a, 2}; }

    bool is_zero() const noexcept { return c_plus == complex{} && c_minus == complex{}; }

    bool is_integer_order() const noexcept { return std::abs(order - std::round(order)) < 1e-12; }

    bool is_polynomial() const noexcept {
        if (is_zero()) return true;
        if (!is_integer_order() || order < -0.5) return false;
        long k = std::lround(order);
        if (dimension == 2) return k % 2 == 0;
        complex expected = (k % 2 ? -1.0 : 1.0) * c_plus;
        double scale = std::max({std::abs(c_plus), std::abs(c_minus), 1.0});
        return std::abs(c_minus - expected) <= 1e-12 * scale;
    }

    /// Even and odd parts of the one-dimensional profile.
    complex even_part() const noexcept { return 0.5 * (c_plus + c_minus); }
    complex odd_part() const noexcept { return 0.5 * (c_plus - c_minus); }

    /// Pointwise value. At xi = 0 positive orders give 0, order 0 gives the
    /// even part, negative orders give infinity (singular).
    complex operator()(double xi) const {
        if (xi == 0.0) return value_at_origin();
        complex c = dimension == 2 ? c_plus : (xi > 0 ? c_plus : c_minus);
        return c * std::exp(order * std::log(std::abs(xi)));
    }
    complex operator()(const Point& xi) const {
        if (dimension == 1) return (*this)(xi[0]);
        double r = norm_of(xi);
        if (r == 0.0) return value_at_origin();
        return c_plus * std::exp(order * std::log(r));
    }

private:
    complex value_at_origin() const {
        if (order > 0.0 || is_zero()) return 0.0;
        if (order == 0.0) return dimension == 2 ? c_plus : even_part();
        return std::numeric_limits<double>::infinity();
    }
};

class PolyhomogeneousSymbol {
public:
    PolyhomogeneousSymbol(int dimension, complex p0, std::vector<HomogeneousTerm> terms)
        : dimension_(dimension), p0_(p0), terms_(std::move(terms)) {
        if (dimension != 1 && dimension != 2)
            throw PreconditionError("symbol dimension must be 1 or 2");
        if (terms_.empty()) throw PreconditionError("a polyhomogeneous symbol needs at least one term");
        double prev = 0.0;
        for (const auto& t : terms_) {
            if (t.dimension != dimension)
                throw PreconditionError("term dimension does not match symbol dimension");
            if (!(t.order > prev))
                throw PreconditionError("term orders must be positive and strictly increasing");
            prev = t.order;
        }
        if (terms_.back().order < 1.0)
            throw PreconditionError("top order M must be at least 1");
    }

    int dimension() const noexcept { return dimension_; }
    complex p0() const noexcept { return p0_; }
    const std::vector<HomogeneousTerm>& terms() const noexcept { return terms_; }
    double order() const noexcept { return terms_.back().order; }
    const HomogeneousTerm& top_term() const noexcept { return terms_.back(); }

    complex operator()(double xi) const {
        complex acc = p0_;
        for (const auto& t : terms_) acc += t(xi);
        return acc;
    }
    complex operator()(const Point& xi) const {
        complex acc = p0_;
        for (const auto& t : terms_) acc += t(xi);
        return acc;
    }

private:
    int dimension_;
    complex p0_;
    std::vector<HomogeneousTerm> terms_;
};

inline complex evaluate(const PolyhomogeneousSymbol& p, double xi) { return p(xi); }
inline complex evaluate(const PolyhomogeneousSymbol& p, const Point& xi) { return p(xi); }

/// Smallest order among non-polynomial terms; empty for differential operators.
inline std::optional<double> singularity_index(const PolyhomogeneousSymbol& p) {
    for (const auto& t : p.terms())
        if (!t.is_polynomial()) return t.order;
    return std::nullopt;
}

inline double japanese_bracket(double r) { return std::sqrt(1.0 + r * r); }

struct EllipticityResult {
    bool elliptic = false;
    double infimum = 0.0;   ///< estimate of inf <xi>^-M |p(xi)|
    double witness = 0.0;   ///< frequency (signed in 1-D, radius in 2-D) attaining it; +inf for the xi -> inf limit
    int samples_per_octave = 0;
    double shell_min = 0.0;
    double shell_max = 0.0;
};

namespace detail {

// Dyadic-shell radii 2^-20 .. 2^20, log-uniform.
inline std::vector<double> shell_radii(int samples_per_octave, int octaves = 20) {
    std::vector<double> r;
    const int total = 2 * octaves * samples_per_octave;
    r.reserve(std::size_t(total) + 1);
    for (int i = 0; i <= total; ++i)
        r.push_back(std::exp2(-double(octaves) + double(i) / double(samples_per_octave)));
    return r;
}

// Golden-section minimization of f on [a, b] in log-radius.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iterations = 200) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double la = std::log(a), lb = std::log(b);
    double x1 = lb - g * (lb - la), x2 = la + g * (lb - la);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int i = 0; i < iterations && lb - la > 1e-15; ++i) {
        if (f1 < f2) { lb = x2; x2 = x1; f2 = f1; x1 = lb - g * (lb - la); f1 = f(std::exp(x1)); }
        else { la = x1; x1 = x2; f1 = f2; x2 = la + g * (lb - la); f2 = f(std::exp(x2)); }
    }
    return f1 < f2 ? std::pair{std::exp(x1), f1} : std::pair{std::exp(x2), f2};
}

}  // namespace detail

/// Numerical certificate of inf <xi>^-M |p(xi)| > tolerance. Samples dyadic
/// shells, refines every sampled local minimum by golden section, and adds
/// the two asymptotic limits |p0| (xi -> 0) and the top-order profile
/// modulus (xi -> inf).
inline EllipticityResult check_ellipticity(const PolyhomogeneousSymbol& p, double tolerance = 1e-9,
                                           int samples_per_octave = 64) {
    const double M = p.order();
    const auto radii = detail::shell_radii(samples_per_octave);
    EllipticityResult res;
    res.samples_per_octave = samples_per_octave;
    res.shell_min = radii.front();
    res.shell_max = radii.back();

    res.infimum = std::abs(p.p0());
    res.witness = 0.0;
    const auto& top = p.top_term();
    double at_infinity = p.dimension() == 1 ? std::min(std::abs(top.c_plus), std::abs(top.c_minus))
                                            : std::abs(top.c_plus);
    if (at_infinity < res.infimum) {
        res.infimum = at_infinity;
        res.witness = std::numeric_limits<double>::infinity();
    }

    const std::vector<double> signs = p.dimension() == 1 ? std::vector<double>{1.0, -1.0}
                                                         : std::vector<double>{1.0};
    for (double sgn : signs) {
        auto g = [&](double r) {
            complex v = p.dimension() == 1 ? p(sgn * r) : p(Point{r, 0.0});
            return std::abs(v) / std::pow(japanese_bracket(r), M);
        };
        std::vector<double> vals(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) vals[i] = g(radii[i]);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            double best = vals[i], where = radii[i];
            bool local_min = (i == 0 || vals[i] <= vals[i - 1]) && (i + 1 == radii.size() || vals[i] <= vals[i + 1]);
            if (local_min && i > 0 && i + 1 < radii.size()) {
                auto [r, v] = detail::golden_min(g, radii[i - 1], radii[i + 1]);
                if (v < best) { best = v; where = r; }
            }
            if (best < res.infimum) {
                res.infimum = best;
                res.witness = sgn * where;
            }
        }
    }
    res.elliptic = res.infimum > tolerance;
    return res;
}

inline std::string non_elliptic_message(const EllipticityResult& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "symbol is not globally elliptic: inf <xi>^-M |p| ~ %.6g near xi = %.6g", r.infimum,
                  r.witness);
    return buf;
}

/// Multi-indices of Lemma-type symbol derivatives (one dimension).
struct SymbolDerivativeSpec {
    int gamma = 0;
    int gamma_tilde = 0;
    int sigma = 0;
};

/// D_xi^sigma (xi^gamma_tilde D_xi^gamma t) in closed form, D_xi = -i d/dxi,
/// understood pointwise away from the origin.
inline HomogeneousTerm derived_term(const HomogeneousTerm& t, const SymbolDerivativeSpec& spec) {
    if (t.dimension != 1) throw PreconditionError("derived_term is implemented for n = 1 only");
    if (spec.gamma < 0 || spec.gamma_tilde < 0 || spec.sigma < 0)
        throw PreconditionError("derivative multi-indices must be nonnegative");
    const complex minus_i{0.0, -1.0};
    HomogeneousTerm r = t;
    auto differentiate = [&] {
        r.c_plus = minus_i * r.order * r.c_plus;
        r.c_minus = minus_i * (-r.order) * r.c_minus;
        r.order -= 1.0;
    };
    for (int k = 0; k < spec.gamma; ++k) differentiate();
    for (int k = 0; k < spec.gamma_tilde; ++k) {
        r.c_minus = -r.c_minus;
        r.order += 1.0;
    }
    for (int k = 0; k < spec.sigma; ++k) differentiate();
    if (r.order < -1.0 - 1e-12 && !r.is_zero())
        throw PreconditionError("derived term has order " + std::to_string(r.order) +
                                " < -n and is not locally integrable");
    return r;
}

/// Sampled sup over dyadic shells of |D^sigma(xi^gamma~ D^gamma p)| / |p|.
inline double lemma31_ratio_bound(const PolyhomogeneousSymbol& p, const SymbolDerivativeSpec& spec,
                                  int samples_per_octave = 64) {
    if (p.dimension() != 1) throw PreconditionError("lemma31_ratio_bound is implemented for n = 1 only");
    if (spec.gamma != spec.gamma_tilde)
        throw PreconditionError("precondition |gamma| = |gamma~| violated");
    auto m = singularity_index(p);
    if (!m) throw PreconditionError("symbol has no singularity index (all terms polynomial)");
    if (spec.sigma > int(std::floor(*m)))
        throw PreconditionError("precondition |sigma| <= [m] violated: sigma = " + std::to_string(spec.sigma) +
                                ", [m] = " + std::to_string(int(std::floor(*m))));
    std::vector<HomogeneousTerm> derived;
    for (const auto& t : p.terms()) derived.push_back(derived_term(t, spec));
    const bool keep_constant = spec.gamma == 0 && spec.sigma == 0;

    double sup = 0.0;
    for (double r : detail::shell_radii(samples_per_octave)) {
        for (double xi : {r, -r}) {
            complex num = keep_constant ? p.p0() : complex{};
            for (const auto& t : derived) num += t(xi);
            sup = std::max(sup, std::abs(num) / std::abs(p(xi)));
        }
    }
    return sup;
}

}  // namespace polydecay
