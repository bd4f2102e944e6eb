#pragma once

// Numerical checks of commutator identities between Fourier multipliers and
// monomial weights, and bounded-ratio probes for smoothing operators.
//
// Weight-derivative expansions are derived by operator ordering on the Fourier side,
// where x acts as Y = i d/dxi and D as X = xi, with [Y, X] = i:
//   Y^b f(X)  = sum_g C(b,g) (-1)^g (D^g f)(X) Y^{b-g},
//   Y^b X^a   = sum_j C(b,j) C(a,j) j! i^j X^{a-j} Y^{b-j},
//   X^a Y^c   = sum_l C(a,l) C(c,l) l! (-i)^l Y^{c-l} X^{a-l}.
// Pulling X^g to the left of each normally ordered word turns
// x^beta p(D) D^alpha v into a sum of (xi^g D^g p)(D)(x^b~ D^a~ v).

#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"
#include "polydecay/multiplier.hpp"
#include "polydecay/symbols.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace polydecay {

struct MultiIndex {
    std::array<int, 2> entries{};
    int dimension = 1;

    MultiIndex() = default;
    MultiIndex(int k) : entries{k, 0}, dimension(1) { validate(); }  // NOLINT: integers are 1-D multi-indices
    MultiIndex(int a, int b) : entries{a, b}, dimension(2) { validate(); }

    int order() const noexcept { return entries[0] + entries[1]; }
    int operator[](std::size_t i) const noexcept { return entries[i]; }

private:
    void validate() const {
        if (entries[0] < 0 || entries[1] < 0) throw PreconditionError("multi-index entries must be nonnegative");
    }
};

struct IdentityReport {
    double lhs_norm = 0.0;
    double rhs_norm = 0.0;
    double residual_norm = 0.0;
    double relative_residual = 0.0;
    double radius = 0.0;  ///< norms are taken over |x| <= radius
};

inline IdentityReport compare_fields(const Field& lhs, const Field& rhs, double radius) {
    IdentityReport r;
    r.radius = radius;
    r.lhs_norm = l2_norm_within(lhs, radius);
    r.rhs_norm = l2_norm_within(rhs, radius);
    r.residual_norm = l2_norm_within(lhs - rhs, radius);
    r.relative_residual = r.residual_norm / std::max(r.lhs_norm, std::numeric_limits<double>::min());
    return r;
}

/// Identities are compared on |x| <= L/16, where periodization of the
/// slowly decaying q(D)v is negligible.
inline double identity_radius(const GridSpec& g) { return g.half_length() / 16.0; }

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

namespace detail {

inline Field times_power_of_x(const Field& v, int power) {
    Field out = v;
    if (power == 0) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::pow(out.grid().point(i)[0], power);
    return out;
}

inline double factorial_of(int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

inline Field apply_d_power(const Field& v, int power) {
    if (power == 0) return v;
    return apply(lattice(HomogeneousTerm::monomial(power), v.grid()), v);
}

}  // namespace detail

/// x^rho q(D) v against q(D)(x^rho v) + sum_{0 < s <= rho} C(rho,s) (-1)^s (D^s q)(D)(x^{rho-s} v), n = 1.
inline IdentityReport prop33_check(const HomogeneousTerm& q, const MultiIndex& rho, const Field& v,
                                   std::optional<double> radius = std::nullopt) {
    require_space(v, "prop33_check");
    if (q.dimension != 1 || rho.dimension != 1 || v.grid().dimension() != 1)
        throw PreconditionError("prop33_check is implemented for n = 1");
    if (!(q.order > 0.0)) throw PreconditionError("prop33_check needs a term of positive order");
    const int k = rho.order();
    if (!(double(k) < q.order + 1.0))
        throw PreconditionError("precondition |rho| < m + n violated: |rho| = " + std::to_string(k) +
                                ", m + n = " + std::to_string(q.order + 1.0));
    const GridSpec& g = v.grid();
    Field lhs = detail::times_power_of_x(apply(lattice(q, g), v), k);
    Field rhs(g, Domain::space);
    for (int s = 0; s <= k; ++s) {
        HomogeneousTerm dq = derived_term(q, {s, 0, 0});
        if (dq.is_zero()) continue;
        Field term = apply(lattice(dq, g), detail::times_power_of_x(v, k - s));
        rhs += (binomial(k, s) * (s % 2 ? -1.0 : 1.0)) * term;
    }
    return compare_fields(lhs, rhs, radius.value_or(identity_radius(g)));
}

/// One summand C (xi^g D^g p)(D)(x^beta_t D^alpha_t v) of the weight-derivative expansion.
struct Prop32Term {
    complex coefficient;
    int gamma = 0;  ///< |gamma| = |gamma~|
    int beta_tilde = 0;
    int alpha_tilde = 0;
};

/// Expansion of x^beta p(D) D^alpha in one dimension for beta <= alpha <= 2.
/// The first entry is the main term p(D)(x^beta D^alpha v).
inline std::vector<Prop32Term> prop32_expansion(int alpha, int beta) {
    if (alpha < 0 || alpha > 2 || beta < 0 || beta > alpha)
        throw PreconditionError("prop32 expansion is available for 0 <= beta <= alpha <= 2, got alpha = " +
                                std::to_string(alpha) + ", beta = " + std::to_string(beta));
    const complex i{0.0, 1.0};
    std::map<std::tuple<int, int, int>, complex> acc;
    for (int g = 0; g <= beta; ++g) {
        const int b = beta - g;
        const complex c_g = binomial(beta, g) * (g % 2 ? -1.0 : 1.0);
        for (int j = 0; j <= std::min(b, alpha); ++j) {
            const complex c_j = binomial(b, j) * binomial(alpha, j) * detail::factorial_of(j) * std::pow(i, j);
            const int a = alpha - j - g, c = b - j;
            for (int l = 0; l <= std::min(a, c); ++l) {
                const complex c_l = binomial(a, l) * binomial(c, l) * detail::factorial_of(l) * std::pow(-i, l);
                acc[{g, c - l, a - l}] += c_g * c_j * c_l;
            }
        }
    }
    std::vector<Prop32Term> out;
    for (const auto& [key, coeff] : acc) {
        if (std::abs(coeff) < 1e-14) continue;
        auto [g, bt, at] = key;
        Prop32Term t{coeff, g, bt, at};
        if (g == 0 && bt == beta && at == alpha) out.insert(out.begin(), t);
        else out.push_back(t);
    }
    return out;
}

/// x^beta p(D) D^alpha v against its expansion, n = 1.
inline IdentityReport prop32_check_1d(const HomogeneousTerm& p, int alpha, int beta, const Field& v,
                                      std::optional<double> radius = std::nullopt) {
    require_space(v, "prop32_check_1d");
    if (p.dimension != 1 || v.grid().dimension() != 1) throw PreconditionError("prop32_check_1d needs n = 1");
    if (!(p.order >= 1.0)) throw PreconditionError("prop32_check_1d needs a term of order m >= 1");
    const auto terms = prop32_expansion(alpha, beta);
    const GridSpec& g = v.grid();
    Field lhs = detail::times_power_of_x(apply(lattice(p, g), detail::apply_d_power(v, alpha)), beta);
    Field rhs(g, Domain::space);
    for (const auto& t : terms) {
        HomogeneousTerm sym = derived_term(p, {t.gamma, t.gamma, 0});
        if (sym.is_zero()) continue;
        Field inner = detail::times_power_of_x(detail::apply_d_power(v, t.alpha_tilde), t.beta_tilde);
        rhs += t.coefficient * apply(lattice(sym, g), inner);
    }
    return compare_fields(lhs, rhs, radius.value_or(identity_radius(g)));
}

/// Dilated Gaussians e^{-|x/a|^2/2}.
inline std::vector<Field> dilated_gaussians(const GridSpec& g, const std::vector<double>& dilations) {
    std::vector<Field> out;
    for (double a : dilations)
        out.push_back(sample([a](const Point& x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]) / (a * a)); }, g));
    return out;
}

inline std::vector<double> default_dilations() { return {1, 2, 4, 8, 16, 32, 64}; }

/// Default probe grid: wide enough that the widest Gaussian and the slow
/// tails of the smoothed output stay well inside the periodic cell.
inline GridSpec default_probe_grid() { return GridSpec(1, 4096.0, std::size_t(1) << 16); }

struct ProbeReport {
    std::vector<std::optional<double>> ratios;  ///< empty entries mark degenerate inputs
    std::optional<double> max_over_min;
    bool monotone_growth = false;
    bool bounded = false;
};

/// Ratio family statistics: bounded iff max/min <= 10 and the ratios are
/// not strictly increasing along the family.
inline ProbeReport summarize_ratios(std::vector<std::optional<double>> ratios, double bound = 10.0) {
    ProbeReport rep;
    rep.ratios = std::move(ratios);
    std::vector<double> valid;
    for (const auto& r : rep.ratios)
        if (r) valid.push_back(*r);
    if (valid.empty()) return rep;
    double lo = *std::min_element(valid.begin(), valid.end());
    double hi = *std::max_element(valid.begin(), valid.end());
    if (hi == 0.0) {
        rep.max_over_min = 1.0;
        rep.bounded = true;
        return rep;
    }
    rep.max_over_min = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    rep.monotone_growth = valid.size() >= 3;
    for (std::size_t i = 1; i < valid.size(); ++i)
        if (!(valid[i] > valid[i - 1])) rep.monotone_growth = false;
    rep.bounded = *rep.max_over_min <= bound && !rep.monotone_growth;
    return rep;
}

/// || H_{phi,q} v ||_{H^s} / || v ||_{H^s_1} over a family of inputs.
inline ProbeReport lemma34_probe(const HomogeneousTerm& q, double s, const std::vector<Field>& family,
                                 const CutoffSpec& cutoff = {}) {
    const double n = double(q.dimension);
    if (!(q.order > -n / 2.0 && q.order < 0.0))
        throw PreconditionError("precondition -n/2 < mu < 0 violated: mu = " + std::to_string(q.order));
    std::vector<std::optional<double>> ratios;
    for (const auto& v : family) {
        double den = l1_sobolev_norm(v, s);
        if (den == 0.0) {
            ratios.push_back(std::nullopt);
            continue;
        }
        Field hv = smoothing_operator(q, cutoff, v);
        ratios.push_back(weighted_sobolev_norm(hv, {s, 0.0}, 0.5 * v.grid().half_length()) / den);
    }
    return summarize_ratios(std::move(ratios));
}

inline ProbeReport lemma34_probe(const HomogeneousTerm& q, double s = 0.0) {
    return lemma34_probe(q, s, dilated_gaussians(default_probe_grid(), default_dilations()));
}

/// Denominator of the fractional-weight commutator estimate.
enum class CommutatorMode {
    weighted_l1,  ///< against || v ||_{H^s_1}, needs mu - r > -n/2
    sobolev,      ///< against || v ||_{H^s}, needs mu - r > 0
};

/// || [<x>^r, H_{phi,q}] v ||_{H^s} / denominator over a family of inputs.
inline ProbeReport lemma35_probe(const HomogeneousTerm& q, double r, double s, CommutatorMode mode,
                                 const std::vector<Field>& family, const CutoffSpec& cutoff = {}) {
    const double n = double(q.dimension);
    if (!(r >= 0.0 && r < 1.0)) throw PreconditionError("precondition 0 <= r < 1 violated: r = " + std::to_string(r));
    const double gap = q.order - r;
    if (mode == CommutatorMode::weighted_l1 && !(gap > -n / 2.0))
        throw PreconditionError("precondition mu - r > -n/2 violated: mu - r = " + std::to_string(gap));
    if (mode == CommutatorMode::sobolev && !(gap > 0.0))
        throw PreconditionError("precondition mu - r > 0 violated: mu - r = " + std::to_string(gap));
    std::vector<std::optional<double>> ratios;
    for (const auto& v : family) {
        double den = mode == CommutatorMode::weighted_l1 ? l1_sobolev_norm(v, s)
                                                         : weighted_sobolev_norm(v, {s, 0.0});
        if (den == 0.0) {
            ratios.push_back(std::nullopt);
            continue;
        }
        Field weight(v.grid(), Domain::space);
        for (std::size_t i = 0; i < v.size(); ++i) {
            Point x = v.grid().point(i);
            weight[i] = std::pow(1.0 + x[0] * x[0] + x[1] * x[1], 0.5 * r);
        }
        Field c = weight * cutoff_multiplier(q, cutoff, v) - cutoff_multiplier(q, cutoff, weight * v);
        ratios.push_back(weighted_sobolev_norm(c, {s, 0.0}, 0.5 * v.grid().half_length()) / den);
    }
    return summarize_ratios(std::move(ratios));
}

inline ProbeReport lemma35_probe(const HomogeneousTerm& q, double r, double s, CommutatorMode mode) {
    return lemma35_probe(q, r, s, mode, dilated_gaussians(default_probe_grid(), default_dilations()));
}

}  // namespace polydecay
