#pragma once

// Measuring algebraic decay: log-log tail fits, weighted-norm growth scans
// over nested grids, and the (alpha, beta) report of weighted derivative
// norms against the predicted threshold m + n/2.

#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"
#include "polydecay/multiplier.hpp"
#include "polydecay/parallel.hpp"
#include "polydecay/symbols.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace polydecay {

struct TailWindow {
    double x_min = 10.0;
    double x_max = 40.0;
};

struct DecayFit {
    double exponent = 0.0;
    double log_amplitude = 0.0;
    double r_squared = 0.0;
    TailWindow window;
    std::size_t samples = 0;
};

/// Growth slopes up to this value count as "bounded".
inline constexpr double kBoundedSlopeThreshold = 0.05;

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r_squared = syy > 0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return f;
}

inline void validate_window(const TailWindow& w) {
    if (!(w.x_min >= 1.0)) throw PreconditionError("tail window needs x_min >= 1");
    if (!(w.x_max > w.x_min)) throw PreconditionError("tail window needs x_max > x_min");
}

inline DecayFit fit_amplitudes(const std::vector<double>& radii, const std::vector<double>& amplitudes,
                               const TailWindow& w) {
    if (radii.size() < 3) throw DegenerateInput("tail window holds fewer than three sample radii");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(amplitudes[i] > 0.0) || !std::isfinite(amplitudes[i]))
            throw PreconditionError("nonpositive tail sample at r = " + std::to_string(radii[i]) +
                                    "; algebraic decay model does not apply");
        lx.push_back(std::log(radii[i]));
        ly.push_back(std::log(amplitudes[i]));
    }
    auto line = least_squares(lx, ly);
    return {-line.slope, line.intercept, line.r_squared, w, radii.size()};
}

}  // namespace detail

/// Tail fit of a grid field. In one dimension the amplitude at r averages
/// |u(r)| and |u(-r)|; in two dimensions it averages |u| over radial shells
/// of width h.
inline DecayFit fit_tail_exponent(const Field& u, const TailWindow& w) {
    require_space(u, "fit_tail_exponent");
    detail::validate_window(w);
    const GridSpec& g = u.grid();
    if (w.x_max > 0.5 * g.half_length() * (1.0 + 1e-12))
        throw PreconditionError("tail window exceeds the trusted region |x| <= L/2 (L = " +
                                std::to_string(g.half_length()) + ")");
    std::vector<double> radii, amps;
    if (g.dimension() == 1) {
        const std::size_t o = g.origin_index();
        for (std::size_t j = 1; j < o; ++j) {
            double r = double(j) * g.spacing();
            if (r < w.x_min || r > w.x_max) continue;
            radii.push_back(r);
            amps.push_back(0.5 * (std::abs(u[o + j]) + std::abs(u[o - j])));
        }
    } else {
        const double h = g.spacing();
        const std::size_t bins = std::size_t(std::ceil((w.x_max - w.x_min) / h));
        std::vector<double> sum_r(bins, 0.0), sum_a(bins, 0.0);
        std::vector<std::size_t> count(bins, 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            double r = norm_of(g.point(i));
            if (r < w.x_min || r > w.x_max) continue;
            std::size_t b = std::min(bins - 1, std::size_t((r - w.x_min) / h));
            sum_r[b] += r;
            sum_a[b] += std::abs(u[i]);
            ++count[b];
        }
        for (std::size_t b = 0; b < bins; ++b)
            if (count[b]) {
                radii.push_back(sum_r[b] / double(count[b]));
                amps.push_back(sum_a[b] / double(count[b]));
            }
    }
    return detail::fit_amplitudes(radii, amps, w);
}

/// Tail fit of a one-dimensional pointwise function on log-uniform radii.
template <class F>
    requires std::is_invocable_v<F&, double>
DecayFit fit_tail_exponent(F&& f, const TailWindow& w, std::size_t samples = 256) {
    detail::validate_window(w);
    std::vector<double> radii, amps;
    for (std::size_t i = 0; i < samples; ++i) {
        double r = w.x_min * std::pow(w.x_max / w.x_min, double(i) / double(samples - 1));
        radii.push_back(r);
        amps.push_back(0.5 * (std::abs(complex(f(r))) + std::abs(complex(f(-r)))));
    }
    return detail::fit_amplitudes(radii, amps, w);
}

struct AlgebraicCheck {
    DecayFit inner;
    DecayFit outer;
    bool algebraic = true;  ///< false when the exponent more than doubles
};

/// Fits two windows and flags super-algebraic decay.
template <class Source>
AlgebraicCheck check_algebraic(Source&& u, const TailWindow& inner, const TailWindow& outer) {
    AlgebraicCheck c{fit_tail_exponent(u, inner), fit_tail_exponent(u, outer), true};
    c.algebraic = !(c.outer.exponent > 2.0 * c.inner.exponent);
    return c;
}

struct PredictedRates {
    double singularity_index = 0.0;
    int dimension = 1;
    double pointwise_exponent = 0.0;  ///< m + n
    double weight_threshold = 0.0;    ///< m + n/2
    int critical_integer = 0;         ///< max{ j : j < m + n/2 }
    bool hypothesis_holds = false;    ///< [m] > n/2
    std::string warning;
};

inline int critical_integer(double threshold) {
    double r = std::round(threshold);
    if (std::abs(threshold - r) < 1e-12) return int(r) - 1;
    return int(std::floor(threshold));
}

/// Empty for purely polynomial symbols (no algebraic-decay prediction).
inline std::optional<PredictedRates> predicted_rates(const PolyhomogeneousSymbol& p, int n) {
    if (n != p.dimension()) throw PreconditionError("dimension does not match the symbol");
    auto m = singularity_index(p);
    if (!m) return std::nullopt;
    PredictedRates r;
    r.singularity_index = *m;
    r.dimension = n;
    r.pointwise_exponent = *m + n;
    r.weight_threshold = *m + 0.5 * n;
    r.critical_integer = critical_integer(r.weight_threshold);
    r.hypothesis_holds = std::floor(*m + 1e-12) > 0.5 * n;
    if (!r.hypothesis_holds)
        r.warning = "hypothesis [m] > n/2 fails: [m] = " + std::to_string(int(std::floor(*m + 1e-12))) +
                    ", n/2 = " + std::to_string(0.5 * n);
    return r;
}

/// Truncated norms || <x>^t <D>^s u ||_{L2(|x| <= L)} per (t, L).
struct NormScan {
    std::vector<double> weights;
    std::vector<double> lengths;
    std::vector<std::vector<double>> table;  ///< table[weight][length]
    std::vector<std::optional<double>> growth_slopes;
};

/// Grid spacing h with half-length at least padding * L; the spacing is
/// identical for every L so nested scans resolve the same scale.
inline GridSpec nested_grid(double length, double spacing = 0.05, double padding = 2.0, int dimension = 1) {
    if (!(spacing > 0.0) || !(padding >= 1.0)) throw PreconditionError("nested grid needs h > 0 and padding >= 1");
    std::size_t n = 2;
    while (double(n) * spacing < 2.0 * padding * length) n *= 2;
    return GridSpec(dimension, 0.5 * double(n) * spacing, n);
}

namespace detail {

inline void validate_scan(const std::vector<double>& weights, const std::vector<double>& lengths) {
    if (weights.empty()) throw PreconditionError("norm scan needs at least one weight");
    if (lengths.size() < 2) throw PreconditionError("norm scan needs at least two lengths");
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0)) throw PreconditionError("scan lengths must be positive");
        if (i > 0 && !(lengths[i] > lengths[i - 1])) throw PreconditionError("scan lengths must be strictly increasing");
    }
}

inline NormScan scan_fields(const std::vector<Field>& fields, const std::vector<double>& weights,
                            const std::vector<double>& lengths, double s) {
    NormScan scan{weights, lengths, std::vector<std::vector<double>>(weights.size(), std::vector<double>(lengths.size())), {}};
    const double h = fields.front().grid().spacing();
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const GridSpec& g = fields[j].grid();
        if (g.half_length() < lengths[j] * (1.0 - 1e-12))
            throw PreconditionError("scan grid half-length is smaller than the truncation length");
        if (std::abs(g.spacing() - h) > 1e-9 * h) throw PreconditionError("scan grids must share one spacing h");
    }
    parallel_for(weights.size() * lengths.size(), [&](std::size_t idx) {
        std::size_t w = idx / lengths.size(), j = idx % lengths.size();
        scan.table[w][j] = weighted_sobolev_norm(fields[j], {s, weights[w]}, lengths[j]);
    });
    std::vector<double> lx;
    for (double L : lengths) lx.push_back(std::log(L));
    for (const auto& row : scan.table) {
        bool positive = std::all_of(row.begin(), row.end(), [](double v) { return v > 0.0; });
        if (!positive) {
            scan.growth_slopes.push_back(std::nullopt);
            continue;
        }
        std::vector<double> ly;
        for (double v : row) ly.push_back(std::log(v));
        scan.growth_slopes.push_back(least_squares(lx, ly).slope);
    }
    return scan;
}

}  // namespace detail

/// Per-L field provider: returns u sampled (or solved) on a grid whose
/// half-length is at least L. Must be safe to call concurrently.
using FieldProvider = std::function<Field(double)>;

inline std::vector<Field> provide_fields(const FieldProvider& provider, const std::vector<double>& lengths) {
    std::vector<std::optional<Field>> slots(lengths.size());
    parallel_for(lengths.size(), [&](std::size_t j) { slots[j] = provider(lengths[j]); });
    std::vector<Field> out;
    for (auto& f : slots) out.push_back(std::move(*f));
    return out;
}

inline NormScan weighted_norm_scan(const FieldProvider& provider, const std::vector<double>& weights,
                                   const std::vector<double>& lengths, double s = 0.0) {
    detail::validate_scan(weights, lengths);
    return detail::scan_fields(provide_fields(provider, lengths), weights, lengths, s);
}

/// Pointwise one-dimensional overload on nested grids of spacing h.
template <class F>
    requires std::is_invocable_v<F&, double>
NormScan weighted_norm_scan(F f, const std::vector<double>& weights, const std::vector<double>& lengths,
                            double s = 0.0, double spacing = 0.05) {
    return weighted_norm_scan(FieldProvider([f, spacing](double L) { return sample(f, nested_grid(L, spacing)); }),
                              weights, lengths, s);
}

struct TheoremReportConfig {
    int max_order = 2;
    double epsilon = 0.25;
    double s = 0.0;
    std::vector<double> lengths{50.0, 100.0, 200.0, 400.0};
    TailWindow tail_window{10.0, 40.0};
    double spacing = 0.05;  ///< nested-grid spacing for pointwise inputs
};

struct DerivativeVerdict {
    std::array<int, 2> alpha{};
    std::array<int, 2> beta{};
    std::vector<double> norms;
    std::optional<double> slope;  ///< empty when x^beta d^alpha u vanishes
    bool bounded = false;
};

struct TheoremReport {
    PredictedRates rates;
    double epsilon = 0.0;
    double s = 0.0;
    double weight = 0.0;  ///< m + n/2 - epsilon
    std::vector<double> lengths;
    std::vector<DerivativeVerdict> verdicts;
    DecayFit tail;
    bool all_bounded = false;
};

/// x^beta d^alpha u with the derivative taken spectrally.
inline Field weighted_derivative(const Field& u, std::array<int, 2> alpha, std::array<int, 2> beta) {
    Field d = alpha == std::array<int, 2>{0, 0} ? u : apply(derivative_symbol(u.grid(), alpha), u);
    if (beta != std::array<int, 2>{0, 0})
        for (std::size_t i = 0; i < d.size(); ++i) {
            Point x = u.grid().point(i);
            d[i] *= std::pow(x[0], beta[0]) * std::pow(x[1], beta[1]);
        }
    return d;
}

/// All multi-index pairs with |alpha| <= max_order and |beta| <= |alpha|.
inline std::vector<std::pair<std::array<int, 2>, std::array<int, 2>>> derivative_pairs(int dimension, int max_order) {
    std::vector<std::array<int, 2>> idx;
    for (int a = 0; a <= max_order; ++a)
        for (int b = 0; b <= (dimension == 2 ? max_order - a : 0); ++b) idx.push_back({a, b});
    std::vector<std::pair<std::array<int, 2>, std::array<int, 2>>> out;
    for (const auto& alpha : idx)
        for (const auto& beta : idx)
            if (beta[0] + beta[1] <= alpha[0] + alpha[1]) out.emplace_back(alpha, beta);
    return out;
}

inline TheoremReport theorem_report(const PolyhomogeneousSymbol& p, const FieldProvider& provider,
                                    const TheoremReportConfig& cfg = {}) {
    if (cfg.max_order < 0 || cfg.max_order > 2) throw PreconditionError("theorem report supports max_order <= 2");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
    const int n = p.dimension();
    auto rates = predicted_rates(p, n);
    if (!rates) throw PreconditionError("symbol is polynomial: no singularity index, no algebraic prediction");
    if (!rates->hypothesis_holds) throw PreconditionError(rates->warning);
    detail::validate_scan({1.0}, cfg.lengths);

    TheoremReport rep;
    rep.rates = *rates;
    rep.epsilon = cfg.epsilon;
    rep.s = cfg.s;
    rep.weight = rates->weight_threshold - cfg.epsilon;
    rep.lengths = cfg.lengths;

    const std::vector<Field> base = provide_fields(provider, cfg.lengths);
    for (const auto& [alpha, beta] : derivative_pairs(n, cfg.max_order)) {
        std::vector<Field> fields;
        for (const auto& u : base) fields.push_back(weighted_derivative(u, alpha, beta));
        NormScan scan = detail::scan_fields(fields, {rep.weight}, cfg.lengths, cfg.s);
        DerivativeVerdict v{alpha, beta, scan.table[0], scan.growth_slopes[0], true};
        v.bounded = !v.slope || *v.slope <= kBoundedSlopeThreshold;
        rep.verdicts.push_back(std::move(v));
    }
    rep.all_bounded = std::all_of(rep.verdicts.begin(), rep.verdicts.end(), [](const auto& v) { return v.bounded; });
    rep.tail = fit_tail_exponent(base.back(), cfg.tail_window);
    return rep;
}

template <class F>
    requires std::is_invocable_v<F&, double>
TheoremReport theorem_report(const PolyhomogeneousSymbol& p, F f, const TheoremReportConfig& cfg = {}) {
    const double h = cfg.spacing;
    return theorem_report(p, FieldProvider([f, h](double L) { return sample(f, nested_grid(L, h)); }), cfg);
}

}  // namespace polydecay
