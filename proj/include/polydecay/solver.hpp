#pragma once

// Spectral iterations for p(D)u = f + F(u) on a periodic grid.

#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"
#include "polydecay/multiplier.hpp"
#include "polydecay/nonlinearity.hpp"
#include "polydecay/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace polydecay {

enum class SolveMethod { fixed_point, petviashvili };

enum class SolveStatus { converged, max_iterations, diverged };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::diverged: return "diverged";
    }
    return "unknown";
}

struct SolveConfig {
    explicit SolveConfig(Field guess) : initial_guess(std::move(guess)) {}

    Field initial_guess;
    int max_iterations = 500;
    double residual_tolerance = 1e-10;
    SolveMethod method = SolveMethod::petviashvili;
    std::optional<double> petviashvili_exponent;  ///< defaults to k / (k - 1)
    double damping = 1.0;
};

struct SolveResult {
    Field profile;
    std::vector<double> residual_history;
    bool converged = false;
    int iterations_used = 0;
    SolveStatus status = SolveStatus::max_iterations;
    std::string diagnostic;
    std::optional<complex> stabilizing_factor;  ///< last Petviashvili factor
};

namespace detail {

inline void validate(const SolveConfig& cfg) {
    require_space(cfg.initial_guess, "solve");
    if (cfg.max_iterations < 1) throw PreconditionError("max_iterations must be positive");
    if (!(cfg.residual_tolerance > 0.0)) throw PreconditionError("residual tolerance must be positive");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw PreconditionError("damping must lie in (0, 1]");
    if (cfg.petviashvili_exponent && !std::isfinite(*cfg.petviashvili_exponent))
        throw PreconditionError("Petviashvili exponent must be finite");
}

inline void require_elliptic(const PolyhomogeneousSymbol& p) {
    auto check = check_ellipticity(p);
    if (!check.elliptic)
        throw NonEllipticError(check.witness, check.infimum, non_elliptic_message(check));
}

inline double relative_residual(const LatticeSymbol& p, const Nonlinearity& F, const Field* f, const Field& u) {
    Field r = apply(p, u) - evaluate_nonlinearity(F, u);
    if (f) r -= *f;
    return l2_norm(r) / std::max(l2_norm(u), std::numeric_limits<double>::epsilon());
}

inline bool finite(const Field& u) {
    return std::all_of(u.values().begin(), u.values().end(),
                       [](complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

// Shared bookkeeping: returns true when the iteration must stop.
inline bool record(SolveResult& res, double r, double tol, double& best) {
    res.residual_history.push_back(r);
    res.iterations_used = int(res.residual_history.size());
    if (!std::isfinite(r)) {
        res.status = SolveStatus::diverged;
        res.diagnostic = "residual became non-finite at iteration " + std::to_string(res.iterations_used);
        return true;
    }
    best = std::min(best, r);
    if (r <= tol) {
        res.status = SolveStatus::converged;
        res.converged = true;
        return true;
    }
    if (r > 10.0 * best) {
        res.status = SolveStatus::diverged;
        res.diagnostic = "residual " + std::to_string(r) + " exceeds 10x its minimum " + std::to_string(best) +
                         " at iteration " + std::to_string(res.iterations_used);
        return true;
    }
    return false;
}

}  // namespace detail

/// Residual || p(D)u - f - F(u) ||_2 / max(||u||_2, eps).
inline double equation_residual(const PolyhomogeneousSymbol& p, const Nonlinearity& F, const Field* f, const Field& u) {
    return detail::relative_residual(lattice(p, u.grid()), F, f, u);
}

/// u <- (1 - d) u + d P^-1 (f + F(u)).
inline SolveResult fixed_point_solve(const PolyhomogeneousSymbol& p, const Nonlinearity& F,
                                     const std::optional<Field>& f, const SolveConfig& cfg) {
    detail::validate(cfg);
    detail::require_elliptic(p);
    const GridSpec& grid = cfg.initial_guess.grid();
    if (f && !(f->grid() == grid)) throw PreconditionError("forcing and initial guess grids differ");
    const LatticeSymbol sym = lattice(p, grid);
    const LatticeSymbol inv = sym.reciprocal();
    const Field* forcing = f ? &*f : nullptr;

    SolveResult res{cfg.initial_guess, {}, false, 0, SolveStatus::max_iterations, {}, std::nullopt};
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iterations; ++it) {
        Field rhs = evaluate_nonlinearity(F, res.profile);
        if (forcing) rhs += *forcing;
        Field next = apply(inv, rhs);
        res.profile = (1.0 - cfg.damping) * res.profile + cfg.damping * next;
        double r = detail::finite(res.profile) ? detail::relative_residual(sym, F, forcing, res.profile)
                                               : std::numeric_limits<double>::infinity();
        if (detail::record(res, r, cfg.residual_tolerance, best)) return res;
    }
    res.diagnostic = "no convergence within " + std::to_string(cfg.max_iterations) + " iterations";
    return res;
}

/// Petviashvili iteration for p(D)u = F_k u^k:
///   u^_{n+1} = M_n^gamma (F_k u_n^k)^ / p,
///   M_n = <p u^_n, u^_n> / <(F_k u_n^k)^, u^_n>.
inline SolveResult petviashvili_solve(const PolyhomogeneousSymbol& p, const Nonlinearity& F, const SolveConfig& cfg) {
    detail::validate(cfg);
    detail::require_elliptic(p);
    if (!F.is_monomial()) throw PreconditionError("Petviashvili iteration needs a monomial nonlinearity");
    const auto [k, coeff] = F.leading();
    const double gamma = cfg.petviashvili_exponent.value_or(double(k) / double(k - 1));
    if (l2_norm(cfg.initial_guess) == 0.0) throw PreconditionError("Petviashvili iteration needs a nonzero initial guess");

    const GridSpec& grid = cfg.initial_guess.grid();
    const LatticeSymbol sym = lattice(p, grid);
    const LatticeSymbol inv = sym.reciprocal();

    SolveResult res{cfg.initial_guess, {}, false, 0, SolveStatus::max_iterations, {}, std::nullopt};
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iterations; ++it) {
        Field spectrum = forward_transform(res.profile);
        Field nonlinear = forward_transform(evaluate_nonlinearity(F, res.profile));
        complex num{}, den{};
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            num += sym[i] * spectrum[i] * std::conj(spectrum[i]);
            den += nonlinear[i] * std::conj(spectrum[i]);
        }
        if (std::abs(den) == 0.0 || !std::isfinite(std::abs(den))) {
            res.status = SolveStatus::diverged;
            res.diagnostic = "stabilizing factor undefined (zero denominator) at iteration " + std::to_string(it + 1);
            return res;
        }
        const complex factor = num / den;
        res.stabilizing_factor = factor;
        const complex scale = std::pow(factor, gamma);
        for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] = scale * nonlinear[i] * inv[i];
        Field next = inverse_transform(spectrum);
        res.profile = (1.0 - cfg.damping) * res.profile + cfg.damping * next;
        double r = detail::finite(res.profile) ? detail::relative_residual(sym, F, nullptr, res.profile)
                                               : std::numeric_limits<double>::infinity();
        if (detail::record(res, r, cfg.residual_tolerance, best)) return res;
    }
    res.diagnostic = "no convergence within " + std::to_string(cfg.max_iterations) + " iterations";
    return res;
}

inline SolveResult solve(const PolyhomogeneousSymbol& p, const Nonlinearity& F, const std::optional<Field>& f,
                         const SolveConfig& cfg) {
    if (cfg.method == SolveMethod::petviashvili) {
        if (f) throw PreconditionError("Petviashvili iteration does not take a forcing term");
        return petviashvili_solve(p, F, cfg);
    }
    return fixed_point_solve(p, F, f, cfg);
}

/// Translates u by whole nodes so that its largest modulus sits at x = 0.
inline Field center_profile(const Field& u) {
    require_space(u, "center_profile");
    std::size_t best = 0;
    for (std::size_t i = 1; i < u.size(); ++i)
        if (std::abs(u[i]) > std::abs(u[best])) best = i;
    auto axes = u.grid().axes(best);
    const long o = long(u.grid().origin_index());
    std::array<long, 2> by{o - long(axes[0]), u.grid().dimension() == 2 ? o - long(axes[1]) : 0};
    return shift(u, by);
}

}  // namespace polydecay
