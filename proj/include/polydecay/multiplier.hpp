#pragma once

// Fourier multipliers on periodic grids.
//
// A homogeneous term that is not a polynomial is non-smooth at xi = 0, and
// sampling it on the lattice turns p(D)u into a trapezoid rule with an
// algebraic singularity at a node. For one-dimensional power laws
// c_plus xi^a (xi > 0), c_minus |xi|^a (xi < 0) with a > -1 the lattice sum
// differs from the integral by the generalized Euler-Maclaurin series
//     sum_j zeta(-a-j) dxi^{a+j+1} (c_plus + (-1)^j c_minus) phi^(j)(0) / j!,
// so the symbol values at bins |k| <= K receive weights w_k solving
//     sum_k w_k k^j = -zeta(-a-j) dxi^a (c_plus + (-1)^j c_minus),  j = 0..2K,
// which cancels the series through order 2K. Polynomial terms get no
// correction (every right-hand side vanishes). Two-dimensional radial terms of
// negative order use the disc average of the symbol over the origin cell.

#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"
#include "polydecay/symbols.hpp"

#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polydecay {

/// Half-width K of the near-origin correction stencil.
inline constexpr int kNearOriginHalfWidth = 4;

class LatticeSymbol {
public:
    explicit LatticeSymbol(GridSpec grid, complex fill = 0.0) : grid_(grid), values_(grid.size(), fill) {}
    LatticeSymbol(GridSpec grid, std::vector<complex> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) throw PreconditionError("lattice symbol size mismatch");
    }

    /// Samples an arbitrary function of the frequency point.
    template <class F>
    static LatticeSymbol from_function(const GridSpec& grid, F&& f) {
        LatticeSymbol s(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) s.values_[i] = complex(f(grid.frequency_point(i)));
        return s;
    }

    const GridSpec& grid() const noexcept { return grid_; }
    std::span<const complex> values() const noexcept { return values_; }
    std::span<complex> values() noexcept { return values_; }
    complex operator[](std::size_t i) const noexcept { return values_[i]; }
    complex& operator[](std::size_t i) noexcept { return values_[i]; }

    LatticeSymbol& operator+=(const LatticeSymbol& o) { check(o); for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i]; return *this; }
    LatticeSymbol& operator-=(const LatticeSymbol& o) { check(o); for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i]; return *this; }
    LatticeSymbol& operator*=(const LatticeSymbol& o) { check(o); for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i]; return *this; }
    LatticeSymbol& operator*=(complex a) { for (auto& v : values_) v *= a; return *this; }
    LatticeSymbol& operator+=(complex a) { for (auto& v : values_) v += a; return *this; }

    friend LatticeSymbol operator+(LatticeSymbol a, const LatticeSymbol& b) { return a += b; }
    friend LatticeSymbol operator-(LatticeSymbol a, const LatticeSymbol& b) { return a -= b; }
    friend LatticeSymbol operator*(LatticeSymbol a, const LatticeSymbol& b) { return a *= b; }
    friend LatticeSymbol operator*(complex s, LatticeSymbol a) { return a *= s; }

    LatticeSymbol reciprocal() const {
        LatticeSymbol r(grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i] == complex{})
                throw PreconditionError("lattice symbol vanishes at frequency index " + std::to_string(i));
            r.values_[i] = 1.0 / values_[i];
        }
        return r;
    }

private:
    void check(const LatticeSymbol& o) const {
        if (!(o.grid_ == grid_)) throw PreconditionError("lattice symbols live on different grids");
    }

    GridSpec grid_;
    std::vector<complex> values_;
};

namespace detail {

// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<complex> solve_dense(std::vector<double> a, std::vector<complex> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<complex> x(n);
    for (std::size_t i = n; i-- > 0;) {
        complex acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
        x[i] = acc / a[i * n + i];
    }
    return x;
}

}  // namespace detail

/// Correction weights w_{-K..K} (index k + K) for a one-dimensional
/// non-polynomial power-law term on a lattice of spacing dxi.
inline std::vector<complex> near_origin_weights(const HomogeneousTerm& t, double dxi, int half_width) {
    if (t.dimension != 1) throw PreconditionError("near-origin weights are defined for n = 1 terms");
    if (!(t.order > -1.0)) throw PreconditionError("near-origin weights need order > -1");
    const int K = half_width;
    const std::size_t n = std::size_t(2 * K + 1);
    std::vector<double> a(n * n);
    std::vector<complex> b(n);
    for (int j = 0; j <= 2 * K; ++j) {
        for (int k = -K; k <= K; ++k) a[std::size_t(j) * n + std::size_t(k + K)] = std::pow(double(k), j);
        double z = boost::math::zeta(-t.order - double(j));
        complex parity = t.c_plus + (j % 2 ? -1.0 : 1.0) * t.c_minus;
        b[std::size_t(j)] = -z * std::pow(dxi, t.order) * parity;
    }
    return detail::solve_dense(std::move(a), std::move(b));
}

/// Lattice values of one term with the near-origin rule applied.
inline LatticeSymbol lattice(const HomogeneousTerm& t, const GridSpec& grid,
                             int half_width = kNearOriginHalfWidth) {
    if (t.dimension != grid.dimension()) throw PreconditionError("term and grid dimensions differ");
    LatticeSymbol s(grid);
    const bool polynomial = t.is_polynomial();
    const double n = double(grid.dimension());
    if (!polynomial && !(t.order > -n))
        throw PreconditionError("term of order " + std::to_string(t.order) +
                                " <= -n is not locally integrable and cannot be applied");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Point xi = grid.frequency_point(i);
        if (norm_of(xi) == 0.0) continue;
        s[i] = t(xi);
    }
    if (grid.dimension() == 1) {
        const std::size_t origin = grid.origin_index();
        if (polynomial) {
            s[origin] = t(0.0);
        } else if (half_width >= 0) {
            if (grid.points() < std::size_t(2 * half_width + 1))
                throw PreconditionError("grid too small for the near-origin stencil");
            auto w = near_origin_weights(t, grid.frequency_spacing(), half_width);
            for (int k = -half_width; k <= half_width; ++k)
                s[std::size_t(long(origin) + k)] += w[std::size_t(k + half_width)];
        }
        return s;
    }
    const std::size_t origin = grid.origin_index() * grid.points() + grid.origin_index();
    if (polynomial) {
        s[origin] = t(Point{0.0, 0.0});
    } else if (t.order < 0.0) {
        // mean of a r^m over the disc of area dxi^2
        double r = grid.frequency_spacing() / std::sqrt(std::numbers::pi);
        s[origin] = t.c_plus * 2.0 * std::pow(r, t.order) / (t.order + 2.0);
    }
    return s;
}

inline LatticeSymbol lattice(const PolyhomogeneousSymbol& p, const GridSpec& grid,
                             int half_width = kNearOriginHalfWidth) {
    if (p.dimension() != grid.dimension()) throw PreconditionError("symbol and grid dimensions differ");
    LatticeSymbol s(grid, p.p0());
    for (const auto& t : p.terms()) s += lattice(t, grid, half_width);
    return s;
}

/// <xi>^s on the lattice.
inline LatticeSymbol bracket_symbol(const GridSpec& grid, double s) {
    return LatticeSymbol::from_function(grid, [s](const Point& xi) {
        return std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.5 * s);
    });
}

/// (i xi)^alpha: the symbol of the derivative d^alpha.
inline LatticeSymbol derivative_symbol(const GridSpec& grid, std::array<int, 2> alpha) {
    return LatticeSymbol::from_function(grid, [alpha](const Point& xi) {
        return std::pow(complex(0.0, xi[0]), alpha[0]) * std::pow(complex(0.0, xi[1]), alpha[1]);
    });
}

inline Field apply(const LatticeSymbol& symbol, const Field& u) {
    require_space(u, "apply");
    if (!(symbol.grid() == u.grid())) throw PreconditionError("symbol and field grids differ");
    Field spectrum = forward_transform(u);
    for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= symbol[i];
    return inverse_transform(spectrum);
}

inline Field apply(const PolyhomogeneousSymbol& p, const Field& u) { return apply(lattice(p, u.grid()), u); }
inline Field apply(const HomogeneousTerm& t, const Field& u) { return apply(lattice(t, u.grid()), u); }

/// Multiplier with symbol 1 / p on the lattice; requires global ellipticity.
inline Field inverse_apply(const PolyhomogeneousSymbol& p, const Field& u) {
    auto check = check_ellipticity(p);
    if (!check.elliptic)
        throw NonEllipticError(check.witness, check.infimum, non_elliptic_message(check));
    return apply(lattice(p, u.grid()).reciprocal(), u);
}

struct SobolevIndex {
    double s = 0.0;
    double t = 0.0;
};

/// || <x>^t <D>^s u ||_{L2}, optionally restricted to |x| <= radius.
inline double weighted_sobolev_norm(const Field& u, SobolevIndex idx, std::optional<double> radius = std::nullopt) {
    require_space(u, "weighted_sobolev_norm");
    Field w = idx.s == 0.0 ? u : apply(bracket_symbol(u.grid(), idx.s), u);
    if (idx.t != 0.0)
        for (std::size_t i = 0; i < w.size(); ++i) {
            Point x = u.grid().point(i);
            w[i] *= std::pow(1.0 + x[0] * x[0] + x[1] * x[1], 0.5 * idx.t);
        }
    return radius ? l2_norm_within(w, *radius) : l2_norm(w);
}

/// || <D>^s u ||_{L1}.
inline double l1_sobolev_norm(const Field& u, double s) {
    require_space(u, "l1_sobolev_norm");
    return s == 0.0 ? l1_norm(u) : l1_norm(apply(bracket_symbol(u.grid(), s), u));
}

struct CutoffSpec {
    double inner_radius = 1.0;
    double outer_radius = 2.0;
};

/// Smooth radial bump: 1 on r <= inner, 0 on r >= outer, exp(-1/t) transition.
inline double cutoff_profile(const CutoffSpec& c, double r) {
    if (r <= c.inner_radius) return 1.0;
    if (r >= c.outer_radius) return 0.0;
    double t = (r - c.inner_radius) / (c.outer_radius - c.inner_radius);
    double a = std::exp(-1.0 / (1.0 - t));
    double b = std::exp(-1.0 / t);
    return a / (a + b);
}

inline LatticeSymbol cutoff_symbol(const GridSpec& grid, const CutoffSpec& c) {
    if (!(c.inner_radius > 0.0) || !(c.outer_radius > c.inner_radius))
        throw PreconditionError("cutoff needs 0 < inner_radius < outer_radius");
    return LatticeSymbol::from_function(grid, [c](const Point& xi) { return cutoff_profile(c, norm_of(xi)); });
}

/// (phi q)(D) v for a term of any admissible order.
inline Field cutoff_multiplier(const HomogeneousTerm& q, const CutoffSpec& cutoff, const Field& v) {
    return apply(cutoff_symbol(v.grid(), cutoff) * lattice(q, v.grid()), v);
}

/// H_{phi,q} v = (phi q)(D) v for q homogeneous of order in (-n/2, 0).
inline Field smoothing_operator(const HomogeneousTerm& q, const CutoffSpec& cutoff, const Field& v) {
    const double n = double(v.grid().dimension());
    if (!(q.order > -n / 2.0 && q.order < 0.0))
        throw PreconditionError("smoothing operator needs order in (-n/2, 0), got " + std::to_string(q.order));
    return cutoff_multiplier(q, cutoff, v);
}

}  // namespace polydecay
