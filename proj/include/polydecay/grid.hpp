#pragma once

// Uniform periodic grids on [-L, L)^n, n in {1, 2}, and the discrete Fourier
// pair matching
//     u^(xi) = int exp(-i x xi) u(x) dx,
//     u(x)   = (2 pi)^-n int exp(i x xi) u^(xi) dxi.
// Frequency-domain fields use the centered lattice xi_k = pi k / L,
// k = -N/2 .. N/2-1 on every axis; index N/2 is xi = 0 (and x = 0 in space).

#include "polydecay/error.hpp"
#include "polydecay/fft.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace polydecay {

using complex = std::complex<double>;
using Point = std::array<double, 2>;

enum class Domain { space, frequency };

class GridSpec {
public:
    GridSpec(int dimension, double half_length, std::size_t points)
        : dimension_(dimension), half_length_(half_length), points_(points) {
        if (dimension != 1 && dimension != 2)
            throw PreconditionError("grid dimension must be 1 or 2, got " + std::to_string(dimension));
        if (!(half_length > 0.0) || !std::isfinite(half_length))
            throw PreconditionError("grid half-length must be positive and finite");
        if (points < 2 || (points & (points - 1)) != 0)
            throw PreconditionError("points per dimension must be a power of two >= 2, got " +
                                    std::to_string(points));
    }

    int dimension() const noexcept { return dimension_; }
    double half_length() const noexcept { return half_length_; }
    std::size_t points() const noexcept { return points_; }
    std::size_t size() const noexcept { return dimension_ == 1 ? points_ : points_ * points_; }

    double spacing() const noexcept { return 2.0 * half_length_ / double(points_); }
    double frequency_spacing() const noexcept { return std::numbers::pi / half_length_; }
    double nyquist() const noexcept { return std::numbers::pi * double(points_) / (2.0 * half_length_); }
    std::size_t origin_index() const noexcept { return points_ / 2; }

    /// Per-axis coordinate of node i.
    double node(std::size_t i) const noexcept { return -half_length_ + double(i) * spacing(); }
    /// Per-axis signed wavenumber of centered frequency index i.
    long wavenumber(std::size_t i) const noexcept { return long(i) - long(points_ / 2); }
    double frequency(std::size_t i) const noexcept { return double(wavenumber(i)) * frequency_spacing(); }

    /// Axis indices of flat (row-major) position.
    std::array<std::size_t, 2> axes(std::size_t flat) const noexcept {
        if (dimension_ == 1) return {flat, 0};
        return {flat / points_, flat % points_};
    }
    Point point(std::size_t flat) const noexcept {
        auto [i, j] = axes(flat);
        return {node(i), dimension_ == 2 ? node(j) : 0.0};
    }
    Point frequency_point(std::size_t flat) const noexcept {
        auto [i, j] = axes(flat);
        return {frequency(i), dimension_ == 2 ? frequency(j) : 0.0};
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int dimension_;
    double half_length_;
    std::size_t points_;
};

inline double norm_of(const Point& p) noexcept { return std::hypot(p[0], p[1]); }

class Field {
public:
    Field(GridSpec grid, Domain domain)
        : grid_(grid), values_(grid.size(), complex{}), domain_(domain) {}
    Field(GridSpec grid, std::vector<complex> values, Domain domain)
        : grid_(grid), values_(std::move(values)), domain_(domain) {
        if (values_.size() != grid_.size())
            throw PreconditionError("field value count " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(grid_.size()));
    }

    const GridSpec& grid() const noexcept { return grid_; }
    Domain domain() const noexcept { return domain_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const complex> values() const noexcept { return values_; }
    std::span<complex> values() noexcept { return values_; }
    complex operator[](std::size_t i) const noexcept { return values_[i]; }
    complex& operator[](std::size_t i) noexcept { return values_[i]; }

    Field& operator+=(const Field& o) { check(o); for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i]; return *this; }
    Field& operator-=(const Field& o) { check(o); for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i]; return *this; }
    /// Pointwise product.
    Field& operator*=(const Field& o) { check(o); for (std::size_t i = 0; i < size(); ++i) values_[i] *= o.values_[i]; return *this; }
    Field& operator*=(complex a) { for (auto& v : values_) v *= a; return *this; }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, const Field& b) { return a *= b; }
    friend Field operator*(complex s, Field a) { return a *= s; }
    friend Field operator*(Field a, complex s) { return a *= s; }

private:
    void check(const Field& o) const {
        if (!(o.grid_ == grid_) || o.domain_ != domain_)
            throw PreconditionError("field operands live on different grids or domains");
    }

    GridSpec grid_;
    std::vector<complex> values_;
    Domain domain_;
};

inline void require_space(const Field& u, const char* op) {
    if (u.domain() != Domain::space)
        throw PreconditionError(std::string(op) + " expects a space-domain field");
}

inline void require_frequency(const Field& u, const char* op) {
    if (u.domain() != Domain::frequency)
        throw PreconditionError(std::string(op) + " expects a frequency-domain field");
}

/// Samples a generator at every grid node. One-dimensional grids accept
/// callables of a double; both dimensions accept callables of a Point.
template <class Generator>
Field sample(Generator&& generator, const GridSpec& grid) {
    Field out(grid, Domain::space);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        complex value;
        if constexpr (std::is_invocable_v<Generator&, double>) {
            if (grid.dimension() != 1)
                throw PreconditionError("scalar generator used on a two-dimensional grid");
            value = complex(generator(grid.point(i)[0]));
        } else {
            value = complex(generator(grid.point(i)));
        }
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
            auto p = grid.point(i);
            throw NonFiniteSample(i, "non-finite sample at node " + std::to_string(i) + " (x = " +
                                         std::to_string(p[0]) +
                                         (grid.dimension() == 2 ? ", " + std::to_string(p[1]) : "") + ")");
        }
        out[i] = value;
    }
    return out;
}

namespace detail {

// Moves between centered order (index i <-> k = i - N/2) and FFT order
// (index k mod N) along every axis, multiplying by (-1)^k per axis.
inline void recenter(std::span<const complex> in, std::span<complex> out, const GridSpec& g, bool to_fft_order) {
    const std::size_t n = g.points();
    const std::size_t half = n / 2;
    auto sign = [&](std::size_t centered) { return (g.wavenumber(centered) & 1) ? -1.0 : 1.0; };
    if (g.dimension() == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t m = (i + half) % n;
            if (to_fft_order) out[m] = sign(i) * in[i];
            else out[i] = sign(i) * in[m];
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t mi = (i + half) % n;
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t mj = (j + half) % n;
            double s = sign(i) * sign(j);
            if (to_fft_order) out[mi * n + mj] = s * in[i * n + j];
            else out[i * n + j] = s * in[mi * n + mj];
        }
    }
}

}  // namespace detail

/// h^n times the centered DFT: approximates u^(xi_k).
inline Field forward_transform(const Field& u) {
    require_space(u, "forward_transform");
    const GridSpec& g = u.grid();
    std::vector<complex> work(u.values().begin(), u.values().end());
    detail::FftPlanCache::instance().execute(g.dimension(), int(g.points()), FFTW_FORWARD, work);
    Field out(g, Domain::frequency);
    detail::recenter(work, out.values(), g, false);
    out *= std::pow(g.spacing(), g.dimension());
    return out;
}

/// Discrete realization of (2 pi)^-n int exp(i x xi) v(xi) dxi; exact inverse
/// of forward_transform.
inline Field inverse_transform(const Field& v) {
    require_frequency(v, "inverse_transform");
    const GridSpec& g = v.grid();
    std::vector<complex> work(g.size());
    detail::recenter(v.values(), work, g, true);
    detail::FftPlanCache::instance().execute(g.dimension(), int(g.points()), FFTW_BACKWARD, work);
    Field out(g, std::move(work), Domain::space);
    out *= std::pow(1.0 / (2.0 * g.half_length()), g.dimension());
    return out;
}

/// Rectangle-rule L2 norm over the whole periodic cell.
inline double l2_norm(const Field& u) {
    require_space(u, "l2_norm");
    double acc = 0.0;
    for (auto v : u.values()) acc += std::norm(v);
    return std::sqrt(std::pow(u.grid().spacing(), u.grid().dimension()) * acc);
}

/// L2 norm restricted to nodes with |x| <= radius.
inline double l2_norm_within(const Field& u, double radius) {
    require_space(u, "l2_norm_within");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (norm_of(u.grid().point(i)) <= radius) acc += std::norm(u[i]);
    return std::sqrt(std::pow(u.grid().spacing(), u.grid().dimension()) * acc);
}

inline double l1_norm(const Field& u) {
    require_space(u, "l1_norm");
    double acc = 0.0;
    for (auto v : u.values()) acc += std::abs(v);
    return std::pow(u.grid().spacing(), u.grid().dimension()) * acc;
}

/// Circular translation by whole nodes: result(x) = u(x - shift * h).
inline Field shift(const Field& u, std::array<long, 2> nodes) {
    const GridSpec& g = u.grid();
    const long n = long(g.points());
    auto wrap = [n](long i) { return std::size_t(((i % n) + n) % n); };
    Field out(g, u.domain());
    if (g.dimension() == 1) {
        for (long i = 0; i < n; ++i) out[wrap(i + nodes[0])] = u[std::size_t(i)];
        return out;
    }
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            out[wrap(i + nodes[0]) * std::size_t(n) + wrap(j + nodes[1])] = u[std::size_t(i * n + j)];
    return out;
}

/// Field of the coordinate x_axis at every node.
inline Field coordinate(const GridSpec& g, int axis) {
    Field out(g, Domain::space);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g.point(i)[std::size_t(axis)];
    return out;
}

}  // namespace polydecay
