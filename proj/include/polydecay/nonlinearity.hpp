#pragma once

#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"

#include <complex>
#include <map>
#include <string>

namespace polydecay {

/// F(u) = sum_{j >= 2} F_j u^j.
class Nonlinearity {
public:
    Nonlinearity() = default;
    explicit Nonlinearity(std::map<int, complex> coeffs) : coeffs_(std::move(coeffs)) {
        for (const auto& [j, c] : coeffs_)
            if (j < 2) throw PreconditionError("nonlinearity must vanish to order >= 2; got power " + std::to_string(j));
    }
    static Nonlinearity monomial(int power, complex coeff) { return Nonlinearity({{power, coeff}}); }

    const std::map<int, complex>& coeffs() const noexcept { return coeffs_; }

    /// True when exactly one nonzero coefficient is present.
    bool is_monomial() const noexcept {
        int count = 0;
        for (const auto& [j, c] : coeffs_) count += c != complex{};
        return count == 1;
    }
    std::pair<int, complex> leading() const {
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            if (it->second != complex{}) return *it;
        throw PreconditionError("nonlinearity has no nonzero coefficient");
    }

    complex operator()(complex u) const {
        complex acc{};
        for (const auto& [j, c] : coeffs_) acc += c * std::pow(u, j);
        return acc;
    }

private:
    std::map<int, complex> coeffs_;
};

inline Field evaluate_nonlinearity(const Nonlinearity& F, const Field& u) {
    require_space(u, "evaluate_nonlinearity");
    Field out(u.grid(), Domain::space);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = F(u[i]);
    return out;
}

}  // namespace polydecay
