// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "polydecay/besselwave.hpp"
#include "polydecay/commutators.hpp"
#include "polydecay/decayometer.hpp"
#include "polydecay/solver.hpp"
#include "polydecay/symbols.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace polydecay;

namespace {

int failures = 0;

void report(int id, const char* title, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    while (detail.size() >= 2 && detail.compare(detail.size() - 2, 2, "; ") == 0) detail.resize(detail.size() - 2);
    if (!ok) ++failures;
    std::printf("%s  [%2d] %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// residual bound on the coarse grid plus at least 3x improvement on the fine one
bool exact_case(const ExactSolutionCase& c, std::string& d) {
    double coarse = verify_exact(c, GridSpec(1, 100.0, 1 << 14));
    double fine = verify_exact(c, GridSpec(1, 200.0, 1 << 15));
    d += c.label + fmt(" %.3g -> %.3g (x%.1f); ", coarse, fine, coarse / fine);
    return coarse <= 5e-3 && coarse / fine >= 3.0;
}

Field gaussian(const GridSpec& g, double amplitude, double width) {
    return sample([=](double x) { return amplitude * std::exp(-x * x / (2 * width * width)); }, g);
}

bool rejects_with(const std::function<void()>& f, const std::string& needle) {
    try {
        f();
    } catch (const PreconditionError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

int main() {
    report(1, "Benjamin-Ono exact profile", [](std::string& d) { return exact_case(benjamin_ono_case(), d); });

    report(2, "cubic exact profile", [](std::string& d) { return exact_case(cubic_case(), d); });

    report(3, "generated examples", [](std::string& d) {
        bool ok = exact_case(generate_example(2), d) && exact_case(generate_example(4), d);
        auto k3 = generate_example(3);
        const auto& t = k3.symbol.terms();
        bool coeffs = t.size() == 2 && k3.symbol.p0() == complex(3.0) && t[0].order == 1.0 &&
                      t[0].c_plus == complex(3.0) && t[0].c_minus == complex(3.0) && t[1].order == 2.0 &&
                      t[1].c_plus == complex(1.0) && t[1].c_minus == complex(1.0) &&
                      k3.nonlinearity.leading() == std::pair<int, complex>{3, 8.0};
        d += coeffs ? "k=3 symbol xi^2 + 3|xi| + 3, F = 8u^3" : "k=3 coefficients differ";
        return ok && coeffs;
    });

    report(4, "half-integer Bessel functions", [](std::string& d) {
        double rec = 0, closed = 0, quad = 0;
        for (int i = 0; i < 200; ++i) {
            double x = 0.1 + (20.0 - 0.1) * i / 199.0;
            for (int num = 1; num <= 7; num += 2) {
                double lhs = bessel_k_half(HalfIntegerOrder(num + 2), x);
                double rhs = (num / x) * bessel_k_half(HalfIntegerOrder(num), x) + bessel_k_half(HalfIntegerOrder(num - 2), x);
                rec = std::max(rec, std::abs(lhs - rhs) / std::abs(rhs));
            }
            double k12 = bessel_k_half(HalfIntegerOrder(1), x);
            double k32 = (1.0 / x + 1.0) * k12, k52 = (3.0 / (x * x) + 3.0 / x + 1.0) * k12;
            closed = std::max({closed, std::abs(bessel_k_half(HalfIntegerOrder(3), x) - k32) / k32,
                               std::abs(bessel_k_half(HalfIntegerOrder(5), x) - k52) / k52});
            quad = std::max(quad, std::abs(bessel_k_quadrature(0.5, x) - k12) / k12);
        }
        d = fmt("recurrence %.2g, closed forms %.2g, quadrature %.2g", rec, closed, quad);
        return rec <= 1e-12 && closed <= 1e-12 && quad <= 1e-10;
    });

    report(5, "power-law transform", [](std::string& d) {
        GridSpec g(1, 200.0, 1 << 15);
        Field v = forward_transform(sample([](double x) { return 1.0 / (1.0 + x * x); }, g));
        double worst = 0;
        for (std::size_t i = 0; i < g.points(); ++i) {
            double xi = g.frequency(i);
            if (xi == 0.0 || std::abs(xi) > 5.0) continue;
            double ref = ft_power_law(1, xi);
            worst = std::max(worst, std::abs(v[i] - ref) / ref);
        }
        d = fmt("max relative error %.3g on 0 < |xi| <= 5", worst);
        return worst <= 1e-3;
    });

    report(6, "Petviashvili solver", [](std::string& d) {
        GridSpec g(1, 100.0, 1 << 14);
        auto c = benjamin_ono_case();
        auto r = petviashvili_solve(c.symbol, c.nonlinearity, SolveConfig(gaussian(g, 1.0, 2.0)));
        Field u = center_profile(r.profile);
        double num = 0;
        for (std::size_t i = 0; i < g.points(); ++i) num = std::max(num, std::abs(u[i] - c.solution(g.node(i))));
        double err = num / 2.0;
        double dm = r.stabilizing_factor ? std::abs(*r.stabilizing_factor - 1.0) : INFINITY;
        d = fmt("%.0f iterations, sup relative error %.3g, |M - 1| = %.2g", r.iterations_used, err, dm);
        return r.converged && r.iterations_used <= 200 && err <= 1e-2 && dm <= 1e-6;
    });

    report(7, "tail exponents", [](std::string& d) {
        GridSpec g(1, 100.0, 1 << 14);
        double bo = fit_tail_exponent(sample(benjamin_ono_case().solution, g), {10, 40}).exponent;
        double cu = fit_tail_exponent(sample(cubic_case().solution, g), {10, 40}).exponent;
        GridSpec wide(1, 400.0, 1 << 15);
        PolyhomogeneousSymbol p(1, 1.0, {HomogeneousTerm::abs_power(1.5)});
        auto r = petviashvili_solve(p, Nonlinearity::monomial(2, 1.0), SolveConfig(gaussian(wide, 1.0, 2.0)));
        double fr = fit_tail_exponent(center_profile(r.profile), {40, 160}).exponent;
        d = fmt("Benjamin-Ono %.4f, cubic %.4f, ", bo, cu) + fmt("|D|^{3/2} solved %.4f", fr);
        return std::abs(bo - 2) <= 0.05 && std::abs(cu - 2) <= 0.05 && r.converged && std::abs(fr - 2.5) <= 0.15;
    });

    report(8, "weighted-norm threshold", [](std::string& d) {
        auto scan = weighted_norm_scan(benjamin_ono_case().solution, {1.25, 2.0}, {50, 100, 200, 400});
        double lo = scan.growth_slopes[0].value_or(NAN), hi = scan.growth_slopes[1].value_or(NAN);
        d = fmt("slope %.4f at t = 1.25, %.4f at t = 2", lo, hi);
        return lo <= 0.05 && std::abs(hi - 0.5) <= 0.1;
    });

    report(9, "derivative norm verdicts", [](std::string& d) {
        bool ok = true;
        for (const auto& c : catalog()) {
            auto rep = theorem_report(c.symbol, c.solution);
            double worst = -INFINITY;
            for (const auto& v : rep.verdicts)
                if (v.slope) worst = std::max(worst, *v.slope);
            d += c.label + fmt(" %.0f pairs, max slope %.4f; ", double(rep.verdicts.size()), worst);
            ok = ok && rep.all_bounded && rep.verdicts.size() == 6;
        }
        return ok;
    });

    report(10, "commutator identities", [](std::string& d) {
        GridSpec g(1, 400.0, 1 << 14);
        Field v = gaussian(g, 1.0, 1.0);
        double p33 = 0, p32 = 0, poly = 0;
        for (int rho : {1, 2}) {
            p33 = std::max(p33, prop33_check(HomogeneousTerm::abs_power(1.5), rho, v).relative_residual);
            poly = std::max(poly, prop33_check(HomogeneousTerm::monomial(2), rho, v).relative_residual);
        }
        for (auto [a, b] : {std::pair{1, 1}, {2, 1}, {2, 2}}) {
            for (double m : {1.0, 1.5})
                p32 = std::max(p32, prop32_check_1d(HomogeneousTerm::abs_power(m), a, b, v).relative_residual);
            poly = std::max(poly, prop32_check_1d(HomogeneousTerm::monomial(2), a, b, v).relative_residual);
        }
        d = fmt("weight identity %.2g, expansion %.2g, polynomial %.2g", p33, p32, poly);
        return p33 <= 1e-6 && p32 <= 1e-6 && poly <= 1e-10;
    });

    report(11, "boundedness probes", [](std::string& d) {
        auto a = lemma34_probe(HomogeneousTerm::abs_power(-0.25));
        auto b = lemma35_probe(HomogeneousTerm::abs_power(1.0), 0.5, 0.0, CommutatorMode::sobolev);
        auto c = lemma35_probe(HomogeneousTerm::abs_power(0.3), 0.5, 0.0, CommutatorMode::weighted_l1);
        GridSpec g(1, 100.0, 2048);
        auto fam = dilated_gaussians(g, {1, 2});
        bool rejected =
            rejects_with([&] { lemma34_probe(HomogeneousTerm::abs_power(-0.6), 0.0, fam); }, "-n/2 < mu < 0") &&
            rejects_with([&] { lemma35_probe(HomogeneousTerm::abs_power(0.3), 0.5, 0.0, CommutatorMode::sobolev, fam); },
                         "mu - r > 0") &&
            rejects_with(
                [&] { lemma35_probe(HomogeneousTerm::abs_power(-0.2), 0.5, 0.0, CommutatorMode::weighted_l1, fam); },
                "mu - r > -n/2");
        d = fmt("max/min %.3g, %.3g, %.3g", a.max_over_min.value_or(INFINITY), b.max_over_min.value_or(INFINITY),
                c.max_over_min.value_or(INFINITY)) +
            (rejected ? "; violations rejected" : "; a violation was not rejected");
        return a.bounded && b.bounded && c.bounded && rejected;
    });

    report(12, "ellipticity classifier", [](std::string& d) {
        using T = HomogeneousTerm;
        bool a = check_ellipticity(PolyhomogeneousSymbol(1, 1.0, {T::abs_power(1.0)})).elliptic;
        bool b = check_ellipticity(PolyhomogeneousSymbol(1, 3.0, {T::abs_power(1.0, 3.0), T::abs_power(2.0)})).elliptic;
        bool c = check_ellipticity(PolyhomogeneousSymbol(1, -1.0, {T::abs_power(2.0)})).elliptic;
        PolyhomogeneousSymbol dip(1, 0.1, {T::abs_power(1.0, -1.0), T::abs_power(1.5)});
        auto r = check_ellipticity(dip);
        d = fmt("verdicts %.0f %.0f %.0f", a, b, c) + fmt(" %.0f, dip witness xi = %.6g with |p| = %.2g", r.elliptic,
                                                          r.witness, std::abs(dip(r.witness)));
        return a && b && !c && !r.elliptic && std::abs(dip(r.witness)) < 1e-9;
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
