#pragma once

// Configuration-driven drivers behind the polydecay command-line tool.
// Every command starts from a default JSON document; a user config is merged
// over it key by key (unknown keys are rejected, arrays and the free-form
// literals below are replaced wholesale) and the merged document is embedded
// in every report.
//
// Literals:
//   complex       number or [re, im]
//   term (n = 1)  {"order", "c_plus", "c_minus"} or {"order", "coeff"} (coeff |xi|^order)
//   term (n = 2)  {"order", "radial_coeff"}
//   symbol        {"dimension", "p0", "terms": [term, ...]}
//   nonlinearity  {"<power>": complex, ...}
//   profile       {"kind": "gaussian", "amplitude", "width"}      A exp(-|x|^2 / 2w^2)
//                 {"kind": "rational", "amplitude", "inverse_width_sq"}  A / (1 + b|x|^2)
//                 {"kind": "zero"}
//   grid          {"half_length", "points"}

#include "polydecay/besselwave.hpp"
#include "polydecay/commutators.hpp"
#include "polydecay/decayometer.hpp"
#include "polydecay/error.hpp"
#include "polydecay/grid.hpp"
#include "polydecay/multiplier.hpp"
#include "polydecay/nonlinearity.hpp"
#include "polydecay/solver.hpp"
#include "polydecay/symbols.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace polydecay::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int {
    exit_pass = 0,
    exit_config = 2,
    exit_precondition = 3,
    exit_no_convergence = 4,
    exit_tolerance = 5,
};

inline constexpr int kSchemaVersion = 1;

/// A solve inside a driver failed to converge.
class NonConvergence : public Error {
public:
    using Error::Error;
};

struct Overrides {
    std::optional<double> grid_half_length;
    std::optional<long long> grid_points;
};

struct Outcome {
    int exit_code = exit_pass;
    json report;
    std::vector<std::filesystem::path> files;
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"verify-exact", "solve", "decay-report",
                                                "commutator-check", "bessel-check", "ellipticity"};
    return names;
}

// ---------------------------------------------------------------- defaults

namespace detail {

inline json abs_term(double order, double coeff = 1.0) {
    return json{{"order", order}, {"c_plus", coeff}, {"c_minus", coeff}};
}

inline json symbol_literal(double p0, std::vector<json> terms) {
    return json{{"dimension", 1}, {"p0", p0}, {"terms", std::move(terms)}};
}

inline json gaussian_profile(double amplitude, double width) {
    return json{{"kind", "gaussian"}, {"amplitude", amplitude}, {"width", width}};
}

}  // namespace detail

inline json default_config(const std::string& command) {
    using detail::abs_term;
    json grid100{{"half_length", 100.0}, {"points", 16384}};
    if (command == "verify-exact")
        return json{{"schema_version", kSchemaVersion},
                    {"grid", grid100},
                    {"cases", {"benjamin-ono", "cubic"}},
                    {"benjamin_ono_speed", 1.0},
                    {"tolerance", 5e-3}};
    if (command == "solve")
        return json{{"schema_version", kSchemaVersion},
                    {"grid", grid100},
                    {"symbol", detail::symbol_literal(1.0, {abs_term(1.0)})},
                    {"nonlinearity", {{"2", 1.0}}},
                    {"method", "petviashvili"},
                    {"initial_guess", detail::gaussian_profile(1.0, 2.0)},
                    {"forcing", nullptr},
                    {"max_iterations", 500},
                    {"residual_tolerance", 1e-10},
                    {"damping", 1.0},
                    {"petviashvili_exponent", nullptr},
                    {"center", true},
                    {"tail_window", {10.0, 40.0}}};
    if (command == "decay-report")
        return json{{"schema_version", kSchemaVersion},
                    {"case", "benjamin-ono"},
                    {"benjamin_ono_speed", 1.0},
                    {"symbol", nullptr},
                    {"nonlinearity", nullptr},
                    {"solver",
                     {{"method", "petviashvili"},
                      {"initial_guess", detail::gaussian_profile(1.0, 2.0)},
                      {"max_iterations", 500},
                      {"residual_tolerance", 1e-10},
                      {"damping", 1.0},
                      {"petviashvili_exponent", nullptr}}},
                    {"epsilon", 0.25},
                    {"s", 0.0},
                    {"max_order", 2},
                    {"lengths", {50.0, 100.0, 200.0, 400.0}},
                    {"spacing", 0.05},
                    {"tail_window", {10.0, 40.0}},
                    {"tail_tolerance", 0.05}};
    if (command == "commutator-check") {
        json prop33 = json::array();
        for (double m : {1.5, 2.0})
            for (int rho : {1, 2}) prop33.push_back({{"term", abs_term(m)}, {"rho", rho}});
        json prop32 = json::array();
        for (double m : {1.0, 1.5, 2.0})
            for (auto [a, b] : {std::pair{1, 1}, {2, 1}, {2, 2}})
                prop32.push_back({{"term", abs_term(m)}, {"alpha", a}, {"beta", b}});
        return json{{"schema_version", kSchemaVersion},
                    {"grid", {{"half_length", 400.0}, {"points", 16384}}},
                    {"gaussian_width", 1.0},
                    {"tolerance", 1e-6},
                    {"polynomial_tolerance", 1e-10},
                    {"prop33", prop33},
                    {"prop32", prop32},
                    {"probes",
                     {{"enabled", true},
                      {"grid", {{"half_length", 4096.0}, {"points", 65536}}},
                      {"dilations", {1, 2, 4, 8, 16, 32, 64}},
                      {"lemma34", {{{"term", abs_term(-0.25)}, {"s", 0.0}}}},
                      {"lemma35",
                       {{{"term", abs_term(1.0)}, {"r", 0.5}, {"s", 0.0}, {"mode", "sobolev"}},
                        {{"term", abs_term(0.3)}, {"r", 0.5}, {"s", 0.0}, {"mode", "weighted_l1"}}}}}}};
    }
    if (command == "bessel-check")
        return json{{"schema_version", kSchemaVersion},
                    {"x_min", 0.1},
                    {"x_max", 20.0},
                    {"samples", 200},
                    {"max_numerator", 9},
                    {"tolerance", 1e-12},
                    {"quadrature_tolerance", 1e-10},
                    {"transform",
                     {{"grid", {{"half_length", 200.0}, {"points", 32768}}}, {"xi_max", 5.0}, {"tolerance", 1e-3}}}};
    if (command == "ellipticity") {
        auto entry = [](const char* label, json symbol, json expected) {
            return json{{"label", label}, {"symbol", std::move(symbol)}, {"expected", std::move(expected)}};
        };
        json suite = json::array();
        suite.push_back(entry("|xi|+1", detail::symbol_literal(1.0, {abs_term(1.0)}), true));
        suite.push_back(entry("xi^2+3|xi|+3", detail::symbol_literal(3.0, {abs_term(1.0, 3.0), abs_term(2.0)}), true));
        suite.push_back(entry("xi^2-1", detail::symbol_literal(-1.0, {abs_term(2.0)}), false));
        suite.push_back(entry("|xi|^{3/2}-|xi|+0.1",
                              detail::symbol_literal(0.1, {abs_term(1.0, -1.0), abs_term(1.5)}), false));
        return json{{"schema_version", kSchemaVersion},
                    {"tolerance", 1e-9},
                    {"samples_per_octave", 64},
                    {"symbols", suite}};
    }
    throw ConfigError("unknown command '" + command + "'");
}

// ------------------------------------------------------------------ parsing

namespace detail {

inline bool free_form(const std::string& key) {
    static const std::set<std::string> keys{"symbol", "nonlinearity", "initial_guess", "forcing", "term"};
    return keys.count(key) > 0;
}

inline void merge_into(json& base, const json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError("'" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
    for (const auto& [key, value] : user.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) throw ConfigError("unknown key '" + where + "'");
        json& slot = base[key];
        if (slot.is_object() && value.is_object() && !free_form(key)) merge_into(slot, value, where);
        else slot = value;
    }
}

inline void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& what) {
    if (!obj.is_object()) throw ConfigError(what + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError("unknown key '" + key + "' in " + what);
}

inline const json& field(const json& obj, const char* key, const std::string& what) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(what + " is missing '" + key + "'");
    return obj.at(key);
}

inline double number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + " must be a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
    return v;
}

inline double positive(const json& j, const std::string& what) {
    double v = number(j, what);
    if (!(v > 0.0)) throw ConfigError(what + " must be positive");
    return v;
}

inline long long integer(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
    return j.get<long long>();
}

inline bool boolean(const json& j, const std::string& what) {
    if (!j.is_boolean()) throw ConfigError(what + " must be true or false");
    return j.get<bool>();
}

inline std::string text(const json& j, const std::string& what) {
    if (!j.is_string()) throw ConfigError(what + " must be a string");
    return j.get<std::string>();
}

inline complex complex_value(const json& j, const std::string& what) {
    if (j.is_number()) return number(j, what);
    if (j.is_array() && j.size() == 2) return {number(j[0], what + "[0]"), number(j[1], what + "[1]")};
    throw ConfigError(what + " must be a number or [re, im]");
}

inline json to_json(complex z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

// Non-finite numbers have no JSON encoding; they are written as null.
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline GridSpec grid(const json& j, int dimension, const std::string& what = "grid") {
    only_keys(j, {"half_length", "points"}, what);
    double L = positive(field(j, "half_length", what), what + ".half_length");
    long long n = integer(field(j, "points", what), what + ".points");
    if (n < 2 || n > (1LL << 26)) throw ConfigError(what + ".points out of range");
    try {
        return GridSpec(dimension, L, std::size_t(n));
    } catch (const PreconditionError& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

inline HomogeneousTerm term(const json& j, int dimension, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + " must be an object");
    double order = number(field(j, "order", what), what + ".order");
    if (dimension == 2) {
        only_keys(j, {"order", "radial_coeff"}, what);
        return HomogeneousTerm::radial(order, complex_value(field(j, "radial_coeff", what), what + ".radial_coeff"));
    }
    if (j.contains("coeff")) {
        only_keys(j, {"order", "coeff"}, what);
        return HomogeneousTerm::abs_power(order, complex_value(j.at("coeff"), what + ".coeff"));
    }
    only_keys(j, {"order", "c_plus", "c_minus"}, what);
    return HomogeneousTerm::one_d(order, complex_value(field(j, "c_plus", what), what + ".c_plus"),
                                  complex_value(field(j, "c_minus", what), what + ".c_minus"));
}

inline PolyhomogeneousSymbol symbol(const json& j, const std::string& what = "symbol") {
    only_keys(j, {"dimension", "p0", "terms"}, what);
    long long n = j.contains("dimension") ? integer(j.at("dimension"), what + ".dimension") : 1;
    if (n != 1 && n != 2) throw ConfigError(what + ".dimension must be 1 or 2");
    const json& list = field(j, "terms", what);
    if (!list.is_array()) throw ConfigError(what + ".terms must be an array");
    std::vector<HomogeneousTerm> terms;
    for (std::size_t i = 0; i < list.size(); ++i)
        terms.push_back(term(list[i], int(n), what + ".terms[" + std::to_string(i) + "]"));
    complex p0 = j.contains("p0") ? complex_value(j.at("p0"), what + ".p0") : complex{};
    try {
        return PolyhomogeneousSymbol(int(n), p0, std::move(terms));
    } catch (const PreconditionError& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

inline Nonlinearity nonlinearity(const json& j, const std::string& what = "nonlinearity") {
    if (!j.is_object() || j.empty()) throw ConfigError(what + " must be a non-empty object {\"<power>\": coeff}");
    std::map<int, complex> coeffs;
    for (const auto& [key, value] : j.items()) {
        int power = 0;
        try {
            std::size_t used = 0;
            power = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ConfigError(what + ": key '" + key + "' is not an integer power");
        }
        coeffs[power] = complex_value(value, what + "." + key);
    }
    try {
        return Nonlinearity(std::move(coeffs));
    } catch (const PreconditionError& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

using Profile = std::function<double(const Point&)>;

inline Profile profile(const json& j, const std::string& what) {
    std::string kind = text(field(j, "kind", what), what + ".kind");
    if (kind == "zero") {
        only_keys(j, {"kind"}, what);
        return [](const Point&) { return 0.0; };
    }
    if (kind == "gaussian") {
        only_keys(j, {"kind", "amplitude", "width"}, what);
        double a = number(field(j, "amplitude", what), what + ".amplitude");
        double w = positive(field(j, "width", what), what + ".width");
        return [a, w](const Point& x) { return a * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]) / (w * w)); };
    }
    if (kind == "rational") {
        only_keys(j, {"kind", "amplitude", "inverse_width_sq"}, what);
        double a = number(field(j, "amplitude", what), what + ".amplitude");
        double b = positive(field(j, "inverse_width_sq", what), what + ".inverse_width_sq");
        return [a, b](const Point& x) { return a / (1.0 + b * (x[0] * x[0] + x[1] * x[1])); };
    }
    throw ConfigError(what + ".kind must be gaussian, rational or zero");
}

inline TailWindow window(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(what + " must be [x_min, x_max]");
    TailWindow w{number(j[0], what + "[0]"), number(j[1], what + "[1]")};
    try {
        polydecay::detail::validate_window(w);
    } catch (const PreconditionError& e) {
        throw ConfigError(what + ": " + e.what());
    }
    return w;
}

inline std::vector<double> numbers(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

inline ExactSolutionCase catalog_case(const std::string& label, double speed) {
    if (label == "benjamin-ono") return benjamin_ono_case(speed);
    if (label == "cubic") return cubic_case();
    const std::string prefix = "generated-k";
    if (label.rfind(prefix, 0) == 0) {
        std::string digits = label.substr(prefix.size());
        if (!digits.empty() && digits.size() <= 2 && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            int k = std::stoi(digits);
            if (k >= 2) return generate_example(k);
        }
    }
    throw ConfigError("unknown case label '" + label + "' (known: benjamin-ono, cubic, generated-k<k> with k >= 2)");
}

inline ExactSolutionCase custom_case(const json& j, const std::string& what) {
    only_keys(j, {"label", "symbol", "nonlinearity", "solution"}, what);
    auto sym = symbol(field(j, "symbol", what), what + ".symbol");
    if (sym.dimension() != 1) throw ConfigError(what + ": exact cases are one-dimensional");
    Profile u = profile(field(j, "solution", what), what + ".solution");
    return {text(field(j, "label", what), what + ".label"),
            sym,
            nonlinearity(field(j, "nonlinearity", what), what + ".nonlinearity"),
            {},
            [u](double x) { return u(Point{x, 0.0}); },
            2.0};
}

inline SolveMethod method(const json& j, const std::string& what) {
    std::string m = text(j, what);
    if (m == "petviashvili") return SolveMethod::petviashvili;
    if (m == "fixed_point") return SolveMethod::fixed_point;
    throw ConfigError(what + " must be petviashvili or fixed_point");
}

inline SolveConfig solve_config(const json& j, const Field& initial_guess) {
    SolveConfig cfg(initial_guess);
    cfg.method = method(j.at("method"), "method");
    long long iters = integer(j.at("max_iterations"), "max_iterations");
    if (iters < 1) throw ConfigError("max_iterations must be positive");
    cfg.max_iterations = int(std::min<long long>(iters, 1000000));
    cfg.residual_tolerance = positive(j.at("residual_tolerance"), "residual_tolerance");
    cfg.damping = number(j.at("damping"), "damping");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
    if (!j.at("petviashvili_exponent").is_null())
        cfg.petviashvili_exponent = number(j.at("petviashvili_exponent"), "petviashvili_exponent");
    return cfg;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                        const std::string& content) {
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    return path;
}

inline std::string profile_csv(const Field& u) {
    std::ostringstream os;
    const GridSpec& g = u.grid();
    os << (g.dimension() == 1 ? "x,re_u,im_u\n" : "x,y,re_u,im_u\n");
    for (std::size_t i = 0; i < u.size(); ++i) {
        Point x = g.point(i);
        os << format_double(x[0]) << ',';
        if (g.dimension() == 2) os << format_double(x[1]) << ',';
        os << format_double(u[i].real()) << ',' << format_double(u[i].imag()) << '\n';
    }
    return os.str();
}

inline json term_json(const HomogeneousTerm& t) {
    if (t.dimension == 2) return json{{"order", t.order}, {"radial_coeff", to_json(t.c_plus)}};
    return json{{"order", t.order}, {"c_plus", to_json(t.c_plus)}, {"c_minus", to_json(t.c_minus)}};
}

inline json fit_json(const DecayFit& f) {
    return json{{"exponent", f.exponent},
                {"log_amplitude", f.log_amplitude},
                {"r_squared", f.r_squared},
                {"window", {f.window.x_min, f.window.x_max}},
                {"samples", f.samples}};
}

inline json probe_json(const ProbeReport& p) {
    json ratios = json::array();
    for (const auto& r : p.ratios) ratios.push_back(r ? json(*r) : json(nullptr));
    return json{{"ratios", ratios},
                {"max_over_min", p.max_over_min ? finite_or_null(*p.max_over_min) : json(nullptr)},
                {"monotone_growth", p.monotone_growth},
                {"bounded", p.bounded}};
}

}  // namespace detail

/// Default config merged with the user document and the command-line
/// overrides. Throws ConfigError on any schema violation.
inline json resolve_config(const std::string& command, const std::optional<json>& user, const Overrides& ov = {}) {
    json cfg = default_config(command);
    if (user) detail::merge_into(cfg, *user, "");
    if (!cfg.at("schema_version").is_number_integer() || cfg.at("schema_version").get<int>() != kSchemaVersion)
        throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
    if (ov.grid_half_length || ov.grid_points) {
        json* grid = nullptr;
        if (cfg.contains("grid")) grid = &cfg["grid"];
        else if (command == "bessel-check") grid = &cfg["transform"]["grid"];
        else throw ConfigError("command '" + command + "' has no grid; --grid-L/--grid-N do not apply");
        if (ov.grid_half_length) (*grid)["half_length"] = *ov.grid_half_length;
        if (ov.grid_points) (*grid)["points"] = *ov.grid_points;
    }
    return cfg;
}

inline json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
}

// ----------------------------------------------------------------- commands

inline Outcome cmd_verify_exact(const json& cfg, const std::filesystem::path&) {
    const GridSpec g = detail::grid(cfg.at("grid"), 1);
    const double speed = detail::positive(cfg.at("benjamin_ono_speed"), "benjamin_ono_speed");
    const double tol = detail::positive(cfg.at("tolerance"), "tolerance");
    const json& cases = cfg.at("cases");
    if (!cases.is_array() || cases.empty()) throw ConfigError("cases must be a non-empty array");
    std::vector<ExactSolutionCase> resolved;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string what = "cases[" + std::to_string(i) + "]";
        resolved.push_back(cases[i].is_string() ? detail::catalog_case(cases[i].get<std::string>(), speed)
                                                : detail::custom_case(cases[i], what));
    }
    json out = json::array();
    bool all = true;
    for (const auto& c : resolved) {
        double r = verify_exact(c, g);
        bool ok = r <= tol;
        all = all && ok;
        out.push_back({{"label", c.label}, {"residual", r}, {"tolerance", tol}, {"pass", ok}});
    }
    return {all ? exit_pass : exit_tolerance, json{{"cases", out}, {"pass", all}}, {}};
}

inline Outcome cmd_solve(const json& cfg, const std::filesystem::path& dir) {
    const auto p = detail::symbol(cfg.at("symbol"));
    const auto F = detail::nonlinearity(cfg.at("nonlinearity"));
    const GridSpec g = detail::grid(cfg.at("grid"), p.dimension());
    Field init = sample(detail::profile(cfg.at("initial_guess"), "initial_guess"), g);
    SolveConfig sc = detail::solve_config(cfg, init);
    std::optional<Field> forcing;
    if (!cfg.at("forcing").is_null()) forcing = sample(detail::profile(cfg.at("forcing"), "forcing"), g);
    const bool center = detail::boolean(cfg.at("center"), "center");
    const TailWindow tail_window = detail::window(cfg.at("tail_window"), "tail_window");

    SolveResult res = solve(p, F, forcing, sc);
    Field profile = center ? center_profile(res.profile) : res.profile;

    json tail = nullptr;
    std::string tail_note;
    try {
        tail = fit_tail_exponent(profile, tail_window).exponent;
    } catch (const Error& e) {
        tail_note = e.what();
    }

    std::ostringstream history;
    history << "iteration,residual\n";
    for (std::size_t i = 0; i < res.residual_history.size(); ++i)
        history << (i + 1) << ',' << detail::format_double(res.residual_history[i]) << '\n';

    json summary{{"converged", res.converged},
                 {"iterations", res.iterations_used},
                 {"final_residual", res.residual_history.empty() ? json(nullptr)
                                                                  : detail::finite_or_null(res.residual_history.back())},
                 {"tail_exponent", tail},
                 {"status", to_string(res.status)}};
    if (!tail_note.empty()) summary["tail_note"] = tail_note;
    if (!res.diagnostic.empty()) summary["diagnostic"] = res.diagnostic;
    if (res.stabilizing_factor) summary["stabilizing_factor"] = detail::to_json(*res.stabilizing_factor);
    if (auto rates = predicted_rates(p, p.dimension())) summary["predicted_tail_exponent"] = rates->pointwise_exponent;

    Outcome o;
    o.files.push_back(detail::write_text(dir, "profile.csv", detail::profile_csv(profile)));
    o.files.push_back(detail::write_text(dir, "residuals.csv", history.str()));
    json with_config = summary;
    with_config["config"] = cfg;
    o.files.push_back(detail::write_text(dir, "summary.json", with_config.dump(2) + "\n"));
    o.exit_code = res.converged ? exit_pass : exit_no_convergence;
    o.report = summary;
    return o;
}

inline Outcome cmd_decay_report(const json& cfg, const std::filesystem::path& dir) {
    TheoremReportConfig trc;
    trc.epsilon = detail::number(cfg.at("epsilon"), "epsilon");
    if (!(trc.epsilon > 0.0 && trc.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    trc.s = detail::number(cfg.at("s"), "s");
    long long order = detail::integer(cfg.at("max_order"), "max_order");
    if (order < 0 || order > 2) throw ConfigError("max_order must be 0, 1 or 2");
    trc.max_order = int(order);
    trc.lengths = detail::numbers(cfg.at("lengths"), "lengths");
    trc.spacing = detail::positive(cfg.at("spacing"), "spacing");
    trc.tail_window = detail::window(cfg.at("tail_window"), "tail_window");
    const double tail_tol = detail::positive(cfg.at("tail_tolerance"), "tail_tolerance");

    std::optional<TheoremReport> rep;
    json source;
    if (!cfg.at("case").is_null()) {
        if (!cfg.at("symbol").is_null() || !cfg.at("nonlinearity").is_null())
            throw ConfigError("give either 'case' or 'symbol' + 'nonlinearity', not both");
        auto c = detail::catalog_case(detail::text(cfg.at("case"), "case"),
                                      detail::positive(cfg.at("benjamin_ono_speed"), "benjamin_ono_speed"));
        source = json{{"kind", "catalog"}, {"label", c.label}};
        rep = theorem_report(c.symbol, c.solution, trc);
    } else {
        if (cfg.at("symbol").is_null() || cfg.at("nonlinearity").is_null())
            throw ConfigError("without 'case', both 'symbol' and 'nonlinearity' are required");
        const auto p = detail::symbol(cfg.at("symbol"));
        if (p.dimension() != 1) throw ConfigError("solved decay reports are one-dimensional");
        const auto F = detail::nonlinearity(cfg.at("nonlinearity"));
        const json& sj = cfg.at("solver");
        detail::only_keys(sj, {"method", "initial_guess", "max_iterations", "residual_tolerance", "damping",
                               "petviashvili_exponent"},
                          "solver");
        auto init = detail::profile(sj.at("initial_guess"), "solver.initial_guess");
        // validate eagerly so config errors surface before any solve
        (void)detail::solve_config(sj, sample(init, GridSpec(1, 1.0, 2)));
        const double h = trc.spacing;
        FieldProvider provider = [=](double L) {
            GridSpec g = nested_grid(L, h);
            SolveResult r = solve(p, F, std::nullopt, detail::solve_config(sj, sample(init, g)));
            if (!r.converged)
                throw NonConvergence("solve on the grid for L = " + detail::format_double(L) + " did not converge: " +
                                     r.diagnostic);
            return center_profile(r.profile);
        };
        source = json{{"kind", "solved"}};
        rep = theorem_report(p, provider, trc);
    }

    const double predicted = rep->rates.pointwise_exponent;
    const bool tail_ok = std::abs(rep->tail.exponent - predicted) <= tail_tol;
    json verdicts = json::array();
    std::ostringstream csv;
    csv << "alpha,beta,L,norm\n";
    for (const auto& v : rep->verdicts) {
        verdicts.push_back({{"alpha", v.alpha[0]},
                            {"beta", v.beta[0]},
                            {"slope", v.slope ? json(*v.slope) : json(nullptr)},
                            {"verdict", v.bounded ? "bounded" : "unbounded"},
                            {"norms", v.norms}});
        for (std::size_t j = 0; j < v.norms.size(); ++j)
            csv << v.alpha[0] << ',' << v.beta[0] << ',' << detail::format_double(rep->lengths[j]) << ','
                << detail::format_double(v.norms[j]) << '\n';
    }
    json report{{"source", source},
                {"rates",
                 {{"singularity_index", rep->rates.singularity_index},
                  {"pointwise_exponent", predicted},
                  {"weight_threshold", rep->rates.weight_threshold},
                  {"critical_integer", rep->rates.critical_integer}}},
                {"weight", rep->weight},
                {"bounded_slope_threshold", kBoundedSlopeThreshold},
                {"verdicts", verdicts},
                {"all_bounded", rep->all_bounded},
                {"tail", detail::fit_json(rep->tail)},
                {"tail_tolerance", tail_tol},
                {"tail_pass", tail_ok},
                {"pass", rep->all_bounded && tail_ok}};
    Outcome o;
    o.files.push_back(detail::write_text(dir, "decay-norms.csv", csv.str()));
    o.exit_code = rep->all_bounded && tail_ok ? exit_pass : exit_tolerance;
    o.report = report;
    return o;
}

inline Outcome cmd_commutator_check(const json& cfg, const std::filesystem::path&) {
    const GridSpec g = detail::grid(cfg.at("grid"), 1);
    const double width = detail::positive(cfg.at("gaussian_width"), "gaussian_width");
    const double tol = detail::positive(cfg.at("tolerance"), "tolerance");
    const double poly_tol = detail::positive(cfg.at("polynomial_tolerance"), "polynomial_tolerance");
    const Field v = sample([width](double x) { return std::exp(-0.5 * x * x / (width * width)); }, g);
    bool all = true;

    json p33 = json::array();
    const json& list33 = cfg.at("prop33");
    if (!list33.is_array()) throw ConfigError("prop33 must be an array");
    for (std::size_t i = 0; i < list33.size(); ++i) {
        const std::string what = "prop33[" + std::to_string(i) + "]";
        detail::only_keys(list33[i], {"term", "rho"}, what);
        auto q = detail::term(detail::field(list33[i], "term", what), 1, what + ".term");
        long long rho = detail::integer(detail::field(list33[i], "rho", what), what + ".rho");
        if (rho < 0 || rho > 16) throw ConfigError(what + ".rho out of range");
        auto r = prop33_check(q, MultiIndex(int(rho)), v);
        double t = q.is_polynomial() ? poly_tol : tol;
        bool ok = r.relative_residual <= t;
        all = all && ok;
        p33.push_back({{"term", detail::term_json(q)}, {"rho", rho}, {"relative_residual", r.relative_residual},
                       {"tolerance", t}, {"pass", ok}});
    }

    json p32 = json::array();
    const json& list32 = cfg.at("prop32");
    if (!list32.is_array()) throw ConfigError("prop32 must be an array");
    for (std::size_t i = 0; i < list32.size(); ++i) {
        const std::string what = "prop32[" + std::to_string(i) + "]";
        detail::only_keys(list32[i], {"term", "alpha", "beta"}, what);
        auto p = detail::term(detail::field(list32[i], "term", what), 1, what + ".term");
        long long a = detail::integer(detail::field(list32[i], "alpha", what), what + ".alpha");
        long long b = detail::integer(detail::field(list32[i], "beta", what), what + ".beta");
        auto r = prop32_check_1d(p, int(a), int(b), v);
        double t = p.is_polynomial() ? poly_tol : tol;
        bool ok = r.relative_residual <= t;
        all = all && ok;
        p32.push_back({{"term", detail::term_json(p)}, {"alpha", a}, {"beta", b},
                       {"relative_residual", r.relative_residual}, {"tolerance", t}, {"pass", ok}});
    }

    json probes{{"enabled", false}};
    const json& pj = cfg.at("probes");
    detail::only_keys(pj, {"enabled", "grid", "dilations", "lemma34", "lemma35"}, "probes");
    if (detail::boolean(pj.at("enabled"), "probes.enabled")) {
        const GridSpec pg = detail::grid(pj.at("grid"), 1, "probes.grid");
        const auto family = dilated_gaussians(pg, detail::numbers(pj.at("dilations"), "probes.dilations"));
        json l34 = json::array(), l35 = json::array();
        for (std::size_t i = 0; i < pj.at("lemma34").size(); ++i) {
            const json& e = pj.at("lemma34")[i];
            const std::string what = "probes.lemma34[" + std::to_string(i) + "]";
            detail::only_keys(e, {"term", "s"}, what);
            auto q = detail::term(detail::field(e, "term", what), 1, what + ".term");
            double s = detail::number(detail::field(e, "s", what), what + ".s");
            auto rep = lemma34_probe(q, s, family);
            all = all && rep.bounded;
            json row = detail::probe_json(rep);
            row["term"] = detail::term_json(q);
            row["s"] = s;
            l34.push_back(row);
        }
        for (std::size_t i = 0; i < pj.at("lemma35").size(); ++i) {
            const json& e = pj.at("lemma35")[i];
            const std::string what = "probes.lemma35[" + std::to_string(i) + "]";
            detail::only_keys(e, {"term", "r", "s", "mode"}, what);
            auto q = detail::term(detail::field(e, "term", what), 1, what + ".term");
            double r = detail::number(detail::field(e, "r", what), what + ".r");
            double s = detail::number(detail::field(e, "s", what), what + ".s");
            std::string mode = detail::text(detail::field(e, "mode", what), what + ".mode");
            if (mode != "sobolev" && mode != "weighted_l1") throw ConfigError(what + ".mode must be sobolev or weighted_l1");
            auto rep = lemma35_probe(q, r, s, mode == "sobolev" ? CommutatorMode::sobolev : CommutatorMode::weighted_l1,
                                     family);
            all = all && rep.bounded;
            json row = detail::probe_json(rep);
            row["term"] = detail::term_json(q);
            row["r"] = r;
            row["s"] = s;
            row["mode"] = mode;
            l35.push_back(row);
        }
        probes = json{{"enabled", true}, {"bound", 10.0}, {"lemma34", l34}, {"lemma35", l35}};
    }
    return {all ? exit_pass : exit_tolerance, json{{"prop33", p33}, {"prop32", p32}, {"probes", probes}, {"pass", all}}, {}};
}

inline Outcome cmd_bessel_check(const json& cfg, const std::filesystem::path& dir) {
    const double x_min = detail::positive(cfg.at("x_min"), "x_min");
    const double x_max = detail::positive(cfg.at("x_max"), "x_max");
    if (!(x_max > x_min)) throw ConfigError("x_max must exceed x_min");
    long long samples = detail::integer(cfg.at("samples"), "samples");
    if (samples < 2 || samples > 100000) throw ConfigError("samples must lie in [2, 100000]");
    long long top = detail::integer(cfg.at("max_numerator"), "max_numerator");
    if (top < 1 || top > 41 || top % 2 == 0) throw ConfigError("max_numerator must be odd and in [1, 41]");
    const double tol = detail::positive(cfg.at("tolerance"), "tolerance");
    const double qtol = detail::positive(cfg.at("quadrature_tolerance"), "quadrature_tolerance");
    const json& tj = cfg.at("transform");
    detail::only_keys(tj, {"grid", "xi_max", "tolerance"}, "transform");

    std::vector<double> xs;
    for (long long i = 0; i < samples; ++i) xs.push_back(x_min + (x_max - x_min) * double(i) / double(samples - 1));
    auto K = [](int numerator, double x) { return bessel_k_half(HalfIntegerOrder(numerator), x); };

    double recurrence = 0, symmetry = 0, eq29 = 0, eq210 = 0, quadrature = 0;
    for (double x : xs) {
        for (int num = 1; num <= int(top); num += 2) {
            double nu = 0.5 * num;
            double lhs = K(num + 2, x), rhs = (2.0 * nu / x) * K(num, x) + K(num - 2, x);
            recurrence = std::max(recurrence, std::abs(lhs - rhs) / std::abs(lhs));
            symmetry = std::max(symmetry, std::abs(K(num, x) - K(-num, x)) / K(num, x));
            double q = bessel_k_quadrature(nu, x);
            quadrature = std::max(quadrature, std::abs(K(num, x) - q) / q);
        }
        double k12 = K(1, x);
        eq29 = std::max(eq29, std::abs(K(3, x) - (1.0 / x + 1.0) * k12) / K(3, x));
        eq210 = std::max(eq210, std::abs(K(5, x) - (3.0 / (x * x) + 3.0 / x + 1.0) * k12) / K(5, x));
    }

    const GridSpec g = detail::grid(tj.at("grid"), 1, "transform.grid");
    const double xi_max = detail::positive(tj.at("xi_max"), "transform.xi_max");
    const double ttol = detail::positive(tj.at("tolerance"), "transform.tolerance");
    Field spectrum = forward_transform(sample([](double x) { return 1.0 / (1.0 + x * x); }, g));
    double rel = 0, abs_err = 0;
    std::ostringstream csv;
    csv << "xi,grid_transform,formula\n";
    for (std::size_t i = 0; i < g.points(); ++i) {
        double xi = g.frequency(i);
        if (std::abs(xi) > xi_max) continue;
        double exact = xi == 0.0 ? std::numbers::pi : ft_power_law(1, xi);
        double err = std::abs(spectrum[i] - exact);
        abs_err = std::max(abs_err, err);
        if (xi != 0.0) rel = std::max(rel, err / exact);
        csv << detail::format_double(xi) << ',' << detail::format_double(spectrum[i].real()) << ','
            << detail::format_double(exact) << '\n';
    }

    auto check = [](double value, double t) { return json{{"max_relative_error", value}, {"tolerance", t}, {"pass", value <= t}}; };
    json checks{{"recurrence", check(recurrence, tol)},
                {"symmetry", check(symmetry, tol)},
                {"closed_form_k3/2", check(eq29, tol)},
                {"closed_form_k5/2", check(eq210, tol)},
                {"quadrature", check(quadrature, qtol)},
                {"transform",
                 {{"max_relative_error", rel},
                  {"max_absolute_error_including_origin", abs_err},
                  {"tolerance", ttol},
                  {"pass", rel <= ttol}}}};
    bool all = true;
    for (const auto& [name, c] : checks.items()) all = all && c.at("pass").get<bool>();
    Outcome o;
    o.files.push_back(detail::write_text(dir, "transform.csv", csv.str()));
    o.exit_code = all ? exit_pass : exit_tolerance;
    o.report = json{{"checks", checks}, {"pass", all}};
    return o;
}

inline Outcome cmd_ellipticity(const json& cfg, const std::filesystem::path&) {
    const double tol = detail::positive(cfg.at("tolerance"), "tolerance");
    long long spo = detail::integer(cfg.at("samples_per_octave"), "samples_per_octave");
    if (spo < 1 || spo > 4096) throw ConfigError("samples_per_octave must lie in [1, 4096]");
    const json& list = cfg.at("symbols");
    if (!list.is_array()) throw ConfigError("symbols must be an array");
    json out = json::array();
    bool all = true;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string what = "symbols[" + std::to_string(i) + "]";
        detail::only_keys(list[i], {"label", "symbol", "expected"}, what);
        auto p = detail::symbol(detail::field(list[i], "symbol", what), what + ".symbol");
        const json& expected = list[i].contains("expected") ? list[i].at("expected") : json(nullptr);
        if (!expected.is_null() && !expected.is_boolean()) throw ConfigError(what + ".expected must be true, false or null");
        auto r = check_ellipticity(p, tol, int(spo));
        json row{{"label", list[i].contains("label") ? list[i].at("label") : json(what)},
                 {"elliptic", r.elliptic},
                 {"infimum", r.infimum},
                 {"witness", detail::finite_or_null(r.witness)},
                 {"witness_at_infinity", std::isinf(r.witness)},
                 {"samples_per_octave", r.samples_per_octave},
                 {"shells", {r.shell_min, r.shell_max}}};
        if (!expected.is_null()) {
            bool ok = expected.get<bool>() == r.elliptic;
            row["expected"] = expected;
            row["pass"] = ok;
            all = all && ok;
        }
        out.push_back(row);
    }
    return {all ? exit_pass : exit_tolerance, json{{"symbols", out}, {"pass", all}}, {}};
}

/// Resolves the config, runs the command, writes <out>/<command>.json and
/// maps failures onto the exit-code contract. Only a failure to write the
/// report itself escapes as an exception.
inline Outcome run(const std::string& command, const std::optional<json>& user, const Overrides& ov,
                   const std::filesystem::path& out_dir) {
    Outcome o;
    json cfg;
    auto fail = [&](int code, const std::string& kind, const std::string& message) {
        o = Outcome{};
        o.exit_code = code;
        o.report = json{{"error", kind}, {"message", message}};
    };
    try {
        cfg = resolve_config(command, user, ov);
        if (command == "verify-exact") o = cmd_verify_exact(cfg, out_dir);
        else if (command == "solve") o = cmd_solve(cfg, out_dir);
        else if (command == "decay-report") o = cmd_decay_report(cfg, out_dir);
        else if (command == "commutator-check") o = cmd_commutator_check(cfg, out_dir);
        else if (command == "bessel-check") o = cmd_bessel_check(cfg, out_dir);
        else o = cmd_ellipticity(cfg, out_dir);
    } catch (const ConfigError& e) {
        fail(exit_config, "config", e.what());
    } catch (const json::exception& e) {
        fail(exit_config, "config", e.what());
    } catch (const NonEllipticError& e) {
        fail(exit_precondition, "non-elliptic", e.what());
        o.report["witness"] = detail::finite_or_null(e.witness());
        o.report["infimum"] = e.infimum();
    } catch (const NonConvergence& e) {
        fail(exit_no_convergence, "non-convergence", e.what());
    } catch (const Error& e) {
        fail(exit_precondition, "precondition", e.what());
    } catch (const std::exception& e) {
        fail(exit_precondition, "internal", e.what());
    }
    json report{{"command", command}, {"exit_code", o.exit_code}};
    for (const auto& [k, v] : o.report.items()) report[k] = v;
    report["config"] = cfg.is_null() ? json(nullptr) : cfg;
    o.report = report;
    o.files.push_back(detail::write_text(out_dir, command + ".json", report.dump(2) + "\n"));
    return o;
}

}  // namespace polydecay::cli
