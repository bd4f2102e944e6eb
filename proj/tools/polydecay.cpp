// Command-line entry point: thin dispatch onto polydecay::cli.

#include "polydecay/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace polydecay;
    CLI::App app{"Decay of solitary waves for nonlocal dispersive equations: verification suites and experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = ".";
    double grid_L = 0.0;
    long long grid_N = 0;
    bool print_config = false;
    app.add_option("--config", config_path, "JSON config (schema_version 1); defaults are used when omitted");
    app.add_option("--out", out_dir, "Output directory for reports and CSV data")->capture_default_str();
    auto* opt_L = app.add_option("--grid-L", grid_L, "Override grid.half_length");
    auto* opt_N = app.add_option("--grid-N", grid_N, "Override grid.points (power of two)");
    app.add_flag("--print-config", print_config, "Print the resolved config and exit");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"verify-exact", "Residuals of the exact solitary-wave cases"},
        {"solve", "Solve p(D)u = f + F(u) and write the profile"},
        {"decay-report", "Weighted-norm verdicts and tail exponent for a solution"},
        {"commutator-check", "Commutator identities and boundedness probes"},
        {"bessel-check", "Half-integer Bessel identities and the power-law transform"},
        {"ellipticity", "Global ellipticity verdicts for a list of symbols"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    cli::Overrides ov;
    if (*opt_L) ov.grid_half_length = grid_L;
    if (*opt_N) ov.grid_points = grid_N;

    try {
        std::optional<cli::json> user;
        if (!config_path.empty()) user = cli::load_config_file(config_path);
        if (print_config) {
            std::cout << cli::resolve_config(command, user, ov).dump(2) << '\n';
            return cli::exit_pass;
        }
        cli::Outcome o = cli::run(command, user, ov, out_dir);
        const auto& r = o.report;
        if (r.contains("error")) std::cerr << command << ": " << r.at("message").get<std::string>() << '\n';
        std::cout << command << ": exit " << o.exit_code << '\n';
        for (const auto& f : o.files) std::cout << "  wrote " << f.string() << '\n';
        return o.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return cli::exit_config;
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return cli::exit_precondition;
    }
}
