#include <chrono>
#include <iostream>

#include "commands.hpp"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
    using namespace tequiv;

    CLI::App app{"tequiv: T-equivalence toolkit for quotient singularities and (Z/2)^r covers"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", "tequiv 0.1.0");

    cli::Globals g;
    app.add_flag("--json", g.json, "Print a JSON report instead of text");
    app.add_option("--seed", g.seed, "Seed for sampled checks")->capture_default_str();
    app.add_option("--rank-cap", g.rank_cap, "Largest rank enumerated exhaustively")->capture_default_str();
    app.add_option("--q-cap", g.q_cap, "Search cap for the ample-extension multiplier")->capture_default_str();
    app.add_option("--m-cap", g.m_cap, "Cap for the construction multiplier")->capture_default_str();
    app.add_flag("--parallel", g.parallel, "Split exhaustive checks over hardware threads");

    cli::Action action;
    cli::add_sing(app, g, action);
    cli::add_lens(app, g, action);
    cli::add_obstruct(app, g, action);
    cli::add_cover(app, g, action);
    cli::add_actions(app, g, action);
    cli::add_construct(app, g, action);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    std::vector<std::string> command(argv, argv + argc);
    command[0] = "tequiv";
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto out = action();
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (g.json) {
            std::string hashed;
            for (const auto& a : command) hashed += a + '\0';
            hashed += out.input_bytes;
            std::cout << io::make_report(command, io::fnv1a_hex(hashed), out.payload, ms).dump(2) << '\n';
        } else {
            std::cout << out.text;
        }
        return out.exit_code;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RankCapExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailed;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << '\n';
        return kExitUsage;
    }
}
