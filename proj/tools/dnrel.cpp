// Batch front end: dnrel --spec FILE [--out DIR] [--seed N] [--threads N] [--tol X]

#include "dnrel/cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv)
{
    CLI::App app{"Dirichlet-to-Neumann maps of grid Schrodinger operators as linear relations"};
    std::string spec_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> tol;
    app.add_option("--spec", spec_path, "run specification file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides 'out')");
    app.add_option("--seed", seed, "random seed (overrides 'seed')");
    app.add_option("--threads", threads, "worker threads (default: $DNREL_THREADS or all cores)");
    app.add_option("--tol", tol, "rank-decision tolerance (overrides 'tol')")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(spec_path, std::ios::binary);
    if (!in) {
        std::cerr << "dnrel: cannot read " << spec_path << "\n";
        return 2;
    }
    std::stringstream text;
    text << in.rdbuf();

    dnrel::cli::RunSpec spec;
    try {
        spec = dnrel::cli::parse_runspec(text.str());
    } catch (const dnrel::cli::RunSpecError& e) {
        std::cerr << spec_path << ": " << e.what() << "\n";
        return 2;
    }
    if (!out_dir.empty()) spec.out = out_dir;
    if (seed) spec.seed = *seed;
    if (threads) spec.threads = *threads;
    if (tol) spec.tol = *tol;

    try {
        const auto outcome = dnrel::cli::run_command(spec);
        for (const auto& f : outcome.files) std::cout << (std::filesystem::path(spec.out) / f).string() << "\n";
        std::cout << dnrel::cli::to_string(spec.command) << ": " << (outcome.exit_code == 0 ? "all checks passed" : "CHECKS FAILED")
                  << "\n";
        return outcome.exit_code;
    } catch (const dnrel::cli::OutputError& e) {
        std::cerr << "dnrel: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "dnrel: " << e.what() << "\n";
        return 1;
    }
}
