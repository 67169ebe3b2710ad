#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hpt/io.hpp"

namespace {

struct CliArgs {
    std::string path;
    int max_weight = 0;
    int max_iter = 0;
    std::string mode;
    std::string codifferential;
    std::string output = "text";
};

hpt::RunOptions options_from(const CliArgs& args) {
    hpt::RunOptions opts;
    opts.max_weight = args.max_weight;
    opts.max_iter = args.max_iter;
    opts.mode = args.mode;
    opts.codifferential = args.codifferential;
    if (opts.max_weight <= 0) {
        if (const char* env = std::getenv("HPT_MAX_WEIGHT")) {
            try {
                opts.max_weight = std::stoi(env);
            } catch (const std::exception&) {
                opts.max_weight = 0;
            }
        }
    }
    return opts;
}

hpt::ProblemFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hpt::SemanticError("cannot open file: " + path);
    return hpt::parse_problem(in);
}

int emit(hpt::Report report, const CliArgs& args,
         std::chrono::steady_clock::time_point start) {
    report.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    report.render(std::cout, args.output == "machine");
    return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hpt: exact homological perturbation calculus over Q"};
    app.require_subcommand(1);

    CliArgs args;
    app.add_option("--max-weight", args.max_weight,
                   "truncation weight for coalgebra modes (or HPT_MAX_WEIGHT, default 4)");
    app.add_option("--max-iter", args.max_iter, "iteration cap for perturbation series");
    app.add_option("--mode", args.mode, "ordinary | relative | linfty (overrides the file)")
        ->check(CLI::IsMember({"ordinary", "relative", "linfty"}));
    app.add_option("--codifferential", args.codifferential,
                   "which pQ² checks to run when validating: tensor | symmetric | both")
        ->check(CLI::IsMember({"tensor", "symmetric", "both"}));
    app.add_option("--output", args.output, "text | machine")
        ->check(CLI::IsMember({"text", "machine"}));

    auto* validate = app.add_subcommand("validate", "check complexes, contraction axioms and pQ²");
    validate->add_option("file", args.path, "problem file")->required();
    auto* transfer = app.add_subcommand("transfer", "run a perturbation-lemma transfer");
    transfer->add_option("file", args.path, "problem file")->required();
    auto* demo = app.add_subcommand("demo-sl2", "the built-in sl2 walkthrough");
    auto* format = app.add_subcommand("format", "reprint a problem file canonically");
    format->add_option("file", args.path, "problem file")->required();

    CLI11_PARSE(app, argc, argv);

    const auto start = std::chrono::steady_clock::now();
    try {
        if (validate->parsed()) return emit(hpt::run_validate(load(args.path), options_from(args)), args, start);
        if (transfer->parsed()) return emit(hpt::run_transfer(load(args.path), options_from(args)), args, start);
        if (demo->parsed()) return emit(hpt::run_demo_sl2(options_from(args)), args, start);
        if (format->parsed()) {
            std::cout << hpt::canonical_serialize(load(args.path));
            return 0;
        }
    } catch (const hpt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case hpt::ErrorKind::input: return 2;
            case hpt::ErrorKind::nilpotency: return 3;
            default: return 1;
        }
    }
    return 2;
}
