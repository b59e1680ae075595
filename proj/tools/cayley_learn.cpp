// cayley-learn: learn a circuit unitary from state pairs.
//
//   cayley-learn run <config.json> [--output-dir DIR] [--seed S] [--quiet]
//   cayley-learn compare <config.json> [--output-dir DIR] [--seed S] [--quiet]
//   cayley-learn gen-circuit <benchmark5|bell> [--output FILE]
//   cayley-learn verify <matrix.json> [<reference.json>]
//
// Failures print one line "error: <category>: <message>" to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cayley/harness.hpp"
#include "cayley/kernels.hpp"
#include "cayley/matrix_io.hpp"
#include "cayley/quantum.hpp"

namespace {

using namespace cayley;

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::config:
        case ErrorCategory::invalid_argument:
            return 2;
        case ErrorCategory::io:
            return 3;
        case ErrorCategory::dimension:
        case ErrorCategory::singular:
        case ErrorCategory::rank_deficient:
        case ErrorCategory::line_search:
            return 4;
    }
    return 1;
}

std::string one_line(std::string s) {
    for (char &c : s) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    return s;
}

struct RunOptions {
    std::string config;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

ExperimentConfig load_with_overrides(const RunOptions &opts) {
    ExperimentConfig cfg = load_experiment_config(opts.config);
    if (!opts.output_dir.empty()) {
        cfg.output_dir = opts.output_dir;
    }
    if (opts.seed) {
        cfg.train.seed = *opts.seed;
    }
    return cfg;
}

void print_report(const ExperimentReport &r, const std::filesystem::path &dir) {
    std::printf("method=%s epochs=%d final_loss=%.6e fidelity=%.12f unitary_error=%.6e max_unitary_error=%.6e "
                "loss_increases=%d wall_ms=%lld\n",
                r.method.c_str(), r.epochs_run, r.final_loss, r.final_fidelity, r.final_unitary_error,
                r.max_unitary_error, r.loss_increase_count, static_cast<long long>(r.wall_time_ms));
    std::printf("output: %s\n", dir.string().c_str());
}

int cmd_run(const RunOptions &opts) {
    ExperimentConfig cfg = load_with_overrides(opts);
    ExperimentRun run = run_experiment(cfg);
    if (!opts.quiet) {
        print_report(run.report, cfg.output_dir);
    }
    return 0;
}

int cmd_compare(const RunOptions &opts) {
    ExperimentConfig cfg = load_with_overrides(opts);
    ComparisonReport report = compare_methods(cfg);
    if (!opts.quiet) {
        report.write_table(std::cout);
        std::cout << "output: " << cfg.output_dir.string() << '\n';
    }
    return 0;
}

int cmd_gen_circuit(const std::string &name, const std::string &output) {
    CircuitSpec circuit;
    if (name == "benchmark5") {
        circuit = benchmark_circuit_5q();
    } else if (name == "bell") {
        circuit = bell_circuit();
    } else {
        throw Error(ErrorCategory::invalid_argument, "unknown built-in circuit '" + name + "' (benchmark5, bell)");
    }
    const std::string text = circuit_to_json(circuit).dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(output);
    if (!out || !(out << text)) {
        throw Error(ErrorCategory::io, "cannot write " + output);
    }
    return 0;
}

int cmd_verify(const std::string &matrix_file, const std::string &reference_file) {
    const CMatrix w = read_matrix_file(matrix_file);
    if (!w.is_square()) {
        throw Error(ErrorCategory::dimension, matrix_file + " is not square");
    }
    std::printf("unitary_error=%.17g\n", unitary_error(w));
    std::printf("unitary_error_spectral=%.17g\n", unitary_error_spectral(w));
    if (!reference_file.empty()) {
        const CMatrix ref = read_matrix_file(reference_file);
        std::printf("fidelity=%.17g\n", fidelity(ref, w));
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Learn the unitary of a quantum circuit with Cayley-transform descent on the unitary group"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto add_run_flags = [&](CLI::App *sub) {
        sub->add_option("config", run_opts.config, "Experiment config (JSON)")->required();
        sub->add_option("--output-dir", run_opts.output_dir, "Override the config's output_dir");
        sub->add_option("--seed", run_opts.seed, "Override train.seed");
        sub->add_flag("--quiet", run_opts.quiet, "Print nothing on success");
    };
    CLI::App *run = app.add_subcommand("run", "Train one model and write a run directory");
    add_run_flags(run);
    CLI::App *compare = app.add_subcommand("compare", "Train cayley and gram_schmidt on the same data");
    add_run_flags(compare);

    std::string circuit_name;
    std::string circuit_output;
    CLI::App *gen = app.add_subcommand("gen-circuit", "Print a built-in circuit spec");
    gen->add_option("name", circuit_name, "benchmark5 or bell")->required();
    gen->add_option("--output", circuit_output, "Write to a file instead of stdout");

    std::string matrix_file;
    std::string reference_file;
    CLI::App *verify = app.add_subcommand("verify", "Report unitarity (and fidelity against a reference)");
    verify->add_option("matrix", matrix_file, "Matrix file")->required();
    verify->add_option("reference", reference_file, "Reference matrix file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error: usage: " << one_line(e.what()) << '\n';
        return 64;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_opts);
        }
        if (compare->parsed()) {
            return cmd_compare(run_opts);
        }
        if (gen->parsed()) {
            return cmd_gen_circuit(circuit_name, circuit_output);
        }
        if (verify->parsed()) {
            return cmd_verify(matrix_file, reference_file);
        }
    } catch (const Error &e) {
        std::cerr << "error: " << category_name(e.category()) << ": " << one_line(e.what()) << '\n';
        return exit_code(e.category());
    } catch (const std::exception &e) {
        std::cerr << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 1;
}
