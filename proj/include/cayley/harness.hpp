#pragma once

// Experiment orchestration: config files, dataset generation, run directories
// and plot-series emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cayley/model.hpp"
#include "cayley/quantum.hpp"

namespace cayley {

struct TargetSpec {
    enum class Kind { circuit, haar };

    Kind kind = Kind::haar;
    /// kind == circuit; always held inline once loaded.
    std::optional<CircuitSpec> circuit;
    /// kind == haar
    int n_qubits = 1;
    std::uint64_t seed = 0;

    int qubits() const { return kind == Kind::circuit ? circuit->n_qubits : n_qubits; }
};

struct ExperimentConfig {
    TargetSpec target;
    int n_pairs = 1;
    /// Seed for the input states; falls back to train.seed.
    std::optional<std::uint64_t> data_seed;
    /// Use computational basis states for the first min(n_pairs, 2^n) inputs.
    bool basis_inputs = false;
    TrainConfig train;
    std::filesystem::path output_dir = "run";
    bool emit_plot_data = true;
};

void validate(const ExperimentConfig &cfg);

/// `base_dir` resolves a relative {"target": {"kind": "circuit", "file": ...}}.
ExperimentConfig experiment_from_json(const nlohmann::json &doc, const std::filesystem::path &base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path &path);
/// Self-contained echo: circuits are inlined, every default made explicit.
nlohmann::json experiment_to_json(const ExperimentConfig &cfg);

struct ExperimentReport {
    std::string method;
    double final_loss = 0.0;
    double final_fidelity = 0.0;
    double final_unitary_error = 0.0;
    double final_unitary_error_spectral = 0.0;
    double max_unitary_error = 0.0;
    int loss_increase_count = 0;
    int epochs_run = 0;
    std::int64_t wall_time_ms = 0;
    ExperimentConfig config_echo;
};

nlohmann::json report_to_json(const ExperimentReport &report);

struct ExperimentRun {
    ExperimentReport report;
    TrainResult result;
};

Dataset generate_dataset(const ExperimentConfig &cfg);

/// Generates the dataset, trains, and writes config.json, trace.csv,
/// final_matrix.json, report.json (and loss.dat, fidelity.dat,
/// unitary_error.dat when emit_plot_data) into cfg.output_dir. Output is staged
/// in a sibling directory and renamed into place, so a partial run leaves
/// nothing behind.
ExperimentRun run_experiment(const ExperimentConfig &cfg);

/// Writes loss.dat, fidelity.dat and unitary_error.dat into `out_dir`.
void emit_plot_data(const TrainTrace &trace, const std::filesystem::path &out_dir);

struct ComparisonReport {
    ExperimentReport cayley;
    ExperimentReport gram_schmidt;

    void write_table(std::ostream &out) const;
    nlohmann::json to_json() const;
};

/// Runs the cayley and gram_schmidt trainers on the same dataset and initial
/// weights. Each run gets a subdirectory of cfg.output_dir, next to
/// comparison.json and comparison.csv.
ComparisonReport compare_methods(const ExperimentConfig &cfg);

}  // namespace cayley
