#pragma once

// Single-layer complex-valued network: |out> = W |in>, trained so that W maps
// each input state onto its target while W stays unitary.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "cayley/linalg.hpp"
#include "cayley/quantum.hpp"

namespace cayley {

struct Dataset {
    int n_qubits = 1;
    std::vector<StatePair> pairs;
    /// Only used for metrics (fidelity), never by the optimizer.
    std::optional<CMatrix> target_unitary;

    std::size_t dim() const noexcept { return std::size_t{1} << n_qubits; }
};

/// Throws Error(config) on an inconsistent dataset.
void validate(const Dataset &data);

enum class TrainMethod { cayley, cayley_fixed, gram_schmidt };

std::string_view method_name(TrainMethod method) noexcept;
std::optional<TrainMethod> parse_method(std::string_view name) noexcept;

struct TrainConfig {
    TrainMethod method = TrainMethod::cayley;
    double lambda0 = 0.1;
    int epochs = 500;
    int reorth_interval = 10;
    std::uint64_t seed = 0;
    double loss_tolerance = 1e-20;
    int record_every = 1;
};

void validate(const TrainConfig &cfg);

struct TraceRow {
    int epoch = 0;
    double loss = 0.0;
    std::optional<double> fidelity;
    double unitary_error = 0.0;
    double lambda_used = 0.0;
    int n_backtracks = 0;
    /// Baseline only: the row was taken immediately before or after a
    /// reprojection (the pair shares one epoch number, "before" first).
    bool reorth_event = false;
};

struct TrainTrace {
    std::vector<TraceRow> rows;
    /// Adds the reorth_event column to the CSV.
    bool has_reorth_column = false;

    void write_csv(std::ostream &out) const;
    double max_unitary_error() const;
    /// Consecutive rows whose loss goes up.
    int loss_increase_count() const;
};

struct TrainResult {
    CMatrix w;
    TrainTrace trace;
    int epochs_run = 0;
};

CVector forward(const CMatrix &w, const CVector &psi);

/// f(W) = (1/M) sum_m ||W psi_m - phi_m||^2
double mse_loss(const CMatrix &w, const Dataset &data);

/// G = (2/M) sum_m (W psi_m - phi_m) psi_m†, so that Df(W)[Z] = Re tr(G† Z).
CMatrix euclid_gradient(const CMatrix &w, const Dataset &data);

/// Loss and gradient over a fixed dataset with the inputs and targets packed as
/// N×M matrices.
class MseObjective {
  public:
    explicit MseObjective(const Dataset &data);

    double loss(const CMatrix &w) const;
    CMatrix gradient(const CMatrix &w) const;

  private:
    CMatrix residual(const CMatrix &w) const;

    CMatrix inputs_;          // N×M, column m is psi_m
    CMatrix targets_;         // N×M, column m is phi_m
    CMatrix inputs_adjoint_;  // M×N
    double inv_m_ = 0.0;
};

TrainResult train_cayley(const Dataset &data, const TrainConfig &cfg);
TrainResult train_gram_schmidt(const Dataset &data, const TrainConfig &cfg);
/// Dispatches on cfg.method.
TrainResult train(const Dataset &data, const TrainConfig &cfg);

}  // namespace cayley
