#include "cayley/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cayley/stiefel.hpp"

namespace cayley {

namespace {

[[noreturn]] void config_error(const std::string &what) { throw Error(ErrorCategory::config, what); }

void require_nonempty(const Dataset &data, const char *op) {
    if (data.pairs.empty()) {
        throw Error(ErrorCategory::invalid_argument, std::string(op) + ": dataset is empty");
    }
}

void require_model_dims(const CMatrix &w, const Dataset &data, const char *op) {
    if (!w.is_square() || w.rows() != data.pairs.front().input.dim()) {
        throw Error(ErrorCategory::dimension, std::string(op) + ": weight matrix does not match state dimension");
    }
}

// Running state of a training loop and the rows it records.
class TraceRecorder {
  public:
    TraceRecorder(const Dataset &data, int record_every) : data_(data), record_every_(record_every) {}

    TraceRow make_row(int epoch, const CMatrix &w, double loss, double lambda, int backtracks) const {
        TraceRow row;
        row.epoch = epoch;
        row.loss = loss;
        if (data_.target_unitary) {
            row.fidelity = fidelity(*data_.target_unitary, w);
        }
        row.unitary_error = unitary_error(w);
        row.lambda_used = lambda;
        row.n_backtracks = backtracks;
        return row;
    }

    bool due(int epoch) const { return epoch % record_every_ == 0; }

    void push(TraceRow row) { trace_.rows.push_back(std::move(row)); }

    TrainTrace take() { return std::move(trace_); }

  private:
    const Dataset &data_;
    int record_every_;
    TrainTrace trace_;
};

}  // namespace

void validate(const Dataset &data) {
    if (data.n_qubits < 1 || data.n_qubits > kMaxQubits) {
        config_error("dataset n_qubits must be in 1.." + std::to_string(kMaxQubits));
    }
    const std::size_t dim = data.dim();
    for (std::size_t m = 0; m < data.pairs.size(); ++m) {
        const auto &p = data.pairs[m];
        if (p.input.dim() != dim || p.output.dim() != dim) {
            config_error("pair " + std::to_string(m) + " does not have dimension " + std::to_string(dim));
        }
    }
    if (data.target_unitary) {
        const CMatrix &u = *data.target_unitary;
        if (!u.is_square() || u.rows() != dim) {
            config_error("target unitary does not match the state dimension");
        }
        for (std::size_t m = 0; m < data.pairs.size(); ++m) {
            const CVector diff = matvec(u, data.pairs[m].input);
            double err = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                err += std::norm(diff[i] - data.pairs[m].output[i]);
            }
            if (std::sqrt(err) > 1e-10) {
                config_error("pair " + std::to_string(m) + " is inconsistent with the target unitary");
            }
        }
    }
}

std::string_view method_name(TrainMethod method) noexcept {
    switch (method) {
        case TrainMethod::cayley:
            return "cayley";
        case TrainMethod::cayley_fixed:
            return "cayley_fixed";
        case TrainMethod::gram_schmidt:
            return "gram_schmidt";
    }
    return "?";
}

std::optional<TrainMethod> parse_method(std::string_view name) noexcept {
    for (auto m : {TrainMethod::cayley, TrainMethod::cayley_fixed, TrainMethod::gram_schmidt}) {
        if (method_name(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

void validate(const TrainConfig &cfg) {
    if (!(cfg.lambda0 > 0.0) || !std::isfinite(cfg.lambda0)) {
        config_error("lambda0 must be positive");
    }
    if (cfg.epochs < 1) {
        config_error("epochs must be at least 1");
    }
    if (cfg.reorth_interval < 1) {
        config_error("reorth_interval must be at least 1");
    }
    if (!(cfg.loss_tolerance >= 0.0)) {
        config_error("loss_tolerance must be non-negative");
    }
    if (cfg.record_every < 1) {
        config_error("record_every must be at least 1");
    }
}

void TrainTrace::write_csv(std::ostream &out) const {
    out << "epoch,loss,fidelity,unitary_error,lambda_used,n_backtracks";
    if (has_reorth_column) {
        out << ",reorth_event";
    }
    out << '\n';
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto &r : rows) {
        out << r.epoch << ',' << num(r.loss) << ',' << (r.fidelity ? num(*r.fidelity) : std::string()) << ','
            << num(r.unitary_error) << ',' << num(r.lambda_used) << ',' << r.n_backtracks;
        if (has_reorth_column) {
            out << ',' << (r.reorth_event ? 1 : 0);
        }
        out << '\n';
    }
}

double TrainTrace::max_unitary_error() const {
    double m = 0.0;
    for (const auto &r : rows) {
        m = std::max(m, r.unitary_error);
    }
    return m;
}

int TrainTrace::loss_increase_count() const {
    int count = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].loss > rows[i - 1].loss) {
            ++count;
        }
    }
    return count;
}

CVector forward(const CMatrix &w, const CVector &psi) {
    if (!w.is_square()) {
        throw Error(ErrorCategory::dimension, "forward: weight matrix is not square");
    }
    return matvec(w, psi);
}

MseObjective::MseObjective(const Dataset &data) {
    require_nonempty(data, "MseObjective");
    const std::size_t n = data.pairs.front().input.dim();
    const std::size_t m = data.pairs.size();
    inputs_ = CMatrix(n, m);
    targets_ = CMatrix(n, m);
    for (std::size_t k = 0; k < m; ++k) {
        const auto &p = data.pairs[k];
        if (p.input.dim() != n || p.output.dim() != n) {
            throw Error(ErrorCategory::dimension, "MseObjective: pairs have inconsistent dimensions");
        }
        for (std::size_t i = 0; i < n; ++i) {
            inputs_(i, k) = p.input[i];
            targets_(i, k) = p.output[i];
        }
    }
    inputs_adjoint_ = dagger(inputs_);
    inv_m_ = 1.0 / static_cast<double>(m);
}

CMatrix MseObjective::residual(const CMatrix &w) const {
    if (!w.is_square() || w.cols() != inputs_.rows()) {
        throw Error(ErrorCategory::dimension, "weight matrix does not match state dimension");
    }
    return matmul(w, inputs_) - targets_;
}

double MseObjective::loss(const CMatrix &w) const { return inv_m_ * frobenius_norm_sq(residual(w)); }

CMatrix MseObjective::gradient(const CMatrix &w) const {
    CMatrix g = matmul(residual(w), inputs_adjoint_);
    g *= 2.0 * inv_m_;
    return g;
}

double mse_loss(const CMatrix &w, const Dataset &data) {
    require_nonempty(data, "mse_loss");
    require_model_dims(w, data, "mse_loss");
    return MseObjective(data).loss(w);
}

CMatrix euclid_gradient(const CMatrix &w, const Dataset &data) {
    require_nonempty(data, "euclid_gradient");
    require_model_dims(w, data, "euclid_gradient");
    return MseObjective(data).gradient(w);
}

TrainResult train_cayley(const Dataset &data, const TrainConfig &cfg) {
    validate(cfg);
    if (cfg.method != TrainMethod::cayley && cfg.method != TrainMethod::cayley_fixed) {
        config_error("train_cayley: method must be cayley or cayley_fixed");
    }
    validate(data);
    const MseObjective objective(data);
    const LossFn loss_fn = [&objective](const CMatrix &w) { return objective.loss(w); };

    TrainResult result;
    CMatrix w = haar_unitary(data.dim(), cfg.seed);
    double loss = objective.loss(w);
    TraceRecorder recorder(data, cfg.record_every);
    recorder.push(recorder.make_row(0, w, loss, 0.0, 0));

    int epoch = 0;
    while (epoch < cfg.epochs && loss > cfg.loss_tolerance) {
        ++epoch;
        const CMatrix g = objective.gradient(w);
        StepResult step;
        if (cfg.method == TrainMethod::cayley) {
            BacktrackingOptions options;
            options.loss_at_w = loss;
            step = backtracking_step(w, g, loss_fn, cfg.lambda0, options);
        } else {
            step = fixed_step(w, g, loss_fn, cfg.lambda0, loss);
        }
        const bool stationary = step.w_next == w;
        w = std::move(step.w_next);
        loss = step.loss_after;
        const bool finished = epoch == cfg.epochs || loss <= cfg.loss_tolerance || stationary;
        if (recorder.due(epoch) || finished) {
            recorder.push(recorder.make_row(epoch, w, loss, step.lambda_used, step.n_backtracks));
        }
        if (stationary) {
            break;
        }
    }
    result.epochs_run = epoch;
    result.trace = recorder.take();
    result.w = std::move(w);
    return result;
}

TrainResult train_gram_schmidt(const Dataset &data, const TrainConfig &cfg) {
    validate(cfg);
    if (cfg.method != TrainMethod::gram_schmidt) {
        config_error("train_gram_schmidt: method must be gram_schmidt");
    }
    validate(data);
    const MseObjective objective(data);

    TrainResult result;
    CMatrix w = haar_unitary(data.dim(), cfg.seed);
    double loss = objective.loss(w);
    TraceRecorder recorder(data, cfg.record_every);
    recorder.push(recorder.make_row(0, w, loss, 0.0, 0));

    int epoch = 0;
    while (epoch < cfg.epochs && loss > cfg.loss_tolerance) {
        ++epoch;
        CMatrix g = objective.gradient(w);
        g *= -cfg.lambda0;
        w += g;
        loss = objective.loss(w);
        if (epoch % cfg.reorth_interval == 0) {
            TraceRow before = recorder.make_row(epoch, w, loss, cfg.lambda0, 0);
            before.reorth_event = true;
            recorder.push(std::move(before));
            w = gram_schmidt(w);
            loss = objective.loss(w);
            TraceRow after = recorder.make_row(epoch, w, loss, cfg.lambda0, 0);
            after.reorth_event = true;
            recorder.push(std::move(after));
            continue;
        }
        const bool finished = epoch == cfg.epochs || loss <= cfg.loss_tolerance;
        if (recorder.due(epoch) || finished) {
            recorder.push(recorder.make_row(epoch, w, loss, cfg.lambda0, 0));
        }
    }
    result.epochs_run = epoch;
    result.trace = recorder.take();
    result.trace.has_reorth_column = true;
    result.w = std::move(w);
    return result;
}

TrainResult train(const Dataset &data, const TrainConfig &cfg) {
    if (cfg.method == TrainMethod::gram_schmidt) {
        return train_gram_schmidt(data, cfg);
    }
    return train_cayley(data, cfg);
}

}  // namespace cayley
