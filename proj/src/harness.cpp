#include "cayley/harness.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include "cayley/matrix_io.hpp"
#include "cayley/random.hpp"

namespace cayley {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string &what) { throw Error(ErrorCategory::config, what); }

void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
    if (!obj.is_object()) {
        config_error(where + " must be an object");
    }
    for (const auto &[key, value] : obj.items()) {
        if (!allowed.count(key)) {
            config_error(where + ": unknown field '" + key + "'");
        }
    }
}

TrainConfig train_from_json(const json &doc) {
    reject_unknown_keys(doc,
                        {"method", "lambda0", "epochs", "reorth_interval", "seed", "loss_tolerance", "record_every"},
                        "train");
    TrainConfig t;
    if (doc.contains("method")) {
        const auto name = doc.at("method").get<std::string>();
        auto method = parse_method(name);
        if (!method) {
            config_error("unknown training method '" + name + "'");
        }
        t.method = *method;
    }
    t.lambda0 = doc.value("lambda0", t.lambda0);
    t.epochs = doc.value("epochs", t.epochs);
    t.reorth_interval = doc.value("reorth_interval", t.reorth_interval);
    t.seed = doc.value("seed", t.seed);
    t.loss_tolerance = doc.value("loss_tolerance", t.loss_tolerance);
    t.record_every = doc.value("record_every", t.record_every);
    return t;
}

json train_to_json(const TrainConfig &t) {
    return json{{"method", method_name(t.method)}, {"lambda0", t.lambda0},
                {"epochs", t.epochs},              {"reorth_interval", t.reorth_interval},
                {"seed", t.seed},                  {"loss_tolerance", t.loss_tolerance},
                {"record_every", t.record_every}};
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw Error(ErrorCategory::io, "write failed: " + path.string());
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Builds a run directory next to its destination and renames it into place.
class StagedDirectory {
  public:
    explicit StagedDirectory(fs::path destination) : destination_(std::move(destination)) {
        if (destination_.empty()) {
            throw Error(ErrorCategory::config, "output_dir is empty");
        }
        destination_ = fs::absolute(destination_).lexically_normal();
        if (destination_.filename().empty()) {
            destination_ = destination_.parent_path();
        }
        std::error_code ec;
        fs::create_directories(destination_.parent_path(), ec);
        if (ec) {
            throw Error(ErrorCategory::io, "cannot create " + destination_.parent_path().string() + ": " + ec.message());
        }
        staging_ = destination_.parent_path() /
                   ("." + destination_.filename().string() + ".staging-" + std::to_string(::getpid()));
        fs::remove_all(staging_, ec);
        fs::create_directories(staging_, ec);
        if (ec) {
            throw Error(ErrorCategory::io, "cannot create " + staging_.string() + ": " + ec.message());
        }
    }

    StagedDirectory(const StagedDirectory &) = delete;
    StagedDirectory &operator=(const StagedDirectory &) = delete;

    ~StagedDirectory() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    const fs::path &path() const { return staging_; }

    void commit() {
        std::error_code ec;
        if (fs::exists(destination_)) {
            // Only replace what a previous run produced.
            const bool previous_run = fs::is_directory(destination_) &&
                                      (fs::is_empty(destination_) || fs::exists(destination_ / "report.json") ||
                                       fs::exists(destination_ / "comparison.json"));
            if (!previous_run) {
                throw Error(ErrorCategory::io,
                            destination_.string() + " exists and is not a previous run directory; refusing to replace it");
            }
            fs::remove_all(destination_, ec);
            if (ec) {
                throw Error(ErrorCategory::io, "cannot remove " + destination_.string() + ": " + ec.message());
            }
        }
        fs::rename(staging_, destination_, ec);
        if (ec) {
            throw Error(ErrorCategory::io, "cannot move run into " + destination_.string() + ": " + ec.message());
        }
        committed_ = true;
    }

  private:
    fs::path destination_;
    fs::path staging_;
    bool committed_ = false;
};

ExperimentReport make_report(const ExperimentConfig &cfg, const TrainResult &result, std::int64_t wall_ms) {
    const TraceRow &last = result.trace.rows.back();
    ExperimentReport report;
    report.method = std::string(method_name(cfg.train.method));
    report.final_loss = last.loss;
    report.final_fidelity = last.fidelity.value_or(0.0);
    report.final_unitary_error = last.unitary_error;
    report.final_unitary_error_spectral = unitary_error_spectral(result.w);
    report.max_unitary_error = result.trace.max_unitary_error();
    report.loss_increase_count = result.trace.loss_increase_count();
    report.epochs_run = result.epochs_run;
    report.wall_time_ms = wall_ms;
    report.config_echo = cfg;
    return report;
}

// Trains on `data` and writes the run files into `dir`.
ExperimentRun train_and_write(const ExperimentConfig &cfg, const Dataset &data, const fs::path &dir) {
    const auto start = std::chrono::steady_clock::now();
    TrainResult result = train(data, cfg.train);
    const auto wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

    ExperimentReport report = make_report(cfg, result, wall_ms);
    write_text(dir / "config.json", experiment_to_json(cfg).dump(2) + "\n");
    std::ofstream trace_out(dir / "trace.csv");
    result.trace.write_csv(trace_out);
    trace_out.close();
    if (!trace_out) {
        throw Error(ErrorCategory::io, "write failed: " + (dir / "trace.csv").string());
    }
    write_matrix_file(result.w, dir / "final_matrix.json");
    write_text(dir / "report.json", report_to_json(report).dump(2) + "\n");
    if (cfg.emit_plot_data) {
        emit_plot_data(result.trace, dir);
    }
    return {std::move(report), std::move(result)};
}

}  // namespace

void validate(const ExperimentConfig &cfg) {
    if (cfg.n_pairs < 1) {
        config_error("n_pairs must be at least 1");
    }
    if (cfg.target.kind == TargetSpec::Kind::circuit) {
        if (!cfg.target.circuit) {
            config_error("circuit target has no circuit");
        }
        validate(*cfg.target.circuit);
    } else if (cfg.target.n_qubits < 1 || cfg.target.n_qubits > kMaxQubits) {
        throw Error(ErrorCategory::invalid_argument,
                    "haar target n_qubits must be in 1.." + std::to_string(kMaxQubits));
    }
    validate(cfg.train);
}

ExperimentConfig experiment_from_json(const json &doc, const fs::path &base_dir) {
    ExperimentConfig cfg;
    try {
        reject_unknown_keys(doc, {"target", "n_pairs", "data_seed", "basis_inputs", "train", "output_dir", "emit_plot_data"},
                            "experiment");
        const json &target = doc.at("target");
        const auto kind = target.at("kind").get<std::string>();
        if (kind == "haar") {
            reject_unknown_keys(target, {"kind", "n_qubits", "seed"}, "target");
            cfg.target.kind = TargetSpec::Kind::haar;
            cfg.target.n_qubits = target.at("n_qubits").get<int>();
            cfg.target.seed = target.value("seed", std::uint64_t{0});
        } else if (kind == "circuit") {
            reject_unknown_keys(target, {"kind", "file", "spec"}, "target");
            cfg.target.kind = TargetSpec::Kind::circuit;
            if (target.contains("spec") == target.contains("file")) {
                config_error("circuit target needs exactly one of 'file' or 'spec'");
            }
            if (target.contains("spec")) {
                cfg.target.circuit = circuit_from_json(target.at("spec"));
            } else {
                fs::path file = target.at("file").get<std::string>();
                if (file.is_relative()) {
                    file = base_dir / file;
                }
                if (!fs::exists(file)) {
                    config_error("circuit file not found: " + file.string());
                }
                cfg.target.circuit = read_circuit_file(file);
            }
        } else {
            config_error("unknown target kind '" + kind + "'");
        }
        cfg.n_pairs = doc.at("n_pairs").get<int>();
        if (doc.contains("data_seed")) {
            cfg.data_seed = doc.at("data_seed").get<std::uint64_t>();
        }
        cfg.basis_inputs = doc.value("basis_inputs", false);
        if (doc.contains("train")) {
            cfg.train = train_from_json(doc.at("train"));
        }
        cfg.output_dir = doc.value("output_dir", std::string("run"));
        cfg.emit_plot_data = doc.value("emit_plot_data", true);
    } catch (const json::exception &e) {
        config_error(std::string("experiment config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCategory::io, "cannot open config " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        config_error(path.string() + ": " + e.what());
    }
    return experiment_from_json(doc, path.parent_path());
}

json experiment_to_json(const ExperimentConfig &cfg) {
    json target;
    if (cfg.target.kind == TargetSpec::Kind::circuit) {
        target = json{{"kind", "circuit"}, {"spec", circuit_to_json(*cfg.target.circuit)}};
    } else {
        target = json{{"kind", "haar"}, {"n_qubits", cfg.target.n_qubits}, {"seed", cfg.target.seed}};
    }
    json doc{{"target", std::move(target)},
             {"n_pairs", cfg.n_pairs},
             {"basis_inputs", cfg.basis_inputs},
             {"train", train_to_json(cfg.train)},
             {"output_dir", cfg.output_dir.string()},
             {"emit_plot_data", cfg.emit_plot_data}};
    doc["data_seed"] = cfg.data_seed.value_or(cfg.train.seed);
    return doc;
}

json report_to_json(const ExperimentReport &r) {
    return json{{"method", r.method},
                {"final_loss", r.final_loss},
                {"final_fidelity", r.final_fidelity},
                {"final_unitary_error", r.final_unitary_error},
                {"final_unitary_error_spectral", r.final_unitary_error_spectral},
                {"max_unitary_error", r.max_unitary_error},
                {"loss_increase_count", r.loss_increase_count},
                {"epochs_run", r.epochs_run},
                {"wall_time_ms", r.wall_time_ms},
                {"config_echo", experiment_to_json(r.config_echo)}};
}

Dataset generate_dataset(const ExperimentConfig &cfg) {
    validate(cfg);
    Dataset data;
    data.n_qubits = cfg.target.qubits();
    const CMatrix target = cfg.target.kind == TargetSpec::Kind::circuit
                               ? circuit_to_unitary(*cfg.target.circuit)
                               : haar_unitary(std::size_t{1} << cfg.target.n_qubits, cfg.target.seed);
    auto seeds = make_engine(cfg.data_seed.value_or(cfg.train.seed), RngStream::dataset);
    const std::size_t dim = data.dim();
    for (int m = 0; m < cfg.n_pairs; ++m) {
        const std::uint64_t state_seed = seeds();
        StatePair pair;
        if (cfg.basis_inputs && static_cast<std::size_t>(m) < dim) {
            pair.input = CVector::basis(dim, static_cast<std::size_t>(m));
        } else {
            pair.input = random_state(data.n_qubits, state_seed);
        }
        pair.output = forward(target, pair.input);
        data.pairs.push_back(std::move(pair));
    }
    data.target_unitary = target;
    return data;
}

ExperimentRun run_experiment(const ExperimentConfig &cfg) {
    const Dataset data = generate_dataset(cfg);
    StagedDirectory staged(cfg.output_dir);
    ExperimentRun run = train_and_write(cfg, data, staged.path());
    staged.commit();
    return run;
}

void emit_plot_data(const TrainTrace &trace, const fs::path &out_dir) {
    if (trace.rows.empty()) {
        throw Error(ErrorCategory::invalid_argument, "emit_plot_data: trace is empty");
    }
    const bool flagged = trace.has_reorth_column;
    auto series = [&](const char *file, const char *column, auto value_of) {
        std::string text = std::string("# epoch ") + column + (flagged ? " reorth_event" : "") + "\n";
        for (const auto &row : trace.rows) {
            std::optional<double> v = value_of(row);
            if (!v) {
                continue;
            }
            text += std::to_string(row.epoch) + " " + fmt_double(*v);
            if (flagged) {
                text += row.reorth_event ? " 1" : " 0";
            }
            text += "\n";
        }
        write_text(out_dir / file, text);
    };
    series("loss.dat", "loss", [](const TraceRow &r) { return std::optional<double>(r.loss); });
    series("fidelity.dat", "fidelity", [](const TraceRow &r) { return r.fidelity; });
    series("unitary_error.dat", "unitary_error",
           [](const TraceRow &r) { return std::optional<double>(r.unitary_error); });
}

void ComparisonReport::write_table(std::ostream &out) const {
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %14s %12s %18s %14s %8s\n", "method", "final_loss", "fidelity",
                  "max_unitary_error", "loss_increases", "epochs");
    out << line;
    for (const ExperimentReport *r : {&cayley, &gram_schmidt}) {
        std::snprintf(line, sizeof line, "%-14s %14.6e %12.9f %18.6e %14d %8d\n", r->method.c_str(), r->final_loss,
                      r->final_fidelity, r->max_unitary_error, r->loss_increase_count, r->epochs_run);
        out << line;
    }
}

json ComparisonReport::to_json() const {
    return json{{"cayley", report_to_json(cayley)}, {"gram_schmidt", report_to_json(gram_schmidt)}};
}

ComparisonReport compare_methods(const ExperimentConfig &cfg) {
    const Dataset data = generate_dataset(cfg);
    StagedDirectory staged(cfg.output_dir);

    ExperimentConfig cayley_cfg = cfg;
    cayley_cfg.train.method = TrainMethod::cayley;
    cayley_cfg.output_dir = cfg.output_dir / "cayley";
    ExperimentConfig baseline_cfg = cfg;
    baseline_cfg.train.method = TrainMethod::gram_schmidt;
    baseline_cfg.output_dir = cfg.output_dir / "gram_schmidt";

    std::error_code ec;
    fs::create_directory(staged.path() / "cayley", ec);
    fs::create_directory(staged.path() / "gram_schmidt", ec);
    if (ec) {
        throw Error(ErrorCategory::io, "cannot create comparison subdirectories: " + ec.message());
    }

    ComparisonReport comparison;
    comparison.cayley = train_and_write(cayley_cfg, data, staged.path() / "cayley").report;
    comparison.gram_schmidt = train_and_write(baseline_cfg, data, staged.path() / "gram_schmidt").report;

    write_text(staged.path() / "comparison.json", comparison.to_json().dump(2) + "\n");
    std::string csv = "method,final_loss,final_fidelity,max_unitary_error,loss_increase_count,epochs_run\n";
    for (const ExperimentReport *r : {&comparison.cayley, &comparison.gram_schmidt}) {
        csv += r->method + "," + fmt_double(r->final_loss) + "," + fmt_double(r->final_fidelity) + "," +
               fmt_double(r->max_unitary_error) + "," + std::to_string(r->loss_increase_count) + "," +
               std::to_string(r->epochs_run) + "\n";
    }
    write_text(staged.path() / "comparison.csv", csv);
    staged.commit();
    return comparison;
}

}  // namespace cayley
