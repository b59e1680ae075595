// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance [config-dir]
//
// config-dir defaults to the repository's configs/ directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "cayley/harness.hpp"
#include "cayley/kernels.hpp"
#include "cayley/stiefel.hpp"
#include "test_util.hpp"

using namespace cayley;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double log_uniform(std::mt19937_64 &rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

Dataset random_dataset(const CMatrix &target, int n_qubits, int pairs, std::uint64_t seed) {
    Dataset d;
    d.n_qubits = n_qubits;
    for (int m = 0; m < pairs; ++m) {
        const CVector in = random_state(n_qubits, seed * 1000 + static_cast<std::uint64_t>(m));
        d.pairs.push_back({in, matvec(target, in)});
    }
    d.target_unitary = target;
    return d;
}

class Acceptance {
  public:
    Acceptance(fs::path config_dir, fs::path scratch) : config_dir_(std::move(config_dir)), scratch_(std::move(scratch)) {}

    Outcome unitarity_maintenance() {
        const ExperimentRun &run = haar_2q();
        const double worst = run.result.trace.max_unitary_error();
        const double last = run.result.trace.rows.back().unitary_error;
        return {worst <= 1e-10 && last <= 1e-12,
                fmt("max recorded %.3e (<= 1e-10), final %.3e (<= 1e-12)", worst, last)};
    }

    Outcome fidelity_convergence() {
        const double f2 = haar_2q().report.final_fidelity;
        const double f5 = benchmark_5q().report.final_fidelity;
        const double seconds = experiment_seconds_;
        return {f2 >= 0.999 && f5 >= 0.99 && seconds < 120.0,
                fmt("2q F=%.9f (>= 0.999), 5q F=%.9f (>= 0.99), %.1f s (< 120 s)", f2, f5, seconds)};
    }

    Outcome monotone_descent() {
        // Every cayley run made here, plus a sweep of extra sizes and seeds.
        std::vector<std::pair<std::string, int>> counts = {
            {"haar_2q", haar_2q().result.trace.loss_increase_count()},
            {"benchmark_5q", benchmark_5q().result.trace.loss_increase_count()},
            {"compare/cayley", comparison().cayley.loss_increase_count},
            {"exact_1q", exact_recovery_run().trace.loss_increase_count()},
        };
        for (int nq = 1; nq <= 4; ++nq) {
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                const Dataset data = random_dataset(haar_unitary(std::size_t{1} << nq, 100 + seed), nq, 4 * nq, seed);
                for (double lambda0 : {0.1, 1.0}) {
                    TrainConfig cfg;
                    cfg.epochs = 300;
                    cfg.seed = seed;
                    cfg.lambda0 = lambda0;
                    counts.emplace_back(fmt("sweep nq=%d seed=%d lambda0=%g", nq, static_cast<int>(seed), lambda0),
                                        train(data, cfg).trace.loss_increase_count());
                }
            }
        }
        int violations = 0;
        std::string first_bad;
        for (const auto &[name, n] : counts) {
            violations += n;
            if (n > 0 && first_bad.empty()) {
                first_bad = name;
            }
        }
        std::string detail = fmt("%d runs, %d loss increases", static_cast<int>(counts.size()), violations);
        if (!first_bad.empty()) {
            detail += " (first in " + first_bad + ")";
        }
        return {violations == 0, detail};
    }

    Outcome baseline_pathology() {
        const ComparisonReport &c = comparison();
        const int gs = c.gram_schmidt.loss_increase_count;
        const int cy = c.cayley.loss_increase_count;
        const double gs_err = c.gram_schmidt.max_unitary_error;
        return {gs >= 1 && cy == 0 && gs_err > 1e-6,
                fmt("gram_schmidt increases %d (>= 1), cayley increases %d (== 0), gram_schmidt max unitary "
                    "error %.3e (> 1e-6)",
                    gs, cy, gs_err)};
    }

    Outcome cayley_unitarity() {
        auto rng = testutil::engine(501);
        const std::size_t sizes[] = {2, 4, 8, 32};
        double worst = 0.0;
        int checks = 0;
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t n = sizes[trial % 4];
            const CMatrix w = haar_unitary(n, 9000 + static_cast<std::uint64_t>(trial));
            const CMatrix a = testutil::random_skew(n, rng, log_uniform(rng, 1e-2, 1e2));
            // Pin the range ends on the first trials of each size.
            const double lambda = trial < 4 ? 1e-4 : trial < 8 ? 10.0 : log_uniform(rng, 1e-4, 10.0);
            worst = std::max(worst, testutil::naive_unitary_error(cayley_step(w, a, lambda)));
            ++checks;
        }
        return {checks == 500 && worst <= 1e-10, fmt("%d checks, worst unitary error %.3e (<= 1e-10)", checks, worst)};
    }

    Outcome descent_derivative_check() {
        const double h = 1e-5;
        double worst_rel = 0.0;
        double max_sign = -1e300;
        int instances = 0;
        for (int trial = 0; trial < 60; ++trial) {
            const int nq = 1 + trial % 3;
            const std::size_t n = std::size_t{1} << nq;
            const Dataset data =
                random_dataset(haar_unitary(n, 300 + static_cast<std::uint64_t>(trial)), nq, 2 + trial % 7, trial);
            const CMatrix w = haar_unitary(n, 700 + static_cast<std::uint64_t>(trial));
            const CMatrix g = euclid_gradient(w, data);
            const CMatrix a = skew_from_gradient(g, w);
            const double analytic = descent_derivative(g, w);
            const double fd =
                (mse_loss(cayley_step(w, a, h), data) - mse_loss(cayley_step(w, a, -h), data)) / (2.0 * h);
            worst_rel = std::max(worst_rel, std::abs(analytic - fd) / std::abs(fd));
            max_sign = std::max(max_sign, analytic);
            ++instances;
        }
        return {instances >= 50 && worst_rel <= 1e-4 && max_sign <= 0.0,
                fmt("%d instances, worst relative error %.3e (<= 1e-4), largest derivative %.3e (<= 0)", instances,
                    worst_rel, max_sign)};
    }

    Outcome gradient_oracle() {
        auto rng = testutil::engine(701);
        const double h = 1e-6;
        double worst_rel = 0.0;
        int instances = 0;
        for (int trial = 0; trial < 60; ++trial) {
            const int nq = 1 + trial % 3;
            const std::size_t n = std::size_t{1} << nq;
            const Dataset data =
                random_dataset(haar_unitary(n, 500 + static_cast<std::uint64_t>(trial)), nq, 1 + trial % 9, trial);
            const CMatrix w = testutil::random_matrix(n, n, rng);
            const CMatrix z = testutil::random_matrix(n, n, rng);
            const CMatrix g = euclid_gradient(w, data);
            double analytic = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                analytic += (std::conj(g.data()[i]) * z.data()[i]).real();
            }
            const double fd = (mse_loss(w + h * z, data) - mse_loss(w - h * z, data)) / (2.0 * h);
            worst_rel = std::max(worst_rel, std::abs(analytic - fd) / std::abs(fd));
            ++instances;
        }
        return {instances >= 50 && worst_rel <= 1e-5,
                fmt("%d instances, worst relative error %.3e (<= 1e-5)", instances, worst_rel)};
    }

    Outcome tangent_order() {
        auto rng = testutil::engine(801);
        double lo = 1e300;
        double hi = -1e300;
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = std::size_t{2} << (trial % 4);
            const CMatrix w = haar_unitary(n, 1100 + static_cast<std::uint64_t>(trial));
            const CMatrix z = testutil::naive_matmul(testutil::random_skew(n, rng, 1.0), w);
            double log_err[3];
            const double eps[3] = {1e-2, 1e-3, 1e-4};
            for (int k = 0; k < 3; ++k) {
                log_err[k] = std::log10(std::sqrt(testutil::naive_unitary_error(w + eps[k] * z)));
            }
            const double slope = (log_err[2] - log_err[0]) / (std::log10(eps[2]) - std::log10(eps[0]));
            lo = std::min(lo, slope);
            hi = std::max(hi, slope);
        }
        return {lo >= 1.9 && hi <= 2.1, fmt("20 tangent directions, slopes in [%.4f, %.4f] (within [1.9, 2.1])", lo, hi)};
    }

    Outcome exact_recovery() {
        const Dataset &data = exact_recovery_data();
        const CMatrix &u = *data.target_unitary;
        const CMatrix &w = exact_recovery_run().w;

        // Least squares W = Phi Psi^+ (Psi Psi^+)^-1, 2x2 inverse written out.
        CMatrix psi(2, 4);
        CMatrix phi(2, 4);
        for (std::size_t m = 0; m < 4; ++m) {
            for (std::size_t i = 0; i < 2; ++i) {
                psi(i, m) = data.pairs[m].input[i];
                phi(i, m) = data.pairs[m].output[i];
            }
        }
        const CMatrix gram = testutil::naive_matmul(psi, testutil::naive_adjoint(psi));
        const CMatrix cross = testutil::naive_matmul(phi, testutil::naive_adjoint(psi));
        const cplx det = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
        const CMatrix gram_inv{{gram(1, 1) / det, -gram(0, 1) / det}, {-gram(1, 0) / det, gram(0, 0) / det}};
        const CMatrix oracle = testutil::naive_matmul(cross, gram_inv);

        const double oracle_vs_target = testutil::frob_dist(oracle, u);
        const double learned_vs_target = testutil::frob_dist(w, u);
        const double learned_vs_oracle = testutil::frob_dist(w, oracle);
        return {learned_vs_target <= 1e-5 && learned_vs_oracle <= 1e-5 && oracle_vs_target <= 1e-10,
                fmt("||W-U||_F=%.3e (<= 1e-5), ||W-W_ls||_F=%.3e (<= 1e-5), ||W_ls-U||_F=%.3e", learned_vs_target,
                    learned_vs_oracle, oracle_vs_target)};
    }

  private:
    ExperimentConfig load(const char *name, const char *out) {
        ExperimentConfig cfg = load_experiment_config(config_dir_ / name);
        cfg.output_dir = scratch_ / out;
        return cfg;
    }

    template <class F>
    ExperimentRun timed(F &&f) {
        const auto start = std::chrono::steady_clock::now();
        auto result = f();
        experiment_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    }

    const ExperimentRun &haar_2q() {
        if (!haar_2q_) {
            haar_2q_ = timed([&] { return run_experiment(load("haar_2q.json", "haar_2q")); });
        }
        return *haar_2q_;
    }

    const ExperimentRun &benchmark_5q() {
        if (!benchmark_5q_) {
            benchmark_5q_ = timed([&] { return run_experiment(load("benchmark_5q.json", "benchmark_5q")); });
        }
        return *benchmark_5q_;
    }

    const ComparisonReport &comparison() {
        if (!comparison_) {
            comparison_ = compare_methods(load("benchmark_5q.json", "compare_5q"));
        }
        return *comparison_;
    }

    const Dataset &exact_recovery_data() {
        if (!exact_data_) {
            exact_data_ = random_dataset(haar_unitary(2, 4242), 1, 4, 17);
        }
        return *exact_data_;
    }

    const TrainResult &exact_recovery_run() {
        if (!exact_run_) {
            TrainConfig cfg;
            cfg.lambda0 = 0.5;
            cfg.epochs = 20000;
            cfg.loss_tolerance = 1e-13;
            cfg.seed = 3;
            exact_run_ = train(exact_recovery_data(), cfg);
        }
        return *exact_run_;
    }

    fs::path config_dir_;
    fs::path scratch_;
    double experiment_seconds_ = 0.0;
    std::optional<ExperimentRun> haar_2q_;
    std::optional<ExperimentRun> benchmark_5q_;
    std::optional<ComparisonReport> comparison_;
    std::optional<Dataset> exact_data_;
    std::optional<TrainResult> exact_run_;
};

}  // namespace

int main(int argc, char **argv) {
#ifdef CAYLEY_SOURCE_DIR
    fs::path config_dir = fs::path(CAYLEY_SOURCE_DIR) / "configs";
#else
    fs::path config_dir = "configs";
#endif
    if (argc > 1) {
        config_dir = argv[1];
    }
    const fs::path scratch = fs::temp_directory_path() / ("cayley_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    std::printf("kernel backend: %s\n", std::string(kernels::backend_name(kernels::active_backend())).c_str());

    Acceptance acc(config_dir, scratch);
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"AC1 unitarity maintenance", [&] { return acc.unitarity_maintenance(); }},
        {"AC2 fidelity convergence", [&] { return acc.fidelity_convergence(); }},
        {"AC3 monotone descent", [&] { return acc.monotone_descent(); }},
        {"AC4 baseline pathology", [&] { return acc.baseline_pathology(); }},
        {"AC5 cayley retraction unitarity", [&] { return acc.cayley_unitarity(); }},
        {"AC6 descent derivative", [&] { return acc.descent_derivative_check(); }},
        {"AC7 gradient oracle", [&] { return acc.gradient_oracle(); }},
        {"AC8 tangent order", [&] { return acc.tangent_order(); }},
        {"AC9 exact recovery", [&] { return acc.exact_recovery(); }},
    };

    int failures = 0;
    for (const auto &[name, check] : criteria) {
        Outcome out;
        try {
            out = check();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += out.pass ? 0 : 1;
        std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", static_cast<int>(criteria.size()) - failures,
                static_cast<int>(criteria.size()));

    std::error_code ec;
    fs::remove_all(scratch, ec);
    return failures == 0 ? 0 : 1;
}
