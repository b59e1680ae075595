#include <gtest/gtest.h>

#include <sstream>

#include "cayley/model.hpp"
#include "cayley/stiefel.hpp"
#include "test_util.hpp"

using namespace cayley;
using namespace std::complex_literals;

namespace {

Dataset make_dataset(const CMatrix &target, int n_qubits, int pairs, std::uint64_t seed) {
    Dataset d;
    d.n_qubits = n_qubits;
    for (int m = 0; m < pairs; ++m) {
        CVector in = random_state(n_qubits, seed * 1000 + m);
        d.pairs.push_back({in, matvec(target, in)});
    }
    d.target_unitary = target;
    return d;
}

// Loss computed pair by pair with std::complex arithmetic only.
double naive_loss(const CMatrix &w, const Dataset &d) {
    double s = 0.0;
    for (const auto &p : d.pairs) {
        for (std::size_t i = 0; i < w.rows(); ++i) {
            cplx r = -p.output[i];
            for (std::size_t j = 0; j < w.cols(); ++j) {
                r += w(i, j) * p.input[j];
            }
            s += std::norm(r);
        }
    }
    return s / static_cast<double>(d.pairs.size());
}

bool is_non_increasing(const TrainTrace &trace) {
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        if (trace.rows[i].loss > trace.rows[i - 1].loss) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(model, forward_examples) {
    const CVector psi = random_state(2, 3);
    EXPECT_EQ(forward(CMatrix::identity(4), psi), psi);
    EXPECT_EQ(forward(CMatrix{{0, 1}, {1, 0}}, CVector::basis(2, 0)), CVector::basis(2, 1));
    const CVector out = forward(haar_unitary(8, 4), random_state(3, 9));
    EXPECT_NEAR(std::sqrt(norm_sq(out)), 1.0, 1e-12);
    EXPECT_THROW(forward(CMatrix::identity(4), random_state(1, 1)), Error);
    EXPECT_THROW(forward(CMatrix(2, 3), CVector(3)), Error);
}

TEST(model, mse_loss_examples) {
    const CMatrix u = haar_unitary(4, 5);
    const Dataset data = make_dataset(u, 2, 8, 1);
    EXPECT_LE(mse_loss(u, data), 1e-20);

    Dataset flip;
    flip.n_qubits = 1;
    flip.pairs.push_back({CVector::basis(2, 0), CVector::basis(2, 1)});
    // ||(1,0) - (0,1)||^2
    EXPECT_EQ(mse_loss(CMatrix::identity(2), flip), 2.0);

    auto rng = testutil::engine(2);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix w = testutil::random_matrix(4, 4, rng);
        EXPECT_GE(mse_loss(w, data), 0.0);
        EXPECT_NEAR(mse_loss(w, data), naive_loss(w, data), 1e-12 * naive_loss(w, data));
    }
    EXPECT_THROW(mse_loss(u, Dataset{}), Error);
    EXPECT_THROW(mse_loss(CMatrix::identity(2), data), Error);
}

TEST(model, euclid_gradient_examples) {
    const CMatrix u = haar_unitary(4, 6);
    const Dataset data = make_dataset(u, 2, 8, 2);
    EXPECT_LE(std::sqrt(testutil::naive_frob_sq(euclid_gradient(u, data))), 1e-14);

    Dataset flip;
    flip.n_qubits = 1;
    flip.pairs.push_back({CVector::basis(2, 0), CVector::basis(2, 1)});
    // 2 (|0> - |1>) <0|
    EXPECT_EQ(euclid_gradient(CMatrix::identity(2), flip), (CMatrix{{2, 0}, {-2, 0}}));
    EXPECT_THROW(euclid_gradient(u, Dataset{}), Error);
}

// Re tr(G†Z) against central differences of the loss for random W, Z, data.
TEST(model_properties, gradient_matches_central_differences) {
    auto rng = testutil::engine(3);
    const double h = 1e-6;
    for (int trial = 0; trial < 60; ++trial) {
        const int nq = 1 + trial % 3;
        const std::size_t n = std::size_t{1} << nq;
        const Dataset data = make_dataset(haar_unitary(n, 40 + trial), nq, 1 + trial % 9, trial);
        const CMatrix w = testutil::random_matrix(n, n, rng);
        const CMatrix z = testutil::random_matrix(n, n, rng);
        const CMatrix g = euclid_gradient(w, data);
        cplx analytic = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            analytic += std::conj(g.data()[i]) * z.data()[i];
        }
        const double fd = (naive_loss(w + h * z, data) - naive_loss(w - h * z, data)) / (2.0 * h);
        EXPECT_NEAR(analytic.real(), fd, 1e-5 * std::abs(fd)) << "trial " << trial;
    }
}

TEST(model, train_cayley_two_qubit) {
    const CMatrix u = haar_unitary(4, 2024);
    const Dataset data = make_dataset(u, 2, 16, 3);
    TrainConfig cfg;
    cfg.epochs = 2000;
    cfg.seed = 7;
    const TrainResult r = train_cayley(data, cfg);
    EXPECT_GE(fidelity(u, r.w), 0.999);
    EXPECT_LE(unitary_error(r.w), 1e-10);
    EXPECT_TRUE(is_non_increasing(r.trace));
    for (const auto &row : r.trace.rows) {
        EXPECT_LE(row.unitary_error, 1e-10);
    }
    EXPECT_EQ(r.trace.rows.front().epoch, 0);
    EXPECT_EQ(r.trace.rows.back().epoch, r.epochs_run);
    EXPECT_EQ(r.trace.rows.back().loss, mse_loss(r.w, data));
}

TEST(model, train_epoch_contract) {
    const Dataset data = make_dataset(haar_unitary(4, 1), 2, 8, 4);
    TrainConfig cfg;
    cfg.epochs = 0;
    EXPECT_THROW(train_cayley(data, cfg), Error);
    cfg.epochs = 1;
    const TrainResult r = train_cayley(data, cfg);
    EXPECT_EQ(r.epochs_run, 1);
    ASSERT_EQ(r.trace.rows.size(), 2u);
    EXPECT_LE(r.trace.rows[1].loss, r.trace.rows[0].loss);

    cfg.method = TrainMethod::gram_schmidt;
    EXPECT_THROW(train_cayley(data, cfg), Error);
    cfg.method = TrainMethod::cayley;
    EXPECT_THROW(train_gram_schmidt(data, cfg), Error);
    cfg.lambda0 = -1.0;
    EXPECT_THROW(train(data, cfg), Error);
}

TEST(model, train_is_deterministic) {
    const Dataset data = make_dataset(haar_unitary(8, 2), 3, 16, 5);
    TrainConfig cfg;
    cfg.epochs = 100;
    cfg.seed = 3;
    std::ostringstream a;
    std::ostringstream b;
    const TrainResult r1 = train(data, cfg);
    const TrainResult r2 = train(data, cfg);
    r1.trace.write_csv(a);
    r2.trace.write_csv(b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(r1.w, r2.w);
}

TEST(model, record_every_keeps_last_row) {
    const Dataset data = make_dataset(haar_unitary(4, 3), 2, 8, 6);
    TrainConfig cfg;
    cfg.epochs = 25;
    cfg.record_every = 10;
    cfg.loss_tolerance = 0.0;
    const TrainResult r = train(data, cfg);
    std::vector<int> epochs;
    for (const auto &row : r.trace.rows) {
        epochs.push_back(row.epoch);
    }
    EXPECT_EQ(epochs, (std::vector<int>{0, 10, 20, 25}));
}

TEST(model, early_stop_on_tolerance) {
    const Dataset data = make_dataset(haar_unitary(2, 4), 1, 4, 7);
    TrainConfig cfg;
    cfg.epochs = 5000;
    cfg.loss_tolerance = 1e-6;
    const TrainResult r = train(data, cfg);
    EXPECT_LT(r.epochs_run, 5000);
    EXPECT_LE(r.trace.rows.back().loss, 1e-6);
    EXPECT_GT(r.trace.rows[r.trace.rows.size() - 2].loss, 1e-6);
}

TEST(model, cayley_fixed_keeps_unitarity) {
    const Dataset data = make_dataset(haar_unitary(4, 5), 2, 8, 8);
    TrainConfig cfg;
    cfg.method = TrainMethod::cayley_fixed;
    cfg.epochs = 300;
    const TrainResult r = train(data, cfg);
    for (const auto &row : r.trace.rows) {
        EXPECT_LE(row.unitary_error, 1e-10);
        EXPECT_EQ(row.n_backtracks, 0);
        if (row.epoch > 0) {
            EXPECT_EQ(row.lambda_used, 0.1);
        }
    }
    EXPECT_LT(r.trace.rows.back().loss, r.trace.rows.front().loss);
}

TEST(model, gram_schmidt_reorth_every_epoch) {
    const Dataset data = make_dataset(haar_unitary(4, 6), 2, 8, 9);
    TrainConfig cfg;
    cfg.method = TrainMethod::gram_schmidt;
    cfg.reorth_interval = 1;
    cfg.epochs = 50;
    const TrainResult r = train(data, cfg);
    EXPECT_TRUE(r.trace.has_reorth_column);
    // Rows come as (before, after) pairs per epoch after the initial row; the
    // weights the trainer carries forward are the "after" rows.
    ASSERT_EQ(r.trace.rows.size(), 1u + 2u * 50u);
    EXPECT_LE(r.trace.rows[0].unitary_error, 1e-10);
    for (std::size_t i = 1; i < r.trace.rows.size(); i += 2) {
        const TraceRow &before = r.trace.rows[i];
        const TraceRow &after = r.trace.rows[i + 1];
        EXPECT_TRUE(before.reorth_event);
        EXPECT_TRUE(after.reorth_event);
        EXPECT_EQ(before.epoch, after.epoch);
        EXPECT_LE(after.unitary_error, 1e-10);
    }
    EXPECT_LE(unitary_error(r.w), 1e-10);
}

TEST(model, gram_schmidt_benchmark_pathology) {
    const CMatrix u = circuit_to_unitary(benchmark_circuit_5q());
    const Dataset data = make_dataset(u, 5, 64, 10);
    TrainConfig cfg;
    cfg.method = TrainMethod::gram_schmidt;
    cfg.epochs = 200;
    cfg.reorth_interval = 10;
    const TrainResult r = train(data, cfg);
    int jumps = 0;
    double max_between = 0.0;
    for (std::size_t i = 0; i + 1 < r.trace.rows.size(); ++i) {
        const TraceRow &a = r.trace.rows[i];
        const TraceRow &b = r.trace.rows[i + 1];
        if (a.reorth_event && b.reorth_event && a.epoch == b.epoch && b.loss > a.loss) {
            ++jumps;
        }
        if (!a.reorth_event) {
            max_between = std::max(max_between, a.unitary_error);
        }
    }
    EXPECT_GE(jumps, 1);
    EXPECT_GT(max_between, 1e-6);
}

// With M >= N generic inputs the only zero of the loss is W = U itself.
TEST(model_properties, exact_recovery_at_convergence) {
    for (int nq = 1; nq <= 3; ++nq) {
        const std::size_t n = std::size_t{1} << nq;
        const CMatrix u = haar_unitary(n, 70 + nq);
        const Dataset data = make_dataset(u, nq, static_cast<int>(2 * n), 11 + nq);
        TrainConfig cfg;
        cfg.epochs = 20000;
        cfg.lambda0 = 0.5;
        cfg.loss_tolerance = 1e-13;
        const TrainResult r = train(data, cfg);
        ASSERT_LE(r.trace.rows.back().loss, 1e-12) << "n=" << n;
        EXPECT_LE(testutil::frob_dist(r.w, u), 1e-5);
        EXPECT_GE(fidelity(u, r.w), 1.0 - 1e-6);
        EXPECT_TRUE(is_non_increasing(r.trace));
    }
}

TEST(model, dataset_validation) {
    Dataset d = make_dataset(haar_unitary(4, 1), 2, 4, 1);
    EXPECT_NO_THROW(validate(d));
    Dataset wrong_target = d;
    wrong_target.target_unitary = haar_unitary(4, 2);
    EXPECT_THROW(validate(wrong_target), Error);
    Dataset wrong_dim = d;
    wrong_dim.pairs.push_back({random_state(1, 1), random_state(1, 2)});
    EXPECT_THROW(validate(wrong_dim), Error);
}

TEST(model, trace_csv_layout) {
    TrainTrace t;
    t.rows.push_back({0, 2.0, 0.5, 1e-30, 0.0, 0, false});
    t.rows.push_back({1, 1.5, std::nullopt, 0.0, 0.1, 2, true});
    std::ostringstream plain;
    t.write_csv(plain);
    EXPECT_EQ(plain.str(),
              "epoch,loss,fidelity,unitary_error,lambda_used,n_backtracks\n"
              "0,2,0.5,1.0000000000000001e-30,0,0\n"
              "1,1.5,,0,0.10000000000000001,2\n");
    t.has_reorth_column = true;
    std::ostringstream flagged;
    t.write_csv(flagged);
    EXPECT_NE(flagged.str().find("n_backtracks,reorth_event\n"), std::string::npos);
    EXPECT_NE(flagged.str().find(",2,1\n"), std::string::npos);
    EXPECT_EQ(t.loss_increase_count(), 0);
}
