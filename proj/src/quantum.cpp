#include "cayley/quantum.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>

#include "cayley/kernels.hpp"
#include "cayley/random.hpp"

namespace cayley {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Gate, std::string_view>, 11> kGateNames{{
    {Gate::H, "H"},
    {Gate::X, "X"},
    {Gate::Y, "Y"},
    {Gate::Z, "Z"},
    {Gate::S, "S"},
    {Gate::T, "T"},
    {Gate::RX, "RX"},
    {Gate::RY, "RY"},
    {Gate::RZ, "RZ"},
    {Gate::CNOT, "CNOT"},
    {Gate::CZ, "CZ"},
}};

[[noreturn]] void config_error(const std::string &what) { throw Error(ErrorCategory::config, what); }

}  // namespace

std::string_view gate_name(Gate gate) noexcept {
    for (const auto &[g, name] : kGateNames) {
        if (g == gate) {
            return name;
        }
    }
    return "?";
}

std::optional<Gate> parse_gate(std::string_view name) noexcept {
    for (const auto &[g, n] : kGateNames) {
        if (n == name) {
            return g;
        }
    }
    return std::nullopt;
}

int gate_arity(Gate gate) noexcept { return (gate == Gate::CNOT || gate == Gate::CZ) ? 2 : 1; }

bool gate_is_rotation(Gate gate) noexcept { return gate == Gate::RX || gate == Gate::RY || gate == Gate::RZ; }

void validate(const GateApp &g, int n_qubits) {
    const std::string name(gate_name(g.gate));
    if (static_cast<int>(g.targets.size()) != gate_arity(g.gate)) {
        config_error(name + " expects " + std::to_string(gate_arity(g.gate)) + " target(s), got " +
                     std::to_string(g.targets.size()));
    }
    const std::size_t want_params = gate_is_rotation(g.gate) ? 1 : 0;
    if (g.params.size() != want_params) {
        config_error(name + " expects " + std::to_string(want_params) + " parameter(s), got " +
                     std::to_string(g.params.size()));
    }
    for (double p : g.params) {
        if (!std::isfinite(p)) {
            config_error(name + " has a non-finite angle");
        }
    }
    for (std::size_t i = 0; i < g.targets.size(); ++i) {
        if (g.targets[i] < 0 || g.targets[i] >= n_qubits) {
            config_error(name + " target " + std::to_string(g.targets[i]) + " outside 0.." +
                         std::to_string(n_qubits - 1));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (g.targets[i] == g.targets[j]) {
                config_error(name + " has repeated target " + std::to_string(g.targets[i]));
            }
        }
    }
}

void validate(const CircuitSpec &c) {
    if (c.n_qubits < 1) {
        config_error("circuit needs at least one qubit");
    }
    if (c.n_qubits > kMaxQubits) {
        throw Error(ErrorCategory::invalid_argument, "circuit has " + std::to_string(c.n_qubits) +
                                                         " qubits; at most " + std::to_string(kMaxQubits) +
                                                         " are supported");
    }
    for (const auto &g : c.gates) {
        validate(g, c.n_qubits);
    }
}

CMatrix gate_matrix(const GateApp &g) {
    using namespace std::complex_literals;
    const double r = std::numbers::sqrt2 / 2.0;
    const double theta = g.params.empty() ? 0.0 : g.params.front();
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    switch (g.gate) {
        case Gate::H:
            return {{r, r}, {r, -r}};
        case Gate::X:
            return {{0, 1}, {1, 0}};
        case Gate::Y:
            return {{0, -1i}, {1i, 0}};
        case Gate::Z:
            return {{1, 0}, {0, -1}};
        case Gate::S:
            return {{1, 0}, {0, 1i}};
        case Gate::T:
            return {{1, 0}, {0, std::polar(1.0, std::numbers::pi / 4.0)}};
        case Gate::RX:
            return {{c, -1i * s}, {-1i * s, c}};
        case Gate::RY:
            return {{c, -s}, {s, c}};
        case Gate::RZ:
            return {{std::polar(1.0, -theta / 2.0), 0}, {0, std::polar(1.0, theta / 2.0)}};
        case Gate::CNOT:
            return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
        case Gate::CZ:
            return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
    }
    throw Error(ErrorCategory::invalid_argument, "unknown gate");
}

void apply_gate(CMatrix &u, const GateApp &g, int n_qubits) {
    validate(g, n_qubits);
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (u.rows() != dim) {
        throw Error(ErrorCategory::dimension, "apply_gate: matrix has " + std::to_string(u.rows()) +
                                                  " rows, expected " + std::to_string(dim));
    }
    const CMatrix gm = gate_matrix(g);
    const std::size_t k = g.targets.size();
    const std::size_t sub = std::size_t{1} << k;

    // Bit masks of the targets in the full index, most significant gate bit first.
    std::array<std::size_t, 2> bit{};
    std::size_t target_mask = 0;
    for (std::size_t t = 0; t < k; ++t) {
        bit[t] = std::size_t{1} << (n_qubits - 1 - g.targets[t]);
        target_mask |= bit[t];
    }
    auto index_of = [&](std::size_t base, std::size_t s) {
        std::size_t idx = base;
        for (std::size_t t = 0; t < k; ++t) {
            if (s & (std::size_t{1} << (k - 1 - t))) {
                idx |= bit[t];
            }
        }
        return idx;
    };

    const auto &kern = kernels::active();
    const std::size_t cols = u.cols();
    std::vector<std::vector<cplx>> scratch(sub, std::vector<cplx>(cols));
    std::array<std::size_t, 4> rows{};
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & target_mask) {
            continue;
        }
        for (std::size_t s = 0; s < sub; ++s) {
            rows[s] = index_of(base, s);
        }
        for (std::size_t r = 0; r < sub; ++r) {
            std::fill(scratch[r].begin(), scratch[r].end(), cplx(0.0));
            for (std::size_t s = 0; s < sub; ++s) {
                const cplx coeff = gm(r, s);
                if (coeff != cplx(0.0)) {
                    kern.axpy(coeff, u.row(rows[s]).data(), scratch[r].data(), cols);
                }
            }
        }
        for (std::size_t r = 0; r < sub; ++r) {
            std::copy(scratch[r].begin(), scratch[r].end(), u.row(rows[r]).begin());
        }
    }
}

CMatrix circuit_to_unitary(const CircuitSpec &c) {
    validate(c);
    CMatrix u = CMatrix::identity(std::size_t{1} << c.n_qubits);
    for (const auto &g : c.gates) {
        apply_gate(u, g, c.n_qubits);
    }
    return u;
}

CVector random_state(int n_qubits, std::uint64_t seed) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw Error(ErrorCategory::invalid_argument,
                    "random_state: n_qubits must be in 1.." + std::to_string(kMaxQubits));
    }
    auto engine = make_engine(seed, RngStream::random_state);
    CVector v(std::size_t{1} << n_qubits);
    for (auto &z : v.data()) {
        z = complex_gaussian(engine);
    }
    const double nrm = std::sqrt(norm_sq(v));
    for (auto &z : v.data()) {
        z /= nrm;
    }
    return v;
}

double fidelity(const CMatrix &u_true, const CMatrix &u_learned) {
    if (!u_true.is_square() || !u_learned.is_square() || u_true.rows() != u_learned.rows()) {
        throw Error(ErrorCategory::dimension, "fidelity: matrices must be square with equal dimensions");
    }
    return std::abs(trace_adjoint_product(u_true, u_learned)) / static_cast<double>(u_true.rows());
}

namespace {

CMatrix gram_defect(const CMatrix &w) {
    if (!w.is_square()) {
        throw Error(ErrorCategory::dimension, "unitary_error: matrix is not square");
    }
    return matmul(w, dagger(w)) - CMatrix::identity(w.rows());
}

}  // namespace

double unitary_error(const CMatrix &w) { return frobenius_norm_sq(gram_defect(w)); }

double unitary_error_spectral(const CMatrix &w) { return spectral_norm_sq(gram_defect(w)); }

CircuitSpec benchmark_circuit_5q() {
    CircuitSpec c;
    c.n_qubits = 5;
    c.gates = {
        {Gate::H, {}, {0}},       {Gate::CNOT, {}, {0, 1}}, {Gate::CNOT, {}, {1, 2}}, {Gate::CNOT, {}, {2, 3}},
        {Gate::CNOT, {}, {3, 4}}, {Gate::T, {}, {2}},       {Gate::H, {}, {4}},
    };
    return c;
}

CircuitSpec bell_circuit() {
    CircuitSpec c;
    c.n_qubits = 2;
    c.gates = {{Gate::H, {}, {0}}, {Gate::CNOT, {}, {0, 1}}};
    return c;
}

json circuit_to_json(const CircuitSpec &c) {
    json gates = json::array();
    for (const auto &g : c.gates) {
        gates.push_back({{"gate", gate_name(g.gate)}, {"params", g.params}, {"targets", g.targets}});
    }
    return json{{"n_qubits", c.n_qubits}, {"gates", std::move(gates)}};
}

CircuitSpec circuit_from_json(const json &doc) {
    CircuitSpec c;
    try {
        c.n_qubits = doc.at("n_qubits").get<int>();
        for (const json &entry : doc.at("gates")) {
            GateApp g;
            const auto name = entry.at("gate").get<std::string>();
            auto parsed = parse_gate(name);
            if (!parsed) {
                config_error("unknown gate '" + name + "'");
            }
            g.gate = *parsed;
            if (entry.contains("params")) {
                g.params = entry.at("params").get<std::vector<double>>();
            }
            g.targets = entry.at("targets").get<std::vector<int>>();
            c.gates.push_back(std::move(g));
        }
    } catch (const json::exception &e) {
        config_error(std::string("circuit document: ") + e.what());
    }
    validate(c);
    return c;
}

CircuitSpec read_circuit_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCategory::io, "cannot open circuit file " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        config_error(path.string() + ": " + e.what());
    }
    return circuit_from_json(doc);
}

}  // namespace cayley
