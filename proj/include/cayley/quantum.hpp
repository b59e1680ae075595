#pragma once

// Target unitaries from gate circuits, random states and the fidelity metric.
//
// Qubit ordering is big-endian: qubit 0 is the most significant bit of a basis
// index, so |q0 q1 ... q_{n-1}> sits at index sum_k q_k * 2^(n-1-k). For a
// two-qubit gate the first target (the control for CNOT/CZ) is the more
// significant bit of the gate's 4x4 matrix.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cayley/linalg.hpp"

namespace cayley {

inline constexpr int kMaxQubits = 12;

enum class Gate { H, X, Y, Z, S, T, RX, RY, RZ, CNOT, CZ };

std::string_view gate_name(Gate gate) noexcept;
std::optional<Gate> parse_gate(std::string_view name) noexcept;
int gate_arity(Gate gate) noexcept;
bool gate_is_rotation(Gate gate) noexcept;

struct GateApp {
    Gate gate = Gate::H;
    std::vector<double> params;
    std::vector<int> targets;

    friend bool operator==(const GateApp &, const GateApp &) = default;
};

struct CircuitSpec {
    int n_qubits = 1;
    std::vector<GateApp> gates;

    friend bool operator==(const CircuitSpec &, const CircuitSpec &) = default;
};

/// Throws Error(config) describing the first violated invariant.
void validate(const GateApp &g, int n_qubits);
void validate(const CircuitSpec &c);

struct StatePair {
    CVector input;
    CVector output;
};

/// 2x2 or 4x4 unitary of a single gate application.
CMatrix gate_matrix(const GateApp &g);

/// Left-multiplies `u` (2^n rows) in place by the embedded gate.
void apply_gate(CMatrix &u, const GateApp &g, int n_qubits);

/// U = U_K ... U_2 U_1 for gates listed in application order.
CMatrix circuit_to_unitary(const CircuitSpec &c);

/// Unit-norm complex Gaussian state on n qubits.
CVector random_state(int n_qubits, std::uint64_t seed);

/// |tr(u_true† u_learned)| / d
double fidelity(const CMatrix &u_true, const CMatrix &u_learned);

/// ||w w† - I||_F^2
double unitary_error(const CMatrix &w);

/// ||w w† - I||_2^2 (spectral); reported alongside the Frobenius value.
double unitary_error_spectral(const CMatrix &w);

/// H q0; CNOT(q0,q1); CNOT(q1,q2); CNOT(q2,q3); CNOT(q3,q4); T q2; H q4.
CircuitSpec benchmark_circuit_5q();
/// H q0; CNOT(q0,q1).
CircuitSpec bell_circuit();

// CircuitSpec documents: {"n_qubits": n, "gates": [{"gate": "H", "params": [], "targets": [0]}, ...]}
nlohmann::json circuit_to_json(const CircuitSpec &c);
CircuitSpec circuit_from_json(const nlohmann::json &doc);
CircuitSpec read_circuit_file(const std::filesystem::path &path);

}  // namespace cayley
