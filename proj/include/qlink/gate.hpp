// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace qlink {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Gate opcodes. Values are wire-visible.
enum class Opcode : std::int32_t {
    X = 0,
    Y = 1,
    Z = 2,
    H = 3,
    S = 4,
    T = 5,
    SWAP = 6,
    Rx = 7,
    Ry = 8,
    Rz = 9,
    R = 10,
    Ph = 11,
    U = 12,
    M = 13,
    Depol = 14,
    Deph = 15,
    Damp = 16,
    Kraus = 17,
};

inline constexpr int kNumOpcodes = 18;

enum class PauliAxis : std::int32_t { X = 1, Y = 2, Z = 3 };

inline std::string_view opcodeName(Opcode op) {
    switch (op) {
    case Opcode::X: return "X";
    case Opcode::Y: return "Y";
    case Opcode::Z: return "Z";
    case Opcode::H: return "H";
    case Opcode::S: return "S";
    case Opcode::T: return "T";
    case Opcode::SWAP: return "SWAP";
    case Opcode::Rx: return "Rx";
    case Opcode::Ry: return "Ry";
    case Opcode::Rz: return "Rz";
    case Opcode::R: return "R";
    case Opcode::Ph: return "Ph";
    case Opcode::U: return "U";
    case Opcode::M: return "M";
    case Opcode::Depol: return "Depol";
    case Opcode::Deph: return "Deph";
    case Opcode::Damp: return "Damp";
    case Opcode::Kraus: return "Kraus";
    }
    return "?";
}

inline std::optional<Opcode> opcodeFromName(std::string_view name) {
    for (int i = 0; i < kNumOpcodes; ++i) {
        const auto op = static_cast<Opcode>(i);
        if (opcodeName(op) == name) {
            return op;
        }
    }
    return std::nullopt;
}

inline char pauliChar(PauliAxis axis) {
    switch (axis) {
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
    }
    return '?';
}

inline std::optional<PauliAxis> pauliFromChar(char c) {
    switch (c) {
    case 'X': return PauliAxis::X;
    case 'Y': return PauliAxis::Y;
    case 'Z': return PauliAxis::Z;
    default: return std::nullopt;
    }
}

/// Decoherence channels. M is not a channel: it is valid on state vectors.
inline bool isChannel(Opcode op) {
    return op == Opcode::Depol || op == Opcode::Deph || op == Opcode::Damp || op == Opcode::Kraus;
}

inline bool isUnitary(Opcode op) { return !isChannel(op) && op != Opcode::M; }

/// Opcodes whose single parameter is a rotation angle.
inline bool hasAngle(Opcode op) {
    return op == Opcode::Rx || op == Opcode::Ry || op == Opcode::Rz || op == Opcode::R ||
           op == Opcode::Ph;
}

struct PauliFactor {
    PauliAxis axis = PauliAxis::Z;
    int qubit = 0;

    friend bool operator==(const PauliFactor &, const PauliFactor &) = default;
};

/// Tensor product of Pauli operators on distinct qubits. An empty string is
/// the identity.
using PauliString = std::vector<PauliFactor>;

/// Exact (bitwise on the doubles) matrix equality, tolerant of shape mismatch.
inline bool sameMatrix(const CMatrix &a, const CMatrix &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::equal(a.data(), a.data() + a.size(), b.data());
}

/// One circuit operation.
///
/// Multi-target matrices (U, Kraus, R) use `targets[0]` as the least
/// significant bit of their local index. `paulis` is only populated for R and
/// is parallel to `targets`.
struct Gate {
    Opcode op = Opcode::X;
    std::vector<int> controls;
    std::vector<int> targets;
    std::vector<double> params;
    std::vector<PauliAxis> paulis;
    CMatrix matrix;
    std::vector<CMatrix> kraus;

    friend bool operator==(const Gate &a, const Gate &b) {
        if (a.op != b.op || a.controls != b.controls || a.targets != b.targets ||
            a.params != b.params || a.paulis != b.paulis || !sameMatrix(a.matrix, b.matrix) ||
            a.kraus.size() != b.kraus.size()) {
            return false;
        }
        for (std::size_t i = 0; i < a.kraus.size(); ++i) {
            if (!sameMatrix(a.kraus[i], b.kraus[i])) {
                return false;
            }
        }
        return true;
    }

    /// All qubits touched by the gate, controls first.
    [[nodiscard]] std::vector<int> qubits() const {
        std::vector<int> out(controls);
        out.insert(out.end(), targets.begin(), targets.end());
        return out;
    }
};

/// An ordered gate list. `declaredQubits` is optional; when absent the width
/// is one past the largest index used.
struct Circuit {
    std::vector<Gate> gates;
    std::optional<int> declaredQubits;

    friend bool operator==(const Circuit &, const Circuit &) = default;

    [[nodiscard]] int numQubits() const {
        if (declaredQubits) {
            return *declaredQubits;
        }
        int width = 0;
        for (const auto &g : gates) {
            for (int q : g.controls) width = std::max(width, q + 1);
            for (int q : g.targets) width = std::max(width, q + 1);
        }
        return width;
    }

    [[nodiscard]] bool isUnitaryOnly() const {
        return std::all_of(gates.begin(), gates.end(), [](const Gate &g) { return isUnitary(g.op); });
    }

    [[nodiscard]] std::size_t size() const noexcept { return gates.size(); }

    Circuit &append(Gate g) {
        gates.push_back(std::move(g));
        return *this;
    }

    Circuit &append(const Circuit &other) {
        gates.insert(gates.end(), other.gates.begin(), other.gates.end());
        return *this;
    }
};

namespace gates {

inline Gate simple(Opcode op, std::vector<int> targets, std::vector<double> params = {}) {
    Gate g;
    g.op = op;
    g.targets = std::move(targets);
    g.params = std::move(params);
    return g;
}

inline Gate x(int q) { return simple(Opcode::X, {q}); }
inline Gate y(int q) { return simple(Opcode::Y, {q}); }
inline Gate z(int q) { return simple(Opcode::Z, {q}); }
inline Gate h(int q) { return simple(Opcode::H, {q}); }
inline Gate s(int q) { return simple(Opcode::S, {q}); }
inline Gate t(int q) { return simple(Opcode::T, {q}); }
inline Gate swap(int a, int b) { return simple(Opcode::SWAP, {a, b}); }
inline Gate rx(int q, double theta) { return simple(Opcode::Rx, {q}, {theta}); }
inline Gate ry(int q, double theta) { return simple(Opcode::Ry, {q}, {theta}); }
inline Gate rz(int q, double theta) { return simple(Opcode::Rz, {q}, {theta}); }
inline Gate ph(int q, double theta) { return simple(Opcode::Ph, {q}, {theta}); }
inline Gate measure(int q) { return simple(Opcode::M, {q}); }
inline Gate depol(std::vector<int> targets, double p) { return simple(Opcode::Depol, std::move(targets), {p}); }
inline Gate deph(std::vector<int> targets, double p) { return simple(Opcode::Deph, std::move(targets), {p}); }
inline Gate damp(int q, double p) { return simple(Opcode::Damp, {q}, {p}); }

/// exp(-i theta P / 2) for the Pauli string P.
inline Gate pauliRotation(double theta, const PauliString &string) {
    Gate g;
    g.op = Opcode::R;
    g.params = {theta};
    for (const auto &f : string) {
        g.targets.push_back(f.qubit);
        g.paulis.push_back(f.axis);
    }
    return g;
}

inline Gate unitary(std::vector<int> targets, CMatrix m) {
    Gate g;
    g.op = Opcode::U;
    g.targets = std::move(targets);
    g.matrix = std::move(m);
    return g;
}

inline Gate krausMap(std::vector<int> targets, std::vector<CMatrix> ops) {
    Gate g;
    g.op = Opcode::Kraus;
    g.targets = std::move(targets);
    g.kraus = std::move(ops);
    return g;
}

inline Gate controlled(std::vector<int> controls, Gate g) {
    g.controls.insert(g.controls.begin(), controls.begin(), controls.end());
    return g;
}

} // namespace gates

} // namespace qlink
