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

#include "qlink/error.hpp"
#include "qlink/gate.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace qlink {

inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kCptpTolerance = 1e-10;
inline constexpr double kNormTolerance = 1e-8;
inline constexpr double kDensityTolerance = 1e-8;

/// Upper bounds of the channel parameters, each at the maximally mixing point.
inline constexpr double kMaxDepolarising = 3.0 / 4.0;
inline constexpr double kMaxTwoQubitDepolarising = 15.0 / 16.0;
inline constexpr double kMaxDephasing = 1.0 / 2.0;
inline constexpr double kMaxTwoQubitDephasing = 3.0 / 4.0;
inline constexpr double kMaxDamping = 1.0;

namespace detail {

inline double maxAbsDeviationFromIdentity(const CMatrix &m) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const Complex expected = (r == c) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
            worst = std::max(worst, std::abs(m(r, c) - expected));
        }
    }
    return worst;
}

inline bool hasDuplicates(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

struct Arity {
    int minTargets;
    int maxTargets;
    int params;
    bool controllable;
};

inline Arity arityOf(Opcode op) {
    switch (op) {
    case Opcode::X:
    case Opcode::Y:
    case Opcode::Z:
    case Opcode::H:
    case Opcode::S:
    case Opcode::T: return {1, 1, 0, true};
    case Opcode::SWAP: return {2, 2, 0, true};
    case Opcode::Rx:
    case Opcode::Ry:
    case Opcode::Rz:
    case Opcode::Ph: return {1, 1, 1, true};
    case Opcode::R: return {1, 64, 1, true};
    case Opcode::U: return {1, 64, 0, true};
    case Opcode::M: return {1, 1, 0, false};
    case Opcode::Depol:
    case Opcode::Deph: return {1, 2, 1, false};
    case Opcode::Damp: return {1, 1, 1, false};
    case Opcode::Kraus: return {1, 64, 0, false};
    }
    return {0, 0, 0, false};
}

inline double maxProbability(const Gate &g) {
    const bool two = g.targets.size() == 2;
    switch (g.op) {
    case Opcode::Depol: return two ? kMaxTwoQubitDepolarising : kMaxDepolarising;
    case Opcode::Deph: return two ? kMaxTwoQubitDephasing : kMaxDephasing;
    case Opcode::Damp: return kMaxDamping;
    default: return 0.0;
    }
}

} // namespace detail

/// Static checks of one gate against a register width. Returns the first
/// problem found, if any.
inline std::optional<ValidationError> validateGate(const Gate &g, int numQubits, std::int64_t gateIndex = -1) {
    auto fail = [&](ErrorCode code, std::string msg) {
        return std::optional<ValidationError>(
            ValidationError{code, std::string(opcodeName(g.op)) + ": " + std::move(msg), gateIndex});
    };

    const int op = static_cast<int>(g.op);
    if (op < 0 || op >= kNumOpcodes) {
        return fail(ErrorCode::InvalidArgument, "unknown opcode " + std::to_string(op));
    }

    const auto arity = detail::arityOf(g.op);
    const int nt = static_cast<int>(g.targets.size());
    if (nt < arity.minTargets || nt > arity.maxTargets) {
        return fail(ErrorCode::InvalidArity, "takes " + std::to_string(arity.minTargets) +
                                                 (arity.maxTargets != arity.minTargets ? "+" : "") +
                                                 " target(s), got " + std::to_string(nt));
    }
    if (static_cast<int>(g.params.size()) != arity.params) {
        return fail(ErrorCode::InvalidArity, "takes " + std::to_string(arity.params) +
                                                 " parameter(s), got " + std::to_string(g.params.size()));
    }
    if (!arity.controllable && !g.controls.empty()) {
        return fail(ErrorCode::InvalidArity, "cannot be controlled");
    }
    if (g.op == Opcode::R ? g.paulis.size() != g.targets.size() : !g.paulis.empty()) {
        return fail(ErrorCode::InvalidArity, "needs exactly one Pauli axis per target");
    }
    if ((g.op == Opcode::U) != (g.matrix.size() != 0)) {
        return fail(ErrorCode::InvalidArity, g.op == Opcode::U ? "missing matrix" : "unexpected matrix");
    }
    if ((g.op == Opcode::Kraus) != !g.kraus.empty()) {
        return fail(ErrorCode::InvalidArity, g.op == Opcode::Kraus ? "missing Kraus operators" : "unexpected Kraus operators");
    }
    for (double p : g.params) {
        if (!std::isfinite(p)) {
            return fail(ErrorCode::InvalidArgument, "non-finite parameter");
        }
    }

    for (int q : g.qubits()) {
        if (q < 0 || q >= numQubits) {
            return fail(ErrorCode::QubitIndexOutOfRange,
                        "qubit " + std::to_string(q) + " outside [0, " + std::to_string(numQubits) + ")");
        }
    }
    if (detail::hasDuplicates(g.qubits())) {
        return fail(ErrorCode::DuplicateQubit, "control and target qubits must be unique");
    }

    const Eigen::Index dim = Eigen::Index{1} << nt;
    if (g.op == Opcode::U) {
        if (g.matrix.rows() != dim || g.matrix.cols() != dim) {
            return fail(ErrorCode::DimensionMismatch, "matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
        }
        if (!g.matrix.allFinite()) {
            return fail(ErrorCode::InvalidArgument, "non-finite matrix entry");
        }
        const CMatrix product = g.matrix.adjoint() * g.matrix;
        if (detail::maxAbsDeviationFromIdentity(product) > kUnitarityTolerance) {
            return fail(ErrorCode::NonUnitaryMatrix, "matrix is not unitary");
        }
    }
    if (g.op == Opcode::Kraus) {
        CMatrix sum = CMatrix::Zero(dim, dim);
        for (const auto &k : g.kraus) {
            if (k.rows() != dim || k.cols() != dim) {
                return fail(ErrorCode::DimensionMismatch,
                            "Kraus operators must be " + std::to_string(dim) + "x" + std::to_string(dim));
            }
            if (!k.allFinite()) {
                return fail(ErrorCode::InvalidArgument, "non-finite Kraus entry");
            }
            sum += k.adjoint() * k;
        }
        if (detail::maxAbsDeviationFromIdentity(sum) > kCptpTolerance) {
            return fail(ErrorCode::NonCptpKraus, "Kraus map is not trace preserving");
        }
    }
    if (g.op == Opcode::Depol || g.op == Opcode::Deph || g.op == Opcode::Damp) {
        const double p = g.params[0];
        const double cap = detail::maxProbability(g);
        if (p < 0.0 || p > cap) {
            return fail(ErrorCode::ProbabilityOutOfRange,
                        "probability " + std::to_string(p) + " outside [0, " + std::to_string(cap) + "]");
        }
    }
    return std::nullopt;
}

/// Checks that need to know the register kind.
inline std::optional<ValidationError> validateGateForRegister(const Gate &g, int numQubits, bool isDensity,
                                                              std::int64_t gateIndex = -1) {
    if (auto err = validateGate(g, numQubits, gateIndex)) {
        return err;
    }
    if (!isDensity && isChannel(g.op)) {
        return ValidationError{ErrorCode::ChannelOnStateVector,
                               std::string(opcodeName(g.op)) + ": decoherence requires a density matrix", gateIndex};
    }
    return std::nullopt;
}

/// Every static problem of every gate, in circuit order.
inline std::vector<ValidationError> validateCircuit(const Circuit &c, int numQubits) {
    std::vector<ValidationError> out;
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        if (auto err = validateGate(c.gates[i], numQubits, static_cast<std::int64_t>(i))) {
            out.push_back(std::move(*err));
        }
    }
    return out;
}

} // namespace qlink
