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
#include "qlink/validation.hpp"

#include <cmath>
#include <numbers>

namespace qlink {

/// Largest register for which dense 2^n x 2^n matrices are built.
inline constexpr int kDenseQubitCap = 12;

inline CMatrix pauliMatrix(PauliAxis axis) {
    CMatrix m(2, 2);
    const Complex i(0.0, 1.0);
    switch (axis) {
    case PauliAxis::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case PauliAxis::Y: m << 0.0, -i, i, 0.0; break;
    case PauliAxis::Z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return m;
}

/// Kronecker product with `a` acting on the more significant bits.
inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

/// Matrix of a unitary gate on its own targets (without controls). Local bit
/// j of the returned matrix corresponds to `targets[j]`.
inline CMatrix gateMatrix(const Gate &g) {
    const Complex i(0.0, 1.0);
    const double theta = g.params.empty() ? 0.0 : g.params[0];
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    CMatrix m(2, 2);
    switch (g.op) {
    case Opcode::X: return pauliMatrix(PauliAxis::X);
    case Opcode::Y: return pauliMatrix(PauliAxis::Y);
    case Opcode::Z: return pauliMatrix(PauliAxis::Z);
    case Opcode::H: m << 1.0, 1.0, 1.0, -1.0; return m / std::numbers::sqrt2;
    case Opcode::S: m << 1.0, 0.0, 0.0, i; return m;
    case Opcode::T: m << 1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4.0); return m;
    case Opcode::SWAP: {
        CMatrix sw = CMatrix::Zero(4, 4);
        sw(0, 0) = sw(3, 3) = sw(1, 2) = sw(2, 1) = 1.0;
        return sw;
    }
    case Opcode::Rx: m << c, -i * s, -i * s, c; return m;
    case Opcode::Ry: m << c, -s, s, c; return m;
    case Opcode::Rz: m << std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0); return m;
    case Opcode::Ph: m << 1.0, 0.0, 0.0, std::polar(1.0, theta); return m;
    case Opcode::R: {
        CMatrix p = CMatrix::Identity(1, 1);
        for (auto axis : g.paulis) {
            p = kron(pauliMatrix(axis), p);
        }
        return c * CMatrix::Identity(p.rows(), p.cols()) - i * s * p;
    }
    case Opcode::U: return g.matrix;
    default: throw Error(ErrorCode::Unsupported, std::string(opcodeName(g.op)) + " has no unitary matrix");
    }
}

/// Left-multiplies `full` (rows indexed by basis states of an n-qubit
/// register) by the embedding of `g`, acting only where all controls are 1.
inline void leftMultiplyEmbedded(CMatrix &full, const Gate &g) {
    const CMatrix local = gateMatrix(g);
    const auto dim = full.rows();
    const int k = static_cast<int>(g.targets.size());
    const Eigen::Index localDim = Eigen::Index{1} << k;

    Eigen::Index ctrlMask = 0;
    for (int q : g.controls) ctrlMask |= Eigen::Index{1} << q;
    Eigen::Index targMask = 0;
    for (int q : g.targets) targMask |= Eigen::Index{1} << q;

    auto compose = [&](Eigen::Index base, Eigen::Index localIndex) {
        Eigen::Index idx = base;
        for (int j = 0; j < k; ++j) {
            if ((localIndex >> j) & 1) idx |= Eigen::Index{1} << g.targets[j];
        }
        return idx;
    };

    CMatrix out = full;
    for (Eigen::Index base = 0; base < dim; ++base) {
        if ((base & targMask) != 0 || (base & ctrlMask) != ctrlMask) {
            continue;
        }
        for (Eigen::Index r = 0; r < localDim; ++r) {
            const Eigen::Index row = compose(base, r);
            out.row(row).setZero();
            for (Eigen::Index c = 0; c < localDim; ++c) {
                if (local(r, c) != Complex(0.0, 0.0)) {
                    out.row(row) += local(r, c) * full.row(compose(base, c));
                }
            }
        }
    }
    full = std::move(out);
}

/// Dense unitary of a unitary-only circuit: the last gate is leftmost.
inline CMatrix circuitMatrix(const Circuit &c, int numQubits) {
    if (numQubits < 1 || numQubits > kDenseQubitCap) {
        throw Error(ErrorCode::ResourceExhausted,
                    "dense matrices are limited to 1.." + std::to_string(kDenseQubitCap) + " qubits");
    }
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto &g = c.gates[i];
        if (!isUnitary(g.op)) {
            throw Error(ErrorCode::Unsupported, "circuit matrix needs a unitary-only circuit",
                        static_cast<std::int64_t>(i));
        }
        if (auto err = validateGate(g, numQubits, static_cast<std::int64_t>(i))) {
            throw Error(*err);
        }
    }
    const Eigen::Index dim = Eigen::Index{1} << numQubits;
    CMatrix u = CMatrix::Identity(dim, dim);
    for (const auto &g : c.gates) {
        leftMultiplyEmbedded(u, g);
    }
    return u;
}

} // namespace qlink
