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
#include "qlink/kernels.hpp"
#include "qlink/pauli.hpp"
#include "qlink/qureg.hpp"

#include <complex>
#include <vector>

namespace qlink {

namespace detail {

inline void checkPauliRange(const PauliSum &h, int numQubits) {
    for (const auto &t : h.terms) {
        for (const auto &f : t.string) {
            if (f.qubit < 0 || f.qubit >= numQubits) {
                throw Error(ErrorCode::QubitIndexOutOfRange, "Pauli on qubit " + std::to_string(f.qubit) +
                                                                 " outside [0, " + std::to_string(numQubits) + ")");
            }
        }
    }
}

inline kernels::PauliMasks termMasks(const PauliString &s, int shift = 0) {
    std::vector<int> qubits;
    std::vector<PauliAxis> axes;
    for (const auto &f : s) {
        qubits.push_back(f.qubit);
        axes.push_back(f.axis);
    }
    return kernels::pauliMasks(qubits, axes, shift);
}

inline void requireStateVector(const Qureg &q, const char *what) {
    if (q.isDensity()) {
        throw Error(ErrorCode::Unsupported, std::string(what) + " needs state-vector registers");
    }
}

} // namespace detail

/// <a|b> summed in index order.
inline Complex innerProduct(const Qureg &a, const Qureg &b) {
    detail::requireStateVector(a, "inner product");
    detail::requireStateVector(b, "inner product");
    if (a.numQubits() != b.numQubits()) {
        throw Error(ErrorCode::DimensionMismatch, "registers differ in qubit count");
    }
    Complex acc = 0.0;
    const auto x = a.amps();
    const auto y = b.amps();
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

/// <psi|H|psi> or Tr(H rho), accumulated term by term through `workspace`,
/// which is overwritten.
inline double calcExpecPauliSum(const Qureg &q, const PauliSum &h, Qureg &workspace) {
    if (!q.sameShape(workspace)) {
        throw Error(ErrorCode::DimensionMismatch, "workspace must match the register's size and kind");
    }
    if (&q == &workspace) {
        throw Error(ErrorCode::InvalidArgument, "workspace must be a distinct register");
    }
    detail::checkPauliRange(h, q.numQubits());
    const int n = q.numQubits();
    Complex total = 0.0;
    for (const auto &term : h.terms) {
        workspace.copyFrom(q);
        if (q.isDensity()) {
            kernels::applyPauliString(workspace.amps(), detail::termMasks(term.string, n));
            Complex trace = 0.0;
            for (Index i = 0; i < q.dim(); ++i) trace += workspace.entry(i, i);
            total += term.coeff * trace;
        } else {
            kernels::applyPauliString(workspace.amps(), detail::termMasks(term.string));
            Complex overlap = 0.0;
            const auto x = q.amps();
            const auto y = workspace.amps();
            for (std::size_t i = 0; i < x.size(); ++i) overlap += std::conj(x[i]) * y[i];
            total += term.coeff * overlap;
        }
    }
    return total.real();
}

/// out = H in (not normalised).
inline void applyPauliSum(const Qureg &in, const PauliSum &h, Qureg &out) {
    detail::requireStateVector(in, "applying a Pauli sum");
    detail::requireStateVector(out, "applying a Pauli sum");
    if (in.numQubits() != out.numQubits()) {
        throw Error(ErrorCode::DimensionMismatch, "registers differ in qubit count");
    }
    if (&in == &out) {
        throw Error(ErrorCode::InvalidArgument, "input and output must be distinct registers");
    }
    detail::checkPauliRange(h, in.numQubits());
    auto dst = out.amps();
    std::fill(dst.begin(), dst.end(), Complex{});
    for (const auto &term : h.terms) {
        kernels::accumulatePauliString(in.amps(), dst, detail::termMasks(term.string), term.coeff);
    }
}

/// |<a|b>|^2 for two pure states, <psi|rho|psi> when one is a density matrix.
inline double calcFidelity(const Qureg &a, const Qureg &b) {
    if (a.numQubits() != b.numQubits()) {
        throw Error(ErrorCode::DimensionMismatch, "registers differ in qubit count");
    }
    if (a.isDensity() && b.isDensity()) {
        throw Error(ErrorCode::Unsupported, "fidelity between two density matrices is not supported");
    }
    if (!a.isDensity() && !b.isDensity()) {
        return std::norm(innerProduct(a, b));
    }
    const Qureg &psi = a.isDensity() ? b : a;
    const Qureg &rho = a.isDensity() ? a : b;
    const auto v = psi.amps();
    Complex acc = 0.0;
    for (Index r = 0; r < psi.dim(); ++r) {
        Complex row = 0.0;
        for (Index c = 0; c < psi.dim(); ++c) row += rho.entry(r, c) * v[static_cast<std::size_t>(c)];
        acc += std::conj(v[static_cast<std::size_t>(r)]) * row;
    }
    return acc.real();
}

} // namespace qlink
