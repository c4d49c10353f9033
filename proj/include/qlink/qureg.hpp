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

#include "qlink/circuit_matrix.hpp"
#include "qlink/error.hpp"
#include "qlink/gate.hpp"
#include "qlink/kernels.hpp"
#include "qlink/random.hpp"
#include "qlink/validation.hpp"

#include <cmath>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace qlink {

inline constexpr int kMaxStateVectorQubits = 30;
inline constexpr int kMaxDensityQubits = 15;

/// A simulated register: a 2^n state vector or a row-major 2^n x 2^n
/// density matrix. Gate methods assume the gate was already validated.
class Qureg {
  public:
    Qureg(int numQubits, bool isDensity) : numQubits_(numQubits), isDensity_(isDensity) {
        if (numQubits < 1) {
            throw Error(ErrorCode::InvalidQubitCount, "a register needs at least one qubit");
        }
        const int cap = isDensity ? kMaxDensityQubits : kMaxStateVectorQubits;
        if (numQubits > cap) {
            throw Error(ErrorCode::ResourceExhausted, std::to_string(numQubits) + " qubits exceeds the " +
                                                          (isDensity ? "density-matrix" : "state-vector") +
                                                          " limit of " + std::to_string(cap));
        }
        try {
            amps_.assign(static_cast<std::size_t>(Index{1} << (isDensity ? 2 * numQubits : numQubits)), Complex{});
        } catch (const std::bad_alloc &) {
            throw Error(ErrorCode::ResourceExhausted, "cannot allocate " + std::to_string(numQubits) + " qubits");
        }
        amps_[0] = 1.0;
    }

    [[nodiscard]] int numQubits() const noexcept { return numQubits_; }
    [[nodiscard]] bool isDensity() const noexcept { return isDensity_; }
    /// 2^n: the Hilbert-space dimension.
    [[nodiscard]] Index dim() const noexcept { return Index{1} << numQubits_; }
    [[nodiscard]] std::span<Complex> amps() noexcept { return amps_; }
    [[nodiscard]] std::span<const Complex> amps() const noexcept { return amps_; }
    [[nodiscard]] const std::vector<Complex> &data() const noexcept { return amps_; }

    /// Density-matrix entry (row, col).
    [[nodiscard]] Complex entry(Index row, Index col) const { return amps_[static_cast<std::size_t>(row * dim() + col)]; }

    [[nodiscard]] bool sameShape(const Qureg &other) const noexcept {
        return numQubits_ == other.numQubits_ && isDensity_ == other.isDensity_;
    }

    void copyFrom(const Qureg &other) {
        if (!sameShape(other)) {
            throw Error(ErrorCode::DimensionMismatch, "registers differ in size or kind");
        }
        amps_ = other.amps_;
    }

    void initZero() { initClassical(0); }

    void initPlus() {
        const double v = isDensity_ ? 1.0 / static_cast<double>(dim()) : 1.0 / std::sqrt(static_cast<double>(dim()));
        std::fill(amps_.begin(), amps_.end(), Complex(v, 0.0));
    }

    void initClassical(Index index) {
        if (index < 0 || index >= dim()) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "basis index " + std::to_string(index) + " outside [0, " + std::to_string(dim()) + ")");
        }
        std::fill(amps_.begin(), amps_.end(), Complex{});
        amps_[static_cast<std::size_t>(isDensity_ ? index * dim() + index : index)] = 1.0;
    }

    /// Installs |psi> (or |psi><psi|); psi must be normalised within 1e-8.
    void initPureState(std::span<const Complex> psi) {
        if (static_cast<Index>(psi.size()) != dim()) {
            throw Error(ErrorCode::DimensionMismatch,
                        "expected " + std::to_string(dim()) + " amplitudes, got " + std::to_string(psi.size()));
        }
        double norm = 0.0;
        for (const auto &a : psi) norm += std::norm(a);
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
            throw Error(ErrorCode::UnnormalizedState, "state has squared norm " + std::to_string(norm));
        }
        installPure(psi);
    }

    /// Haar-uniform pure state: iid complex Gaussians, normalised.
    void initRandomPure(std::uint64_t seed) {
        CounterRng rng(seed);
        std::vector<Complex> psi(static_cast<std::size_t>(dim()));
        double norm = 0.0;
        for (auto &a : psi) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            a = {re, im};
            norm += std::norm(a);
        }
        const double scale = 1.0 / std::sqrt(norm);
        for (auto &a : psi) a *= scale;
        installPure(psi);
    }

    /// Overwrites the amplitudes. Density input must be Hermitian, unit
    /// trace and positive semidefinite.
    void setMatrix(std::span<const Complex> values) {
        if (values.size() != amps_.size()) {
            throw Error(ErrorCode::DimensionMismatch,
                        "expected " + std::to_string(amps_.size()) + " entries, got " + std::to_string(values.size()));
        }
        for (const auto &v : values) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw Error(ErrorCode::InvalidArgument, "non-finite amplitude");
            }
        }
        if (isDensity_) {
            checkPhysicalDensity(values);
        }
        amps_.assign(values.begin(), values.end());
    }

    // ---- gates ----------------------------------------------------------

    void applyUnitary(const Gate &g) {
        if (!isDensity_) {
            applyUnitaryOnVector(g, 0, false);
            return;
        }
        // G rho acts on the row bits; rho G^dagger is conj(G) on the column bits
        applyUnitaryOnVector(g, numQubits_, false);
        applyUnitaryOnVector(g, 0, true);
    }

    void applyChannel(const Gate &g) {
        const auto &t = g.targets;
        switch (g.op) {
        case Opcode::Depol:
            if (t.size() == 1) kernels::mixDepolarising(amps_, numQubits_, t[0], g.params[0]);
            else kernels::mixTwoQubitDepolarising(amps_, numQubits_, t[0], t[1], g.params[0]);
            break;
        case Opcode::Deph:
            if (t.size() == 1) kernels::mixDephasing(amps_, numQubits_, t[0], g.params[0]);
            else kernels::mixTwoQubitDephasing(amps_, numQubits_, t[0], t[1], g.params[0]);
            break;
        case Opcode::Damp: kernels::mixDamping(amps_, numQubits_, t[0], g.params[0]); break;
        case Opcode::Kraus: kernels::applyKrausMap(amps_, numQubits_, t, g.kraus); break;
        default: throw Error(ErrorCode::Unsupported, std::string(opcodeName(g.op)) + " is not a channel");
        }
    }

    /// Left-multiplies by an arbitrary (possibly non-unitary) operator on the
    /// targets, zeroing the subspace where the controls are not all set.
    /// State vectors only.
    void applyOperator(std::span<const int> controls, std::span<const int> targets, const CMatrix &m) {
        const Index ctrl = kernels::maskOf(controls);
        kernels::applyMatrix(amps_, targets, m, ctrl);
        if (ctrl != 0) kernels::projectOntoControls(amps_, ctrl);
    }

    void scale(Complex factor) {
        for (auto &a : amps_) a *= factor;
    }

    /// Probability that `qubit` reads 1.
    [[nodiscard]] double probabilityOfOne(int qubit) const {
        const Index b = kernels::bit(qubit);
        double p = 0.0;
        for (Index i = 0; i < dim(); ++i) {
            if (!(i & b)) continue;
            p += isDensity_ ? entry(i, i).real() : std::norm(amps_[static_cast<std::size_t>(i)]);
        }
        return p;
    }

    /// Squared norm (state vector) or real trace (density matrix).
    [[nodiscard]] double totalProbability() const {
        double p = 0.0;
        for (Index i = 0; i < dim(); ++i)
            p += isDensity_ ? entry(i, i).real() : std::norm(amps_[static_cast<std::size_t>(i)]);
        return p;
    }

    /// Born-rule sample of `qubit`, then collapse and renormalise.
    int measure(int qubit, CounterRng &rng) {
        const double p1 = probabilityOfOne(qubit);
        const double total = totalProbability();
        const int outcome = rng.uniform() * total < p1 ? 1 : 0;
        collapse(qubit, outcome, outcome ? p1 : total - p1);
        return outcome;
    }

    void collapse(int qubit, int outcome, double probability) {
        const Index b = kernels::bit(qubit);
        const Index want = outcome ? b : 0;
        if (isDensity_) {
            const double s = 1.0 / probability;
            for (Index r = 0; r < dim(); ++r)
                for (Index c = 0; c < dim(); ++c) {
                    auto &z = amps_[static_cast<std::size_t>(r * dim() + c)];
                    z = ((r & b) == want && (c & b) == want) ? z * s : Complex{};
                }
        } else {
            const double s = 1.0 / std::sqrt(probability);
            for (Index i = 0; i < dim(); ++i) {
                auto &z = amps_[static_cast<std::size_t>(i)];
                z = (i & b) == want ? z * s : Complex{};
            }
        }
    }

  private:
    void installPure(std::span<const Complex> psi) {
        if (!isDensity_) {
            amps_.assign(psi.begin(), psi.end());
            return;
        }
        const Index d = dim();
        for (Index r = 0; r < d; ++r)
            for (Index c = 0; c < d; ++c)
                amps_[static_cast<std::size_t>(r * d + c)] =
                    psi[static_cast<std::size_t>(r)] * std::conj(psi[static_cast<std::size_t>(c)]);
    }

    void checkPhysicalDensity(std::span<const Complex> values) const {
        const Index d = dim();
        CMatrix rho(d, d);
        for (Index r = 0; r < d; ++r)
            for (Index c = 0; c < d; ++c) rho(r, c) = values[static_cast<std::size_t>(r * d + c)];
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kDensityTolerance) {
            throw Error(ErrorCode::UnphysicalDensityMatrix, "density matrix is not Hermitian");
        }
        const Complex trace = rho.trace();
        if (std::abs(trace - Complex(1.0, 0.0)) > kDensityTolerance) {
            throw Error(ErrorCode::UnphysicalDensityMatrix, "density matrix trace is " + std::to_string(trace.real()));
        }
        const CMatrix herm = (rho + rho.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw Error(ErrorCode::UnphysicalDensityMatrix, "eigenvalue computation failed");
        }
        if (solver.eigenvalues().minCoeff() < -kDensityTolerance) {
            throw Error(ErrorCode::UnphysicalDensityMatrix, "density matrix has a negative eigenvalue");
        }
    }

    /// Applies G (or conj(G)) treating the flat array as a vector over
    /// qubits shifted by `shift`.
    void applyUnitaryOnVector(const Gate &g, int shift, bool conjugate) {
        const Index ctrl = kernels::maskOf(g.controls, shift);
        std::vector<int> targets(g.targets);
        for (auto &t : targets) t += shift;
        switch (g.op) {
        case Opcode::SWAP: kernels::applySwap(amps_, targets[0], targets[1], ctrl); return;
        case Opcode::R: {
            const auto pm = kernels::pauliMasks(targets, g.paulis);
            double theta = g.params[0];
            // conj(exp(-i t P/2)) = exp(-i t' P/2) with t' = -t unless P has an odd number of Y
            if (conjugate && pm.numY % 2 == 0) theta = -theta;
            kernels::applyPauliRotation(amps_, pm, theta, ctrl);
            return;
        }
        default: kernels::applyMatrix(amps_, targets, gateMatrix(g), ctrl, conjugate); return;
        }
    }

    int numQubits_;
    bool isDensity_;
    std::vector<Complex> amps_;
};

} // namespace qlink
