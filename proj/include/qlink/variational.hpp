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

#include "qlink/environment.hpp"
#include "qlink/observables.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qlink {

/// A circuit whose angle parameters may be bound to a shared parameter
/// vector. slots[k] is 0 for a fixed gate, otherwise the 1-based index of
/// the parameter feeding gate k.
struct Ansatz {
    Circuit circuit;
    std::vector<int> slots;
    int numParams = 0;

    [[nodiscard]] int numQubits() const { return circuit.numQubits(); }
};

namespace detail {

inline bool slottable(Opcode op) {
    return op == Opcode::Rx || op == Opcode::Ry || op == Opcode::Rz || op == Opcode::R || op == Opcode::Ph;
}

inline void checkTheta(const Ansatz &a, std::span<const double> theta) {
    if (theta.size() != static_cast<std::size_t>(a.numParams)) {
        throw Error(ErrorCode::DimensionMismatch, "ansatz has " + std::to_string(a.numParams) +
                                                      " parameters but " + std::to_string(theta.size()) +
                                                      " values were given");
    }
    for (double t : theta) {
        if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "non-finite parameter value");
    }
}

inline void applyCircuitRange(Qureg &q, const Circuit &c, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) q.applyUnitary(c.gates[k]);
}

/// Left-multiplies by d/dθ of gate g divided by g itself, i.e. the
/// generator insertion -iG (or i|1><1| for a phase gate), restricted to
/// the control subspace.
inline void insertGenerator(Qureg &q, const Gate &g) {
    const Complex mi(0.0, -1.0);
    if (g.op == Opcode::R) {
        std::vector<PauliAxis> axes;
        axes.reserve(g.paulis.size());
        for (auto a : g.paulis) axes.push_back(a);
        const auto pm = kernels::pauliMasks(g.targets, axes);
        kernels::applyPauliString(q.amps(), pm);
        const Index ctrl = kernels::maskOf(g.controls);
        if (ctrl != 0) kernels::projectOntoControls(q.amps(), ctrl);
        q.scale(0.5 * mi);
        return;
    }
    CMatrix m(2, 2);
    switch (g.op) {
    case Opcode::Rx: m << 0.0, 0.5 * mi, 0.5 * mi, 0.0; break;
    case Opcode::Ry: m << 0.0, -0.5, 0.5, 0.0; break;
    case Opcode::Rz: m << 0.5 * mi, 0.0, 0.0, -0.5 * mi; break;
    case Opcode::Ph: m << 0.0, 0.0, 0.0, Complex(0.0, 1.0); break;
    default: throw Error(ErrorCode::Unsupported, "no generator for " + std::string(opcodeName(g.op)));
    }
    q.applyOperator(g.controls, g.targets, m);
}

inline void requireBase(const Ansatz &a, const Qureg &base) {
    if (base.isDensity()) throw Error(ErrorCode::Unsupported, "ansatz states must be state vectors");
    if (base.numQubits() < a.numQubits()) {
        throw Error(ErrorCode::DimensionMismatch, "base register is narrower than the ansatz");
    }
}

} // namespace detail

/// Checks slot placement and coverage; throws InvalidArgument.
inline void validateAnsatz(const Ansatz &a) {
    if (a.slots.size() != a.circuit.gates.size()) {
        throw Error(ErrorCode::InvalidArgument, "slot list length differs from gate count");
    }
    if (a.numParams < 0) throw Error(ErrorCode::InvalidArgument, "negative parameter count");
    std::vector<bool> seen(static_cast<std::size_t>(a.numParams) + 1, false);
    for (std::size_t k = 0; k < a.slots.size(); ++k) {
        const int s = a.slots[k];
        const auto &g = a.circuit.gates[k];
        if (!isUnitary(g.op) || g.op == Opcode::M) {
            throw Error(ErrorCode::InvalidArgument, "ansatz gates must be unitary", static_cast<std::int64_t>(k));
        }
        if (s == 0) continue;
        if (s < 0 || s > a.numParams) {
            throw Error(ErrorCode::InvalidArgument, "slot " + std::to_string(s) + " out of range",
                        static_cast<std::int64_t>(k));
        }
        if (!detail::slottable(g.op)) {
            throw Error(ErrorCode::InvalidArgument,
                        "gate " + std::string(opcodeName(g.op)) + " has no angle to parameterise",
                        static_cast<std::int64_t>(k));
        }
        seen[static_cast<std::size_t>(s)] = true;
    }
    for (int s = 1; s <= a.numParams; ++s) {
        if (!seen[static_cast<std::size_t>(s)]) {
            throw Error(ErrorCode::InvalidArgument, "parameter " + std::to_string(s) + " is never used");
        }
    }
    for (auto &err : validateCircuit(a.circuit, std::max(1, a.numQubits()))) throw Error(std::move(err));
}

/// Concrete circuit with every slot replaced by its value.
inline Circuit bindParameters(const Ansatz &a, std::span<const double> theta) {
    detail::checkTheta(a, theta);
    Circuit c = a.circuit;
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        if (a.slots[k] != 0) c.gates[k].params[0] = theta[static_cast<std::size_t>(a.slots[k] - 1)];
    }
    return c;
}

/// Layers of Rx, Ry, Rz on every qubit followed by two-qubit Pauli
/// rotations on neighbouring pairs, whose axis cycles X, Y, Z.
inline Ansatz layeredAnsatz(int numQubits, int depth) {
    if (numQubits < 1 || depth < 1) throw Error(ErrorCode::InvalidArgument, "need at least one qubit and one layer");
    Ansatz a;
    int slot = 0;
    int pairCount = 0;
    auto push = [&](Gate g) {
        a.circuit.gates.push_back(std::move(g));
        a.slots.push_back(++slot);
    };
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < numQubits; ++q) {
            push(gates::rx(q, 0.0));
            push(gates::ry(q, 0.0));
            push(gates::rz(q, 0.0));
        }
        for (int q = 0; q + 1 < numQubits; ++q) {
            const auto axis = static_cast<PauliAxis>(1 + pairCount++ % 3);
            push(gates::pauliRotation(0.0, {{axis, q}, {axis, q + 1}}));
        }
    }
    a.numParams = slot;
    a.circuit.declaredQubits = numQubits;
    return a;
}

/// Uniform draws on [0, 2π).
inline std::vector<double> randomParameters(int count, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> theta(static_cast<std::size_t>(count));
    for (auto &t : theta) t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return theta;
}

/// out = ∂ψ/∂θ_j with ψ = U(θ)|base>; j is 1-based.
inline void derivativeState(const Ansatz &a, std::span<const double> theta, int j, const Qureg &base, Qureg &out) {
    detail::requireBase(a, base);
    if (!out.sameShape(base)) throw Error(ErrorCode::DimensionMismatch, "output register shape differs from base");
    if (j < 1 || j > a.numParams) {
        throw Error(ErrorCode::IndexOutOfRange, "parameter index " + std::to_string(j) + " out of range");
    }
    const Circuit c = bindParameters(a, theta);
    for (auto &err : validateCircuit(c, base.numQubits())) throw Error(std::move(err));

    std::vector<Complex> sum(static_cast<std::size_t>(base.dim()), Complex{});
    Qureg tmp(base.numQubits(), false);
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        if (a.slots[k] != j) continue;
        tmp.copyFrom(base);
        detail::applyCircuitRange(tmp, c, 0, k + 1);
        detail::insertGenerator(tmp, c.gates[k]);
        detail::applyCircuitRange(tmp, c, k + 1, c.gates.size());
        const auto amps = tmp.amps();
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += amps[i];
    }
    std::copy(sum.begin(), sum.end(), out.amps().begin());
}

/// Same, addressing registers held by a local environment.
inline void derivativeState(LocalEnv &env, const Ansatz &a, std::span<const double> theta, int j, QuregId outId,
                            QuregId baseId) {
    derivativeState(a, theta, j, env.qureg(baseId), env.qureg(outId));
}

/// Everything one imaginary-time step needs, from a single pass over the
/// derivative states.
struct VariationalTerms {
    Eigen::MatrixXd metric;   ///< A
    Eigen::VectorXd gradient; ///< C
    double energy = 0.0;
};

inline VariationalTerms variationalTerms(const Ansatz &a, std::span<const double> theta, const PauliSum *h,
                                         const Qureg &base) {
    detail::requireBase(a, base);
    const int n = base.numQubits();
    const auto p = static_cast<std::size_t>(a.numParams);
    std::vector<Qureg> d;
    d.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
        d.emplace_back(n, false);
        derivativeState(a, theta, static_cast<int>(i) + 1, base, d.back());
    }
    VariationalTerms t;
    t.metric.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = i; k < p; ++k) {
            const double v = innerProduct(d[i], d[k]).real();
            t.metric(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
            t.metric(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v;
        }
    }
    t.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    if (h != nullptr) {
        Qureg psi(n, false), hpsi(n, false);
        psi.copyFrom(base);
        const Circuit c = bindParameters(a, theta);
        detail::applyCircuitRange(psi, c, 0, c.gates.size());
        applyPauliSum(psi, *h, hpsi);
        t.energy = innerProduct(psi, hpsi).real();
        for (std::size_t i = 0; i < p; ++i) {
            t.gradient(static_cast<Eigen::Index>(i)) = -innerProduct(hpsi, d[i]).real();
        }
    }
    return t;
}

/// A_ij = Re<∂_i ψ|∂_j ψ>.
inline Eigen::MatrixXd metricMatrix(const Ansatz &a, std::span<const double> theta, const Qureg &base) {
    return variationalTerms(a, theta, nullptr, base).metric;
}

/// C_i = -Re<ψ|H|∂_i ψ>.
inline Eigen::VectorXd gradientVector(const Ansatz &a, std::span<const double> theta, const PauliSum &h,
                                      const Qureg &base) {
    return variationalTerms(a, theta, &h, base).gradient;
}

/// θ + dt·(A + λI)⁻¹C.
inline std::vector<double> imagTimeStep(std::span<const double> theta, const Eigen::MatrixXd &a,
                                        const Eigen::VectorXd &c, double dt, double lambda) {
    const auto p = static_cast<Eigen::Index>(theta.size());
    if (a.rows() != p || a.cols() != p || c.size() != p) {
        throw Error(ErrorCode::DimensionMismatch, "metric, gradient and parameters disagree in size");
    }
    if (!(lambda >= 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "bad step or regulariser");
    const Eigen::MatrixXd reg = a + lambda * Eigen::MatrixXd::Identity(p, p);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
    const double rcond = p == 0 ? 1.0 : ldlt.rcond();
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success) step = ldlt.solve(c);
    if (ldlt.info() != Eigen::Success || !(rcond > 0.0) || !step.allFinite()) {
        throw Error(ErrorCode::SolverFailure,
                    "linear solve failed (reciprocal condition estimate " + std::to_string(rcond) + ")");
    }
    std::vector<double> out(theta.begin(), theta.end());
    for (Eigen::Index i = 0; i < p; ++i) out[static_cast<std::size_t>(i)] += dt * step(i);
    return out;
}

struct ImagTimeConfig {
    double dt = 0.1;
    int iterations = 200;
    double regularization = 1e-6;
    std::uint64_t seed = 0;
};

struct ImagTimeResult {
    std::vector<double> theta;
    std::vector<double> energies;      ///< one entry per evaluated point, initial point first
    std::vector<double> gradientNorms; ///< |C|₂ at the same points
};

/// Iterates θ ← θ + dt·(A+λI)⁻¹C from `theta0` starting at |base>.
inline ImagTimeResult runImagTime(const Ansatz &a, const PauliSum &h, std::span<const double> theta0,
                                  const ImagTimeConfig &cfg, const Qureg &base) {
    if (!(cfg.dt > 0.0) || cfg.iterations < 0) throw Error(ErrorCode::InvalidArgument, "need dt > 0 and iterations >= 0");
    validateAnsatz(a);
    detail::checkTheta(a, theta0);
    ImagTimeResult r;
    r.theta.assign(theta0.begin(), theta0.end());
    for (int it = 0;; ++it) {
        const auto t = variationalTerms(a, r.theta, &h, base);
        r.energies.push_back(t.energy);
        r.gradientNorms.push_back(t.gradient.norm());
        if (it == cfg.iterations) break;
        r.theta = imagTimeStep(r.theta, t.metric, t.gradient, cfg.dt, cfg.regularization);
    }
    return r;
}

/// Starts from |0...0> with parameters drawn from cfg.seed.
inline ImagTimeResult runImagTime(const Ansatz &a, const PauliSum &h, const ImagTimeConfig &cfg) {
    const int n = std::max(a.numQubits(), h.numQubits());
    Qureg base(std::max(1, n), false);
    const auto theta0 = randomParameters(a.numParams, cfg.seed);
    return runImagTime(a, h, theta0, cfg, base);
}

} // namespace qlink
