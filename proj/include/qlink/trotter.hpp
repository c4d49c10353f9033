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
#include "qlink/pauli.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace qlink {

struct EvolutionSpec {
    PauliSum hamiltonian;
    double time = 1.0;
    int order = 1; ///< 1 or even
    int reps = 1;
};

/// Periodic Heisenberg chain with unit couplings and random Z fields:
/// Σ_j (X_j X_{j+1} + Y_j Y_{j+1} + Z_j Z_{j+1} + r_j Z_j), r_j ~ U[-1, 1].
inline PauliSum heisenbergRing(int numQubits, std::uint64_t seed) {
    if (numQubits < 3) throw Error(ErrorCode::InvalidArgument, "a ring needs at least 3 qubits");
    CounterRng rng(seed);
    PauliSum h;
    for (int j = 0; j < numQubits; ++j) {
        const int k = (j + 1) % numQubits;
        for (auto axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) h.add(1.0, {{axis, j}, {axis, k}});
        h.add(rng.uniform(-1.0, 1.0), {{PauliAxis::Z, j}});
    }
    return h;
}

namespace detail {

/// (term index, time weight) pairs whose ordered product is one step.
using Schedule = std::vector<std::pair<std::size_t, double>>;

inline void suzuki(const std::vector<std::size_t> &terms, int order, double tau, Schedule &out) {
    if (order == 1) {
        for (auto k : terms) out.emplace_back(k, tau);
        return;
    }
    if (order == 2) {
        for (auto k : terms) out.emplace_back(k, tau / 2);
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) out.emplace_back(*it, tau / 2);
        return;
    }
    const int k = order / 2;
    const double p = 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * k - 1.0)));
    suzuki(terms, order - 2, p * tau, out);
    suzuki(terms, order - 2, p * tau, out);
    suzuki(terms, order - 2, (1.0 - 4.0 * p) * tau, out);
    suzuki(terms, order - 2, p * tau, out);
    suzuki(terms, order - 2, p * tau, out);
}

inline void checkEvolution(const EvolutionSpec &s) {
    if (s.order < 1 || (s.order > 1 && s.order % 2 != 0)) {
        throw Error(ErrorCode::InvalidArgument, "order must be 1 or even, got " + std::to_string(s.order));
    }
    if (s.reps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one repetition");
    if (!std::isfinite(s.time)) throw Error(ErrorCode::InvalidArgument, "non-finite evolution time");
    for (const auto &t : s.hamiltonian.terms) {
        if (!std::isfinite(t.coeff)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
    }
}

inline std::vector<std::size_t> pauliTerms(const PauliSum &h) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < h.terms.size(); ++k)
        if (!h.terms[k].string.empty()) idx.push_back(k);
    return idx;
}

inline void emitSchedule(const PauliSum &h, const Schedule &s, Circuit &c) {
    for (const auto &[k, tau] : s) {
        const auto &term = h.terms[k];
        c.gates.push_back(gates::pauliRotation(2.0 * term.coeff * tau, term.string));
    }
}

} // namespace detail

/// Product formula for exp(-iHt). Identity terms are dropped.
inline Circuit trotterCircuit(const EvolutionSpec &s) {
    detail::checkEvolution(s);
    const auto terms = detail::pauliTerms(s.hamiltonian);
    detail::Schedule step;
    detail::suzuki(terms, s.order, s.time / s.reps, step);
    Circuit c;
    c.gates.reserve(step.size() * static_cast<std::size_t>(s.reps));
    for (int r = 0; r < s.reps; ++r) detail::emitSchedule(s.hamiltonian, step, c);
    return c;
}

/// As trotterCircuit, with the term order reshuffled every repetition.
inline Circuit randomizedTrotterCircuit(const EvolutionSpec &s, std::uint64_t seed) {
    detail::checkEvolution(s);
    auto terms = detail::pauliTerms(s.hamiltonian);
    CounterRng rng(seed);
    Circuit c;
    for (int r = 0; r < s.reps; ++r) {
        for (std::size_t i = terms.size(); i > 1; --i) {
            std::swap(terms[i - 1], terms[static_cast<std::size_t>(rng.below(i))]);
        }
        detail::Schedule step;
        detail::suzuki(terms, s.order, s.time / s.reps, step);
        detail::emitSchedule(s.hamiltonian, step, c);
    }
    return c;
}

/// qDRIFT: `gateCount` rotations, each on a term drawn with probability
/// |c_k| / λ and angle 2·sign(c_k)·λ·t / N.
inline Circuit qdriftCircuit(const PauliSum &h, double time, int gateCount, std::uint64_t seed) {
    if (gateCount < 1) throw Error(ErrorCode::InvalidArgument, "need at least one gate");
    const auto terms = detail::pauliTerms(h);
    std::vector<double> cumulative;
    double lambda = 0.0;
    for (auto k : terms) {
        lambda += std::abs(h.terms[k].coeff);
        cumulative.push_back(lambda);
    }
    if (terms.empty() || !(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorCode::InvalidArgument, "qDRIFT needs a non-trivial Hamiltonian");
    }
    CounterRng rng(seed);
    Circuit c;
    c.gates.reserve(static_cast<std::size_t>(gateCount));
    const double angle = 2.0 * lambda * time / gateCount;
    for (int i = 0; i < gateCount; ++i) {
        const double u = rng.uniform() * lambda;
        auto pos = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        pos = std::min(pos, terms.size() - 1);
        const auto &term = h.terms[terms[pos]];
        c.gates.push_back(gates::pauliRotation(std::copysign(angle, term.coeff), term.string));
    }
    return c;
}

/// Follows every unitary gate with depolarising noise of strength p on its
/// targets.
inline Circuit noisifyCircuit(const Circuit &c, double p) {
    Circuit out;
    out.declaredQubits = c.declaredQubits;
    out.gates.reserve(2 * c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto &g = c.gates[i];
        out.gates.push_back(g);
        if (!isUnitary(g.op)) continue;
        if (g.targets.size() > 2) {
            throw Error(ErrorCode::Unsupported, "cannot attach depolarising noise to more than two targets",
                        static_cast<std::int64_t>(i));
        }
        Gate noise = gates::depol(g.targets, p);
        if (auto err = validateGate(noise, std::numeric_limits<int>::max(), static_cast<std::int64_t>(i))) {
            throw Error(std::move(*err));
        }
        out.gates.push_back(std::move(noise));
    }
    return out;
}

/// exp(-iHt) as a dense matrix, via the eigendecomposition of H.
inline CMatrix evolutionMatrix(const PauliSum &h, double time, int numQubits) {
    const CMatrix hm = hamiltonianMatrix(h, numQubits);
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(hm);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "eigendecomposition failed");
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -time)).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// ψ ← exp(-iHt)ψ.
inline void exactEvolution(const PauliSum &h, double time, Qureg &q) {
    if (q.isDensity()) throw Error(ErrorCode::Unsupported, "exact evolution acts on state vectors");
    const CMatrix u = evolutionMatrix(h, time, q.numQubits());
    const Eigen::Map<Eigen::VectorXcd> psi(q.amps().data(), q.dim());
    const Eigen::VectorXcd next = u * psi;
    std::copy(next.data(), next.data() + next.size(), q.amps().begin());
}

inline void exactEvolution(Env &env, const PauliSum &h, double time, QuregId id) {
    const auto a = env.getQuregMatrix(id);
    if (a.isDensity) throw Error(ErrorCode::Unsupported, "exact evolution acts on state vectors");
    const CMatrix u = evolutionMatrix(h, time, a.numQubits);
    const Eigen::Map<const Eigen::VectorXcd> psi(a.values.data(), static_cast<Eigen::Index>(a.values.size()));
    const Eigen::VectorXcd next = u * psi;
    env.setQuregMatrix(id, std::span<const Complex>(next.data(), static_cast<std::size_t>(next.size())));
}

struct TrotterRow {
    int order = 1;
    int reps = 1;
    std::size_t gateCount = 0;
    double fidelity = 0.0;
    double noisyFidelity = 0.0;
};

/// Fidelity of product-formula evolution against exact evolution from a
/// random pure state, with and without depolarising noise of strength p.
inline std::vector<TrotterRow> trotterSweep(Env &env, const PauliSum &h, double time, const std::vector<int> &orders,
                                            const std::vector<int> &repsList, double p, std::uint64_t stateSeed,
                                            bool withNoise = true) {
    const int n = h.numQubits();
    const QuregId exact = env.createQureg(n, false);
    const QuregId vec = env.createQureg(n, false);
    const QuregId rho = withNoise ? env.createQureg(n, true) : -1;
    std::vector<TrotterRow> rows;
    try {
        env.initRandomPure(exact, stateSeed);
        exactEvolution(env, h, time, exact);
        for (int order : orders) {
            for (int reps : repsList) {
                const Circuit c = trotterCircuit({h, time, order, reps});
                TrotterRow row{order, reps, c.size(), 0.0, 0.0};
                env.initRandomPure(vec, stateSeed);
                env.applyCircuit(vec, c);
                row.fidelity = env.calcFidelity(exact, vec);
                if (withNoise) {
                    env.initRandomPure(rho, stateSeed);
                    env.applyCircuit(rho, noisifyCircuit(c, p));
                    row.noisyFidelity = env.calcFidelity(exact, rho);
                }
                rows.push_back(row);
            }
        }
    } catch (...) {
        for (QuregId id : {exact, vec, rho})
            if (id >= 0) env.destroyQureg(id);
        throw;
    }
    for (QuregId id : {exact, vec, rho})
        if (id >= 0) env.destroyQureg(id);
    return rows;
}

inline std::string trotterCsv(const std::vector<TrotterRow> &rows) {
    std::ostringstream out;
    out.precision(17);
    out << "order,reps,gateCount,fidelity,noisyFidelity\n";
    for (const auto &r : rows) {
        out << r.order << ',' << r.reps << ',' << r.gateCount << ',' << r.fidelity << ',' << r.noisyFidelity << '\n';
    }
    return out.str();
}

} // namespace qlink
