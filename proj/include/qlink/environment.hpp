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
#include "qlink/observables.hpp"
#include "qlink/pauli.hpp"
#include "qlink/qureg.hpp"
#include "qlink/random.hpp"
#include "qlink/validation.hpp"

#include <cstdint>
#include <map>
#include <new>
#include <span>
#include <vector>

namespace qlink {

using QuregId = std::int64_t;

struct QuregInfo {
    QuregId id = 0;
    int numQubits = 0;
    bool isDensity = false;

    friend bool operator==(const QuregInfo &, const QuregInfo &) = default;
};

/// Full contents of a register: 2^n amplitudes, or 4^n row-major
/// density-matrix entries.
struct Amplitudes {
    int numQubits = 0;
    bool isDensity = false;
    std::vector<Complex> values;

    friend bool operator==(const Amplitudes &, const Amplitudes &) = default;

    [[nodiscard]] Index dim() const { return Index{1} << numQubits; }

    [[nodiscard]] CMatrix matrix() const {
        if (!isDensity) {
            CMatrix v(dim(), 1);
            for (Index i = 0; i < dim(); ++i) v(i, 0) = values[static_cast<std::size_t>(i)];
            return v;
        }
        CMatrix m(dim(), dim());
        for (Index r = 0; r < dim(); ++r)
            for (Index c = 0; c < dim(); ++c) m(r, c) = values[static_cast<std::size_t>(r * dim() + c)];
        return m;
    }
};

enum class InitKind : std::int32_t { Zero = 0, Plus = 1, Classical = 2, RandomPure = 3 };

/// The register environment API. `LocalEnv` runs in-process; `RemoteEnv`
/// forwards every call to a server hosting a `LocalEnv` per session.
class Env {
  public:
    virtual ~Env() = default;

    virtual QuregId createQureg(int numQubits, bool isDensity) = 0;
    virtual void destroyQureg(QuregId id) = 0;
    virtual void destroyAllQuregs() = 0;
    virtual std::vector<QuregInfo> listQuregs() = 0;
    virtual QuregId cloneQureg(QuregId source) = 0;
    virtual void copyQureg(QuregId dest, QuregId source) = 0;

    virtual void initState(QuregId id, InitKind kind, std::int64_t arg = 0) = 0;
    virtual void initPureState(QuregId id, std::span<const Complex> amps) = 0;
    virtual void setQuregMatrix(QuregId id, std::span<const Complex> values) = 0;
    virtual Amplitudes getQuregMatrix(QuregId id) = 0;

    /// Applies the circuit atomically and returns the measurement outcomes
    /// in order. On any error the register is left exactly as it was.
    virtual std::vector<int> applyCircuit(QuregId id, const Circuit &circuit) = 0;

    virtual double calcExpecPauliSum(QuregId id, const PauliSum &h, QuregId workspace) = 0;
    virtual void applyPauliSum(QuregId in, const PauliSum &h, QuregId out) = 0;
    virtual Complex innerProduct(QuregId a, QuregId b) = 0;
    virtual double calcFidelity(QuregId a, QuregId b) = 0;

    /// Reseeds the generator used by measurements.
    virtual void seedMeasurements(std::uint64_t seed) = 0;

    void initZero(QuregId id) { initState(id, InitKind::Zero); }
    void initPlus(QuregId id) { initState(id, InitKind::Plus); }
    void initClassical(QuregId id, std::int64_t index) { initState(id, InitKind::Classical, index); }
    void initRandomPure(QuregId id, std::uint64_t seed) {
        initState(id, InitKind::RandomPure, static_cast<std::int64_t>(seed));
    }

    QuregInfo info(QuregId id) {
        for (const auto &q : listQuregs())
            if (q.id == id) return q;
        throw Error(ErrorCode::UnknownQureg, "unknown qureg " + std::to_string(id));
    }

    void applyGate(QuregId id, const Gate &g) {
        Circuit c;
        c.gates.push_back(g);
        applyCircuit(id, c);
    }

    int measure(QuregId id, int qubit) {
        Circuit c;
        c.gates.push_back(gates::measure(qubit));
        return applyCircuit(id, c).at(0);
    }

    void mixDepolarising(QuregId id, int q, double p) { applyGate(id, gates::depol({q}, p)); }
    void mixTwoQubitDepolarising(QuregId id, int q1, int q2, double p) { applyGate(id, gates::depol({q1, q2}, p)); }
    void mixDephasing(QuregId id, int q, double p) { applyGate(id, gates::deph({q}, p)); }
    void mixTwoQubitDephasing(QuregId id, int q1, int q2, double p) { applyGate(id, gates::deph({q1, q2}, p)); }
    void mixDamping(QuregId id, int q, double p) { applyGate(id, gates::damp(q, p)); }
    void applyKraus(QuregId id, std::vector<int> targets, std::vector<CMatrix> ops) {
        applyGate(id, gates::krausMap(std::move(targets), std::move(ops)));
    }
};

/// In-process environment. Register IDs count up from 0 and are never
/// reused.
class LocalEnv final : public Env {
  public:
    explicit LocalEnv(std::uint64_t seed = 0) : rng_(seed) {}

    QuregId createQureg(int numQubits, bool isDensity) override {
        const QuregId id = nextId_;
        quregs_.emplace(id, Qureg(numQubits, isDensity));
        ++nextId_;
        return id;
    }

    void destroyQureg(QuregId id) override {
        if (quregs_.erase(id) == 0) throw unknown(id);
    }

    void destroyAllQuregs() override { quregs_.clear(); }

    std::vector<QuregInfo> listQuregs() override {
        std::vector<QuregInfo> out;
        for (const auto &[id, q] : quregs_) out.push_back({id, q.numQubits(), q.isDensity()});
        return out;
    }

    QuregId cloneQureg(QuregId source) override {
        const Qureg copy = qureg(source);
        const QuregId id = nextId_++;
        quregs_.emplace(id, copy);
        return id;
    }

    void copyQureg(QuregId dest, QuregId source) override {
        const Qureg &src = qureg(source);
        qureg(dest).copyFrom(src);
    }

    void initState(QuregId id, InitKind kind, std::int64_t arg) override {
        Qureg &q = qureg(id);
        switch (kind) {
        case InitKind::Zero: q.initZero(); return;
        case InitKind::Plus: q.initPlus(); return;
        case InitKind::Classical: q.initClassical(arg); return;
        case InitKind::RandomPure: q.initRandomPure(static_cast<std::uint64_t>(arg)); return;
        }
        throw Error(ErrorCode::InvalidArgument, "unknown init kind " + std::to_string(static_cast<int>(kind)));
    }

    void initPureState(QuregId id, std::span<const Complex> amps) override { qureg(id).initPureState(amps); }

    void setQuregMatrix(QuregId id, std::span<const Complex> values) override { qureg(id).setMatrix(values); }

    Amplitudes getQuregMatrix(QuregId id) override {
        const Qureg &q = qureg(id);
        return {q.numQubits(), q.isDensity(), q.data()};
    }

    std::vector<int> applyCircuit(QuregId id, const Circuit &circuit) override {
        Qureg &q = qureg(id);
        std::vector<int> outcomes;
        if (circuit.isUnitaryOnly()) {
            // Unitary circuits are validated upfront, so nothing can fail midway.
            for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
                if (auto err = validateGateForRegister(circuit.gates[i], q.numQubits(), q.isDensity(),
                                                       static_cast<std::int64_t>(i))) {
                    throw Error(std::move(*err));
                }
            }
            for (const auto &g : circuit.gates) q.applyUnitary(g);
            return outcomes;
        }

        // Channels and measurements are irreversible: validate on the fly
        // against a snapshot and restore it on failure.
        std::vector<Complex> snapshot;
        try {
            snapshot = q.data();
        } catch (const std::bad_alloc &) {
            throw Error(ErrorCode::ResourceExhausted, "no memory for a rollback snapshot");
        }
        try {
            for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
                const Gate &g = circuit.gates[i];
                if (auto err = validateGateForRegister(g, q.numQubits(), q.isDensity(), static_cast<std::int64_t>(i))) {
                    throw Error(std::move(*err));
                }
                if (g.op == Opcode::M) {
                    outcomes.push_back(q.measure(g.targets[0], rng_));
                } else if (isChannel(g.op)) {
                    q.applyChannel(g);
                } else {
                    q.applyUnitary(g);
                }
            }
        } catch (const std::bad_alloc &) {
            restore(q, snapshot);
            throw Error(ErrorCode::ResourceExhausted, "out of memory while applying circuit");
        } catch (...) {
            restore(q, snapshot);
            throw;
        }
        return outcomes;
    }

    double calcExpecPauliSum(QuregId id, const PauliSum &h, QuregId workspace) override {
        return qlink::calcExpecPauliSum(qureg(id), h, qureg(workspace));
    }

    void applyPauliSum(QuregId in, const PauliSum &h, QuregId out) override {
        qlink::applyPauliSum(qureg(in), h, qureg(out));
    }

    Complex innerProduct(QuregId a, QuregId b) override { return qlink::innerProduct(qureg(a), qureg(b)); }

    double calcFidelity(QuregId a, QuregId b) override { return qlink::calcFidelity(qureg(a), qureg(b)); }

    void seedMeasurements(std::uint64_t seed) override { rng_ = CounterRng(seed); }

    /// Direct access for algorithms that need non-unitary operators.
    Qureg &qureg(QuregId id) {
        const auto it = quregs_.find(id);
        if (it == quregs_.end()) throw unknown(id);
        return it->second;
    }

  private:
    static Error unknown(QuregId id) { return Error(ErrorCode::UnknownQureg, "unknown qureg " + std::to_string(id)); }

    static void restore(Qureg &q, const std::vector<Complex> &snapshot) {
        auto dst = q.amps();
        std::copy(snapshot.begin(), snapshot.end(), dst.begin());
    }

    std::map<QuregId, Qureg> quregs_;
    QuregId nextId_ = 0;
    CounterRng rng_;
};

} // namespace qlink
