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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <map>
#include <set>
#include <string>

using namespace qlink;
using namespace qlink::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome oracleEquivalence() {
    const auto start = Clock::now();
    CounterRng rng(1001);
    std::set<Opcode> seen;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        const int depth = 1 + static_cast<int>(rng.below(30));
        const Circuit c = randomUnitaryCircuit(n, depth, rng);
        for (const auto &g : c.gates) seen.insert(g.op);
        const auto psi = randomState(n, rng);
        Qureg q(n, false);
        q.initPureState(psi);
        for (const auto &g : c.gates) q.applyUnitary(g);
        Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.size()));
        for (std::size_t i = 0; i < psi.size(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
        const Eigen::VectorXcd want = circuitMatrix(c, n) * v;
        worst = std::max(worst, maxAbsDiff(q.data(), std::vector<Complex>(want.data(), want.data() + want.size())));
    }
    const double t = seconds(start);
    const bool allOps = seen.size() == 13;
    return {worst < 1e-12 && t < 30.0 && allOps,
            fmt("max error %.3g, %.2f s, ", worst, t) + std::to_string(seen.size()) + "/13 unitary opcodes"};
}

Outcome purityCorrespondence() {
    CounterRng rng(1002);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        const Circuit c = randomUnitaryCircuit(n, 1 + static_cast<int>(rng.below(30)), rng);
        const auto psi = randomState(n, rng);
        Qureg vec(n, false), rho(n, true);
        vec.initPureState(psi);
        rho.initPureState(psi);
        for (const auto &g : c.gates) {
            vec.applyUnitary(g);
            rho.applyUnitary(g);
        }
        const Index d = vec.dim();
        for (Index r = 0; r < d; ++r)
            for (Index k = 0; k < d; ++k) {
                const Complex want = vec.data()[static_cast<std::size_t>(r)] * std::conj(vec.data()[static_cast<std::size_t>(k)]);
                worst = std::max(worst, std::abs(rho.data()[static_cast<std::size_t>(r * d + k)] - want));
            }
    }
    return {worst < 1e-10, fmt("max error %.3g", worst)};
}

/// Row-major vec(PρP) = (P ⊗ conj(P)) vec(ρ).
CMatrix depolSuperoperator(double p) {
    CMatrix paulis[4];
    for (auto &m : paulis) m = CMatrix::Zero(2, 2);
    paulis[0](0, 0) = paulis[0](1, 1) = 1.0;
    paulis[1](0, 1) = paulis[1](1, 0) = 1.0;
    paulis[2](0, 1) = Complex(0, -1);
    paulis[2](1, 0) = Complex(0, 1);
    paulis[3](0, 0) = 1.0;
    paulis[3](1, 1) = -1.0;
    auto kron = [](const CMatrix &a, const CMatrix &b) {
        CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    CMatrix s = (1.0 - p) * CMatrix::Identity(16, 16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            if (a == 0 && b == 0) continue;
            const CMatrix pp = kron(paulis[a], paulis[b]);
            s += p / 15.0 * kron(pp, pp.conjugate());
        }
    return s;
}

Outcome depolarisingFixedPoint() {
    CounterRng rng(1003);
    const double p = 0.1;
    const CMatrix sup = depolSuperoperator(p);
    const auto psi = randomState(2, rng);
    Qureg rho(2, true);
    rho.initPureState(psi);
    Eigen::VectorXcd oracle(16);
    for (int i = 0; i < 16; ++i) oracle(i) = rho.data()[static_cast<std::size_t>(i)];

    std::vector<PauliSum> observables;
    for (int k = 0; k < 5; ++k) {
        PauliSum h;
        for (const auto &t : randomPauliSum(2, 4, rng).terms)
            if (!t.string.empty()) h.terms.push_back(t);
        observables.push_back(h);
    }
    Qureg ws(2, true);
    std::vector<double> prev;
    for (const auto &h : observables) prev.push_back(std::abs(calcExpecPauliSum(rho, h, ws)));

    double oracleErr = 0.0;
    bool monotone = true;
    const Gate g = gates::depol({0, 1}, p);
    for (int step = 0; step < 100; ++step) {
        rho.applyChannel(g);
        oracle = sup * oracle;
        oracleErr = std::max(oracleErr, maxAbsDiff(rho.data(), std::vector<Complex>(oracle.data(), oracle.data() + 16)));
        for (std::size_t k = 0; k < observables.size(); ++k) {
            const double e = std::abs(calcExpecPauliSum(rho, observables[k], ws));
            if (e > prev[k] + 1e-15) monotone = false;
            prev[k] = e;
        }
    }
    CMatrix diff(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) diff(r, c) = rho.data()[static_cast<std::size_t>(r * 4 + c)] - (r == c ? 0.25 : 0.0);
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(diff);
    const double traceDistance = 0.5 * es.eigenvalues().cwiseAbs().sum();
    return {traceDistance < 1e-4 && monotone && oracleErr < 1e-12,
            fmt("trace distance %.3g, superoperator error %.3g, ", traceDistance, oracleErr) +
                (monotone ? "envelope monotone" : "envelope NOT monotone")};
}

Outcome imaginaryTime() {
    const auto start = Clock::now();
    const auto h = parsePauliSum("Z 0 Z 1 + 0.5 * X 0");
    const Ansatz a = layeredAnsatz(2, 2);
    ImagTimeConfig cfg;
    cfg.dt = 0.1;
    cfg.regularization = 1e-6;
    cfg.iterations = 200;
    cfg.seed = 7;
    const auto r = runImagTime(a, h, cfg);
    const double t = seconds(start);
    const double ground = Eigen::SelfAdjointEigenSolver<CMatrix>(hamiltonianMatrix(h, 2)).eigenvalues().minCoeff();
    double worstRise = 0.0;
    for (std::size_t k = 5; k + 1 < r.energies.size(); ++k) worstRise = std::max(worstRise, r.energies[k + 1] - r.energies[k]);
    const double gap = std::abs(r.energies.back() - ground);
    return {gap < 1e-3 && worstRise <= 1e-9 && t < 10.0,
            fmt("|E - E0| = %.3g, worst rise %.3g, %.2f s", gap, worstRise, t)};
}

Outcome derivativeCorrectness() {
    CounterRng rng(1005);
    const double delta = 1e-5;
    double worstFd = 0.0, worstAsym = 0.0, minEig = INFINITY;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const int p = 1 + static_cast<int>(rng.below(12));
        const Ansatz a = randomAnsatz(n, p, p + static_cast<int>(rng.below(6)), rng);
        const auto theta = randomParameters(p, rng());
        Qureg base(n, false);
        base.initRandomPure(rng());
        for (int j = 1; j <= p; ++j) {
            Qureg d(n, false);
            derivativeState(a, theta, j, base, d);
            auto shifted = [&](double sign) {
                auto th = theta;
                th[static_cast<std::size_t>(j - 1)] += sign * delta;
                Qureg q(n, false);
                q.copyFrom(base);
                for (const auto &g : bindParameters(a, th).gates) q.applyUnitary(g);
                return q.data();
            };
            const auto plus = shifted(1.0), minus = shifted(-1.0);
            for (std::size_t i = 0; i < plus.size(); ++i)
                worstFd = std::max(worstFd, std::abs((plus[i] - minus[i]) / (2.0 * delta) - d.data()[i]));
        }
        const Eigen::MatrixXd m = metricMatrix(a, theta, base);
        worstAsym = std::max(worstAsym, (m - m.transpose()).cwiseAbs().maxCoeff());
        minEig = std::min(minEig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff());
    }
    return {worstFd < 1e-6 && worstAsym <= 1e-10 && minEig >= -1e-10,
            fmt("max FD error %.3g, max asymmetry %.3g, min eigenvalue %.3g", worstFd, worstAsym, minEig)};
}

double trotterFidelity(const PauliSum &h, int order, int reps, std::uint64_t seed) {
    const int n = h.numQubits();
    Qureg exact(n, false), approx(n, false);
    exact.initRandomPure(seed);
    approx.initRandomPure(seed);
    exactEvolution(h, 1.0, exact);
    for (const auto &g : trotterCircuit({h, 1.0, order, reps}).gates) approx.applyUnitary(g);
    return calcFidelity(exact, approx);
}

Outcome trotterScaling() {
    const auto start = Clock::now();
    const auto h = heisenbergRing(5, 2026);
    std::vector<double> xs, ys;
    bool secondWins = true;
    for (int r : {4, 8, 16, 32, 64}) {
        const double f1 = trotterFidelity(h, 1, r, 11);
        xs.push_back(std::log(static_cast<double>(r)));
        ys.push_back(std::log(1.0 - f1));
        if (r >= 8 && trotterFidelity(h, 2, r, 11) < f1) secondWins = false;
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / 5.0;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / 5.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    const double t = seconds(start);
    return {std::abs(slope + 2.0) <= 0.3 && secondWins && t < 60.0,
            fmt("slope %.4f, %.2f s, ", slope, t) + (secondWins ? "order 2 >= order 1" : "order 2 < order 1 somewhere")};
}

Outcome noisyTrotter() {
    LocalEnv env;
    const auto h = heisenbergRing(5, 2026);
    const std::vector<int> reps{1, 2, 4, 8, 16, 32, 64};
    const auto rows = trotterSweep(env, h, 1.0, {1, 2}, reps, 1e-4, 12);
    bool bounded = true;
    std::vector<double> order1;
    for (const auto &r : rows) {
        if (r.noisyFidelity > r.fidelity) bounded = false;
        if (r.order == 1) order1.push_back(r.noisyFidelity);
    }
    const auto peak = static_cast<std::size_t>(std::max_element(order1.begin(), order1.end()) - order1.begin());
    const bool interiorPeak = peak + 1 < order1.size();
    return {bounded && interiorPeak,
            std::string(bounded ? "noisy <= noiseless everywhere" : "noisy > noiseless somewhere") + ", order-1 peak at r=" +
                std::to_string(reps[peak]) + fmt(" (F=%.4f, F(64)=%.4f)", order1[peak], order1.back())};
}

Outcome qdriftSampling() {
    const auto h = parsePauliSum("1.5 * X 0 X 1 - 0.7 * Z 2 + 0.3 * Y 0 Z 1 + 1.1 * Z 0 Z 2 - 0.05 * X 1");
    const int draws = 100000;
    const Circuit c = qdriftCircuit(h, 1.0, draws, 2027);
    std::map<std::string, int> counts;
    auto key = [](const PauliString &s) { return printPauliSum(PauliSum{{PauliTerm{1.0, s}}}); };
    for (const auto &g : c.gates) {
        PauliString s;
        for (std::size_t i = 0; i < g.targets.size(); ++i) s.push_back({g.paulis[i], g.targets[i]});
        ++counts[key(s)];
    }
    double lambda = 0.0;
    for (const auto &t : h.terms) lambda += std::abs(t.coeff);
    double worstSigmas = 0.0;
    for (const auto &t : h.terms) {
        const double prob = std::abs(t.coeff) / lambda;
        const double sigma = std::sqrt(draws * prob * (1.0 - prob));
        worstSigmas = std::max(worstSigmas, std::abs(counts[key(t.string)] - draws * prob) / sigma);
    }
    PauliSum single;
    single.add(-0.8, pauliString({{'X', 0}, {'Y', 1}}));
    const double exactErr = maxAbsDiff(circuitMatrix(qdriftCircuit(single, 1.5, 16, 3), 2), evolutionMatrix(single, 1.5, 2));
    return {worstSigmas <= 3.0 && exactErr < 1e-12, fmt("worst deviation %.2f sigma, single-term error %.3g", worstSigmas, exactErr)};
}

Outcome wireProtocol() {
    CounterRng rng(1009);
    int roundTrips = 0, matrixGates = 0, krausGates = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        Circuit c;
        const int len = 1 + static_cast<int>(rng.below(25));
        for (int i = 0; i < len; ++i) c.gates.push_back(randomAnyGate(n, rng));
        c.gates.push_back(gates::unitary({0}, randomUnitary(2, rng)));
        c.gates.push_back(gates::krausMap({0}, randomKraus(2, 2, rng)));
        for (const auto &g : c.gates) {
            matrixGates += g.op == Opcode::U;
            krausGates += g.op == Opcode::Kraus;
        }
        if (wire::deserializeCircuit(wire::serializeCircuit(c)) == c) ++roundTrips;
    }

    const Circuit bench = genBenchmarkCircuit(15, 50, 1);
    std::size_t sigma = bench.size();
    for (const auto &g : bench.gates) sigma += g.controls.size() + g.targets.size() + g.params.size();
    const std::size_t payload = wire::serializeCircuit(bench).size();

    Server server("127.0.0.1", 0);
    server.start();
    int identical = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        LocalEnv local;
        RemoteEnv remote("127.0.0.1", server.port());
        if (randomOperationTranscript(local, 5000 + seed) == randomOperationTranscript(remote, 5000 + seed)) ++identical;
    }
    server.stop();
    return {roundTrips == 500 && payload <= 8 * sigma && identical == 100,
            std::to_string(roundTrips) + "/500 round trips (" + std::to_string(matrixGates) + " U, " +
                std::to_string(krausGates) + " Kraus), payload " + std::to_string(payload) + " <= " +
                std::to_string(8 * sigma) + ", " + std::to_string(identical) + "/100 identical transcripts"};
}

Outcome benchmarkHarness() {
    bool counts = true;
    for (int r = 1; r <= 50; ++r) counts = counts && genBenchmarkCircuit(15, r, static_cast<std::uint64_t>(r)).size() == static_cast<std::size_t>(87 * r);
    LocalEnv env;
    const auto rows = runBenchmark(env, 15, {1, 10, 20, 30, 40, 50}, 10, 2028);
    bool monotone = true;
    std::string means;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].meanSeconds < rows[i - 1].meanSeconds) monotone = false;
        means += fmt(i == 0 ? "%.4f" : " %.4f", rows[i].meanSeconds);
    }
    return {counts && monotone, std::string(counts ? "87r gates" : "gate count mismatch") + ", means [" + means + "] s"};
}

Outcome atomicity() {
    CounterRng rng(1011);
    Server server("127.0.0.1", 0);
    server.start();
    LocalEnv local;
    RemoteEnv remote("127.0.0.1", server.port());
    int localOk = 0, remoteOk = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        const bool density = rng.below(2) == 0;
        Circuit c;
        const int len = 1 + static_cast<int>(rng.below(20));
        for (int i = 0; i < len; ++i) {
            if (density) {
                c.gates.push_back(randomAnyGate(n, rng));
            } else {
                c.gates.push_back(rng.below(8) == 0 ? gates::measure(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))))
                                                    : randomUnitaryGate(n, rng));
            }
        }
        const auto at = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(len) + 1));
        c.gates.insert(c.gates.begin() + at, randomInvalidGate(n, density, rng));
        const auto seed = rng();
        for (Env *env : {static_cast<Env *>(&local), static_cast<Env *>(&remote)}) {
            const auto id = env->createQureg(n, density);
            env->initRandomPure(id, seed);
            const auto before = env->getQuregMatrix(id);
            bool threw = false;
            try {
                env->applyCircuit(id, c);
            } catch (const Error &) {
                threw = true;
            }
            const auto after = env->getQuregMatrix(id);
            if (threw && bitIdentical(before.values, after.values)) ++(env == &local ? localOk : remoteOk);
            env->destroyQureg(id);
        }
    }
    server.stop();
    return {localOk == 200 && remoteOk == 200,
            std::to_string(localOk) + "/200 local, " + std::to_string(remoteOk) + "/200 remote unchanged after error"};
}

} // namespace

int main() {
    struct Criterion {
        const char *name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"oracle equivalence", oracleEquivalence},
        {"purity correspondence", purityCorrespondence},
        {"depolarising fixed point", depolarisingFixedPoint},
        {"imaginary-time convergence", imaginaryTime},
        {"derivative correctness", derivativeCorrectness},
        {"trotter scaling", trotterScaling},
        {"noisy trotter", noisyTrotter},
        {"qdrift sampling", qdriftSampling},
        {"wire protocol", wireProtocol},
        {"benchmark harness", benchmarkHarness},
        {"atomicity", atomicity},
    };
    int failures = 0;
    int number = 0;
    for (const auto &c : criteria) {
        ++number;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %2d %-28s %s\n", o.pass ? "PASS" : "FAIL", number, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", number - failures, number);
    return failures == 0 ? 0 : 1;
}
