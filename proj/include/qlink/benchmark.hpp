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
#include "qlink/error.hpp"
#include "qlink/gate.hpp"
#include "qlink/random.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

namespace qlink {

/// Gates in one repetition of the benchmark circuit on n qubits.
inline constexpr int benchmarkGatesPerRep(int numQubits) { return 3 * numQubits + 3 * (numQubits - 1); }

/// Benchmark circuit: each repetition applies Rx, Ry, Rz to every qubit, then
/// controlled Rx, Ry, Rz on neighbouring pairs, even pairs before odd pairs.
/// Every angle is uniform on [0, 4 pi).
inline Circuit genBenchmarkCircuit(int numQubits, int reps, std::uint64_t seed) {
    if (numQubits < 2) {
        throw Error(ErrorCode::InvalidQubitCount, "benchmark circuits need at least two qubits");
    }
    if (reps < 0) {
        throw Error(ErrorCode::InvalidArgument, "repetitions must be non-negative");
    }
    CounterRng rng(seed);
    auto angle = [&] { return rng.uniform(0.0, 4.0 * std::numbers::pi); };
    Circuit c;
    c.gates.reserve(static_cast<std::size_t>(reps * benchmarkGatesPerRep(numQubits)));
    for (int r = 0; r < reps; ++r) {
        for (int q = 0; q < numQubits; ++q) {
            c.gates.push_back(gates::rx(q, angle()));
            c.gates.push_back(gates::ry(q, angle()));
            c.gates.push_back(gates::rz(q, angle()));
        }
        for (int parity = 0; parity < 2; ++parity) {
            for (int j = parity; j + 1 < numQubits; j += 2) {
                c.gates.push_back(gates::controlled({j}, gates::rx(j + 1, angle())));
                c.gates.push_back(gates::controlled({j}, gates::ry(j + 1, angle())));
                c.gates.push_back(gates::controlled({j}, gates::rz(j + 1, angle())));
            }
        }
    }
    return c;
}

struct BenchmarkResult {
    int reps = 0;
    double meanSeconds = 0.0;
    double stddevSeconds = 0.0;
    int trials = 0;
    std::int64_t gateCount = 0;
};

/// Times full-circuit execution on fresh |0..0> state vectors. Each trial
/// re-randomises the angles from a seed derived from (seed, reps, trial).
inline std::vector<BenchmarkResult> runBenchmark(Env &env, int numQubits, const std::vector<int> &repsList, int trials,
                                                 std::uint64_t seed) {
    if (trials < 1) {
        throw Error(ErrorCode::InvalidArgument, "at least one trial is required");
    }
    std::vector<BenchmarkResult> results;
    const QuregId id = env.createQureg(numQubits, false);
    try {
        for (int reps : repsList) {
            std::vector<double> times;
            std::int64_t gates = 0;
            for (int t = 0; t < trials; ++t) {
                const auto circuit =
                    genBenchmarkCircuit(numQubits, reps, deriveSeed(seed, static_cast<std::uint64_t>(reps) * 1000003ULL + static_cast<std::uint64_t>(t)));
                gates = static_cast<std::int64_t>(circuit.size());
                env.initZero(id);
                const auto start = std::chrono::steady_clock::now();
                env.applyCircuit(id, circuit);
                const auto stop = std::chrono::steady_clock::now();
                times.push_back(std::chrono::duration<double>(stop - start).count());
            }
            double mean = 0.0;
            for (double t : times) mean += t;
            mean /= static_cast<double>(times.size());
            double var = 0.0;
            for (double t : times) var += (t - mean) * (t - mean);
            const double sd = times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
            results.push_back({reps, mean, sd, trials, gates});
        }
    } catch (...) {
        env.destroyQureg(id);
        throw;
    }
    env.destroyQureg(id);
    return results;
}

inline std::string benchmarkCsv(const std::vector<BenchmarkResult> &results) {
    std::string out = "reps,gates,mean_s,stddev_s,trials\n";
    char buf[160];
    for (const auto &r : results) {
        std::snprintf(buf, sizeof buf, "%d,%lld,%.9g,%.9g,%d\n", r.reps, static_cast<long long>(r.gateCount),
                      r.meanSeconds, r.stddevSeconds, r.trials);
        out += buf;
    }
    return out;
}

} // namespace qlink
