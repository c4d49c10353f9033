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

#include "test_support.hpp"

#include "gtest/gtest.h"

using namespace qlink;
using namespace qlink::testing;

namespace {

Eigen::VectorXcd asVector(const Qureg &q) {
    Eigen::VectorXcd v(q.dim());
    for (Index i = 0; i < q.dim(); ++i) v(i) = q.amps()[static_cast<std::size_t>(i)];
    return v;
}

Qureg pureFrom(int n, const std::vector<Complex> &psi) {
    Qureg q(n, false);
    q.initPureState(psi);
    return q;
}

} // namespace

TEST(PauliText, parse_examples) {
    const auto h = parsePauliSum("1.0 * Z 0 + 0.5 * X 0 X 1");
    ASSERT_EQ(h.terms.size(), 2u);
    EXPECT_EQ(h.terms[0].coeff, 1.0);
    EXPECT_EQ(h.terms[0].string, pauliString({{'Z', 0}}));
    EXPECT_EQ(h.terms[1].coeff, 0.5);
    EXPECT_EQ(h.terms[1].string, pauliString({{'X', 0}, {'X', 1}}));

    const auto id = parsePauliSum("2.0");
    ASSERT_EQ(id.terms.size(), 1u);
    EXPECT_EQ(id.terms[0].coeff, 2.0);
    EXPECT_TRUE(id.terms[0].string.empty());
}

TEST(PauliText, signs_and_lines) {
    const auto h = parsePauliSum("-1 * Z 0 - 0.25 X 1\n3 * Y 2\n");
    ASSERT_EQ(h.terms.size(), 3u);
    EXPECT_EQ(h.terms[0].coeff, -1.0);
    EXPECT_EQ(h.terms[1].coeff, -0.25);
    EXPECT_EQ(h.terms[2].coeff, 3.0);
    EXPECT_EQ(h.numQubits(), 3);
}

TEST(PauliText, errors) {
    auto codeOf = [](const char *text) {
        try {
            parsePauliSum(text);
        } catch (const Error &e) {
            return e.code();
        }
        return ErrorCode::Ok;
    };
    EXPECT_EQ(codeOf("1 * X 0 Z 0"), ErrorCode::DuplicateQubit);
    EXPECT_EQ(codeOf("1 * Q 0"), ErrorCode::SyntaxError);
    EXPECT_EQ(codeOf("1 * X"), ErrorCode::SyntaxError);
    EXPECT_EQ(codeOf("1 + + 2"), ErrorCode::SyntaxError);
    EXPECT_EQ(codeOf("nan * X 0"), ErrorCode::SyntaxError);
}

TEST(PauliText, round_trip_property) {
    CounterRng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto h = randomPauliSum(1 + static_cast<int>(rng.below(6)), 1 + static_cast<int>(rng.below(8)), rng);
        const auto text = printPauliSum(h);
        const auto back = parsePauliSum(text);
        ASSERT_EQ(back.terms.size(), h.terms.size()) << text;
        for (std::size_t k = 0; k < h.terms.size(); ++k) {
            EXPECT_EQ(back.terms[k].coeff, h.terms[k].coeff) << text;
            EXPECT_EQ(back.terms[k].string, h.terms[k].string) << text;
        }
    }
}

TEST(Expectation, basic_examples) {
    Qureg q(1, false), ws(1, false);
    q.initZero();
    EXPECT_DOUBLE_EQ(calcExpecPauliSum(q, parsePauliSum("Z 0"), ws), 1.0);
    q.initPlus();
    EXPECT_NEAR(calcExpecPauliSum(q, parsePauliSum("Z 0"), ws), 0.0, 1e-15);
    EXPECT_NEAR(calcExpecPauliSum(q, parsePauliSum("X 0 + 2"), ws), 3.0, 1e-15);
}

TEST(Expectation, matches_dense_oracle) {
    CounterRng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const auto h = randomPauliSum(3, 6, rng);
        const auto psi = randomState(3, rng);
        Qureg q = pureFrom(3, psi), ws(3, false);
        const Eigen::VectorXcd v = asVector(q);
        const Complex dense = v.dot(hamiltonianMatrix(h, 3) * v);
        EXPECT_NEAR(calcExpecPauliSum(q, h, ws), dense.real(), 1e-12);
        EXPECT_LT(std::abs(dense.imag()), 1e-10);
        EXPECT_EQ(maxAbsDiff(q.amps(), std::span<const Complex>(psi)), 0.0);
    }
}

TEST(Expectation, density_matrix_matches_pure_state) {
    CounterRng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        const auto h = randomPauliSum(n, 5, rng);
        const auto psi = randomState(n, rng);
        Qureg v = pureFrom(n, psi), vws(n, false);
        Qureg rho(n, true), rws(n, true);
        rho.initPureState(psi);
        EXPECT_NEAR(calcExpecPauliSum(rho, h, rws), calcExpecPauliSum(v, h, vws), 1e-10);
    }
}

TEST(Expectation, mixed_state_trace) {
    CounterRng rng(34);
    Qureg rho(2, true), ws(2, true);
    rho.initRandomPure(5);
    rho.applyChannel(gates::depol({0}, 0.3));
    rho.applyChannel(gates::damp(1, 0.4));
    const auto h = randomPauliSum(2, 6, rng);
    CMatrix dense(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) dense(r, c) = rho.entry(r, c);
    EXPECT_NEAR(calcExpecPauliSum(rho, h, ws), (hamiltonianMatrix(h, 2) * dense).trace().real(), 1e-12);
}

TEST(Expectation, errors) {
    Qureg q(2, false), small(1, false), rho(2, true);
    EXPECT_THROW(calcExpecPauliSum(q, parsePauliSum("Z 0"), small), Error);
    EXPECT_THROW(calcExpecPauliSum(q, parsePauliSum("Z 0"), rho), Error);
    EXPECT_THROW(calcExpecPauliSum(q, parsePauliSum("Z 0"), q), Error);
    Qureg ws(2, false);
    try {
        calcExpecPauliSum(q, parsePauliSum("Z 2"), ws);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::QubitIndexOutOfRange);
    }
}

TEST(ApplyPauliSum, examples) {
    Qureg in(1, false), out(1, false);
    in.initZero();
    applyPauliSum(in, parsePauliSum("X 0"), out);
    EXPECT_EQ(out.amps()[0], Complex(0.0));
    EXPECT_EQ(out.amps()[1], Complex(1.0));
    in.initClassical(1);
    applyPauliSum(in, parsePauliSum("Z 0 + Z 0"), out);
    EXPECT_EQ(out.amps()[0], Complex(0.0));
    EXPECT_EQ(out.amps()[1], Complex(-2.0));
}

TEST(ApplyPauliSum, matches_dense_oracle) {
    CounterRng rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const auto h = randomPauliSum(n, 7, rng);
        const auto psi = randomState(n, rng);
        Qureg in = pureFrom(n, psi), out(n, false);
        applyPauliSum(in, h, out);
        const Eigen::VectorXcd expected = hamiltonianMatrix(h, n) * asVector(in);
        const Eigen::VectorXcd got = asVector(out);
        EXPECT_LT((expected - got).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(maxAbsDiff(in.amps(), std::span<const Complex>(psi)), 0.0);
    }
}

TEST(ApplyPauliSum, expectation_consistency_property) {
    CounterRng rng(36);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const auto h = randomPauliSum(n, 6, rng);
        Qureg psi = pureFrom(n, randomState(n, rng)), hpsi(n, false), ws(n, false);
        applyPauliSum(psi, h, hpsi);
        const Complex ip = innerProduct(psi, hpsi);
        EXPECT_NEAR(calcExpecPauliSum(psi, h, ws), ip.real(), 1e-12);
        EXPECT_LT(std::abs(ip.imag()), 1e-10);
    }
}

TEST(ApplyPauliSum, errors) {
    Qureg rho(1, true), v(1, false), v2(2, false);
    EXPECT_THROW(applyPauliSum(rho, parsePauliSum("X 0"), v), Error);
    EXPECT_THROW(applyPauliSum(v, parsePauliSum("X 0"), rho), Error);
    EXPECT_THROW(applyPauliSum(v, parsePauliSum("X 0"), v2), Error);
    EXPECT_THROW(applyPauliSum(v, parsePauliSum("X 0"), v), Error);
}

TEST(InnerProduct, examples) {
    Qureg a(1, false), b(1, false);
    a.initZero();
    EXPECT_EQ(innerProduct(a, a), Complex(1.0));
    b.initClassical(1);
    EXPECT_EQ(innerProduct(a, b), Complex(0.0));
    b.initPlus();
    EXPECT_NEAR(std::abs(innerProduct(b, a) - Complex(1.0 / std::sqrt(2.0))), 0.0, 1e-15);
}

TEST(InnerProduct, conjugate_symmetry_and_normalisation) {
    CounterRng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        Qureg a = pureFrom(n, randomState(n, rng)), b = pureFrom(n, randomState(n, rng));
        EXPECT_NEAR(std::abs(innerProduct(a, a) - Complex(1.0)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(innerProduct(a, b) - std::conj(innerProduct(b, a))), 0.0, 1e-14);
    }
    Qureg v(1, false), rho(1, true), w(2, false);
    EXPECT_THROW(innerProduct(v, rho), Error);
    EXPECT_THROW(innerProduct(v, w), Error);
}

TEST(Fidelity, examples) {
    Qureg a(2, false), b(2, false);
    a.initRandomPure(9);
    EXPECT_NEAR(calcFidelity(a, a), 1.0, 1e-12);
    a.initZero();
    b.initClassical(1);
    EXPECT_EQ(calcFidelity(a, b), 0.0);

    Qureg mixed(2, true);
    std::vector<Complex> m(16, Complex(0.0));
    for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(i * 4 + i)] = 0.25;
    mixed.setMatrix(m);
    a.initRandomPure(10);
    EXPECT_NEAR(calcFidelity(a, mixed), 0.25, 1e-12);
    EXPECT_NEAR(calcFidelity(mixed, a), 0.25, 1e-12);
    EXPECT_THROW(calcFidelity(mixed, mixed), Error);
}

TEST(Fidelity, bounds_property) {
    CounterRng rng(38);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        Qureg a = pureFrom(n, randomState(n, rng)), b = pureFrom(n, randomState(n, rng));
        Qureg rho(n, true);
        rho.initPureState(randomState(n, rng));
        for (int k = 0; k < 3; ++k) rho.applyChannel(randomNonUnitaryGate(n, rng));
        for (double f : {calcFidelity(a, b), calcFidelity(a, rho)}) {
            EXPECT_GE(f, -1e-12);
            EXPECT_LE(f, 1.0 + 1e-10);
        }
    }
}

TEST(HamiltonianMatrix, examples) {
    const CMatrix z = hamiltonianMatrix(parsePauliSum("Z 0"), 1);
    EXPECT_EQ(z(0, 0), Complex(1.0));
    EXPECT_EQ(z(1, 1), Complex(-1.0));
    EXPECT_EQ(z(0, 1), Complex(0.0));
    const CMatrix xx = hamiltonianMatrix(parsePauliSum("X 0 X 1"), 2);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) EXPECT_EQ(xx(r, c), Complex(r + c == 3 ? 1.0 : 0.0));
    EXPECT_THROW(hamiltonianMatrix(parsePauliSum("Z 0"), kDenseQubitCap + 1), Error);
}

TEST(HamiltonianMatrix, singlet_ground_energy) {
    const CMatrix h = hamiltonianMatrix(parsePauliSum("X 0 X 1 + Y 0 Y 1 + Z 0 Z 1"), 2);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    EXPECT_NEAR(es.eigenvalues()(0), -3.0, 1e-12);
}

TEST(HamiltonianMatrix, hermitian_property) {
    CounterRng rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const CMatrix h = hamiltonianMatrix(randomPauliSum(n, 8, rng), n);
        EXPECT_LT(maxAbsDiff(h, h.adjoint()), 1e-14);
    }
}

TEST(HamiltonianMatrix, agrees_with_rotation_embedding) {
    // R(pi, P) = -i P, an independent route to each Pauli string matrix
    CounterRng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        PauliSum h = randomPauliSum(n, 1, rng);
        if (h.terms[0].string.empty()) continue;
        h.terms[0].coeff = 1.0;
        Circuit c;
        c.gates.push_back(gates::pauliRotation(M_PI, h.terms[0].string));
        const CMatrix viaRotation = Complex(0.0, 1.0) * circuitMatrix(c, n);
        EXPECT_LT(maxAbsDiff(viaRotation, hamiltonianMatrix(h, n)), 1e-14);
    }
}

TEST(EnvObservables, through_local_environment) {
    LocalEnv env(1);
    const auto a = env.createQureg(2, false);
    const auto ws = env.createQureg(2, false);
    const auto b = env.createQureg(2, false);
    env.initPlus(a);
    EXPECT_NEAR(env.calcExpecPauliSum(a, parsePauliSum("X 0 + X 1 + Z 0"), ws), 2.0, 1e-14);
    env.applyPauliSum(a, parsePauliSum("Z 0"), b);
    EXPECT_NEAR(std::abs(env.innerProduct(a, b)), 0.0, 1e-15);
    EXPECT_NEAR(env.calcFidelity(a, a), 1.0, 1e-14);
    EXPECT_THROW(env.calcExpecPauliSum(a, parsePauliSum("X 0"), 99), Error);
}
