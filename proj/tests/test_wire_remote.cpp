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

#include <thread>

using namespace qlink;
using namespace qlink::testing;

namespace {

Circuit randomWireCircuit(CounterRng &rng) {
    const int n = 1 + static_cast<int>(rng.below(5));
    Circuit c;
    if (rng.below(3) == 0) c.declaredQubits = n + static_cast<int>(rng.below(3));
    const int len = static_cast<int>(rng.below(25));
    for (int i = 0; i < len; ++i) c.gates.push_back(randomAnyGate(n, rng));
    return c;
}

/// Accepts one connection, reads a single frame, then hangs up.
class HangUpServer {
  public:
    HangUpServer() {
        listener_ = net::Socket(::socket(AF_INET, SOCK_STREAM, 0));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        ::bind(listener_.fd(), reinterpret_cast<sockaddr *>(&addr), sizeof addr);
        ::listen(listener_.fd(), 1);
        socklen_t len = sizeof addr;
        ::getsockname(listener_.fd(), reinterpret_cast<sockaddr *>(&addr), &len);
        port_ = ntohs(addr.sin_port);
        thread_ = std::thread([this] {
            net::Socket client(::accept(listener_.fd(), nullptr, nullptr));
            net::RawFrame f;
            net::readFrame(client.fd(), f);
        });
    }
    ~HangUpServer() { thread_.join(); }
    [[nodiscard]] std::uint16_t port() const { return port_; }

  private:
    net::Socket listener_;
    std::uint16_t port_ = 0;
    std::thread thread_;
};

} // namespace

TEST(Encode, single_gate_arrays) {
    const auto e = wire::encodeCircuit(parseCircuit("H 0"));
    EXPECT_EQ(e.opcodes, (std::vector<std::int64_t>{static_cast<std::int64_t>(Opcode::H)}));
    EXPECT_EQ(e.ctrlCounts, (std::vector<std::int64_t>{0}));
    EXPECT_TRUE(e.ctrls.empty());
    EXPECT_EQ(e.targCounts, (std::vector<std::int64_t>{1}));
    EXPECT_EQ(e.targs, (std::vector<std::int64_t>{0}));
    EXPECT_EQ(e.paramCounts, (std::vector<std::int64_t>{0}));
    EXPECT_TRUE(e.params.empty());
    EXPECT_EQ(e.declaredQubits, -1);
}

TEST(Encode, embedded_matrices_and_axes) {
    const auto c = parseCircuit("U[0,1,1,0] 2; R[0.5] (Y 1, Z 3); Kraus[2] ([1,0,0,0], [0,0,0,1]) 0");
    const auto e = wire::encodeCircuit(c);
    EXPECT_EQ(e.paramCounts, (std::vector<std::int64_t>{9, 1, 18}));
    EXPECT_EQ(e.params[0], 2.0);
    EXPECT_EQ(e.targs[1], 1 | (std::int64_t{2} << 32));
    EXPECT_EQ(e.targs[2], 3 | (std::int64_t{3} << 32));
    EXPECT_EQ(e.params[10], 2.0);
    EXPECT_EQ(e.params[11], 2.0);
    EXPECT_EQ(wire::decodeCircuit(e), c);
}

TEST(Encode, round_trip_property) {
    CounterRng rng(61);
    for (int trial = 0; trial < 500; ++trial) {
        const Circuit c = randomWireCircuit(rng);
        const auto e = wire::encodeCircuit(c);
        ASSERT_EQ(wire::decodeCircuit(e), c) << printCircuit(c);
        const auto bytes = wire::serializeCircuit(c);
        ASSERT_EQ(wire::deserializeCircuit(bytes), c) << printCircuit(c);
        EXPECT_EQ(bytes.size(), 8 * e.sigma() + (c.declaredQubits ? 8u : 0u));
    }
}

TEST(Encode, invalid_circuits_still_round_trip) {
    CounterRng rng(62);
    for (int trial = 0; trial < 100; ++trial) {
        Circuit c;
        c.gates.push_back(randomInvalidGate(3, rng.below(2) == 0, rng));
        Gate negative = gates::pauliRotation(0.1, {{PauliAxis::X, -2}});
        c.gates.push_back(negative);
        ASSERT_EQ(wire::deserializeCircuit(wire::serializeCircuit(c)), c);
    }
}

TEST(Encode, benchmark_payload_bound) {
    const Circuit c = genBenchmarkCircuit(15, 50, 1);
    ASSERT_EQ(c.size(), 4350u);
    std::size_t sigma = c.size();
    for (const auto &g : c.gates) sigma += g.controls.size() + g.targets.size() + g.params.size();
    const auto bytes = wire::serializeCircuit(c);
    EXPECT_LE(bytes.size(), 8 * sigma);
    EXPECT_EQ(wire::deserializeCircuit(bytes), c);
}

TEST(Decode, rejects_inconsistent_arrays) {
    auto e = wire::encodeCircuit(parseCircuit("C[1] (X 0); Rx[0.1] 2"));
    auto codeOf = [](const wire::EncodedCircuit &x) {
        try {
            wire::decodeCircuit(x);
        } catch (const Error &err) {
            return err.code();
        }
        return ErrorCode::Ok;
    };
    auto bad = e;
    bad.opcodes[1] = 99;
    EXPECT_EQ(codeOf(bad), ErrorCode::MalformedMessage);
    bad = e;
    bad.ctrlCounts[0] = 2;
    EXPECT_EQ(codeOf(bad), ErrorCode::MalformedMessage);
    bad = e;
    bad.params.push_back(1.0);
    EXPECT_EQ(codeOf(bad), ErrorCode::MalformedMessage);
    bad = e;
    bad.targCounts.pop_back();
    EXPECT_EQ(codeOf(bad), ErrorCode::MalformedMessage);
    bad = wire::encodeCircuit(parseCircuit("U[1,0,0,1] 0"));
    bad.params[0] = 3;
    EXPECT_EQ(codeOf(bad), ErrorCode::MalformedMessage);

    auto bytes = wire::serializeCircuit(parseCircuit("Rx[0.1] 0"));
    bytes.pop_back();
    EXPECT_THROW(wire::deserializeCircuit(bytes), Error);
}

TEST(PauliWire, round_trip) {
    CounterRng rng(63);
    for (int trial = 0; trial < 50; ++trial) {
        const auto h = randomPauliSum(1 + static_cast<int>(rng.below(6)), static_cast<int>(rng.below(6)), rng);
        wire::Writer w;
        wire::writePauliSum(w, h);
        wire::Reader r(w.data());
        const auto back = wire::readPauliSum(r);
        EXPECT_TRUE(r.atEnd());
        ASSERT_EQ(back.terms.size(), h.terms.size());
        for (std::size_t k = 0; k < h.terms.size(); ++k) {
            EXPECT_EQ(back.terms[k].coeff, h.terms[k].coeff);
            EXPECT_EQ(back.terms[k].string, h.terms[k].string);
        }
    }
}

TEST(Frame, layout) {
    const std::vector<std::uint8_t> body{1, 2, 3};
    const auto f = wire::frame(wire::Kind::Ping, body);
    ASSERT_EQ(f.size(), wire::kFrameHeaderSize + 3);
    EXPECT_EQ(std::string(f.begin(), f.begin() + 4), "QLNK");
    EXPECT_EQ(f[4], 1);
    EXPECT_EQ(f[5], 0);
    EXPECT_EQ(f[6], static_cast<std::uint8_t>(wire::Kind::Ping));
    EXPECT_EQ(f[7], 3);
    for (int i = 8; i < 15; ++i) EXPECT_EQ(f[static_cast<std::size_t>(i)], 0);
    const auto h = wire::parseHeader(std::span<const std::uint8_t, wire::kFrameHeaderSize>(f.data(), wire::kFrameHeaderSize));
    EXPECT_EQ(h.length, 3u);
    EXPECT_EQ(h.kind, static_cast<std::uint8_t>(wire::Kind::Ping));
}

TEST(Endpoint, parsing) {
    EXPECT_EQ(net::parseEndpoint("localhost:55055"), std::make_pair(std::string("localhost"), std::uint16_t{55055}));
    EXPECT_EQ(net::parseEndpoint("::1:80").first, "::1");
    EXPECT_THROW(net::parseEndpoint("localhost"), Error);
    EXPECT_THROW(net::parseEndpoint("host:99999"), Error);
    EXPECT_THROW(net::parseEndpoint("host:12x"), Error);
}

class RemoteTest : public ::testing::Test {
  protected:
    void SetUp() override {
        server.start();
        client = std::make_unique<RemoteEnv>("127.0.0.1", server.port());
    }
    Server server{"127.0.0.1", 0};
    std::unique_ptr<RemoteEnv> client;
};

TEST_F(RemoteTest, ping) { EXPECT_EQ(client->ping(), wire::kProtocolVersion); }

TEST_F(RemoteTest, invalid_circuit_leaves_register_unchanged) {
    const auto id = client->createQureg(3, false);
    client->initRandomPure(id, 4);
    const auto before = client->getQuregMatrix(id);
    try {
        client->applyCircuit(id, parseCircuit("H 0; C[1] (X 1); Rz[0.2] 2"));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateQubit);
        EXPECT_EQ(e.gateIndex(), 1);
    }
    EXPECT_EQ(client->getQuregMatrix(id), before);

    const auto rho = client->createQureg(2, true);
    const auto before2 = client->getQuregMatrix(rho);
    EXPECT_THROW(client->applyCircuit(rho, parseCircuit("H 0; Depol[0.1] 0; M 1; Depol[0.9] 1")), Error);
    EXPECT_EQ(client->getQuregMatrix(rho), before2);
}

TEST_F(RemoteTest, large_amplitude_transfer) {
    const auto id = client->createQureg(10, false);
    std::vector<Complex> psi(1024);
    CounterRng rng(64);
    double norm = 0;
    for (auto &z : psi) {
        z = {rng.gaussian(), rng.gaussian()};
        norm += std::norm(z);
    }
    for (auto &z : psi) z /= std::sqrt(norm);
    client->initPureState(id, psi);
    const auto back = client->getQuregMatrix(id);
    ASSERT_EQ(back.values.size(), 1024u);
    EXPECT_TRUE(bitIdentical(back.values, psi));
}

TEST_F(RemoteTest, benchmark_circuit_matches_local) {
    const Circuit c = genBenchmarkCircuit(15, 2, 9);
    LocalEnv local;
    for (Env *env : {static_cast<Env *>(&local), static_cast<Env *>(client.get())}) {
        const auto id = env->createQureg(15, false);
        env->applyCircuit(id, c);
    }
    const auto ws = client->createQureg(15, false);
    const auto lws = local.createQureg(15, false);
    const auto h = parsePauliSum("Z 0 + 0.5 * X 3 Y 7 - Z 14");
    const double remote = client->calcExpecPauliSum(0, h, ws);
    const double here = local.calcExpecPauliSum(0, h, lws);
    EXPECT_EQ(std::memcmp(&remote, &here, sizeof here), 0);
    EXPECT_TRUE(bitIdentical(client->getQuregMatrix(0).values, local.getQuregMatrix(0).values));
}

TEST_F(RemoteTest, random_circuits_match_local) {
    CounterRng rng(65);
    LocalEnv local;
    const auto rid = client->createQureg(5, false);
    const auto lid = local.createQureg(5, false);
    for (int trial = 0; trial < 100; ++trial) {
        const Circuit c = randomUnitaryCircuit(5, 20, rng);
        client->initZero(rid);
        local.initZero(lid);
        client->applyCircuit(rid, c);
        local.applyCircuit(lid, c);
        ASSERT_LT(maxAbsDiff(client->getQuregMatrix(rid).values, local.getQuregMatrix(lid).values), 1e-12);
    }
}

TEST_F(RemoteTest, differential_operation_sequences) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        LocalEnv local;
        client->destroyAllQuregs();
        // fresh session so register ids line up with the fresh local env
        client = std::make_unique<RemoteEnv>("127.0.0.1", server.port());
        const auto a = randomOperationTranscript(local, seed);
        const auto b = randomOperationTranscript(*client, seed);
        ASSERT_EQ(a, b) << "seed " << seed;
    }
}

TEST_F(RemoteTest, malformed_frames_keep_connection) {
    auto bad = wire::frame(wire::Kind::Ping, {});
    bad[0] = 'X';
    auto reply = client->exchangeRaw(bad);
    EXPECT_EQ(reply.header.kind, static_cast<std::uint8_t>(wire::Kind::Error));
    EXPECT_EQ(wire::readErrorBody(reply.body).code, ErrorCode::MalformedMessage);
    EXPECT_EQ(client->ping(), wire::kProtocolVersion);

    reply = client->exchangeRaw(wire::frame(static_cast<wire::Kind>(42), {}));
    EXPECT_EQ(wire::readErrorBody(reply.body).code, ErrorCode::MalformedMessage);

    const std::vector<std::uint8_t> shortBody{1, 2, 3};
    reply = client->exchangeRaw(wire::frame(wire::Kind::CreateQureg, shortBody));
    EXPECT_EQ(wire::readErrorBody(reply.body).code, ErrorCode::MalformedMessage);
    EXPECT_EQ(client->ping(), wire::kProtocolVersion);
}

TEST_F(RemoteTest, version_mismatch_closes) {
    const auto reply = client->exchangeRaw(wire::frame(wire::Kind::Ping, {}, 7));
    EXPECT_EQ(wire::readErrorBody(reply.body).code, ErrorCode::VersionMismatch);
    EXPECT_THROW(client->ping(), TransportError);
}

TEST_F(RemoteTest, registers_are_session_scoped) {
    client->createQureg(2, false);
    EXPECT_EQ(client->listQuregs().size(), 1u);
    client = std::make_unique<RemoteEnv>("127.0.0.1", server.port());
    EXPECT_TRUE(client->listQuregs().empty());
    try {
        client->initZero(0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownQureg);
    }
}

TEST_F(RemoteTest, server_stop_is_a_transport_error) {
    const auto id = client->createQureg(2, false);
    server.stop();
    EXPECT_THROW(client->initZero(id), TransportError);
}

TEST(RemoteFailure, disconnect_during_apply) {
    HangUpServer fake;
    RemoteEnv env("127.0.0.1", fake.port());
    try {
        env.applyCircuit(0, parseCircuit("H 0"));
        FAIL();
    } catch (const TransportError &) {
    } catch (const Error &) {
        FAIL() << "a dropped link must not look like a validation error";
    }
    EXPECT_THROW(env.ping(), TransportError);
}

TEST(RemoteFailure, refused_connection) {
    std::uint16_t port;
    {
        Server s("127.0.0.1", 0);
        s.start();
        port = s.port();
    }
    EXPECT_THROW(RemoteEnv("127.0.0.1", port), TransportError);
}
