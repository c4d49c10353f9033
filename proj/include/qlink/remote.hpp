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

// TCP transport for the wire protocol: a server hosting one LocalEnv per
// connection and a client environment forwarding every call to it.

#include "qlink/environment.hpp"
#include "qlink/wire.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

namespace qlink {

namespace net {

/// Owning socket descriptor.
class Socket {
  public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(const Socket &) = delete;
    Socket &operator=(const Socket &) = delete;
    Socket(Socket &&o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket &operator=(Socket &&o) noexcept {
        if (this != &o) {
            close();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    ~Socket() { close(); }

    [[nodiscard]] int fd() const { return fd_; }
    [[nodiscard]] bool valid() const { return fd_ >= 0; }
    void close() {
        if (fd_ >= 0) ::close(std::exchange(fd_, -1));
    }
    void shutdown() const {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

  private:
    int fd_ = -1;
};

inline std::string lastError() { return std::strerror(errno); }

inline bool sendAll(int fd, std::span<const std::uint8_t> data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

/// False on orderly shutdown or error before `size` bytes arrived.
inline bool recvAll(int fd, std::uint8_t *out, std::size_t size) {
    std::size_t got = 0;
    while (got < size) {
        const ssize_t n = ::recv(fd, out + got, size - got, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        got += static_cast<std::size_t>(n);
    }
    return true;
}

struct RawFrame {
    wire::FrameHeader header;
    std::vector<std::uint8_t> body;
};

/// Reads one frame. The body grows as bytes arrive, so a bogus length
/// cannot force a huge allocation up front.
inline bool readFrame(int fd, RawFrame &f) {
    std::array<std::uint8_t, wire::kFrameHeaderSize> head{};
    if (!recvAll(fd, head.data(), head.size())) return false;
    f.header = wire::parseHeader(head);
    f.body.clear();
    constexpr std::size_t chunk = std::size_t{1} << 20;
    std::uint64_t left = f.header.length;
    while (left > 0) {
        const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(left, chunk));
        const std::size_t at = f.body.size();
        f.body.resize(at + n);
        if (!recvAll(fd, f.body.data() + at, n)) return false;
        left -= n;
    }
    return true;
}

inline std::pair<std::string, std::uint16_t> parseEndpoint(const std::string &text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw Error(ErrorCode::InvalidArgument, "expected HOST:PORT, got '" + text + "'");
    }
    unsigned long port = 0;
    try {
        std::size_t used = 0;
        port = std::stoul(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("port");
    } catch (const std::exception &) {
        throw Error(ErrorCode::InvalidArgument, "bad port in '" + text + "'");
    }
    if (port > 65535) throw Error(ErrorCode::InvalidArgument, "port out of range in '" + text + "'");
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

} // namespace net

namespace detail {

inline std::vector<std::uint8_t> resultBody(const wire::Writer &w) { return w.data(); }

/// Executes one request body against a session environment and returns
/// the Result body. Errors propagate as exceptions.
inline std::vector<std::uint8_t> dispatch(LocalEnv &env, wire::Kind kind, std::span<const std::uint8_t> body) {
    using wire::Kind;
    wire::Reader r(body);
    wire::Writer w;
    switch (kind) {
    case Kind::Ping:
        r.expectEnd();
        w.u16(wire::kProtocolVersion);
        w.string("pong");
        break;
    case Kind::CreateQureg: {
        const int n = r.qubitCount();
        const bool density = r.u8() != 0;
        r.expectEnd();
        w.i64(env.createQureg(n, density));
        break;
    }
    case Kind::DestroyQureg: {
        const auto id = r.i64();
        r.expectEnd();
        env.destroyQureg(id);
        break;
    }
    case Kind::DestroyAll:
        r.expectEnd();
        env.destroyAllQuregs();
        break;
    case Kind::ListQuregs: {
        r.expectEnd();
        const auto list = env.listQuregs();
        w.i64(static_cast<std::int64_t>(list.size()));
        for (const auto &q : list) {
            w.i64(q.id);
            w.i64(q.numQubits);
            w.u8(q.isDensity ? 1 : 0);
        }
        break;
    }
    case Kind::CloneQureg: {
        const auto id = r.i64();
        r.expectEnd();
        w.i64(env.cloneQureg(id));
        break;
    }
    case Kind::CopyQureg: {
        const auto dest = r.i64();
        const auto src = r.i64();
        r.expectEnd();
        env.copyQureg(dest, src);
        break;
    }
    case Kind::InitOp: {
        const auto id = r.i64();
        const auto k = r.u8();
        const auto arg = r.i64();
        r.expectEnd();
        env.initState(id, static_cast<InitKind>(k), arg);
        break;
    }
    case Kind::SetAmps: {
        const auto id = r.i64();
        const auto mode = r.u8();
        const auto values = wire::readAmps(r);
        r.expectEnd();
        if (mode == static_cast<std::uint8_t>(wire::SetMode::Matrix)) {
            env.setQuregMatrix(id, values);
        } else if (mode == static_cast<std::uint8_t>(wire::SetMode::PureState)) {
            env.initPureState(id, values);
        } else {
            throw wire::malformed("unknown SetAmps mode");
        }
        break;
    }
    case Kind::GetAmps: {
        const auto id = r.i64();
        r.expectEnd();
        const auto a = env.getQuregMatrix(id);
        w.i64(a.numQubits);
        w.u8(a.isDensity ? 1 : 0);
        wire::writeAmps(w, a.values);
        break;
    }
    case Kind::ApplyCircuit: {
        const auto id = r.i64();
        const Circuit c = wire::decodeCircuit(wire::readEncoded(r));
        const auto outcomes = env.applyCircuit(id, c);
        w.i64(static_cast<std::int64_t>(outcomes.size()));
        for (int o : outcomes) w.i64(o);
        break;
    }
    case Kind::CalcExpec: {
        const auto id = r.i64();
        const auto ws = r.i64();
        const auto h = wire::readPauliSum(r);
        r.expectEnd();
        w.f64(env.calcExpecPauliSum(id, h, ws));
        break;
    }
    case Kind::ApplyPauliSum: {
        const auto in = r.i64();
        const auto out = r.i64();
        const auto h = wire::readPauliSum(r);
        r.expectEnd();
        env.applyPauliSum(in, h, out);
        break;
    }
    case Kind::InnerProduct: {
        const auto a = r.i64();
        const auto b = r.i64();
        r.expectEnd();
        w.complex(env.innerProduct(a, b));
        break;
    }
    case Kind::Fidelity: {
        const auto a = r.i64();
        const auto b = r.i64();
        r.expectEnd();
        w.f64(env.calcFidelity(a, b));
        break;
    }
    case Kind::Seed: {
        const auto seed = r.u64();
        r.expectEnd();
        env.seedMeasurements(seed);
        break;
    }
    default: throw wire::malformed("unexpected message kind " + std::to_string(static_cast<int>(kind)));
    }
    return w.take();
}

/// Serves one connection until the peer leaves, a version mismatch is
/// seen, or the socket is shut down.
inline void runSession(int fd, std::uint64_t seed) {
    LocalEnv env(seed);
    net::RawFrame f;
    for (;;) {
        try {
            if (!net::readFrame(fd, f)) return;
        } catch (...) {
            return;
        }
        auto reply = [&](wire::Kind kind, std::span<const std::uint8_t> body) {
            return net::sendAll(fd, wire::frame(kind, body));
        };
        auto replyError = [&](ErrorCode code, const std::string &msg, std::int64_t idx = -1) {
            return reply(wire::Kind::Error, wire::errorBody({code, msg, idx}));
        };
        if (f.header.magic != wire::kMagic) {
            if (!replyError(ErrorCode::MalformedMessage, "bad frame magic")) return;
            continue;
        }
        if (f.header.version != wire::kProtocolVersion) {
            replyError(ErrorCode::VersionMismatch, "server speaks protocol version " +
                                                       std::to_string(wire::kProtocolVersion) + ", client sent " +
                                                       std::to_string(f.header.version));
            return;
        }
        if (!wire::isRequestKind(f.header.kind)) {
            if (!replyError(ErrorCode::MalformedMessage, "unknown message kind " + std::to_string(f.header.kind))) return;
            continue;
        }
        bool sent = false;
        try {
            const auto body = dispatch(env, static_cast<wire::Kind>(f.header.kind), f.body);
            sent = reply(wire::Kind::Result, body);
        } catch (const Error &e) {
            sent = replyError(e.code(), e.detail(), e.gateIndex());
        } catch (const std::bad_alloc &) {
            sent = replyError(ErrorCode::ResourceExhausted, "server out of memory");
        } catch (const std::exception &e) {
            sent = replyError(ErrorCode::InvalidArgument, e.what());
        }
        if (!sent) return;
    }
}

} // namespace detail

/// Accepts connections on a background thread, one session thread each.
/// Registers belong to the connection and vanish with it.
class Server {
  public:
    explicit Server(std::string host = "127.0.0.1", std::uint16_t port = wire::kDefaultPort, std::uint64_t seed = 0)
        : host_(std::move(host)), port_(port), seed_(seed) {}
    Server(const Server &) = delete;
    Server &operator=(const Server &) = delete;
    ~Server() { stop(); }

    /// Binds and starts accepting. Port 0 picks a free port; see port().
    void start() {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        hints.ai_flags = AI_PASSIVE;
        addrinfo *res = nullptr;
        const std::string service = std::to_string(port_);
        if (const int rc = ::getaddrinfo(host_.empty() ? nullptr : host_.c_str(), service.c_str(), &hints, &res); rc != 0) {
            throw TransportError("cannot resolve " + host_ + ": " + ::gai_strerror(rc));
        }
        std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
        std::string why = "no usable address";
        for (auto *ai = res; ai != nullptr; ai = ai->ai_next) {
            net::Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
            if (!s.valid()) {
                why = net::lastError();
                continue;
            }
            const int one = 1;
            ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
            if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(s.fd(), 16) != 0) {
                why = net::lastError();
                continue;
            }
            sockaddr_storage addr{};
            socklen_t len = sizeof addr;
            ::getsockname(s.fd(), reinterpret_cast<sockaddr *>(&addr), &len);
            port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6 *>(&addr)->sin6_port
                                                     : reinterpret_cast<sockaddr_in *>(&addr)->sin_port);
            listener_ = std::move(s);
            break;
        }
        if (!listener_.valid()) throw TransportError("cannot listen on " + host_ + ":" + service + ": " + why);
        running_ = true;
        acceptor_ = std::thread([this] { acceptLoop(); });
    }

    [[nodiscard]] std::uint16_t port() const { return port_; }
    [[nodiscard]] bool running() const { return running_; }

    /// Stops accepting, disconnects every session and joins all threads.
    void stop() {
        if (!running_.exchange(false)) return;
        if (acceptor_.joinable()) acceptor_.join();
        listener_.close();
        std::lock_guard lock(mutex_);
        for (auto &s : sessions_) s->socket.shutdown();
        for (auto &s : sessions_)
            if (s->thread.joinable()) s->thread.join();
        sessions_.clear();
    }

    /// Blocks until stop() is called from another thread.
    void wait() {
        while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }

  private:
    struct Session {
        net::Socket socket;
        std::thread thread;
        std::atomic<bool> done{false};
    };

    void acceptLoop() {
        while (running_) {
            pollfd p{listener_.fd(), POLLIN, 0};
            const int rc = ::poll(&p, 1, 50);
            reap();
            if (rc <= 0) continue;
            net::Socket client(::accept(listener_.fd(), nullptr, nullptr));
            if (!client.valid()) continue;
            const int one = 1;
            ::setsockopt(client.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            auto session = std::make_unique<Session>();
            session->socket = std::move(client);
            Session *raw = session.get();
            std::lock_guard lock(mutex_);
            session->thread = std::thread([raw, seed = seed_] {
                detail::runSession(raw->socket.fd(), seed);
                raw->socket.shutdown();
                raw->done = true;
            });
            sessions_.push_back(std::move(session));
        }
    }

    void reap() {
        std::lock_guard lock(mutex_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            if ((*it)->done) {
                (*it)->thread.join();
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::string host_;
    std::uint16_t port_;
    std::uint64_t seed_;
    net::Socket listener_;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::mutex mutex_;
    std::list<std::unique_ptr<Session>> sessions_;
};

/// Runs a server in the calling thread until the process ends.
inline void serveEnvironment(const std::string &host, std::uint16_t port, std::uint64_t seed = 0) {
    Server s(host, port, seed);
    s.start();
    s.wait();
}

/// Client side of the protocol. Not safe for concurrent use.
class RemoteEnv final : public Env {
  public:
    RemoteEnv(const std::string &host, std::uint16_t port,
              std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) {
        connect(host, port, timeout);
    }

    /// Protocol version reported by the server.
    std::uint16_t ping() {
        const auto body = call(wire::Kind::Ping, {});
        wire::Reader r(body);
        return r.u16();
    }

    /// Sends a pre-built frame and returns the raw reply; for tests of
    /// the server's framing rules.
    net::RawFrame exchangeRaw(std::span<const std::uint8_t> bytes) {
        if (!net::sendAll(sock_.fd(), bytes)) fail("send failed");
        net::RawFrame f;
        if (!net::readFrame(sock_.fd(), f)) fail("connection closed by server");
        return f;
    }

    QuregId createQureg(int numQubits, bool isDensity) override {
        wire::Writer w;
        w.i64(numQubits);
        w.u8(isDensity ? 1 : 0);
        const auto body = call(wire::Kind::CreateQureg, w.data());
        wire::Reader r(body);
        return r.i64();
    }

    void destroyQureg(QuregId id) override {
        wire::Writer w;
        w.i64(id);
        call(wire::Kind::DestroyQureg, w.data());
    }

    void destroyAllQuregs() override { call(wire::Kind::DestroyAll, {}); }

    std::vector<QuregInfo> listQuregs() override {
        const auto body = call(wire::Kind::ListQuregs, {});
        wire::Reader r(body);
        std::vector<QuregInfo> out(r.count(17));
        for (auto &q : out) {
            q.id = r.i64();
            q.numQubits = static_cast<int>(r.i64());
            q.isDensity = r.u8() != 0;
        }
        return out;
    }

    QuregId cloneQureg(QuregId source) override {
        wire::Writer w;
        w.i64(source);
        const auto body = call(wire::Kind::CloneQureg, w.data());
        wire::Reader r(body);
        return r.i64();
    }

    void copyQureg(QuregId dest, QuregId source) override {
        wire::Writer w;
        w.i64(dest);
        w.i64(source);
        call(wire::Kind::CopyQureg, w.data());
    }

    void initState(QuregId id, InitKind kind, std::int64_t arg = 0) override {
        wire::Writer w;
        w.i64(id);
        w.u8(static_cast<std::uint8_t>(kind));
        w.i64(arg);
        call(wire::Kind::InitOp, w.data());
    }

    void initPureState(QuregId id, std::span<const Complex> amps) override { setAmps(id, wire::SetMode::PureState, amps); }

    void setQuregMatrix(QuregId id, std::span<const Complex> values) override {
        setAmps(id, wire::SetMode::Matrix, values);
    }

    Amplitudes getQuregMatrix(QuregId id) override {
        wire::Writer w;
        w.i64(id);
        const auto body = call(wire::Kind::GetAmps, w.data());
        wire::Reader r(body);
        Amplitudes a;
        a.numQubits = static_cast<int>(r.i64());
        a.isDensity = r.u8() != 0;
        a.values = wire::readAmps(r);
        return a;
    }

    std::vector<int> applyCircuit(QuregId id, const Circuit &circuit) override {
        wire::Writer w;
        w.i64(id);
        wire::writeEncoded(w, wire::encodeCircuit(circuit));
        const auto body = call(wire::Kind::ApplyCircuit, w.data());
        wire::Reader r(body);
        std::vector<int> out(r.count(8));
        for (auto &o : out) o = static_cast<int>(r.i64());
        return out;
    }

    double calcExpecPauliSum(QuregId id, const PauliSum &h, QuregId workspace) override {
        wire::Writer w;
        w.i64(id);
        w.i64(workspace);
        wire::writePauliSum(w, h);
        const auto body = call(wire::Kind::CalcExpec, w.data());
        wire::Reader r(body);
        return r.f64();
    }

    void applyPauliSum(QuregId in, const PauliSum &h, QuregId out) override {
        wire::Writer w;
        w.i64(in);
        w.i64(out);
        wire::writePauliSum(w, h);
        call(wire::Kind::ApplyPauliSum, w.data());
    }

    Complex innerProduct(QuregId a, QuregId b) override {
        wire::Writer w;
        w.i64(a);
        w.i64(b);
        const auto body = call(wire::Kind::InnerProduct, w.data());
        wire::Reader r(body);
        return r.complex();
    }

    double calcFidelity(QuregId a, QuregId b) override {
        wire::Writer w;
        w.i64(a);
        w.i64(b);
        const auto body = call(wire::Kind::Fidelity, w.data());
        wire::Reader r(body);
        return r.f64();
    }

    void seedMeasurements(std::uint64_t seed) override {
        wire::Writer w;
        w.u64(seed);
        call(wire::Kind::Seed, w.data());
    }

    /// Bytes sent in the most recent request frame, header included.
    [[nodiscard]] std::size_t lastRequestBytes() const { return lastRequestBytes_; }

  private:
    void connect(const std::string &host, std::uint16_t port, std::chrono::milliseconds timeout) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo *res = nullptr;
        const std::string service = std::to_string(port);
        if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
            throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
        }
        std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
        std::string why = "no usable address";
        for (auto *ai = res; ai != nullptr; ai = ai->ai_next) {
            net::Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
            if (!s.valid()) {
                why = net::lastError();
                continue;
            }
            const int flags = ::fcntl(s.fd(), F_GETFL, 0);
            ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
            int rc = ::connect(s.fd(), ai->ai_addr, ai->ai_addrlen);
            if (rc != 0 && errno == EINPROGRESS) {
                pollfd p{s.fd(), POLLOUT, 0};
                rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
                if (rc == 0) {
                    why = "connect timed out";
                    continue;
                }
                int err = 0;
                socklen_t len = sizeof err;
                ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
                if (rc < 0 || err != 0) {
                    why = std::strerror(rc < 0 ? errno : err);
                    continue;
                }
            } else if (rc != 0) {
                why = net::lastError();
                continue;
            }
            ::fcntl(s.fd(), F_SETFL, flags);
            const int one = 1;
            ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            sock_ = std::move(s);
            return;
        }
        throw TransportError("cannot connect to " + host + ":" + service + ": " + why);
    }

    [[noreturn]] void fail(const std::string &what) {
        sock_.close();
        throw TransportError(what);
    }

    void setAmps(QuregId id, wire::SetMode mode, std::span<const Complex> values) {
        wire::Writer w;
        w.i64(id);
        w.u8(static_cast<std::uint8_t>(mode));
        wire::writeAmps(w, values);
        call(wire::Kind::SetAmps, w.data());
    }

    std::vector<std::uint8_t> call(wire::Kind kind, std::span<const std::uint8_t> body) {
        if (!sock_.valid()) throw TransportError("not connected");
        const auto bytes = wire::frame(kind, body);
        lastRequestBytes_ = bytes.size();
        net::RawFrame f = exchangeRaw(bytes);
        if (f.header.magic != wire::kMagic || f.header.version != wire::kProtocolVersion) {
            fail("unexpected reply framing");
        }
        if (f.header.kind == static_cast<std::uint8_t>(wire::Kind::Error)) {
            ValidationError e;
            try {
                e = wire::readErrorBody(f.body);
            } catch (const Error &) {
                fail("unreadable error reply");
            }
            throw Error(std::move(e));
        }
        if (f.header.kind != static_cast<std::uint8_t>(wire::Kind::Result)) fail("unexpected reply kind");
        return std::move(f.body);
    }

    net::Socket sock_;
    std::size_t lastRequestBytes_ = 0;
};

inline std::unique_ptr<RemoteEnv> connectEnvironment(const std::string &host, std::uint16_t port) {
    return std::make_unique<RemoteEnv>(host, port);
}

} // namespace qlink
