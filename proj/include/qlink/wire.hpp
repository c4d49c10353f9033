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

// Binary encoding of circuits, Pauli sums and the request/response
// messages exchanged with a remote environment. Everything is little-endian;
// integers are 64-bit two's complement and reals IEEE-754 binary64 unless
// stated otherwise. docs/protocol.md has the byte-level layout.

#include "qlink/environment.hpp"
#include "qlink/error.hpp"
#include "qlink/gate.hpp"
#include "qlink/pauli.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

namespace qlink::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic{'Q', 'L', 'N', 'K'};
inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 15;
inline constexpr std::uint16_t kDefaultPort = 55055;

/// Opcode value of the pseudo-record carrying a declared register width.
inline constexpr std::int64_t kWidthRecord = 0xFF;

// Bit layout of a gate record's leading word.
inline constexpr int kCtrlShift = 8;
inline constexpr int kTargShift = 24;
inline constexpr int kParamShift = 40;
inline constexpr std::int64_t kCountMask16 = 0xFFFF;
inline constexpr std::int64_t kParamMask = (std::int64_t{1} << 23) - 1;

enum class Kind : std::uint8_t {
    Ping = 1,
    CreateQureg = 2,
    DestroyQureg = 3,
    InitOp = 4,
    SetAmps = 5,
    GetAmps = 6,
    ApplyCircuit = 7,
    CalcExpec = 8,
    InnerProduct = 9,
    Fidelity = 10,
    CloneQureg = 11,
    CopyQureg = 12,
    DestroyAll = 13,
    ApplyPauliSum = 14,
    Seed = 15,
    ListQuregs = 16,
    Result = 64,
    Error = 65,
};

inline bool isRequestKind(std::uint8_t k) { return k >= 1 && k <= 16; }

/// SetAmps mode byte.
enum class SetMode : std::uint8_t { Matrix = 0, PureState = 1 };

inline Error malformed(const std::string &what) { return Error(ErrorCode::MalformedMessage, what); }

class Writer {
  public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void complex(Complex z) {
        f64(z.real());
        f64(z.imag());
    }
    void string(const std::string &s) {
        i64(static_cast<std::int64_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    [[nodiscard]] std::size_t size() const { return buf_.size(); }
    [[nodiscard]] const std::vector<std::uint8_t> &data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() { return need(1)[0]; }
    std::uint16_t u16() {
        const auto *p = need(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }
    std::uint64_t u64() {
        const auto *p = need(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    Complex complex() {
        const double re = f64();
        return {re, f64()};
    }
    std::string string() {
        const auto n = count(1);
        const auto *p = need(n);
        return std::string(reinterpret_cast<const char *>(p), n);
    }
    /// A non-negative element count whose elements (each `elemSize` bytes)
    /// must fit in what is left.
    std::size_t count(std::size_t elemSize) {
        const std::int64_t n = i64();
        if (n < 0 || static_cast<std::uint64_t>(n) > remaining() / elemSize) throw malformed("count exceeds message");
        return static_cast<std::size_t>(n);
    }
    int qubitCount() {
        const std::int64_t n = i64();
        if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
            throw Error(ErrorCode::InvalidQubitCount, "qubit count out of range");
        }
        return static_cast<int>(n);
    }

    [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }
    [[nodiscard]] bool atEnd() const { return pos_ == data_.size(); }
    void expectEnd() const {
        if (!atEnd()) throw malformed("trailing bytes in message");
    }

  private:
    const std::uint8_t *need(std::size_t n) {
        if (n > remaining()) throw malformed("message truncated");
        const auto *p = data_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Circuits

/// Array form of a circuit: one opcode and three counts per gate, with
/// flattened qubit and parameter lists. R gates keep their Pauli axes in the
/// target entries as qubit | axis << 32. U and Kraus matrices live in the
/// parameters: [dim, re, im, ...] and [count, dim, re, im, ...], row-major.
struct EncodedCircuit {
    std::vector<std::int64_t> opcodes;
    std::vector<std::int64_t> ctrlCounts;
    std::vector<std::int64_t> ctrls;
    std::vector<std::int64_t> targCounts;
    std::vector<std::int64_t> targs;
    std::vector<std::int64_t> paramCounts;
    std::vector<double> params;
    std::int64_t declaredQubits = -1;

    friend bool operator==(const EncodedCircuit &, const EncodedCircuit &) = default;

    /// gates + controls + targets + params.
    [[nodiscard]] std::size_t sigma() const { return opcodes.size() + ctrls.size() + targs.size() + params.size(); }
};

namespace detail {

inline void pushMatrix(std::vector<double> &out, const CMatrix &m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back(m(r, c).real());
            out.push_back(m(r, c).imag());
        }
}

inline std::int64_t matrixDim(double v) {
    if (!(v >= 1.0) || v > 4096.0 || v != std::floor(v)) throw malformed("bad matrix dimension");
    return static_cast<std::int64_t>(v);
}

inline CMatrix readMatrix(const double *p, std::int64_t dim) {
    CMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c, p += 2) m(r, c) = Complex(p[0], p[1]);
    return m;
}

} // namespace detail

inline EncodedCircuit encodeCircuit(const Circuit &c) {
    EncodedCircuit e;
    e.declaredQubits = c.declaredQubits ? *c.declaredQubits : -1;
    for (const auto &g : c.gates) {
        e.opcodes.push_back(static_cast<std::int64_t>(g.op));
        e.ctrlCounts.push_back(static_cast<std::int64_t>(g.controls.size()));
        e.ctrls.insert(e.ctrls.end(), g.controls.begin(), g.controls.end());
        e.targCounts.push_back(static_cast<std::int64_t>(g.targets.size()));
        for (std::size_t i = 0; i < g.targets.size(); ++i) {
            std::int64_t t = g.targets[i];
            if (g.op == Opcode::R && i < g.paulis.size()) {
                t = static_cast<std::int64_t>(static_cast<std::uint32_t>(g.targets[i])) |
                    (static_cast<std::int64_t>(g.paulis[i]) << 32);
            }
            e.targs.push_back(t);
        }
        const std::size_t before = e.params.size();
        if (g.op == Opcode::U) {
            e.params.push_back(static_cast<double>(g.matrix.rows()));
            detail::pushMatrix(e.params, g.matrix);
        } else if (g.op == Opcode::Kraus) {
            e.params.push_back(static_cast<double>(g.kraus.size()));
            e.params.push_back(g.kraus.empty() ? 0.0 : static_cast<double>(g.kraus[0].rows()));
            for (const auto &k : g.kraus) detail::pushMatrix(e.params, k);
        } else {
            e.params.insert(e.params.end(), g.params.begin(), g.params.end());
        }
        e.paramCounts.push_back(static_cast<std::int64_t>(e.params.size() - before));
    }
    return e;
}

inline Circuit decodeCircuit(const EncodedCircuit &e) {
    const std::size_t n = e.opcodes.size();
    if (e.ctrlCounts.size() != n || e.targCounts.size() != n || e.paramCounts.size() != n) {
        throw malformed("count arrays disagree with the gate count");
    }
    Circuit c;
    if (e.declaredQubits >= 0) {
        if (e.declaredQubits > std::numeric_limits<int>::max()) throw malformed("declared width out of range");
        c.declaredQubits = static_cast<int>(e.declaredQubits);
    } else if (e.declaredQubits != -1) {
        throw malformed("bad declared width");
    }
    std::size_t ci = 0, ti = 0, pi = 0;
    auto take = [](std::size_t &pos, std::int64_t count, std::size_t size) {
        if (count < 0 || static_cast<std::uint64_t>(count) > size - pos) throw malformed("count exceeds array");
        const std::size_t start = pos;
        pos += static_cast<std::size_t>(count);
        return start;
    };
    auto qubit = [](std::int64_t v) {
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            throw malformed("qubit index out of range");
        }
        return static_cast<int>(v);
    };
    c.gates.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (e.opcodes[k] < 0 || e.opcodes[k] >= kNumOpcodes) {
            throw malformed("unknown opcode " + std::to_string(e.opcodes[k]));
        }
        Gate g;
        g.op = static_cast<Opcode>(e.opcodes[k]);
        const std::size_t c0 = take(ci, e.ctrlCounts[k], e.ctrls.size());
        for (std::size_t i = c0; i < ci; ++i) g.controls.push_back(qubit(e.ctrls[i]));
        const std::size_t t0 = take(ti, e.targCounts[k], e.targs.size());
        for (std::size_t i = t0; i < ti; ++i) {
            std::int64_t t = e.targs[i];
            if (g.op == Opcode::R) {
                const std::int64_t axis = t >> 32;
                if (axis < 1 || axis > 3) throw malformed("bad Pauli axis");
                g.paulis.push_back(static_cast<PauliAxis>(axis));
                t = static_cast<std::int32_t>(t & 0xFFFFFFFF);
            }
            g.targets.push_back(qubit(t));
        }
        const std::size_t p0 = take(pi, e.paramCounts[k], e.params.size());
        const double *p = e.params.data() + p0;
        const std::size_t np = pi - p0;
        if (g.op == Opcode::U) {
            if (np < 1) throw malformed("U gate without a matrix");
            const auto dim = detail::matrixDim(p[0]);
            if (np != 1 + 2 * static_cast<std::size_t>(dim * dim)) throw malformed("U matrix size mismatch");
            g.matrix = detail::readMatrix(p + 1, dim);
        } else if (g.op == Opcode::Kraus) {
            if (np < 2 || !(p[0] >= 1.0) || p[0] != std::floor(p[0])) throw malformed("Kraus map without operators");
            const auto dim = detail::matrixDim(p[1]);
            const std::size_t per = 2 * static_cast<std::size_t>(dim * dim);
            if (p[0] > static_cast<double>(np) || np != 2 + per * static_cast<std::size_t>(p[0])) {
                throw malformed("Kraus size mismatch");
            }
            const auto count = static_cast<std::size_t>(p[0]);
            for (std::size_t i = 0; i < count; ++i) g.kraus.push_back(detail::readMatrix(p + 2 + i * per, dim));
        } else {
            g.params.assign(p, p + np);
        }
        c.gates.push_back(std::move(g));
    }
    if (ci != e.ctrls.size() || ti != e.targs.size() || pi != e.params.size()) {
        throw malformed("array lengths disagree with counts");
    }
    return c;
}

/// Serialises an encoded circuit as a stream of gate records, each a
/// packed word (opcode, control, target and parameter counts) followed by
/// its controls, targets and parameters. A leading width record is present
/// only for circuits with a declared width. The record stream occupies
/// exactly 8 bytes per gate, control, target and parameter.
inline void writeEncoded(Writer &w, const EncodedCircuit &e) {
    if (e.declaredQubits >= 0) w.i64(kWidthRecord | (e.declaredQubits << kCtrlShift));
    std::size_t ci = 0, ti = 0, pi = 0;
    for (std::size_t k = 0; k < e.opcodes.size(); ++k) {
        if (e.ctrlCounts[k] > kCountMask16 || e.targCounts[k] > kCountMask16 || e.paramCounts[k] > kParamMask) {
            throw Error(ErrorCode::InvalidArgument, "gate too large to encode", static_cast<std::int64_t>(k));
        }
        w.i64(e.opcodes[k] | (e.ctrlCounts[k] << kCtrlShift) | (e.targCounts[k] << kTargShift) |
              (e.paramCounts[k] << kParamShift));
        for (std::int64_t i = 0; i < e.ctrlCounts[k]; ++i) w.i64(e.ctrls[ci++]);
        for (std::int64_t i = 0; i < e.targCounts[k]; ++i) w.i64(e.targs[ti++]);
        for (std::int64_t i = 0; i < e.paramCounts[k]; ++i) w.f64(e.params[pi++]);
    }
}

/// Reads gate records until the reader is exhausted.
inline EncodedCircuit readEncoded(Reader &r) {
    EncodedCircuit e;
    bool first = true;
    while (!r.atEnd()) {
        const std::int64_t word = r.i64();
        const std::int64_t op = word & 0xFF;
        if (op == kWidthRecord) {
            if (!first) throw malformed("width record after the first gate");
            e.declaredQubits = word >> kCtrlShift;
            first = false;
            continue;
        }
        first = false;
        const std::int64_t nc = (word >> kCtrlShift) & kCountMask16;
        const std::int64_t nt = (word >> kTargShift) & kCountMask16;
        const std::int64_t np = (word >> kParamShift) & kParamMask;
        if (word < 0) throw malformed("reserved bit set in gate record");
        if (static_cast<std::uint64_t>(nc + nt + np) > r.remaining() / 8) throw malformed("gate record truncated");
        e.opcodes.push_back(op);
        e.ctrlCounts.push_back(nc);
        e.targCounts.push_back(nt);
        e.paramCounts.push_back(np);
        for (std::int64_t i = 0; i < nc; ++i) e.ctrls.push_back(r.i64());
        for (std::int64_t i = 0; i < nt; ++i) e.targs.push_back(r.i64());
        for (std::int64_t i = 0; i < np; ++i) e.params.push_back(r.f64());
    }
    return e;
}

inline std::vector<std::uint8_t> serializeCircuit(const Circuit &c) {
    Writer w;
    writeEncoded(w, encodeCircuit(c));
    return w.take();
}

inline Circuit deserializeCircuit(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    return decodeCircuit(readEncoded(r));
}

// ---------------------------------------------------------------------------
// Pauli sums

inline void writePauliSum(Writer &w, const PauliSum &h) {
    w.i64(static_cast<std::int64_t>(h.terms.size()));
    for (const auto &t : h.terms) {
        w.f64(t.coeff);
        w.i64(static_cast<std::int64_t>(t.string.size()));
        for (const auto &f : t.string) {
            w.i64(static_cast<std::int64_t>(static_cast<std::uint32_t>(f.qubit)) | (static_cast<std::int64_t>(f.axis) << 32));
        }
    }
}

inline PauliSum readPauliSum(Reader &r) {
    PauliSum h;
    const std::size_t n = r.count(16);
    for (std::size_t k = 0; k < n; ++k) {
        PauliTerm t;
        t.coeff = r.f64();
        const std::size_t len = r.count(8);
        for (std::size_t i = 0; i < len; ++i) {
            const std::int64_t v = r.i64();
            const std::int64_t axis = v >> 32;
            if (axis < 1 || axis > 3) throw malformed("bad Pauli axis");
            t.string.push_back({static_cast<PauliAxis>(axis), static_cast<std::int32_t>(v & 0xFFFFFFFF)});
        }
        h.terms.push_back(std::move(t));
    }
    return h;
}

// ---------------------------------------------------------------------------
// Frames

struct FrameHeader {
    std::array<std::uint8_t, 4> magic{};
    std::uint16_t version = 0;
    std::uint8_t kind = 0;
    std::uint64_t length = 0;
};

inline std::vector<std::uint8_t> frame(Kind kind, std::span<const std::uint8_t> body,
                                       std::uint16_t version = kProtocolVersion) {
    Writer w;
    w.bytes(kMagic);
    w.u16(version);
    w.u8(static_cast<std::uint8_t>(kind));
    w.u64(body.size());
    w.bytes(body);
    return w.take();
}

inline FrameHeader parseHeader(std::span<const std::uint8_t, kFrameHeaderSize> bytes) {
    FrameHeader h;
    std::copy(bytes.begin(), bytes.begin() + 4, h.magic.begin());
    Reader r(std::span<const std::uint8_t>(bytes.data() + 4, kFrameHeaderSize - 4));
    h.version = r.u16();
    h.kind = r.u8();
    h.length = r.u64();
    return h;
}

inline std::vector<std::uint8_t> errorBody(const ValidationError &e) {
    Writer w;
    w.i64(static_cast<std::int64_t>(e.code));
    w.i64(e.gateIndex);
    w.string(e.message);
    return w.take();
}

inline ValidationError readErrorBody(std::span<const std::uint8_t> body) {
    Reader r(body);
    ValidationError e;
    e.code = static_cast<ErrorCode>(r.i64());
    e.gateIndex = r.i64();
    e.message = r.string();
    return e;
}

inline void writeAmps(Writer &w, std::span<const Complex> values) {
    w.i64(static_cast<std::int64_t>(values.size()));
    for (const auto &z : values) w.complex(z);
}

inline std::vector<Complex> readAmps(Reader &r) {
    const std::size_t n = r.count(16);
    std::vector<Complex> v(n);
    for (auto &z : v) z = r.complex();
    return v;
}

} // namespace qlink::wire
