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
#include "qlink/validation.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace qlink {

/// Shortest form that still round-trips: 17 significant digits.
inline std::string formatReal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string formatComplex(Complex z) {
    std::string out = formatReal(z.real());
    if (std::signbit(z.imag())) {
        out += '-';
        out += formatReal(-z.imag());
    } else {
        out += '+';
        out += formatReal(z.imag());
    }
    out += 'i';
    return out;
}

namespace detail {

/// Character cursor with line/column tracking shared by the circuit and
/// Pauli-sum grammars.
class TextCursor {
  public:
    explicit TextCursor(std::string_view text) : text_(text) {}

    [[nodiscard]] bool atEnd() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return atEnd() ? '\0' : text_[pos_]; }
    [[nodiscard]] std::string_view rest() const { return text_.substr(pos_); }

    void advance(std::size_t n = 1) {
        for (std::size_t k = 0; k < n && !atEnd(); ++k) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    /// Skips blanks and comments. Newlines are skipped only if `newlines`.
    void skipSpace(bool newlines) {
        while (!atEnd()) {
            const char c = peek();
            if (c == '#') {
                while (!atEnd() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string &what, ErrorCode code = ErrorCode::SyntaxError) const {
        throw Error(code, "line " + std::to_string(line_) + ", column " + std::to_string(col_) + ": " + what);
    }

    void expect(char c, bool newlines = true) {
        skipSpace(newlines);
        if (peek() != c) {
            fail(std::string("expected '") + c + "'" + found());
        }
        advance();
    }

    bool accept(char c, bool newlines = true) {
        skipSpace(newlines);
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    std::string identifier() {
        std::string out;
        while (!atEnd() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            out += peek();
            advance();
        }
        return out;
    }

    bool startsNumber() const {
        const char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
    }

    double real(bool newlines = true) {
        skipSpace(newlines);
        const auto r = rest();
        double value = 0.0;
        std::size_t skip = 0;
        if (!r.empty() && r[0] == '+') skip = 1;
        const auto *first = r.data() + skip;
        const auto [ptr, ec] = std::from_chars(first, r.data() + r.size(), value);
        if (ec != std::errc() || ptr == first) {
            fail("expected a number" + found());
        }
        if (!std::isfinite(value)) {
            fail("non-finite number");
        }
        advance(static_cast<std::size_t>(ptr - r.data()));
        return value;
    }

    long long integer(bool newlines) {
        skipSpace(newlines);
        const auto r = rest();
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(r.data(), r.data() + r.size(), value);
        if (ec != std::errc() || ptr == r.data()) {
            fail("expected an integer" + found());
        }
        advance(static_cast<std::size_t>(ptr - r.data()));
        return value;
    }

    /// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
    Complex complex() {
        skipSpace(true);
        auto unitImag = [&]() -> std::optional<double> {
            const auto r = rest();
            if (r.size() >= 1 && r[0] == 'i') { advance(1); return 1.0; }
            if (r.size() >= 2 && (r[0] == '+' || r[0] == '-') && r[1] == 'i') {
                advance(2);
                return r[0] == '-' ? -1.0 : 1.0;
            }
            return std::nullopt;
        };
        if (auto im = unitImag()) {
            return {0.0, *im};
        }
        const double a = real();
        if (peek() == 'i') {
            advance();
            return {0.0, a};
        }
        if (peek() == '+' || peek() == '-') {
            if (auto im = unitImag()) {
                return {a, *im};
            }
            const bool negative = peek() == '-';
            advance();
            const double b = real(false);
            if (peek() != 'i') {
                fail("expected 'i' after imaginary part" + found());
            }
            advance();
            return {a, negative ? -b : b};
        }
        return {a, 0.0};
    }

    std::string found() const {
        if (atEnd()) return ", found end of input";
        if (peek() == '\n') return ", found end of line";
        return std::string(", found '") + peek() + "'";
    }

    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return col_; }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class CircuitParser {
  public:
    explicit CircuitParser(std::string_view text) : in_(text) {}

    Circuit parse() {
        Circuit circuit;
        while (true) {
            in_.skipSpace(true);
            while (in_.peek() == ';') {
                in_.advance();
                in_.skipSpace(true);
            }
            if (in_.atEnd()) break;

            const int line = in_.line();
            const int col = in_.column();
            const std::string name = in_.identifier();
            if (name.empty()) {
                in_.fail("expected a gate name" + in_.found());
            }
            if (name == "qubits") {
                const long long n = in_.integer(false);
                if (n < 1) in_.fail("qubit count must be positive", ErrorCode::InvalidQubitCount);
                circuit.declaredQubits = static_cast<int>(n);
            } else {
                circuit.gates.push_back(gateAfterName(name, line, col));
            }
            in_.skipSpace(false);
            if (!in_.atEnd() && in_.peek() != ';' && in_.peek() != '\n') {
                in_.fail("expected ';' or newline between gates" + in_.found());
            }
        }
        return circuit;
    }

  private:
    Gate gate() {
        in_.skipSpace(true);
        const int line = in_.line();
        const int col = in_.column();
        const std::string name = in_.identifier();
        if (name.empty()) {
            in_.fail("expected a gate name" + in_.found());
        }
        return gateAfterName(name, line, col);
    }

    Gate gateAfterName(const std::string &name, int line, int col) {
        if (name == "C") {
            std::vector<int> controls;
            in_.expect('[');
            do {
                controls.push_back(qubit(true));
            } while (in_.accept(','));
            in_.expect(']');
            in_.expect('(');
            Gate inner = gate();
            in_.expect(')');
            return gates::controlled(std::move(controls), std::move(inner));
        }
        const auto op = opcodeFromName(name);
        if (!op) {
            throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                                    ": unknown gate '" + name + "'");
        }
        Gate g;
        g.op = *op;
        switch (*op) {
        case Opcode::R: {
            in_.expect('[');
            g.params.push_back(in_.real());
            in_.expect(']');
            in_.expect('(');
            do {
                in_.skipSpace(true);
                const auto axis = pauliFromChar(in_.peek());
                if (!axis) in_.fail("expected a Pauli X, Y or Z" + in_.found());
                in_.advance();
                g.paulis.push_back(*axis);
                g.targets.push_back(qubit(true));
            } while (in_.accept(','));
            in_.expect(')');
            break;
        }
        case Opcode::U: {
            in_.expect('[');
            g.matrix = squareMatrix(']');
            targets(g);
            break;
        }
        case Opcode::Kraus: {
            in_.expect('[');
            const long long count = in_.integer(true);
            in_.expect(']');
            in_.expect('(');
            do {
                in_.expect('[');
                g.kraus.push_back(squareMatrix(']'));
            } while (in_.accept(','));
            in_.expect(')');
            if (static_cast<long long>(g.kraus.size()) != count) {
                in_.fail("Kraus[" + std::to_string(count) + "] lists " + std::to_string(g.kraus.size()) + " operator(s)",
                         ErrorCode::InvalidArity);
            }
            targets(g);
            break;
        }
        default: {
            in_.skipSpace(false);
            if (in_.peek() == '[') {
                in_.advance();
                do {
                    g.params.push_back(in_.real());
                } while (in_.accept(','));
                in_.expect(']');
            }
            targets(g);
            break;
        }
        }
        checkArity(g, line, col);
        return g;
    }

    int qubit(bool newlines) {
        const long long q = in_.integer(newlines);
        if (q < 0 || q > (1 << 20)) in_.fail("qubit index out of range", ErrorCode::QubitIndexOutOfRange);
        return static_cast<int>(q);
    }

    void targets(Gate &g) {
        while (true) {
            in_.skipSpace(false);
            if (!std::isdigit(static_cast<unsigned char>(in_.peek())) && in_.peek() != '-') break;
            g.targets.push_back(qubit(false));
        }
    }

    CMatrix squareMatrix(char close) {
        std::vector<Complex> entries;
        do {
            entries.push_back(in_.complex());
        } while (in_.accept(','));
        in_.expect(close);
        const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(entries.size()))));
        if (dim * dim != static_cast<Eigen::Index>(entries.size())) {
            in_.fail("matrix entry count " + std::to_string(entries.size()) + " is not a square",
                     ErrorCode::DimensionMismatch);
        }
        CMatrix m(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = entries[static_cast<std::size_t>(r * dim + c)];
        return m;
    }

    void checkArity(const Gate &g, int line, int col) const {
        const auto a = detail::arityOf(g.op);
        const int nt = static_cast<int>(g.targets.size());
        const auto where = "line " + std::to_string(line) + ", column " + std::to_string(col) + ": ";
        if (nt < a.minTargets || nt > a.maxTargets) {
            throw Error(ErrorCode::InvalidArity,
                        where + std::string(opcodeName(g.op)) + " given " + std::to_string(nt) + " target(s)");
        }
        if (static_cast<int>(g.params.size()) != a.params) {
            throw Error(ErrorCode::InvalidArity, where + std::string(opcodeName(g.op)) + " given " +
                                                     std::to_string(g.params.size()) + " parameter(s)");
        }
        if (!a.controllable && !g.controls.empty()) {
            throw Error(ErrorCode::InvalidArity, where + std::string(opcodeName(g.op)) + " cannot be controlled");
        }
    }

    TextCursor in_;
};

inline void printMatrixEntries(std::string &out, const CMatrix &m) {
    out += '[';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (r != 0 || c != 0) out += ',';
            out += formatComplex(m(r, c));
        }
    }
    out += ']';
}

} // namespace detail

/// Parses the textual circuit language. Gates are separated by ';' or
/// newlines, '#' starts a comment, and `C[c...] (gate)` nests and flattens.
inline Circuit parseCircuit(std::string_view text) { return detail::CircuitParser(text).parse(); }

/// Canonical one-gate-per-line text of a single gate.
inline std::string printGate(const Gate &g) {
    std::string body(opcodeName(g.op));
    switch (g.op) {
    case Opcode::R:
        body += '[' + formatReal(g.params.at(0)) + "] (";
        for (std::size_t j = 0; j < g.targets.size(); ++j) {
            if (j) body += ", ";
            body += pauliChar(g.paulis.at(j));
            body += ' ' + std::to_string(g.targets[j]);
        }
        body += ')';
        break;
    case Opcode::U:
        detail::printMatrixEntries(body, g.matrix);
        for (int t : g.targets) body += ' ' + std::to_string(t);
        break;
    case Opcode::Kraus:
        body += '[' + std::to_string(g.kraus.size()) + "] (";
        for (std::size_t k = 0; k < g.kraus.size(); ++k) {
            if (k) body += ", ";
            detail::printMatrixEntries(body, g.kraus[k]);
        }
        body += ')';
        for (int t : g.targets) body += ' ' + std::to_string(t);
        break;
    default:
        if (!g.params.empty()) {
            body += '[';
            for (std::size_t j = 0; j < g.params.size(); ++j) {
                if (j) body += ',';
                body += formatReal(g.params[j]);
            }
            body += ']';
        }
        for (int t : g.targets) body += ' ' + std::to_string(t);
        break;
    }
    if (g.controls.empty()) {
        return body;
    }
    std::string out = "C[";
    for (std::size_t j = 0; j < g.controls.size(); ++j) {
        if (j) out += ',';
        out += std::to_string(g.controls[j]);
    }
    return out + "] (" + body + ")";
}

inline std::string printCircuit(const Circuit &c) {
    std::string out;
    if (c.declaredQubits) {
        out += "qubits " + std::to_string(*c.declaredQubits);
    }
    for (const auto &g : c.gates) {
        if (!out.empty()) out += '\n';
        out += printGate(g);
    }
    return out;
}

} // namespace qlink
