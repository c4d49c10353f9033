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

#include "qlink/circuit_matrix.hpp"
#include "qlink/circuit_text.hpp"
#include "qlink/error.hpp"
#include "qlink/gate.hpp"

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace qlink {

/// coeff * string; an empty string is the identity.
struct PauliTerm {
    double coeff = 0.0;
    PauliString string;

    friend bool operator==(const PauliTerm &, const PauliTerm &) = default;
};

/// Real-weighted sum of Pauli strings, kept in the order given.
struct PauliSum {
    std::vector<PauliTerm> terms;

    friend bool operator==(const PauliSum &, const PauliSum &) = default;

    [[nodiscard]] int numQubits() const {
        int width = 0;
        for (const auto &t : terms)
            for (const auto &f : t.string) width = std::max(width, f.qubit + 1);
        return width;
    }

    PauliSum &add(double coeff, PauliString string = {}) {
        terms.push_back({coeff, std::move(string)});
        return *this;
    }
};

inline PauliString pauliString(std::initializer_list<std::pair<char, int>> factors) {
    PauliString s;
    for (auto [c, q] : factors) s.push_back({pauliFromChar(c).value(), q});
    return s;
}

namespace detail {

class PauliSumParser {
  public:
    explicit PauliSumParser(std::string_view text) : in_(text) {}

    PauliSum parse() {
        PauliSum sum;
        in_.skipSpace(true);
        if (in_.atEnd()) return sum;
        sum.terms.push_back(term(false));
        while (true) {
            const int lineBefore = in_.line();
            in_.skipSpace(true);
            if (in_.atEnd()) break;
            bool negate = false;
            if (in_.peek() == '+' || in_.peek() == '-') {
                negate = in_.peek() == '-';
                in_.advance();
            } else if (in_.line() == lineBefore) {
                in_.fail("expected '+' or '-' between terms" + in_.found());
            }
            PauliTerm t = term(true);
            if (negate) t.coeff = -t.coeff;
            sum.terms.push_back(std::move(t));
        }
        return sum;
    }

  private:
    PauliTerm term(bool afterOperator) {
        in_.skipSpace(true);
        PauliTerm t{1.0, {}};
        const char c = in_.peek();
        const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                             (!afterOperator && (c == '-' || c == '+'));
        if (numeric) {
            t.coeff = in_.real();
            if (!in_.accept('*', false)) {
                in_.skipSpace(false);
                if (!pauliFromChar(in_.peek())) return t;
            }
        }
        do {
            in_.skipSpace(false);
            const auto axis = pauliFromChar(in_.peek());
            if (!axis) in_.fail("expected a Pauli X, Y or Z" + in_.found());
            in_.advance();
            const long long q = in_.integer(false);
            if (q < 0 || q > (1 << 20)) in_.fail("qubit index out of range", ErrorCode::QubitIndexOutOfRange);
            for (const auto &f : t.string)
                if (f.qubit == q) in_.fail("qubit " + std::to_string(q) + " repeated in one term", ErrorCode::DuplicateQubit);
            t.string.push_back({*axis, static_cast<int>(q)});
            in_.skipSpace(false);
        } while (pauliFromChar(in_.peek()));
        return t;
    }

    TextCursor in_;
};

} // namespace detail

/// Parses `c * A q B q ... + c ...`. Newlines between terms act as '+'.
inline PauliSum parsePauliSum(std::string_view text) { return detail::PauliSumParser(text).parse(); }

inline std::string printPauliSum(const PauliSum &h) {
    std::string out;
    for (std::size_t k = 0; k < h.terms.size(); ++k) {
        const auto &t = h.terms[k];
        if (k == 0) {
            out += formatReal(t.coeff);
        } else {
            out += std::signbit(t.coeff) ? " - " : " + ";
            out += formatReal(std::abs(t.coeff));
        }
        if (!t.string.empty()) {
            out += " *";
            for (const auto &f : t.string) {
                out += ' ';
                out += pauliChar(f.axis);
                out += ' ' + std::to_string(f.qubit);
            }
        }
    }
    return out;
}

/// Dense matrix of the sum, assembled entry by entry from the 2x2 factors.
inline CMatrix hamiltonianMatrix(const PauliSum &h, int numQubits) {
    if (numQubits < 1 || numQubits > kDenseQubitCap) {
        throw Error(ErrorCode::ResourceExhausted,
                    "dense matrices are limited to 1.." + std::to_string(kDenseQubitCap) + " qubits");
    }
    if (h.numQubits() > numQubits) {
        throw Error(ErrorCode::QubitIndexOutOfRange, "Pauli sum acts beyond " + std::to_string(numQubits) + " qubits");
    }
    const Eigen::Index dim = Eigen::Index{1} << numQubits;
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto &t : h.terms) {
        std::vector<CMatrix> factors;
        for (const auto &f : t.string) factors.push_back(pauliMatrix(f.axis));
        for (Eigen::Index col = 0; col < dim; ++col) {
            Eigen::Index row = col;
            for (const auto &f : t.string)
                if (f.axis != PauliAxis::Z) row ^= Eigen::Index{1} << f.qubit;
            Complex value = t.coeff;
            for (std::size_t j = 0; j < t.string.size(); ++j) {
                const int q = t.string[j].qubit;
                value *= factors[j]((row >> q) & 1, (col >> q) & 1);
            }
            m(row, col) += value;
        }
    }
    return m;
}

} // namespace qlink
