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

#include "qlink/circuit_text.hpp"
#include "qlink/gate.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

namespace qlink {

/// Column assignment for a circuit diagram. Each gate occupies the inclusive
/// qubit interval spanned by its controls and targets, and is placed in the
/// first column after the last one used anywhere on that interval.
struct DiagramLayout {
    int numQubits = 0;
    int numColumns = 0;
    std::vector<int> column; // per gate, 0-based
};

inline DiagramLayout layoutCircuit(const Circuit &c) {
    DiagramLayout layout;
    layout.numQubits = c.numQubits();
    std::vector<int> last(static_cast<std::size_t>(layout.numQubits), -1);
    for (const auto &g : c.gates) {
        const auto qs = g.qubits();
        if (qs.empty()) {
            layout.column.push_back(layout.numColumns);
            layout.numColumns += 1;
            continue;
        }
        const int lo = *std::min_element(qs.begin(), qs.end());
        const int hi = *std::max_element(qs.begin(), qs.end());
        int col = 0;
        for (int q = lo; q <= hi; ++q) col = std::max(col, last[static_cast<std::size_t>(q)] + 1);
        for (int q = lo; q <= hi; ++q) last[static_cast<std::size_t>(q)] = col;
        layout.column.push_back(col);
        layout.numColumns = std::max(layout.numColumns, col + 1);
    }
    return layout;
}

namespace detail {

inline std::string shortReal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// Text drawn on target `j` of gate `g`.
inline std::string targetLabel(const Gate &g, std::size_t j) {
    switch (g.op) {
    case Opcode::SWAP: return "x";
    case Opcode::R: return std::string("R") + pauliChar(g.paulis.at(j)) + "(" + shortReal(g.params.at(0)) + ")";
    case Opcode::U: return "U";
    case Opcode::Kraus: return "Kraus";
    default: break;
    }
    std::string label(opcodeName(g.op));
    if (!g.params.empty()) label += "(" + shortReal(g.params[0]) + ")";
    return label;
}

inline std::string xmlEscape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

/// Plain-text diagram: one wire per qubit, '@' for controls, unitary labels
/// as [..], channels as {..}.
inline std::string drawCircuitAscii(const Circuit &c) {
    const auto layout = layoutCircuit(c);
    const int n = layout.numQubits;
    if (n == 0) return "";
    const int rows = 2 * n - 1;
    // cells[col][row]
    std::vector<std::vector<std::string>> cells(static_cast<std::size_t>(layout.numColumns),
                                                std::vector<std::string>(static_cast<std::size_t>(rows)));
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto &g = c.gates[i];
        auto &col = cells[static_cast<std::size_t>(layout.column[i])];
        const auto qs = g.qubits();
        const int lo = *std::min_element(qs.begin(), qs.end());
        const int hi = *std::max_element(qs.begin(), qs.end());
        for (int r = 2 * lo; r <= 2 * hi; ++r) col[static_cast<std::size_t>(r)] = "|";
        for (int q : g.controls) col[static_cast<std::size_t>(2 * q)] = "@";
        for (std::size_t j = 0; j < g.targets.size(); ++j) {
            const auto label = detail::targetLabel(g, j);
            const bool plain = g.op == Opcode::SWAP;
            col[static_cast<std::size_t>(2 * g.targets[j])] =
                plain ? label : isChannel(g.op) ? "{" + label + "}" : "[" + label + "]";
        }
    }
    std::vector<std::string> lines(static_cast<std::size_t>(rows));
    std::size_t prefix = 0;
    for (int q = 0; q < n; ++q) prefix = std::max(prefix, ("q" + std::to_string(q) + ": ").size());
    for (int r = 0; r < rows; ++r) {
        std::string head = r % 2 == 0 ? "q" + std::to_string(r / 2) + ": " : "";
        head.resize(prefix, ' ');
        lines[static_cast<std::size_t>(r)] = head + (r % 2 == 0 ? "-" : " ");
    }
    for (const auto &col : cells) {
        std::size_t width = 1;
        for (const auto &cell : col) width = std::max(width, cell.size());
        for (int r = 0; r < rows; ++r) {
            const bool wire = r % 2 == 0;
            const char fill = wire ? '-' : ' ';
            const auto &cell = col[static_cast<std::size_t>(r)];
            const std::size_t left = (width - cell.size()) / 2;
            std::string s(left, fill);
            s += cell;
            s.append(width - cell.size() - left, fill);
            lines[static_cast<std::size_t>(r)] += s + std::string(1, fill) + std::string(1, fill);
        }
    }
    std::string out;
    for (auto &line : lines) {
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }
    return out;
}

/// SVG 1.1 rendering of the same layout. Channels are dashed and shaded.
inline std::string drawCircuitSvg(const Circuit &c) {
    const auto layout = layoutCircuit(c);
    const int n = std::max(layout.numQubits, 1);
    constexpr int colWidth = 70, rowHeight = 40, margin = 40, boxH = 24;
    const int width = 2 * margin + std::max(layout.numColumns, 1) * colWidth;
    const int height = 2 * margin + (n - 1) * rowHeight;
    auto xOf = [&](int col) { return margin + col * colWidth + colWidth / 2; };
    auto yOf = [&](int q) { return margin + q * rowHeight; };

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"monospace\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int q = 0; q < layout.numQubits; ++q) {
        svg += "<text x=\"4\" y=\"" + std::to_string(yOf(q) + 4) + "\">q" + std::to_string(q) + "</text>\n";
        svg += "<line x1=\"" + std::to_string(margin) + "\" y1=\"" + std::to_string(yOf(q)) + "\" x2=\"" +
               std::to_string(width - margin / 2) + "\" y2=\"" + std::to_string(yOf(q)) + "\" stroke=\"black\"/>\n";
    }
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto &g = c.gates[i];
        const auto qs = g.qubits();
        const int x = xOf(layout.column[i]);
        const int lo = *std::min_element(qs.begin(), qs.end());
        const int hi = *std::max_element(qs.begin(), qs.end());
        svg += "<g class=\"gate\" data-index=\"" + std::to_string(i) + "\">\n";
        if (hi > lo) {
            svg += "<line x1=\"" + std::to_string(x) + "\" y1=\"" + std::to_string(yOf(lo)) + "\" x2=\"" +
                   std::to_string(x) + "\" y2=\"" + std::to_string(yOf(hi)) + "\" stroke=\"black\"/>\n";
        }
        for (int q : g.controls) {
            svg += "<circle cx=\"" + std::to_string(x) + "\" cy=\"" + std::to_string(yOf(q)) +
                   "\" r=\"4\" fill=\"black\"/>\n";
        }
        for (std::size_t j = 0; j < g.targets.size(); ++j) {
            const int y = yOf(g.targets[j]);
            if (g.op == Opcode::SWAP) {
                svg += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y + 4) +
                       "\" text-anchor=\"middle\">&#215;</text>\n";
                continue;
            }
            const bool channel = isChannel(g.op);
            svg += "<rect x=\"" + std::to_string(x - colWidth / 2 + 5) + "\" y=\"" + std::to_string(y - boxH / 2) +
                   "\" width=\"" + std::to_string(colWidth - 10) + "\" height=\"" + std::to_string(boxH) + "\"" +
                   (channel ? " fill=\"#fde2e2\" stroke=\"#b00020\" stroke-dasharray=\"4 2\""
                            : " fill=\"white\" stroke=\"black\"") +
                   "/>\n";
            svg += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y + 4) +
                   "\" text-anchor=\"middle\">" + detail::xmlEscape(detail::targetLabel(g, j)) + "</text>\n";
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace qlink
