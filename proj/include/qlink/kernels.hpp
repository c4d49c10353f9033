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

// Dense amplitude kernels. Qubit q is bit q of the basis index (qubit 0 least
// significant). A density matrix of n qubits is stored row-major, so in the
// flat index the column occupies bits [0, n) and the row bits [n, 2n); left
// multiplication acts on the shifted qubits q + n.

#include "qlink/gate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qlink {

using Index = std::int64_t;

namespace detail {

inline std::atomic<int> &threadCap() {
    static std::atomic<int> cap{0};
    return cap;
}

} // namespace detail

/// Caps kernel parallelism. Zero restores the OpenMP default.
inline void setNumThreads(int n) { detail::threadCap().store(std::max(0, n)); }

inline int numThreads() {
#ifdef _OPENMP
    const int cap = detail::threadCap().load();
    return cap > 0 ? cap : omp_get_max_threads();
#else
    return 1;
#endif
}

namespace kernels {

/// Below this many loop iterations the kernels stay serial.
inline constexpr Index kParallelThreshold = Index{1} << 14;

#ifdef _OPENMP
#define QLINK_PRAGMA(x) _Pragma(#x)
#define QLINK_PARALLEL_FOR(iterations) \
    QLINK_PRAGMA(omp parallel for num_threads(::qlink::numThreads()) schedule(static) \
                     if ((iterations) >= ::qlink::kernels::kParallelThreshold))
#else
#define QLINK_PARALLEL_FOR(iterations)
#endif

inline Index bit(int q) { return Index{1} << q; }

/// Inserts a zero at bit position `q`.
inline Index insertZeroBit(Index k, int q) {
    const Index low = k & (bit(q) - 1);
    return ((k >> q) << (q + 1)) | low;
}

/// Inserts zeros at each position in `sortedQubits` (ascending).
inline Index insertZeroBits(Index k, std::span<const int> sortedQubits) {
    for (int q : sortedQubits) k = insertZeroBit(k, q);
    return k;
}

inline Index maskOf(std::span<const int> qubits, int shift = 0) {
    Index m = 0;
    for (int q : qubits) m |= bit(q + shift);
    return m;
}

using Mat2 = std::array<Complex, 4>;

inline Mat2 toMat2(const CMatrix &m, bool conjugate = false) {
    Mat2 out{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
    if (conjugate)
        for (auto &z : out) z = std::conj(z);
    return out;
}

/// Row-major copy of a small dense matrix.
inline std::vector<Complex> toRowMajor(const CMatrix &m, bool conjugate = false) {
    std::vector<Complex> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const Complex z = m(r, c);
            out[static_cast<std::size_t>(r * m.cols() + c)] = conjugate ? std::conj(z) : z;
        }
    return out;
}

/// Single-target matrix, optionally controlled.
inline void applyOneQubit(std::span<Complex> amps, int target, const Mat2 &m, Index ctrlMask) {
    const Index half = static_cast<Index>(amps.size()) >> 1;
    const Index tb = bit(target);
    Complex *a = amps.data();
    QLINK_PARALLEL_FOR(half)
    for (Index k = 0; k < half; ++k) {
        const Index i0 = insertZeroBit(k, target);
        if ((i0 & ctrlMask) != ctrlMask) continue;
        const Index i1 = i0 | tb;
        const Complex x0 = a[i0];
        const Complex x1 = a[i1];
        a[i0] = m[0] * x0 + m[1] * x1;
        a[i1] = m[2] * x0 + m[3] * x1;
    }
}

/// Two-target matrix (row-major 4x4, local bit 0 is `t0`).
inline void applyTwoQubit(std::span<Complex> amps, int t0, int t1, std::span<const Complex> m, Index ctrlMask) {
    const Index quarter = static_cast<Index>(amps.size()) >> 2;
    const std::array<int, 2> sorted{std::min(t0, t1), std::max(t0, t1)};
    const std::array<Index, 4> off{0, bit(t0), bit(t1), bit(t0) | bit(t1)};
    Complex *a = amps.data();
    QLINK_PARALLEL_FOR(quarter)
    for (Index k = 0; k < quarter; ++k) {
        const Index base = insertZeroBits(k, sorted);
        if ((base & ctrlMask) != ctrlMask) continue;
        const std::array<Complex, 4> x{a[base + off[0]], a[base + off[1]], a[base + off[2]], a[base + off[3]]};
        for (int r = 0; r < 4; ++r) {
            a[base + off[r]] = m[r * 4 + 0] * x[0] + m[r * 4 + 1] * x[1] + m[r * 4 + 2] * x[2] + m[r * 4 + 3] * x[3];
        }
    }
}

/// Arbitrary k-target matrix by gathering 2^k-amplitude blocks.
inline void applyMultiQubit(std::span<Complex> amps, std::span<const int> targets, std::span<const Complex> m,
                            Index ctrlMask) {
    const int k = static_cast<int>(targets.size());
    const Index localDim = Index{1} << k;
    std::vector<int> sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<Index> off(static_cast<std::size_t>(localDim), 0);
    for (Index l = 0; l < localDim; ++l)
        for (int j = 0; j < k; ++j)
            if ((l >> j) & 1) off[static_cast<std::size_t>(l)] |= bit(targets[static_cast<std::size_t>(j)]);

    const Index blocks = static_cast<Index>(amps.size()) >> k;
    Complex *a = amps.data();
#ifdef _OPENMP
#pragma omp parallel num_threads(::qlink::numThreads()) if (blocks >= kParallelThreshold)
#endif
    {
        std::vector<Complex> buf(static_cast<std::size_t>(localDim));
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (Index b = 0; b < blocks; ++b) {
            const Index base = insertZeroBits(b, sorted);
            if ((base & ctrlMask) != ctrlMask) continue;
            for (Index l = 0; l < localDim; ++l) buf[static_cast<std::size_t>(l)] = a[base + off[static_cast<std::size_t>(l)]];
            for (Index r = 0; r < localDim; ++r) {
                Complex acc = 0.0;
                const Complex *row = m.data() + r * localDim;
                for (Index c = 0; c < localDim; ++c) acc += row[c] * buf[static_cast<std::size_t>(c)];
                a[base + off[static_cast<std::size_t>(r)]] = acc;
            }
        }
    }
}

/// Dispatches on target count to the dedicated kernels.
inline void applyMatrix(std::span<Complex> amps, std::span<const int> targets, const CMatrix &m, Index ctrlMask,
                        bool conjugate = false) {
    if (targets.size() == 1) {
        applyOneQubit(amps, targets[0], toMat2(m, conjugate), ctrlMask);
    } else if (targets.size() == 2) {
        const auto rm = toRowMajor(m, conjugate);
        applyTwoQubit(amps, targets[0], targets[1], rm, ctrlMask);
    } else {
        const auto rm = toRowMajor(m, conjugate);
        applyMultiQubit(amps, targets, rm, ctrlMask);
    }
}

inline void applySwap(std::span<Complex> amps, int q1, int q2, Index ctrlMask) {
    const Index quarter = static_cast<Index>(amps.size()) >> 2;
    const std::array<int, 2> sorted{std::min(q1, q2), std::max(q1, q2)};
    Complex *a = amps.data();
    QLINK_PARALLEL_FOR(quarter)
    for (Index k = 0; k < quarter; ++k) {
        const Index base = insertZeroBits(k, sorted);
        if ((base & ctrlMask) != ctrlMask) continue;
        std::swap(a[base | bit(q1)], a[base | bit(q2)]);
    }
}

/// Bit masks describing a Pauli string P with P|j> = phase(j) |j ^ flip>.
struct PauliMasks {
    Index flip = 0;  // X or Y
    Index sign = 0;  // Y or Z
    int numY = 0;

    /// i^numY (-1)^{popcount(j & sign)}
    [[nodiscard]] Complex phase(Index j) const {
        static constexpr std::array<Complex, 4> powers{Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
        const Complex base = powers[static_cast<std::size_t>(numY & 3)];
        return (std::popcount(static_cast<std::uint64_t>(j & sign)) & 1) ? -base : base;
    }
};

inline PauliMasks pauliMasks(std::span<const int> targets, std::span<const PauliAxis> axes, int shift = 0) {
    PauliMasks pm;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const Index b = bit(targets[j] + shift);
        switch (axes[j]) {
        case PauliAxis::X: pm.flip |= b; break;
        case PauliAxis::Y: pm.flip |= b; pm.sign |= b; ++pm.numY; break;
        case PauliAxis::Z: pm.sign |= b; break;
        }
    }
    return pm;
}

/// exp(-i theta P / 2), optionally controlled.
inline void applyPauliRotation(std::span<Complex> amps, const PauliMasks &pm, double theta, Index ctrlMask) {
    const double c = std::cos(theta / 2.0);
    const Complex mis(0.0, -std::sin(theta / 2.0));
    Complex *a = amps.data();
    const Index dim = static_cast<Index>(amps.size());
    if (pm.flip == 0) {
        QLINK_PARALLEL_FOR(dim)
        for (Index i = 0; i < dim; ++i) {
            if ((i & ctrlMask) != ctrlMask) continue;
            a[i] *= c + mis * pm.phase(i);
        }
        return;
    }
    const int pivot = std::countr_zero(static_cast<std::uint64_t>(pm.flip));
    const Index half = dim >> 1;
    QLINK_PARALLEL_FOR(half)
    for (Index k = 0; k < half; ++k) {
        const Index i = insertZeroBit(k, pivot);
        if ((i & ctrlMask) != ctrlMask) continue;
        const Index j = i ^ pm.flip;
        const Complex xi = a[i];
        const Complex xj = a[j];
        a[i] = c * xi + mis * pm.phase(j) * xj;
        a[j] = c * xj + mis * pm.phase(i) * xi;
    }
}

/// In-place P|psi>.
inline void applyPauliString(std::span<Complex> amps, const PauliMasks &pm) {
    Complex *a = amps.data();
    const Index dim = static_cast<Index>(amps.size());
    if (pm.flip == 0) {
        QLINK_PARALLEL_FOR(dim)
        for (Index i = 0; i < dim; ++i) a[i] *= pm.phase(i);
        return;
    }
    const int pivot = std::countr_zero(static_cast<std::uint64_t>(pm.flip));
    const Index half = dim >> 1;
    QLINK_PARALLEL_FOR(half)
    for (Index k = 0; k < half; ++k) {
        const Index i = insertZeroBit(k, pivot);
        const Index j = i ^ pm.flip;
        const Complex xi = a[i];
        a[i] = pm.phase(j) * a[j];
        a[j] = pm.phase(i) * xi;
    }
}

/// out += coeff * P|in>.
inline void accumulatePauliString(std::span<const Complex> in, std::span<Complex> out, const PauliMasks &pm,
                                  double coeff) {
    const Index dim = static_cast<Index>(in.size());
    QLINK_PARALLEL_FOR(dim)
    for (Index j = 0; j < dim; ++j) {
        out[static_cast<std::size_t>(j ^ pm.flip)] += coeff * pm.phase(j) * in[static_cast<std::size_t>(j)];
    }
}

/// Zeroes every amplitude whose control bits are not all set.
inline void projectOntoControls(std::span<Complex> amps, Index ctrlMask) {
    const Index dim = static_cast<Index>(amps.size());
    for (Index i = 0; i < dim; ++i)
        if ((i & ctrlMask) != ctrlMask) amps[static_cast<std::size_t>(i)] = 0.0;
}

// ---- density-matrix channels ------------------------------------------------

/// Visits each 2x2 (row bit, column bit) block of qubit q.
template <class F> void forEachQubitBlock(std::span<Complex> rho, int n, int q, F &&f) {
    const Index quarter = static_cast<Index>(rho.size()) >> 2;
    const Index cb = bit(q);
    const Index rb = bit(q + n);
    const std::array<int, 2> sorted{q, q + n};
    Complex *a = rho.data();
    QLINK_PARALLEL_FOR(quarter)
    for (Index k = 0; k < quarter; ++k) {
        const Index base = insertZeroBits(k, sorted);
        f(a[base], a[base | cb], a[base | rb], a[base | rb | cb]);
    }
}

/// (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)
inline void mixDepolarising(std::span<Complex> rho, int n, int q, double p) {
    const double keep = 1.0 - 2.0 * p / 3.0;
    const double move = 2.0 * p / 3.0;
    const double off = 1.0 - 4.0 * p / 3.0;
    forEachQubitBlock(rho, n, q, [=](Complex &r00, Complex &r01, Complex &r10, Complex &r11) {
        const Complex a = r00;
        const Complex d = r11;
        r00 = keep * a + move * d;
        r11 = keep * d + move * a;
        r01 *= off;
        r10 *= off;
    });
}

/// (1-p) rho + p Z rho Z
inline void mixDephasing(std::span<Complex> rho, int n, int q, double p) {
    const double off = 1.0 - 2.0 * p;
    forEachQubitBlock(rho, n, q, [=](Complex &, Complex &r01, Complex &r10, Complex &) {
        r01 *= off;
        r10 *= off;
    });
}

/// Kraus {[[1,0],[0,sqrt(1-p)]], [[0,sqrt(p)],[0,0]]}
inline void mixDamping(std::span<Complex> rho, int n, int q, double p) {
    const double s = std::sqrt(1.0 - p);
    forEachQubitBlock(rho, n, q, [=](Complex &r00, Complex &r01, Complex &r10, Complex &r11) {
        r00 += p * r11;
        r11 *= 1.0 - p;
        r01 *= s;
        r10 *= s;
    });
}

/// Visits each 4x4 block over qubits q1, q2. `idx[a*4+b]` addresses entry
/// (row a, column b) with local bit 0 = q1.
template <class F> void forEachPairBlock(std::span<Complex> rho, int n, int q1, int q2, F &&f) {
    const Index blocks = static_cast<Index>(rho.size()) >> 4;
    std::array<int, 4> sorted{q1, q2, q1 + n, q2 + n};
    std::sort(sorted.begin(), sorted.end());
    std::array<Index, 16> off{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            Index o = 0;
            if (r & 1) o |= bit(q1 + n);
            if (r & 2) o |= bit(q2 + n);
            if (c & 1) o |= bit(q1);
            if (c & 2) o |= bit(q2);
            off[static_cast<std::size_t>(r * 4 + c)] = o;
        }
    Complex *a = rho.data();
    QLINK_PARALLEL_FOR(blocks)
    for (Index k = 0; k < blocks; ++k) {
        const Index base = insertZeroBits(k, sorted);
        f(a, base, off);
    }
}

/// (1-p) rho + p/15 sum over the 15 non-identity two-qubit Paulis, which is
/// (1 - 16p/15) rho + (4p/15) Tr_{q1,q2}(rho) (x) I.
inline void mixTwoQubitDepolarising(std::span<Complex> rho, int n, int q1, int q2, double p) {
    const double keep = 1.0 - 16.0 * p / 15.0;
    const double spread = 4.0 * p / 15.0;
    forEachPairBlock(rho, n, q1, q2, [=](Complex *a, Index base, const std::array<Index, 16> &off) {
        Complex trace = 0.0;
        for (int d = 0; d < 4; ++d) trace += a[base + off[static_cast<std::size_t>(d * 5)]];
        for (int e = 0; e < 16; ++e) a[base + off[static_cast<std::size_t>(e)]] *= keep;
        for (int d = 0; d < 4; ++d) a[base + off[static_cast<std::size_t>(d * 5)]] += spread * trace;
    });
}

/// (1-p) rho + p/3 (Z1 rho Z1 + Z2 rho Z2 + Z1Z2 rho Z1Z2)
inline void mixTwoQubitDephasing(std::span<Complex> rho, int n, int q1, int q2, double p) {
    const double off = 1.0 - 4.0 * p / 3.0;
    forEachPairBlock(rho, n, q1, q2, [=](Complex *a, Index base, const std::array<Index, 16> &offs) {
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (r != c) a[base + offs[static_cast<std::size_t>(r * 4 + c)]] *= off;
    });
}

/// sum_k K rho K^dagger over k targets, block by block.
inline void applyKrausMap(std::span<Complex> rho, int n, std::span<const int> targets, const std::vector<CMatrix> &ops) {
    const int k = static_cast<int>(targets.size());
    const Index localDim = Index{1} << k;
    std::vector<int> sorted;
    for (int t : targets) {
        sorted.push_back(t);
        sorted.push_back(t + n);
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<Index> rowOff(static_cast<std::size_t>(localDim), 0), colOff(static_cast<std::size_t>(localDim), 0);
    for (Index l = 0; l < localDim; ++l)
        for (int j = 0; j < k; ++j)
            if ((l >> j) & 1) {
                rowOff[static_cast<std::size_t>(l)] |= bit(targets[static_cast<std::size_t>(j)] + n);
                colOff[static_cast<std::size_t>(l)] |= bit(targets[static_cast<std::size_t>(j)]);
            }
    const Index blocks = static_cast<Index>(rho.size()) >> (2 * k);
    Complex *a = rho.data();
#ifdef _OPENMP
#pragma omp parallel num_threads(::qlink::numThreads()) if (blocks >= kParallelThreshold)
#endif
    {
        CMatrix block(localDim, localDim);
        CMatrix result(localDim, localDim);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (Index b = 0; b < blocks; ++b) {
            const Index base = insertZeroBits(b, sorted);
            for (Index r = 0; r < localDim; ++r)
                for (Index c = 0; c < localDim; ++c)
                    block(r, c) = a[base + rowOff[static_cast<std::size_t>(r)] + colOff[static_cast<std::size_t>(c)]];
            result.setZero();
            for (const auto &op : ops) result.noalias() += op * block * op.adjoint();
            for (Index r = 0; r < localDim; ++r)
                for (Index c = 0; c < localDim; ++c)
                    a[base + rowOff[static_cast<std::size_t>(r)] + colOff[static_cast<std::size_t>(c)]] = result(r, c);
        }
    }
}

} // namespace kernels

} // namespace qlink
