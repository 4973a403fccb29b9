// Copyright 2026 The hdu Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDU_CHANNELS_HPP
#define HDU_CHANNELS_HPP

#include <algorithm>
#include <vector>

#include "hdu/circuit_layout.hpp"

namespace hdu {

enum class ChannelTag { MPlus, MMinus, DressedSwapChannel, MeasKet, MeasBra, Transfer, Composite };
enum class Edge { Left, Right };
enum class Side { Ket, Bra };
enum class Direction { Left, Right };

/// Superoperator on row-major vectorized q x q operators.
struct ChannelOp {
    int q = 0;
    ComplexMatrix matrix;
    ChannelTag tag = ChannelTag::Transfer;

    ComplexMatrix apply(const ComplexMatrix &rho) const {
        return unvec(matrix * vec(rho), q);
    }

    /// this after `first`.
    ChannelOp after(const ChannelOp &first) const {
        return {q, matrix * first.matrix, ChannelTag::Composite};
    }

    static ChannelOp identity(int q) {
        return {q, hdu::identity(q * q), ChannelTag::Composite};
    }
};

/// Builds the superoperator of a linear map on q x q matrices.
template <typename F>
ChannelOp channel_from_map(int q, F &&f, ChannelTag tag) {
    ChannelOp ch{q, ComplexMatrix(q * q, q * q), tag};
    for (int i = 0; i < q; i++) {
        for (int j = 0; j < q; j++) {
            ComplexMatrix e = ComplexMatrix::Zero(q, q);
            e(i, j) = 1;
            ch.matrix.col(i * q + j) = vec(f(e));
        }
    }
    return ch;
}

/// Unitary conjugation rho -> v^dag rho v.
inline ChannelOp conjugation_channel(const ComplexMatrix &v, ChannelTag tag) {
    return channel_from_map(
        static_cast<int>(v.rows()), [&](const ComplexMatrix &x) -> ComplexMatrix { return v.adjoint() * x * v; },
        tag);
}

/// Right edge: (1/q) tr_1[U^dag (rho x 1) U]. Left edge: (1/q) tr_2[U^dag (1 x rho) U].
inline ChannelOp channel_from_gate(const TwoSiteGate &g, Edge edge) {
    if (!is_dual_unitary(g)) {
        throw InputError("channel_from_gate: gate is not dual-unitary");
    }
    int q = g.q();
    const ComplexMatrix &u = g.matrix();
    ComplexMatrix id = identity(q);
    if (edge == Edge::Right) {
        return channel_from_map(
            q,
            [&](const ComplexMatrix &x) -> ComplexMatrix {
                return partial_trace(u.adjoint() * kron(x, id) * u, Factor::First) / static_cast<double>(q);
            },
            ChannelTag::MPlus);
    }
    return channel_from_map(
        q,
        [&](const ComplexMatrix &x) -> ComplexMatrix {
            return partial_trace(u.adjoint() * kron(id, x) * u, Factor::Second) / static_cast<double>(q);
        },
        ChannelTag::MMinus);
}

/// For S[u1 x u2] the right-edge channel conjugates by u2, the left by u1.
inline ChannelOp channel_from_dressed_swap(const DressedSwap &d, Edge edge) {
    return conjugation_channel(edge == Edge::Right ? d.u2 : d.u1, ChannelTag::DressedSwapChannel);
}

/// Ket side: alpha^dag rho alpha. Bra side: alpha rho alpha^dag.
inline ChannelOp channel_from_measurement(const ComplexMatrix &alpha, Side side) {
    if (side == Side::Ket) {
        return conjugation_channel(alpha, ChannelTag::MeasKet);
    }
    return conjugation_channel(alpha.adjoint(), ChannelTag::MeasBra);
}

inline double trace_preservation_deviation(const ChannelOp &ch) {
    // tr(E(X)) = tr(X) for all X  <=>  vec(I)^T M = vec(I)^T.
    int q = ch.q;
    ComplexVector v = vec(identity(q));
    return (v.transpose() * ch.matrix - v.transpose()).cwiseAbs().maxCoeff();
}

inline double unitality_deviation(const ChannelOp &ch) {
    return max_abs(ch.apply(identity(ch.q)) - identity(ch.q));
}

struct ChannelSpectrum {
    std::vector<Complex> eigenvalues;  // sorted by decreasing modulus
    double gap = 0.0;                  // 1 - |second eigenvalue|
};

inline ChannelSpectrum channel_spectrum(const ChannelOp &ch) {
    ChannelSpectrum s;
    s.eigenvalues = eigenvalues(ch.matrix);
    std::stable_sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](Complex a, Complex b) {
        if (std::abs(a) != std::abs(b)) {
            return std::abs(a) > std::abs(b);
        }
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    s.gap = s.eigenvalues.size() > 1 ? 1.0 - std::abs(s.eigenvalues[1]) : 0.0;
    return s;
}

// ---- operator line tracing ----
//
// Leg numbering of a slot: 0 out-left, 1 out-right, 2 in-left, 3 in-right.
// The single-site operator carried along the line crosses each slot it meets.
// Moving down (towards the initial state) it enters an out leg; a gate or
// dressed swap passes it to the opposite in leg, a measurement reflects it to
// the other out leg and it moves up. Moving up is the mirror image.

/// Transfer through one slot between two legs. The two remaining legs are
/// contracted ket-with-bra, and the raw slot matrix is weighted by 1/q.
inline ChannelOp leg_transfer(const ComplexMatrix &g, int entry, int exit) {
    int q = exact_sqrt(g.rows());
    int other[2];
    int n = 0;
    for (int l = 0; l < 4; l++) {
        if (l != entry && l != exit) {
            other[n++] = l;
        }
    }
    auto el = [&](const int idx[4]) { return g(idx[0] * q + idx[1], idx[2] * q + idx[3]); };
    // Carried object W[ket, bra]; the operator in the usual sense is W^T.
    auto transfer_w = [&](const ComplexMatrix &w) {
        ComplexMatrix out = ComplexMatrix::Zero(q, q);
        int ket[4], bra[4];
        for (int xe = 0; xe < q; xe++) {
            for (int ye = 0; ye < q; ye++) {
                Complex wv = w(xe, ye);
                if (wv == Complex(0)) {
                    continue;
                }
                for (int xo = 0; xo < q; xo++) {
                    for (int yo = 0; yo < q; yo++) {
                        Complex acc = 0;
                        for (int m0 = 0; m0 < q; m0++) {
                            for (int m1 = 0; m1 < q; m1++) {
                                ket[entry] = xe;
                                bra[entry] = ye;
                                ket[exit] = xo;
                                bra[exit] = yo;
                                ket[other[0]] = bra[other[0]] = m0;
                                ket[other[1]] = bra[other[1]] = m1;
                                acc += el(ket) * std::conj(el(bra));
                            }
                        }
                        out(xo, yo) += acc * wv;
                    }
                }
            }
        }
        return ComplexMatrix(out / static_cast<double>(q));
    };
    return channel_from_map(
        q, [&](const ComplexMatrix &o) -> ComplexMatrix { return transfer_w(o.transpose()).transpose(); },
        ChannelTag::Transfer);
}

struct TraceStep {
    int row;
    int link;
    SlotKind kind;
    bool moving_down;  // direction on entry
    bool reflected;
    int site_in;
    int site_out;
    ChannelOp channel;
};

struct LineTrace {
    std::vector<TraceStep> steps;
    bool ends_at_bottom = true;
    int end_site = 0;
    ChannelOp total;
};

/// Follows the operator line from `origin_site` at the top of the circuit.
/// Throws GeometryError when the line reaches an idle edge site of the window.
inline LineTrace trace_operator_line(const CircuitRealization &c, int origin_site) {
    if (origin_site < 0 || origin_site >= c.sites) {
        throw GeometryError("origin site outside the window");
    }
    LineTrace tr;
    tr.total = ChannelOp::identity(c.q);
    int site = origin_site;
    int r = c.n_rows;
    bool down = true;
    while (true) {
        if (down && r == 0) {
            tr.ends_at_bottom = true;
            break;
        }
        if (!down && r == c.n_rows + 1) {
            tr.ends_at_bottom = false;
            break;
        }
        int link = link_of_site(r, site, c.sites);
        if (link < 0) {
            throw GeometryError("operator line from site " + std::to_string(origin_site) +
                                " reaches the window edge at row " + std::to_string(r));
        }
        const GateSlot *s = c.slot_at_link(r, link);
        if (s == nullptr) {
            r += down ? -1 : 1;
            continue;
        }
        bool left = site == link;
        bool meas = s->kind == SlotKind::Measurement;
        int entry, exit;
        bool ndown;
        if (down) {
            entry = left ? 0 : 1;
            exit = meas ? (left ? 1 : 0) : (left ? 3 : 2);
            ndown = !meas;
        } else {
            entry = left ? 2 : 3;
            exit = meas ? (left ? 3 : 2) : (left ? 1 : 0);
            ndown = meas;
        }
        ChannelOp step = leg_transfer(c.slot_matrix(*s), entry, exit);
        int out_site = left ? link + 1 : link;
        tr.steps.push_back({r, link, s->kind, down, meas, site, out_site, step});
        tr.total = step.after(tr.total);
        site = out_site;
        down = ndown;
        r += down ? -1 : 1;
    }
    tr.end_site = site;
    return tr;
}

inline void check_correlator_operands(const ComplexMatrix &rho, const ComplexMatrix &sigma, int q) {
    if (rho.rows() != q || rho.cols() != q || sigma.rows() != q || sigma.cols() != q) {
        throw InputError("rho and sigma must be q x q");
    }
    if (std::abs(rho.trace() - Complex(1.0)) > 1e-10) {
        throw InputError("rho must have unit trace");
    }
    if (std::abs(sigma.trace()) > 1e-12) {
        throw InputError("sigma must be traceless");
    }
}

struct CorrelatorValue {
    Complex value = 0;
    int x = 0;              // site the value refers to
    bool off_cone = false;  // exact zero: no operator line reaches x
};

/// Correlator at the endpoint of the line from `origin_site`, equal to
/// tr[sigma Phi(rho)] for the composed channel Phi. `direction` must match
/// the way the final-row slot moves the line.
inline CorrelatorValue lightcone_correlator(const CircuitRealization &c, const ComplexMatrix &rho,
                                            const ComplexMatrix &sigma, int origin_site, Direction direction) {
    check_correlator_operands(rho, sigma, c.q);
    LineTrace tr = trace_operator_line(c, origin_site);
    if (!tr.steps.empty()) {
        bool right = tr.steps.front().site_out > tr.steps.front().site_in;
        if (right != (direction == Direction::Right)) {
            throw InputError("origin site " + std::to_string(origin_site) + " propagates " +
                             (right ? "right" : "left") + " in this layout");
        }
    }
    CorrelatorValue v;
    v.x = tr.end_site;
    if (!tr.ends_at_bottom) {
        v.off_cone = true;
        return v;
    }
    v.value = (sigma * tr.total.apply(rho)).trace();
    return v;
}

/// Correlator at `target_x`. Every site other than the line's endpoint gives
/// exactly zero with the off_cone flag set.
inline CorrelatorValue shifted_lightcone_correlator(const CircuitRealization &c, const ComplexMatrix &rho,
                                                    const ComplexMatrix &sigma, int origin_site, int target_x) {
    check_correlator_operands(rho, sigma, c.q);
    LineTrace tr = trace_operator_line(c, origin_site);
    CorrelatorValue v;
    v.x = target_x;
    if (!tr.ends_at_bottom || tr.end_site != target_x) {
        v.off_cone = true;
        return v;
    }
    v.value = (sigma * tr.total.apply(rho)).trace();
    return v;
}

/// Values for every site of the window.
inline std::vector<Complex> correlator_profile(const CircuitRealization &c, const ComplexMatrix &rho,
                                               const ComplexMatrix &sigma, int origin_site) {
    check_correlator_operands(rho, sigma, c.q);
    LineTrace tr = trace_operator_line(c, origin_site);
    std::vector<Complex> out(c.sites, Complex(0));
    if (tr.ends_at_bottom) {
        out[tr.end_site] = (sigma * tr.total.apply(rho)).trace();
    }
    return out;
}

}  // namespace hdu

#endif
