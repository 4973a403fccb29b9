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


#include <gtest/gtest.h>

#include <fstream>

#include "hdu/channels.hpp"
#include "hdu/statevec_oracle.hpp"

namespace hdu {
namespace {

ComplexMatrix up_state() {
    return (identity(2) + pauli('Z')) / 2.0;
}

GateSlot slot(int row, int link, SlotKind kind, int id = 0) {
    GateSlot s;
    s.row = row;
    s.link = link;
    s.kind = kind;
    if (kind == SlotKind::DualUnitary) {
        s.gate_id = id;
    }
    return s;
}

CircuitRealization uniform_circuit(const TwoSiteGate &g, int sites, int rows) {
    CircuitRealization c = empty_layout(g.q(), sites, rows);
    add_gate(c, g);
    for (int r = 1; r <= rows; r++) {
        for (int i : row_links(r, sites)) {
            place_slot(c, slot(r, i, SlotKind::DualUnitary));
        }
    }
    return c;
}

/// Hand-built layout with two stacked measurements that reflect the line of
/// site 8 twice. `forward_only` restricts only slots on future-directed rays.
CircuitRealization double_reflection(uint64_t seed, bool forward_only) {
    Rng rng(seed);
    CircuitRealization c = uniform_circuit(random_du_gate_q2(rng), 10, 5);
    place_slot(c, slot(1, 3, SlotKind::Measurement));
    place_slot(c, slot(2, 2, SlotKind::Measurement));
    if (forward_only) {
        std::vector<Ray> fwd;
        for (const auto &r : compute_rays(c)) {
            if (r.time == TimeDir::Future) {
                fwd.push_back(r);
            }
        }
        SlotSet forced = ray_slots(c, fwd);
        for (auto &row : c.rows) {
            for (auto &s : row) {
                if (s.kind == SlotKind::DualUnitary && forced.contains(s.row, s.link)) {
                    s.kind = SlotKind::DressedSwap;
                    s.u1_id = add_unitary(c, random_one_site_unitary(2, rng));
                    s.u2_id = add_unitary(c, random_one_site_unitary(2, rng));
                }
            }
        }
        c.rays = compute_rays(c);
    } else {
        enforce_ray_restriction(c, rng);
    }
    return assign_outcomes(c, rng);
}

TEST(Channels, SwapGivesIdentityChannel) {
    for (int q : {2, 3}) {
        for (Edge e : {Edge::Left, Edge::Right}) {
            EXPECT_LT(max_abs(channel_from_gate(swap_gate(q), e).matrix - identity(q * q)), 1e-14);
        }
    }
    auto s = channel_spectrum(channel_from_gate(swap_gate(2), Edge::Right));
    for (auto l : s.eigenvalues) {
        EXPECT_NEAR(std::abs(l - Complex(1)), 0.0, 1e-12);
    }
    EXPECT_NEAR(s.gap, 0.0, 1e-12);
}

TEST(Channels, GateChannelsUnitalTracePreservingContractive) {
    Rng rng(1);
    int single = 0;
    for (int k = 0; k < 100; k++) {
        TwoSiteGate g = random_du_gate_q2(rng);
        for (Edge e : {Edge::Left, Edge::Right}) {
            ChannelOp ch = channel_from_gate(g, e);
            EXPECT_LT(trace_preservation_deviation(ch), 1e-10);
            EXPECT_LT(unitality_deviation(ch), 1e-10);
            EXPECT_LT(max_abs(ch.apply(identity(2) / 2.0) - identity(2) / 2.0), 1e-10);
            auto s = channel_spectrum(ch);
            EXPECT_LT(std::abs(s.eigenvalues[0] - Complex(1)), 1e-10);
            for (auto l : s.eigenvalues) {
                EXPECT_LE(std::abs(l), 1 + 1e-10);
            }
            single += std::abs(s.eigenvalues[1]) < 1 - 1e-8;
        }
    }
    EXPECT_EQ(single, 200);
    EXPECT_THROW(channel_from_gate(cnot_gate(), Edge::Left), InputError);
}

TEST(Channels, DressedSwapConjugation) {
    DressedSwap id{identity(2), identity(2)};
    EXPECT_LT(max_abs(channel_from_dressed_swap(id, Edge::Right).matrix - identity(4)), 1e-15);
    DressedSwap dx{identity(2), pauli('X')};
    ComplexMatrix out = channel_from_dressed_swap(dx, Edge::Right).apply(up_state());
    EXPECT_LT(max_abs(out - (identity(2) - pauli('Z')) / 2.0), 1e-15);
    Rng rng(2);
    DressedSwap d{random_one_site_unitary(3, rng), random_one_site_unitary(3, rng)};
    ChannelOp ch = channel_from_dressed_swap(d, Edge::Left);
    // Unitary conjugation preserves the Hilbert-Schmidt inner product.
    EXPECT_LT(max_abs(ch.matrix.adjoint() * ch.matrix - identity(9)), 1e-10);
    for (auto l : channel_spectrum(ch).eigenvalues) {
        EXPECT_NEAR(std::abs(l), 1.0, 1e-10);
    }
}

TEST(Channels, MeasurementChannels) {
    auto u = weyl_heisenberg_ueb(2);
    EXPECT_EQ(max_abs(channel_from_measurement(u.alphas[0], Side::Ket).matrix - identity(4)), 0.0);
    ComplexMatrix plus = (identity(2) + pauli('X')) / 2.0;
    ComplexMatrix out = channel_from_measurement(pauli('Z'), Side::Ket).apply(plus);
    EXPECT_LT(max_abs(out - (identity(2) - pauli('X')) / 2.0), 1e-15);
    auto u3 = weyl_heisenberg_ueb(3);
    for (const auto &a : u3.alphas) {
        ChannelOp both = channel_from_measurement(a, Side::Bra).after(channel_from_measurement(a, Side::Ket));
        EXPECT_LT(max_abs(both.matrix - identity(9)), 1e-12);
    }
}

TEST(Channels, LegTransfersMatchNamedChannels) {
    Rng rng(3);
    TwoSiteGate g = random_du_gate_q2(rng);
    ComplexMatrix mp = channel_from_gate(g, Edge::Right).matrix;
    ComplexMatrix mm = channel_from_gate(g, Edge::Left).matrix;
    EXPECT_LT(max_abs(leg_transfer(g.matrix(), 0, 3).matrix - mp), 1e-12);
    EXPECT_LT(max_abs(leg_transfer(g.matrix(), 1, 2).matrix - mm), 1e-12);
    EXPECT_LT(max_abs(leg_transfer(g.matrix(), 3, 0).matrix - mp.transpose()), 1e-12);
    EXPECT_LT(max_abs(leg_transfer(g.matrix(), 2, 1).matrix - mm.transpose()), 1e-12);

    DressedSwap d{random_one_site_unitary(2, rng), random_one_site_unitary(2, rng)};
    EXPECT_LT(max_abs(leg_transfer(d.matrix(), 0, 3).matrix - channel_from_dressed_swap(d, Edge::Right).matrix),
              1e-12);
    EXPECT_LT(max_abs(leg_transfer(d.matrix(), 1, 2).matrix - channel_from_dressed_swap(d, Edge::Left).matrix),
              1e-12);

    auto u = weyl_heisenberg_ueb(3);
    const ComplexMatrix &a = u.alphas[5];
    ComplexVector v = vec(a);
    ComplexMatrix proj = v * v.adjoint();
    ComplexMatrix ket = channel_from_measurement(a, Side::Ket).matrix;
    ComplexMatrix bra = channel_from_measurement(a, Side::Bra).matrix;
    EXPECT_LT(max_abs(leg_transfer(proj, 0, 1).matrix - ket), 1e-12);
    EXPECT_LT(max_abs(leg_transfer(proj, 1, 0).matrix - ket.transpose()), 1e-12);
    EXPECT_LT(max_abs(leg_transfer(proj, 3, 2).matrix - bra), 1e-12);
    EXPECT_LT(max_abs(leg_transfer(proj, 2, 3).matrix - bra.transpose()), 1e-12);
}

TEST(Correlator, AllSwapIsOneForAllTimes) {
    ComplexMatrix rho = up_state(), sigma = pauli('Z');
    for (int t = 1; t <= 20; t++) {
        CircuitRealization c = uniform_circuit(swap_gate(2), 2 * t + 4, t);
        int origin = t + 2;
        auto prof = correlator_profile(c, rho, sigma, origin);
        int nonzero = 0;
        for (int x = 0; x < c.sites; x++) {
            if (prof[x] != Complex(0)) {
                nonzero++;
                EXPECT_NEAR(std::abs(prof[x] - Complex(1)), 0.0, 1e-14);
                EXPECT_EQ(std::abs(x - origin), t);
            }
        }
        EXPECT_EQ(nonzero, 1);
    }
}

TEST(Correlator, SpectralBoundAtZeroMeasurementRate) {
    Rng rng(4);
    for (int k = 0; k < 10; k++) {
        TwoSiteGate g = random_du_gate_q2(rng);
        ComplexMatrix rho = up_state(), sigma = pauli('Z');
        for (int t = 1; t <= 10; t++) {
            CircuitRealization c = uniform_circuit(g, 2 * t + 4, t);
            LineTrace tr = trace_operator_line(c, t + 2);
            // At p = 0 every step of the line applies the same edge channel.
            ChannelOp step = tr.steps.front().channel;
            auto s = channel_spectrum(step);
            Eigen::ComplexEigenSolver<ComplexMatrix> es(step.matrix);
            ComplexMatrix V = es.eigenvectors();
            Eigen::JacobiSVD<ComplexMatrix> svd(V);
            double kappa = svd.singularValues()(0) / svd.singularValues()(3);
            double bound = kappa * std::pow(std::abs(s.eigenvalues[1]), t) * sigma.norm() *
                           (rho - identity(2) / 2.0).norm();
            CorrelatorValue v = shifted_lightcone_correlator(c, rho, sigma, t + 2, tr.end_site);
            EXPECT_LE(std::abs(v.value), bound * (1 + 1e-9) + 1e-14) << "gate " << k << " t " << t;
        }
    }
}

TEST(Correlator, ChannelsMatchOracleOnRandomLayouts) {
    Rng rng(5);
    int done = 0, reflected = 0;
    while (done < 40) {
        int t = 1 + static_cast<int>(rng.below(3));
        int sites = 2 * t + 2 + 2 * static_cast<int>(rng.below((10 - 2 * t - 2) / 2 + 1));
        LayoutSpec spec;
        spec.sites = sites;
        spec.n_rows = t;
        spec.p = 0.2 + 0.6 * rng.uniform01();
        spec.seed = rng();
        spec.gate_pool = {random_du_gate_q2(rng), random_du_gate_q2(rng)};
        CircuitRealization c = assign_outcomes(sample_layout(spec), rng);
        int origin = static_cast<int>(rng.below(sites));
        LineTrace tr;
        try {
            tr = trace_operator_line(c, origin);
        } catch (const GeometryError &) {
            continue;
        }
        for (const auto &st : tr.steps) {
            reflected += st.reflected;
        }
        ComplexMatrix rho = up_state();
        ComplexMatrix sigma = pauli('X') + 0.5 * pauli('Y') - 0.3 * pauli('Z');
        auto oracle = infinite_temp_correlator_profile(c, rho, sigma, origin);
        auto chan = correlator_profile(c, rho, sigma, origin);
        for (int x = 0; x < sites; x++) {
            EXPECT_LT(std::abs(oracle[x] - chan[x]), 1e-10);
            if (chan[x] == Complex(0)) {
                EXPECT_LT(std::abs(oracle[x]), 1e-12);
            }
        }
        done++;
    }
    EXPECT_GT(reflected, 0);
}

TEST(Correlator, ShiftedLightConeDoubleReflection) {
    ComplexMatrix rho = up_state(), sigma = pauli('Z');
    for (uint64_t seed = 0; seed < 5; seed++) {
        CircuitRealization c = double_reflection(seed, false);
        ASSERT_TRUE(validate_layout(c).ok);
        LineTrace tr = trace_operator_line(c, 8);
        ASSERT_TRUE(tr.ends_at_bottom);
        int refl = 0;
        for (const auto &st : tr.steps) {
            refl += st.reflected;
            if (!st.reflected) {
                // On a reflected line every other slot lies on a measurement ray.
                EXPECT_EQ(st.kind, SlotKind::DressedSwap);
            }
        }
        EXPECT_EQ(refl, 2);
        EXPECT_EQ(tr.end_site, 1);  // the unshifted cone would end at site 3
        auto oracle = infinite_temp_correlator_profile(c, rho, sigma, 8);
        for (int x = 0; x < c.sites; x++) {
            auto v = shifted_lightcone_correlator(c, rho, sigma, 8, x);
            EXPECT_LT(std::abs(v.value - oracle[x]), 1e-10);
            EXPECT_EQ(v.off_cone, x != 1);
            if (x != 1) {
                EXPECT_LT(std::abs(oracle[x]), 1e-12);
            }
        }
        EXPECT_GT(std::abs(oracle[1]), 1e-3);
    }
}

TEST(Correlator, ForwardOnlyRestrictionComposition) {
    // With only future rays restricted, the reflected line meets dressed
    // swaps, two reflections and a final dual-unitary channel. The composed
    // channel still reproduces the dense evaluation.
    ComplexMatrix rho = up_state(), sigma = pauli('Z');
    for (uint64_t seed = 0; seed < 5; seed++) {
        CircuitRealization c = double_reflection(seed, true);
        LineTrace tr = trace_operator_line(c, 8);
        ASSERT_EQ(tr.steps.size(), 7u);
        EXPECT_EQ(tr.steps.back().kind, SlotKind::DualUnitary);
        auto oracle = infinite_temp_correlator_profile(c, rho, sigma, 8);
        auto chan = correlator_profile(c, rho, sigma, 8);
        for (int x = 0; x < c.sites; x++) {
            EXPECT_LT(std::abs(oracle[x] - chan[x]), 1e-10);
        }
    }
}

TEST(Correlator, EqualOutcomePairCollapses) {
    // Two stacked measurements with the same outcome reflect the line twice;
    // alpha^dag alpha = 1 cancels them, leaving unitary conjugations.
    CircuitRealization c = double_reflection(7, false);
    for (auto &row : c.rows) {
        for (auto &s : row) {
            if (s.kind == SlotKind::Measurement) {
                s.outcome = 3;
            }
        }
    }
    LineTrace tr = trace_operator_line(c, 8);
    ChannelOp meas_only = ChannelOp::identity(2);
    ChannelOp rest = ChannelOp::identity(2);
    for (const auto &st : tr.steps) {
        (st.reflected ? meas_only : rest) = st.channel.after(st.reflected ? meas_only : rest);
    }
    EXPECT_LT(max_abs(meas_only.matrix - identity(4)), 1e-12);
    // The remaining product is a unitary conjugation: HS-isometric.
    EXPECT_LT(max_abs(tr.total.matrix.adjoint() * tr.total.matrix - identity(4)), 1e-10);
}

TEST(Correlator, DirectionAndOperandChecks) {
    CircuitRealization c = uniform_circuit(swap_gate(2), 8, 2);
    ComplexMatrix rho = up_state(), sigma = pauli('Z');
    LineTrace tr = trace_operator_line(c, 4);
    bool right = tr.steps.front().site_out > tr.steps.front().site_in;
    EXPECT_NO_THROW(lightcone_correlator(c, rho, sigma, 4, right ? Direction::Right : Direction::Left));
    EXPECT_THROW(lightcone_correlator(c, rho, sigma, 4, right ? Direction::Left : Direction::Right), InputError);
    EXPECT_THROW(correlator_profile(c, 2.0 * rho, sigma, 4), InputError);
    EXPECT_THROW(correlator_profile(c, rho, identity(2), 4), InputError);
    EXPECT_THROW(correlator_profile(c, rho, sigma, 9), GeometryError);
    CircuitRealization narrow = uniform_circuit(swap_gate(2), 4, 3);
    EXPECT_THROW(correlator_profile(narrow, rho, sigma, 0), GeometryError);
}

TEST(Correlator, DemoFixtureNonzeroOnlyOnShiftedRay) {
    std::ifstream in(std::string(HDU_DATA_DIR) + "/shifted_cone.json");
    ASSERT_TRUE(in.good());
    CircuitRealization c = layout_from_json(nlohmann::json::parse(in));
    ASSERT_TRUE(validate_layout(c).ok);
    ComplexMatrix rho = up_state(), sigma = pauli('Z');
    auto chan = correlator_profile(c, rho, sigma, 8);
    auto oracle = infinite_temp_correlator_profile(c, rho, sigma, 8);
    for (int x = 0; x < c.sites; x++) {
        EXPECT_LT(std::abs(chan[x] - oracle[x]), 1e-10);
        EXPECT_EQ(chan[x] != Complex(0), x == 1);
    }
}

}  // namespace
}  // namespace hdu
