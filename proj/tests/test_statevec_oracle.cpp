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

#include "hdu/entanglement_engine.hpp"
#include "hdu/statevec_oracle.hpp"

namespace hdu {
namespace {

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

CircuitRealization cone_layout(int ell, int t, double p, uint64_t seed) {
    EntropyGeometry g(ell, t);
    Rng rng(seed);
    LayoutSpec spec;
    spec.sites = g.sites();
    spec.n_rows = t;
    spec.p = p;
    spec.seed = rng();
    spec.gate_pool = {random_du_gate_q2(rng), random_du_gate_q2(rng), random_du_gate_q2(rng)};
    spec.mask = g.cone();
    return sample_layout(spec);
}

TEST(InitialState, BellPairs) {
    PureState s = solvable_initial_state(2, 2);
    EXPECT_NEAR(std::abs(s.amplitudes(0) - M_SQRT1_2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.amplitudes(3) - M_SQRT1_2), 0.0, 1e-15);
    EXPECT_EQ(s.amplitudes(1), Complex(0));
    EXPECT_EQ(s.amplitudes(2), Complex(0));
    for (int q : {2, 3}) {
        PureState psi = solvable_initial_state(q, 6);
        EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
        for (int x = 0; x < 6; x++) {
            EXPECT_LT(max_abs(rdm(psi, x, 1) - identity(q) / double(q)), 1e-12);
        }
        for (int start : {0, 2}) {
            EXPECT_NEAR(renyi_entropy(rdm(psi, start, 4), 1), 0.0, 1e-10);
        }
        EXPECT_NEAR(renyi_entropy(rdm(psi, 1, 2), 1), 2 * std::log(q), 1e-10);
    }
    EXPECT_THROW(solvable_initial_state(2, 3), InputError);
}

TEST(Evolution, UnitaryCircuitPreservesNorm) {
    auto c = cone_layout(4, 3, 0.0, 1);
    PureState psi = solvable_initial_state(2, c.sites);
    auto rec = evolve_fixed(c, psi);
    EXPECT_NEAR(rec.state.norm(), 1.0, 1e-12);
    EXPECT_TRUE(rec.outcomes.empty());
    EXPECT_DOUBLE_EQ(rec.probability, 1.0);
}

TEST(Evolution, SingleMeasurementUniformBornProbabilities) {
    for (int q : {2, 3}) {
        CircuitRealization c = empty_layout(q, 4, 1);
        place_slot(c, slot(1, 1, SlotKind::Measurement));
        auto branches = evolve_enumerate(c, solvable_initial_state(q, 4));
        ASSERT_EQ(static_cast<int>(branches.size()), q * q);
        for (const auto &b : branches) {
            EXPECT_NEAR(b.probability, 1.0 / (q * q), 1e-12);
        }
    }
}

TEST(Evolution, EnumerateTwoMeasurementsSumsToOne) {
    CircuitRealization c = empty_layout(2, 6, 2);
    add_gate(c, swap_gate(2));
    place_slot(c, slot(1, 1, SlotKind::Measurement));
    place_slot(c, slot(1, 3, SlotKind::Measurement));
    auto branches = evolve_enumerate(c, solvable_initial_state(2, 6));
    ASSERT_EQ(branches.size(), 16u);
    double total = 0;
    for (const auto &b : branches) {
        total += b.probability;
        EXPECT_NEAR(b.probability, 1.0 / 16, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Evolution, ImpossibleOutcomeReported) {
    // Measuring an initial Bell pair in the Bell basis has a single outcome.
    CircuitRealization c = empty_layout(2, 4, 2);
    place_slot(c, slot(2, 0, SlotKind::Measurement));
    auto branches = evolve_enumerate(c, solvable_initial_state(2, 4));
    EXPECT_NEAR(branches[0].probability, 1.0, 1e-12);
    for (size_t k = 1; k < branches.size(); k++) {
        EXPECT_NEAR(branches[k].probability, 0.0, 1e-12);
    }
    auto d = assign_outcomes(c, std::vector<int>{2});
    EXPECT_THROW(evolve_fixed(d, solvable_initial_state(2, 4)), ZeroProbabilityError);
}

TEST(Evolution, OutcomesUniformOnValidRealizations) {
    for (uint64_t seed = 0; seed < 100; seed++) {
        auto c = cone_layout(4, 3, 0.5, seed);
        Rng rng(seed + 1000);
        auto rec = evolve_sample(c, solvable_initial_state(2, c.sites), rng);
        for (double p : rec.conditional_probs) {
            EXPECT_NEAR(p, 0.25, 1e-10);
        }
        EXPECT_NEAR(rec.probability, std::pow(0.25, rec.outcomes.size()), 1e-10);
        EXPECT_NEAR(rec.state.norm(), 1.0, 1e-12);
    }
}

TEST(Rdm, FullRegionAndComplementSpectra) {
    auto c = cone_layout(4, 2, 0.3, 5);
    Rng rng(5);
    PureState psi = evolve_sample(c, solvable_initial_state(2, c.sites), rng).state;
    ComplexMatrix full = rdm(psi, 0, c.sites);
    EXPECT_LT(max_abs(full - psi.amplitudes * psi.amplitudes.adjoint()), 1e-14);
    auto a = entanglement_spectrum(rdm(psi, 0, 5));
    auto b = entanglement_spectrum(rdm(psi, 5, c.sites - 5));
    for (size_t k = 0; k < std::min(a.size(), b.size()); k++) {
        EXPECT_NEAR(a[k], b[k], 1e-10);
    }
    EXPECT_THROW(rdm(psi, c.sites - 1, 2), GeometryError);
}

TEST(Renyi, ReferenceValues) {
    for (int q : {2, 3}) {
        ComplexMatrix mixed = identity(q) / double(q);
        for (double a : {0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            EXPECT_NEAR(renyi_entropy(mixed, a), std::log(q), 1e-12);
        }
    }
    ComplexMatrix pure = ComplexMatrix::Zero(2, 2);
    pure(0, 0) = 1;
    for (double a : {0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()}) {
        EXPECT_NEAR(renyi_entropy(pure, a), 0.0, 1e-12);
    }
    EXPECT_THROW(renyi_entropy(pure, 0.0), DomainError);
}

TEST(Flatness, ReferenceCases) {
    ComplexMatrix a = ComplexMatrix::Zero(4, 4);
    a(0, 0) = a(1, 1) = 0.5;
    auto f = flatness_check(a, 2);
    EXPECT_TRUE(f.flat);
    EXPECT_EQ(f.n_I, 1);
    a(0, 0) = 0.6;
    a(1, 1) = 0.4;
    f = flatness_check(a, 2);
    EXPECT_FALSE(f.flat);
    EXPECT_FALSE(f.n_I.has_value());
    ComplexMatrix three = ComplexMatrix::Zero(4, 4);
    three(0, 0) = three(1, 1) = three(2, 2) = 1.0 / 3;
    EXPECT_FALSE(flatness_check(three, 2).flat);
}

TEST(Flatness, HybridRealizationsAreFlatAndMatchToy) {
    for (int ell : {2, 4, 6}) {
        for (int t = 1; t <= 4; t++) {
            for (uint64_t seed = 0; seed < 12; seed++) {
                Rng prng(seed * 131 + t);
                auto c = cone_layout(ell, t, prng.uniform01(), seed * 7 + ell * 100 + t);
                EntropyGeometry g(ell, t);
                Rng rng(seed);
                PureState psi = evolve_sample(c, solvable_initial_state(2, c.sites), rng).state;
                ComplexMatrix rho = rdm(psi, g.region_start(), ell);
                auto f = flatness_check(rho, 2, 1e-9);
                ASSERT_TRUE(f.flat) << ell << " " << t << " " << seed;
                double s1 = renyi_entropy(rho, 1), s2 = renyi_entropy(rho, 2);
                double sinf = renyi_entropy(rho, std::numeric_limits<double>::infinity());
                EXPECT_NEAR(s1, s2, 1e-9);
                EXPECT_NEAR(s1, sinf, 1e-9);
                EXPECT_NEAR(s1, *f.n_I * std::log(2.0), 1e-9);
                EXPECT_EQ(*f.n_I, toy_entropy(KindGrid::from_layout(c), ell, t, 2).n_I);
            }
        }
    }
}

TEST(OracleCorrelator, InsideConeVanishesAtZeroRate) {
    Rng rng(8);
    CircuitRealization c = empty_layout(2, 10, 3);
    add_gate(c, random_du_gate_q2(rng));
    for (int r = 1; r <= 3; r++) {
        for (int i : row_links(r, 10)) {
            place_slot(c, slot(r, i, SlotKind::DualUnitary));
        }
    }
    ComplexMatrix rho = (identity(2) + pauli('X')) / 2.0;
    auto prof = infinite_temp_correlator_profile(c, rho, pauli('Z'), 5);
    LineTrace tr = trace_operator_line(c, 5);
    for (int x = 0; x < 10; x++) {
        if (x != tr.end_site) {
            EXPECT_LT(std::abs(prof[x]), 1e-12) << x;
        }
    }
    auto v = lightcone_correlator(c, rho, pauli('Z'), 5,
                                  tr.steps.front().site_out > 5 ? Direction::Right : Direction::Left);
    EXPECT_LT(std::abs(v.value - prof[tr.end_site]), 1e-10);
}

TEST(OracleCorrelator, NormalizationDiagnostic) {
    for (uint64_t seed = 0; seed < 10; seed++) {
        Rng rng(seed);
        LayoutSpec spec;
        spec.sites = 8;
        spec.n_rows = 3;
        spec.p = 0.4;
        spec.seed = rng();
        spec.gate_pool = {random_du_gate_q2(rng)};
        auto c = assign_outcomes(sample_layout(spec), rng);
        ComplexMatrix rho = (identity(2) + 0.3 * pauli('X') - 0.5 * pauli('Z')) / 2.0;
        try {
            trace_operator_line(c, 4);
        } catch (const GeometryError &) {
            continue;
        }
        EXPECT_NEAR(std::abs(normalization_diagnostic(c, rho, 4) - Complex(1)), 0.0, 1e-12);
    }
}

TEST(OracleCorrelator, WindowLimit) {
    CircuitRealization c = empty_layout(2, 14, 1);
    EXPECT_THROW(infinite_temp_correlator_profile(c, identity(2) / 2.0, pauli('Z'), 7), InputError);
}

TEST(Dephaser, UnitaryCircuitIsLocal) {
    auto c = assign_outcomes_seeded(cone_layout(4, 2, 0.0, 3), 1);
    EntropyGeometry g(4, 2);
    auto rep = dephaser_check(c, g.region_start(), 4, 2, 11);
    EXPECT_TRUE(rep.agree);
    EXPECT_LT(rep.max_deviation, 1e-10);
    EXPECT_GT(rep.extra_slots, 0);
}

TEST(Dephaser, HybridCircuitWithFixedOutcomesIsLocal) {
    EntropyGeometry g(4, 2);
    int extra_meas = 0;
    for (uint64_t seed = 0; seed < 10; seed++) {
        auto c = cone_layout(4, 2, 0.5, seed);
        Rng rng(seed);
        auto rec = evolve_sample(c, solvable_initial_state(2, c.sites), rng);
        c = assign_outcomes(c, rec.outcomes);
        auto rep = dephaser_check(c, g.region_start(), 4, 2, seed + 50);
        EXPECT_TRUE(rep.agree) << seed;
        EXPECT_LT(rep.max_deviation, 1e-10);
        extra_meas += rep.extra_measurements;
    }
    EXPECT_GT(extra_meas, 0);
    EXPECT_THROW(dephaser_check(cone_layout(4, 2, 0.5, 0), 6, 4, 1, 0), InputError);
}

TEST(Dephaser, BrokenRestrictionNegativeControl) {
    // Recorded only: a dual-unitary gate on a measurement ray may break
    // locality, so no verdict is asserted here.
    auto c = cone_layout(4, 2, 0.6, 4);
    for (auto &row : c.rows) {
        for (auto &s : row) {
            if (s.kind == SlotKind::DressedSwap) {
                s.kind = SlotKind::DualUnitary;
                s.gate_id = 0;
            }
        }
    }
    Rng rng(4);
    auto rec = evolve_sample(c, solvable_initial_state(2, c.sites), rng);
    c = assign_outcomes(c, rec.outcomes);
    EntropyGeometry g(4, 2);
    auto rep = dephaser_check(c, g.region_start(), 4, 2, 9);
    RecordProperty("broken_restriction_deviation", std::to_string(rep.max_deviation));
    SUCCEED();
}

}  // namespace
}  // namespace hdu
