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

#include "hdu/numerics.hpp"
#include "hdu/rng.hpp"
#include "test_support.hpp"

namespace hdu {
namespace {

ComplexMatrix random_matrix(int n, Rng &rng) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            m(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    return m;
}

TEST(Numerics, ExactSqrt) {
    EXPECT_EQ(exact_sqrt(0), 0);
    EXPECT_EQ(exact_sqrt(16), 4);
    EXPECT_EQ(exact_sqrt(81), 9);
    EXPECT_EQ(exact_sqrt(15), -1);
    EXPECT_EQ(exact_sqrt(-4), -1);
    EXPECT_EQ(ipow(3, 4), 81);
}

TEST(Numerics, KronMixedProduct) {
    Rng rng(1);
    ComplexMatrix a = random_matrix(2, rng), b = random_matrix(3, rng);
    ComplexMatrix c = random_matrix(2, rng), d = random_matrix(3, rng);
    EXPECT_LT(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
}

TEST(Numerics, PartialTraceOfProduct) {
    Rng rng(2);
    for (int q : {2, 3, 4}) {
        ComplexMatrix a = random_matrix(q, rng), b = random_matrix(q, rng);
        ComplexMatrix ab = kron(a, b);
        EXPECT_LT(max_abs(partial_trace(ab, Factor::First) - a.trace() * b), 1e-12);
        EXPECT_LT(max_abs(partial_trace(ab, Factor::Second) - b.trace() * a), 1e-12);
    }
    EXPECT_THROW(partial_trace(ComplexMatrix::Zero(3, 3), Factor::First), InputError);
    EXPECT_THROW(partial_trace(ComplexMatrix::Zero(4, 2), Factor::First), InputError);
}

TEST(Numerics, VecRoundTripAndKronIdentity) {
    Rng rng(3);
    for (int q : {2, 3}) {
        ComplexMatrix a = random_matrix(q, rng), x = random_matrix(q, rng), b = random_matrix(q, rng);
        EXPECT_EQ(max_abs(unvec(vec(x), q) - x), 0.0);
        // Row-major: vec(A X B) = (A kron B^T) vec(X).
        ComplexVector lhs = vec(a * x * b);
        ComplexVector rhs = kron(a, b.transpose()) * vec(x);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Numerics, PauliAlgebra) {
    Complex i(0, 1);
    EXPECT_LT(max_abs(pauli('X') * pauli('Y') - i * pauli('Z')), 1e-15);
    for (char c : {'X', 'Y', 'Z'}) {
        EXPECT_LT(max_abs(pauli(c) * pauli(c) - identity(2)), 1e-15);
    }
    EXPECT_THROW(pauli('Q'), InputError);
}

TEST(Numerics, ClockShiftCommutation) {
    for (int q : {2, 3, 5}) {
        ComplexMatrix x = shift_matrix(q), z = clock_matrix(q);
        Complex w = std::polar(1.0, 2 * M_PI / q);
        EXPECT_LT(max_abs(z * x - w * x * z), 1e-12) << q;
        EXPECT_TRUE(is_unitary(x));
        EXPECT_TRUE(is_unitary(z));
    }
}

TEST(Numerics, HermitianEigenAscendingAndReconstructs) {
    Rng rng(4);
    ComplexMatrix g = random_matrix(5, rng);
    ComplexMatrix h = g + g.adjoint();
    auto e = hermitian_eigen(h);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    ComplexMatrix d = ComplexMatrix::Zero(5, 5);
    for (int k = 0; k < 5; k++) {
        d(k, k) = e.values[k];
    }
    EXPECT_LT(max_abs(e.vectors * d * e.vectors.adjoint() - h), 1e-10);
    auto ev = eigenvalues(h);
    Complex tr = 0;
    for (auto l : ev) {
        tr += l;
    }
    EXPECT_LT(std::abs(tr - h.trace()), 1e-10);
}

TEST(Numerics, AllFinite) {
    ComplexMatrix m = identity(2);
    EXPECT_TRUE(all_finite(m));
    m(0, 1) = Complex(std::nan(""), 0);
    EXPECT_FALSE(all_finite(m));
    EXPECT_THROW(unitarity_deviation(ComplexMatrix::Zero(2, 3)), InputError);
}

TEST(Rng, DeterministicAndSeedSensitive) {
    Rng a(7), b(7), c(8);
    for (int k = 0; k < 100; k++) {
        uint64_t x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
    }
}

TEST(Rng, SubstreamsDistinct) {
    std::vector<uint64_t> seeds;
    for (uint64_t k = 0; k < 1000; k++) {
        seeds.push_back(substream_seed(42, k));
    }
    std::sort(seeds.begin(), seeds.end());
    EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
    EXPECT_NE(substream_seed(1, 0), substream_seed(2, 0));
}

TEST(Rng, UniformPassesKs) {
    Rng rng(11);
    std::vector<double> xs;
    for (int k = 0; k < 20000; k++) {
        double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        xs.push_back(u);
    }
    EXPECT_LT(testing::ks_statistic(xs, [](double x) { return x; }), testing::ks_critical(1e-3, xs.size()));
}

TEST(Rng, NormalPassesKs) {
    Rng rng(12);
    std::vector<double> xs;
    for (int k = 0; k < 20000; k++) {
        xs.push_back(rng.normal());
    }
    auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    EXPECT_LT(testing::ks_statistic(xs, cdf), testing::ks_critical(1e-3, xs.size()));
}

TEST(Rng, BelowIsUniform) {
    Rng rng(13);
    std::vector<long long> counts(7, 0);
    for (int k = 0; k < 70000; k++) {
        counts[rng.below(7)]++;
    }
    EXPECT_GT(testing::chi_squared_uniform_pvalue(counts), 1e-3);
}

TEST(Rng, BernoulliFrequency) {
    Rng rng(14);
    int hits = 0, n = 100000;
    for (int k = 0; k < n; k++) {
        hits += rng.bernoulli(0.3);
    }
    double se = std::sqrt(0.3 * 0.7 / n);
    EXPECT_LT(std::abs(hits / double(n) - 0.3), 5 * se);
    Rng r2(1);
    for (int k = 0; k < 100; k++) {
        EXPECT_FALSE(r2.bernoulli(0.0));
        EXPECT_TRUE(r2.bernoulli(1.0));
    }
}

}  // namespace
}  // namespace hdu
