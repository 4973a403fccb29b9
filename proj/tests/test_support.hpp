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


#ifndef HDU_TESTS_TEST_SUPPORT_HPP
#define HDU_TESTS_TEST_SUPPORT_HPP

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

namespace hdu::testing {

/// Kolmogorov-Smirnov statistic of `xs` against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size());
    double d = 0;
    for (size_t i = 0; i < xs.size(); i++) {
        double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Asymptotic critical value of sqrt(n) D at significance alpha.
inline double ks_critical(double alpha, size_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2)) / std::sqrt(static_cast<double>(n));
}

/// Pearson statistic and its upper-tail p-value for equiprobable bins.
inline double chi_squared_uniform_pvalue(const std::vector<long long> &counts) {
    long long total = 0;
    for (auto c : counts) {
        total += c;
    }
    double expected = static_cast<double>(total) / counts.size();
    double chi2 = 0;
    for (auto c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, chi2));
}

}  // namespace hdu::testing

#endif
