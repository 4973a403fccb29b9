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

#ifndef HDU_RNG_HPP
#define HDU_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace hdu {

inline uint64_t splitmix_mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the k-th independent substream of a master seed.
inline uint64_t substream_seed(uint64_t master, uint64_t k) {
    return splitmix_mix(master ^ splitmix_mix(k + 0x9e3779b97f4a7c15ULL));
}

/// SplitMix64. Tiny state, so a substream per sample costs nothing, and every
/// draw is defined bit-for-bit here (no reliance on std distributions, whose
/// output differs between standard libraries).
class Rng {
   public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed) : state_(seed) {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix_mix(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) {
        return uniform01() < p;
    }

    /// Unbiased integer in [0, n).
    uint64_t below(uint64_t n) {
        uint64_t limit = max() - max() % n;
        while (true) {
            uint64_t x = (*this)();
            if (x < limit) {
                return x % n;
            }
        }
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

    Rng split(uint64_t k) const {
        return Rng(substream_seed(state_, k));
    }

   private:
    uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace hdu

#endif
