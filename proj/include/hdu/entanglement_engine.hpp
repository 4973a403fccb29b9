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

#ifndef HDU_ENTANGLEMENT_ENGINE_HPP
#define HDU_ENTANGLEMENT_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

#include "hdu/circuit_layout.hpp"
#include "hdu/rng.hpp"

namespace hdu {

/// Perfect matching of sites into Bell pairs.
struct MatchingState {
    std::vector<int> partner;

    int size() const {
        return static_cast<int>(partner.size());
    }
};

inline MatchingState init_matching(int W) {
    if (W < 2 || W % 2 != 0) {
        throw InputError("init_matching: window must be even and >= 2");
    }
    MatchingState m;
    m.partner.resize(W);
    for (int i = 0; i < W; i++) {
        m.partner[i] = i ^ 1;
    }
    return m;
}

inline bool is_perfect_matching(const MatchingState &m) {
    for (int i = 0; i < m.size(); i++) {
        int j = m.partner[i];
        if (j < 0 || j >= m.size() || j == i || m.partner[j] != i) {
            return false;
        }
    }
    return true;
}

/// Swap gate on (i, i+1): the two sites exchange partners.
inline void apply_swap(MatchingState &m, int i) {
    int j = i + 1;
    auto &p = m.partner;
    if (p[i] == j) {
        return;
    }
    int pi = p[i], pj = p[j];
    p[i] = pj;
    p[pj] = i;
    p[j] = pi;
    p[pi] = j;
}

/// Bell projection on (i, i+1): entanglement swapping.
inline void apply_bell_projection(MatchingState &m, int i) {
    int j = i + 1;
    auto &p = m.partner;
    if (p[i] == j) {
        return;
    }
    int pi = p[i], pj = p[j];
    p[i] = j;
    p[j] = i;
    p[pi] = pj;
    p[pj] = pi;
}

/// n_I: sites of [start, start + len) paired outside the block.
inline int boundary_pairs(const MatchingState &m, int start, int len) {
    int n = 0;
    for (int i = start; i < start + len; i++) {
        if (m.partner[i] < start || m.partner[i] >= start + len) {
            n++;
        }
    }
    return n;
}

enum class ToyKind : int8_t { None = -1, Unitary = 0, Measurement = 1 };

/// Gate kinds only: dressings, outcomes and specific gates do not affect n_I.
struct KindGrid {
    int sites = 0;
    int n_rows = 0;
    std::vector<ToyKind> kinds;  // (row - 1) * sites + link

    KindGrid() = default;
    KindGrid(int sites_, int n_rows_)
        : sites(sites_), n_rows(n_rows_), kinds(static_cast<size_t>(sites_) * n_rows_, ToyKind::None) {
    }

    ToyKind at(int row, int link) const {
        return kinds[static_cast<size_t>(row - 1) * sites + link];
    }
    void set(int row, int link, ToyKind k) {
        if (row < 1 || row > n_rows || !link_in_row(row, link) || link + 1 >= sites) {
            throw InputError("KindGrid: no slot at row " + std::to_string(row) + ", link " + std::to_string(link));
        }
        kinds[static_cast<size_t>(row - 1) * sites + link] = k;
    }

    static KindGrid uniform(int sites, int n_rows, ToyKind k) {
        KindGrid g(sites, n_rows);
        for (int r = 1; r <= n_rows; r++) {
            for (int i : row_links(r, sites)) {
                g.set(r, i, k);
            }
        }
        return g;
    }

    static KindGrid from_layout(const CircuitRealization &c) {
        KindGrid g(c.sites, c.n_rows);
        for (const auto &row : c.rows) {
            for (const auto &s : row) {
                g.set(s.row, s.link, s.kind == SlotKind::Measurement ? ToyKind::Measurement : ToyKind::Unitary);
            }
        }
        return g;
    }
};

struct EntropySample {
    uint64_t seed = 0;
    int t = 0;
    int ell = 0;
    int n_I = 0;
    double S = 0.0;  // nats
};

/// Runs the matching dynamics over the backward light cone of the block A.
/// The grid window must be at least l + 2t + 4 sites and exceed it by a
/// multiple of 4 so that A stays centred with the correct parity.
inline EntropySample toy_entropy(const KindGrid &grid, int ell, int t, int q) {
    EntropyGeometry geo(ell, t);
    if (grid.n_rows != t) {
        throw GeometryError("toy_entropy: grid has " + std::to_string(grid.n_rows) + " rows, expected " +
                            std::to_string(t));
    }
    int extra = grid.sites - geo.sites();
    if (extra < 0 || extra % 4 != 0) {
        throw GeometryError("toy_entropy: window of " + std::to_string(grid.sites) +
                            " sites does not hold the light cone of l = " + std::to_string(ell) +
                            ", t = " + std::to_string(t));
    }
    int start = geo.region_start() + extra / 2;
    SlotSet cone = backward_cone(grid.sites, t, start, ell);
    MatchingState m = init_matching(grid.sites);
    for (int r = 1; r <= t; r++) {
        for (int i : row_links(r, grid.sites)) {
            if (!cone.contains(r, i)) {
                continue;
            }
            ToyKind k = grid.at(r, i);
            if (k == ToyKind::None) {
                throw GeometryError("toy_entropy: light-cone slot at row " + std::to_string(r) + ", link " +
                                    std::to_string(i) + " is empty");
            }
            if (k == ToyKind::Measurement) {
                apply_bell_projection(m, i);
            } else {
                apply_swap(m, i);
            }
        }
    }
    EntropySample s;
    s.t = t;
    s.ell = ell;
    s.n_I = boundary_pairs(m, start, ell);
    s.S = s.n_I * std::log(static_cast<double>(q));
    return s;
}

inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("HDU_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) {
            n = static_cast<unsigned>(v);
        }
    }
    return n;
}

struct MonteCarloResult {
    int ell = 0;
    int t = 0;
    double p = 0;
    int q = 2;
    uint64_t seed = 0;
    long long n_samples = 0;
    double mean_over_lnq = 0;
    double stderr_over_lnq = 0;
    double mean = 0;  // nats
    double stderr_ = 0;
    std::vector<int> n_I;  // per sample, in sample order
};

/// Samples cone-restricted kind grids. Sample k draws from its own substream
/// (seed, k), so results do not depend on the thread count.
inline MonteCarloResult mc_average(int ell, int t, double p, int q, long long n_samples, uint64_t master_seed,
                                   bool keep_samples = false) {
    if (n_samples < 2) {
        throw DomainError("mc_average: need at least 2 samples");
    }
    if (!(p >= 0 && p <= 1)) {
        throw DomainError("mc_average: p must lie in [0, 1]");
    }
    if (q < 2) {
        throw DomainError("mc_average: q must be >= 2");
    }
    EntropyGeometry geo(ell, t);
    int W = geo.sites();
    int start = geo.region_start();
    SlotSet cone = geo.cone();
    std::vector<int> order;
    for (int r = 1; r <= t; r++) {
        for (int i : row_links(r, W)) {
            if (cone.contains(r, i)) {
                order.push_back(i);
            }
        }
    }
    std::vector<int> n_I(n_samples);
    unsigned nt = static_cast<unsigned>(std::min<long long>(thread_count(), n_samples));
    auto work = [&](long long lo, long long hi) {
        MatchingState m = init_matching(W);
        for (long long k = lo; k < hi; k++) {
            for (int i = 0; i < W; i++) {
                m.partner[i] = i ^ 1;
            }
            Rng rng(substream_seed(master_seed, static_cast<uint64_t>(k)));
            for (int link : order) {
                if (rng.bernoulli(p)) {
                    apply_bell_projection(m, link);
                } else {
                    apply_swap(m, link);
                }
            }
            n_I[k] = boundary_pairs(m, start, ell);
        }
    };
    if (nt <= 1) {
        work(0, n_samples);
    } else {
        std::vector<std::thread> pool;
        long long chunk = (n_samples + nt - 1) / nt;
        for (unsigned w = 0; w < nt; w++) {
            long long lo = w * chunk;
            long long hi = std::min<long long>(n_samples, lo + chunk);
            if (lo < hi) {
                pool.emplace_back(work, lo, hi);
            }
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    // Integer sums keep the reduction exact and order independent.
    long long s1 = 0, s2 = 0;
    for (int v : n_I) {
        s1 += v;
        s2 += static_cast<long long>(v) * v;
    }
    double n = static_cast<double>(n_samples);
    double mean = static_cast<double>(s1) / n;
    double var = (static_cast<double>(s2) - static_cast<double>(s1) * mean) / (n - 1);
    MonteCarloResult res;
    res.ell = ell;
    res.t = t;
    res.p = p;
    res.q = q;
    res.seed = master_seed;
    res.n_samples = n_samples;
    res.mean_over_lnq = mean;
    res.stderr_over_lnq = std::sqrt(std::max(0.0, var) / n);
    double lnq = std::log(static_cast<double>(q));
    res.mean = mean * lnq;
    res.stderr_ = res.stderr_over_lnq * lnq;
    if (keep_samples) {
        res.n_I = std::move(n_I);
    }
    return res;
}

/// Seed used for time step t of a curve with the given master seed.
inline uint64_t curve_seed(uint64_t master_seed, int t) {
    return substream_seed(master_seed ^ 0x6375727665ULL, static_cast<uint64_t>(t));
}

inline std::vector<MonteCarloResult> entropy_curve(int ell, double p, int q, int t_max, long long n_samples,
                                                   uint64_t master_seed) {
    if (t_max < 0) {
        throw DomainError("entropy_curve: t_max must be >= 0");
    }
    std::vector<MonteCarloResult> out;
    for (int t = 0; t <= t_max; t++) {
        out.push_back(mc_average(ell, t, p, q, n_samples, curve_seed(master_seed, t)));
    }
    return out;
}

}  // namespace hdu

#endif
