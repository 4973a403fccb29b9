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

#ifndef HDU_STATEVEC_ORACLE_HPP
#define HDU_STATEVEC_ORACLE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hdu/channels.hpp"
#include "hdu/circuit_layout.hpp"

namespace hdu {

struct PureState {
    int q = 2;
    int L = 0;
    ComplexVector amplitudes;

    double norm() const {
        return amplitudes.norm();
    }
};

/// Applies a q^2 x q^2 matrix to sites (i, i+1) of a vector over n sites.
inline void apply_two_site(ComplexVector &v, const ComplexMatrix &g, int q, int n_sites, int i) {
    if (i < 0 || i + 1 >= n_sites) {
        throw InputError("apply_two_site: link outside the register");
    }
    const long long inner = ipow(q, n_sites - i - 2);
    const long long outer = ipow(q, i);
    const int d = q * q;
    using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMat tmp(d, inner);
    for (long long o = 0; o < outer; o++) {
        Eigen::Map<RowMat> block(v.data() + o * d * inner, d, inner);
        tmp.noalias() = g * block;
        block = tmp;
    }
}

/// Bell pairs (sum_i |i,i>)/sqrt(q) on links (2n, 2n+1).
inline PureState solvable_initial_state(int q, int L) {
    if (L < 2 || L % 2 != 0) {
        throw InputError("solvable_initial_state: L must be even and >= 2");
    }
    PureState s{q, L, ComplexVector::Zero(ipow(q, L))};
    long long pairs = L / 2;
    // Each pair contributes 1/sqrt(q) on its diagonal digits.
    double amp = std::pow(static_cast<double>(q), -0.5 * static_cast<double>(pairs));
    long long n_configs = ipow(q, static_cast<int>(pairs));
    for (long long cfg = 0; cfg < n_configs; cfg++) {
        long long idx = 0;
        long long rest = cfg;
        std::vector<int> digit(pairs);
        for (long long p = pairs - 1; p >= 0; p--) {
            digit[p] = static_cast<int>(rest % q);
            rest /= q;
        }
        for (long long p = 0; p < pairs; p++) {
            idx = idx * q + digit[p];
            idx = idx * q + digit[p];
        }
        s.amplitudes(idx) = amp;
    }
    return s;
}

struct TrajectoryRecord {
    std::vector<int> outcomes;                // measurement slots in row-major order
    std::vector<double> conditional_probs;    // Born probability of each outcome given the past
    double probability = 1.0;                 // joint probability
    PureState state;
};

namespace detail {

enum class EvolveMode { Sample, Fixed };

inline TrajectoryRecord evolve_impl(const CircuitRealization &c, PureState psi, EvolveMode mode, Rng *rng) {
    if (psi.L != c.sites || psi.q != c.q) {
        throw InputError("evolve: state does not match the layout window");
    }
    TrajectoryRecord rec;
    int d = c.q * c.q;
    for (const auto &row : c.rows) {
        for (const auto &s : row) {
            if (s.kind != SlotKind::Measurement) {
                apply_two_site(psi.amplitudes, c.slot_matrix(s), c.q, c.sites, s.link);
                continue;
            }
            int n;
            ComplexVector branch;
            double pr;
            if (mode == EvolveMode::Fixed) {
                n = s.outcome;
                if (n == kUnsampled) {
                    throw InputError("evolve: measurement without a fixed outcome");
                }
                branch = psi.amplitudes;
                apply_two_site(branch, ueb_projector(c.ueb, n), c.q, c.sites, s.link);
                pr = branch.squaredNorm();
                if (pr < 1e-14) {
                    throw ZeroProbabilityError(s.row, s.link,
                                               "outcome " + std::to_string(n) + " at row " + std::to_string(s.row) +
                                                   ", link " + std::to_string(s.link) + " has zero probability");
                }
            } else {
                std::vector<ComplexVector> branches(d);
                std::vector<double> probs(d);
                for (int k = 0; k < d; k++) {
                    branches[k] = psi.amplitudes;
                    apply_two_site(branches[k], ueb_projector(c.ueb, k), c.q, c.sites, s.link);
                    probs[k] = branches[k].squaredNorm();
                }
                double u = rng->uniform01();
                double acc = 0;
                n = d - 1;
                for (int k = 0; k < d; k++) {
                    acc += probs[k];
                    if (u < acc) {
                        n = k;
                        break;
                    }
                }
                while (probs[n] <= 0 && n > 0) {
                    n--;
                }
                branch = std::move(branches[n]);
                pr = probs[n];
            }
            psi.amplitudes = branch / std::sqrt(pr);
            rec.outcomes.push_back(n);
            rec.conditional_probs.push_back(pr);
            rec.probability *= pr;
        }
    }
    rec.state = std::move(psi);
    return rec;
}

}  // namespace detail

/// Born-sampled trajectory.
inline TrajectoryRecord evolve_sample(const CircuitRealization &c, const PureState &psi, Rng &rng) {
    return detail::evolve_impl(c, psi, detail::EvolveMode::Sample, &rng);
}

/// Trajectory with the outcomes stored in the layout.
inline TrajectoryRecord evolve_fixed(const CircuitRealization &c, const PureState &psi) {
    return detail::evolve_impl(c, psi, detail::EvolveMode::Fixed, nullptr);
}

/// Every outcome branch (at most 8 measurement slots).
inline std::vector<TrajectoryRecord> evolve_enumerate(const CircuitRealization &c, const PureState &psi) {
    auto meas = c.measurement_slots();
    if (meas.size() > 8) {
        throw InputError("evolve_enumerate: more than 8 measurement slots");
    }
    int d = c.q * c.q;
    long long total = ipow(d, static_cast<int>(meas.size()));
    std::vector<TrajectoryRecord> out;
    for (long long b = 0; b < total; b++) {
        std::vector<int> outs(meas.size());
        long long rest = b;
        for (size_t k = meas.size(); k-- > 0;) {
            outs[k] = static_cast<int>(rest % d);
            rest /= d;
        }
        CircuitRealization ci = assign_outcomes(c, outs);
        try {
            out.push_back(evolve_fixed(ci, psi));
        } catch (const ZeroProbabilityError &) {
            TrajectoryRecord rec;
            rec.outcomes = outs;
            rec.probability = 0.0;
            out.push_back(rec);
        }
    }
    return out;
}

/// Reduced density matrix of sites [start, start + len).
inline ComplexMatrix rdm(const PureState &psi, int start, int len) {
    if (start < 0 || len < 1 || start + len > psi.L) {
        throw GeometryError("rdm: region outside the window");
    }
    long long dl = ipow(psi.q, start);
    long long da = ipow(psi.q, len);
    long long dr = ipow(psi.q, psi.L - start - len);
    ComplexMatrix rho = ComplexMatrix::Zero(da, da);
    using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (long long x = 0; x < dl; x++) {
        Eigen::Map<const RowMat> m(psi.amplitudes.data() + x * da * dr, da, dr);
        rho.noalias() += m * m.adjoint();
    }
    return rho;
}

/// Eigenvalues in decreasing order, clamped at zero.
inline std::vector<double> entanglement_spectrum(const ComplexMatrix &rho) {
    auto eig = hermitian_eigen(rho);
    std::vector<double> out;
    for (auto it = eig.values.rbegin(); it != eig.values.rend(); ++it) {
        if (*it < -1e-10) {
            throw InputError("entanglement_spectrum: negative eigenvalue " + std::to_string(*it));
        }
        out.push_back(std::max(0.0, *it));
    }
    return out;
}

/// Renyi entropy in nats; alpha = 1 gives von Neumann, alpha = inf the min-entropy.
inline double renyi_entropy(const ComplexMatrix &rho, double alpha) {
    if (!(alpha > 0)) {
        throw DomainError("renyi_entropy: alpha must be positive");
    }
    auto ev = entanglement_spectrum(rho);
    if (std::isinf(alpha)) {
        return -std::log(ev.front());
    }
    if (alpha == 1.0) {
        double s = 0;
        for (double l : ev) {
            if (l > 0) {
                s -= l * std::log(l);
            }
        }
        return s;
    }
    double acc = 0;
    for (double l : ev) {
        if (l > 0) {
            acc += std::pow(l, alpha);
        }
    }
    return std::log(acc) / (1.0 - alpha);
}

struct Flatness {
    std::optional<int> n_I;
    bool flat = false;
};

inline Flatness flatness_check(const ComplexMatrix &rho, int q, double tol = 1e-9) {
    auto ev = entanglement_spectrum(rho);
    long long count = 0;
    for (double l : ev) {
        if (l > tol) {
            count++;
        }
    }
    Flatness f;
    int n = 0;
    long long pw = 1;
    while (pw < count) {
        pw *= q;
        n++;
    }
    if (pw != count) {
        return f;
    }
    double level = 1.0 / static_cast<double>(count);
    for (double l : ev) {
        if (std::abs(l) > tol && std::abs(l - level) > tol) {
            return f;
        }
    }
    f.n_I = n;
    f.flat = true;
    return f;
}

namespace detail {

/// Applies a q x q matrix to one site of a vector over n sites.
inline void apply_one_site(ComplexVector &v, const ComplexMatrix &m, int q, int n_sites, int site) {
    const long long inner = ipow(q, n_sites - site - 1);
    const long long outer = ipow(q, site);
    using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMat tmp(q, inner);
    for (long long o = 0; o < outer; o++) {
        Eigen::Map<RowMat> block(v.data() + o * q * inner, q, inner);
        tmp.noalias() = m * block;
        block = tmp;
    }
}

/// vec(K) as a vector over 2n sites (output sites first), K the full
/// non-unitary evolution with raw |alpha><alpha| for measurements.
inline ComplexVector vectorized_evolution(const CircuitRealization &c) {
    int n = c.sites;
    if (n > 12) {
        throw InputError("infinite_temp_correlator: window too large for the dense oracle");
    }
    long long dim = ipow(c.q, n);
    ComplexVector k = ComplexVector::Zero(dim * dim);
    for (long long r = 0; r < dim; r++) {
        k(r * dim + r) = 1;
    }
    for (const auto &row : c.rows) {
        for (const auto &s : row) {
            apply_two_site(k, c.slot_matrix(s), c.q, 2 * n, s.link);
        }
    }
    return k;
}

}  // namespace detail

/// q tr[K^dag rho(origin) K sigma(x)] / tr[K^dag K] for every site x, using
/// tr[K^dag rho K sigma] = <<K| rho x sigma^T |K>>. The factor q makes the
/// sigma = I diagnostic equal tr(rho).
inline std::vector<Complex> infinite_temp_correlator_profile(const CircuitRealization &c, const ComplexMatrix &rho,
                                                             const ComplexMatrix &sigma, int origin) {
    if (rho.rows() != c.q || rho.cols() != c.q || sigma.rows() != c.q || sigma.cols() != c.q) {
        throw InputError("rho and sigma must be q x q");
    }
    // Geometry check: the operator line must not touch the window edge.
    trace_operator_line(c, origin);
    int n = c.sites;
    ComplexVector k = detail::vectorized_evolution(c);
    double norm = k.squaredNorm();
    ComplexVector w = k;
    detail::apply_one_site(w, rho, c.q, 2 * n, origin);
    ComplexMatrix st = sigma.transpose();
    std::vector<Complex> out(n);
    for (int x = 0; x < n; x++) {
        ComplexVector wx = w;
        detail::apply_one_site(wx, st, c.q, 2 * n, n + x);
        out[x] = static_cast<double>(c.q) * k.dot(wx) / norm;
    }
    return out;
}

inline Complex infinite_temp_correlator(const CircuitRealization &c, const ComplexMatrix &rho,
                                        const ComplexMatrix &sigma, int origin, int x) {
    return infinite_temp_correlator_profile(c, rho, sigma, origin).at(x);
}

/// The sigma = I evaluation; 1 for any valid layout and unit-trace rho.
inline Complex normalization_diagnostic(const CircuitRealization &c, const ComplexMatrix &rho, int origin) {
    return infinite_temp_correlator(c, rho, identity(c.q), origin, origin);
}

struct DephaserReport {
    double max_deviation = 0;
    bool agree = false;
    int extra_slots = 0;
    int extra_measurements = 0;
};

/// Embeds `c` (outcomes assigned) in a window padded by `padding` sites on
/// each side, fills every slot touching the padding with random gates and
/// measurements, and compares the reduced states of the region.
inline DephaserReport dephaser_check(const CircuitRealization &c, int region_start, int region_len, int padding,
                                     uint64_t seed, double p_extra = 0.5) {
    if (padding < 0 || padding % 2 != 0) {
        throw InputError("dephaser_check: padding must be even so row parity is kept");
    }
    Rng rng(seed);
    CircuitRealization big = empty_layout(c.q, c.sites + 2 * padding, c.n_rows);
    big.ueb = c.ueb;
    big.gate_table = c.gate_table;
    big.unitary_table = c.unitary_table;
    if (big.gate_table.empty()) {
        add_gate(big, swap_gate(c.q));
    }
    SlotSet original(big.sites, big.n_rows);
    for (const auto &row : c.rows) {
        for (auto s : row) {
            s.link += padding;
            place_slot(big, s);
            original.insert(s.row, s.link);
        }
    }
    DephaserReport rep;
    for (int r = 1; r <= big.n_rows; r++) {
        for (int i : row_links(r, big.sites)) {
            bool outside = i < padding || i + 1 >= padding + c.sites;
            if (!outside) {
                continue;
            }
            GateSlot s;
            s.row = r;
            s.link = i;
            if (rng.bernoulli(p_extra)) {
                s.kind = SlotKind::Measurement;
                s.outcome = static_cast<int>(rng.below(c.q * c.q));
            } else {
                s.kind = SlotKind::DualUnitary;
                s.gate_id = static_cast<int>(rng.below(big.gate_table.size()));
            }
            place_slot(big, s);
            rep.extra_slots++;
        }
    }
    // Extra measurements whose light cones would reach original gates are
    // demoted to dressed swaps; extra gates on light cones become dressed swaps.
    for (int guard = 0; guard < 10000; guard++) {
        auto rays = compute_rays(big);
        bool changed = false;
        for (const auto &ray : rays) {
            if (original.contains(ray.origin_row, ray.origin_link)) {
                continue;
            }
            bool hits = false;
            for (const auto &st : ray.path) {
                const GateSlot *g = big.slot_at_link(st.row, st.link);
                if (original.contains(st.row, st.link) && g->kind == SlotKind::DualUnitary) {
                    hits = true;
                }
            }
            if (hits) {
                GateSlot *m = big.slot_at_link(ray.origin_row, ray.origin_link);
                m->kind = SlotKind::DressedSwap;
                m->outcome = kUnsampled;
                m->u1_id = add_unitary(big, random_one_site_unitary(c.q, rng));
                m->u2_id = add_unitary(big, random_one_site_unitary(c.q, rng));
                changed = true;
                break;
            }
        }
        if (!changed) {
            break;
        }
    }
    SlotSet forced = ray_slots(big, compute_rays(big));
    for (auto &row : big.rows) {
        for (auto &s : row) {
            if (!original.contains(s.row, s.link) && s.kind == SlotKind::DualUnitary &&
                forced.contains(s.row, s.link)) {
                s.kind = SlotKind::DressedSwap;
                s.u1_id = add_unitary(big, random_one_site_unitary(c.q, rng));
                s.u2_id = add_unitary(big, random_one_site_unitary(c.q, rng));
            }
            if (!original.contains(s.row, s.link) && s.kind == SlotKind::Measurement) {
                rep.extra_measurements++;
            }
        }
    }
    big.rays = compute_rays(big);
    auto small_state = evolve_fixed(c, solvable_initial_state(c.q, c.sites)).state;
    auto big_state = evolve_fixed(big, solvable_initial_state(c.q, big.sites)).state;
    ComplexMatrix a = rdm(small_state, region_start, region_len);
    ComplexMatrix b = rdm(big_state, region_start + padding, region_len);
    rep.max_deviation = max_abs(a - b);
    rep.agree = rep.max_deviation < 1e-10;
    return rep;
}

}  // namespace hdu

#endif
