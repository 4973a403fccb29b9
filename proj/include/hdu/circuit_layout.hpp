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

#ifndef HDU_CIRCUIT_LAYOUT_HPP
#define HDU_CIRCUIT_LAYOUT_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdu/gates.hpp"
#include "hdu/ueb.hpp"

namespace hdu {

// Brickwork geometry. Rows are numbered from 1. Odd rows act on links
// (2n+1, 2n+2), even rows on (2n, 2n+1); the initial Bell pairs sit on
// (2n, 2n+1), so the first row always entangles neighbouring pairs.

inline int first_link(int row) {
    return row % 2 == 1 ? 1 : 0;
}

inline bool link_in_row(int row, int link) {
    return link >= 0 && ((link - first_link(row)) % 2 == 0);
}

/// Link of the row-`row` slot containing `site`, or -1 if the site is idle
/// at the window edge.
inline int link_of_site(int row, int site, int sites) {
    int link = ((site - first_link(row)) % 2 == 0) ? site : site - 1;
    if (link < 0 || link + 1 >= sites) {
        return -1;
    }
    return link;
}

inline std::vector<int> row_links(int row, int sites) {
    std::vector<int> out;
    for (int i = first_link(row); i + 1 < sites; i += 2) {
        out.push_back(i);
    }
    return out;
}

/// Dense (row, link) membership table.
class SlotSet {
   public:
    SlotSet() = default;
    SlotSet(int sites, int n_rows) : sites_(sites), n_rows_(n_rows), in_(static_cast<size_t>(n_rows) * sites, 0) {
    }

    static SlotSet full(int sites, int n_rows) {
        SlotSet s(sites, n_rows);
        for (int r = 1; r <= n_rows; r++) {
            for (int i : row_links(r, sites)) {
                s.insert(r, i);
            }
        }
        return s;
    }

    int sites() const {
        return sites_;
    }
    int n_rows() const {
        return n_rows_;
    }
    bool contains(int row, int link) const {
        if (row < 1 || row > n_rows_ || link < 0 || link >= sites_) {
            return false;
        }
        return in_[static_cast<size_t>(row - 1) * sites_ + link] != 0;
    }
    void insert(int row, int link) {
        in_.at(static_cast<size_t>(row - 1) * sites_ + link) = 1;
    }
    size_t count() const {
        return static_cast<size_t>(std::count(in_.begin(), in_.end(), 1));
    }

   private:
    int sites_ = 0;
    int n_rows_ = 0;
    std::vector<char> in_;
};

/// Slots in the backward light cone of the region [start, start + len) seen
/// from the top of row `n_rows`. Slots outside cannot influence the region's
/// reduced state, so placing only these emulates the infinite lattice.
inline SlotSet backward_cone(int sites, int n_rows, int start, int len) {
    if (len < 1 || start < 0 || start + len > sites) {
        throw GeometryError("backward_cone: region outside window");
    }
    SlotSet s(sites, n_rows);
    int lo = start;
    int hi = start + len - 1;
    for (int r = n_rows; r >= 1; r--) {
        int a = link_of_site(r, lo, sites);
        int b = link_of_site(r, hi, sites);
        if (a < 0 || b < 0) {
            throw GeometryError("backward cone of region [" + std::to_string(start) + ", " +
                                std::to_string(start + len) + ") leaves the window at row " + std::to_string(r));
        }
        for (int i = a; i <= b; i += 2) {
            s.insert(r, i);
        }
        lo = std::min(lo, a);
        hi = std::max(hi, b + 1);
    }
    if ((lo & ~1) < 0 || (hi | 1) >= sites) {
        throw GeometryError("backward cone reaches initial pairs outside the window");
    }
    return s;
}

/// Window and region for entanglement of a block of `ell` sites after `t`
/// rows: W = ell + 2t + 4 sites, A = [t + 2, t + 2 + ell). The start parity
/// equals that of t, so both edges of A fall between final-row gates.
struct EntropyGeometry {
    int ell;
    int t;

    EntropyGeometry(int ell_, int t_) : ell(ell_), t(t_) {
        if (ell < 2 || ell % 2 != 0) {
            throw DomainError("subsystem size must be even and >= 2");
        }
        if (t < 0) {
            throw DomainError("time must be >= 0");
        }
    }
    int sites() const {
        return ell + 2 * t + 4;
    }
    int region_start() const {
        return t + 2;
    }
    SlotSet cone() const {
        return backward_cone(sites(), t, region_start(), ell);
    }
};

enum class SlotKind { DualUnitary, DressedSwap, Measurement };

inline const char *kind_name(SlotKind k) {
    switch (k) {
        case SlotKind::DualUnitary:
            return "dual_unitary";
        case SlotKind::DressedSwap:
            return "dressed_swap";
        case SlotKind::Measurement:
            return "measurement";
    }
    return "?";
}

inline SlotKind kind_from_name(const std::string &s) {
    if (s == "dual_unitary") {
        return SlotKind::DualUnitary;
    }
    if (s == "dressed_swap") {
        return SlotKind::DressedSwap;
    }
    if (s == "measurement") {
        return SlotKind::Measurement;
    }
    throw InputError("unknown slot kind '" + s + "'");
}

constexpr int kUnsampled = -1;

struct GateSlot {
    int row = 0;
    int link = 0;
    SlotKind kind = SlotKind::DualUnitary;
    int gate_id = -1;            // DualUnitary
    int u1_id = -1, u2_id = -1;  // DressedSwap
    int outcome = kUnsampled;    // Measurement
};

enum class TimeDir { Future, Past };

/// One crossing of a ray through a slot. The ray enters on `site_in` and
/// leaves on `site_out`, so its spatial direction is the sign of the change.
struct RayStep {
    int row;
    int link;
    int site_in;
    int site_out;
    bool moves_right() const {
        return site_out > site_in;
    }
};

struct Ray {
    int origin_row;
    int origin_link;
    int spawn_site;
    TimeDir time;
    std::vector<RayStep> path;
    bool absorbed = false;  // ended on a measurement rather than the time boundary
};

struct CircuitRealization {
    int q = 2;
    int sites = 0;
    int n_rows = 0;
    std::vector<std::vector<GateSlot>> rows;  // rows[r-1], sorted by link
    std::vector<TwoSiteGate> gate_table;
    std::vector<ComplexMatrix> unitary_table;
    UnitaryErrorBasis ueb;
    std::vector<Ray> rays;
    uint64_t seed = 0;

    const GateSlot *slot_at_link(int row, int link) const {
        if (row < 1 || row > n_rows) {
            return nullptr;
        }
        const auto &rr = rows[row - 1];
        auto it = std::lower_bound(rr.begin(), rr.end(), link,
                                   [](const GateSlot &s, int l) { return s.link < l; });
        return (it != rr.end() && it->link == link) ? &*it : nullptr;
    }
    GateSlot *slot_at_link(int row, int link) {
        return const_cast<GateSlot *>(std::as_const(*this).slot_at_link(row, link));
    }

    /// Slot acting on `site` in `row`, or nullptr when the site is idle there.
    const GateSlot *slot_at(int row, int site) const {
        int link = link_of_site(row, site, sites);
        return link < 0 ? nullptr : slot_at_link(row, link);
    }

    /// Two-site matrix of a slot. Measurements give the raw |alpha><alpha|.
    ComplexMatrix slot_matrix(const GateSlot &s) const {
        switch (s.kind) {
            case SlotKind::DualUnitary:
                return gate_table.at(s.gate_id).matrix();
            case SlotKind::DressedSwap:
                return DressedSwap{unitary_table.at(s.u1_id), unitary_table.at(s.u2_id)}.matrix();
            case SlotKind::Measurement: {
                if (s.outcome == kUnsampled) {
                    throw InputError("measurement at row " + std::to_string(s.row) + ", link " +
                                     std::to_string(s.link) + " has no outcome");
                }
                ComplexVector a = ueb_state(ueb, s.outcome);
                return a * a.adjoint();
            }
        }
        return {};
    }

    std::vector<const GateSlot *> measurement_slots() const {
        std::vector<const GateSlot *> out;
        for (const auto &r : rows) {
            for (const auto &s : r) {
                if (s.kind == SlotKind::Measurement) {
                    out.push_back(&s);
                }
            }
        }
        return out;
    }

    size_t slot_count() const {
        size_t n = 0;
        for (const auto &r : rows) {
            n += r.size();
        }
        return n;
    }
};

inline CircuitRealization empty_layout(int q, int sites, int n_rows) {
    if (sites < 2 || sites % 2 != 0) {
        throw InputError("window length must be even and >= 2");
    }
    if (n_rows < 0) {
        throw InputError("number of rows must be >= 0");
    }
    CircuitRealization c;
    c.q = q;
    c.sites = sites;
    c.n_rows = n_rows;
    c.rows.resize(n_rows);
    c.ueb = weyl_heisenberg_ueb(q);
    return c;
}

inline int add_gate(CircuitRealization &c, const TwoSiteGate &g) {
    if (g.q() != c.q) {
        throw InputError("gate has the wrong local dimension");
    }
    c.gate_table.push_back(g);
    return static_cast<int>(c.gate_table.size()) - 1;
}

inline int add_unitary(CircuitRealization &c, const ComplexMatrix &u) {
    if (u.rows() != c.q || !is_unitary(u)) {
        throw InputError("one-site unitary has the wrong shape or is not unitary");
    }
    c.unitary_table.push_back(u);
    return static_cast<int>(c.unitary_table.size()) - 1;
}

/// Inserts or replaces the slot at (s.row, s.link).
inline void place_slot(CircuitRealization &c, const GateSlot &s) {
    if (s.row < 1 || s.row > c.n_rows) {
        throw InputError("slot row out of range");
    }
    if (!link_in_row(s.row, s.link) || s.link + 1 >= c.sites) {
        throw InputError("link " + std::to_string(s.link) + " is not a gate position of row " +
                         std::to_string(s.row));
    }
    auto &rr = c.rows[s.row - 1];
    auto it = std::lower_bound(rr.begin(), rr.end(), s.link, [](const GateSlot &a, int l) { return a.link < l; });
    if (it != rr.end() && it->link == s.link) {
        *it = s;
    } else {
        rr.insert(it, s);
    }
}

/// Walks every ray spawned by a measurement. A measurement at (r, i) emits
/// rays from sites i and i+1 into both the future and the past. In each row
/// the ray crosses the slot holding its site to the other leg; idle sites
/// pass it straight through; a measurement absorbs it.
inline std::vector<Ray> compute_rays(const CircuitRealization &c) {
    std::vector<Ray> rays;
    for (const auto &row : c.rows) {
        for (const auto &m : row) {
            if (m.kind != SlotKind::Measurement) {
                continue;
            }
            for (int s : {m.link, m.link + 1}) {
                for (TimeDir td : {TimeDir::Future, TimeDir::Past}) {
                    Ray ray{m.row, m.link, s, td, {}, false};
                    int step = td == TimeDir::Future ? 1 : -1;
                    int site = s;
                    for (int r = m.row + step; r >= 1 && r <= c.n_rows; r += step) {
                        const GateSlot *g = c.slot_at(r, site);
                        if (g == nullptr) {
                            continue;
                        }
                        if (g->kind == SlotKind::Measurement) {
                            ray.absorbed = true;
                            break;
                        }
                        int out = site == g->link ? g->link + 1 : g->link;
                        ray.path.push_back({r, g->link, site, out});
                        site = out;
                    }
                    rays.push_back(std::move(ray));
                }
            }
        }
    }
    return rays;
}

inline SlotSet ray_slots(const CircuitRealization &c, const std::vector<Ray> &rays) {
    SlotSet s(c.sites, c.n_rows);
    for (const auto &ray : rays) {
        for (const auto &st : ray.path) {
            s.insert(st.row, st.link);
        }
    }
    return s;
}

struct LayoutValidation {
    bool ok = true;
    int row = -1;
    int link = -1;
    std::string message;
};

inline LayoutValidation validate_layout(const CircuitRealization &c) {
    LayoutValidation v;
    if (static_cast<int>(c.rows.size()) != c.n_rows) {
        return {false, -1, -1, "row count mismatch"};
    }
    for (int r = 1; r <= c.n_rows; r++) {
        int prev = -1;
        for (const auto &s : c.rows[r - 1]) {
            if (s.row != r || !link_in_row(r, s.link) || s.link + 1 >= c.sites || s.link <= prev) {
                return {false, r, s.link, "slot at an illegal or duplicate position"};
            }
            prev = s.link;
        }
    }
    SlotSet on_ray = ray_slots(c, compute_rays(c));
    for (const auto &row : c.rows) {
        for (const auto &s : row) {
            if (s.kind == SlotKind::DualUnitary && on_ray.contains(s.row, s.link)) {
                return {false, s.row, s.link,
                        "dual-unitary gate at row " + std::to_string(s.row) + ", link " + std::to_string(s.link) +
                            " lies on a measurement light cone and must be a dressed swap"};
            }
        }
    }
    return v;
}

/// Turns every dual-unitary slot on a light-cone ray into a dressed swap with
/// fresh Haar dressings. Used for hand-built layouts.
inline void enforce_ray_restriction(CircuitRealization &c, Rng &rng) {
    c.rays = compute_rays(c);
    SlotSet forced = ray_slots(c, c.rays);
    for (auto &row : c.rows) {
        for (auto &s : row) {
            if (s.kind == SlotKind::DualUnitary && forced.contains(s.row, s.link)) {
                s.kind = SlotKind::DressedSwap;
                s.gate_id = -1;
                s.u1_id = add_unitary(c, random_one_site_unitary(c.q, rng));
                s.u2_id = add_unitary(c, random_one_site_unitary(c.q, rng));
            }
        }
    }
}

struct LayoutSpec {
    int sites = 0;
    int n_rows = 0;
    double p = 0.0;
    uint64_t seed = 0;
    std::vector<TwoSiteGate> gate_pool;
    std::optional<SlotSet> mask;  // slots to place; all brickwork slots when empty
    std::optional<UnitaryErrorBasis> ueb;
};

/// Draws kinds slot by slot (row-major), forces ray slots to dressed swaps,
/// then draws gates: pool entries for dual-unitary slots, fresh Haar
/// dressings for dressed swaps.
inline CircuitRealization sample_layout(const LayoutSpec &spec) {
    if (spec.gate_pool.empty()) {
        throw InputError("sample_layout: gate pool is empty");
    }
    if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
        throw DomainError("sample_layout: p must lie in [0, 1]");
    }
    int q = spec.gate_pool.front().q();
    for (const auto &g : spec.gate_pool) {
        if (g.q() != q) {
            throw InputError("sample_layout: gate pool mixes local dimensions");
        }
    }
    CircuitRealization c = empty_layout(q, spec.sites, spec.n_rows);
    if (spec.ueb) {
        if (spec.ueb->q != q || !verify_ueb(*spec.ueb).ok) {
            throw InputError("sample_layout: invalid unitary error basis");
        }
        c.ueb = *spec.ueb;
    }
    c.seed = spec.seed;
    c.gate_table = spec.gate_pool;
    if (spec.mask && (spec.mask->sites() != spec.sites || spec.mask->n_rows() != spec.n_rows)) {
        throw InputError("sample_layout: slot mask has the wrong shape");
    }
    Rng rng(spec.seed);
    for (int r = 1; r <= c.n_rows; r++) {
        for (int i : row_links(r, c.sites)) {
            if (spec.mask && !spec.mask->contains(r, i)) {
                continue;
            }
            GateSlot s;
            s.row = r;
            s.link = i;
            s.kind = rng.bernoulli(spec.p) ? SlotKind::Measurement : SlotKind::DualUnitary;
            c.rows[r - 1].push_back(s);
        }
    }
    c.rays = compute_rays(c);
    SlotSet forced = ray_slots(c, c.rays);
    for (auto &row : c.rows) {
        for (auto &s : row) {
            if (s.kind == SlotKind::Measurement) {
                continue;
            }
            if (forced.contains(s.row, s.link)) {
                s.kind = SlotKind::DressedSwap;
                s.u1_id = add_unitary(c, random_one_site_unitary(q, rng));
                s.u2_id = add_unitary(c, random_one_site_unitary(q, rng));
            } else {
                s.gate_id = static_cast<int>(rng.below(c.gate_table.size()));
            }
        }
    }
    return c;
}

/// Outcomes in row-major order of the measurement slots.
inline CircuitRealization assign_outcomes(CircuitRealization c, const std::vector<int> &outcomes) {
    size_t k = 0;
    int n_out = c.q * c.q;
    for (auto &row : c.rows) {
        for (auto &s : row) {
            if (s.kind != SlotKind::Measurement) {
                continue;
            }
            if (k >= outcomes.size()) {
                throw InputError("assign_outcomes: too few outcomes");
            }
            if (outcomes[k] < 0 || outcomes[k] >= n_out) {
                throw InputError("assign_outcomes: outcome index " + std::to_string(outcomes[k]) + " out of range");
            }
            s.outcome = outcomes[k++];
        }
    }
    if (k != outcomes.size()) {
        throw InputError("assign_outcomes: too many outcomes");
    }
    return c;
}

inline CircuitRealization assign_outcomes(CircuitRealization c, Rng &rng) {
    int n_out = c.q * c.q;
    for (auto &row : c.rows) {
        for (auto &s : row) {
            if (s.kind == SlotKind::Measurement) {
                s.outcome = static_cast<int>(rng.below(n_out));
            }
        }
    }
    return c;
}

inline CircuitRealization assign_outcomes_seeded(CircuitRealization c, uint64_t sampling_seed) {
    Rng rng(sampling_seed);
    return assign_outcomes(std::move(c), rng);
}

// ---- JSON ----

inline nlohmann::json layout_to_json(const CircuitRealization &c) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : c.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto &s : row) {
            nlohmann::json js = {{"link", s.link}, {"kind", kind_name(s.kind)}};
            if (s.kind == SlotKind::DualUnitary) {
                js["gate"] = s.gate_id;
            } else if (s.kind == SlotKind::DressedSwap) {
                js["u1"] = s.u1_id;
                js["u2"] = s.u2_id;
            } else if (s.outcome == kUnsampled) {
                js["outcome"] = nullptr;
            } else {
                js["outcome"] = s.outcome;
            }
            jr.push_back(js);
        }
        rows.push_back(jr);
    }
    nlohmann::json gates = nlohmann::json::array();
    for (const auto &g : c.gate_table) {
        gates.push_back(gate_to_json(g));
    }
    nlohmann::json units = nlohmann::json::array();
    for (const auto &u : c.unitary_table) {
        units.push_back(matrix_to_json(u, c.q));
    }
    return {{"q", c.q},
            {"window", {{"x_min", 0}, {"x_max", c.sites - 1}}},
            {"rows", rows},
            {"seed", c.seed},
            {"gates", gates},
            {"unitaries", units},
            {"ueb", ueb_to_json(c.ueb)}};
}

inline CircuitRealization layout_from_json(const nlohmann::json &j) {
    try {
        int q = j.at("q").get<int>();
        int x_min = j.at("window").at("x_min").get<int>();
        int x_max = j.at("window").at("x_max").get<int>();
        if (x_min != 0) {
            throw InputError("layout JSON: window must start at x_min = 0");
        }
        const auto &rows = j.at("rows");
        CircuitRealization c = empty_layout(q, x_max - x_min + 1, static_cast<int>(rows.size()));
        c.seed = j.value("seed", uint64_t{0});
        if (j.contains("ueb")) {
            c.ueb = ueb_from_json(j["ueb"]);
        }
        for (const auto &g : j.value("gates", nlohmann::json::array())) {
            add_gate(c, gate_from_json(g));
        }
        for (const auto &u : j.value("unitaries", nlohmann::json::array())) {
            add_unitary(c, matrix_from_json(u));
        }
        for (int r = 1; r <= c.n_rows; r++) {
            for (const auto &js : rows[r - 1]) {
                GateSlot s;
                s.row = r;
                s.link = js.at("link").get<int>();
                s.kind = kind_from_name(js.at("kind").get<std::string>());
                if (s.kind == SlotKind::DualUnitary) {
                    s.gate_id = js.at("gate").get<int>();
                    if (s.gate_id < 0 || s.gate_id >= static_cast<int>(c.gate_table.size())) {
                        throw InputError("layout JSON: gate id out of range");
                    }
                } else if (s.kind == SlotKind::DressedSwap) {
                    s.u1_id = js.at("u1").get<int>();
                    s.u2_id = js.at("u2").get<int>();
                    int n = static_cast<int>(c.unitary_table.size());
                    if (s.u1_id < 0 || s.u1_id >= n || s.u2_id < 0 || s.u2_id >= n) {
                        throw InputError("layout JSON: unitary id out of range");
                    }
                } else {
                    const auto &o = js.at("outcome");
                    s.outcome = o.is_null() ? kUnsampled : o.get<int>();
                    if (s.outcome != kUnsampled && (s.outcome < 0 || s.outcome >= q * q)) {
                        throw InputError("layout JSON: outcome out of range");
                    }
                }
                place_slot(c, s);
            }
        }
        c.rays = compute_rays(c);
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("layout JSON: ") + e.what());
    }
}

}  // namespace hdu

#endif
