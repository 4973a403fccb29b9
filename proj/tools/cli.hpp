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

#ifndef HDU_TOOLS_CLI_HPP
#define HDU_TOOLS_CLI_HPP

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hdu/hdu.hpp"

namespace hdu::cli {

constexpr const char *kVersion = "1.0.0";

enum ExitCode { kOk = 0, kInput = 2, kGeometry = 3, kDomain = 4, kCheckFailed = 5 };

/// Raised when a crosscheck command finds a failing check.
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal, locale independent.
inline std::string fmt(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string fmt(Complex z) {
    return fmt(z.real()) + "," + fmt(z.imag());
}

/// Exact decimal for rationals whose denominator is 2^a 5^b, "num/den" otherwise.
inline std::string decimal_or_fraction(const BigRational &x) {
    BigInt den = x.get_den();
    int twos = 0, fives = 0;
    while (den % 2 == 0) {
        den /= 2;
        twos++;
    }
    while (den % 5 == 0) {
        den /= 5;
        fives++;
    }
    if (den != 1) {
        return to_string(x);
    }
    int digits = std::max(twos, fives);
    BigInt scale = 1;
    for (int k = 0; k < digits; k++) {
        scale *= 10;
    }
    BigInt scaled = x.get_num() * (scale / x.get_den());
    bool neg = scaled < 0;
    std::string body = BigInt(abs(scaled)).get_str();
    if (digits > 0) {
        if (static_cast<int>(body.size()) <= digits) {
            body.insert(0, digits + 1 - body.size(), '0');
        }
        body.insert(body.size() - digits, ".");
    }
    return (neg ? "-" : "") + body;
}

struct Check {
    std::string name;
    double max_deviation = 0;
    bool pass = true;
    std::string detail;
};

inline nlohmann::json checks_json(const std::vector<Check> &checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &c : checks) {
        nlohmann::json j = {{"name", c.name}, {"max_deviation", c.max_deviation}, {"pass", c.pass}};
        if (!c.detail.empty()) {
            j["detail"] = c.detail;
        }
        arr.push_back(j);
    }
    return {{"checks", arr}};
}

inline nlohmann::json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw InputError("malformed JSON in '" + path + "': " + e.what());
    }
}

/// Expands a flat JSON config object into option tokens placed before the
/// user's own flags, so that flags given on the command line win.
inline std::vector<std::string> merge_config(const std::vector<std::string> &args) {
    std::vector<std::string> out;
    std::string config_path;
    for (size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty()) {
        return args;
    }
    nlohmann::json cfg = read_json_file(config_path);
    if (!cfg.is_object()) {
        throw InputError("config file must hold a flat JSON object");
    }
    std::vector<std::string> injected;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const auto &v = it.value();
        if (v.is_object() || v.is_array()) {
            throw InputError("config key '" + it.key() + "' must be a scalar");
        }
        injected.push_back("--" + it.key());
        if (v.is_string()) {
            injected.push_back(v.get<std::string>());
        } else if (v.is_boolean()) {
            injected.push_back(v.get<bool>() ? "true" : "false");
        } else if (v.is_number_integer()) {
            injected.push_back(std::to_string(v.get<long long>()));
        } else if (v.is_number_unsigned()) {
            injected.push_back(std::to_string(v.get<unsigned long long>()));
        } else {
            injected.push_back(fmt(v.get<double>()));
        }
    }
    size_t first_flag = 0;
    while (first_flag < args.size() && args[first_flag].rfind("-", 0) != 0) {
        first_flag++;
    }
    out.insert(out.end(), args.begin(), args.begin() + first_flag);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + first_flag, args.end());
    return out;
}

inline nlohmann::json config_echo(const CLI::App *sub) {
    nlohmann::json echo = nlohmann::json::object();
    for (const CLI::Option *opt : sub->get_options()) {
        std::string name = opt->get_single_name();
        if (name == "help" || name.empty()) {
            continue;
        }
        auto res = opt->results();
        if (!res.empty()) {
            echo[name] = res.back();
        } else if (!opt->get_default_str().empty()) {
            echo[name] = opt->get_default_str();
        }
    }
    return echo;
}

inline nlohmann::json report(const CLI::App *sub, const nlohmann::json &results) {
    return {{"version", kVersion}, {"config_echo", config_echo(sub)}, {"results", results}};
}

// ---- gates verify ----

inline int cmd_gates_verify(const std::string &file, double tol, std::ostream &out, const CLI::App *sub) {
    nlohmann::json j = read_json_file(file);
    std::vector<nlohmann::json> items;
    if (j.is_array()) {
        for (const auto &x : j) {
            items.push_back(x);
        }
    } else {
        items.push_back(j);
    }
    nlohmann::json gates = nlohmann::json::array();
    for (size_t k = 0; k < items.size(); k++) {
        ComplexMatrix m = matrix_from_json(items[k]);
        int q = items[k]["q"].get<int>();
        if (m.rows() != q * q) {
            throw InputError("gate " + std::to_string(k) + ": expected q^4 entries");
        }
        double du = unitarity_deviation(m);
        double dd = dual_unitarity_deviation(m);
        bool unitary = du < tol;
        gates.push_back({{"index", k},
                         {"q", q},
                         {"unitary", unitary},
                         {"unitarity_deviation", du},
                         {"dual_unitary", unitary && dd < tol},
                         {"dual_unitarity_deviation", dd}});
    }
    out << report(sub, {{"gates", gates}}).dump(2) << "\n";
    return kOk;
}

// ---- correlate ----

struct CorrelateOptions {
    int q = 2;
    int sites = 0;
    int t = 4;
    double p = 0.0;
    uint64_t seed = 0;
    std::string gate = "random";
    std::string gate_file;
    std::string layout_file;
    std::string rho_file;
    std::string sigma_file;
    int origin = -1;
};

inline ComplexMatrix default_rho(int q) {
    ComplexMatrix r = ComplexMatrix::Zero(q, q);
    r(0, 0) = 1;
    return r;
}

inline ComplexMatrix default_sigma(int q) {
    ComplexMatrix s = ComplexMatrix::Zero(q, q);
    s(0, 0) = 1;
    s(1, 1) = -1;
    return s;
}

inline CircuitRealization truncate_rows(const CircuitRealization &c, int t) {
    CircuitRealization out = c;
    out.n_rows = t;
    out.rows.resize(t);
    out.rays = compute_rays(out);
    return out;
}

inline int cmd_correlate(const CorrelateOptions &o, std::ostream &out, std::ostream *warn = nullptr) {
    CircuitRealization c;
    if (!o.layout_file.empty()) {
        c = layout_from_json(read_json_file(o.layout_file));
        auto v = validate_layout(c);
        if (!v.ok) {
            throw InputError("layout violates the light-cone restriction: " + v.message);
        }
        if (!c.measurement_slots().empty() && c.measurement_slots().front()->outcome == kUnsampled) {
            c = assign_outcomes_seeded(c, o.seed);
        }
    } else {
        if (o.t < 1) {
            throw DomainError("--t must be >= 1");
        }
        int sites = o.sites > 0 ? o.sites : 2 * o.t + 4;
        std::vector<TwoSiteGate> pool;
        if (!o.gate_file.empty()) {
            nlohmann::json j = read_json_file(o.gate_file);
            if (j.is_array()) {
                for (const auto &g : j) {
                    pool.push_back(gate_from_json(g));
                }
            } else {
                pool.push_back(gate_from_json(j));
            }
            for (const auto &g : pool) {
                if (!is_dual_unitary(g)) {
                    throw InputError("gate file holds a gate that is not dual-unitary");
                }
            }
        } else if (o.gate == "swap") {
            pool.push_back(swap_gate(o.q));
        } else if (o.gate == "random") {
            if (o.q != 2) {
                throw InputError("--gate random is available for q = 2 only; pass --gate-file for q > 2");
            }
            Rng grng(substream_seed(o.seed, 0x67617465ULL));
            pool.push_back(random_du_gate_q2(grng));
        } else {
            throw InputError("--gate must be swap or random");
        }
        LayoutSpec spec;
        spec.sites = sites;
        spec.n_rows = o.t;
        spec.p = o.p;
        spec.seed = o.seed;
        spec.gate_pool = pool;
        c = assign_outcomes_seeded(sample_layout(spec), substream_seed(o.seed, 1));
    }
    ComplexMatrix rho = o.rho_file.empty() ? default_rho(c.q) : matrix_from_json(read_json_file(o.rho_file));
    ComplexMatrix sigma = o.sigma_file.empty() ? default_sigma(c.q) : matrix_from_json(read_json_file(o.sigma_file));
    int origin = o.origin >= 0 ? o.origin : c.sites / 2;
    out << "t,x,re_c,im_c,abs_c,realization_seed\n";
    for (int t = 1; t <= c.n_rows; t++) {
        CircuitRealization ct = truncate_rows(c, t);
        std::vector<Complex> prof;
        try {
            prof = correlator_profile(ct, rho, sigma, origin);
        } catch (const GeometryError &e) {
            // A supplied window may only hold the line at full depth.
            if (o.layout_file.empty() || t == c.n_rows) {
                throw;
            }
            if (warn) {
                *warn << "warning: t = " << t << " skipped: " << e.what() << "\n";
            }
            continue;
        }
        for (int x = 0; x < c.sites; x++) {
            out << t << "," << x << "," << fmt(prof[x]) << "," << fmt(std::abs(prof[x])) << "," << c.seed << "\n";
        }
    }
    return kOk;
}

// ---- entropy exact ----

inline std::vector<BigRational> parse_p_grid(const std::string &spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw InputError("--p-grid must be start:stop:step");
    }
    BigRational a = parse_rational(parts[0]), b = parse_rational(parts[1]), h = parse_rational(parts[2]);
    if (h <= 0) {
        throw InputError("--p-grid step must be positive");
    }
    std::vector<BigRational> out;
    for (BigRational x = a; x <= b; x += h) {
        x.canonicalize();
        out.push_back(x);
        if (out.size() > 100000) {
            throw InputError("--p-grid has too many points");
        }
    }
    return out;
}

struct ExactOptions {
    std::vector<int> ells;
    std::vector<std::string> ps;
    std::string p_grid;
    std::string method = "all";
    int q = 2;
    int t = -1;
};

inline int cmd_entropy_exact(const ExactOptions &o, std::ostream &out) {
    if (o.q < 2) {
        throw DomainError("--q must be >= 2");
    }
    std::vector<BigRational> ps;
    for (const auto &s : o.ps) {
        ps.push_back(parse_rational(s));
    }
    if (!o.p_grid.empty()) {
        auto g = parse_p_grid(o.p_grid);
        ps.insert(ps.end(), g.begin(), g.end());
    }
    if (ps.empty()) {
        throw InputError("give --p or --p-grid");
    }
    if (o.ells.empty()) {
        throw InputError("give --l");
    }
    for (int ell : o.ells) {
        if (o.t >= 0 && 2 * o.t < ell) {
            throw DomainError("t = " + std::to_string(o.t) + " < l/2 = " + std::to_string(ell / 2) +
                              ": the steady-state formulas do not apply; use `entropy curve` or "
                              "`entropy mc` for the growth regime");
        }
    }
    static const std::vector<std::string> all = {"narayana_sum", "hypergeometric", "symmetric_point", "asymptotic"};
    std::vector<std::string> methods;
    if (o.method == "all") {
        methods = all;
    } else if (std::find(all.begin(), all.end(), o.method) != all.end()) {
        methods = {o.method};
    } else {
        throw InputError("unknown --method '" + o.method + "'");
    }
    bool explicit_method = o.method != "all";
    double log2q = std::log2(static_cast<double>(o.q));
    out << "l,p,method,S_over_lnq,S_bits\n";
    for (int ell : o.ells) {
        for (const auto &p : ps) {
            if (p < 0 || p > 1) {
                throw DomainError("p = " + to_string(p) + " outside [0, 1]");
            }
            for (const auto &m : methods) {
                std::string value;
                double v;
                if (m == "narayana_sum") {
                    auto r = steady_entropy_sum(ell, p);
                    value = to_string(*r.exact);
                    v = r.value_over_lnq;
                } else if (m == "hypergeometric") {
                    auto r = steady_entropy_2f1(ell, p);
                    value = to_string(*r.exact);
                    v = r.value_over_lnq;
                } else if (m == "symmetric_point") {
                    if (p != rational(1, 2)) {
                        if (explicit_method) {
                            throw DomainError("symmetric_point applies at p = 1/2 only");
                        }
                        continue;
                    }
                    auto r = steady_entropy_symmetric(ell);
                    value = to_string(*r.exact);
                    v = r.value_over_lnq;
                } else {
                    if (p == 0 || p == 1) {
                        if (explicit_method) {
                            throw DomainError("asymptotic form is invalid at p = 0 and p = 1");
                        }
                        continue;
                    }
                    v = asymptotic_entropy(ell, p.get_d());
                    value = fmt(v);
                }
                out << ell << "," << decimal_or_fraction(p) << "," << m << "," << value << "," << fmt(v * log2q) << "\n";
            }
        }
    }
    return kOk;
}

// ---- entropy mc / curve ----

inline void mc_row(std::ostream &out, const MonteCarloResult &r) {
    out << r.ell << "," << fmt(r.p) << "," << r.t << "," << r.n_samples << "," << fmt(r.mean) << ","
        << fmt(r.stderr_) << "," << r.seed << "\n";
}

inline const char *kMcHeader = "l,p,t,n_samples,mean_S,stderr,seed\n";

// ---- crosschecks ----

inline ComplexMatrix random_density_matrix(int q, Rng &rng) {
    ComplexMatrix g(q, q);
    for (int i = 0; i < q; i++) {
        for (int j = 0; j < q; j++) {
            g(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    ComplexMatrix r = g * g.adjoint();
    return r / r.trace();
}

inline ComplexMatrix random_traceless(int q, Rng &rng) {
    ComplexMatrix g(q, q);
    for (int i = 0; i < q; i++) {
        for (int j = 0; j < q; j++) {
            g(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    g -= (g.trace() / static_cast<double>(q)) * identity(q);
    return g;
}

inline std::vector<TwoSiteGate> random_du_pool(Rng &rng, int n) {
    std::vector<TwoSiteGate> pool;
    for (int k = 0; k < n; k++) {
        pool.push_back(random_du_gate_q2(rng));
    }
    return pool;
}

struct EntanglementCrosscheck {
    int trials = 0;
    int flat = 0;
    int n_I_match = 0;
    int invalid_layouts = 0;
    double worst_prob_dev = 0;
    double worst_flat_dev = 0;
    int worst_n_I_dev = 0;
};

/// Oracle against matching engine on random cone-restricted q = 2 layouts.
inline EntanglementCrosscheck entanglement_crosscheck(int ell, int t, int trials, uint64_t seed) {
    EntanglementCrosscheck r;
    EntropyGeometry geo(ell, t);
    SlotSet cone = geo.cone();
    for (int k = 0; k < trials; k++) {
        Rng rng(substream_seed(seed, static_cast<uint64_t>(k)));
        LayoutSpec spec;
        spec.sites = geo.sites();
        spec.n_rows = t;
        spec.p = rng.uniform01();
        spec.seed = rng();
        spec.gate_pool = random_du_pool(rng, 4);
        spec.mask = cone;
        CircuitRealization c = sample_layout(spec);
        if (!validate_layout(c).ok) {
            r.invalid_layouts++;
        }
        auto rec = evolve_sample(c, solvable_initial_state(2, c.sites), rng);
        int m = 0;
        double joint = 1;
        for (double pr : rec.conditional_probs) {
            m++;
            joint *= 0.25;
            r.worst_prob_dev = std::max(r.worst_prob_dev, std::abs(pr - 0.25));
        }
        r.worst_prob_dev = std::max(r.worst_prob_dev, std::abs(rec.probability - joint));
        ComplexMatrix rho = rdm(rec.state, geo.region_start(), ell);
        auto f = flatness_check(rho, 2, 1e-9);
        auto toy = toy_entropy(KindGrid::from_layout(c), ell, t, 2);
        r.trials++;
        if (f.flat) {
            r.flat++;
            int dev = std::abs(*f.n_I - toy.n_I);
            r.worst_n_I_dev = std::max(r.worst_n_I_dev, dev);
            if (dev == 0) {
                r.n_I_match++;
            }
            auto ev = entanglement_spectrum(rho);
            double level = std::pow(0.5, *f.n_I);
            for (double l : ev) {
                r.worst_flat_dev = std::max(r.worst_flat_dev, std::min(std::abs(l), std::abs(l - level)));
            }
        } else {
            r.worst_n_I_dev = std::max(r.worst_n_I_dev, ell + 1);
        }
    }
    return r;
}

struct CorrelatorCrosscheck {
    int trials = 0;
    int reflected = 0;
    int reflected_to_bottom = 0;
    double worst_dev = 0;
    double worst_off_cone = 0;
    double worst_norm_dev = 0;
};

/// Channel tracing against the dense oracle on random q = 2 layouts.
inline CorrelatorCrosscheck correlator_crosscheck(int trials, int max_sites, int max_t, uint64_t seed) {
    CorrelatorCrosscheck r;
    for (int k = 0; r.trials < trials; k++) {
        if (k > 100 * trials + 100) {
            throw GeometryError("could not place operator lines inside the window");
        }
        Rng rng(substream_seed(seed, static_cast<uint64_t>(k)));
        int t = 1 + static_cast<int>(rng.below(max_t));
        int min_sites = std::min(max_sites, 2 * t + 2);
        int sites = min_sites + 2 * static_cast<int>(rng.below((max_sites - min_sites) / 2 + 1));
        LayoutSpec spec;
        spec.sites = sites;
        spec.n_rows = t;
        spec.p = 0.15 + 0.7 * rng.uniform01();
        spec.seed = rng();
        spec.gate_pool = random_du_pool(rng, 4);
        CircuitRealization c = assign_outcomes(sample_layout(spec), rng);
        int origin = static_cast<int>(rng.below(sites));
        LineTrace tr;
        try {
            tr = trace_operator_line(c, origin);
        } catch (const GeometryError &) {
            continue;
        }
        ComplexMatrix rho = random_density_matrix(2, rng);
        ComplexMatrix sigma = random_traceless(2, rng);
        auto oracle = infinite_temp_correlator_profile(c, rho, sigma, origin);
        for (int x = 0; x < sites; x++) {
            CorrelatorValue v = shifted_lightcone_correlator(c, rho, sigma, origin, x);
            r.worst_dev = std::max(r.worst_dev, std::abs(v.value - oracle[x]));
            if (v.off_cone) {
                r.worst_off_cone = std::max(r.worst_off_cone, std::abs(oracle[x]));
            }
        }
        bool refl = false;
        for (const auto &st : tr.steps) {
            refl = refl || st.reflected;
        }
        r.reflected += refl;
        r.reflected_to_bottom += refl && tr.ends_at_bottom;
        r.worst_norm_dev = std::max(r.worst_norm_dev, std::abs(normalization_diagnostic(c, rho, origin) - 1.0));
        r.trials++;
    }
    return r;
}

inline void finish_checks(const std::vector<Check> &checks, const CLI::App *sub, std::ostream &out) {
    out << report(sub, checks_json(checks)).dump(2) << "\n";
    for (const auto &c : checks) {
        if (!c.pass) {
            throw CheckFailure("check '" + c.name + "' failed");
        }
    }
}

inline int run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
    CLI::App app{"hybrid dual-unitary circuit toolkit", "hdu"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path, out_path;
    auto add_common = [&](CLI::App *s) {
        s->add_option("--config", config_path, "flat JSON config; command-line flags take precedence");
        s->add_option("--out", out_path, "output file (default stdout)");
    };

    auto *gates = app.add_subcommand("gates", "gate utilities");
    gates->require_subcommand(1);
    auto *gverify = gates->add_subcommand("verify", "unitarity and dual-unitarity of gates in a JSON file");
    std::string gate_path;
    double tol = 1e-10;
    gverify->add_option("--file", gate_path, "gate JSON (object or array of objects)")->required();
    gverify->add_option("--tol", tol, "tolerance")->capture_default_str();
    add_common(gverify);

    auto *corr = app.add_subcommand("correlate", "infinite-temperature correlators via channel tracing");
    CorrelateOptions co;
    corr->add_option("--q", co.q, "local dimension")->capture_default_str();
    corr->add_option("--sites", co.sites, "window length (default 2t + 4)");
    corr->add_option("--t", co.t, "number of brickwork rows")->capture_default_str();
    corr->add_option("--p", co.p, "measurement probability")->capture_default_str();
    corr->add_option("--seed", co.seed, "realization seed")->required();
    corr->add_option("--gate", co.gate, "swap or random")->capture_default_str();
    corr->add_option("--gate-file", co.gate_file, "JSON gate(s) used for dual-unitary slots");
    corr->add_option("--layout", co.layout_file, "layout JSON to use instead of sampling");
    corr->add_option("--rho", co.rho_file, "JSON matrix for rho (default |0><0|)");
    corr->add_option("--sigma", co.sigma_file, "JSON matrix for sigma (default diag(1,-1,0,...))");
    corr->add_option("--origin", co.origin, "site of rho (default window centre)");
    add_common(corr);

    auto *entropy = app.add_subcommand("entropy", "averaged entanglement entropy");
    entropy->require_subcommand(1);
    auto *eexact = entropy->add_subcommand("exact", "closed-form steady-state values");
    ExactOptions eo;
    eexact->add_option("--l", eo.ells, "subsystem size(s)")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    eexact->add_option("--p", eo.ps, "measurement probability (decimal or a/b)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    eexact->add_option("--p-grid", eo.p_grid, "start:stop:step, exact rational steps");
    eexact->add_option("--method", eo.method, "all, narayana_sum, hypergeometric, symmetric_point, asymptotic")->capture_default_str();
    eexact->add_option("--q", eo.q, "local dimension for the bits column")->capture_default_str();
    eexact->add_option("--t", eo.t, "time at which the value is wanted (checked against l/2)");
    add_common(eexact);

    int ell = 20, t = 20, q = 2, t_max = -1, trials = 200;
    double p = 0.5;
    long long samples = 20000;
    uint64_t seed = 0;
    auto add_mc = [&](CLI::App *s) {
        s->add_option("--l", ell, "subsystem size")->capture_default_str();
        s->add_option("--p", p, "measurement probability")->capture_default_str();
        s->add_option("--q", q, "local dimension")->capture_default_str();
        s->add_option("--samples", samples, "samples per point")->capture_default_str();
        s->add_option("--seed", seed, "master seed")->required();
        add_common(s);
    };
    auto *emc = entropy->add_subcommand("mc", "Monte Carlo average at one time");
    add_mc(emc);
    emc->add_option("--t", t, "time in rows")->capture_default_str();
    auto *ecurve = entropy->add_subcommand("curve", "Monte Carlo average for t = 0..t-max");
    add_mc(ecurve);
    ecurve->add_option("--t-max", t_max, "last time (default l)");
    auto *ecross = entropy->add_subcommand("crosscheck", "oracle, matching engine and formula agreement");
    int cross_t = 3, cross_l = 6;
    ecross->add_option("--l", cross_l, "subsystem size")->capture_default_str();
    ecross->add_option("--t", cross_t, "time in rows")->capture_default_str();
    ecross->add_option("--trials", trials, "random realizations")->capture_default_str();
    ecross->add_option("--samples", samples, "Monte Carlo samples for the formula check")->capture_default_str();
    ecross->add_option("--seed", seed, "master seed")->capture_default_str();
    add_common(ecross);

    auto *oracle = app.add_subcommand("oracle", "state-vector oracle");
    oracle->require_subcommand(1);
    auto *ocross = oracle->add_subcommand("crosscheck", "channel correlators and light-cone locality against the oracle");
    int max_sites = 10, max_t = 3, o_trials = 50;
    ocross->add_option("--trials", o_trials, "random realizations")->capture_default_str();
    ocross->add_option("--max-sites", max_sites, "largest window")->capture_default_str();
    ocross->add_option("--max-t", max_t, "largest number of rows")->capture_default_str();
    ocross->add_option("--seed", seed, "master seed")->capture_default_str();
    add_common(ocross);

    try {
        std::vector<std::string> args = merge_config(raw_args);
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError &e) {
        std::stringstream se;
        app.exit(e, se, se);
        err << se.str();
        return e.get_exit_code() == 0 ? kOk : kInput;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return kInput;
    }

    std::ofstream file;
    std::ostream *os = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            err << "error: cannot write '" << out_path << "'\n";
            return kInput;
        }
        os = &file;
    }
    try {
        if (*gverify) {
            return cmd_gates_verify(gate_path, tol, *os, gverify);
        }
        if (*corr) {
            return cmd_correlate(co, *os, &err);
        }
        if (*eexact) {
            return cmd_entropy_exact(eo, *os);
        }
        if (*emc) {
            auto r = mc_average(ell, t, p, q, samples, seed);
            *os << kMcHeader;
            mc_row(*os, r);
            return kOk;
        }
        if (*ecurve) {
            int tm = t_max >= 0 ? t_max : ell;
            *os << kMcHeader;
            for (const auto &r : entropy_curve(ell, p, q, tm, samples, seed)) {
                mc_row(*os, r);
            }
            return kOk;
        }
        if (*ecross) {
            std::vector<Check> checks;
            auto ec = entanglement_crosscheck(cross_l, cross_t, trials, seed);
            checks.push_back({"oracle_vs_matching_n_I", static_cast<double>(ec.worst_n_I_dev),
                              ec.n_I_match == ec.trials,
                              std::to_string(ec.n_I_match) + "/" + std::to_string(ec.trials) + " exact"});
            checks.push_back({"flat_spectrum", ec.worst_flat_dev, ec.flat == ec.trials && ec.worst_flat_dev < 1e-9,
                              std::to_string(ec.flat) + "/" + std::to_string(ec.trials) + " flat"});
            checks.push_back({"outcome_uniformity", ec.worst_prob_dev, ec.worst_prob_dev < 1e-10, ""});
            checks.push_back({"layouts_valid", static_cast<double>(ec.invalid_layouts), ec.invalid_layouts == 0, ""});
            double worst_sum = 0;
            for (int k = 1; k <= 19; k++) {
                BigRational pr = rational(k, 20);
                BigRational d = *steady_entropy_sum(cross_l, pr).exact - *steady_entropy_2f1(cross_l, pr).exact;
                worst_sum = std::max(worst_sum, std::abs(d.get_d()));
            }
            checks.push_back({"narayana_sum_vs_hypergeometric", worst_sum, worst_sum == 0.0, "exact rationals"});
            if (2 * cross_t >= cross_l) {
                double worst_z = 0;
                for (double pr : {0.25, 0.5, 0.75}) {
                    auto mc = mc_average(cross_l, cross_t, pr, 2, samples, substream_seed(seed, 77));
                    double exact = steady_entropy_2f1(cross_l, pr).value_over_lnq;
                    worst_z = std::max(worst_z, std::abs(mc.mean_over_lnq - exact) / mc.stderr_over_lnq);
                }
                checks.push_back({"monte_carlo_vs_steady_state", worst_z, worst_z < 3.0,
                                  "deviation in standard errors"});
            } else if (cross_t == 1) {
                double worst_z = 0;
                for (double pr : {0.25, 0.5, 0.75}) {
                    auto mc = mc_average(cross_l, 1, pr, 2, samples, substream_seed(seed, 78));
                    double exact = short_time_entropy(cross_l, pr, 1).value_over_lnq;
                    worst_z = std::max(worst_z, std::abs(mc.mean_over_lnq - exact) / mc.stderr_over_lnq);
                }
                checks.push_back({"monte_carlo_vs_short_time", worst_z, worst_z < 3.0,
                                  "deviation in standard errors"});
            }
            finish_checks(checks, ecross, *os);
            return kOk;
        }
        if (*ocross) {
            std::vector<Check> checks;
            auto cc = correlator_crosscheck(o_trials, max_sites, max_t, seed);
            checks.push_back({"channel_vs_oracle_correlator", cc.worst_dev, cc.worst_dev < 1e-10,
                              std::to_string(cc.reflected) + " lines with reflections, " +
                                  std::to_string(cc.reflected_to_bottom) + " reaching the initial state"});
            checks.push_back({"off_cone_vanishing", cc.worst_off_cone, cc.worst_off_cone < 1e-12, ""});
            checks.push_back({"normalization_sigma_identity", cc.worst_norm_dev, cc.worst_norm_dev < 1e-12, ""});
            auto ec = entanglement_crosscheck(4, 2, o_trials, substream_seed(seed, 5));
            checks.push_back({"oracle_vs_matching_n_I", static_cast<double>(ec.worst_n_I_dev),
                              ec.n_I_match == ec.trials, ""});
            checks.push_back({"outcome_uniformity", ec.worst_prob_dev, ec.worst_prob_dev < 1e-10, ""});
            double worst_deph = 0;
            for (int k = 0; k < std::max(1, o_trials / 5); k++) {
                Rng rng(substream_seed(seed, 1000 + k));
                EntropyGeometry g(2, 2);
                LayoutSpec spec;
                spec.sites = g.sites();
                spec.n_rows = 2;
                spec.p = 0.5;
                spec.seed = rng();
                spec.gate_pool = random_du_pool(rng, 4);
                spec.mask = g.cone();
                auto c = assign_outcomes(sample_layout(spec), rng);
                worst_deph = std::max(worst_deph, dephaser_check(c, g.region_start(), 2, 2, rng()).max_deviation);
            }
            checks.push_back({"perfect_dephaser", worst_deph, worst_deph < 1e-10, ""});
            finish_checks(checks, ocross, *os);
            return kOk;
        }
    } catch (const CheckFailure &e) {
        err << "error: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const GeometryError &e) {
        err << "error: " << e.what() << "\n";
        return kGeometry;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return kInput;
    }
    return kInput;
}

inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace hdu::cli

#endif
