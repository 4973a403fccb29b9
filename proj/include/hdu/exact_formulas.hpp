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

#ifndef HDU_EXACT_FORMULAS_HPP
#define HDU_EXACT_FORMULAS_HPP

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hdu/errors.hpp"

namespace hdu {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Always "num/den", also for integers.
inline std::string to_string(const BigRational &x) {
    BigRational y(x);
    y.canonicalize();
    return y.get_num().get_str() + "/" + y.get_den().get_str();
}

inline BigRational rational(long num, long den = 1) {
    BigRational r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "a/b", integers and plain decimals ("0.05" -> 1/20) exactly.
inline BigRational parse_rational(const std::string &text) {
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            s += ch;
        }
    }
    if (s.empty()) {
        throw InputError("empty number");
    }
    auto all_digits = [](const std::string &x, size_t from) {
        if (from >= x.size()) {
            return false;
        }
        for (size_t i = from; i < x.size(); i++) {
            if (!std::isdigit(static_cast<unsigned char>(x[i]))) {
                return false;
            }
        }
        return true;
    };
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        size_t sa = (!a.empty() && a[0] == '-') ? 1 : 0;
        if (!all_digits(a, sa) || !all_digits(b, 0)) {
            throw InputError("cannot parse rational '" + text + "'");
        }
        BigInt den(b);
        if (den == 0) {
            throw InputError("zero denominator in '" + text + "'");
        }
        BigRational r{BigInt(a), den};
        r.canonicalize();
        return r;
    }
    bool neg = s[0] == '-';
    size_t from = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    std::string body = s.substr(from);
    auto dot = body.find('.');
    std::string ip = dot == std::string::npos ? body : body.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : body.substr(dot + 1);
    if (ip.empty() && fp.empty()) {
        throw InputError("cannot parse number '" + text + "'");
    }
    if ((!ip.empty() && !all_digits(ip, 0)) || (!fp.empty() && !all_digits(fp, 0))) {
        throw InputError("cannot parse number '" + text + "'");
    }
    BigInt num(ip.empty() ? "0" : ip);
    BigInt den = 1;
    for (char ch : fp) {
        num = num * 10 + (ch - '0');
        den *= 10;
    }
    BigRational r{neg ? BigInt(-num) : num, den};
    r.canonicalize();
    return r;
}

inline BigInt binomial(unsigned long n, unsigned long k) {
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline BigRational narayana(int n, int k) {
    if (n < 1 || k < 1 || k > n) {
        throw DomainError("narayana: need 1 <= k <= n");
    }
    BigInt v = binomial(n, k) * binomial(n, k - 1);
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(n));
    return BigRational(v);
}

inline BigRational catalan(int n) {
    if (n < 0) {
        throw DomainError("catalan: n must be >= 0");
    }
    BigInt v = binomial(2 * n, n);
    mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(n + 1));
    return BigRational(v);
}

enum class FormulaMethod { NarayanaSum, Hypergeometric, SymmetricPoint, Asymptotic, ShortTime };

inline const char *method_name(FormulaMethod m) {
    switch (m) {
        case FormulaMethod::NarayanaSum:
            return "narayana_sum";
        case FormulaMethod::Hypergeometric:
            return "hypergeometric";
        case FormulaMethod::SymmetricPoint:
            return "symmetric_point";
        case FormulaMethod::Asymptotic:
            return "asymptotic";
        case FormulaMethod::ShortTime:
            return "short_time";
    }
    return "?";
}

/// Averaged entropy in units of ln q.
struct EntropyFormulaResult {
    int ell = 0;
    double p = 0;
    std::optional<BigRational> p_exact;
    std::optional<BigRational> exact;  // present for rational evaluations
    double value_over_lnq = 0;
    FormulaMethod method = FormulaMethod::NarayanaSum;
    bool approximate = false;
};

namespace detail {

inline void check_ell(int ell) {
    if (ell < 2 || ell % 2 != 0) {
        throw DomainError("subsystem size must be even and >= 2, got " + std::to_string(ell));
    }
}

inline void check_p(const BigRational &p) {
    if (p < 0 || p > 1) {
        throw DomainError("p must lie in [0, 1]");
    }
}

inline void check_p(double p) {
    if (!(p >= 0 && p <= 1)) {
        throw DomainError("p must lie in [0, 1]");
    }
}

inline EntropyFormulaResult make_exact(int ell, const BigRational &p, BigRational v, FormulaMethod m) {
    v.canonicalize();
    EntropyFormulaResult r;
    r.ell = ell;
    r.p = p.get_d();
    r.p_exact = p;
    r.value_over_lnq = v.get_d();
    r.exact = std::move(v);
    r.method = m;
    return r;
}

inline EntropyFormulaResult make_double(int ell, double p, double v, FormulaMethod m) {
    EntropyFormulaResult r;
    r.ell = ell;
    r.p = p;
    r.value_over_lnq = v;
    r.method = m;
    return r;
}

}  // namespace detail

/// (1-p) l - (2/p) sum_{n<m} (m-n) sum_k N(n,k) p^{2k} (1-p)^{2(n-k+1)}, m = l/2.
/// With p = a/b every term shares the denominator b^{2m}, so the inner work
/// is integer arithmetic only.
inline EntropyFormulaResult steady_entropy_sum(int ell, const BigRational &p_in) {
    detail::check_ell(ell);
    BigRational p(p_in);
    p.canonicalize();
    detail::check_p(p);
    if (p == 0) {
        return detail::make_exact(ell, p, BigRational(ell), FormulaMethod::NarayanaSum);
    }
    const int m = ell / 2;
    const BigInt a = p.get_num();
    const BigInt b = p.get_den();
    const BigInt r = b - a;
    std::vector<BigInt> a2(m + 1), r2(m + 1), b2(m + 1);
    a2[0] = r2[0] = b2[0] = 1;
    BigInt aa = a * a, rr = r * r, bb = b * b;
    for (int k = 1; k <= m; k++) {
        a2[k] = a2[k - 1] * aa;
        r2[k] = r2[k - 1] * rr;
        b2[k] = b2[k - 1] * bb;
    }
    BigInt x = 0;
    BigInt nar, bn, tmp;
    for (int n = 1; n <= m - 1; n++) {
        bn = 0;
        nar = 1;  // N(n, 1)
        for (int k = 1; k <= n; k++) {
            tmp = nar * a2[k];
            tmp *= r2[n - k + 1];
            bn += tmp;
            if (k < n) {
                nar *= (n - k) * (n - k + 1);
                mpz_divexact_ui(nar.get_mpz_t(), nar.get_mpz_t(), static_cast<unsigned long>(k) * (k + 1));
            }
        }
        x += bn * (m - n) * b2[m - 1 - n];
    }
    // value = r l / b - 2 x / (a b^{2m-1})
    BigRational first(r * ell, b);
    BigRational second(2 * x, a * b2[m - 1] * b);
    return detail::make_exact(ell, p, first - second, FormulaMethod::NarayanaSum);
}

/// Double-precision Narayana sum with log-space terms.
inline EntropyFormulaResult steady_entropy_sum(int ell, double p) {
    detail::check_ell(ell);
    detail::check_p(p);
    if (p == 0) {
        return detail::make_double(ell, p, ell, FormulaMethod::NarayanaSum);
    }
    if (p == 1) {
        return detail::make_double(ell, p, 0.0, FormulaMethod::NarayanaSum);
    }
    const int m = ell / 2;
    double lp = std::log(p), lq = std::log1p(-p);
    double x = 0;
    for (int n = 1; n <= m - 1; n++) {
        double bn = 0;
        for (int k = 1; k <= n; k++) {
            double ln_nar = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                            std::lgamma(n + 1.0) - std::lgamma(k + 0.0) - std::lgamma(n - k + 2.0) - std::log(n);
            bn += std::exp(ln_nar + 2 * k * lp + 2 * (n - k + 1) * lq);
        }
        x += (m - n) * bn;
    }
    return detail::make_double(ell, p, (1 - p) * ell - 2 * x / p, FormulaMethod::NarayanaSum);
}

/// Terminating series of 2F1(-m, -1/2; 1; z), exact.
inline BigRational hypergeometric_exact(int m, const BigRational &z) {
    BigRational term(1), sum(1);
    for (int k = 0; k < m; k++) {
        // ratio (k - m)(k - 1/2) z / (k + 1)^2
        term *= BigRational((k - m) * (2 * k - 1), 2L * (k + 1) * (k + 1));
        term *= z;
        sum += term;
    }
    sum.canonicalize();
    return sum;
}

/// 2F1(-m, -1/2; 1; z) in double via the contiguous relation in the first
/// parameter. The direct series alternates with terms ~binom(m,k) and loses
/// all digits near z = 1; the recurrence is stable there.
inline double hypergeometric_double(int m, double z) {
    const double b = -0.5, c = 1.0;
    double f_prev = 1.0;           // F(0)
    double f = 1.0 + 0.5 * z;      // F(-1)
    if (m == 0) {
        return f_prev;
    }
    for (int k = 1; k < m; k++) {
        double a = -k;
        // (c-a) F(a-1) + (2a - c + (b-a) z) F(a) + a (z-1) F(a+1) = 0
        double f_next = -((2 * a - c + (b - a) * z) * f + a * (z - 1) * f_prev) / (c - a);
        f_prev = f;
        f = f_next;
    }
    return f;
}

/// (1/p) [2F1(-l/2, -1/2; 1; 4p(1-p)) - 1].
inline EntropyFormulaResult steady_entropy_2f1(int ell, const BigRational &p_in) {
    detail::check_ell(ell);
    BigRational p(p_in);
    p.canonicalize();
    detail::check_p(p);
    if (p == 0) {
        return detail::make_exact(ell, p, BigRational(ell), FormulaMethod::Hypergeometric);
    }
    BigRational z = 4 * p * (1 - p);
    BigRational v = (hypergeometric_exact(ell / 2, z) - 1) / p;
    return detail::make_exact(ell, p, v, FormulaMethod::Hypergeometric);
}

inline EntropyFormulaResult steady_entropy_2f1(int ell, double p) {
    detail::check_ell(ell);
    detail::check_p(p);
    if (p == 0) {
        return detail::make_double(ell, p, ell, FormulaMethod::Hypergeometric);
    }
    double z = 4 * p * (1 - p);
    return detail::make_double(ell, p, (hypergeometric_double(ell / 2, z) - 1) / p, FormulaMethod::Hypergeometric);
}

/// p = 1/2: 2[(l+1) binom(l, l/2) / 2^l - 1].
inline EntropyFormulaResult steady_entropy_symmetric(int ell) {
    detail::check_ell(ell);
    BigInt pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 2, static_cast<unsigned long>(ell));
    BigRational v = 2 * (BigRational(binomial(ell, ell / 2) * (ell + 1), pw) - 1);
    return detail::make_exact(ell, rational(1, 2), v, FormulaMethod::SymmetricPoint);
}

/// (1/p) [sqrt(8 p (1-p) l / pi) - 1], in units of ln q.
inline double asymptotic_entropy(int ell, double p) {
    if (!(p > 0 && p < 1)) {
        throw DomainError("asymptotic_entropy: p must lie strictly between 0 and 1");
    }
    if (ell < 1) {
        throw DomainError("asymptotic_entropy: l must be positive");
    }
    return (std::sqrt(8 * p * (1 - p) * ell / M_PI) - 1) / p;
}

/// t = 1: (1 - p^{l/2}) 2, exact. 1 < t < l/2: leading order 2t, flagged approximate.
inline EntropyFormulaResult short_time_entropy(int ell, double p, int t) {
    detail::check_ell(ell);
    detail::check_p(p);
    if (t < 1) {
        throw DomainError("short_time_entropy: t must be >= 1");
    }
    if (2 * t >= ell) {
        throw DomainError("short_time_entropy: t >= l/2 is the steady state; use the steady-state formulas");
    }
    EntropyFormulaResult r;
    r.ell = ell;
    r.p = p;
    r.method = FormulaMethod::ShortTime;
    if (t == 1) {
        r.value_over_lnq = 2 * (1 - std::pow(p, ell / 2));
    } else {
        r.value_over_lnq = 2.0 * t;
        r.approximate = true;
    }
    return r;
}

inline BigRational short_time_entropy_t1(int ell, const BigRational &p) {
    detail::check_ell(ell);
    detail::check_p(p);
    BigRational pw(1);
    for (int k = 0; k < ell / 2; k++) {
        pw *= p;
    }
    BigRational v = 2 * (1 - pw);
    v.canonicalize();
    return v;
}

/// |p S(p) - (1-p) S(1-p)|, exact.
inline BigRational symmetry_check(int ell, const BigRational &p) {
    if (p <= 0 || p >= 1) {
        throw DomainError("symmetry_check: p must lie strictly between 0 and 1");
    }
    BigRational lhs = p * *steady_entropy_2f1(ell, p).exact;
    BigRational rhs = (1 - p) * *steady_entropy_2f1(ell, BigRational(1 - p)).exact;
    BigRational d = abs(BigRational(lhs - rhs));
    d.canonicalize();
    return d;
}

inline double symmetry_check(int ell, double p) {
    if (!(p > 0 && p < 1)) {
        throw DomainError("symmetry_check: p must lie strictly between 0 and 1");
    }
    return std::abs(p * steady_entropy_2f1(ell, p).value_over_lnq -
                    (1 - p) * steady_entropy_2f1(ell, 1 - p).value_over_lnq);
}

struct CatalanSums {
    BigRational sum;                // sum_{n=1}^{m-1} 4^{-n} C_n
    BigRational weighted_sum;       // sum_{n=1}^{m-1} n 4^{-n} C_n
    BigRational sum_closed;         // 1 - 2^{1-2m} binom(2m, m)
    BigRational weighted_closed;    // -2 + (m+1) 2^{1-2m} binom(2m, m)
};

inline CatalanSums catalan_partial_sums(int m) {
    if (m < 2) {
        throw DomainError("catalan_partial_sums: m must be >= 2");
    }
    CatalanSums s;
    s.sum = 0;
    s.weighted_sum = 0;
    BigInt four_n = 1;
    for (int n = 1; n <= m - 1; n++) {
        four_n *= 4;
        BigRational term = catalan(n) / BigRational(four_n);
        s.sum += term;
        s.weighted_sum += term * n;
    }
    BigInt pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 2, static_cast<unsigned long>(2 * m - 1));
    BigRational core(binomial(2 * m, m), pw);
    s.sum_closed = 1 - core;
    s.weighted_closed = -2 + (m + 1) * core;
    for (auto *x : {&s.sum, &s.weighted_sum, &s.sum_closed, &s.weighted_closed}) {
        x->canonicalize();
    }
    return s;
}

}  // namespace hdu

#endif
