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

#ifndef HDU_GATES_HPP
#define HDU_GATES_HPP

#include <json.hpp>
#include <string>

#include "hdu/numerics.hpp"
#include "hdu/rng.hpp"

namespace hdu {

/// Two-site gate. Row index (a*q + b) is the output pair, column (c*q + d)
/// the input pair. Unitarity is checked on construction.
class TwoSiteGate {
   public:
    TwoSiteGate() = default;

    explicit TwoSiteGate(ComplexMatrix m, double tol = 1e-10) : matrix_(std::move(m)) {
        require_square(matrix_, "TwoSiteGate");
        q_ = exact_sqrt(matrix_.rows());
        if (q_ < 2) {
            throw InputError("TwoSiteGate: dimension must be q*q with q >= 2");
        }
        if (!all_finite(matrix_)) {
            throw InputError("TwoSiteGate: non-finite entries");
        }
        double dev = unitarity_deviation(matrix_);
        if (!(dev < tol)) {
            throw NotUnitaryError("TwoSiteGate: not unitary (deviation " + std::to_string(dev) + ")");
        }
    }

    int q() const {
        return q_;
    }
    const ComplexMatrix &matrix() const {
        return matrix_;
    }
    Complex operator()(int a, int b, int c, int d) const {
        return matrix_(a * q_ + b, c * q_ + d);
    }

   private:
    int q_ = 0;
    ComplexMatrix matrix_;
};

/// Spacetime-dual reshuffle: dual(U)_{ab,cd} = U_{db,ca}.
inline ComplexMatrix dual(const ComplexMatrix &u) {
    require_square(u, "dual");
    int q = exact_sqrt(u.rows());
    if (q < 1) {
        throw InputError("dual: dimension is not a perfect square");
    }
    ComplexMatrix out(u.rows(), u.cols());
    for (int a = 0; a < q; a++) {
        for (int b = 0; b < q; b++) {
            for (int c = 0; c < q; c++) {
                for (int d = 0; d < q; d++) {
                    out(a * q + b, c * q + d) = u(d * q + b, c * q + a);
                }
            }
        }
    }
    return out;
}

inline ComplexMatrix dual(const TwoSiteGate &g) {
    return dual(g.matrix());
}

inline double dual_unitarity_deviation(const ComplexMatrix &u) {
    return unitarity_deviation(dual(u));
}

/// Throws NotUnitaryError when `u` itself is not unitary.
inline bool is_dual_unitary(const ComplexMatrix &u, double tol = 1e-10) {
    require_square(u, "is_dual_unitary");
    if (exact_sqrt(u.rows()) < 2) {
        throw InputError("is_dual_unitary: dimension must be q*q with q >= 2");
    }
    if (!(unitarity_deviation(u) < tol)) {
        throw NotUnitaryError("is_dual_unitary: input gate is not unitary");
    }
    return dual_unitarity_deviation(u) < tol;
}

inline bool is_dual_unitary(const TwoSiteGate &g, double tol = 1e-10) {
    return is_dual_unitary(g.matrix(), tol);
}

inline ComplexMatrix swap_matrix(int q) {
    ComplexMatrix s = ComplexMatrix::Zero(q * q, q * q);
    for (int a = 0; a < q; a++) {
        for (int b = 0; b < q; b++) {
            s(b * q + a, a * q + b) = 1;
        }
    }
    return s;
}

inline TwoSiteGate swap_gate(int q) {
    return TwoSiteGate(swap_matrix(q));
}

inline TwoSiteGate cnot_gate() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return TwoSiteGate(m);
}

struct DressedSwap {
    ComplexMatrix u1;
    ComplexMatrix u2;

    int q() const {
        return static_cast<int>(u1.rows());
    }

    /// Entries (u1)_{bc} (u2)_{ad}, i.e. SWAP (u1 x u2).
    ComplexMatrix matrix() const {
        int n = q();
        ComplexMatrix m(n * n, n * n);
        for (int a = 0; a < n; a++) {
            for (int b = 0; b < n; b++) {
                for (int c = 0; c < n; c++) {
                    for (int d = 0; d < n; d++) {
                        m(a * n + b, c * n + d) = u1(b, c) * u2(a, d);
                    }
                }
            }
        }
        return m;
    }
};

inline TwoSiteGate dressed_swap(const ComplexMatrix &u1, const ComplexMatrix &u2) {
    if (u1.rows() != u2.rows() || u1.rows() < 2) {
        throw InputError("dressed_swap: factors must be q x q with equal q >= 2");
    }
    if (!is_unitary(u1) || !is_unitary(u2)) {
        throw NotUnitaryError("dressed_swap: one-site factor is not unitary");
    }
    return TwoSiteGate(DressedSwap{u1, u2}.matrix());
}

/// exp(-i H) for Hermitian H.
inline ComplexMatrix expm_hermitian(const ComplexMatrix &h) {
    auto eig = hermitian_eigen(h);
    ComplexMatrix d = ComplexMatrix::Zero(h.rows(), h.cols());
    for (size_t k = 0; k < eig.values.size(); k++) {
        d(k, k) = std::polar(1.0, -eig.values[k]);
    }
    return eig.vectors * d * eig.vectors.adjoint();
}

/// (u+ x u-) exp[-i(pi/4 XX + pi/4 YY + J ZZ)] (v+ x v-).
inline TwoSiteGate du_gate_q2(double J, const ComplexMatrix &u_plus, const ComplexMatrix &u_minus,
                              const ComplexMatrix &v_plus, const ComplexMatrix &v_minus) {
    for (const auto *u : {&u_plus, &u_minus, &v_plus, &v_minus}) {
        if (u->rows() != 2 || u->cols() != 2 || !is_unitary(*u)) {
            throw InputError("du_gate_q2: one-site factors must be 2x2 unitaries");
        }
    }
    ComplexMatrix h = (M_PI / 4) * kron(pauli('X'), pauli('X')) + (M_PI / 4) * kron(pauli('Y'), pauli('Y')) +
                      J * kron(pauli('Z'), pauli('Z'));
    ComplexMatrix core = expm_hermitian(h);
    return TwoSiteGate(kron(u_plus, u_minus) * core * kron(v_plus, v_minus));
}

/// Haar unitary: QR of a complex Ginibre matrix with phase-fixed R diagonal.
inline ComplexMatrix random_one_site_unitary(int q, Rng &rng) {
    if (q < 1) {
        throw InputError("random_one_site_unitary: q must be positive");
    }
    ComplexMatrix z(q, q);
    for (int i = 0; i < q; i++) {
        for (int j = 0; j < q; j++) {
            double re = rng.normal();
            double im = rng.normal();
            z(i, j) = Complex(re, im) * M_SQRT1_2;
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix Q = qr.householderQ();
    ComplexMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < q; j++) {
        Complex d = R(j, j);
        double ad = std::abs(d);
        Complex ph = ad > 0 ? d / ad : Complex(1.0);
        Q.col(j) *= ph;
    }
    return Q;
}

inline ComplexMatrix random_one_site_unitary(int q, uint64_t seed) {
    Rng rng(seed);
    return random_one_site_unitary(q, rng);
}

inline TwoSiteGate random_du_gate_q2(Rng &rng) {
    double J = M_PI * rng.uniform01();
    ComplexMatrix a = random_one_site_unitary(2, rng);
    ComplexMatrix b = random_one_site_unitary(2, rng);
    ComplexMatrix c = random_one_site_unitary(2, rng);
    ComplexMatrix d = random_one_site_unitary(2, rng);
    return du_gate_q2(J, a, b, c, d);
}

inline TwoSiteGate random_dressed_swap(int q, Rng &rng) {
    ComplexMatrix u1 = random_one_site_unitary(q, rng);
    ComplexMatrix u2 = random_one_site_unitary(q, rng);
    return dressed_swap(u1, u2);
}

// ---- JSON: {"q": q, "entries": [[re, im], ...]} row-major ----

inline nlohmann::json matrix_to_json(const ComplexMatrix &m, int q) {
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            entries.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return {{"q", q}, {"entries", entries}};
}

/// Accepts q*q entries (one-site matrix) or q^4 entries (two-site gate).
inline ComplexMatrix matrix_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("q") || !j.contains("entries")) {
        throw InputError("matrix JSON must be an object with fields q and entries");
    }
    if (!j["q"].is_number_integer() || !j["entries"].is_array()) {
        throw InputError("matrix JSON: q must be an integer and entries an array");
    }
    int q = j["q"].get<int>();
    if (q < 2 || q > 8) {
        throw InputError("matrix JSON: q out of range [2, 8]");
    }
    const auto &e = j["entries"];
    long long n = static_cast<long long>(e.size());
    int dim;
    if (n == ipow(q, 2)) {
        dim = q;
    } else if (n == ipow(q, 4)) {
        dim = q * q;
    } else {
        throw InputError("matrix JSON: entry count " + std::to_string(n) + " fits neither q^2 nor q^4");
    }
    ComplexMatrix m(dim, dim);
    for (long long k = 0; k < n; k++) {
        const auto &z = e[k];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
            throw InputError("matrix JSON: entry " + std::to_string(k) + " is not [re, im]");
        }
        m(k / dim, k % dim) = Complex(z[0].get<double>(), z[1].get<double>());
    }
    return m;
}

inline nlohmann::json gate_to_json(const TwoSiteGate &g) {
    return matrix_to_json(g.matrix(), g.q());
}

inline TwoSiteGate gate_from_json(const nlohmann::json &j) {
    ComplexMatrix m = matrix_from_json(j);
    if (m.rows() != j["q"].get<int>() * j["q"].get<int>()) {
        throw InputError("gate JSON: expected q^4 entries");
    }
    return TwoSiteGate(m);
}

}  // namespace hdu

#endif
