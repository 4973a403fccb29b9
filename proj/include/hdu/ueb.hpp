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

#ifndef HDU_UEB_HPP
#define HDU_UEB_HPP

#include <vector>

#include "hdu/gates.hpp"

namespace hdu {

/// q*q unitaries with tr(a_n^dag a_m) = q delta_nm. Also the outcome alphabet
/// of two-site measurements.
struct UnitaryErrorBasis {
    int q = 0;
    std::vector<ComplexMatrix> alphas;

    int size() const {
        return static_cast<int>(alphas.size());
    }
};

/// alpha_{a q + b} = X^a Z^b.
inline UnitaryErrorBasis weyl_heisenberg_ueb(int q) {
    if (q < 2) {
        throw InputError("weyl_heisenberg_ueb: q must be >= 2");
    }
    UnitaryErrorBasis u;
    u.q = q;
    ComplexMatrix X = shift_matrix(q);
    ComplexMatrix Z = clock_matrix(q);
    ComplexMatrix xa = identity(q);
    for (int a = 0; a < q; a++) {
        ComplexMatrix zb = identity(q);
        for (int b = 0; b < q; b++) {
            u.alphas.push_back(xa * zb);
            zb = zb * Z;
        }
        xa = xa * X;
    }
    return u;
}

/// Components (alpha_n)_{ij} at position i*q + j; squared norm q.
inline ComplexVector ueb_state(const UnitaryErrorBasis &basis, int n) {
    if (n < 0 || n >= basis.size()) {
        throw InputError("ueb_state: outcome index out of range");
    }
    return vec(basis.alphas[n]);
}

struct UebReport {
    bool ok = false;
    double unitarity_deviation = 0;
    double orthogonality_deviation = 0;
};

inline UebReport verify_ueb(const UnitaryErrorBasis &basis, double tol = 1e-10) {
    int q = basis.q;
    if (q < 2 || basis.size() != q * q) {
        throw InputError("verify_ueb: expected q^2 = " + std::to_string(q * q) + " matrices, got " +
                         std::to_string(basis.size()));
    }
    UebReport r;
    for (const auto &a : basis.alphas) {
        if (a.rows() != q || a.cols() != q) {
            throw InputError("verify_ueb: every matrix must be q x q");
        }
        r.unitarity_deviation = std::max(r.unitarity_deviation, unitarity_deviation(a));
    }
    for (int n = 0; n < basis.size(); n++) {
        for (int m = 0; m < basis.size(); m++) {
            Complex tr = (basis.alphas[n].adjoint() * basis.alphas[m]).trace();
            double expect = n == m ? q : 0.0;
            r.orthogonality_deviation = std::max(r.orthogonality_deviation, std::abs(tr - expect));
        }
    }
    r.ok = r.unitarity_deviation < tol && r.orthogonality_deviation < tol;
    return r;
}

/// Measurement projector |alpha_n><alpha_n| / q on the two-site space.
inline ComplexMatrix ueb_projector(const UnitaryErrorBasis &basis, int n) {
    ComplexVector v = ueb_state(basis, n);
    return v * v.adjoint() / static_cast<double>(basis.q);
}

/// Max deviation of sum_n |alpha_n><alpha_n| / q from the identity.
inline double completeness_check(const UnitaryErrorBasis &basis) {
    int q = basis.q;
    ComplexMatrix s = ComplexMatrix::Zero(q * q, q * q);
    for (int n = 0; n < basis.size(); n++) {
        s += ueb_projector(basis, n);
    }
    return max_abs(s - identity(q * q));
}

inline nlohmann::json ueb_to_json(const UnitaryErrorBasis &basis) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto &a : basis.alphas) {
        j.push_back(matrix_to_json(a, basis.q));
    }
    return j;
}

/// Loads and verifies; an invalid basis is rejected.
inline UnitaryErrorBasis ueb_from_json(const nlohmann::json &j) {
    if (!j.is_array() || j.empty()) {
        throw InputError("UEB JSON must be a nonempty array of matrices");
    }
    UnitaryErrorBasis u;
    u.q = j[0].value("q", 0);
    for (const auto &m : j) {
        ComplexMatrix a = matrix_from_json(m);
        if (a.rows() != u.q) {
            throw InputError("UEB JSON: matrices must be q x q");
        }
        u.alphas.push_back(a);
    }
    if (!verify_ueb(u).ok) {
        throw InputError("UEB JSON: basis fails unitarity or trace orthogonality");
    }
    return u;
}

}  // namespace hdu

#endif
