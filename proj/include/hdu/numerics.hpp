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

#ifndef HDU_NUMERICS_HPP
#define HDU_NUMERICS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "hdu/errors.hpp"

namespace hdu {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

enum class Factor { First, Second };

inline ComplexMatrix identity(int n) {
    return ComplexMatrix::Identity(n, n);
}

/// Returns r with r*r == n, or -1 when n is not a perfect square.
inline int exact_sqrt(long long n) {
    if (n < 0) {
        return -1;
    }
    auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(n))));
    while (r * r > n) {
        --r;
    }
    while ((r + 1) * (r + 1) <= n) {
        ++r;
    }
    return r * r == n ? static_cast<int>(r) : -1;
}

inline long long ipow(long long base, int exp) {
    long long r = 1;
    for (int k = 0; k < exp; k++) {
        r *= base;
    }
    return r;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline void require_square(const ComplexMatrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InputError(std::string(what) + ": matrix must be square and nonempty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

/// Partial trace of a two-site operator; `traced` names the factor that is removed.
inline ComplexMatrix partial_trace(const ComplexMatrix &m, Factor traced) {
    require_square(m, "partial_trace");
    int q = exact_sqrt(m.rows());
    if (q < 0) {
        throw InputError("partial_trace: dimension " + std::to_string(m.rows()) + " is not a perfect square");
    }
    ComplexMatrix out = ComplexMatrix::Zero(q, q);
    for (int x = 0; x < q; x++) {
        for (int y = 0; y < q; y++) {
            Complex s = 0;
            for (int k = 0; k < q; k++) {
                if (traced == Factor::First) {
                    s += m(k * q + x, k * q + y);
                } else {
                    s += m(x * q + k, y * q + k);
                }
            }
            out(x, y) = s;
        }
    }
    return out;
}

inline std::vector<Complex> eigenvalues(const ComplexMatrix &m) {
    require_square(m, "eigenvalues");
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw InputError("eigenvalues: solver did not converge");
    }
    const auto &ev = solver.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns
};

inline HermitianEigen hermitian_eigen(const ComplexMatrix &m) {
    require_square(m, "hermitian_eigen");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw InputError("hermitian_eigen: solver did not converge");
    }
    HermitianEigen out;
    const auto &ev = solver.eigenvalues();
    out.values.assign(ev.data(), ev.data() + ev.size());
    out.vectors = solver.eigenvectors();
    return out;
}

inline double max_abs(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_deviation(const ComplexMatrix &u) {
    require_square(u, "unitarity_deviation");
    auto n = u.rows();
    double a = max_abs(u * u.adjoint() - ComplexMatrix::Identity(n, n));
    double b = max_abs(u.adjoint() * u - ComplexMatrix::Identity(n, n));
    return std::max(a, b);
}

inline bool is_unitary(const ComplexMatrix &u, double tol = 1e-10) {
    return u.rows() == u.cols() && unitarity_deviation(u) < tol;
}

inline bool all_finite(const ComplexMatrix &m) {
    for (Eigen::Index k = 0; k < m.size(); k++) {
        if (!std::isfinite(m.data()[k].real()) || !std::isfinite(m.data()[k].imag())) {
            return false;
        }
    }
    return true;
}

/// Row-major vectorization: vec(X)[i*q + j] = X(i, j).
inline ComplexVector vec(const ComplexMatrix &x) {
    ComplexVector v(x.size());
    for (Eigen::Index i = 0; i < x.rows(); i++) {
        for (Eigen::Index j = 0; j < x.cols(); j++) {
            v(i * x.cols() + j) = x(i, j);
        }
    }
    return v;
}

inline ComplexMatrix unvec(const ComplexVector &v, int q) {
    ComplexMatrix x(q, q);
    for (int i = 0; i < q; i++) {
        for (int j = 0; j < q; j++) {
            x(i, j) = v(i * q + j);
        }
    }
    return x;
}

/// Pauli and clock/shift helpers used throughout.
inline ComplexMatrix pauli(char which) {
    ComplexMatrix m(2, 2);
    switch (which) {
        case 'I':
            m << 1, 0, 0, 1;
            break;
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, Complex(0, -1), Complex(0, 1), 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
        default:
            throw InputError(std::string("unknown Pauli ") + which);
    }
    return m;
}

inline ComplexMatrix shift_matrix(int q) {
    ComplexMatrix x = ComplexMatrix::Zero(q, q);
    for (int j = 0; j < q; j++) {
        x((j + 1) % q, j) = 1;
    }
    return x;
}

inline ComplexMatrix clock_matrix(int q) {
    ComplexMatrix z = ComplexMatrix::Zero(q, q);
    for (int j = 0; j < q; j++) {
        z(j, j) = std::polar(1.0, 2.0 * M_PI * j / q);
    }
    return z;
}

}  // namespace hdu

#endif
