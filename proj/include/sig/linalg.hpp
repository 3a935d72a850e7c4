#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sig {

struct Mat3 {
    // Row-major 3x3.
    std::array<double, 9> m{};

    static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

    double at(int r, int c) const { return m[static_cast<size_t>(r) * 3 + c]; }
    double& at(int r, int c) { return m[static_cast<size_t>(r) * 3 + c]; }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 out;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out.at(r, c) = a.at(r, 0) * b.at(0, c) + a.at(r, 1) * b.at(1, c) + a.at(r, 2) * b.at(2, c);
        return out;
    }

    double determinant() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    Mat3 inverse() const {
        const double det = determinant();
        Mat3 inv;
        inv.m = {
            m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
            m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
            m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3],
        };
        for (double& v : inv.m) v /= det;
        return inv;
    }

    std::array<double, 3> apply(double x, double y, double w = 1.0) const {
        return {m[0] * x + m[1] * y + m[2] * w,
                m[3] * x + m[4] * y + m[5] * w,
                m[6] * x + m[7] * y + m[8] * w};
    }
};

namespace detail {

/// Eigen-decomposition of a symmetric n x n matrix via cyclic Jacobi
/// rotations. Small n only; the DLT uses n = 9. Returns eigenvalues and
/// the matching eigenvectors as columns of V.
struct SymmetricEigen {
    std::vector<double> values;   // unsorted
    std::vector<double> vectors;  // column-major: vectors[i*n + k] = component i of eigenvector k
};

inline SymmetricEigen jacobi_eigen(std::vector<double> a, int n) {
    SymmetricEigen out;
    out.vectors.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) out.vectors[static_cast<size_t>(i) * n + i] = 1.0;

    auto A = [&](int r, int c) -> double& { return a[static_cast<size_t>(r) * n + c]; };
    auto V = [&](int r, int c) -> double& { return out.vectors[static_cast<size_t>(r) * n + c]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-300) break;

        double diag = 0.0;
        for (int p = 0; p < n; ++p) diag += A(p, p) * A(p, p);
        if (off <= 1e-30 * (diag + off)) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = a[static_cast<size_t>(i) * n + i];
    return out;
}

}  // namespace detail

}  // namespace sig
