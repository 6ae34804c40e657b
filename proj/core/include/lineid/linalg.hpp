#pragma once

// Fixed-size 2-vector / 2x2-matrix arithmetic used in the estimator hot loop.
// Everything here is closed form; no allocation, no iteration.

#include <array>
#include <cmath>

namespace lineid {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x : y; }
    constexpr double& operator[](int i) { return i == 0 ? x : y; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 0.0, b = 0.0;
    double c = 0.0, d = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }
    static constexpr Mat2 scaled_identity(double s) { return {s, 0.0, 0.0, s}; }
    /// Matrix whose columns are `c0` and `c1`.
    static constexpr Mat2 from_columns(Vec2 c0, Vec2 c1) { return {c0.x, c1.x, c0.y, c1.y}; }

    constexpr Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
    constexpr Vec2 row(int i) const { return i == 0 ? Vec2{a, b} : Vec2{c, d}; }

    constexpr double trace() const { return a + d; }
    constexpr double det() const { return a * d - b * c; }
    constexpr Mat2 transposed() const { return {a, c, b, d}; }
    /// Frobenius norm.
    double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    friend constexpr Mat2 operator+(const Mat2& m, const Mat2& n) {
        return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
    }
    friend constexpr Mat2 operator-(const Mat2& m, const Mat2& n) {
        return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
    }
    friend constexpr Mat2 operator*(double s, const Mat2& m) {
        return {s * m.a, s * m.b, s * m.c, s * m.d};
    }
    friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
        return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

constexpr Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }

/// Closed-form inverse. Caller is responsible for the determinant guard.
constexpr Mat2 inverse(const Mat2& m) {
    const double inv_det = 1.0 / m.det();
    return {m.d * inv_det, -m.b * inv_det, -m.c * inv_det, m.a * inv_det};
}

constexpr Mat2 symmetrized(const Mat2& m) {
    const double off = 0.5 * (m.b + m.c);
    return {m.a, off, off, m.d};
}

/// Eigendecomposition of a symmetric 2x2 matrix, R = sum_i values[i] * v_i v_i^T,
/// with values sorted descending and vectors orthonormal.
struct SymEigen2 {
    std::array<double, 2> values{};
    std::array<Vec2, 2> vectors{};

    Mat2 reconstruct() const {
        return values[0] * outer(vectors[0], vectors[0]) + values[1] * outer(vectors[1], vectors[1]);
    }
};

/// Jacobi-rotation form: one rotation diagonalizes any symmetric 2x2 exactly.
inline SymEigen2 sym_eigen(const Mat2& m) {
    const double off = 0.5 * (m.b + m.c);
    const double phi = 0.5 * std::atan2(2.0 * off, m.a - m.d);
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    const double l0 = m.a * cs * cs + 2.0 * off * sn * cs + m.d * sn * sn;
    const double l1 = m.a * sn * sn - 2.0 * off * sn * cs + m.d * cs * cs;
    SymEigen2 e;
    const Vec2 v0{cs, sn};
    const Vec2 v1{-sn, cs};
    if (l0 >= l1) {
        e.values = {l0, l1};
        e.vectors = {v0, v1};
    } else {
        e.values = {l1, l0};
        e.vectors = {v1, v0};
    }
    return e;
}

/// Singular values of a symmetric PSD matrix are its eigenvalues: {min, max}.
inline std::array<double, 2> sym_singular_range(const Mat2& m) {
    const SymEigen2 e = sym_eigen(m);
    return {std::abs(e.values[1]) < std::abs(e.values[0]) ? std::abs(e.values[1]) : std::abs(e.values[0]),
            std::abs(e.values[1]) < std::abs(e.values[0]) ? std::abs(e.values[0]) : std::abs(e.values[1])};
}

}  // namespace lineid
