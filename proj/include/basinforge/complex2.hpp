#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace basinforge {

using cplx = std::complex<double>;

struct Vec2 {
    cplx z{0.0, 0.0};
    cplx w{0.0, 0.0};

    double norm() const { return std::sqrt(std::norm(z) + std::norm(w)); }
    double norm_sq() const { return std::norm(z) + std::norm(w); }
    bool finite() const {
        return std::isfinite(z.real()) && std::isfinite(z.imag()) &&
               std::isfinite(w.real()) && std::isfinite(w.imag());
    }
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.z + b.z, a.w + b.w}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.z - b.z, a.w - b.w}; }
inline Vec2 operator*(const cplx& s, const Vec2& a) { return {s * a.z, s * a.w}; }

// 2x2 complex matrix acting on (z, w) column vectors.
struct Mat2 {
    cplx a11{1.0, 0.0}, a12{0.0, 0.0};
    cplx a21{0.0, 0.0}, a22{1.0, 0.0};

    static Mat2 identity() { return Mat2{}; }
    static Mat2 diagonal(cplx a, cplx b) { return Mat2{a, {0, 0}, {0, 0}, b}; }

    Vec2 apply(const Vec2& v) const { return {a11 * v.z + a12 * v.w, a21 * v.z + a22 * v.w}; }
    cplx det() const { return a11 * a22 - a12 * a21; }
    cplx trace() const { return a11 + a22; }

    Mat2 mul(const Mat2& o) const {
        return Mat2{a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                    a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }

    Mat2 adjoint() const {
        return Mat2{std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)};
    }

    Mat2 inverse() const {
        cplx d = det();
        if (std::abs(d) < 1e-300) throw std::domain_error("Mat2::inverse: singular matrix");
        return Mat2{a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }

    // Frobenius distance of M*M to the identity.
    double unitarity_defect() const {
        Mat2 g = adjoint().mul(*this);
        double d = 0.0;
        d += std::norm(g.a11 - cplx(1, 0));
        d += std::norm(g.a12);
        d += std::norm(g.a21);
        d += std::norm(g.a22 - cplx(1, 0));
        return std::sqrt(d);
    }
    bool is_unitary(double tol = 1e-12) const { return unitarity_defect() <= tol; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) { return a.mul(b); }

inline Vec2 normalized(const Vec2& v) {
    double n = v.norm();
    if (n < 1e-300) throw std::domain_error("normalized: zero vector");
    return {v.z / n, v.w / n};
}

// Orthonormal completion: (u, perp(u)) is a unitary frame for any unit u.
inline Vec2 orthogonal_unit(const Vec2& u) { return {-std::conj(u.w), std::conj(u.z)}; }

// Unitary taking unit vector `from` exactly to unit vector `to`,
// and the orthogonal complement of `from` to that of `to`.
inline Mat2 unitary_taking(const Vec2& from, const Vec2& to) {
    Vec2 fp = orthogonal_unit(from);
    Vec2 tp = orthogonal_unit(to);
    // [to tp] * [from fp]^*
    Mat2 lhs{to.z, tp.z, to.w, tp.w};
    Mat2 rhs{std::conj(from.z), std::conj(from.w), std::conj(fp.z), std::conj(fp.w)};
    return lhs.mul(rhs);
}

// Phase normalization: rotate so the first component of largest modulus is
// real and nonnegative. Makes eigenvector choices deterministic.
inline Vec2 phase_normalized(const Vec2& v) {
    cplx lead = std::abs(v.z) >= std::abs(v.w) ? v.z : v.w;
    double m = std::abs(lead);
    if (m < 1e-300) return v;
    cplx ph = std::conj(lead) / m;
    return {ph * v.z, ph * v.w};
}

struct EigenPair {
    cplx value;
    Vec2 vector;
};

struct Eigen2 {
    EigenPair first;
    EigenPair second;
    double separation; // |lambda1 - lambda2|
};

// Eigen decomposition of a 2x2 complex matrix via the quadratic formula.
inline Eigen2 eigen_decompose(const Mat2& m) {
    cplx tr = m.trace();
    cplx dt = m.det();
    cplx disc = std::sqrt(tr * tr - 4.0 * dt);
    cplx l1 = 0.5 * (tr + disc);
    cplx l2 = 0.5 * (tr - disc);
    if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
    auto eigvec = [&](cplx lam) -> Vec2 {
        Vec2 r1{m.a12, lam - m.a11};
        Vec2 r2{lam - m.a22, m.a21};
        Vec2 v = r1.norm() >= r2.norm() ? r1 : r2;
        if (v.norm() < 1e-300) return Vec2{1.0, 0.0};
        return phase_normalized(normalized(v));
    };
    Eigen2 e;
    e.first = {l1, eigvec(l1)};
    e.second = {l2, eigvec(l2)};
    e.separation = std::abs(l1 - l2);
    return e;
}

} // namespace basinforge
