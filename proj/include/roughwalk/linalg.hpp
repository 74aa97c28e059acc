#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>

// Small fixed-capacity vectors/matrices for lattice dimensions d <= 3.

namespace rw {

inline constexpr int kMaxDim = 3;

struct Vec {
    int d = 0;
    std::array<double, kMaxDim> a{};

    static Vec zero(int d) { return Vec{d, {}}; }

    double& operator[](int i) { return a[static_cast<size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < d; ++i) a[i] += o.a[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < d; ++i) a[i] -= o.a[i];
        return *this;
    }
    Vec& operator*=(double c) {
        for (int i = 0; i < d; ++i) a[i] *= c;
        return *this;
    }
    friend Vec operator+(Vec u, const Vec& v) { return u += v; }
    friend Vec operator-(Vec u, const Vec& v) { return u -= v; }
    friend Vec operator*(double c, Vec u) { return u *= c; }
};

inline double dot(const Vec& u, const Vec& v) {
    double s = 0;
    for (int i = 0; i < u.d; ++i) s += u.a[i] * v.a[i];
    return s;
}
inline double norm2(const Vec& u) { return std::sqrt(dot(u, u)); }
inline double max_abs(const Vec& u) {
    double m = 0;
    for (int i = 0; i < u.d; ++i) m = std::max(m, std::fabs(u.a[i]));
    return m;
}

// Row-major d x d matrix.
struct Mat {
    int d = 0;
    std::array<double, kMaxDim * kMaxDim> a{};

    static Mat zero(int d) { return Mat{d, {}}; }
    static Mat identity(int d) {
        Mat m{d, {}};
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[static_cast<size_t>(i * d + j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i * d + j)]; }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < d * d; ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < d * d; ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double c) {
        for (int i = 0; i < d * d; ++i) a[i] *= c;
        return *this;
    }
    friend Mat operator+(Mat u, const Mat& v) { return u += v; }
    friend Mat operator-(Mat u, const Mat& v) { return u -= v; }
    friend Mat operator*(double c, Mat u) { return u *= c; }

    Mat transpose() const {
        Mat t{d, {}};
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) t(i, j) = (*this)(j, i);
        return t;
    }
};

inline Mat outer(const Vec& u, const Vec& v) {
    Mat m{u.d, {}};
    for (int i = 0; i < u.d; ++i)
        for (int j = 0; j < u.d; ++j) m(i, j) = u.a[i] * v.a[j];
    return m;
}

inline double frobenius(const Mat& m) {
    double s = 0;
    for (int i = 0; i < m.d * m.d; ++i) s += m.a[i] * m.a[i];
    return std::sqrt(s);
}
inline double max_abs(const Mat& m) {
    double r = 0;
    for (int i = 0; i < m.d * m.d; ++i) r = std::max(r, std::fabs(m.a[i]));
    return r;
}

// Spectral (operator) norm, closed form for d <= 2; d = 3 falls back to
// Frobenius which over-estimates by at most sqrt(3).
inline double spectral_norm(const Mat& m) {
    if (m.d == 1) return std::fabs(m.a[0]);
    if (m.d == 2) {
        // Largest singular value of [[a,b],[c,dd]].
        const double a = m(0, 0), b = m(0, 1), c = m(1, 0), dd = m(1, 1);
        const double f = a * a + b * b + c * c + dd * dd;
        const double det = a * dd - b * c;
        const double disc = std::sqrt(std::max(0.0, f * f - 4 * det * det));
        return std::sqrt(0.5 * (f + disc));
    }
    return frobenius(m);
}

// Eigenvalues of a symmetric d x d matrix, d <= 3 (ascending).
std::array<double, kMaxDim> symmetric_eigenvalues(const Mat& m);

}  // namespace rw
