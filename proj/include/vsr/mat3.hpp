#pragma once
#include <array>
#include <cmath>
#include <utility>

// Pointwise 3x3 tensor algebra. Everything here is pure and cheap enough to
// call once per grid node inside the field kernels.
namespace vsr {

struct Mat3 {
    double m[9]{}; // row-major

    double& operator()(int i, int j) { return m[3 * i + j]; }
    double operator()(int i, int j) const { return m[3 * i + j]; }

    static Mat3 identity() {
        Mat3 r;
        r.m[0] = r.m[4] = r.m[8] = 1.0;
        return r;
    }
    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    Mat3 operator+(const Mat3& b) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] + b.m[i];
        return r;
    }
    Mat3 operator-(const Mat3& b) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - b.m[i];
        return r;
    }
    Mat3 operator*(double c) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] * c;
        return r;
    }
    Mat3 operator*(const Mat3& b) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * b(k, j);
                r(i, j) = s;
            }
        return r;
    }
};

// 6 independent entries, order (11,22,33,12,13,23)
struct SymMat3 {
    double a[6]{};

    static SymMat3 identity() {
        SymMat3 s;
        s.a[0] = s.a[1] = s.a[2] = 1.0;
        return s;
    }
    Mat3 full() const {
        Mat3 r;
        r(0, 0) = a[0]; r(1, 1) = a[1]; r(2, 2) = a[2];
        r(0, 1) = r(1, 0) = a[3];
        r(0, 2) = r(2, 0) = a[4];
        r(1, 2) = r(2, 1) = a[5];
        return r;
    }
    SymMat3 operator-(const SymMat3& b) const {
        SymMat3 r;
        for (int i = 0; i < 6; ++i) r.a[i] = a[i] - b.a[i];
        return r;
    }
    SymMat3 operator*(double c) const {
        SymMat3 r;
        for (int i = 0; i < 6; ++i) r.a[i] = a[i] * c;
        return r;
    }
};

// axial vector w; full matrix acts as x -> w cross x
struct SkewMat3 {
    double w[3]{};

    Mat3 full() const {
        Mat3 r;
        r(0, 1) = -w[2]; r(1, 0) = w[2];
        r(0, 2) = w[1];  r(2, 0) = -w[1];
        r(1, 2) = -w[0]; r(2, 1) = w[0];
        return r;
    }
    SkewMat3 operator*(double c) const {
        SkewMat3 r;
        for (int i = 0; i < 3; ++i) r.w[i] = w[i] * c;
        return r;
    }
};

inline std::pair<SymMat3, SkewMat3> sym_skew_split(const Mat3& A) {
    SymMat3 s;
    s.a[0] = A(0, 0); s.a[1] = A(1, 1); s.a[2] = A(2, 2);
    s.a[3] = 0.5 * (A(0, 1) + A(1, 0));
    s.a[4] = 0.5 * (A(0, 2) + A(2, 0));
    s.a[5] = 0.5 * (A(1, 2) + A(2, 1));
    SkewMat3 k;
    k.w[0] = 0.5 * (A(2, 1) - A(1, 2));
    k.w[1] = 0.5 * (A(0, 2) - A(2, 0));
    k.w[2] = 0.5 * (A(1, 0) - A(0, 1));
    return {s, k};
}

inline Mat3 sym_part(const Mat3& A) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (A(i, j) + A(j, i));
    return r;
}
inline Mat3 skew_part(const Mat3& A) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (A(i, j) - A(j, i));
    return r;
}

struct Invariants3 {
    double trace, trace_cof, det;
};

inline Invariants3 invariants3(const Mat3& A) {
    Invariants3 v;
    v.trace = A(0, 0) + A(1, 1) + A(2, 2);
    // trace of the cofactor matrix = sum of principal 2x2 minors
    v.trace_cof = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)
                + A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0)
                + A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    v.det = A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1))
          - A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0))
          + A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
    return v;
}

inline Invariants3 invariants3(const SymMat3& S) { return invariants3(S.full()); }

// Rodrigues with a series fallback near zero angle (avoids sin(t)/t at t=0).
inline Mat3 exp_skew(const SkewMat3& T) {
    double t2 = T.w[0] * T.w[0] + T.w[1] * T.w[1] + T.w[2] * T.w[2];
    double t = std::sqrt(t2);
    double c1, c2; // sin(t)/t, (1-cos(t))/t^2
    if (t < 1e-4) {
        c1 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        c1 = std::sin(t) / t;
        c2 = (1.0 - std::cos(t)) / t2;
    }
    Mat3 A = T.full();
    Mat3 A2 = A * A;
    Mat3 R = Mat3::identity();
    for (int i = 0; i < 9; ++i) R.m[i] += c1 * A.m[i] + c2 * A2.m[i];
    return R;
}

inline double frob_inner(const Mat3& A, const Mat3& B) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += A.m[i] * B.m[i];
    return s;
}

inline double frob_norm(const Mat3& A) { return std::sqrt(frob_inner(A, A)); }

// v cross each row of A
inline Mat3 ricci_apply(const std::array<double, 3>& v, const Mat3& A) {
    Mat3 r;
    for (int i = 0; i < 3; ++i) {
        r(i, 0) = v[1] * A(i, 2) - v[2] * A(i, 1);
        r(i, 1) = v[2] * A(i, 0) - v[0] * A(i, 2);
        r(i, 2) = v[0] * A(i, 1) - v[1] * A(i, 0);
    }
    return r;
}

struct EigSym3 {
    double evals[3]; // ascending
    Mat3 frame;      // columns are eigenvectors
};

EigSym3 eig_sym(const SymMat3& A);

} // namespace vsr
