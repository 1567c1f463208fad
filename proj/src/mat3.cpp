#include "vsr/mat3.hpp"
#include <algorithm>
#include <cmath>

namespace vsr {

namespace {

// cyclic Jacobi, used when the analytic path loses accuracy
EigSym3 jacobi(const SymMat3& S) {
    Mat3 A = S.full();
    Mat3 V = Mat3::identity();
    for (int sweep = 0; sweep < 30; ++sweep) {
        double off = A(0, 1) * A(0, 1) + A(0, 2) * A(0, 2) + A(1, 2) * A(1, 2);
        if (off < 1e-30) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (A(p, q) == 0.0) continue;
                double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0)
                         / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                Mat3 B = A;
                for (int i = 0; i < 3; ++i) {
                    B(i, p) = c * A(i, p) - s * A(i, q);
                    B(i, q) = s * A(i, p) + c * A(i, q);
                }
                A = B;
                for (int i = 0; i < 3; ++i) {
                    B(p, i) = c * A(p, i) - s * A(q, i);
                    B(q, i) = s * A(p, i) + c * A(q, i);
                }
                A = B;
                for (int i = 0; i < 3; ++i) {
                    double vp = V(i, p), vq = V(i, q);
                    V(i, p) = c * vp - s * vq;
                    V(i, q) = s * vp + c * vq;
                }
            }
    }
    int idx[3] = {0, 1, 2};
    double ev[3] = {A(0, 0), A(1, 1), A(2, 2)};
    std::sort(idx, idx + 3, [&](int a, int b) { return ev[a] < ev[b]; });
    EigSym3 r;
    for (int j = 0; j < 3; ++j) {
        r.evals[j] = ev[idx[j]];
        for (int i = 0; i < 3; ++i) r.frame(i, j) = V(i, idx[j]);
    }
    return r;
}

void cross3(const double* a, const double* b, double* c) {
    c[0] = a[1] * b[2] - a[2] * b[1];
    c[1] = a[2] * b[0] - a[0] * b[2];
    c[2] = a[0] * b[1] - a[1] * b[0];
}

} // namespace

EigSym3 eig_sym(const SymMat3& S) {
    Mat3 A = S.full();
    double scale = 0.0;
    for (int i = 0; i < 9; ++i) scale = std::max(scale, std::abs(A.m[i]));
    if (scale == 0.0) {
        EigSym3 r{};
        r.frame = Mat3::identity();
        return r;
    }

    // eigenvalues from the characteristic polynomial in trigonometric form
    double q = (A(0, 0) + A(1, 1) + A(2, 2)) / 3.0;
    Mat3 B = A;
    B(0, 0) -= q; B(1, 1) -= q; B(2, 2) -= q;
    double p2 = 0.0;
    for (int i = 0; i < 9; ++i) p2 += B.m[i] * B.m[i];
    double p = std::sqrt(p2 / 6.0);
    EigSym3 r;
    if (p < 1e-14 * scale) {
        r.evals[0] = r.evals[1] = r.evals[2] = q;
        r.frame = Mat3::identity();
        return r;
    }
    Mat3 Bn = B * (1.0 / p);
    double detBn = invariants3(Bn).det;
    double phi = std::acos(std::clamp(detBn / 2.0, -1.0, 1.0)) / 3.0;
    double e2 = q + 2.0 * p * std::cos(phi);
    double e0 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e1 = 3.0 * q - e0 - e2;
    r.evals[0] = e0; r.evals[1] = e1; r.evals[2] = e2;

    // eigenvector for the most isolated eigenvalue via cross products of
    // rows of A - lambda I, then complete the frame
    double gap01 = e1 - e0, gap12 = e2 - e1;
    int j0 = gap01 > gap12 ? 0 : 2; // best separated
    double lam = r.evals[j0];
    Mat3 M = A;
    M(0, 0) -= lam; M(1, 1) -= lam; M(2, 2) -= lam;
    double best[3] = {0, 0, 0};
    double bestn = -1.0;
    const double* rows[3] = {&M.m[0], &M.m[3], &M.m[6]};
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            double c[3];
            cross3(rows[a], rows[b], c);
            double n = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
            if (n > bestn) {
                bestn = n;
                best[0] = c[0]; best[1] = c[1]; best[2] = c[2];
            }
        }
    if (bestn < 1e-24 * scale * scale * scale * scale) return jacobi(S);
    double inv = 1.0 / std::sqrt(bestn);
    double v0[3] = {best[0] * inv, best[1] * inv, best[2] * inv};

    // second vector: solve in the plane orthogonal to v0
    int j1 = (j0 == 0) ? 1 : 1;
    lam = r.evals[j1];
    M = A;
    M(0, 0) -= lam; M(1, 1) -= lam; M(2, 2) -= lam;
    // pick row least aligned with v0, project out v0, cross with v0
    double v1[3] = {0, 0, 0};
    bestn = -1.0;
    for (int a = 0; a < 3; ++a) {
        double rproj[3];
        double d = rows[a][0] * v0[0] + rows[a][1] * v0[1] + rows[a][2] * v0[2];
        for (int i = 0; i < 3; ++i) rproj[i] = rows[a][i] - d * v0[i];
        double c[3];
        cross3(v0, rproj, c); // lies in the plane, orthogonal to rproj
        // actually we need M v = 0 within the plane; use rproj itself crossed
        double n = rproj[0] * rproj[0] + rproj[1] * rproj[1] + rproj[2] * rproj[2];
        if (n > bestn) {
            bestn = n;
            cross3(rproj, v0, v1);
        }
        (void)c;
    }
    double n1 = v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2];
    if (n1 < 1e-24) {
        // degenerate pair: any vector orthogonal to v0 works
        double t[3] = {1, 0, 0};
        if (std::abs(v0[0]) > 0.9) { t[0] = 0; t[1] = 1; }
        cross3(v0, t, v1);
        n1 = v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2];
    }
    inv = 1.0 / std::sqrt(n1);
    for (int i = 0; i < 3; ++i) v1[i] *= inv;
    double v2[3];
    cross3(v0, v1, v2);

    int col_of[3];
    col_of[j0] = 0;
    col_of[j1] = 1;
    col_of[3 - j0 - j1] = 2;
    double* vs[3] = {v0, v1, v2};
    for (int e = 0; e < 3; ++e)
        for (int i = 0; i < 3; ++i) r.frame(i, e) = vs[col_of[e]][i];

    // accept only if the reconstruction is tight, otherwise fall back
    Mat3 D{};
    D(0, 0) = r.evals[0]; D(1, 1) = r.evals[1]; D(2, 2) = r.evals[2];
    Mat3 rec = r.frame * D * r.frame.transpose();
    double res = 0.0;
    for (int i = 0; i < 9; ++i) res += (rec.m[i] - A.m[i]) * (rec.m[i] - A.m[i]);
    if (std::sqrt(res) > 1e-11 * std::max(1.0, scale)) return jacobi(S);
    return r;
}

} // namespace vsr
