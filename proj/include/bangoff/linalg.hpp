#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace bangoff {

using cplx = std::complex<double>;

using Vec4 = std::array<cplx, 4>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;   // row major
using Mat4r = std::array<std::array<double, 4>, 4>;

inline Mat4 mat4_identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

inline Vec4 matvec(const Mat4& m, const Vec4& v) {
    Vec4 out{};
    for (int i = 0; i < 4; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < 4; ++j) s += m[i][j] * v[j];
        out[i] = s;
    }
    return out;
}

inline Vec4 matvec(const Mat4r& m, const Vec4& v) {
    Vec4 out{};
    for (int i = 0; i < 4; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < 4; ++j) s += m[i][j] * v[j];
        out[i] = s;
    }
    return out;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 out{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const cplx aik = a[i][k];
            for (int j = 0; j < 4; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

inline Mat4 adjoint(const Mat4& m) {
    Mat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i][j] = std::conj(m[j][i]);
    return out;
}

// <a|b> with the physics convention (conjugate on the left argument)
inline cplx inner(const Vec4& a, const Vec4& b) {
    cplx s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm(const Vec4& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

inline double max_abs_diff(const Mat4& a, const Mat4& b) {
    double m = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

} // namespace bangoff
