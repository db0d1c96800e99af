#pragma once

// Tiny dense solves for the reactor Newton iterations (5x5) and the Newton
// action correction (2x2). Row-major, partial pivoting.

#include <array>
#include <cmath>
#include <cstddef>

namespace polycstr {

// Solves A x = b in place for small fixed N. Returns false when the matrix is
// numerically singular.
template <std::size_t N>
bool solve_dense(std::array<double, N * N> a, std::array<double, N> b,
                 std::array<double, N>& x) {
    std::array<std::size_t, N> piv{};
    for (std::size_t i = 0; i < N; ++i) piv[i] = i;

    for (std::size_t col = 0; col < N; ++col) {
        std::size_t best = col;
        double mag = std::fabs(a[piv[col] * N + col]);
        for (std::size_t r = col + 1; r < N; ++r) {
            double m = std::fabs(a[piv[r] * N + col]);
            if (m > mag) {
                mag = m;
                best = r;
            }
        }
        if (!(mag > 0.0) || !std::isfinite(mag)) return false;
        std::swap(piv[col], piv[best]);

        const double pivot = a[piv[col] * N + col];
        for (std::size_t r = col + 1; r < N; ++r) {
            const double factor = a[piv[r] * N + col] / pivot;
            a[piv[r] * N + col] = 0.0;
            for (std::size_t c = col + 1; c < N; ++c)
                a[piv[r] * N + c] -= factor * a[piv[col] * N + c];
            b[piv[r]] -= factor * b[piv[col]];
        }
    }

    for (std::size_t i = N; i-- > 0;) {
        double s = b[piv[i]];
        for (std::size_t c = i + 1; c < N; ++c) s -= a[piv[i] * N + c] * x[c];
        x[i] = s / a[piv[i] * N + i];
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

struct Mat2 {
    // [ a b ; c d ]
    double a = 0, b = 0, c = 0, d = 0;

    double det() const { return a * d - b * c; }
};

struct Vec2 {
    double x = 0, y = 0;
};

inline bool solve2(const Mat2& m, const Vec2& rhs, Vec2& out) {
    const double det = m.det();
    const double scale = std::fabs(m.a) + std::fabs(m.b) + std::fabs(m.c) + std::fabs(m.d);
    if (!std::isfinite(det) || std::fabs(det) <= 1e-14 * std::max(scale * scale, 1e-300))
        return false;
    out.x = (m.d * rhs.x - m.b * rhs.y) / det;
    out.y = (m.a * rhs.y - m.c * rhs.x) / det;
    return std::isfinite(out.x) && std::isfinite(out.y);
}

}  // namespace polycstr
