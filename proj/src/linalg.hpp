#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

// Small dense least-squares helper shared by the scan fit and the rating
// regression. Solves min ||A x - b|| via column-scaled normal equations with
// partial-pivot elimination; returns nullopt when the system is rank
// deficient at the given relative pivot threshold.

namespace cpv::detail {

inline std::optional<std::vector<double>> least_squares(const std::vector<double>& a_rowmajor,
                                                        std::size_t rows, std::size_t cols,
                                                        const std::vector<double>& b,
                                                        double pivot_rel_tol = 1e-10) {
    if (rows < cols || b.size() != rows) return std::nullopt;

    // column scaling keeps the normal equations well conditioned when the
    // regressors live on very different scales (e.g. DNI vs DNI^2)
    std::vector<double> scale(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            double v = a_rowmajor[r * cols + c];
            scale[c] += v * v;
        }
    for (std::size_t c = 0; c < cols; ++c) {
        scale[c] = std::sqrt(scale[c] / static_cast<double>(rows));
        if (scale[c] == 0.0) return std::nullopt;
    }

    // normal equations N = A'A (scaled), rhs = A'b
    std::vector<double> n(cols * cols, 0.0), rhs(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < cols; ++i) {
            double ai = a_rowmajor[r * cols + i] / scale[i];
            rhs[i] += ai * b[r];
            for (std::size_t j = i; j < cols; ++j)
                n[i * cols + j] += ai * a_rowmajor[r * cols + j] / scale[j];
        }
    }
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < i; ++j) n[i * cols + j] = n[j * cols + i];

    double max_diag = 0.0;
    for (std::size_t i = 0; i < cols; ++i) max_diag = std::max(max_diag, n[i * cols + i]);

    // gaussian elimination with partial pivoting
    std::vector<std::size_t> perm(cols);
    for (std::size_t i = 0; i < cols; ++i) perm[i] = i;
    for (std::size_t k = 0; k < cols; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < cols; ++r)
            if (std::abs(n[r * cols + k]) > std::abs(n[piv * cols + k])) piv = r;
        if (piv != k) {
            for (std::size_t c = 0; c < cols; ++c) std::swap(n[k * cols + c], n[piv * cols + c]);
            std::swap(rhs[k], rhs[piv]);
        }
        if (std::abs(n[k * cols + k]) < pivot_rel_tol * max_diag) return std::nullopt;
        for (std::size_t r = k + 1; r < cols; ++r) {
            double f = n[r * cols + k] / n[k * cols + k];
            for (std::size_t c = k; c < cols; ++c) n[r * cols + c] -= f * n[k * cols + c];
            rhs[r] -= f * rhs[k];
        }
    }
    std::vector<double> x(cols, 0.0);
    for (std::size_t k = cols; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t c = k + 1; c < cols; ++c) s -= n[k * cols + c] * x[c];
        x[k] = s / n[k * cols + k];
    }
    for (std::size_t c = 0; c < cols; ++c) x[c] /= scale[c];
    return x;
}

}  // namespace cpv::detail
