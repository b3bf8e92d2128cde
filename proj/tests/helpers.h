#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "qldpc/codes.h"
#include "qldpc/gf2.h"
#include "qldpc/rng.h"

namespace qldpc::testing {

using Dense = std::vector<std::vector<int>>;

inline BitMatrix repetition(size_t length) {
    std::vector<std::vector<uint32_t>> rows;
    for (uint32_t i = 0; i + 1 < length; i++) {
        rows.push_back({i, i + 1});
    }
    return BitMatrix::from_rows(length, rows);
}

inline CssCode surface13() {
    BitMatrix h = repetition(3);
    return hgp(h, h);
}

inline BitMatrix random_matrix(size_t rows, size_t cols, double density, Rng &rng) {
    std::vector<std::vector<uint32_t>> sup(rows);
    for (size_t i = 0; i < rows; i++) {
        for (uint32_t j = 0; j < cols; j++) {
            if (rng.uniform() < density) {
                sup[i].push_back(j);
            }
        }
    }
    return BitMatrix::from_rows(cols, sup);
}

inline Dense dense_mul(const Dense &a, const Dense &b) {
    size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    Dense c(n, std::vector<int>(m, 0));
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < m; j++) {
            int s = 0;
            for (size_t t = 0; t < k; t++) {
                s ^= a[i][t] & b[t][j];
            }
            c[i][j] = s;
        }
    }
    return c;
}

inline bool parity(uint64_t x) { return __builtin_popcountll(x) & 1; }

// Column j of m as a bitmask over rows (rows <= 64).
inline std::vector<uint64_t> column_masks(const BitMatrix &m) {
    std::vector<uint64_t> cols(m.cols(), 0);
    for (size_t r = 0; r < m.rows(); r++) {
        for (uint32_t c : m.row(r)) {
            cols[c] |= uint64_t{1} << r;
        }
    }
    return cols;
}

// Row r of m as a bitmask over columns (cols <= 64).
inline std::vector<uint64_t> row_masks(const BitMatrix &m) {
    std::vector<uint64_t> rows(m.rows(), 0);
    for (size_t r = 0; r < m.rows(); r++) {
        for (uint32_t c : m.row(r)) {
            rows[r] |= uint64_t{1} << c;
        }
    }
    return rows;
}

// Smallest weight of x with h x = 0 and (logicals x != 0, or x != 0 if logicals is empty), by
// enumerating all 2^n vectors. n <= 24.
inline std::optional<size_t> exhaustive_min_weight(const BitMatrix &h, const BitMatrix &logicals) {
    size_t n = h.cols();
    auto hr = row_masks(h);
    auto lr = row_masks(logicals);
    std::optional<size_t> best;
    for (uint64_t x = 1; x < (uint64_t{1} << n); x++) {
        size_t w = __builtin_popcountll(x);
        if (best && w >= *best) {
            continue;
        }
        bool ok = true;
        for (uint64_t r : hr) {
            if (parity(r & x)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        bool hit = lr.empty();
        for (uint64_t r : lr) {
            hit = hit || parity(r & x);
        }
        if (hit) {
            best = w;
        }
    }
    return best;
}

// Random tree-shaped Tanner graph: each new check touches one existing bit and 1-3 new bits.
inline BitMatrix random_tree(size_t max_bits, Rng &rng) {
    std::vector<std::vector<uint32_t>> rows;
    uint32_t bits = 1;
    while (bits < max_bits) {
        std::vector<uint32_t> row = {static_cast<uint32_t>(rng.below(bits))};
        size_t fresh = std::min<size_t>(1 + rng.below(3), max_bits - bits);
        for (size_t i = 0; i < fresh; i++) {
            row.push_back(bits++);
        }
        rows.push_back(row);
    }
    return BitMatrix::from_rows(bits, rows);
}

// P(e_j = 1 | h e = s) by enumerating all error patterns.
inline std::vector<double> exact_marginals(const BitMatrix &h, const std::vector<double> &priors, const BitVec &s) {
    size_t n = h.cols();
    auto cols = column_masks(h);
    uint64_t target = 0;
    for (size_t r = 0; r < h.rows(); r++) {
        if (s.get(r)) {
            target |= uint64_t{1} << r;
        }
    }
    std::vector<double> num(n, 0.0);
    double total = 0.0;
    for (uint64_t e = 0; e < (uint64_t{1} << n); e++) {
        uint64_t syn = 0;
        double w = 1.0;
        for (size_t j = 0; j < n; j++) {
            if ((e >> j) & 1) {
                syn ^= cols[j];
                w *= priors[j];
            } else {
                w *= 1 - priors[j];
            }
        }
        if (syn != target) {
            continue;
        }
        total += w;
        for (size_t j = 0; j < n; j++) {
            if ((e >> j) & 1) {
                num[j] += w;
            }
        }
    }
    for (double &x : num) {
        x /= total;
    }
    return num;
}

}  // namespace qldpc::testing
