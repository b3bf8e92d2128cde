#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qldpc {

/// Fixed-length packed bit vector over GF(2).
class BitVec {
   public:
    BitVec() = default;
    explicit BitVec(size_t num_bits);
    static BitVec from_ones(size_t num_bits, std::span<const uint32_t> ones);

    size_t size() const { return num_bits_; }
    size_t num_words() const { return words_.size(); }

    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool value = true) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    void flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

    BitVec &operator^=(const BitVec &other);
    BitVec operator^(const BitVec &other) const;
    bool operator==(const BitVec &other) const = default;

    bool any() const;
    size_t popcount() const;
    /// Parity of the bitwise AND with `other`.
    bool dot(const BitVec &other) const;
    std::vector<uint32_t> ones() const;
    void clear();

    std::span<uint64_t> words() { return words_; }
    std::span<const uint64_t> words() const { return words_; }

   private:
    size_t num_bits_ = 0;
    std::vector<uint64_t> words_;
};

/// Sparse binary matrix. Each row stores the sorted column indices of its 1-entries.
class BitMatrix {
   public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols);

    /// Builds from (row, col) pairs. Throws std::invalid_argument on out-of-range or duplicate entries.
    static BitMatrix from_entries(size_t rows, size_t cols, std::span<const std::pair<uint32_t, uint32_t>> entries);
    /// Builds from (row, col) pairs where repeated entries cancel (XOR accumulation).
    static BitMatrix from_entries_xor(size_t rows, size_t cols, std::span<const std::pair<uint32_t, uint32_t>> entries);
    static BitMatrix from_rows(size_t cols, std::vector<std::vector<uint32_t>> row_supports);
    static BitMatrix from_dense(const std::vector<std::vector<int>> &dense);
    static BitMatrix identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t nnz() const;

    const std::vector<uint32_t> &row(size_t r) const { return row_support_[r]; }
    bool get(size_t r, size_t c) const;
    BitVec row_bits(size_t r) const;

    BitMatrix transpose() const;
    std::vector<std::vector<int>> to_dense() const;
    std::vector<size_t> row_weights() const;
    std::vector<size_t> col_weights() const;
    bool is_zero() const { return nnz() == 0; }

    /// Rows [begin, end) as a new matrix with the same column count.
    BitMatrix row_slice(size_t begin, size_t end) const;
    /// Keeps the listed columns, in the listed order.
    BitMatrix select_columns(std::span<const uint32_t> columns) const;

    bool operator==(const BitMatrix &other) const = default;

    /// Coordinate-list text format: "rows cols" header, then one "r c" line per 1-entry in row-major order.
    void write_text(std::ostream &out) const;
    static BitMatrix read_text(std::istream &in);

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<std::vector<uint32_t>> row_support_;
};

BitMatrix mul(const BitMatrix &a, const BitMatrix &b);
BitVec mul(const BitMatrix &a, const BitVec &x);
BitMatrix kron(const BitMatrix &a, const BitMatrix &b);
BitMatrix hstack(const BitMatrix &a, const BitMatrix &b);
BitMatrix vstack(const BitMatrix &a, const BitMatrix &b);

/// Dense row-major bit matrix used by the elimination routines.
class DenseBitMatrix {
   public:
    DenseBitMatrix() = default;
    DenseBitMatrix(size_t rows, size_t cols);
    explicit DenseBitMatrix(const BitMatrix &m);

    size_t rows() const { return rows_.size(); }
    size_t cols() const { return cols_; }
    BitVec &row(size_t r) { return rows_[r]; }
    const BitVec &row(size_t r) const { return rows_[r]; }
    void swap_rows(size_t a, size_t b) { std::swap(rows_[a], rows_[b]); }

    /// Reduced row echelon form in place. Pivot columns are searched left to right and the first
    /// remaining row with a 1 is used as pivot. Returns the pivot column of each leading row.
    std::vector<uint32_t> rref();

   private:
    size_t cols_ = 0;
    std::vector<BitVec> rows_;
};

size_t rank(const BitMatrix &a);
/// Returns x with a x = s, or std::nullopt when s is not in the column space of a.
std::optional<BitVec> solve(const BitMatrix &a, const BitVec &s);
/// Basis of {x : a x = 0}, one basis vector per row.
BitMatrix kernel_basis(const BitMatrix &a);
/// Rows of `candidates` that are independent of rowspace(base) and of each other, greedily in order.
BitMatrix independent_rows_modulo(const BitMatrix &base, const BitMatrix &candidates);
/// Inverse of a square invertible matrix; std::nullopt if singular.
std::optional<BitMatrix> inverse(const BitMatrix &a);

}  // namespace qldpc
