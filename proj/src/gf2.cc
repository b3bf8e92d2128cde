#include "qldpc/gf2.h"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qldpc {

BitVec::BitVec(size_t num_bits) : num_bits_(num_bits), words_((num_bits + 63) / 64, 0) {}

BitVec BitVec::from_ones(size_t num_bits, std::span<const uint32_t> ones) {
    BitVec v(num_bits);
    for (uint32_t i : ones) {
        if (i >= num_bits) {
            throw std::out_of_range("BitVec::from_ones: index out of range");
        }
        v.flip(i);
    }
    return v;
}

BitVec &BitVec::operator^=(const BitVec &other) {
    if (other.num_bits_ != num_bits_) {
        throw std::invalid_argument("BitVec xor: length mismatch");
    }
    for (size_t i = 0; i < words_.size(); i++) {
        words_[i] ^= other.words_[i];
    }
    return *this;
}

BitVec BitVec::operator^(const BitVec &other) const {
    BitVec out = *this;
    out ^= other;
    return out;
}

bool BitVec::any() const {
    return std::any_of(words_.begin(), words_.end(), [](uint64_t w) { return w != 0; });
}

size_t BitVec::popcount() const {
    size_t total = 0;
    for (uint64_t w : words_) {
        total += std::popcount(w);
    }
    return total;
}

bool BitVec::dot(const BitVec &other) const {
    uint64_t acc = 0;
    size_t n = std::min(words_.size(), other.words_.size());
    for (size_t i = 0; i < n; i++) {
        acc ^= words_[i] & other.words_[i];
    }
    return std::popcount(acc) & 1;
}

std::vector<uint32_t> BitVec::ones() const {
    std::vector<uint32_t> out;
    for (size_t k = 0; k < words_.size(); k++) {
        uint64_t w = words_[k];
        while (w) {
            out.push_back(static_cast<uint32_t>(k * 64 + std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

void BitVec::clear() { std::fill(words_.begin(), words_.end(), 0); }

BitMatrix::BitMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), row_support_(rows) {}

BitMatrix BitMatrix::from_entries(size_t rows, size_t cols, std::span<const std::pair<uint32_t, uint32_t>> entries) {
    BitMatrix m(rows, cols);
    for (auto [r, c] : entries) {
        if (r >= rows || c >= cols) {
            throw std::invalid_argument("BitMatrix: entry (" + std::to_string(r) + "," + std::to_string(c) +
                                        ") out of range");
        }
        m.row_support_[r].push_back(c);
    }
    for (auto &row : m.row_support_) {
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw std::invalid_argument("BitMatrix: duplicate entry");
        }
    }
    return m;
}

BitMatrix BitMatrix::from_entries_xor(size_t rows, size_t cols,
                                      std::span<const std::pair<uint32_t, uint32_t>> entries) {
    BitMatrix m(rows, cols);
    for (auto [r, c] : entries) {
        if (r >= rows || c >= cols) {
            throw std::invalid_argument("BitMatrix: entry out of range");
        }
        m.row_support_[r].push_back(c);
    }
    for (auto &row : m.row_support_) {
        std::sort(row.begin(), row.end());
        std::vector<uint32_t> kept;
        for (size_t i = 0; i < row.size();) {
            size_t j = i;
            while (j < row.size() && row[j] == row[i]) {
                j++;
            }
            if ((j - i) & 1) {
                kept.push_back(row[i]);
            }
            i = j;
        }
        row = std::move(kept);
    }
    return m;
}

BitMatrix BitMatrix::from_rows(size_t cols, std::vector<std::vector<uint32_t>> row_supports) {
    BitMatrix m(row_supports.size(), cols);
    for (size_t r = 0; r < row_supports.size(); r++) {
        auto &row = row_supports[r];
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw std::invalid_argument("BitMatrix: duplicate entry");
        }
        if (!row.empty() && row.back() >= cols) {
            throw std::invalid_argument("BitMatrix: column out of range");
        }
        m.row_support_[r] = std::move(row);
    }
    return m;
}

BitMatrix BitMatrix::from_dense(const std::vector<std::vector<int>> &dense) {
    size_t cols = dense.empty() ? 0 : dense[0].size();
    BitMatrix m(dense.size(), cols);
    for (size_t r = 0; r < dense.size(); r++) {
        if (dense[r].size() != cols) {
            throw std::invalid_argument("BitMatrix::from_dense: ragged rows");
        }
        for (size_t c = 0; c < cols; c++) {
            if (dense[r][c] & 1) {
                m.row_support_[r].push_back(static_cast<uint32_t>(c));
            }
        }
    }
    return m;
}

BitMatrix BitMatrix::identity(size_t n) {
    BitMatrix m(n, n);
    for (size_t i = 0; i < n; i++) {
        m.row_support_[i].push_back(static_cast<uint32_t>(i));
    }
    return m;
}

size_t BitMatrix::nnz() const {
    size_t total = 0;
    for (const auto &row : row_support_) {
        total += row.size();
    }
    return total;
}

bool BitMatrix::get(size_t r, size_t c) const {
    const auto &row = row_support_[r];
    return std::binary_search(row.begin(), row.end(), static_cast<uint32_t>(c));
}

BitVec BitMatrix::row_bits(size_t r) const { return BitVec::from_ones(cols_, row_support_[r]); }

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_);
    for (size_t r = 0; r < rows_; r++) {
        for (uint32_t c : row_support_[r]) {
            t.row_support_[c].push_back(static_cast<uint32_t>(r));
        }
    }
    return t;
}

std::vector<std::vector<int>> BitMatrix::to_dense() const {
    std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_, 0));
    for (size_t r = 0; r < rows_; r++) {
        for (uint32_t c : row_support_[r]) {
            out[r][c] = 1;
        }
    }
    return out;
}

std::vector<size_t> BitMatrix::row_weights() const {
    std::vector<size_t> out;
    out.reserve(rows_);
    for (const auto &row : row_support_) {
        out.push_back(row.size());
    }
    return out;
}

std::vector<size_t> BitMatrix::col_weights() const {
    std::vector<size_t> out(cols_, 0);
    for (const auto &row : row_support_) {
        for (uint32_t c : row) {
            out[c]++;
        }
    }
    return out;
}

BitMatrix BitMatrix::row_slice(size_t begin, size_t end) const {
    if (begin > end || end > rows_) {
        throw std::out_of_range("BitMatrix::row_slice");
    }
    BitMatrix m(end - begin, cols_);
    std::copy(row_support_.begin() + begin, row_support_.begin() + end, m.row_support_.begin());
    return m;
}

BitMatrix BitMatrix::select_columns(std::span<const uint32_t> columns) const {
    std::vector<int64_t> new_index(cols_, -1);
    for (size_t k = 0; k < columns.size(); k++) {
        new_index[columns[k]] = static_cast<int64_t>(k);
    }
    BitMatrix m(rows_, columns.size());
    for (size_t r = 0; r < rows_; r++) {
        for (uint32_t c : row_support_[r]) {
            if (new_index[c] >= 0) {
                m.row_support_[r].push_back(static_cast<uint32_t>(new_index[c]));
            }
        }
        std::sort(m.row_support_[r].begin(), m.row_support_[r].end());
    }
    return m;
}

void BitMatrix::write_text(std::ostream &out) const {
    out << rows_ << " " << cols_ << "\n";
    for (size_t r = 0; r < rows_; r++) {
        for (uint32_t c : row_support_[r]) {
            out << r << " " << c << "\n";
        }
    }
}

BitMatrix BitMatrix::read_text(std::istream &in) {
    std::string line;
    size_t rows = 0;
    size_t cols = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream header(line);
        if (!(header >> rows >> cols)) {
            throw std::invalid_argument("BitMatrix::read_text: bad header '" + line + "'");
        }
        break;
    }
    std::vector<std::pair<uint32_t, uint32_t>> entries;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream entry(line);
        uint32_t r = 0;
        uint32_t c = 0;
        if (!(entry >> r >> c)) {
            throw std::invalid_argument("BitMatrix::read_text: bad entry '" + line + "'");
        }
        entries.emplace_back(r, c);
    }
    return from_entries(rows, cols, entries);
}

BitMatrix mul(const BitMatrix &a, const BitMatrix &b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("mul: dimension mismatch (" + std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.rows()) + ")");
    }
    BitMatrix out(a.rows(), b.cols());
    std::vector<std::vector<uint32_t>> rows(a.rows());
    BitVec acc(b.cols());
    for (size_t r = 0; r < a.rows(); r++) {
        acc.clear();
        for (uint32_t k : a.row(r)) {
            for (uint32_t c : b.row(k)) {
                acc.flip(c);
            }
        }
        rows[r] = acc.ones();
    }
    return BitMatrix::from_rows(b.cols(), std::move(rows));
}

BitVec mul(const BitMatrix &a, const BitVec &x) {
    if (a.cols() != x.size()) {
        throw std::invalid_argument("mul: dimension mismatch");
    }
    BitVec out(a.rows());
    for (size_t r = 0; r < a.rows(); r++) {
        bool bit = false;
        for (uint32_t c : a.row(r)) {
            bit ^= x.get(c);
        }
        if (bit) {
            out.set(r);
        }
    }
    return out;
}

BitMatrix kron(const BitMatrix &a, const BitMatrix &b) {
    std::vector<std::vector<uint32_t>> rows(a.rows() * b.rows());
    for (size_t i = 0; i < a.rows(); i++) {
        for (size_t p = 0; p < b.rows(); p++) {
            auto &row = rows[i * b.rows() + p];
            for (uint32_t j : a.row(i)) {
                for (uint32_t q : b.row(p)) {
                    row.push_back(static_cast<uint32_t>(j * b.cols() + q));
                }
            }
        }
    }
    return BitMatrix::from_rows(a.cols() * b.cols(), std::move(rows));
}

BitMatrix hstack(const BitMatrix &a, const BitMatrix &b) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("hstack: row count mismatch");
    }
    std::vector<std::vector<uint32_t>> rows(a.rows());
    for (size_t r = 0; r < a.rows(); r++) {
        rows[r] = a.row(r);
        for (uint32_t c : b.row(r)) {
            rows[r].push_back(static_cast<uint32_t>(c + a.cols()));
        }
    }
    return BitMatrix::from_rows(a.cols() + b.cols(), std::move(rows));
}

BitMatrix vstack(const BitMatrix &a, const BitMatrix &b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("vstack: column count mismatch");
    }
    std::vector<std::vector<uint32_t>> rows;
    rows.reserve(a.rows() + b.rows());
    for (size_t r = 0; r < a.rows(); r++) {
        rows.push_back(a.row(r));
    }
    for (size_t r = 0; r < b.rows(); r++) {
        rows.push_back(b.row(r));
    }
    return BitMatrix::from_rows(a.cols(), std::move(rows));
}

DenseBitMatrix::DenseBitMatrix(size_t rows, size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

DenseBitMatrix::DenseBitMatrix(const BitMatrix &m) : cols_(m.cols()) {
    rows_.reserve(m.rows());
    for (size_t r = 0; r < m.rows(); r++) {
        rows_.push_back(m.row_bits(r));
    }
}

std::vector<uint32_t> DenseBitMatrix::rref() {
    std::vector<uint32_t> pivots;
    size_t lead = 0;
    for (size_t c = 0; c < cols_ && lead < rows_.size(); c++) {
        size_t pivot = lead;
        while (pivot < rows_.size() && !rows_[pivot].get(c)) {
            pivot++;
        }
        if (pivot == rows_.size()) {
            continue;
        }
        std::swap(rows_[lead], rows_[pivot]);
        const BitVec &p = rows_[lead];
        size_t first_word = c >> 6;
        auto pw = p.words();
        for (size_t r = 0; r < rows_.size(); r++) {
            if (r != lead && rows_[r].get(c)) {
                auto rw = rows_[r].words();
                for (size_t k = first_word; k < rw.size(); k++) {
                    rw[k] ^= pw[k];
                }
            }
        }
        pivots.push_back(static_cast<uint32_t>(c));
        lead++;
    }
    return pivots;
}

size_t rank(const BitMatrix &a) {
    DenseBitMatrix d(a);
    return d.rref().size();
}

std::optional<BitVec> solve(const BitMatrix &a, const BitVec &s) {
    if (s.size() != a.rows()) {
        throw std::invalid_argument("solve: syndrome length does not match row count");
    }
    // Augmented [a | s]; eliminate over the first a.cols() columns.
    DenseBitMatrix aug(a.rows(), a.cols() + 1);
    for (size_t r = 0; r < a.rows(); r++) {
        for (uint32_t c : a.row(r)) {
            aug.row(r).set(c);
        }
        if (s.get(r)) {
            aug.row(r).set(a.cols());
        }
    }
    auto pivots = aug.rref();
    BitVec x(a.cols());
    for (size_t k = 0; k < pivots.size(); k++) {
        if (pivots[k] == a.cols()) {
            return std::nullopt;
        }
        if (aug.row(k).get(a.cols())) {
            x.set(pivots[k]);
        }
    }
    return x;
}

BitMatrix kernel_basis(const BitMatrix &a) {
    DenseBitMatrix d(a);
    auto pivots = d.rref();
    std::vector<int64_t> pivot_row(a.cols(), -1);
    for (size_t k = 0; k < pivots.size(); k++) {
        pivot_row[pivots[k]] = static_cast<int64_t>(k);
    }
    std::vector<std::vector<uint32_t>> basis;
    for (size_t f = 0; f < a.cols(); f++) {
        if (pivot_row[f] >= 0) {
            continue;
        }
        std::vector<uint32_t> v{static_cast<uint32_t>(f)};
        for (size_t k = 0; k < pivots.size(); k++) {
            if (d.row(k).get(f)) {
                v.push_back(pivots[k]);
            }
        }
        basis.push_back(std::move(v));
    }
    return BitMatrix::from_rows(a.cols(), std::move(basis));
}

BitMatrix independent_rows_modulo(const BitMatrix &base, const BitMatrix &candidates) {
    if (base.cols() != candidates.cols()) {
        throw std::invalid_argument("independent_rows_modulo: column mismatch");
    }
    // Incremental echelon basis keyed by leading column.
    std::vector<BitVec> basis;
    std::vector<uint32_t> lead;
    auto reduce = [&](BitVec v) {
        for (size_t k = 0; k < basis.size(); k++) {
            if (v.get(lead[k])) {
                v ^= basis[k];
            }
        }
        return v;
    };
    auto insert = [&](const BitVec &v) {
        auto ones = v.ones();
        basis.push_back(v);
        lead.push_back(ones.front());
        // Keep earlier basis vectors free of the new leading bit so sequential reduction stays exact.
        for (size_t k = 0; k + 1 < basis.size(); k++) {
            if (basis[k].get(lead.back())) {
                basis[k] ^= v;
            }
        }
    };
    for (size_t r = 0; r < base.rows(); r++) {
        BitVec v = reduce(base.row_bits(r));
        if (v.any()) {
            insert(v);
        }
    }
    std::vector<std::vector<uint32_t>> kept;
    for (size_t r = 0; r < candidates.rows(); r++) {
        BitVec v = reduce(candidates.row_bits(r));
        if (v.any()) {
            insert(v);
            kept.push_back(candidates.row(r));
        }
    }
    return BitMatrix::from_rows(candidates.cols(), std::move(kept));
}

std::optional<BitMatrix> inverse(const BitMatrix &a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("inverse: matrix is not square");
    }
    size_t n = a.rows();
    DenseBitMatrix aug(n, 2 * n);
    for (size_t r = 0; r < n; r++) {
        for (uint32_t c : a.row(r)) {
            aug.row(r).set(c);
        }
        aug.row(r).set(n + r);
    }
    auto pivots = aug.rref();
    if (pivots.size() < n || pivots[n - 1] != n - 1) {
        return std::nullopt;
    }
    std::vector<std::vector<uint32_t>> rows(n);
    for (size_t r = 0; r < n; r++) {
        for (uint32_t c : aug.row(r).ones()) {
            if (c >= n) {
                rows[r].push_back(static_cast<uint32_t>(c - n));
            }
        }
    }
    return BitMatrix::from_rows(n, std::move(rows));
}

}  // namespace qldpc
