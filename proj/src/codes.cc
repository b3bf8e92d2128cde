#include "qldpc/codes.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qldpc {

MonomialMatrix::MonomialMatrix(size_t rows, size_t cols, size_t lift_size)
    : rows(rows), cols(cols), lift_size(lift_size), entries(rows, std::vector<std::vector<uint32_t>>(cols)) {
    if (lift_size == 0) {
        throw std::invalid_argument("MonomialMatrix: lift size must be >= 1");
    }
}

MonomialMatrix MonomialMatrix::from_exponents(const std::vector<std::vector<int>> &exponents, size_t lift_size) {
    size_t cols = exponents.empty() ? 0 : exponents[0].size();
    MonomialMatrix m(exponents.size(), cols, lift_size);
    for (size_t i = 0; i < m.rows; i++) {
        if (exponents[i].size() != cols) {
            throw std::invalid_argument("MonomialMatrix::from_exponents: ragged rows");
        }
        for (size_t j = 0; j < cols; j++) {
            if (exponents[i][j] >= 0) {
                m.add_term(i, j, exponents[i][j]);
            }
        }
    }
    return m;
}

void MonomialMatrix::add_term(size_t i, size_t j, int64_t s) {
    int64_t l = static_cast<int64_t>(lift_size);
    auto e = static_cast<uint32_t>(((s % l) + l) % l);
    auto &terms = entries.at(i).at(j);
    auto it = std::lower_bound(terms.begin(), terms.end(), e);
    if (it != terms.end() && *it == e) {
        terms.erase(it);
    } else {
        terms.insert(it, e);
    }
}

MonomialMatrix MonomialMatrix::transpose() const {
    MonomialMatrix t(cols, rows, lift_size);
    for (size_t i = 0; i < rows; i++) {
        for (size_t j = 0; j < cols; j++) {
            for (uint32_t s : entries[i][j]) {
                t.add_term(j, i, static_cast<int64_t>(lift_size) - s);
            }
        }
    }
    return t;
}

BitMatrix lift(const MonomialMatrix &m) {
    size_t l = m.lift_size;
    std::vector<std::pair<uint32_t, uint32_t>> entries;
    for (size_t i = 0; i < m.rows; i++) {
        for (size_t j = 0; j < m.cols; j++) {
            for (uint32_t s : m.entries[i][j]) {
                for (size_t c = 0; c < l; c++) {
                    entries.emplace_back(static_cast<uint32_t>(i * l + (c + s) % l), static_cast<uint32_t>(j * l + c));
                }
            }
        }
    }
    return BitMatrix::from_entries_xor(m.rows * l, m.cols * l, entries);
}

namespace {

// Row-by-row builder that keeps each entry's classical edge aligned with the sorted row support.
struct TaggedRows {
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> rows;  // (col, edge)

    explicit TaggedRows(size_t n) : rows(n) {}
    void add(size_t r, uint32_t col, uint32_t edge) { rows[r].emplace_back(col, edge); }

    std::pair<BitMatrix, std::vector<std::vector<uint32_t>>> finish(size_t cols) {
        std::vector<std::vector<uint32_t>> supports(rows.size());
        std::vector<std::vector<uint32_t>> tags(rows.size());
        for (size_t r = 0; r < rows.size(); r++) {
            std::sort(rows[r].begin(), rows[r].end());
            for (size_t k = 0; k < rows[r].size(); k++) {
                if (k > 0 && rows[r][k].first == rows[r][k - 1].first) {
                    throw std::invalid_argument("product code: two terms land on one matrix entry");
                }
                supports[r].push_back(rows[r][k].first);
                tags[r].push_back(rows[r][k].second);
            }
        }
        return {BitMatrix::from_rows(cols, std::move(supports)), std::move(tags)};
    }
};

uint32_t mod(int64_t a, size_t l) {
    int64_t m = static_cast<int64_t>(l);
    return static_cast<uint32_t>(((a % m) + m) % m);
}

void finish_code(CssCode &code) {
    code.n = code.hx.cols();
    code.k = code.n - rank(code.hx) - rank(code.hz);
    compute_logicals(code);
}

// Lifted hypergraph product of two monomial matrices; hgp is the l = 1 case.
CssCode product_code(const MonomialMatrix &b1, const MonomialMatrix &b2) {
    if (b1.lift_size != b2.lift_size) {
        throw std::invalid_argument("qlp: lift sizes differ");
    }
    size_t l = b1.lift_size;
    size_t m1 = b1.rows, n1 = b1.cols, m2 = b2.rows, n2 = b2.cols;
    CssCode code;
    ProductLayout &lay = code.layout;

    // One classical edge per nonzero base entry, row-major.
    std::vector<std::vector<uint32_t>> e1(m1, std::vector<uint32_t>(n1, UINT32_MAX));
    std::vector<std::vector<uint32_t>> e2(m2, std::vector<uint32_t>(n2, UINT32_MAX));
    for (uint32_t i = 0; i < m1; i++) {
        for (uint32_t j = 0; j < n1; j++) {
            if (!b1.entries[i][j].empty()) {
                e1[i][j] = static_cast<uint32_t>(lay.horizontal_edges.size());
                lay.horizontal_edges.push_back({i, j});
            }
        }
    }
    for (uint32_t i = 0; i < m2; i++) {
        for (uint32_t j = 0; j < n2; j++) {
            if (!b2.entries[i][j].empty()) {
                e2[i][j] = static_cast<uint32_t>(lay.vertical_edges.size());
                lay.vertical_edges.push_back({i, j});
            }
        }
    }

    size_t n_ll = n1 * n2 * l;
    size_t n = n_ll + m1 * m2 * l;
    auto ll = [&](size_t j1, size_t j2, size_t s) { return static_cast<uint32_t>((j2 * n1 + j1) * l + s); };
    auto ur = [&](size_t i1, size_t i2, size_t s) {
        return static_cast<uint32_t>(n_ll + (i2 * m1 + i1) * l + s);
    };
    lay.data.resize(n);
    for (uint32_t j2 = 0; j2 < n2; j2++) {
        for (uint32_t j1 = 0; j1 < n1; j1++) {
            for (uint32_t s = 0; s < l; s++) {
                lay.data[ll(j1, j2, s)] = {Quadrant::LowerLeft, j1, j2, s, j1, s};
            }
        }
    }
    for (uint32_t i2 = 0; i2 < m2; i2++) {
        for (uint32_t i1 = 0; i1 < m1; i1++) {
            for (uint32_t s = 0; s < l; s++) {
                lay.data[ur(i1, i2, s)] = {Quadrant::UpperRight, i1, i2, s, i1, s};
            }
        }
    }

    TaggedRows z_rows(m2 * n1 * l);
    lay.z_checks.resize(m2 * n1 * l);
    for (uint32_t i2 = 0; i2 < m2; i2++) {
        for (uint32_t j1 = 0; j1 < n1; j1++) {
            for (uint32_t sz = 0; sz < l; sz++) {
                size_t r = (i2 * n1 + j1) * l + sz;
                lay.z_checks[r] = {Quadrant::UpperLeft, j1, i2, sz, j1, sz};
                for (uint32_t j2 = 0; j2 < n2; j2++) {
                    for (uint32_t t : b2.entries[i2][j2]) {
                        z_rows.add(r, ll(j1, j2, mod(int64_t(sz) - t, l)), e2[i2][j2]);
                    }
                }
                for (uint32_t i1 = 0; i1 < m1; i1++) {
                    for (uint32_t t : b1.entries[i1][j1]) {
                        z_rows.add(r, ur(i1, i2, mod(int64_t(sz) + t, l)), e1[i1][j1]);
                    }
                }
            }
        }
    }
    TaggedRows x_rows(n2 * m1 * l);
    lay.x_checks.resize(n2 * m1 * l);
    for (uint32_t j2 = 0; j2 < n2; j2++) {
        for (uint32_t i1 = 0; i1 < m1; i1++) {
            for (uint32_t sx = 0; sx < l; sx++) {
                size_t r = (j2 * m1 + i1) * l + sx;
                lay.x_checks[r] = {Quadrant::LowerRight, i1, j2, sx, i1, sx};
                for (uint32_t j1 = 0; j1 < n1; j1++) {
                    for (uint32_t t : b1.entries[i1][j1]) {
                        x_rows.add(r, ll(j1, j2, mod(int64_t(sx) - t, l)), e1[i1][j1]);
                    }
                }
                for (uint32_t i2 = 0; i2 < m2; i2++) {
                    for (uint32_t t : b2.entries[i2][j2]) {
                        x_rows.add(r, ur(i1, i2, mod(int64_t(sx) + t, l)), e2[i2][j2]);
                    }
                }
            }
        }
    }
    std::tie(code.hz, lay.hz_edge) = z_rows.finish(n);
    std::tie(code.hx, lay.hx_edge) = x_rows.finish(n);
    return code;
}

MonomialMatrix to_monomial(const BitMatrix &h) {
    MonomialMatrix m(h.rows(), h.cols(), 1);
    for (size_t r = 0; r < h.rows(); r++) {
        for (uint32_t c : h.row(r)) {
            m.entries[r][c] = {0};
        }
    }
    return m;
}

}  // namespace

CssCode hgp(const BitMatrix &h1, const BitMatrix &h2) {
    CssCode code = product_code(to_monomial(h1), to_monomial(h2));
    code.family = "hgp";
    code.parameters = {{"n1", std::to_string(h1.cols())}, {"r1", std::to_string(h1.rows())},
                       {"n2", std::to_string(h2.cols())}, {"r2", std::to_string(h2.rows())}};
    finish_code(code);
    return code;
}

CssCode qlp(const MonomialMatrix &b1, const MonomialMatrix &b2) {
    CssCode code = product_code(b1, b2);
    code.family = "qlp";
    code.parameters = {{"l", std::to_string(b1.lift_size)},
                       {"base1", std::to_string(b1.rows) + "x" + std::to_string(b1.cols)},
                       {"base2", std::to_string(b2.rows) + "x" + std::to_string(b2.cols)}};
    finish_code(code);
    return code;
}

MonomialMatrix bpc_left_block(const std::vector<uint32_t> &p, size_t q) {
    size_t l = 3 * q;
    MonomialMatrix m(3, 3, l);
    // x^a acting on the coset representative x^r lands in coset r' = (a + r) mod 3, times x^(a + r - r').
    for (uint32_t a : p) {
        for (uint32_t r = 0; r < 3; r++) {
            uint32_t rp = (a + r) % 3;
            m.add_term(rp, r, int64_t(a) + r - rp);
        }
    }
    return m;
}

MonomialMatrix bpc_right_block(const std::vector<uint32_t> &p, size_t q) {
    MonomialMatrix m(3, 3, 3 * q);
    for (uint32_t i = 0; i < 3; i++) {
        for (uint32_t a : p) {
            m.add_term(i, i, a);
        }
    }
    return m;
}

std::pair<uint32_t, uint32_t> bpc_shuffle(uint32_t node, uint32_t slot, size_t q) {
    uint32_t m = slot / 3;
    uint32_t r = slot % 3;
    return {r, static_cast<uint32_t>(q * node + m)};
}

std::pair<uint32_t, uint32_t> bpc_unshuffle(uint32_t node, uint32_t slot, size_t q) {
    uint32_t i = static_cast<uint32_t>(slot / q);
    uint32_t m = static_cast<uint32_t>(slot % q);
    return {i, 3 * m + node};
}

CssCode bpc_from_blocks(const MonomialMatrix &p1_block, const MonomialMatrix &p2_block) {
    const MonomialMatrix &a = p2_block;  // e (x)_H p2, diagonal
    const MonomialMatrix &b = p1_block;  // p1 (x)_H e
    if (a.rows != 3 || a.cols != 3 || b.rows != 3 || b.cols != 3) {
        throw std::invalid_argument("bpc: blocks must be 3x3");
    }
    if (a.lift_size != b.lift_size || a.lift_size % 3 != 0 || a.lift_size < 3) {
        throw std::invalid_argument("bpc: lift size must be 3q and equal for both blocks");
    }
    size_t l = a.lift_size;
    size_t q = l / 3;
    for (size_t i = 0; i < 3; i++) {
        for (size_t j = 0; j < 3; j++) {
            if (i != j && !a.entries[i][j].empty()) {
                throw std::invalid_argument("bpc: e (x)_H p2 block must be diagonal");
            }
            if (i == j && a.entries[i][j] != a.entries[0][0]) {
                throw std::invalid_argument("bpc: e (x)_H p2 block must repeat one polynomial on the diagonal");
            }
            for (uint32_t s : b.entries[i][j]) {
                if (s % 3 != 0) {
                    throw std::invalid_argument("bpc: p1 (x)_H e block has an exponent not divisible by 3");
                }
            }
        }
    }
    const std::vector<uint32_t> &p2 = a.entries[0][0];
    if (p2.empty()) {
        throw std::invalid_argument("bpc: p2 is zero");
    }

    CssCode code;
    code.family = "bpc";
    ProductLayout &lay = code.layout;
    // Horizontal classical edges are the terms of the p1 block between node i (X side) and node j (data side).
    std::vector<std::vector<std::vector<uint32_t>>> eh(3, std::vector<std::vector<uint32_t>>(3));
    for (uint32_t i = 0; i < 3; i++) {
        for (uint32_t j = 0; j < 3; j++) {
            for (size_t t = 0; t < b.entries[i][j].size(); t++) {
                eh[i][j].push_back(static_cast<uint32_t>(lay.horizontal_edges.size()));
                lay.horizontal_edges.push_back({i, j});
            }
        }
    }
    // Vertical classical edges live on the shuffled nodes: bit-side residue r joined to check-side residue
    // r + t through each term t of p2.
    size_t w2 = p2.size();
    for (uint32_t r = 0; r < 3; r++) {
        for (size_t t = 0; t < w2; t++) {
            lay.vertical_edges.push_back({(r + p2[t]) % 3, r});
        }
    }
    auto ev = [&](uint32_t bit_slot, size_t t) { return static_cast<uint32_t>((bit_slot % 3) * w2 + t); };

    size_t n = 6 * l;
    auto coord = [&](Quadrant quad, uint32_t node, uint32_t slot) {
        auto [sa, ss] = bpc_shuffle(node, slot, q);
        return QubitCoord{quad, node, 0, slot, sa, ss};
    };
    lay.data.resize(n);
    lay.z_checks.resize(3 * l);
    lay.x_checks.resize(3 * l);
    for (uint32_t node = 0; node < 3; node++) {
        for (uint32_t s = 0; s < l; s++) {
            lay.data[node * l + s] = coord(Quadrant::LowerLeft, node, s);
            lay.data[(3 + node) * l + s] = coord(Quadrant::UpperRight, node, s);
            lay.z_checks[node * l + s] = coord(Quadrant::UpperLeft, node, s);
            lay.x_checks[node * l + s] = coord(Quadrant::LowerRight, node, s);
        }
    }
    auto ll = [&](uint32_t node, uint32_t s) { return static_cast<uint32_t>(node * l + s); };
    auto ur = [&](uint32_t node, uint32_t s) { return static_cast<uint32_t>((3 + node) * l + s); };

    TaggedRows z_rows(3 * l);
    TaggedRows x_rows(3 * l);
    for (uint32_t i = 0; i < 3; i++) {
        for (uint32_t sc = 0; sc < l; sc++) {
            size_t r = i * l + sc;
            // H_Z = [A | B^T]
            for (size_t t = 0; t < w2; t++) {
                uint32_t s = mod(int64_t(sc) - p2[t], l);
                z_rows.add(r, ll(i, s), ev(s, t));
            }
            for (uint32_t j = 0; j < 3; j++) {
                const auto &terms = b.entries[j][i];
                for (size_t t = 0; t < terms.size(); t++) {
                    z_rows.add(r, ur(j, mod(int64_t(sc) + terms[t], l)), eh[j][i][t]);
                }
            }
            // H_X = [B | A^T]
            for (uint32_t j = 0; j < 3; j++) {
                const auto &terms = b.entries[i][j];
                for (size_t t = 0; t < terms.size(); t++) {
                    x_rows.add(r, ll(j, mod(int64_t(sc) - terms[t], l)), eh[i][j][t]);
                }
            }
            for (size_t t = 0; t < w2; t++) {
                x_rows.add(r, ur(i, mod(int64_t(sc) + p2[t], l)), ev(sc, t));
            }
        }
    }
    std::tie(code.hz, lay.hz_edge) = z_rows.finish(n);
    std::tie(code.hx, lay.hx_edge) = x_rows.finish(n);
    code.parameters["q"] = std::to_string(q);
    code.parameters["l"] = std::to_string(l);
    finish_code(code);
    return code;
}

CssCode bpc(const std::vector<uint32_t> &p1, const std::vector<uint32_t> &p2, size_t q) {
    if (q < 1) {
        throw std::invalid_argument("bpc: q must be >= 1");
    }
    for (uint32_t e : p1) {
        if (e >= 3 * q) {
            throw std::invalid_argument("bpc: exponent of p1 out of range");
        }
    }
    for (uint32_t e : p2) {
        if (e >= 3 * q) {
            throw std::invalid_argument("bpc: exponent of p2 out of range");
        }
    }
    CssCode code = bpc_from_blocks(bpc_left_block(p1, q), bpc_right_block(p2, q));
    auto join = [](const std::vector<uint32_t> &p) {
        std::string s;
        for (uint32_t e : p) {
            s += (s.empty() ? "" : ",") + std::to_string(e);
        }
        return s;
    };
    code.parameters["p1"] = join(p1);
    code.parameters["p2"] = join(p2);
    return code;
}

MonomialMatrix qlp_base_matrix(size_t lift_size) {
    switch (lift_size) {
        case 16:
            return MonomialMatrix::from_exponents({{0, 0, 0, 0, 0}, {0, 2, 4, 7, 11}, {0, 3, 10, 14, 15}}, 16);
        case 21:
            return MonomialMatrix::from_exponents({{0, 0, 0, 0, 0}, {0, 4, 5, 7, 17}, {0, 14, 18, 12, 11}}, 21);
        case 30:
            return MonomialMatrix::from_exponents({{0, 0, 0, 0, 0}, {0, 2, 14, 24, 25}, {0, 16, 11, 14, 13}}, 30);
        default:
            throw std::invalid_argument("qlp_base_matrix: no built-in base matrix for lift size " +
                                        std::to_string(lift_size));
    }
}

std::pair<std::vector<uint32_t>, std::vector<uint32_t>> bpc_polynomials(size_t q) {
    switch (q) {
        case 4:
            return {{0, 1, 5}, {0, 4, 11}};
        case 5:
            return {{0, 1, 5}, {0, 2, 7}};
        case 8:
            return {{0, 1, 5}, {0, 2, 7}};
        default:
            throw std::invalid_argument("bpc_polynomials: no built-in polynomials for q = " + std::to_string(q));
    }
}

CssCode css_from_matrices(const BitMatrix &hx, const BitMatrix &hz, std::string family) {
    if (hx.cols() != hz.cols()) {
        throw std::invalid_argument("css_from_matrices: hx and hz column counts differ");
    }
    CssCode code;
    code.family = std::move(family);
    code.hx = hx;
    code.hz = hz;
    code.n = hx.cols();
    code.k = code.n - rank(hx) - rank(hz);
    compute_logicals(code);
    return code;
}

void compute_logicals(CssCode &code) {
    BitMatrix lx = independent_rows_modulo(code.hx, kernel_basis(code.hz));
    BitMatrix lz = independent_rows_modulo(code.hz, kernel_basis(code.hx));
    if (lx.rows() != lz.rows()) {
        throw std::invalid_argument("compute_logicals: X and Z logical counts differ; not a CSS code");
    }
    if (lx.rows() > 0) {
        auto inv = inverse(mul(lx, lz.transpose()));
        if (!inv) {
            throw std::invalid_argument("compute_logicals: logical pairing is singular; not a CSS code");
        }
        lz = mul(inv->transpose(), lz);
    }
    code.lx = std::move(lx);
    code.lz = std::move(lz);
}

CssReport validate_css(const CssCode &code) {
    CssReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.failures.push_back(std::move(msg));
    };
    if (code.hx.cols() != code.n || code.hz.cols() != code.n) {
        fail("column count differs from n");
        return rep;
    }
    if (!mul(code.hx, code.hz.transpose()).is_zero()) {
        fail("hx hz^T != 0");
    }
    size_t k = code.n - std::min(code.n, rank(code.hx) + rank(code.hz));
    if (k != code.k) {
        fail("k = " + std::to_string(code.k) + " but n - rank(hx) - rank(hz) = " + std::to_string(k));
    }
    if (code.lx.rows() != code.k || code.lz.rows() != code.k) {
        fail("logical bases do not have k rows");
    } else if (code.k > 0) {
        if (!mul(code.hz, code.lx.transpose()).is_zero()) {
            fail("hz lx^T != 0");
        }
        if (!mul(code.hx, code.lz.transpose()).is_zero()) {
            fail("hx lz^T != 0");
        }
        if (rank(mul(code.lx, code.lz.transpose())) != code.k) {
            fail("lx lz^T is not full rank");
        }
    }
    const ProductLayout &lay = code.layout;
    if (!lay.empty()) {
        if (lay.data.size() != code.n || lay.z_checks.size() != code.hz.rows() ||
            lay.x_checks.size() != code.hx.rows() || lay.hx_edge.size() != code.hx.rows() ||
            lay.hz_edge.size() != code.hz.rows()) {
            fail("layout sizes do not match the check matrices");
        } else {
            for (size_t r = 0; r < code.hx.rows(); r++) {
                if (lay.hx_edge[r].size() != code.hx.row(r).size()) {
                    fail("hx edge tags misaligned at row " + std::to_string(r));
                    break;
                }
            }
            for (size_t r = 0; r < code.hz.rows(); r++) {
                if (lay.hz_edge[r].size() != code.hz.row(r).size()) {
                    fail("hz edge tags misaligned at row " + std::to_string(r));
                    break;
                }
            }
        }
    }
    return rep;
}

namespace {

using nlohmann::json;

json coords_to_json(const std::vector<QubitCoord> &v) {
    json out = json::array();
    for (const auto &c : v) {
        out.push_back({static_cast<int>(c.quadrant), c.a, c.b, c.s, c.shuffled_a, c.shuffled_s});
    }
    return out;
}

std::vector<QubitCoord> coords_from_json(const json &j) {
    std::vector<QubitCoord> out;
    for (const auto &e : j) {
        out.push_back({static_cast<Quadrant>(e.at(0).get<int>()), e.at(1).get<uint32_t>(), e.at(2).get<uint32_t>(),
                       e.at(3).get<uint32_t>(), e.at(4).get<uint32_t>(), e.at(5).get<uint32_t>()});
    }
    return out;
}

json edges_to_json(const std::vector<ClassicalEdge> &v) {
    json out = json::array();
    for (const auto &e : v) {
        out.push_back({e.check, e.bit});
    }
    return out;
}

std::vector<ClassicalEdge> edges_from_json(const json &j) {
    std::vector<ClassicalEdge> out;
    for (const auto &e : j) {
        out.push_back({e.at(0).get<uint32_t>(), e.at(1).get<uint32_t>()});
    }
    return out;
}

void write_matrix(const BitMatrix &m, const std::filesystem::path &p) {
    std::ofstream out(p);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    m.write_text(out);
}

BitMatrix read_matrix(const std::filesystem::path &p) {
    std::ifstream in(p);
    if (!in) {
        throw std::runtime_error("cannot read " + p.string());
    }
    return BitMatrix::read_text(in);
}

}  // namespace

void save_bundle(const CssCode &code, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    write_matrix(code.hx, dir / "hx.txt");
    write_matrix(code.hz, dir / "hz.txt");
    write_matrix(code.lx, dir / "lx.txt");
    write_matrix(code.lz, dir / "lz.txt");
    json meta;
    meta["family"] = code.family;
    meta["parameters"] = code.parameters;
    meta["n"] = code.n;
    meta["k"] = code.k;
    const ProductLayout &lay = code.layout;
    if (!lay.empty()) {
        meta["layout"] = {{"data", coords_to_json(lay.data)},
                          {"z_checks", coords_to_json(lay.z_checks)},
                          {"x_checks", coords_to_json(lay.x_checks)},
                          {"horizontal_edges", edges_to_json(lay.horizontal_edges)},
                          {"vertical_edges", edges_to_json(lay.vertical_edges)},
                          {"hx_edge", lay.hx_edge},
                          {"hz_edge", lay.hz_edge}};
    }
    std::ofstream out(dir / "meta.json");
    out << meta.dump(1) << "\n";
}

CssCode load_bundle(const std::filesystem::path &dir) {
    std::ifstream in(dir / "meta.json");
    if (!in) {
        throw std::runtime_error("cannot read " + (dir / "meta.json").string());
    }
    json meta = json::parse(in);
    CssCode code;
    code.family = meta.at("family").get<std::string>();
    code.parameters = meta.at("parameters").get<std::map<std::string, std::string>>();
    code.n = meta.at("n").get<size_t>();
    code.k = meta.at("k").get<size_t>();
    code.hx = read_matrix(dir / "hx.txt");
    code.hz = read_matrix(dir / "hz.txt");
    code.lx = read_matrix(dir / "lx.txt");
    code.lz = read_matrix(dir / "lz.txt");
    if (meta.contains("layout")) {
        const json &l = meta["layout"];
        code.layout.data = coords_from_json(l.at("data"));
        code.layout.z_checks = coords_from_json(l.at("z_checks"));
        code.layout.x_checks = coords_from_json(l.at("x_checks"));
        code.layout.horizontal_edges = edges_from_json(l.at("horizontal_edges"));
        code.layout.vertical_edges = edges_from_json(l.at("vertical_edges"));
        code.layout.hx_edge = l.at("hx_edge").get<std::vector<std::vector<uint32_t>>>();
        code.layout.hz_edge = l.at("hz_edge").get<std::vector<std::vector<uint32_t>>>();
    }
    return code;
}

}  // namespace qldpc
