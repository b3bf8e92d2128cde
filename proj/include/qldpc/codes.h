#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qldpc/gf2.h"

namespace qldpc {

/// Quadrant of the product-code Tanner graph layout.
enum class Quadrant : uint8_t {
    LowerLeft,   // data (v1 v2)
    UpperRight,  // data (c1 c2)
    UpperLeft,   // Z-type syndrome (v1 c2)
    LowerRight,  // X-type syndrome (c1 v2)
};

/// Position of one qubit in the layout. For hgp/qlp, (a, b) are the classical node indices of the two
/// factors and s is the lift index. For bpc, a is the node (0..2), s the slot, and (shuffled_a,
/// shuffled_s) the position after the residue shuffle.
struct QubitCoord {
    Quadrant quadrant = Quadrant::LowerLeft;
    uint32_t a = 0;
    uint32_t b = 0;
    uint32_t s = 0;
    uint32_t shuffled_a = 0;
    uint32_t shuffled_s = 0;

    bool operator==(const QubitCoord &) const = default;
};

/// Classical Tanner graph edge (check, bit) that a set of quantum edges inherits its sign from.
struct ClassicalEdge {
    uint32_t check = 0;
    uint32_t bit = 0;

    bool operator==(const ClassicalEdge &) const = default;
};

/// Product layout plus, for every 1-entry of hx and hz, the classical edge it descends from.
/// Horizontal quantum edges are Z-check/UR-data (upper) and X-check/LL-data (lower); vertical ones are
/// Z-check/LL-data (left) and X-check/UR-data (right).
struct ProductLayout {
    std::vector<QubitCoord> data;  // per data qubit
    std::vector<QubitCoord> z_checks;
    std::vector<QubitCoord> x_checks;
    std::vector<ClassicalEdge> horizontal_edges;
    std::vector<ClassicalEdge> vertical_edges;
    /// hx_edge[r][k] is the classical edge of entry hx.row(r)[k]; same for hz_edge.
    std::vector<std::vector<uint32_t>> hx_edge;
    std::vector<std::vector<uint32_t>> hz_edge;

    bool empty() const { return data.empty(); }
    bool is_lower(uint32_t data_qubit) const { return data[data_qubit].quadrant == Quadrant::LowerLeft; }
};

struct CssCode {
    std::string family;  // "hgp", "qlp", "bpc" or "custom"
    std::map<std::string, std::string> parameters;
    BitMatrix hx;
    BitMatrix hz;
    size_t n = 0;
    size_t k = 0;
    BitMatrix lx;
    BitMatrix lz;
    ProductLayout layout;
};

/// Polynomial-entry matrix over F2[x]/(x^l - 1). entries[i][j] lists the exponents present.
struct MonomialMatrix {
    size_t rows = 0;
    size_t cols = 0;
    size_t lift_size = 1;
    std::vector<std::vector<std::vector<uint32_t>>> entries;

    MonomialMatrix() = default;
    MonomialMatrix(size_t rows, size_t cols, size_t lift_size);
    /// One monomial x^e per entry; negative exponents mark empty entries.
    static MonomialMatrix from_exponents(const std::vector<std::vector<int>> &exponents, size_t lift_size);

    /// Adds x^s (mod x^l - 1); a repeated term cancels.
    void add_term(size_t i, size_t j, int64_t s);
    /// Transpose with x^s -> x^(l - s).
    MonomialMatrix transpose() const;
};

/// Circulant lift: each x^s becomes the l x l matrix M with M(i, j) = 1 iff i = (j + s) mod l.
BitMatrix lift(const MonomialMatrix &m);

CssCode hgp(const BitMatrix &h1, const BitMatrix &h2);
CssCode qlp(const MonomialMatrix &b1, const MonomialMatrix &b2);

/// Balanced product cyclic code from two polynomials (exponent lists) with l = 3q.
CssCode bpc(const std::vector<uint32_t> &p1, const std::vector<uint32_t> &p2, size_t q);
/// Same, with the two 3x3 blocks (p1 (x)_H e and e (x)_H p2) supplied directly.
CssCode bpc_from_blocks(const MonomialMatrix &p1_block, const MonomialMatrix &p2_block);
/// The 3x3 block p (x)_H e for l = 3q.
MonomialMatrix bpc_left_block(const std::vector<uint32_t> &p, size_t q);
/// The 3x3 block e (x)_H p, which is diag(p, p, p).
MonomialMatrix bpc_right_block(const std::vector<uint32_t> &p, size_t q);

/// Built-in 3x5 monomial base matrix for the QLP family; l in {16, 21, 30}.
MonomialMatrix qlp_base_matrix(size_t lift_size);
/// Built-in weight-3 polynomial pair for the BPC family; q in {4, 5, 8}.
std::pair<std::vector<uint32_t>, std::vector<uint32_t>> bpc_polynomials(size_t q);

/// Residue shuffle of one bpc quadrant: slot s = 3m + r of node i goes to slot q i + m of node r.
std::pair<uint32_t, uint32_t> bpc_shuffle(uint32_t node, uint32_t slot, size_t q);
std::pair<uint32_t, uint32_t> bpc_unshuffle(uint32_t node, uint32_t slot, size_t q);

/// Code from raw check matrices, no layout.
CssCode css_from_matrices(const BitMatrix &hx, const BitMatrix &hz, std::string family = "custom");

/// Fills lx, lz: lx spans ker(hz) mod rowspace(hx), lz likewise, and lx lz^T = I.
void compute_logicals(CssCode &code);

struct CssReport {
    bool ok = true;
    std::vector<std::string> failures;
};

CssReport validate_css(const CssCode &code);

/// Directory bundle: hx.txt, hz.txt, lx.txt, lz.txt (coordinate lists) and meta.json.
void save_bundle(const CssCode &code, const std::filesystem::path &dir);
CssCode load_bundle(const std::filesystem::path &dir);

}  // namespace qldpc
