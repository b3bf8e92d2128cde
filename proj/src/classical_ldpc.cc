#include "qldpc/classical_ldpc.h"

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

#include "qldpc/distance.h"
#include "qldpc/rng.h"

namespace qldpc {

size_t ClassicalCode::k() const { return n - rank(h); }

Girth girth(const BitMatrix &h) {
    // Vertices 0..rows-1 are checks, rows..rows+cols-1 are bits.
    size_t nr = h.rows();
    size_t nv = nr + h.cols();
    std::vector<std::vector<uint32_t>> adj(nv);
    for (size_t r = 0; r < nr; r++) {
        for (uint32_t c : h.row(r)) {
            adj[r].push_back(static_cast<uint32_t>(nr + c));
            adj[nr + c].push_back(static_cast<uint32_t>(r));
        }
    }
    size_t best = std::numeric_limits<size_t>::max();
    std::vector<int64_t> dist(nv);
    std::vector<int64_t> parent(nv);
    for (size_t s = 0; s < nv; s++) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<uint32_t> q;
        dist[s] = 0;
        parent[s] = -1;
        q.push(static_cast<uint32_t>(s));
        while (!q.empty()) {
            uint32_t u = q.front();
            q.pop();
            if (2 * static_cast<size_t>(dist[u]) + 1 >= best) {
                break;
            }
            for (uint32_t v : adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    q.push(v);
                } else if (parent[u] != static_cast<int64_t>(v)) {
                    best = std::min(best, static_cast<size_t>(dist[u] + dist[v] + 1));
                }
            }
        }
    }
    if (best == std::numeric_limits<size_t>::max()) {
        return std::nullopt;
    }
    return best;
}

std::optional<size_t> estimate_distance(const BitMatrix &h, size_t trials, uint64_t seed) {
    auto report = min_weight_logical(h, BitMatrix(0, h.cols()), trials, seed);
    if (!report.found) {
        return std::nullopt;
    }
    return report.weight;
}

namespace {

// Distances from `source` in the current partial Tanner graph, counting check-bit hops.
std::vector<uint32_t> check_distances(const std::vector<std::vector<uint32_t>> &check_adj,
                                      const std::vector<std::vector<uint32_t>> &bit_adj, uint32_t source) {
    constexpr uint32_t inf = std::numeric_limits<uint32_t>::max();
    std::vector<uint32_t> dist(check_adj.size(), inf);
    std::vector<uint32_t> frontier{source};
    dist[source] = 0;
    uint32_t d = 0;
    while (!frontier.empty()) {
        d += 2;
        std::vector<uint32_t> next;
        for (uint32_t c : frontier) {
            for (uint32_t b : check_adj[c]) {
                for (uint32_t c2 : bit_adj[b]) {
                    if (dist[c2] == inf) {
                        dist[c2] = d;
                        next.push_back(c2);
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return dist;
}

// One round of sequential stub matching: bits are wired in order, each stub drawn among checks with free
// stubs, weighted by their remaining stubs, skipping checks that would close a cycle shorter than
// min_girth. Returns nullopt when a bit has no admissible check left.
std::optional<BitMatrix> try_stub_matching(size_t n, size_t r, size_t col_weight, size_t row_weight, size_t min_girth,
                                           Rng &rng) {
    std::vector<std::vector<uint32_t>> check_adj(r);
    std::vector<std::vector<uint32_t>> bit_adj(n);
    std::vector<size_t> free_stubs(r, row_weight);
    for (size_t j = 0; j < n; j++) {
        std::vector<std::vector<uint32_t>> dists;
        for (size_t k = 0; k < col_weight; k++) {
            std::vector<uint32_t> candidates;
            size_t total = 0;
            for (size_t c = 0; c < r; c++) {
                if (free_stubs[c] == 0) {
                    continue;
                }
                bool ok = true;
                for (const auto &dist : dists) {
                    // Joining bit j to both ends of an existing path of length dist closes a cycle of dist + 2.
                    if (dist[c] == 0 || (dist[c] != std::numeric_limits<uint32_t>::max() && dist[c] + 2 < min_girth)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    candidates.push_back(static_cast<uint32_t>(c));
                    total += free_stubs[c];
                }
            }
            if (candidates.empty()) {
                return std::nullopt;
            }
            uint64_t pick = rng.below(total);
            uint32_t chosen = candidates.back();
            for (uint32_t c : candidates) {
                if (pick < free_stubs[c]) {
                    chosen = c;
                    break;
                }
                pick -= free_stubs[c];
            }
            dists.push_back(check_distances(check_adj, bit_adj, chosen));
            free_stubs[chosen]--;
            bit_adj[j].push_back(chosen);
        }
        for (uint32_t c : bit_adj[j]) {
            check_adj[c].push_back(static_cast<uint32_t>(j));
        }
    }
    BitMatrix h = BitMatrix::from_rows(n, std::move(check_adj));
    Girth g = girth(h);
    if (g && *g < min_girth) {
        return std::nullopt;
    }
    return h;
}

}  // namespace

ClassicalCode generate_regular(size_t n, size_t col_weight, size_t row_weight, size_t min_girth, uint64_t seed,
                               const GenerationOptions &options) {
    if (row_weight == 0 || col_weight == 0 || (n * col_weight) % row_weight != 0) {
        throw std::invalid_argument("generate_regular: n * col_weight must be divisible by row_weight");
    }
    if (min_girth != 4 && min_girth != 6 && min_girth != 8) {
        throw std::invalid_argument("generate_regular: min_girth must be 4, 6 or 8");
    }
    if (options.pool_size < 1) {
        throw std::invalid_argument("generate_regular: pool_size must be >= 1");
    }
    size_t r = n * col_weight / row_weight;
    std::optional<ClassicalCode> best;
    size_t total_attempts = 0;
    for (size_t candidate = 0; candidate < options.pool_size; candidate++) {
        Rng rng(derive_seed(seed, candidate));
        std::optional<BitMatrix> h;
        for (size_t attempt = 0; attempt < options.max_attempts_per_candidate && !h; attempt++) {
            total_attempts++;
            h = try_stub_matching(n, r, col_weight, row_weight, min_girth, rng);
        }
        if (!h) {
            throw GenerationFailure("generate_regular: no (" + std::to_string(col_weight) + "," +
                                        std::to_string(row_weight) + ")-regular graph with girth >= " +
                                        std::to_string(min_girth) + " after " + std::to_string(total_attempts) +
                                        " attempts",
                                    total_attempts);
        }
        ClassicalCode code;
        code.n = n;
        code.r = r;
        code.girth = girth(*h);
        code.d_estimate = estimate_distance(*h, options.distance_trials, derive_seed(seed, candidate, 1));
        code.h = std::move(*h);
        auto score = [](const ClassicalCode &c) { return c.d_estimate.value_or(0); };
        if (!best || score(code) > score(*best)) {
            best = std::move(code);
        }
    }
    return std::move(*best);
}

}  // namespace qldpc
