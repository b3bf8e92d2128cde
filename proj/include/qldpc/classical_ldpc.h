#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qldpc/gf2.h"

namespace qldpc {

/// Shortest cycle length of a Tanner graph; std::nullopt stands for an acyclic (unbounded-girth) graph.
using Girth = std::optional<size_t>;

struct ClassicalCode {
    BitMatrix h;  // r x n
    size_t n = 0;
    size_t r = 0;
    Girth girth;
    /// Upper bound on the minimum distance; std::nullopt when the kernel is trivial.
    std::optional<size_t> d_estimate;

    size_t k() const;
};

struct GenerationOptions {
    /// Candidates kept in the pool; the one with the largest estimated distance wins.
    size_t pool_size = 100;
    /// Rejection rounds allowed per pool candidate before giving up.
    size_t max_attempts_per_candidate = 200000;
    /// Trials for each candidate's distance estimate.
    size_t distance_trials = 200;
};

class GenerationFailure : public std::runtime_error {
   public:
    GenerationFailure(const std::string &what, size_t attempts) : std::runtime_error(what), attempts_(attempts) {}
    size_t attempts() const { return attempts_; }

   private:
    size_t attempts_;
};

/// Random (col_weight, row_weight)-regular Tanner graph by stub matching, rejecting multi-edges and
/// girth below min_girth, keeping the pool candidate with the largest estimated distance.
ClassicalCode generate_regular(size_t n, size_t col_weight, size_t row_weight, size_t min_girth, uint64_t seed,
                               const GenerationOptions &options = {});

/// Shortest cycle of the bipartite graph (rows and columns as vertices), via BFS from every vertex.
Girth girth(const BitMatrix &h);

/// Upper bound on the smallest nonzero codeword weight of ker(h); std::nullopt if ker(h) = {0}.
std::optional<size_t> estimate_distance(const BitMatrix &h, size_t trials, uint64_t seed);

}  // namespace qldpc
