#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qldpc/gf2.h"

namespace qldpc {

class Circuit;
struct DetectorErrorModel;

/// Outcome of a randomized minimum-weight search. `weight` is an upper bound on the true minimum.
struct DistanceReport {
    bool found = false;
    size_t weight = 0;
    std::vector<uint32_t> witness;
    size_t trials = 0;
    double seconds = 0.0;
    /// Human-readable location of each witness element (filled for circuit searches).
    std::vector<std::string> annotations;
};

/// Searches for a minimum-weight x with h x = 0 and logicals x != 0 by repeated random column
/// permutations followed by elimination (information-set decoding, one free bit per candidate).
/// An empty `logicals` matrix (0 rows) means "any nonzero x". The reported weight never increases
/// as trials grow for a fixed seed.
DistanceReport min_weight_logical(const BitMatrix &h, const BitMatrix &logicals, size_t trials, uint64_t seed);

/// Same search, collecting up to `max_count` distinct witnesses of weight <= max_weight.
std::vector<std::vector<uint32_t>> low_weight_logicals(const BitMatrix &h, const BitMatrix &logicals, size_t trials,
                                                       uint64_t seed, size_t max_weight, size_t max_count);

struct CircuitDistanceOptions {
    size_t trials = 2000;
    uint64_t seed = 0;
    /// Wall-clock budget in seconds; 0 means unlimited.
    double time_budget = 0.0;
    /// Stop once a witness of at most this weight is verified (0 disables).
    size_t target_weight = 0;
};

/// Upper bound on the circuit distance: the fewest DEM mechanisms that flip an observable without
/// firing any detector. Each candidate is re-checked by injecting its representative faults into the
/// Pauli-frame simulator; only verified witnesses are reported.
DistanceReport circuit_distance_upper_bound(const DetectorErrorModel &dem, const Circuit &noisy_circuit,
                                            const CircuitDistanceOptions &options);

/// True iff h x = 0 and (logicals x != 0, or x != 0 when logicals has no rows).
bool verify_logical_witness(const BitMatrix &h, const BitMatrix &logicals, const std::vector<uint32_t> &witness);

}  // namespace qldpc
